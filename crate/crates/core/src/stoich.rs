//! Stoichiometric subspace, conservation laws and invariant polyhedra.

use nalgebra::{DMatrix, DVector};
use num::Zero;
use thiserror::Error;

use crate::geometry::linalg::{dot, nullspace, row_space_basis, to_f64, Q};
use crate::network::ReactionNetwork;

/// Exact bases of `H = span{target - source}` and of `H^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoichiometryInfo {
    pub h_basis: Vec<Vec<Q>>,
    pub hperp_basis: Vec<Vec<Q>>,
    pub dimension: usize,
    pub n_species: usize,
}

impl StoichiometryInfo {
    pub fn from_vectors(vectors: &[Vec<Q>], n_species: usize) -> Self {
        let h_basis = row_space_basis(vectors, n_species);
        let hperp_basis = nullspace(&h_basis, n_species);
        let dimension = h_basis.len();
        Self { h_basis, hperp_basis, dimension, n_species }
    }

    /// `w ∈ H^⊥`, decided exactly.
    pub fn is_in_hperp(&self, w: &[Q]) -> bool {
        self.h_basis.iter().all(|h| dot(h, w).is_zero())
    }

    /// Orthonormal basis of `H` as columns (n x dim).
    pub fn h_orthonormal(&self) -> DMatrix<f64> {
        orthonormal_columns(&self.h_basis, self.n_species)
    }

    /// Orthonormal basis of `H^⊥` as columns (n x (n - dim)).
    pub fn hperp_orthonormal(&self) -> DMatrix<f64> {
        orthonormal_columns(&self.hperp_basis, self.n_species)
    }

    /// Conservation matrix `A` with the `H^⊥` basis as rows.
    pub fn conservation_matrix(&self) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = self.hperp_basis.iter().map(|v| to_f64(v)).collect();
        DMatrix::from_fn(rows.len(), self.n_species, |i, j| rows[i][j])
    }

    /// Euclidean projection onto `H`.
    pub fn project_h(&self, x: &[f64]) -> Vec<f64> {
        let b = self.h_orthonormal();
        let v = DVector::from_column_slice(x);
        (&b * (b.transpose() * v)).iter().copied().collect()
    }

    /// Euclidean projection onto `H^⊥`.
    pub fn project_hperp(&self, x: &[f64]) -> Vec<f64> {
        let p = self.project_h(x);
        x.iter().zip(p).map(|(a, b)| a - b).collect()
    }

    /// `‖A (x - x0)‖_∞` for the conservation matrix `A`.
    pub fn conservation_defect(&self, x: &[f64], x0: &[f64]) -> f64 {
        self.hperp_basis
            .iter()
            .map(|row| to_f64(row).iter().zip(x.iter().zip(x0)).map(|(a, (u, v))| a * (u - v)).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

pub fn stoichiometric_subspace(net: &ReactionNetwork) -> StoichiometryInfo {
    StoichiometryInfo::from_vectors(&net.reaction_vectors(), net.n_species())
}

fn orthonormal_columns(basis: &[Vec<Q>], n: usize) -> DMatrix<f64> {
    if basis.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    let m = DMatrix::from_fn(n, basis.len(), |i, j| crate::geometry::linalg::q_to_f64(&basis[j][i]));
    let qr = m.qr();
    qr.q().columns(0, basis.len()).into_owned()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyhedronError {
    #[error("initial point must be strictly positive")]
    NonPositive,
    #[error("initial point has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
}

/// `(x0 + H) ∩ R^S_{≥0}`.
#[derive(Debug, Clone)]
pub struct InvariantPolyhedron {
    pub x0: Vec<f64>,
    pub stoich: StoichiometryInfo,
}

impl InvariantPolyhedron {
    pub fn new(x0: Vec<f64>, stoich: StoichiometryInfo) -> Result<Self, PolyhedronError> {
        if x0.len() != stoich.n_species {
            return Err(PolyhedronError::Length { expected: stoich.n_species, found: x0.len() });
        }
        if !x0.iter().all(|&v| v > 0.0 && v.is_finite()) {
            return Err(PolyhedronError::NonPositive);
        }
        Ok(Self { x0, stoich })
    }

    /// `x ≥ 0` and `‖A(x - x0)‖_∞ ≤ tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.x0.len() && x.iter().all(|&v| v >= 0.0) && self.stoich.conservation_defect(x, &self.x0) <= tol
    }
}
