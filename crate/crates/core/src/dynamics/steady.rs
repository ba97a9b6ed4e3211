//! Positive steady states by pseudo-transient continuation on reduced
//! coordinates `x = x0 + Bt`, with multistart inside the invariant polyhedron.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{DynamicsError, MassAction};
use crate::birch::random_interior_point;
use crate::network::ReactionNetwork;
use crate::stoich::{stoichiometric_subspace, StoichiometryInfo};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    pub x: Vec<f64>,
    /// `‖f(x)‖_2`.
    pub residual: f64,
    /// Index of the successful start (0 is `x0` itself).
    pub start: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    /// Bound on `max_i |f_i(x)| / x_i`, which stays away from zero when
    /// iterates slide to the boundary.
    pub tol: f64,
    pub max_iter: usize,
    /// Perturbed starts tried after `x0`.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 400, restarts: 8, seed: 0 }
    }
}

/// Finds `x* > 0` in `(x0 + H) ∩ R_{>0}` with `f(x*) = 0`.
pub fn find_steady_state(
    net: &ReactionNetwork,
    k: &[f64],
    x0: &[f64],
    opts: &SteadyOptions,
) -> Result<SteadyState, DynamicsError> {
    let field = MassAction::new(net);
    field.check(k, x0)?;
    if x0.iter().any(|&v| !(v > 0.0)) {
        return Err(DynamicsError::NonPositiveState);
    }
    let stoich = stoichiometric_subspace(net);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in 0..=opts.restarts {
        let s = if start == 0 { x0.to_vec() } else { random_interior_point(&stoich, x0, &mut rng) };
        match solve_from(&field, &stoich, k, x0, &s, opts) {
            Ok(x) => {
                let f = field.eval(k, &x)?;
                let residual = f.iter().map(|v| v * v).sum::<f64>().sqrt();
                return Ok(SteadyState { x, residual, start });
            }
            Err((x, r)) => {
                if best.as_ref().map_or(true, |b| r < b.1) {
                    best = Some((x, r));
                }
            }
        }
    }
    let (best, residual) = best.expect("at least one start");
    Err(DynamicsError::NoConvergence { best, residual })
}

fn scaled_residual(f: &[f64], x: &[f64]) -> f64 {
    f.iter().zip(x).map(|(a, b)| (a / b).abs()).fold(0.0, f64::max)
}

/// PTC iteration `(I/τ - Bᵀ J B) Δ = Bᵀ f`, with `τ` grown as the residual
/// falls (switched evolution relaxation) and steps damped to keep `x > 0`.
fn solve_from(
    field: &MassAction,
    stoich: &StoichiometryInfo,
    k: &[f64],
    x0: &[f64],
    start: &[f64],
    opts: &SteadyOptions,
) -> Result<Vec<f64>, (Vec<f64>, f64)> {
    let n = x0.len();
    let b = stoich.h_orthonormal();
    let d = b.ncols();
    let mut x = DVector::from_column_slice(start);
    let eval = |x: &DVector<f64>| field.eval(k, x.as_slice()).ok();
    let Some(mut f) = eval(&x) else { return Err((start.to_vec(), f64::INFINITY)) };
    if d == 0 {
        let r = scaled_residual(&f, x.as_slice());
        return if r <= opts.tol { Ok(start.to_vec()) } else { Err((start.to_vec(), r)) };
    }
    let mut tau = 1e-2;
    let mut prev = DVector::from_column_slice(&f).norm();
    for _ in 0..opts.max_iter {
        let res = scaled_residual(&f, x.as_slice());
        if res <= opts.tol {
            return Ok(x.iter().copied().collect());
        }
        let jac = field.jacobian(k, x.as_slice()).map_err(|_| (x.iter().copied().collect::<Vec<_>>(), res))?;
        let j = DMatrix::from_fn(n, n, |i, c| jac[i][c]);
        let fr = b.transpose() * DVector::from_column_slice(&f);
        let jr = b.transpose() * j * &b;
        let lhs = DMatrix::identity(d, d) / tau - &jr;
        let Some(step) = lhs.lu().solve(&fr) else {
            tau *= 0.1;
            continue;
        };
        let dx = &b * step;
        let mut s: f64 = 1.0;
        for (xi, di) in x.iter().zip(dx.iter()) {
            if *di < 0.0 {
                s = s.min(0.9 * xi / -di);
            }
        }
        let x_new = &x + dx * s;
        match eval(&x_new) {
            Some(f_new) if x_new.iter().all(|&v| v > 0.0) => {
                let norm = DVector::from_column_slice(&f_new).norm();
                // switched evolution relaxation, capped to keep the step finite
                tau = (tau * (prev / norm.max(1e-300))).clamp(1e-8, 1e15);
                if s < 1.0 {
                    tau = tau.min(1e3);
                }
                prev = norm;
                x = x_new;
                f = f_new;
            }
            _ => tau *= 0.1,
        }
    }
    let res = scaled_residual(&f, x.as_slice());
    Err((x.iter().copied().collect(), res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_network;
    use approx::assert_abs_diff_eq;

    fn net(text: &str) -> ReactionNetwork {
        parse_network(text).unwrap().network
    }

    #[test]
    fn reverse_lotka_volterra_unit_rates() {
        let s = find_steady_state(&net("2X -> X\n0 -> Y\n2Y -> X + Y"), &[1.0, 1.0, 1.0], &[3.0, 0.2], &SteadyOptions::default())
            .unwrap();
        assert_abs_diff_eq!(s.x[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.x[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn isomerization_balance() {
        let s = find_steady_state(&net("A <-> B"), &[1.0, 2.0], &[1.0, 2.0], &SteadyOptions::default()).unwrap();
        assert_abs_diff_eq!(s.x[0], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.x[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn conversion_has_none() {
        let r = find_steady_state(&net("A -> B"), &[1.0], &[1.0, 1.0], &SteadyOptions::default());
        assert!(matches!(r, Err(DynamicsError::NoConvergence { .. })));
    }
}
