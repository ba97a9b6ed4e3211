//! Pseudo-Helmholtz function `g_α`, Birch points, and empirical checks of
//! the Birch theorems on toric rays.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::stoich::StoichiometryInfo;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BirchError {
    #[error("{what} must be strictly positive")]
    NonPositive { what: &'static str },
    #[error("vector has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { point: Vec<f64>, residual: f64, iterations: usize },
    #[error("x must be strictly positive to take the gradient")]
    Boundary,
}

fn positive(v: &[f64], what: &'static str) -> Result<(), BirchError> {
    if v.iter().all(|&x| x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(BirchError::NonPositive { what })
    }
}

fn same_len(a: &[f64], n: usize) -> Result<(), BirchError> {
    if a.len() == n {
        Ok(())
    } else {
        Err(BirchError::Length { expected: n, found: a.len() })
    }
}

/// `Σ x_i log(x_i/α_i) - x_i` with `0 log 0 = 0`.
pub fn g_alpha(x: &[f64], alpha: &[f64]) -> Result<f64, BirchError> {
    same_len(x, alpha.len())?;
    positive(alpha, "alpha")?;
    if x.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(BirchError::NonPositive { what: "x" });
    }
    Ok(x.iter().zip(alpha).map(|(&xi, &ai)| if xi == 0.0 { 0.0 } else { xi * (xi / ai).ln() - xi }).sum())
}

/// `log(x/α)` componentwise.
pub fn grad_g_alpha(x: &[f64], alpha: &[f64]) -> Result<Vec<f64>, BirchError> {
    same_len(x, alpha.len())?;
    positive(alpha, "alpha")?;
    if x.iter().any(|&v| v <= 0.0) {
        return Err(BirchError::Boundary);
    }
    Ok(x.iter().zip(alpha).map(|(&xi, &ai)| (xi / ai).ln()).collect())
}

/// `θ ↦ α * θ^w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToricRay {
    pub alpha: Vec<f64>,
    pub w: Vec<f64>,
}

impl ToricRay {
    /// Normalizes `w`.
    pub fn new(alpha: Vec<f64>, w: &[f64]) -> Self {
        let n = norm(w);
        Self { alpha, w: w.iter().map(|x| x / n).collect() }
    }

    pub fn point(&self, theta: f64) -> Vec<f64> {
        self.at_log(theta.ln())
    }

    /// Point at `log θ = s`.
    pub fn at_log(&self, s: f64) -> Vec<f64> {
        self.alpha.iter().zip(&self.w).map(|(a, w)| a * (s * w).exp()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirchSolution {
    pub point: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirchOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BirchOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 200 }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `max(‖P_H log(x/α)‖, ‖A(x - x0)‖)`.
pub fn birch_residual(stoich: &StoichiometryInfo, x: &[f64], x0: &[f64], alpha: &[f64]) -> f64 {
    let lg: Vec<f64> = x.iter().zip(alpha).map(|(a, b)| (a / b).ln()).collect();
    let b = stoich.h_orthonormal();
    let ph = b.transpose() * DVector::from_column_slice(&lg);
    ph.norm().max(conservation_norm(stoich, x, x0))
}

fn conservation_norm(stoich: &StoichiometryInfo, x: &[f64], x0: &[f64]) -> f64 {
    let a = stoich.conservation_matrix();
    if a.nrows() == 0 {
        return 0.0;
    }
    let d = DVector::from_iterator(x.len(), x.iter().zip(x0).map(|(u, v)| u - v));
    (a * d).norm()
}

/// Unique point of `(x0 + H) ∩ R_{>0}` where `log(x/α) ∈ H^⊥`.
pub fn birch_point(
    stoich: &StoichiometryInfo,
    x0: &[f64],
    alpha: &[f64],
    opts: &BirchOptions,
) -> Result<BirchSolution, BirchError> {
    birch_point_from(stoich, x0, alpha, x0, opts)
}

/// As [`birch_point`], starting Newton from `start` (which must lie in the
/// interior of the same polyhedron).
pub fn birch_point_from(
    stoich: &StoichiometryInfo,
    x0: &[f64],
    alpha: &[f64],
    start: &[f64],
    opts: &BirchOptions,
) -> Result<BirchSolution, BirchError> {
    let n = stoich.n_species;
    same_len(x0, n)?;
    same_len(alpha, n)?;
    same_len(start, n)?;
    positive(x0, "x0")?;
    positive(alpha, "alpha")?;
    positive(start, "start")?;
    if stoich.dimension == n {
        return Ok(BirchSolution { point: alpha.to_vec(), residual: 0.0, iterations: 0 });
    }
    if stoich.dimension == 0 {
        let residual = birch_residual(stoich, x0, x0, alpha);
        return Ok(BirchSolution { point: x0.to_vec(), residual, iterations: 0 });
    }
    let b = stoich.h_orthonormal();
    let base = DVector::from_column_slice(x0);
    let mut t = b.transpose() * (DVector::from_column_slice(start) - &base);
    let point = |t: &DVector<f64>| -> DVector<f64> { &base + &b * t };
    let objective = |x: &DVector<f64>| -> f64 {
        x.iter().zip(alpha).map(|(&xi, &ai)| xi * (xi / ai).ln() - xi).sum()
    };
    let mut x = point(&t);
    let mut failures = 0;
    for iter in 0..opts.max_iter {
        let lg = DVector::from_iterator(n, x.iter().zip(alpha).map(|(a, b)| (a / b).ln()));
        let grad = b.transpose() * &lg;
        let residual = grad.norm().max(conservation_norm(stoich, x.as_slice(), x0));
        if residual <= opts.tol {
            return Ok(BirchSolution { point: x.iter().copied().collect(), residual, iterations: iter });
        }
        let step = if failures < 3 {
            let hess = b.transpose() * DMatrix::from_diagonal(&x.map(|v| 1.0 / v)) * &b;
            match hess.cholesky() {
                Some(c) => -c.solve(&grad),
                None => -grad.clone(),
            }
        } else {
            // steepest descent, scaled by the smallest coordinate
            -grad.clone() * x.min()
        };
        let dx = &b * &step;
        // largest admissible fraction keeping x > 0
        let mut s: f64 = 1.0;
        for (xi, di) in x.iter().zip(dx.iter()) {
            if *di < 0.0 {
                s = s.min(0.99 * xi / -di);
            }
        }
        let f0 = objective(&x);
        let slope = grad.dot(&step);
        let g0 = grad.norm();
        let mut accepted = false;
        for _ in 0..60 {
            let t_new = &t + &step * s;
            let x_new = point(&t_new);
            if x_new.iter().all(|&v| v > 0.0) {
                let f1 = objective(&x_new);
                let armijo = f1 <= f0 + 1e-4 * s * slope;
                // near the optimum f is flat to rounding; accept gradient decrease
                let g1 = (b.transpose()
                    * DVector::from_iterator(n, x_new.iter().zip(alpha).map(|(a, b)| (a / b).ln())))
                .norm();
                if armijo || g1 < g0 {
                    t = t_new;
                    x = x_new;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if accepted {
            if failures >= 3 {
                failures = 0;
            }
        } else {
            failures += 1;
            if failures > 6 {
                break;
            }
        }
    }
    // x0 + Bt loses relative accuracy on tiny coordinates; polish in log space
    let polished = dual_polish(stoich, x0, alpha, x.as_slice(), opts);
    let residual = birch_residual(stoich, &polished, x0, alpha);
    if residual <= opts.tol {
        return Ok(BirchSolution { point: polished, residual, iterations: opts.max_iter });
    }
    Err(BirchError::NoConvergence { point: polished, residual, iterations: opts.max_iter })
}

/// Newton on `x = α * exp(Cλ)` (C an orthonormal basis of `H^⊥`) for
/// `Cᵀ(x - x0) = 0`, started from the projection of `log(x/α)`.
fn dual_polish(stoich: &StoichiometryInfo, x0: &[f64], alpha: &[f64], start: &[f64], opts: &BirchOptions) -> Vec<f64> {
    let c = stoich.hperp_orthonormal();
    let n = x0.len();
    let lg = DVector::from_iterator(n, start.iter().zip(alpha).map(|(a, b)| (a / b).ln()));
    let mut lambda = c.transpose() * lg;
    let target = c.transpose() * DVector::from_column_slice(x0);
    let eval = |l: &DVector<f64>| -> DVector<f64> {
        let e = &c * l;
        DVector::from_iterator(n, alpha.iter().zip(e.iter()).map(|(a, v)| a * v.exp()))
    };
    let dual = |x: &DVector<f64>, l: &DVector<f64>| x.sum() - l.dot(&target);
    let mut x = eval(&lambda);
    let mut best = x.clone();
    let mut best_res = birch_residual(stoich, x.as_slice(), x0, alpha);
    for _ in 0..opts.max_iter {
        let grad = c.transpose() * &x - &target;
        let hess = c.transpose() * DMatrix::from_diagonal(&x) * &c;
        let Some(ch) = hess.cholesky() else { break };
        let step = -ch.solve(&grad);
        let d0 = dual(&x, &lambda);
        let g0 = grad.norm();
        let mut s = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let l_new = &lambda + &step * s;
            let x_new = eval(&l_new);
            let g1 = (c.transpose() * &x_new - &target).norm();
            if dual(&x_new, &l_new) <= d0 + 1e-4 * s * grad.dot(&step) || g1 < g0 {
                lambda = l_new;
                x = x_new;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        let res = birch_residual(stoich, x.as_slice(), x0, alpha);
        if res < best_res {
            best_res = res;
            best = x.clone();
        }
        if !moved || best_res <= opts.tol * 1e-2 {
            break;
        }
    }
    best.iter().copied().collect()
}

/// Random interior point of `(x0 + H) ∩ R_{>0}` reached along a random
/// direction of `H`, at a random fraction of the way to the boundary.
pub fn random_interior_point<R: Rng>(stoich: &StoichiometryInfo, x0: &[f64], rng: &mut R) -> Vec<f64> {
    if stoich.dimension == 0 {
        return x0.to_vec();
    }
    let dir = random_direction_in_h(stoich, rng);
    let tmax = max_step(x0, &dir).min(1e3);
    let s = rng.random_range(0.05..0.95) * tmax;
    x0.iter().zip(&dir).map(|(a, d)| a + s * d).collect()
}

fn random_direction_in_h<R: Rng>(stoich: &StoichiometryInfo, rng: &mut R) -> Vec<f64> {
    let b = stoich.h_orthonormal();
    let z = DVector::from_iterator(b.ncols(), (0..b.ncols()).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let v = &b * z;
    let nv = v.norm();
    v.iter().map(|x| x / nv).collect()
}

/// Largest `s` with `x + s d ≥ 0` (infinite if `d ≥ 0`).
fn max_step(x: &[f64], d: &[f64]) -> f64 {
    x.iter().zip(d).filter(|(_, &di)| di < 0.0).map(|(&xi, &di)| xi / -di).fold(f64::INFINITY, f64::min)
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let nv = norm(&v);
    v.iter().map(|x| x / nv).collect()
}

fn random_unit_in_hperp<R: Rng>(stoich: &StoichiometryInfo, rng: &mut R) -> Option<Vec<f64>> {
    let b = stoich.hperp_orthonormal();
    if b.ncols() == 0 {
        return None;
    }
    let z = DVector::from_iterator(b.ncols(), (0..b.ncols()).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let v = &b * z;
    let nv = v.norm();
    Some(v.iter().map(|x| x / nv).collect())
}

/// Lower bound on the distance from `p` to `P \ O`, where `O` is the open
/// ball of radius `radius` around `center`: the larger of the distance to
/// the affine hull `x0 + H` and `radius - ‖p - center‖`. Zero iff `p ∈ P \ O`
/// for positive `p`.
pub fn distance_lower_bound(
    stoich: &StoichiometryInfo,
    x0: &[f64],
    center: &[f64],
    radius: f64,
    p: &[f64],
) -> f64 {
    let diff: Vec<f64> = p.iter().zip(x0).map(|(a, b)| a - b).collect();
    let off = norm(&stoich.project_hperp(&diff));
    let to_center = norm(&p.iter().zip(center).map(|(a, b)| a - b).collect::<Vec<_>>());
    off.max(radius - to_center).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayProfile {
    pub w: Vec<f64>,
    /// Offset from `H^⊥` used to build `w`.
    pub tilt: f64,
    pub thetas: Vec<f64>,
    pub lower_bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteIntersection {
    pub w: Vec<f64>,
    pub theta: f64,
    pub distance_to_birch_point: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub verdict: &'static str,
    pub birch_point: Vec<f64>,
    pub radius: f64,
    pub theta_max: f64,
    pub min_lower_bound: f64,
    /// Largest grid θ at which a sampled ray lies in `P \ O`.
    pub last_entry_theta: Option<f64>,
    pub rays: Vec<RayProfile>,
    pub intersections: Vec<FiniteIntersection>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryOptions {
    pub radius: f64,
    pub samples: usize,
    pub theta_max: f64,
    pub grid_points: usize,
    /// Offsets from `H^⊥` tried for each sampled direction.
    pub tilts: [f64; 3],
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        Self { radius: 0.5, samples: 16, theta_max: 1e6, grid_points: 200, tilts: [0.0, 0.01, 0.1] }
    }
}

/// Samples unit directions in and near `H^⊥` and a log-spaced θ grid; for each
/// ray records a lower bound on its distance to `P \ O`. Evidence only.
pub fn verify_birch_boundary<R: Rng>(
    stoich: &StoichiometryInfo,
    x0: &[f64],
    alpha: &[f64],
    opts: &BoundaryOptions,
    rng: &mut R,
) -> Result<BoundaryReport, BirchError> {
    let birch = birch_point(stoich, x0, alpha, &BirchOptions::default())?;
    let n = stoich.n_species;
    let smax = opts.theta_max.ln();
    let grid: Vec<f64> = (0..opts.grid_points.max(2)).map(|k| smax * k as f64 / (opts.grid_points.max(2) - 1) as f64).collect();
    let mut rays = Vec::new();
    let mut intersections = Vec::new();
    let mut min_lb = f64::INFINITY;
    let mut last_entry: Option<f64> = None;
    for _ in 0..opts.samples.max(1) {
        let base = random_unit_in_hperp(stoich, rng);
        let noise = random_unit(rng, n);
        for &tilt in &opts.tilts {
            let w: Vec<f64> = match &base {
                Some(u) => u.iter().zip(&noise).map(|(a, b)| a + tilt * b).collect(),
                None if tilt > 0.0 => noise.clone(),
                None => continue,
            };
            if norm(&w) == 0.0 {
                continue;
            }
            for sign in [1.0, -1.0] {
                let ray = ToricRay::new(alpha.to_vec(), &w.iter().map(|x| sign * x).collect::<Vec<_>>());
                let mut lbs = Vec::with_capacity(grid.len());
                for &s in &grid {
                    let p = ray.at_log(s);
                    let lb = distance_lower_bound(stoich, x0, &birch.point, opts.radius, &p);
                    if lb == 0.0 {
                        let th = s.exp();
                        last_entry = Some(last_entry.map_or(th, |t: f64| t.max(th)));
                    }
                    min_lb = min_lb.min(lb);
                    lbs.push(lb);
                }
                if tilt == 0.0 {
                    if let Some(hit) = finite_intersection(stoich, x0, &birch.point, &ray, smax) {
                        intersections.push(hit);
                    }
                }
                rays.push(RayProfile {
                    w: ray.w.clone(),
                    tilt,
                    thetas: grid.iter().map(|s| s.exp()).collect(),
                    lower_bounds: lbs,
                });
            }
        }
    }
    Ok(BoundaryReport {
        verdict: "empirical",
        birch_point: birch.point,
        radius: opts.radius,
        theta_max: opts.theta_max,
        min_lower_bound: min_lb,
        last_entry_theta: last_entry,
        rays,
        intersections,
    })
}

/// For `w ∈ H^⊥`, the θ ≥ 1 where the ray meets `x0 + H`, if any.
fn finite_intersection(
    stoich: &StoichiometryInfo,
    x0: &[f64],
    birch: &[f64],
    ray: &ToricRay,
    smax: f64,
) -> Option<FiniteIntersection> {
    // <w, α θ^w - x0> is strictly increasing in s for w ∈ H^⊥, and vanishes
    // exactly on x0 + H along this ray
    let phi = |s: f64| -> f64 { ray.at_log(s).iter().zip(x0).zip(&ray.w).map(|((p, x), w)| w * (p - x)).sum() };
    let (mut lo, mut hi) = (0.0, smax);
    if phi(lo) > 0.0 || phi(hi) < 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let p = ray.at_log(s);
    let off: Vec<f64> = p.iter().zip(x0).map(|(a, b)| a - b).collect();
    if norm(&stoich.project_hperp(&off)) > 1e-9 * (1.0 + norm(&p)) {
        return None;
    }
    let d: Vec<f64> = p.iter().zip(birch).map(|(a, b)| a - b).collect();
    Some(FiniteIntersection { w: ray.w.clone(), theta: s.exp(), distance_to_birch_point: norm(&d) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuEstimate {
    /// `min ‖w_H‖` over hits; infinite if no sample landed in `P \ O`.
    pub mu_hat: f64,
    pub hits: usize,
    pub samples: usize,
}

/// Samples points `x` of `int P \ O` and maps each to the unit direction of
/// `log(x/α)`; returns the smallest `‖w_H‖` seen.
pub fn estimate_mu<R: Rng>(
    stoich: &StoichiometryInfo,
    x0: &[f64],
    alpha: &[f64],
    radius: f64,
    samples: usize,
    rng: &mut R,
) -> Result<MuEstimate, BirchError> {
    let birch = birch_point(stoich, x0, alpha, &BirchOptions::default())?;
    let mut mu = f64::INFINITY;
    let mut hits = 0;
    for _ in 0..samples {
        if stoich.dimension == 0 {
            break;
        }
        let dir = random_direction_in_h(stoich, rng);
        let tmax = max_step(&birch.point, &dir).min(1e6);
        // bias toward the boundary of P, where ‖w_H‖ is smallest
        let u: f64 = rng.random_range(0.0..1.0);
        let s = tmax * (1.0 - u.powi(4) * 0.999_999);
        let x: Vec<f64> = birch.point.iter().zip(&dir).map(|(a, d)| a + s * d).collect();
        if x.iter().any(|&v| v <= 0.0) {
            continue;
        }
        let to_center = norm(&x.iter().zip(&birch.point).map(|(a, b)| a - b).collect::<Vec<_>>());
        if to_center < radius {
            continue;
        }
        let lg: Vec<f64> = x.iter().zip(alpha).map(|(a, b)| (a / b).ln()).collect();
        let nl = norm(&lg);
        if nl == 0.0 {
            continue;
        }
        let w: Vec<f64> = lg.iter().map(|v| v / nl).collect();
        let wh = norm(&stoich.project_h(&w));
        hits += 1;
        mu = mu.min(wh);
    }
    Ok(MuEstimate { mu_hat: mu, hits, samples })
}
