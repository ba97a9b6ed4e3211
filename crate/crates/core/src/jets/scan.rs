//! Sum-of-pulls scan: worst-case sign of `Σ k_r θ^{<w,y>} <w, y'-y>` over
//! directions and radii, the empirical cutoff, and near-zero directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{fdot, JetError};
use crate::birch::random_interior_point;
use crate::classify::classification_arrangement;
use crate::geometry::linalg::to_f64;
use crate::geometry::DEFAULT_MAX_HYPERPLANES;
use crate::network::{ReactionNetwork, Tempering};
use crate::stoich::stoichiometric_subspace;
use crate::svg::line_plot;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScanMode {
    /// Every `θ^w` with `w` a unit vector; appropriate when `H = R^S`.
    Orthant,
    /// Points of the invariant polyhedron through `x0`, written as `θ^w`.
    Polyhedron { x0: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    /// Values of `log θ`, increasing.
    pub log_theta_grid: Vec<f64>,
    pub direction_samples: usize,
    pub seed: u64,
    /// `|ŝ|` below which a direction counts as near-zero.
    pub near_zero_tol: f64,
    /// Single-linkage gap (radians) for clustering near-zero directions.
    pub cluster_gap: f64,
    /// Add normalized arrangement-face representatives to the samples.
    pub include_faces: bool,
    pub max_hyperplanes: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            log_theta_grid: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
            direction_samples: 20_000,
            seed: 0,
            near_zero_tol: 0.05,
            cluster_gap: 0.02,
            include_faces: true,
            max_hyperplanes: DEFAULT_MAX_HYPERPLANES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanViolation {
    pub w: Vec<f64>,
    pub log_theta: f64,
    /// Worst-case sum divided by the largest monomial `θ^{max <w,y>}`.
    pub normalized_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionCluster {
    /// Member with the smallest `|ŝ|`.
    pub center: Vec<f64>,
    pub members: usize,
    pub min_abs_sum: f64,
    /// Largest angle between the center and a member.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffReport {
    pub mode: ScanMode,
    pub log_theta_grid: Vec<f64>,
    pub samples: usize,
    /// Least grid value of `log θ` beyond which every sample was negative.
    pub log_theta_hat: Option<f64>,
    pub violation_count: usize,
    /// Violations at the largest radii, at most 50.
    pub violations: Vec<ScanViolation>,
    /// Near-zero clusters at the largest grid value (orthant mode only).
    pub near_zero_clusters: Vec<DirectionCluster>,
    pub note: &'static str,
}

struct Terms {
    sources: Vec<Vec<f64>>,
    fluxes: Vec<Vec<f64>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Terms {
    fn new(net: &ReactionNetwork, tempering: &Tempering) -> Self {
        let fl = net.to_float();
        let (lo, hi) = tempering.intervals().iter().map(|iv| (iv.lo, iv.hi)).unzip();
        Self { sources: fl.sources, fluxes: fl.fluxes, lo, hi }
    }

    /// Worst-case normalized sum at `θ = e^s`: each rate sits at the endpoint
    /// that makes its term largest, which is exact because the sum is linear
    /// in every rate.
    fn normalized(&self, w: &[f64], s: f64) -> f64 {
        let ips: Vec<f64> = self.sources.iter().map(|y| fdot(w, y)).collect();
        let top = ips.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (r, flux) in self.fluxes.iter().enumerate() {
            let c = fdot(w, flux);
            let k = if c > 0.0 { self.hi[r] } else { self.lo[r] };
            sum += k * c * (s * (ips[r] - top)).exp();
        }
        sum
    }
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let n = fdot(v, v).sqrt();
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    fdot(a, b).clamp(-1.0, 1.0).acos()
}

fn directions(net: &ReactionNetwork, opts: &ScanOptions, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = net.n_species();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(opts.direction_samples);
    while out.len() < opts.direction_samples {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = unit(&v) {
            out.push(u);
        }
    }
    if opts.include_faces {
        if let Ok(arr) = classification_arrangement(net, opts.max_hyperplanes) {
            out.extend(arr.faces.iter().filter_map(|f| unit(&to_f64(&f.representative))));
        }
    }
    out
}

/// Points `θ0^w` of the polyhedron: rays from `x0` and a few interior points
/// in random directions of `H`, pushed toward the boundary (or outward when
/// the ray is unbounded) on a geometric scale.
fn polyhedron_points(net: &ReactionNetwork, x0: &[f64], opts: &ScanOptions, rng: &mut ChaCha8Rng) -> Vec<(Vec<f64>, f64)> {
    let stoich = stoichiometric_subspace(net);
    let b = stoich.h_orthonormal();
    let mut out = Vec::new();
    if b.ncols() == 0 {
        if let Some(p) = log_point(x0) {
            out.push(p);
        }
        return out;
    }
    let bases: Vec<Vec<f64>> = std::iter::once(x0.to_vec()).chain((0..4).map(|_| random_interior_point(&stoich, x0, rng))).collect();
    let per_base = opts.direction_samples.div_ceil(bases.len()).max(1);
    for base in &bases {
        for _ in 0..per_base {
            let z: Vec<f64> = (0..b.ncols()).map(|_| rng.sample(StandardNormal)).collect();
            let d: Vec<f64> = (0..b.nrows()).map(|i| (0..b.ncols()).map(|c| b[(i, c)] * z[c]).sum()).collect();
            let Some(d) = unit(&d) else { continue };
            let tmax = base.iter().zip(&d).filter(|(_, di)| **di < 0.0).map(|(x, di)| x / -di).fold(f64::INFINITY, f64::min);
            for k in (1..=300).step_by(3) {
                let x: Vec<f64> = if tmax.is_finite() {
                    // offset back from the boundary point so tiny coordinates stay exact
                    let eta = tmax * 10f64.powi(-k);
                    base.iter()
                        .zip(&d)
                        .map(|(xi, di)| {
                            let bd = xi + tmax * di;
                            let bd = if *di < 0.0 && bd.abs() <= 1e-12 * xi.abs().max(1.0) { 0.0 } else { bd };
                            bd - eta * di
                        })
                        .collect()
                } else {
                    let t = 10f64.powi(k.min(250));
                    base.iter().zip(&d).map(|(xi, di)| xi + t * di).collect()
                };
                if x.iter().all(|v| *v > 0.0 && v.is_finite()) {
                    if let Some(p) = log_point(&x) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// `x = θ0^w` with `‖w‖ = 1`: returns `(w, log θ0)`.
fn log_point(x: &[f64]) -> Option<(Vec<f64>, f64)> {
    let l: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let s = fdot(&l, &l).sqrt();
    (s > 0.0).then(|| (l.iter().map(|v| v / s).collect(), s))
}

fn cluster(points: Vec<(Vec<f64>, f64)>, gap: f64) -> Vec<DirectionCluster> {
    let m = points.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for a in 0..m {
        for b in a + 1..m {
            if angle(&points[a].0, &points[b].0) <= gap {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for i in 0..m {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups
        .into_values()
        .map(|members| {
            let c = *members.iter().min_by(|a, b| points[**a].1.abs().total_cmp(&points[**b].1.abs())).expect("nonempty");
            let center = points[c].0.clone();
            let radius = members.iter().map(|&i| angle(&center, &points[i].0)).fold(0.0, f64::max);
            DirectionCluster { center, members: members.len(), min_abs_sum: points[c].1.abs(), radius }
        })
        .collect()
}

pub fn cutoff_scan(
    net: &ReactionNetwork,
    tempering: &Tempering,
    mode: ScanMode,
    opts: &ScanOptions,
) -> Result<CutoffReport, JetError> {
    if opts.direction_samples == 0 {
        return Err(JetError::Other("direction_samples must be at least 1".into()));
    }
    let grid = &opts.log_theta_grid;
    if grid.is_empty() || grid.iter().any(|g| !(*g > 0.0)) || grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(JetError::Other("log-theta grid must be positive and increasing".into()));
    }
    if tempering.len() != net.reactions().len() {
        return Err(JetError::DimensionMismatch { expected: net.reactions().len(), got: tempering.len() });
    }
    let terms = Terms::new(net, tempering);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // (w, log θ0, normalized sum)
    let mut evaluated: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    let mut clusters = Vec::new();
    match &mode {
        ScanMode::Orthant => {
            let dirs = directions(net, opts, &mut rng);
            let last = *grid.last().expect("nonempty");
            let mut near = Vec::new();
            for w in dirs {
                for &s in grid {
                    let v = terms.normalized(&w, s);
                    if s == last && v.abs() < opts.near_zero_tol {
                        near.push((w.clone(), v));
                    }
                    evaluated.push((w.clone(), s, v));
                }
            }
            clusters = cluster(near, opts.cluster_gap);
        }
        ScanMode::Polyhedron { x0 } => {
            if x0.len() != net.n_species() {
                return Err(JetError::DimensionMismatch { expected: net.n_species(), got: x0.len() });
            }
            if x0.iter().any(|v| !(*v > 0.0)) {
                return Err(JetError::Other("x0 must be positive".into()));
            }
            for (w, s) in polyhedron_points(net, x0, opts, &mut rng) {
                let v = terms.normalized(&w, s);
                evaluated.push((w, s, v));
            }
        }
    }
    let samples = evaluated.len();
    let max_violation = evaluated.iter().filter(|e| e.2 >= 0.0).map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let candidate = if max_violation == f64::NEG_INFINITY {
        Some(grid[0])
    } else {
        grid.iter().copied().find(|g| *g >= max_violation)
    };
    // a cutoff needs negative samples beyond it
    let log_theta_hat = candidate.filter(|g| evaluated.iter().any(|e| e.1 > *g));
    let mut violations: Vec<ScanViolation> = evaluated
        .iter()
        .filter(|e| e.2 >= 0.0)
        .map(|e| ScanViolation { w: e.0.clone(), log_theta: e.1, normalized_sum: e.2 })
        .collect();
    let violation_count = violations.len();
    violations.sort_by(|a, b| b.log_theta.total_cmp(&a.log_theta).then(b.normalized_sum.total_cmp(&a.normalized_sum)));
    violations.truncate(50);
    Ok(CutoffReport {
        mode,
        log_theta_grid: grid.clone(),
        samples,
        log_theta_hat,
        violation_count,
        violations,
        near_zero_clusters: clusters,
        note: "empirical cutoff from finite samples",
    })
}

/// Worst-case normalized sum of pulls over the unit circle at `θ = e^s`,
/// plotted against the angle of `w`.
pub fn pull_sum_svg(net: &ReactionNetwork, tempering: &Tempering, log_theta: f64) -> Result<String, JetError> {
    if net.n_species() != 2 {
        return Err(JetError::DimensionMismatch { expected: 2, got: net.n_species() });
    }
    let terms = Terms::new(net, tempering);
    let pts: Vec<(f64, f64)> = (0..=720)
        .map(|k| {
            let a = k as f64 * std::f64::consts::PI / 360.0;
            (a, terms.normalized(&[a.cos(), a.sin()], log_theta))
        })
        .collect();
    Ok(line_plot(&pts, "angle of w (rad)", "normalized sum of pulls"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::parse::parse_network;

    fn quick() -> ScanOptions {
        ScanOptions { direction_samples: 4000, ..ScanOptions::default() }
    }

    #[test]
    fn reverse_lotka_volterra_near_zero_directions() {
        let n = fixtures::REVERSE_LOTKA_VOLTERRA.network();
        let t = Tempering::fixed(&n, &[1.0, 1.0, 1.0]).unwrap();
        let r = cutoff_scan(&n, &t, ScanMode::Orthant, &quick()).unwrap();
        assert!(r.log_theta_hat.is_some());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let targets = [[-1.0, 0.0], [0.0, -1.0], [s, s]];
        assert_eq!(r.near_zero_clusters.len(), 3, "{:?}", r.near_zero_clusters);
        for t in targets {
            assert!(r.near_zero_clusters.iter().any(|c| angle(&c.center, &t) < 0.05));
        }
    }

    #[test]
    fn conversion_has_no_cutoff() {
        let n = parse_network("A -> B").unwrap().network;
        let t = Tempering::fixed(&n, &[1.0]).unwrap();
        let r = cutoff_scan(&n, &t, ScanMode::Orthant, &quick()).unwrap();
        assert_eq!(r.log_theta_hat, None);
        let w = [-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        for s in [1.0, 10.0, 100.0, 1000.0] {
            assert!(Terms::new(&n, &t).normalized(&w, s) > 0.0);
        }
        let p = cutoff_scan(&n, &t, ScanMode::Polyhedron { x0: vec![1.0, 1.0] }, &quick()).unwrap();
        assert_eq!(p.log_theta_hat, None);
        assert!(p.violation_count > 0);
    }

    #[test]
    fn strong_triangle_has_cutoff() {
        let fx = fixtures::TRIANGLE_STRONG;
        let r = cutoff_scan(&fx.network(), &fx.tempering().unwrap(), ScanMode::Orthant, &quick()).unwrap();
        assert!(r.log_theta_hat.is_some(), "{:?}", r.violations.first());
    }

    #[test]
    fn svg_requires_two_species() {
        let n = fixtures::REVERSE_LOTKA_VOLTERRA.network();
        let t = Tempering::fixed(&n, &[1.0, 1.0, 1.0]).unwrap();
        assert!(pull_sum_svg(&n, &t, 10.0).unwrap().contains("<path"));
        let m = parse_network("A -> B + C").unwrap().network;
        assert!(pull_sum_svg(&m, &Tempering::fixed(&m, &[1.0]).unwrap(), 1.0).is_err());
    }
}
