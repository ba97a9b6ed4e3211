//! Jet frames, toric jets, pulls and reaction levels, plus the finite-range
//! monitors built on them: argmax stabilization, domination, the cutoff scan
//! and unit-jet extraction.

mod domination;
mod extract;
mod fundamental;
mod scan;

pub use domination::{domination_monitor, series_csv, DominationEntry, DominationOptions, DominationReport, SeriesPoint};
pub use extract::{extract_unit_jet, ExtractOptions, UnitJetExtraction};
pub use fundamental::{float_super_chain, jets_fundamental_check, ArgmaxRun, FundamentalReport};
pub use scan::{cutoff_scan, pull_sum_svg, CutoffReport, DirectionCluster, ScanMode, ScanOptions, ScanViolation};

use num::{Signed, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geometry::linalg::{dot, sub, Q};
use crate::geometry::{max_indices, GeometryError};
use crate::network::ReactionNetwork;
use crate::stoich::stoichiometric_subspace;

/// Tolerance for frame orthonormality and for treating `<w_j, v>` as zero.
pub const FRAME_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum JetError {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("theta must exceed 1, got {0}")]
    ThetaNotAboveOne(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty index range")]
    EmptyRange,
    #[error("empty point set")]
    EmptySet,
    #[error("coefficient ratios of the schedule are not increasing over the range")]
    BadSchedule,
    #[error("sequence too short to certify level {level}: {have} usable terms, need {need}")]
    TooShort { level: usize, have: usize, need: usize },
    #[error("{0}")]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Other(String),
}

/// Mutually orthogonal unit vectors `w_1, ..., w_l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    vectors: Vec<Vec<f64>>,
}

impl Frame {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self, JetError> {
        let Some(n) = vectors.first().map(Vec::len) else {
            return Err(JetError::InvalidFrame("no vectors".into()));
        };
        if n == 0 || vectors.len() > n {
            return Err(JetError::InvalidFrame(format!("{} vectors in dimension {n}", vectors.len())));
        }
        for (a, u) in vectors.iter().enumerate() {
            if u.len() != n {
                return Err(JetError::DimensionMismatch { expected: n, got: u.len() });
            }
            for (b, v) in vectors.iter().enumerate().skip(a) {
                let ip = fdot(u, v);
                let want = if a == b { 1.0 } else { 0.0 };
                if (ip - want).abs() > FRAME_TOL {
                    return Err(JetError::InvalidFrame(format!("<w_{}, w_{}> = {ip:e}", a + 1, b + 1)));
                }
            }
        }
        Ok(Self { vectors })
    }

    /// Gram–Schmidt on the given vectors (which must be independent), then
    /// validation.
    pub fn orthonormalize(raw: &[Vec<f64>]) -> Result<Self, JetError> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
        for v in raw {
            let mut u = v.clone();
            // two passes keep the result orthogonal to machine precision
            for _ in 0..2 {
                for e in &out {
                    let c = fdot(&u, e);
                    u.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
                }
            }
            let norm = fdot(&u, &u).sqrt();
            if !(norm > 1e-9 * fdot(v, v).sqrt().max(1e-300)) {
                return Err(JetError::InvalidFrame("dependent vectors".into()));
            }
            out.push(u.iter().map(|a| a / norm).collect());
        }
        Self::new(out)
    }

    /// Normalizes exactly orthogonal rational vectors.
    pub fn from_rational(vectors: &[Vec<Q>]) -> Result<Self, JetError> {
        for (a, u) in vectors.iter().enumerate() {
            for v in &vectors[a + 1..] {
                if u.len() == v.len() && !dot(u, v).is_zero() {
                    return Err(JetError::InvalidFrame("rational vectors are not orthogonal".into()));
                }
            }
        }
        let floats: Vec<Vec<f64>> = vectors.iter().map(|v| crate::geometry::linalg::to_f64(v)).collect();
        Self::orthonormalize(&floats)
    }

    /// A Haar-random frame of length `len` in `R^n`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, len: usize) -> Result<Self, JetError> {
        let raw: Vec<Vec<f64>> = (0..len).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
        Self::orthonormalize(&raw)
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    /// The prefix frame `(w_1, ..., w_k)`.
    pub fn truncate(&self, k: usize) -> Frame {
        Frame { vectors: self.vectors[..k.clamp(1, self.len())].to_vec() }
    }

    /// `<w_j, v>` for every `j`, with values below `FRAME_TOL * max(1, |v|)`
    /// set to zero.
    pub fn components(&self, v: &[f64]) -> Vec<f64> {
        let scale = fdot(v, v).sqrt().max(1.0);
        self.vectors
            .iter()
            .map(|w| {
                let c = fdot(w, v);
                if c.abs() <= FRAME_TOL * scale {
                    0.0
                } else {
                    c
                }
            })
            .collect()
    }

    fn check_dim(&self, n: usize) -> Result<(), JetError> {
        if self.dim() != n {
            return Err(JetError::DimensionMismatch { expected: self.dim(), got: n });
        }
        Ok(())
    }
}

pub(crate) fn fdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coefficients `β_j(i)` before normalization; `β_1 = 1` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaSchedule {
    /// `β_j(i) = i^{-p(j-1)}`.
    Power { p: f64 },
    /// `β_j(i) = exp(-(j-1) i^2)`.
    ExpSquare,
}

/// The sequence `θ(i) > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSchedule {
    /// `θ(i) = e^i`.
    Exp,
    /// `θ(i) = 1 + i`.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetSchedule {
    pub beta: BetaSchedule,
    pub theta: ThetaSchedule,
}

impl Default for JetSchedule {
    fn default() -> Self {
        Self { beta: BetaSchedule::Power { p: 1.0 }, theta: ThetaSchedule::Exp }
    }
}

/// Normalized jet coefficients at one index, kept as logarithms so that
/// rapidly vanishing schedules stay representable.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    /// `log(β_j(i) / |Σ β_j w_j|)`.
    pub log_beta: Vec<f64>,
    pub log_theta: f64,
}

impl JetSchedule {
    /// Unnormalized `log β_j(i)` for the zero-based level `j`.
    pub fn log_beta(&self, j: usize, i: f64) -> f64 {
        match self.beta {
            BetaSchedule::Power { p } => -p * j as f64 * i.ln(),
            BetaSchedule::ExpSquare => -(j as f64) * i * i,
        }
    }

    pub fn log_theta(&self, i: f64) -> f64 {
        match self.theta {
            ThetaSchedule::Exp => i,
            ThetaSchedule::Linear => i.ln_1p(),
        }
    }

    pub fn point(&self, len: usize, i: f64) -> JetPoint {
        let raw: Vec<f64> = (0..len).map(|j| self.log_beta(j, i)).collect();
        // β_1 = 1 is the largest coefficient, so the sum is in [1, len]
        let log_norm = 0.5 * raw.iter().map(|b| (2.0 * b).exp()).sum::<f64>().ln();
        JetPoint { log_beta: raw.iter().map(|b| b - log_norm).collect(), log_theta: self.log_theta(i) }
    }

    /// The unit vector `w(i)`.
    pub fn w(&self, frame: &Frame, i: f64) -> Vec<f64> {
        let pt = self.point(frame.len(), i);
        let mut out = vec![0.0; frame.dim()];
        for (w, lb) in frame.vectors().iter().zip(&pt.log_beta) {
            let b = lb.exp();
            out.iter_mut().zip(w).for_each(|(o, x)| *o += b * x);
        }
        out
    }

    /// Checks `θ(i) > 1` and that every ratio `β_j/β_{j+1}` strictly increases
    /// across `lo..=hi`.
    pub fn validate(&self, len: usize, lo: usize, hi: usize) -> Result<(), JetError> {
        if lo == 0 || hi < lo {
            return Err(JetError::EmptyRange);
        }
        if self.log_theta(lo as f64) <= 0.0 {
            return Err(JetError::ThetaNotAboveOne(self.log_theta(lo as f64).exp()));
        }
        if let BetaSchedule::Power { p } = self.beta {
            if !(p > 0.0) && len > 1 {
                return Err(JetError::BadSchedule);
            }
        }
        if len > 1 && hi > lo {
            let gap = |i: f64| self.log_beta(0, i) - self.log_beta(1, i);
            if !(gap(hi as f64) > gap(lo as f64)) {
                return Err(JetError::BadSchedule);
            }
        }
        Ok(())
    }
}

/// A real number as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, ln_abs: f64::NEG_INFINITY };
}

/// `<w(i), v>` from the frame components of `v`, expanded around the first
/// nonzero component so that tiny coefficients do not underflow.
pub fn jet_inner(components: &[f64], pt: &JetPoint) -> SignedLog {
    let Some(lam) = components.iter().position(|c| *c != 0.0) else {
        return SignedLog::ZERO;
    };
    let base = pt.log_beta[lam];
    let mut t = components[lam];
    for j in lam + 1..components.len() {
        t += (pt.log_beta[j] - base).exp() * components[j];
    }
    if t == 0.0 {
        return SignedLog::ZERO;
    }
    SignedLog { sign: if t > 0.0 { 1 } else { -1 }, ln_abs: base + t.abs().ln() }
}

/// `log θ(i) · <w(i), v>` as a plain number.
pub fn jet_exponent(components: &[f64], pt: &JetPoint) -> f64 {
    let llt = pt.log_theta.ln();
    components.iter().zip(&pt.log_beta).filter(|(c, _)| **c != 0.0).map(|(c, lb)| c * (lb + llt).exp()).sum()
}

/// `<w, y' - y> θ^{<w, y>}` for reaction `r`.
pub fn pull(net: &ReactionNetwork, r: usize, w: &[f64], theta: f64) -> Result<f64, JetError> {
    if !(theta > 1.0) {
        return Err(JetError::ThetaNotAboveOne(theta));
    }
    if w.len() != net.n_species() {
        return Err(JetError::DimensionMismatch { expected: net.n_species(), got: w.len() });
    }
    let y = net.source(r).to_f64();
    let flux = crate::geometry::linalg::to_f64(&net.reaction_vector(r));
    Ok(fdot(w, &flux) * theta.powf(fdot(w, &y)))
}

/// `Σ_r k_r pull_r(w, θ)`, which equals `<w, f(θ^w)>` for the mass-action
/// field `f` with rates `k`.
pub fn pull_sum(net: &ReactionNetwork, k: &[f64], w: &[f64], theta: f64) -> Result<f64, JetError> {
    if k.len() != net.reactions().len() {
        return Err(JetError::DimensionMismatch { expected: net.reactions().len(), got: k.len() });
    }
    let mut s = 0.0;
    for (r, kr) in k.iter().enumerate() {
        s += kr * pull(net, r, w, theta)?;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JetClass {
    Inessential,
    Sustaining { level: usize },
    Draining { level: usize },
}

impl JetClass {
    pub fn level(&self) -> Option<usize> {
        match self {
            JetClass::Inessential => None,
            JetClass::Sustaining { level } | JetClass::Draining { level } => Some(*level),
        }
    }

    pub fn is_draining(&self) -> bool {
        matches!(self, JetClass::Draining { .. })
    }

    pub fn is_sustaining(&self) -> bool {
        matches!(self, JetClass::Sustaining { .. })
    }
}

/// Level (1-based) is the least `j` with `<w_j, flux> != 0`; its sign decides
/// sustaining (`< 0`) or draining (`> 0`).
pub fn level_and_type(net: &ReactionNetwork, r: usize, frame: &Frame) -> Result<JetClass, JetError> {
    frame.check_dim(net.n_species())?;
    let flux = crate::geometry::linalg::to_f64(&net.reaction_vector(r));
    Ok(classify_components(&frame.components(&flux)))
}

pub fn reaction_classes(net: &ReactionNetwork, frame: &Frame) -> Result<Vec<JetClass>, JetError> {
    (0..net.reactions().len()).map(|r| level_and_type(net, r, frame)).collect()
}

fn classify_components(c: &[f64]) -> JetClass {
    match c.iter().position(|v| *v != 0.0) {
        None => JetClass::Inessential,
        Some(j) if c[j] < 0.0 => JetClass::Sustaining { level: j + 1 },
        Some(j) => JetClass::Draining { level: j + 1 },
    }
}

/// Endotactic test along the singleton frame `(w)`: every reaction with
/// `<w, flux> > 0` has some reaction `x -> x'` with `<w, x'-x> < 0` and
/// `<w, x - y> > 0`.
pub fn endotactic_along(net: &ReactionNetwork, w: &[Q]) -> bool {
    let fluxes = net.reaction_vectors();
    let sources: Vec<&[Q]> = (0..fluxes.len()).map(|r| net.source(r).coeffs()).collect();
    (0..fluxes.len()).filter(|&r| dot(w, &fluxes[r]).is_positive()).all(|r| {
        (0..fluxes.len()).any(|s| dot(w, &fluxes[s]).is_negative() && dot(w, &sub(sources[s], sources[r])).is_positive())
    })
}

/// For `w` outside `H^⊥`: some reaction with `<w, flux> < 0` has its source
/// in the `<=_w`-maximal subset of all sources. Vacuously true on `H^⊥`.
pub fn strongly_sustained_along(net: &ReactionNetwork, w: &[Q]) -> bool {
    if stoichiometric_subspace(net).is_in_hperp(w) {
        return true;
    }
    let fluxes = net.reaction_vectors();
    let sources: Vec<Vec<Q>> = (0..fluxes.len()).map(|r| net.source(r).coeffs().to_vec()).collect();
    let Ok(top) = max_indices(&sources, w) else { return true };
    top.into_iter().any(|r| dot(w, &fluxes[r]).is_negative())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReactionJetEntry {
    pub reaction: usize,
    pub label: String,
    pub class: JetClass,
}

/// Everything the `jets` command reports for one frame and schedule.
#[derive(Debug, Clone, Serialize)]
pub struct JetExperiment {
    pub frame: Frame,
    pub schedule: JetSchedule,
    pub i_min: usize,
    pub i_max: usize,
    pub reactions: Vec<ReactionJetEntry>,
    pub domination: DominationReport,
}

pub fn run_jet_experiment(
    net: &ReactionNetwork,
    frame: &Frame,
    schedule: &JetSchedule,
    i_min: usize,
    i_max: usize,
    opts: &DominationOptions,
) -> Result<JetExperiment, JetError> {
    let classes = reaction_classes(net, frame)?;
    let reactions = classes
        .into_iter()
        .enumerate()
        .map(|(r, class)| ReactionJetEntry { reaction: r, label: net.describe_reaction(r), class })
        .collect();
    let domination = domination_monitor(net, frame, schedule, i_min, i_max, opts)?;
    Ok(JetExperiment { frame: frame.clone(), schedule: *schedule, i_min, i_max, reactions, domination })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classification_arrangement;
    use crate::dynamics::mass_action_rhs;
    use crate::fixtures;
    use crate::parse::parse_network;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net(text: &str) -> ReactionNetwork {
        parse_network(text).unwrap().network
    }

    fn rlv() -> ReactionNetwork {
        fixtures::REVERSE_LOTKA_VOLTERRA.network()
    }

    #[test]
    fn pulls_of_reverse_lotka_volterra() {
        let n = rlv();
        let w = [0.0, -1.0];
        assert_abs_diff_eq!(pull(&n, 1, &w, 10.0).unwrap(), -1.0, epsilon = 1e-15);
        assert_eq!(pull(&n, 0, &w, 10.0).unwrap(), 0.0);
        assert_eq!(pull(&n, 0, &w, 1e6).unwrap(), 0.0);
        assert_abs_diff_eq!(pull(&n, 2, &w, 10.0).unwrap(), 0.01, epsilon = 1e-15);
        assert!(matches!(pull(&n, 0, &w, 1.0), Err(JetError::ThetaNotAboveOne(_))));
    }

    #[test]
    fn levels_of_reverse_lotka_volterra() {
        let n = rlv();
        let f = Frame::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(level_and_type(&n, 0, &f).unwrap(), JetClass::Draining { level: 2 });
        assert_eq!(level_and_type(&n, 1, &f).unwrap(), JetClass::Sustaining { level: 1 });
    }

    #[test]
    fn levels_along_conservation_frame() {
        let n = net("A <-> B");
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = Frame::new(vec![vec![s, s], vec![-s, s]]).unwrap();
        assert_eq!(level_and_type(&n, 0, &f).unwrap(), JetClass::Draining { level: 2 });
        assert_eq!(level_and_type(&n, 1, &f).unwrap(), JetClass::Sustaining { level: 2 });
        assert_eq!(level_and_type(&n, 0, &f.truncate(1)).unwrap(), JetClass::Inessential);
    }

    #[test]
    fn frame_validation() {
        assert!(Frame::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).is_err());
        assert!(Frame::new(vec![vec![2.0, 0.0]]).is_err());
        assert!(Frame::new(vec![vec![1.0], vec![1.0]]).is_err());
        assert!(Frame::orthonormalize(&[vec![1.0, 1.0], vec![1.0, 0.0]]).is_ok());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Frame::random(&mut rng, 4, 3).unwrap();
        assert_eq!((f.len(), f.dim()), (3, 4));
    }

    #[test]
    fn schedule_converges_to_leading_direction() {
        let f = Frame::new(vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        let s = JetSchedule::default();
        let w = s.w(&f, 1e7);
        let dist = w.iter().zip(&f.vectors()[0]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(dist < 1e-6);
        assert_abs_diff_eq!(fdot(&w, &w), 1.0, epsilon = 1e-14);
        assert!(s.validate(2, 1, 1000).is_ok());
        assert!(JetSchedule { beta: BetaSchedule::Power { p: 0.0 }, ..s }.validate(2, 1, 10).is_err());
    }

    #[test]
    fn inner_product_survives_underflow() {
        let s = JetSchedule { beta: BetaSchedule::ExpSquare, theta: ThetaSchedule::Exp };
        let pt = s.point(2, 40.0);
        let v = jet_inner(&[0.0, 2.0], &pt);
        assert_eq!(v.sign, 1);
        assert_abs_diff_eq!(v.ln_abs, 2f64.ln() - 1600.0, epsilon = 1e-9);
        assert_eq!(jet_exponent(&[0.0, 1.0], &pt), 0.0);
        let near = s.point(2, 3.0);
        assert_abs_diff_eq!(jet_exponent(&[0.0, 1.0], &near), 3.0 * (-9f64).exp() / (1.0 + (-18f64).exp()).sqrt(), epsilon = 1e-18);
    }

    #[test]
    fn pull_sum_matches_field() {
        let n = rlv();
        let k = [0.7, 1.3, 2.1];
        let w = [0.6, -0.8];
        let theta: f64 = 3.5;
        let x: Vec<f64> = w.iter().map(|wi| theta.powf(*wi)).collect();
        let f = mass_action_rhs(&n, &k, &x).unwrap();
        assert_abs_diff_eq!(pull_sum(&n, &k, &w, theta).unwrap(), fdot(&w, &f), epsilon = 1e-12);
    }

    #[test]
    fn restatements_agree_with_deciders_on_faces() {
        for fx in fixtures::ALL {
            let n = fx.network();
            let arr = classification_arrangement(&n, 20).unwrap();
            for face in &arr.faces {
                let w = &face.representative;
                let d = crate::classify::is_w_endotactic(&n, w).unwrap();
                assert_eq!(endotactic_along(&n, w), d.holds, "{} at {:?}", fx.name, w);
                assert_eq!(
                    strongly_sustained_along(&n, w),
                    crate::classify::strong_condition_holds(&n, w).unwrap(),
                    "{}",
                    fx.name
                );
            }
        }
    }
}
