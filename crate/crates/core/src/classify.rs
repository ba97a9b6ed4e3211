//! Exact deciders for w-endotactic, endotactic and strongly endotactic
//! networks.
//!
//! Both conditions depend on `w` only through the signs of `<w, flux_r>` and
//! `<w, y_i - y_j>` over distinct reactant pairs, so checking one
//! representative per face of the central arrangement of those normals
//! decides them for every `w`.

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::geometry::linalg::{dot, format_qvec, is_zero, primitive, q, sub, Q};
use crate::geometry::{enumerate_faces, Arrangement, GeometryError, DEFAULT_MAX_HYPERPLANES};
use crate::graph::linkage_classes;
use crate::network::ReactionNetwork;
use crate::stoich::{stoichiometric_subspace, StoichiometryInfo};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("direction has {found} entries, network has {expected} species")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("fast path '{0}' contradicts the exact decider")]
    FastPathContradiction(String),
}

/// Outcome of a single-direction test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionCheck {
    pub holds: bool,
    /// A reaction breaking the condition when `holds` is false.
    pub violating_reaction: Option<usize>,
}

/// Sufficient conditions for strong endotacticity of weakly reversible networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FastPath {
    SingleLinkageClass,
    SharedStoichiometricSubspace,
    /// Checked per arrangement face; sufficient only.
    MaximalReactantsRule,
}

impl FastPath {
    pub fn name(&self) -> &'static str {
        match self {
            FastPath::SingleLinkageClass => "single-linkage-class",
            FastPath::SharedStoichiometricSubspace => "shared-stoichiometric-subspace",
            FastPath::MaximalReactantsRule => "maximal-reactants-rule",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Decided over every arrangement face, or by a fast-path theorem.
    Exact,
    /// Arrangement too large; random directions found no violation.
    InconclusiveTrue,
    /// Arrangement too large; a sampled direction is a certificate of failure.
    SampledFalse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub weakly_reversible: bool,
    pub endotactic: bool,
    pub strongly_endotactic: bool,
    /// Falsifies endotactic when that fails, otherwise the strong condition.
    #[serde(serialize_with = "ser_opt_qvec")]
    pub witness: Option<Vec<Q>>,
    pub violating_reaction: Option<usize>,
    pub fast_path: Option<FastPath>,
    pub face_count: usize,
    pub verdict: Verdict,
    pub cross_checked: bool,
    pub note: &'static str,
}

pub const RATIONAL_NOTE: &str = "complexes are exact rationals; irrational complexes are not supported";

fn ser_opt_qvec<S: Serializer>(v: &Option<Vec<Q>>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(|v| format_qvec(v)).serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub max_hyperplanes: usize,
    /// Fall back to random directions when the arrangement is too large.
    pub allow_sampling: bool,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { max_hyperplanes: DEFAULT_MAX_HYPERPLANES, allow_sampling: false, samples: 10_000, seed: 0 }
    }
}

fn check_dim(net: &ReactionNetwork, w: &[Q]) -> Result<(), ClassifyError> {
    if w.len() != net.n_species() {
        return Err(ClassifyError::DimensionMismatch { expected: net.n_species(), found: w.len() });
    }
    if is_zero(w) {
        return Err(ClassifyError::ZeroDirection);
    }
    Ok(())
}

/// Per-reaction data used by every check.
struct Prepared {
    sources: Vec<Vec<Q>>,
    fluxes: Vec<Vec<Q>>,
}

impl Prepared {
    fn new(net: &ReactionNetwork) -> Self {
        let n = net.reactions().len();
        Self {
            sources: (0..n).map(|r| net.source(r).coeffs().to_vec()).collect(),
            fluxes: (0..n).map(|r| net.reaction_vector(r)).collect(),
        }
    }

    fn w_endotactic(&self, w: &[Q]) -> DirectionCheck {
        let flux_ip: Vec<Q> = self.fluxes.iter().map(|f| dot(w, f)).collect();
        let src_ip: Vec<Q> = self.sources.iter().map(|y| dot(w, y)).collect();
        let essential = (0..flux_ip.len()).filter(|&r| !flux_ip[r].is_zero());
        let Some(top) = essential.clone().map(|r| &src_ip[r]).max() else {
            return DirectionCheck { holds: true, violating_reaction: None };
        };
        let bad = essential.filter(|&r| &src_ip[r] == top).find(|&r| flux_ip[r].is_positive());
        DirectionCheck { holds: bad.is_none(), violating_reaction: bad }
    }

    /// Extra condition for strong endotacticity; `w ∈ H^⊥` is exempt.
    fn strong_extra(&self, w: &[Q]) -> bool {
        let flux_ip: Vec<Q> = self.fluxes.iter().map(|f| dot(w, f)).collect();
        if flux_ip.iter().all(Zero::is_zero) {
            return true;
        }
        let src_ip: Vec<Q> = self.sources.iter().map(|y| dot(w, y)).collect();
        let top = src_ip.iter().max().expect("some reaction");
        (0..flux_ip.len()).any(|r| &src_ip[r] == top && flux_ip[r].is_negative())
    }

    fn normals(&self) -> Vec<Vec<Q>> {
        let mut out = self.fluxes.clone();
        let mut distinct: Vec<&Vec<Q>> = Vec::new();
        for s in &self.sources {
            if !distinct.contains(&s) {
                distinct.push(s);
            }
        }
        for i in 0..distinct.len() {
            for j in i + 1..distinct.len() {
                out.push(sub(distinct[i], distinct[j]));
            }
        }
        out
    }
}

/// `R_w` = reactions with `<w, flux> != 0`; holds iff each of them whose
/// source is `<=_w`-maximal among sources of `R_w` has `<w, flux> < 0`.
pub fn is_w_endotactic(net: &ReactionNetwork, w: &[Q]) -> Result<DirectionCheck, ClassifyError> {
    check_dim(net, w)?;
    Ok(Prepared::new(net).w_endotactic(w))
}

/// For `w` not orthogonal to `H`: some reaction with `<w, flux> < 0` has a
/// source that is `<=_w`-maximal among all sources. True for `w ∈ H^⊥`.
pub fn strong_condition_holds(net: &ReactionNetwork, w: &[Q]) -> Result<bool, ClassifyError> {
    check_dim(net, w)?;
    Ok(Prepared::new(net).strong_extra(w))
}

/// The normals whose signs determine both conditions: every reaction vector
/// and every difference of distinct reactants.
pub fn classification_normals(net: &ReactionNetwork) -> Vec<Vec<Q>> {
    Prepared::new(net).normals()
}

pub fn classification_arrangement(net: &ReactionNetwork, limit: usize) -> Result<Arrangement, ClassifyError> {
    Ok(enumerate_faces(&classification_normals(net), net.n_species(), limit)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndotacticResult {
    pub holds: bool,
    pub witness: Option<Vec<Q>>,
    pub violating_reaction: Option<usize>,
    pub face_count: usize,
}

fn decide_endotactic(prep: &Prepared, arr: &Arrangement) -> EndotacticResult {
    let mut witness: Option<(Vec<Q>, usize)> = None;
    for face in &arr.faces {
        let c = prep.w_endotactic(&face.representative);
        if !c.holds && witness.as_ref().map_or(true, |(w, _)| face.representative < *w) {
            witness = Some((face.representative.clone(), c.violating_reaction.expect("violation")));
        }
    }
    EndotacticResult {
        holds: witness.is_none(),
        violating_reaction: witness.as_ref().map(|w| w.1),
        witness: witness.map(|w| w.0),
        face_count: arr.faces.len(),
    }
}

fn decide_strong(prep: &Prepared, arr: &Arrangement) -> Option<Vec<Q>> {
    arr.faces.iter().filter(|f| !prep.strong_extra(&f.representative)).map(|f| f.representative.clone()).min()
}

pub fn is_endotactic(net: &ReactionNetwork, limit: usize) -> Result<EndotacticResult, ClassifyError> {
    let arr = classification_arrangement(net, limit)?;
    Ok(decide_endotactic(&Prepared::new(net), &arr))
}

/// Strongly endotactic: endotactic and the extra condition on every face.
pub fn is_strongly_endotactic(net: &ReactionNetwork, limit: usize) -> Result<EndotacticResult, ClassifyError> {
    let arr = classification_arrangement(net, limit)?;
    let prep = Prepared::new(net);
    let endo = decide_endotactic(&prep, &arr);
    if !endo.holds {
        return Ok(endo);
    }
    let w = decide_strong(&prep, &arr);
    Ok(EndotacticResult { holds: w.is_none(), witness: w, violating_reaction: None, face_count: arr.faces.len() })
}

/// Weak-reversibility corollaries, in order. The last rule needs the
/// arrangement; pass `None` to skip it.
pub fn fast_paths(net: &ReactionNetwork, arrangement: Option<&Arrangement>) -> Option<FastPath> {
    let link = linkage_classes(net);
    if !link.weakly_reversible {
        return None;
    }
    let active: Vec<_> = link.classes.iter().filter(|c| !c.reactions.is_empty()).collect();
    if active.len() == 1 {
        return Some(FastPath::SingleLinkageClass);
    }
    let stoich = stoichiometric_subspace(net);
    if active.iter().all(|c| c.subspace_basis.len() == stoich.dimension) {
        return Some(FastPath::SharedStoichiometricSubspace);
    }
    let arr = arrangement?;
    maximal_reactants_rule(net, &stoich, &active.iter().map(|c| c.complexes.clone()).collect::<Vec<_>>(), arr)
        .then_some(FastPath::MaximalReactantsRule)
}

/// For each face: if the maximal reactants form a union of linkage classes,
/// the face must lie in `H^⊥`.
fn maximal_reactants_rule(
    net: &ReactionNetwork,
    stoich: &StoichiometryInfo,
    classes: &[Vec<usize>],
    arr: &Arrangement,
) -> bool {
    let sources = net.source_complexes();
    arr.faces.iter().all(|face| {
        let w = &face.representative;
        let ips: Vec<Q> = sources.iter().map(|&c| dot(w, net.complexes()[c].coeffs())).collect();
        let top = ips.iter().max().expect("some reaction");
        let t_w: Vec<usize> = sources.iter().zip(&ips).filter(|(_, v)| *v == top).map(|(&c, _)| c).collect();
        let is_union = classes.iter().all(|cl| {
            let inside = cl.iter().filter(|c| t_w.contains(c)).count();
            inside == 0 || inside == cl.len()
        });
        !is_union || stoich.is_in_hperp(w)
    })
}

/// Full classification.
pub fn classify(net: &ReactionNetwork, opts: &ClassifyOptions) -> Result<ClassificationReport, ClassifyError> {
    let wr = linkage_classes(net).weakly_reversible;
    let prep = Prepared::new(net);
    let arr = match classification_arrangement(net, opts.max_hyperplanes) {
        Ok(a) => Some(a),
        Err(ClassifyError::Geometry(GeometryError::ArrangementTooLarge { .. })) => None,
        Err(e) => return Err(e),
    };
    let fast = fast_paths(net, arr.as_ref());
    let Some(arr) = arr else {
        return classify_without_arrangement(net, &prep, wr, fast, opts);
    };
    let endo = decide_endotactic(&prep, &arr);
    let (strong, witness, violating) = if endo.holds {
        let w = decide_strong(&prep, &arr);
        (w.is_none(), w, None)
    } else {
        (false, endo.witness.clone(), endo.violating_reaction)
    };
    if let Some(f) = fast {
        if !strong {
            return Err(ClassifyError::FastPathContradiction(f.name().into()));
        }
    }
    Ok(ClassificationReport {
        weakly_reversible: wr,
        endotactic: endo.holds,
        strongly_endotactic: strong,
        witness,
        violating_reaction: violating,
        fast_path: fast,
        face_count: arr.faces.len(),
        verdict: Verdict::Exact,
        cross_checked: fast.is_some(),
        note: RATIONAL_NOTE,
    })
}

fn classify_without_arrangement(
    net: &ReactionNetwork,
    prep: &Prepared,
    wr: bool,
    fast: Option<FastPath>,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    let base = ClassificationReport {
        weakly_reversible: wr,
        endotactic: true,
        strongly_endotactic: true,
        witness: None,
        violating_reaction: None,
        fast_path: fast,
        face_count: 0,
        verdict: Verdict::Exact,
        cross_checked: false,
        note: RATIONAL_NOTE,
    };
    if fast.is_some() {
        return Ok(base);
    }
    if !opts.allow_sampling {
        let normals = classification_normals(net);
        return Err(enumerate_faces(&normals, net.n_species(), opts.max_hyperplanes).unwrap_err().into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut endo_fail: Option<(Vec<Q>, usize)> = None;
    let mut strong_fail: Option<Vec<Q>> = None;
    for _ in 0..opts.samples {
        let w = random_direction(&mut rng, net.n_species());
        let c = prep.w_endotactic(&w);
        if !c.holds {
            endo_fail = Some((w, c.violating_reaction.expect("violation")));
            break;
        }
        if strong_fail.is_none() && !prep.strong_extra(&w) {
            strong_fail = Some(w);
        }
    }
    Ok(match (endo_fail, strong_fail) {
        (Some((w, r)), _) => ClassificationReport {
            endotactic: false,
            strongly_endotactic: false,
            witness: Some(w),
            violating_reaction: Some(r),
            verdict: Verdict::SampledFalse,
            ..base
        },
        (None, Some(w)) => ClassificationReport {
            strongly_endotactic: false,
            witness: Some(w),
            verdict: Verdict::InconclusiveTrue,
            ..base
        },
        (None, None) => ClassificationReport { verdict: Verdict::InconclusiveTrue, ..base },
    })
}

/// Nonzero primitive integer direction with entries in `[-1000, 1000]`.
pub fn random_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    loop {
        let w: Vec<Q> = (0..n).map(|_| q(rng.random_range(-1000..=1000))).collect();
        if !is_zero(&w) {
            return primitive(&w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::linalg::{qfrac, qvec};
    use crate::parse::parse_network;

    fn net(text: &str) -> ReactionNetwork {
        parse_network(text).unwrap().network
    }

    fn run(text: &str) -> ClassificationReport {
        classify(&net(text), &ClassifyOptions::default()).unwrap()
    }

    fn figure_one() -> ReactionNetwork {
        net("A + B -> A + 2B\n9/4A + B -> 3A + 2B\n11/2A + 3/2B -> 19/4A + 3/4B")
    }

    #[test]
    fn figure_one_directions() {
        let n = figure_one();
        assert!(is_w_endotactic(&n, &qvec(&[1, 0])).unwrap().holds);
        assert!(!is_w_endotactic(&n, &qvec(&[-1, 1])).unwrap().holds);
    }

    #[test]
    fn single_reaction_direction() {
        let n = net("A -> B");
        assert!(is_w_endotactic(&n, &qvec(&[1, -1])).unwrap().holds);
        assert!(!is_w_endotactic(&n, &qvec(&[-1, 1])).unwrap().holds);
    }

    #[test]
    fn zero_direction_rejected() {
        assert_eq!(is_w_endotactic(&net("A -> B"), &qvec(&[0, 0])), Err(ClassifyError::ZeroDirection));
    }

    #[test]
    fn vacuous_in_hperp() {
        let c = is_w_endotactic(&net("A -> B"), &qvec(&[1, 1])).unwrap();
        assert!(c.holds);
        assert!(strong_condition_holds(&net("A -> B"), &qvec(&[1, 1])).unwrap());
    }

    #[test]
    fn reverse_lotka_volterra() {
        let r = run("2X -> X\n0 -> Y\n2Y -> X + Y");
        assert!(!r.weakly_reversible);
        assert!(r.endotactic && r.strongly_endotactic);
        assert_eq!(r.verdict, Verdict::Exact);
    }

    #[test]
    fn endotactic_not_strong() {
        let r = run("2A <-> A + B\nB -> 0\n0 -> 2B");
        assert!(r.endotactic);
        assert!(!r.strongly_endotactic);
        let w = r.witness.unwrap();
        assert!(!strong_condition_holds(&net("2A <-> A + B\nB -> 0\n0 -> 2B"), &w).unwrap());
    }

    #[test]
    fn single_reaction_not_endotactic() {
        let r = run("A -> B");
        assert!(!r.endotactic && !r.strongly_endotactic);
        let w = r.witness.unwrap();
        assert!(!is_w_endotactic(&net("A -> B"), &w).unwrap().holds);
        assert_eq!(r.violating_reaction, Some(0));
    }

    #[test]
    fn figure_one_not_endotactic() {
        let r = classify(&figure_one(), &ClassifyOptions::default()).unwrap();
        assert!(!r.endotactic);
        assert!(!is_w_endotactic(&figure_one(), r.witness.as_ref().unwrap()).unwrap().holds);
    }

    #[test]
    fn single_cycle_uses_fast_path() {
        let r = run("0 -> A\nA -> B\nB -> C\nC -> 0");
        assert!(r.strongly_endotactic);
        assert_eq!(r.fast_path, Some(FastPath::SingleLinkageClass));
        assert!(r.cross_checked);
    }

    #[test]
    fn no_fast_path_for_irreversible() {
        assert_eq!(fast_paths(&net("A -> B"), None), None);
    }

    #[test]
    fn per_face_rule_on_cycle_with_pair() {
        // weakly reversible, endotactic, but not strongly: the rule must not fire
        let n = net("A -> B\nB -> C\nC -> A\n2A <-> 3B");
        let r = classify(&n, &ClassifyOptions::default()).unwrap();
        assert!(r.weakly_reversible && r.endotactic && !r.strongly_endotactic);
        assert_eq!(r.fast_path, None);
    }

    #[test]
    fn witness_scale_invariance() {
        let n = figure_one();
        for w in [qvec(&[-1, 1]), qvec(&[1, 0]), vec![qfrac(-3, 7), qfrac(2, 5)]] {
            let a = is_w_endotactic(&n, &w).unwrap().holds;
            let b = is_w_endotactic(&n, &w.iter().map(|x| x * qfrac(7, 3)).collect::<Vec<_>>()).unwrap().holds;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn limit_without_sampling_errors() {
        let opts = ClassifyOptions { max_hyperplanes: 1, ..Default::default() };
        let err = classify(&net("2X -> X\n0 -> Y\n2Y -> X + Y"), &opts).unwrap_err();
        assert!(matches!(err, ClassifyError::Geometry(GeometryError::ArrangementTooLarge { .. })));
    }

    #[test]
    fn limit_with_sampling() {
        let opts = ClassifyOptions { max_hyperplanes: 1, allow_sampling: true, samples: 2000, seed: 7 };
        let ok = classify(&net("2X -> X\n0 -> Y\n2Y -> X + Y"), &opts).unwrap();
        assert_eq!(ok.verdict, Verdict::InconclusiveTrue);
        assert!(ok.endotactic);
        let opts = ClassifyOptions { max_hyperplanes: 0, ..opts };
        let bad = classify(&net("A -> B"), &opts).unwrap();
        assert_eq!(bad.verdict, Verdict::SampledFalse);
        assert!(!bad.endotactic);
    }

    #[test]
    fn fixture_table() {
        for f in crate::fixtures::ALL {
            let r = classify(&f.network(), &ClassifyOptions::default()).unwrap();
            let e = f.expected;
            assert_eq!(
                (r.weakly_reversible, r.endotactic, r.strongly_endotactic),
                (e.weakly_reversible, e.endotactic, e.strongly_endotactic),
                "{}",
                f.name
            );
        }
    }

    #[test]
    fn limit_with_fast_path() {
        let opts = ClassifyOptions { max_hyperplanes: 1, ..Default::default() };
        let r = classify(&net("0 -> A\nA -> B\nB -> C\nC -> 0"), &opts).unwrap();
        assert!(r.strongly_endotactic);
        assert!(!r.cross_checked);
    }
}
