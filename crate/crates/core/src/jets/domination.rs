//! Finite-range monitor for domination of draining reactions by sustaining
//! ones along a toric jet.

use serde::Serialize;

use super::{jet_exponent, jet_inner, reaction_classes, Frame, JetClass, JetError, JetSchedule};
use crate::network::ReactionNetwork;
use crate::stoich::stoichiometric_subspace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationOptions {
    /// Terminal pull ratio required to call a reaction dominated.
    pub threshold: f64,
    /// Number of indices kept in each reported series.
    pub series_points: usize,
}

impl Default for DominationOptions {
    fn default() -> Self {
        Self { threshold: 1e3, series_points: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub i: usize,
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationEntry {
    pub draining: usize,
    pub draining_label: String,
    pub level: usize,
    pub dominating: Option<usize>,
    pub dominating_label: Option<String>,
    /// `ln |pull_sustaining / pull_draining|` at the last index.
    pub log_terminal_ratio: Option<f64>,
    /// Strictly increasing at every index of the final decade.
    pub increasing: bool,
    pub dominated: bool,
    pub series: Vec<SeriesPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub w1_in_hperp: bool,
    pub warnings: Vec<String>,
    pub threshold: f64,
    /// Indices `[i_max/10, i_max]` on which monotonicity is checked.
    pub decade: (usize, usize),
    pub entries: Vec<DominationEntry>,
    pub all_dominated: bool,
    pub evidence: &'static str,
}

struct Pair {
    flux_x: Vec<f64>,
    flux_y: Vec<f64>,
    diff: Vec<f64>,
}

impl Pair {
    fn log_ratio(&self, schedule: &JetSchedule, len: usize, i: usize) -> Option<f64> {
        let pt = schedule.point(len, i as f64);
        let a = jet_inner(&self.flux_x, &pt);
        let b = jet_inner(&self.flux_y, &pt);
        if a.sign == 0 || b.sign == 0 {
            return None;
        }
        Some(a.ln_abs - b.ln_abs + jet_exponent(&self.diff, &pt))
    }
}

pub fn domination_monitor(
    net: &ReactionNetwork,
    frame: &Frame,
    schedule: &JetSchedule,
    i_min: usize,
    i_max: usize,
    opts: &DominationOptions,
) -> Result<DominationReport, JetError> {
    schedule.validate(frame.len(), i_min, i_max)?;
    let classes = reaction_classes(net, frame)?;
    let fl = net.to_float();
    let stoich = stoichiometric_subspace(net);
    let w1 = &frame.vectors()[0];
    let w1_in_hperp = stoich.project_h(w1).iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-9;
    let mut warnings = Vec::new();
    if w1_in_hperp {
        warnings.push(
            "w_1 lies in the orthogonal complement of the stoichiometric subspace; domination is not expected".to_string(),
        );
    }
    let len = frame.len();
    let decade = ((i_max / 10).max(i_min), i_max);
    let sustaining: Vec<usize> = (0..classes.len()).filter(|&r| classes[r].is_sustaining()).collect();
    let mut entries = Vec::new();
    for (r, class) in classes.iter().enumerate() {
        let JetClass::Draining { level } = *class else { continue };
        let mut best: Option<(usize, f64, Pair)> = None;
        for &s in &sustaining {
            let diff: Vec<f64> = fl.sources[s].iter().zip(&fl.sources[r]).map(|(a, b)| a - b).collect();
            let pair = Pair {
                flux_x: frame.components(&fl.fluxes[s]),
                flux_y: frame.components(&fl.fluxes[r]),
                diff: frame.components(&diff),
            };
            if let Some(v) = pair.log_ratio(schedule, len, i_max) {
                if best.as_ref().map_or(true, |b| v > b.1) {
                    best = Some((s, v, pair));
                }
            }
        }
        let entry = match best {
            None => DominationEntry {
                draining: r,
                draining_label: net.describe_reaction(r),
                level,
                dominating: None,
                dominating_label: None,
                log_terminal_ratio: None,
                increasing: false,
                dominated: false,
                series: Vec::new(),
            },
            Some((s, terminal, pair)) => {
                let mut prev: Option<f64> = None;
                let mut increasing = true;
                for i in decade.0..=decade.1 {
                    let Some(v) = pair.log_ratio(schedule, len, i) else { continue };
                    if prev.is_some_and(|p| v <= p) {
                        increasing = false;
                        break;
                    }
                    prev = Some(v);
                }
                let series = sample_indices(i_min, i_max, opts.series_points)
                    .into_iter()
                    .filter_map(|i| pair.log_ratio(schedule, len, i).map(|log_ratio| SeriesPoint { i, log_ratio }))
                    .collect();
                DominationEntry {
                    draining: r,
                    draining_label: net.describe_reaction(r),
                    level,
                    dominating: Some(s),
                    dominating_label: Some(net.describe_reaction(s)),
                    log_terminal_ratio: Some(terminal),
                    increasing,
                    dominated: increasing && terminal > opts.threshold.ln(),
                    series,
                }
            }
        };
        entries.push(entry);
    }
    let all_dominated = entries.iter().all(|e| e.dominated);
    Ok(DominationReport {
        w1_in_hperp,
        warnings,
        threshold: opts.threshold,
        decade,
        entries,
        all_dominated,
        evidence: "finite-range evidence, not a proof",
    })
}

/// Roughly geometric sample of `lo..=hi` with at most `count` indices,
/// always including both ends.
fn sample_indices(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let count = count.max(2);
    let mut out: Vec<usize> = (0..count)
        .map(|k| {
            let t = k as f64 / (count - 1) as f64;
            ((lo as f64).ln() * (1.0 - t) + (hi as f64).ln() * t).exp().round() as usize
        })
        .map(|i| i.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

/// CSV rows `draining,dominating,i,log_ratio` for every reported series.
pub fn series_csv(report: &DominationReport) -> String {
    let mut s = String::from("draining,dominating,i,log_ratio\n");
    for e in &report.entries {
        for p in &e.series {
            s.push_str(&format!("{},{},{},{:e}\n", e.draining, e.dominating.map_or(-1, |d| d as i64), p.i, p.log_ratio));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::jets::{BetaSchedule, ThetaSchedule};
    use crate::parse::parse_network;

    #[test]
    fn reverse_lotka_volterra_domination() {
        let n = fixtures::REVERSE_LOTKA_VOLTERRA.network();
        let f = Frame::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        let r = domination_monitor(&n, &f, &JetSchedule::default(), 1, 1000, &DominationOptions::default()).unwrap();
        assert!(!r.w1_in_hperp);
        assert_eq!(r.entries.len(), 2);
        assert!(r.all_dominated);
        let e = &r.entries[0];
        assert_eq!((e.draining, e.level, e.dominating), (0, 2, Some(1)));
        assert_eq!((r.entries[1].draining, r.entries[1].level), (2, 1));
        assert!(e.increasing && e.dominated);
        // ratio = β_1/β_2 · θ^{2β_2/N} = i · e^{2/N}
        let norm = (1.0 + 1e-6f64).sqrt();
        let want = 1000f64.ln() + 2.0 / norm;
        assert!((e.log_terminal_ratio.unwrap() - want).abs() < 1e-9);
        assert!(series_csv(&r).lines().count() > 10);
    }

    #[test]
    fn conservation_frame_gives_bounded_ratio() {
        let n = parse_network("A <-> B").unwrap().network;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = Frame::new(vec![vec![s, s], vec![-s, s]]).unwrap();
        let sched = JetSchedule { beta: BetaSchedule::ExpSquare, theta: ThetaSchedule::Exp };
        let r = domination_monitor(&n, &f, &sched, 1, 60, &DominationOptions::default()).unwrap();
        assert!(r.w1_in_hperp);
        assert_eq!(r.warnings.len(), 1);
        let e = &r.entries[0];
        assert!(!e.dominated && !e.increasing);
        for p in &e.series {
            // (θ^{β_2})^{√2} with the normalized coefficient β_2/N
            let i = p.i as f64;
            let b2 = (-i * i).exp() / (1.0 + (-2.0 * i * i).exp()).sqrt();
            assert!((p.log_ratio - 2f64.sqrt() * i * b2).abs() < 1e-12);
        }
        assert!(e.log_terminal_ratio.unwrap().abs() < 1e-12);
    }

    #[test]
    fn sampling_includes_ends() {
        let v = sample_indices(3, 1000, 20);
        assert_eq!((v[0], *v.last().unwrap()), (3, 1000));
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }
}
