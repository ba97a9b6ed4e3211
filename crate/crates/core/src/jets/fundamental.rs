//! Stabilization of the `<=_{w(i)}`-maximal subset of a point set along a jet.

use serde::Serialize;

use super::{jet_inner, Frame, JetError, JetSchedule};

/// Tolerance for equal frame components of two points.
const TIE_TOL: f64 = 1e-9;

/// Indices in `from..=to` whose maximal subset is `set`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArgmaxRun {
    pub from: usize,
    pub to: usize,
    pub set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FundamentalReport {
    /// The last set of the Super chain along the frame.
    pub target: Vec<usize>,
    /// First index from which the argmax equals `target` through the end of
    /// the range.
    pub stabilized_at: Option<usize>,
    pub argmax_sets: Vec<ArgmaxRun>,
}

fn differences(a: &[f64], b: &[f64], scale: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| if (x - y).abs() <= TIE_TOL * scale { 0.0 } else { x - y }).collect()
}

/// Iterated maximal subsets along `frame`, computed on frame components with
/// a relative tie tolerance of `1e-9`.
pub fn float_super_chain(q: &[Vec<f64>], frame: &Frame) -> Result<Vec<Vec<usize>>, JetError> {
    let comps = components(q, frame)?;
    let scale = scale_of(&comps);
    let mut current: Vec<usize> = (0..q.len()).collect();
    let mut chain = Vec::with_capacity(frame.len());
    for j in 0..frame.len() {
        let best = current.iter().map(|&p| comps[p][j]).fold(f64::NEG_INFINITY, f64::max);
        current.retain(|&p| comps[p][j] >= best - TIE_TOL * scale);
        chain.push(current.clone());
    }
    Ok(chain)
}

fn components(q: &[Vec<f64>], frame: &Frame) -> Result<Vec<Vec<f64>>, JetError> {
    if q.is_empty() {
        return Err(JetError::EmptySet);
    }
    for p in q {
        frame.check_dim(p.len())?;
    }
    Ok(q.iter().map(|p| frame.vectors().iter().map(|w| super::fdot(w, p)).collect()).collect())
}

fn scale_of(comps: &[Vec<f64>]) -> f64 {
    comps.iter().flatten().fold(1.0f64, |m, c| m.max(c.abs()))
}

/// Maximal subset of `q` for `<w(i), ·>`; comparisons use the sign of
/// `<w(i), p - best>` evaluated level by level.
fn argmax_at(comps: &[Vec<f64>], scale: f64, pt: &super::JetPoint) -> Vec<usize> {
    let mut best = vec![0usize];
    for p in 1..comps.len() {
        let d = jet_inner(&differences(&comps[p], &comps[best[0]], scale), pt);
        match d.sign {
            1 => best = vec![p],
            0 => best.push(p),
            _ => {}
        }
    }
    best
}

pub fn jets_fundamental_check(
    q: &[Vec<f64>],
    frame: &Frame,
    schedule: &JetSchedule,
    i_min: usize,
    i_max: usize,
) -> Result<FundamentalReport, JetError> {
    if i_min == 0 || i_max < i_min {
        return Err(JetError::EmptyRange);
    }
    let comps = components(q, frame)?;
    let scale = scale_of(&comps);
    let target = float_super_chain(q, frame)?.pop().expect("nonempty frame");
    let mut runs: Vec<ArgmaxRun> = Vec::new();
    for i in i_min..=i_max {
        let set = argmax_at(&comps, scale, &schedule.point(frame.len(), i as f64));
        match runs.last_mut() {
            Some(run) if run.set == set => run.to = i,
            _ => runs.push(ArgmaxRun { from: i, to: i, set }),
        }
    }
    let stabilized_at = runs.last().filter(|r| r.set == target).map(|r| r.from);
    Ok(FundamentalReport { target, stabilized_at, argmax_sets: runs })
}
