//! Extraction of an approximate unit jet from a finite sequence of unit
//! vectors, following the accumulation-point recursion.

use serde::Serialize;

use super::{fdot, Frame, JetError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Distance below which two vectors count as the same point.
    pub cluster_tol: f64,
    /// Terms required at every level of the recursion.
    pub min_per_level: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { cluster_tol: 1e-9, min_per_level: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitJetExtraction {
    /// Increasing positions in the input sequence.
    pub indices: Vec<usize>,
    pub frame: Frame,
    /// `<w(i), w_j>` for each kept index and level.
    pub coefficients: Vec<Vec<f64>>,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Accumulation direction of `seq[idx]`: a repeated value if some value
/// recurs at least `min` times (the latest-recurring such value), otherwise
/// the last term as the estimate of the limit.
fn accumulation(seq: &[Vec<f64>], idx: &[usize], opts: &ExtractOptions) -> (Vec<f64>, Vec<usize>) {
    let mut clusters: Vec<(usize, Vec<usize>)> = Vec::new();
    for &i in idx {
        match clusters.iter_mut().find(|(rep, _)| dist(&seq[*rep], &seq[i]) <= opts.cluster_tol) {
            Some((_, members)) => members.push(i),
            None => clusters.push((i, vec![i])),
        }
    }
    let repeated = clusters
        .iter()
        .filter(|(_, m)| m.len() >= opts.min_per_level)
        .max_by_key(|(_, m)| (*m.last().expect("nonempty"), m.len()));
    match repeated {
        Some((rep, members)) => (seq[*rep].clone(), members.clone()),
        None => (seq[*idx.last().expect("nonempty")].clone(), idx.to_vec()),
    }
}

fn recurse(
    seq: &[Vec<f64>],
    idx: Vec<usize>,
    level: usize,
    max_levels: usize,
    opts: &ExtractOptions,
) -> Result<(Vec<usize>, Vec<Vec<f64>>), JetError> {
    if idx.len() < opts.min_per_level {
        return Err(JetError::TooShort { level, have: idx.len(), need: opts.min_per_level });
    }
    let (w1, members) = accumulation(seq, &idx, opts);
    let positive: Vec<usize> = members.into_iter().filter(|&i| fdot(&seq[i], &w1) > 0.0).collect();
    let mut on_w1 = Vec::new();
    let mut off = Vec::new();
    let mut residuals: Vec<Vec<f64>> = vec![Vec::new(); seq.len()];
    for &i in &positive {
        let b = fdot(&seq[i], &w1);
        let r: Vec<f64> = seq[i].iter().zip(&w1).map(|(x, w)| x - b * w).collect();
        let norm = fdot(&r, &r).sqrt();
        if norm <= opts.cluster_tol || level == max_levels {
            on_w1.push(i);
        } else {
            residuals[i] = r.iter().map(|x| x / norm).collect();
            off.push(i);
        }
    }
    if off.len() >= opts.min_per_level {
        let (kept, mut tail) = recurse(&residuals, off, level + 1, max_levels, opts)?;
        let mut frame = vec![w1];
        frame.append(&mut tail);
        return Ok((kept, frame));
    }
    if on_w1.len() >= opts.min_per_level {
        return Ok((on_w1, vec![w1]));
    }
    Err(JetError::TooShort { level, have: on_w1.len().max(off.len()), need: opts.min_per_level })
}

/// Returns a subsequence whose coefficients along the extracted frame are
/// positive with strictly increasing ratios `β_j/β_{j+1}`.
pub fn extract_unit_jet(seq: &[Vec<f64>], dim: usize, opts: &ExtractOptions) -> Result<UnitJetExtraction, JetError> {
    for v in seq {
        if v.len() != dim {
            return Err(JetError::DimensionMismatch { expected: dim, got: v.len() });
        }
        if (fdot(v, v).sqrt() - 1.0).abs() > 1e-9 {
            return Err(JetError::Other("sequence terms must be unit vectors".into()));
        }
    }
    let (idx, raw_frame) = recurse(seq, (0..seq.len()).collect(), 1, dim, opts)?;
    let frame = Frame::orthonormalize(&raw_frame)?;
    let coeffs = |i: usize| -> Vec<f64> { frame.vectors().iter().map(|w| fdot(&seq[i], w)).collect() };
    // greedy pass keeping terms whose ratios all exceed those of the previous kept term
    let mut indices = Vec::new();
    let mut coefficients: Vec<Vec<f64>> = Vec::new();
    for i in idx {
        let c = coeffs(i);
        if c.iter().any(|b| !(*b > 0.0)) {
            continue;
        }
        let ok = coefficients.last().map_or(true, |prev| (0..c.len() - 1).all(|j| c[j] / c[j + 1] > prev[j] / prev[j + 1]));
        if ok {
            indices.push(i);
            coefficients.push(c);
        }
    }
    if indices.len() < opts.min_per_level {
        return Err(JetError::TooShort { level: frame.len(), have: indices.len(), need: opts.min_per_level });
    }
    Ok(UnitJetExtraction { indices, frame, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normalize(v: Vec<f64>) -> Vec<f64> {
        let n = fdot(&v, &v).sqrt();
        v.into_iter().map(|x| x / n).collect()
    }

    #[test]
    fn constant_sequence() {
        let w = normalize(vec![1.0, 2.0, 2.0]);
        let seq = vec![w.clone(); 20];
        let r = extract_unit_jet(&seq, 3, &ExtractOptions::default()).unwrap();
        assert_eq!(r.indices, (0..20).collect::<Vec<_>>());
        assert_eq!(r.frame.len(), 1);
        assert!(dist(&r.frame.vectors()[0], &w) < 1e-15);
    }

    #[test]
    fn tilted_sequence_recovers_axes() {
        let seq: Vec<Vec<f64>> = (1..=1000).map(|i| normalize(vec![1.0, 1.0 / i as f64])).collect();
        let r = extract_unit_jet(&seq, 2, &ExtractOptions::default()).unwrap();
        assert_eq!(r.frame.len(), 2);
        assert!(dist(&r.frame.vectors()[0], &[1.0, 0.0]) < 2e-3);
        assert!(dist(&r.frame.vectors()[1], &[0.0, 1.0]) < 2e-3);
        assert!(r.indices.len() > 900);
        assert!(r.coefficients.windows(2).all(|c| c[1][0] / c[1][1] > c[0][0] / c[0][1]));
    }

    #[test]
    fn alternating_sequence() {
        let seq: Vec<Vec<f64>> = (0..40).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect();
        let r = extract_unit_jet(&seq, 1, &ExtractOptions::default()).unwrap();
        assert_eq!(r.frame.len(), 1);
        assert_eq!(r.indices.len(), 20);
        let sign = r.frame.vectors()[0][0];
        assert!(r.indices.iter().all(|&i| seq[i][0] == sign));
    }

    #[test]
    fn short_sequence_is_rejected() {
        let seq = vec![vec![1.0, 0.0]; 3];
        assert!(matches!(extract_unit_jet(&seq, 2, &ExtractOptions::default()), Err(JetError::TooShort { .. })));
    }
}
