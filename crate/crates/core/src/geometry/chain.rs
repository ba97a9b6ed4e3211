//! `<=_w`-maximal subsets, iterated maximal subsets along a frame, and a
//! single direction realizing the iterated maximum.

use num::{One, Signed, Zero};

use super::linalg::{add, dot, scale, Q};
use super::GeometryError;

/// Elements of `ys` maximizing `<w, y>`, in input order.
pub fn max_subset(ys: &[Vec<Q>], w: &[Q]) -> Result<Vec<Vec<Q>>, GeometryError> {
    Ok(max_indices(ys, w)?.into_iter().map(|i| ys[i].clone()).collect())
}

/// Indices of the `<=_w`-maximal elements of `ys`.
pub fn max_indices(ys: &[Vec<Q>], w: &[Q]) -> Result<Vec<usize>, GeometryError> {
    if ys.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let values: Vec<Q> = ys.iter().map(|y| dot(w, y)).collect();
    let best = values.iter().max().expect("nonempty").clone();
    Ok(values.iter().enumerate().filter(|(_, v)| **v == best).map(|(i, _)| i).collect())
}

/// `Super_1 ⊇ Super_2 ⊇ ... ⊇ Super_l`, where `Super_0 = q` and each step keeps
/// the maximal elements for the next frame vector.
pub fn super_chain(q: &[Vec<Q>], frame: &[Vec<Q>]) -> Result<Vec<Vec<Vec<Q>>>, GeometryError> {
    if q.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let mut current = q.to_vec();
    let mut chain = Vec::with_capacity(frame.len());
    for w in frame {
        if w.iter().all(Zero::is_zero) {
            return Err(GeometryError::ZeroVector);
        }
        current = max_subset(&current, w)?;
        chain.push(current.clone());
    }
    Ok(chain)
}

/// A positive combination `b_1 w_1 + ... + b_l w_l` with `b_1 > ... > b_l > 0`
/// whose maximal subset of `q` is the last set of the Super chain.
///
/// Coefficients are chosen step by step: with `v` realizing `Super_j`, the next
/// coefficient stays below
/// `min_{y not in Super_j} (c - <v,y>) / max(0, <w_{j+1}, y> - c')`,
/// where `c = <v, Super_j>` and `c' = <w_{j+1}, Super_{j+1}>`.
pub fn realize_iterated_max(q: &[Vec<Q>], frame: &[Vec<Q>]) -> Result<Vec<Q>, GeometryError> {
    if q.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let Some(first) = frame.first() else {
        return Err(GeometryError::EmptyFrame);
    };
    let half = Q::new(1.into(), 2.into());
    let mut v = first.clone();
    let mut beta = Q::one();
    let mut supers = max_indices(q, &v)?;
    for w_next in &frame[1..] {
        let c = dot(&v, &q[supers[0]]);
        let sub_q: Vec<Vec<Q>> = supers.iter().map(|&i| q[i].clone()).collect();
        let next_local = max_indices(&sub_q, w_next)?;
        let next: Vec<usize> = next_local.iter().map(|&i| supers[i]).collect();
        let c_next = dot(w_next, &q[next[0]]);
        // largest admissible coefficient (delta); None means unbounded
        let mut delta: Option<Q> = None;
        for (i, y) in q.iter().enumerate() {
            if supers.contains(&i) {
                continue;
            }
            let rise = dot(w_next, y) - &c_next;
            if rise.is_positive() {
                let gap = &c - dot(&v, y);
                let bound = gap / rise;
                delta = Some(match delta {
                    Some(d) if d < bound => d,
                    _ => bound,
                });
            }
        }
        let mut b = &beta * &half;
        if let Some(d) = delta {
            let cap = d * &half;
            if cap < b {
                b = cap;
            }
        }
        v = add(&v, &scale(&b, w_next));
        beta = b;
        supers = next;
    }
    Ok(v)
}
