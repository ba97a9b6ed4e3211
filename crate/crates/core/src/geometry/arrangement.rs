//! Face enumeration for central hyperplane arrangements.
//!
//! A face is a connected piece of `{w != 0}` on which every normal has a fixed
//! sign. Hyperplanes are inserted one at a time; each face either stays on one
//! side of the new hyperplane or splits into three (`+`, `0`, `-`). Because
//! faces are relatively open convex cones, a single strict-feasibility LP per
//! (face, hyperplane) pair decides which case applies, and the representative
//! of the middle piece is a positive combination of the other two.

use std::collections::HashMap;

use num::{One, Signed, Zero};

use super::linalg::{add, dot, line_key, nullspace, primitive, scale, sign, sub, Q};
use super::lp::{feasible_point, LinearConstraint, Relation};
use super::GeometryError;

/// Default cap on the number of distinct hyperplanes.
pub const DEFAULT_MAX_HYPERPLANES: usize = 20;

/// One sign per hyperplane: -1, 0 or +1.
pub type SignVector = Vec<i8>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementFace {
    pub signs: SignVector,
    /// Nonzero primitive integer vector realizing `signs` exactly.
    pub representative: Vec<Q>,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub dim: usize,
    /// Distinct hyperplane normals (canonical up to nonzero scaling).
    pub hyperplanes: Vec<Vec<Q>>,
    /// For each input normal: its hyperplane index and orientation, or `None`
    /// for a zero normal.
    pub normal_map: Vec<Option<(usize, i8)>>,
    pub faces: Vec<ArrangementFace>,
}

impl Arrangement {
    /// Sign of input normal `idx` on `face`.
    pub fn normal_sign(&self, face: &ArrangementFace, idx: usize) -> i8 {
        match self.normal_map[idx] {
            Some((h, o)) => face.signs[h] * o,
            None => 0,
        }
    }
}

struct Cone {
    signs: Vec<i8>,
    rep: Vec<Q>,
}

/// Enumerate every face of the central arrangement with the given normals.
///
/// Zero normals are ignored; parallel and antiparallel normals share one
/// hyperplane.
pub fn enumerate_faces(normals: &[Vec<Q>], dim: usize, limit: usize) -> Result<Arrangement, GeometryError> {
    let mut hyperplanes: Vec<Vec<Q>> = Vec::new();
    let mut index: HashMap<Vec<Q>, usize> = HashMap::new();
    let mut normal_map = Vec::with_capacity(normals.len());
    for n in normals {
        if n.len() != dim {
            return Err(GeometryError::DimensionMismatch { expected: dim, found: n.len() });
        }
        if n.iter().all(Zero::is_zero) {
            normal_map.push(None);
            continue;
        }
        let key = line_key(n);
        let orientation = sign(&dot(&key, n));
        let h = *index.entry(key.clone()).or_insert_with(|| {
            hyperplanes.push(key);
            hyperplanes.len() - 1
        });
        normal_map.push(Some((h, orientation)));
    }
    if hyperplanes.len() > limit {
        return Err(GeometryError::ArrangementTooLarge { hyperplanes: hyperplanes.len(), limit });
    }

    // The all-zero face is the common null space of the inserted normals.
    let mut lineality: Vec<Vec<Q>> = (0..dim)
        .map(|i| {
            let mut e = vec![Q::zero(); dim];
            e[i] = Q::one();
            e
        })
        .collect();
    let mut cones: Vec<Cone> = Vec::new();

    for (k, a) in hyperplanes.iter().enumerate() {
        let inserted = &hyperplanes[..k];
        let mut nullspace_cache: HashMap<Vec<usize>, Vec<Vec<Q>>> = HashMap::new();
        let mut next: Vec<Cone> = Vec::with_capacity(cones.len() * 2);
        for cone in cones.drain(..) {
            let s = sign(&dot(a, &cone.rep));
            let probe_sign = if s == 0 { 1 } else { -s };
            let probe: Vec<Q> = if probe_sign > 0 { a.clone() } else { a.iter().map(|x| -x).collect() };
            let other = cone_point_with(inserted, &cone.signs, &probe, &mut nullspace_cache);
            match (s, other) {
                (0, None) => next.push(extend(cone.signs, 0, cone.rep)),
                (0, Some(u)) => {
                    let below = push_off(inserted, &cone.signs, &cone.rep, &u);
                    next.push(extend(cone.signs.clone(), 1, u));
                    next.push(extend(cone.signs.clone(), -1, below));
                    next.push(extend(cone.signs, 0, cone.rep));
                }
                (_, None) => next.push(extend(cone.signs, s, cone.rep)),
                (_, Some(v)) => {
                    let alpha = dot(a, &cone.rep).abs();
                    let beta = dot(a, &v).abs();
                    let mid = primitive(&add(&scale(&beta, &cone.rep), &scale(&alpha, &v)));
                    next.push(extend(cone.signs.clone(), -s, v));
                    next.push(extend(cone.signs.clone(), 0, mid));
                    next.push(extend(cone.signs, s, cone.rep));
                }
            }
        }

        // split the lineality space
        let coeffs: Vec<Q> = lineality.iter().map(|b| dot(a, b)).collect();
        if coeffs.iter().any(|c| !c.is_zero()) {
            let mut rep = vec![Q::zero(); dim];
            for (c, b) in coeffs.iter().zip(&lineality) {
                if !c.is_zero() {
                    rep = rep.iter().zip(b).map(|(r, x)| r + c * x).collect();
                }
            }
            let rep = primitive(&rep);
            let mut zero = vec![0i8; k];
            zero.push(1);
            next.push(Cone { signs: zero.clone(), rep: rep.clone() });
            *zero.last_mut().unwrap() = -1;
            next.push(Cone { signs: zero, rep: rep.iter().map(|x| -x).collect() });
            // restrict to a^perp inside the current space
            let kernel = nullspace(&[coeffs.clone()], lineality.len());
            lineality = kernel
                .iter()
                .map(|c| {
                    let mut v = vec![Q::zero(); dim];
                    for (ci, b) in c.iter().zip(&lineality) {
                        if !ci.is_zero() {
                            v = v.iter().zip(b).map(|(r, x)| r + ci * x).collect();
                        }
                    }
                    primitive(&v)
                })
                .collect();
        }
        cones = next;
    }

    let m = hyperplanes.len();
    let mut faces: Vec<ArrangementFace> =
        cones.into_iter().map(|c| ArrangementFace { signs: c.signs, representative: c.rep }).collect();
    match lineality.len() {
        0 => {}
        1 => {
            let v = lineality[0].clone();
            faces.push(ArrangementFace { signs: vec![0; m], representative: v.iter().map(|x| -x).collect() });
            faces.push(ArrangementFace { signs: vec![0; m], representative: v });
        }
        _ => faces.push(ArrangementFace { signs: vec![0; m], representative: lineality[0].clone() }),
    }
    faces.sort_by(|x, y| x.signs.cmp(&y.signs).then_with(|| x.representative.cmp(&y.representative)));
    Ok(Arrangement { dim, hyperplanes, normal_map, faces })
}

fn extend(mut signs: Vec<i8>, s: i8, rep: Vec<Q>) -> Cone {
    signs.push(s);
    Cone { signs, rep: primitive(&rep) }
}

/// A point of the cone `signs` (w.r.t. `inserted`) with `<probe, x> > 0`.
fn cone_point_with(
    inserted: &[Vec<Q>],
    signs: &[i8],
    probe: &[Q],
    cache: &mut HashMap<Vec<usize>, Vec<Vec<Q>>>,
) -> Option<Vec<Q>> {
    let zeros: Vec<usize> = signs.iter().enumerate().filter(|(_, s)| **s == 0).map(|(i, _)| i).collect();
    let basis = cache
        .entry(zeros.clone())
        .or_insert_with(|| {
            let rows: Vec<Vec<Q>> = zeros.iter().map(|&i| inserted[i].clone()).collect();
            if rows.is_empty() {
                let d = probe.len();
                (0..d)
                    .map(|i| {
                        let mut e = vec![Q::zero(); d];
                        e[i] = Q::one();
                        e
                    })
                    .collect()
            } else {
                nullspace(&rows, probe.len())
            }
        })
        .clone();
    if basis.is_empty() {
        return None;
    }
    let reduce = |v: &[Q]| -> Vec<Q> { basis.iter().map(|b| dot(v, b)).collect() };
    let mut constraints: Vec<LinearConstraint> = signs
        .iter()
        .zip(inserted)
        .filter(|(s, _)| **s != 0)
        .map(|(s, a)| {
            let c = reduce(a);
            let c = if *s > 0 { c } else { c.iter().map(|x| -x).collect() };
            LinearConstraint::new(c, Relation::Gt, Q::zero())
        })
        .collect();
    constraints.push(LinearConstraint::new(reduce(probe), Relation::Gt, Q::zero()));
    let y = feasible_point(basis.len(), &constraints)?;
    let mut x = vec![Q::zero(); probe.len()];
    for (yi, b) in y.iter().zip(&basis) {
        if !yi.is_zero() {
            x = x.iter().zip(b).map(|(r, bv)| r + yi * bv).collect();
        }
    }
    Some(x)
}

/// Move from `p` (on the new hyperplane) away from `u` far enough to cross to
/// the negative side while staying inside the cone.
fn push_off(inserted: &[Vec<Q>], signs: &[i8], p: &[Q], u: &[Q]) -> Vec<Q> {
    let d = sub(p, u);
    let mut eps = Q::one();
    for (s, a) in signs.iter().zip(inserted) {
        if *s == 0 {
            continue;
        }
        let sf = Q::from_integer((*s as i64).into());
        let at_p = &sf * dot(a, p);
        let slope = &sf * dot(a, &d);
        if slope.is_negative() {
            let bound = at_p / (-slope);
            if bound < eps {
                eps = bound;
            }
        }
    }
    let half = Q::new(1.into(), 2.into());
    let eps = eps * half;
    p.iter().zip(&d).map(|(x, y)| x + &eps * y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::linalg::qvec;

    fn check_reps(arr: &Arrangement) {
        for f in &arr.faces {
            assert!(f.representative.iter().any(|x| !x.is_zero()));
            for (h, s) in arr.hyperplanes.iter().zip(&f.signs) {
                assert_eq!(sign(&dot(h, &f.representative)), *s);
            }
        }
    }

    #[test]
    fn single_normal_in_plane() {
        let arr = enumerate_faces(&[qvec(&[1, 0])], 2, 20).unwrap();
        assert_eq!(arr.faces.len(), 4);
        check_reps(&arr);
        let zero: Vec<_> = arr.faces.iter().filter(|f| f.signs == vec![0]).collect();
        assert_eq!(zero.len(), 2);
    }

    #[test]
    fn coordinate_axes_give_eight_faces() {
        let arr = enumerate_faces(&[qvec(&[1, 0]), qvec(&[0, 1])], 2, 20).unwrap();
        assert_eq!(arr.faces.len(), 8);
        check_reps(&arr);
    }

    #[test]
    fn empty_arrangement() {
        let arr = enumerate_faces(&[], 3, 20).unwrap();
        assert_eq!(arr.faces.len(), 1);
        assert!(arr.faces[0].representative.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn duplicates_share_a_hyperplane() {
        let arr = enumerate_faces(&[qvec(&[1, 1]), qvec(&[-2, -2]), qvec(&[0, 0])], 2, 20).unwrap();
        assert_eq!(arr.hyperplanes.len(), 1);
        assert_eq!(arr.normal_map[2], None);
        let (h0, o0) = arr.normal_map[0].unwrap();
        let (h1, o1) = arr.normal_map[1].unwrap();
        assert_eq!(h0, h1);
        assert_eq!(o0, -o1);
    }

    #[test]
    fn limit_is_enforced() {
        let normals: Vec<_> = (1..=4).map(|i| qvec(&[1, i])).collect();
        let err = enumerate_faces(&normals, 2, 3).unwrap_err();
        assert!(matches!(err, GeometryError::ArrangementTooLarge { hyperplanes: 4, limit: 3 }));
    }

    #[test]
    fn generic_planes_in_space() {
        // three generic planes through the origin in R^3: 8 chambers, 12 walls, 6 rays
        let arr = enumerate_faces(&[qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])], 3, 20).unwrap();
        assert_eq!(arr.faces.len(), 26);
        check_reps(&arr);
    }
}
