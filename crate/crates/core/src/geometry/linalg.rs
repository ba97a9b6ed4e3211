//! Exact rational vector and matrix helpers.
//!
//! Everything here works over `BigRational`; nothing rounds.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qfrac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(entries: &[i64]) -> Vec<Q> {
    entries.iter().map(|&e| q(e)).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc += x * y;
    }
    acc
}

pub fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(c: &Q, a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| c * x).collect()
}

pub fn neg(a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[Q]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn to_f64(v: &[Q]) -> Vec<f64> {
    v.iter().map(q_to_f64).collect()
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Best rational approximation of a finite float, exact for dyadic values.
pub fn q_from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Positive rescaling of `v` to a primitive integer vector. Zero stays zero.
pub fn primitive(v: &[Q]) -> Vec<Q> {
    if is_zero(v) {
        return v.to_vec();
    }
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// Canonical representative of the line spanned by `v`: primitive, first
/// nonzero entry positive. Used to deduplicate hyperplanes.
pub fn line_key(v: &[Q]) -> Vec<Q> {
    let p = primitive(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => neg(&p),
        _ => p,
    }
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<Q>], ncols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..ncols {
                    if !m[r][j].is_zero() {
                        let t = &f * &m[r][j];
                        m[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(vectors: &[Vec<Q>], ncols: usize) -> usize {
    rref(vectors, ncols).1.len()
}

/// Basis of the row space, each element a rational combination of the inputs.
pub fn row_space_basis(vectors: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    rref(vectors, ncols).0
}

/// Basis of `{x : <row, x> = 0 for every row}`, scaled to primitive integers.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let (red, pivots) = rref(rows, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (row, &pc) in red.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(primitive(&v));
    }
    basis
}

/// Gram–Schmidt over the rationals without normalization. Dependent inputs
/// are dropped.
pub fn orthogonalize(vectors: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    let mut norms: Vec<Q> = Vec::new();
    for v in vectors {
        let mut u = v.clone();
        for (b, nb) in out.iter().zip(&norms) {
            let c = dot(&u, b) / nb;
            if !c.is_zero() {
                u = sub(&u, &scale(&c, b));
            }
        }
        if !is_zero(&u) {
            let u = primitive(&u);
            norms.push(dot(&u, &u));
            out.push(u);
        }
    }
    out
}

/// Solve `x = sum c_i basis_i` for `x` in the span; `None` if `x` is not in it.
pub fn coordinates_in(basis: &[Vec<Q>], x: &[Q]) -> Option<Vec<Q>> {
    let n = x.len();
    let k = basis.len();
    // augmented system: columns are basis vectors, rhs x
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut r: Vec<Q> = basis.iter().map(|b| b[i].clone()).collect();
            r.push(x[i].clone());
            r
        })
        .collect();
    let (red, pivots) = rref(&rows, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![Q::zero(); k];
    for (row, &pc) in red.iter().zip(&pivots) {
        c[pc] = row[k].clone();
    }
    Some(c)
}

pub fn sign(x: &Q) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_qvec(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_single_reaction() {
        let ns = nullspace(&[qvec(&[-1, 1])], 2);
        assert_eq!(ns, vec![qvec(&[1, 1])]);
    }

    #[test]
    fn nullspace_of_full_rank_is_empty() {
        let ns = nullspace(&[qvec(&[-1, 0]), qvec(&[0, 1]), qvec(&[1, -1])], 2);
        assert!(ns.is_empty());
        assert_eq!(rank(&[qvec(&[-1, 0]), qvec(&[0, 1]), qvec(&[1, -1])], 2), 2);
    }

    #[test]
    fn primitive_and_line_key() {
        let v = vec![qfrac(-1, 2), qfrac(3, 4)];
        assert_eq!(primitive(&v), qvec(&[-2, 3]));
        assert_eq!(line_key(&v), qvec(&[2, -3]));
    }

    #[test]
    fn orthogonalize_keeps_rationals() {
        let b = orthogonalize(&[qvec(&[1, 1, 0]), qvec(&[1, 0, 1]), qvec(&[2, 1, 1])]);
        assert_eq!(b.len(), 2);
        assert!(dot(&b[0], &b[1]).is_zero());
    }

    #[test]
    fn coordinates_roundtrip() {
        let basis = vec![qvec(&[1, 0, 1]), qvec(&[0, 1, 1])];
        let c = coordinates_in(&basis, &qvec(&[2, 3, 5])).unwrap();
        assert_eq!(c, qvec(&[2, 3]));
        assert!(coordinates_in(&basis, &qvec(&[1, 1, 1])).is_none());
    }
}
