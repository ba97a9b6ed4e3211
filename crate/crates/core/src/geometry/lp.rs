//! Exact two-phase simplex over the rationals, and the strict-feasibility
//! test built on it.
//!
//! Problems are tiny (tens of rows), so a dense tableau with Bland's rule is
//! plenty; Bland's rule also rules out cycling on the highly degenerate
//! homogeneous systems produced by arrangement enumeration.

use num::{One, Signed, Zero};

use super::linalg::{dot, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
    /// strict `<`
    Lt,
    /// strict `>`
    Gt,
}

#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Q>, relation: Relation, rhs: Q) -> Self {
        Self { coeffs, relation, rhs }
    }

    pub fn is_satisfied_by(&self, x: &[Q]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Lt => lhs < self.rhs,
            Relation::Gt => lhs > self.rhs,
        }
    }
}

/// Outcome of a linear program.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded { x: Vec<Q> },
}

/// `maximize objective . x` over free variables `x` subject to non-strict
/// constraints.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub dim: usize,
    pub objective: Vec<Q>,
    pub constraints: Vec<LinearConstraint>,
    /// Variables known to be nonnegative; others are split into two parts.
    pub nonnegative: Vec<bool>,
}

impl LinearProgram {
    pub fn new(dim: usize, objective: Vec<Q>) -> Self {
        Self { dim, objective, constraints: Vec::new(), nonnegative: vec![false; dim] }
    }

    pub fn push(&mut self, c: LinearConstraint) {
        assert!(
            !matches!(c.relation, Relation::Lt | Relation::Gt),
            "strict constraints must go through lp_strict_feasible"
        );
        assert_eq!(c.coeffs.len(), self.dim, "constraint dimension mismatch");
        self.constraints.push(c);
    }

    pub fn solve(&self) -> LpOutcome {
        // column map: original var -> (plus column, optional minus column)
        let mut cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.dim);
        let mut ncol = 0;
        for j in 0..self.dim {
            if self.nonnegative[j] {
                cols.push((ncol, None));
                ncol += 1;
            } else {
                cols.push((ncol, Some(ncol + 1)));
                ncol += 2;
            }
        }
        let structural = ncol;
        let m = self.constraints.len();

        // Normalize rows to nonnegative rhs.
        let mut rows: Vec<(Vec<Q>, Relation, Q)> = Vec::with_capacity(m);
        for c in &self.constraints {
            let mut a = vec![Q::zero(); structural];
            for (j, v) in c.coeffs.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let (p, mneg) = cols[j];
                a[p] = v.clone();
                if let Some(mn) = mneg {
                    a[mn] = -v.clone();
                }
            }
            let (mut rel, mut b) = (c.relation, c.rhs.clone());
            if b.is_negative() {
                for x in a.iter_mut() {
                    *x = -x.clone();
                }
                b = -b;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    other => other,
                };
            } else if b.is_zero() && rel == Relation::Ge {
                for x in a.iter_mut() {
                    *x = -x.clone();
                }
                rel = Relation::Le;
            }
            rows.push((a, rel, b));
        }

        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let total = structural + n_slack + n_art;
        let mut tab: Vec<Vec<Q>> = Vec::with_capacity(m);
        let mut basis = vec![0usize; m];
        let mut is_art = vec![false; total];
        let (mut s, mut a) = (structural, structural + n_slack);
        for (i, (coef, rel, b)) in rows.into_iter().enumerate() {
            let mut row = coef;
            row.resize(total + 1, Q::zero());
            row[total] = b;
            match rel {
                Relation::Le => {
                    row[s] = Q::one();
                    basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -Q::one();
                    s += 1;
                    row[a] = Q::one();
                    basis[i] = a;
                    is_art[a] = true;
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = Q::one();
                    basis[i] = a;
                    is_art[a] = true;
                    a += 1;
                }
                Relation::Lt | Relation::Gt => unreachable!(),
            }
            tab.push(row);
        }
        let mut simplex = Tableau { tab, basis, total, allowed: vec![true; total] };

        if n_art > 0 {
            let mut phase1 = vec![Q::zero(); total];
            for (j, art) in is_art.iter().enumerate() {
                if *art {
                    phase1[j] = -Q::one();
                }
            }
            simplex.optimize(&phase1);
            if simplex.objective_value(&phase1).is_negative() {
                return LpOutcome::Infeasible;
            }
            simplex.drive_out_artificials(&is_art);
            for (j, art) in is_art.iter().enumerate() {
                if *art {
                    simplex.allowed[j] = false;
                }
            }
        }

        let mut obj = vec![Q::zero(); total];
        for (j, v) in self.objective.iter().enumerate() {
            let (p, mneg) = cols[j];
            obj[p] = v.clone();
            if let Some(mn) = mneg {
                obj[mn] = -v.clone();
            }
        }
        let bounded = simplex.optimize(&obj);
        let z = simplex.primal();
        let x: Vec<Q> = cols
            .iter()
            .map(|&(p, mneg)| match mneg {
                Some(mn) => &z[p] - &z[mn],
                None => z[p].clone(),
            })
            .collect();
        if bounded {
            let value = dot(&self.objective, &x);
            LpOutcome::Optimal { x, value }
        } else {
            LpOutcome::Unbounded { x }
        }
    }
}

struct Tableau {
    tab: Vec<Vec<Q>>,
    basis: Vec<usize>,
    total: usize,
    allowed: Vec<bool>,
}

impl Tableau {
    fn primal(&self) -> Vec<Q> {
        let mut z = vec![Q::zero(); self.total];
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.tab[i][self.total].clone();
        }
        z
    }

    fn objective_value(&self, c: &[Q]) -> Q {
        let mut v = Q::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if !c[b].is_zero() {
                v += &c[b] * &self.tab[i][self.total];
            }
        }
        v
    }

    fn reduced_cost(&self, c: &[Q], j: usize) -> Q {
        let mut r = c[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !c[b].is_zero() && !self.tab[i][j].is_zero() {
                r -= &c[b] * &self.tab[i][j];
            }
        }
        r
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.tab[row][col].recip();
        for x in self.tab[row].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = self.tab[row].clone();
        for (i, r) in self.tab.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, p) in r.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximize with Bland's rule. Returns false if unbounded.
    fn optimize(&mut self, c: &[Q]) -> bool {
        loop {
            let entering = (0..self.total).find(|&j| {
                self.allowed[j] && !self.basis.contains(&j) && self.reduced_cost(c, j).is_positive()
            });
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.tab.len() {
                let a = &self.tab[i][col];
                if a.is_positive() {
                    let ratio = &self.tab[i][self.total] / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn drive_out_artificials(&mut self, is_art: &[bool]) {
        let mut i = 0;
        while i < self.tab.len() {
            if is_art[self.basis[i]] {
                let col = (0..self.total).find(|&j| !is_art[j] && !self.tab[i][j].is_zero());
                match col {
                    Some(j) => self.pivot(i, j),
                    None => {
                        // redundant row
                        self.tab.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}

/// Result of [`lp_strict_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub struct StrictFeasibility {
    pub feasible: bool,
    pub witness: Option<Vec<Q>>,
}

/// Decide whether `{x : eq_i . x = b_i, strict_j . x > c_j}` is nonempty,
/// returning an exact witness when it is.
///
/// Strictness is handled with an auxiliary margin `t` (bounded by 1) that is
/// maximized; the system is strictly feasible iff the optimal margin is
/// positive.
pub fn lp_strict_feasible(dim: usize, equalities: &[(Vec<Q>, Q)], strict: &[(Vec<Q>, Q)]) -> StrictFeasibility {
    let constraints: Vec<LinearConstraint> = equalities
        .iter()
        .map(|(a, b)| LinearConstraint::new(a.clone(), Relation::Eq, b.clone()))
        .chain(strict.iter().map(|(a, b)| LinearConstraint::new(a.clone(), Relation::Gt, b.clone())))
        .collect();
    match feasible_point(dim, &constraints) {
        Some(x) => StrictFeasibility { feasible: true, witness: Some(x) },
        None => StrictFeasibility { feasible: false, witness: None },
    }
}

/// A point satisfying a mixed system of strict and non-strict constraints.
pub fn feasible_point(dim: usize, constraints: &[LinearConstraint]) -> Option<Vec<Q>> {
    let has_strict = constraints.iter().any(|c| matches!(c.relation, Relation::Lt | Relation::Gt));
    let n = if has_strict { dim + 1 } else { dim };
    let mut objective = vec![Q::zero(); n];
    if has_strict {
        objective[dim] = Q::one();
    }
    let mut lp = LinearProgram::new(n, objective);
    for c in constraints {
        assert_eq!(c.coeffs.len(), dim, "constraint dimension mismatch");
        let mut coeffs = c.coeffs.clone();
        let relation = match c.relation {
            Relation::Gt => {
                // a.x - t >= b
                coeffs.push(-Q::one());
                Relation::Ge
            }
            Relation::Lt => {
                // a.x + t <= b
                coeffs.push(Q::one());
                Relation::Le
            }
            other => {
                if has_strict {
                    coeffs.push(Q::zero());
                }
                other
            }
        };
        lp.push(LinearConstraint::new(coeffs, relation, c.rhs.clone()));
    }
    if has_strict {
        let mut bound = vec![Q::zero(); n];
        bound[dim] = Q::one();
        lp.push(LinearConstraint::new(bound, Relation::Le, Q::one()));
    }
    match lp.solve() {
        LpOutcome::Infeasible => None,
        LpOutcome::Optimal { mut x, value } => {
            if has_strict && !value.is_positive() {
                return None;
            }
            x.truncate(dim);
            Some(x)
        }
        LpOutcome::Unbounded { mut x } => {
            // cannot happen with the margin bounded, but a feasible vertex is still a witness
            x.truncate(dim);
            constraints.iter().all(|c| c.is_satisfied_by(&x)).then_some(x)
        }
    }
}
