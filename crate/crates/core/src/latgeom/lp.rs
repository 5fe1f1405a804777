//! Feasibility of exact linear systems with equalities, weak and strict
//! inequalities, decided by a two-phase dense simplex with Bland's rule.
//!
//! Unknowns are free. Strict inequalities share one gap variable `ε ≥ 0`
//! which is maximized subject to `ε ≤ 1`; the system is feasible iff the
//! optimum has `ε > 0` (or there are no strict rows and phase one
//! succeeds).

use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Gt,
    Le,
    Lt,
}

/// `coeffs · x  (relation)  rhs`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self { coeffs, relation, rhs }
    }

    /// Checks the constraint exactly at `x`.
    pub fn holds_at(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Gt => lhs > self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Lt => lhs < self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Feasible(w) => Some(w),
            LpOutcome::Infeasible => None,
        }
    }
}

/// Finds a rational point satisfying every constraint over `nvars` free
/// unknowns, or reports infeasibility.
///
/// # Panics
/// If a constraint has a coefficient vector of the wrong length.
pub fn lp_feasible(nvars: usize, constraints: &[LinearConstraint]) -> LpOutcome {
    for c in constraints {
        assert_eq!(c.coeffs.len(), nvars, "constraint arity");
    }
    let has_strict = constraints.iter().any(|c| matches!(c.relation, Relation::Gt | Relation::Lt));

    // Columns: x⁺ (nvars), x⁻ (nvars), ε (if strict), then one slack per
    // inequality row and one for the ε ≤ 1 row.
    let n_ineq = constraints.iter().filter(|c| c.relation != Relation::Eq).count() + usize::from(has_strict);
    let eps_col = 2 * nvars;
    let first_slack = 2 * nvars + usize::from(has_strict);
    let ncols = first_slack + n_ineq;

    let mut a = Vec::with_capacity(constraints.len() + 1);
    let mut b = Vec::with_capacity(constraints.len() + 1);
    let mut slack = first_slack;
    for c in constraints {
        let mut row = vec![Rational::zero(); ncols];
        for (j, coef) in c.coeffs.iter().enumerate() {
            row[j] = coef.clone();
            row[nvars + j] = -coef.clone();
        }
        match c.relation {
            Relation::Eq => {}
            Relation::Ge | Relation::Gt => {
                row[slack] = -Rational::one();
                slack += 1;
                if c.relation == Relation::Gt {
                    row[eps_col] = -Rational::one();
                }
            }
            Relation::Le | Relation::Lt => {
                row[slack] = Rational::one();
                slack += 1;
                if c.relation == Relation::Lt {
                    row[eps_col] = Rational::one();
                }
            }
        }
        a.push(row);
        b.push(c.rhs.clone());
    }
    let mut objective = vec![Rational::zero(); ncols];
    if has_strict {
        let mut row = vec![Rational::zero(); ncols];
        row[eps_col] = Rational::one();
        row[slack] = Rational::one();
        a.push(row);
        b.push(Rational::one());
        objective[eps_col] = Rational::one();
    }

    match maximize(a, b, &objective) {
        Simplex::Infeasible => LpOutcome::Infeasible,
        Simplex::Optimal(y) => {
            if has_strict && !y[eps_col].is_positive() {
                return LpOutcome::Infeasible;
            }
            let x = (0..nvars).map(|j| &y[j] - &y[nvars + j]).collect();
            LpOutcome::Feasible(x)
        }
        // ε is bounded by 1, so the auxiliary objective cannot be unbounded
        // for a consistent system; treat it as the clamped optimum.
        Simplex::Unbounded(y) => {
            let x = (0..nvars).map(|j| &y[j] - &y[nvars + j]).collect();
            LpOutcome::Feasible(x)
        }
    }
}

enum Simplex {
    Infeasible,
    Optimal(Vec<Rational>),
    Unbounded(Vec<Rational>),
}

struct Tableau {
    // rows × (ncols + 1); last column is the right-hand side
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Rational]) {
        let inv = Rational::one() / &self.t[r][c];
        for x in self.t[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (x, p) in obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule on the reduced-cost row `obj` (entries `z_j − c_j`).
    /// Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [Rational], allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let rhs = self.ncols;
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, enter, obj),
                None => return false,
            }
        }
    }

    fn solution(&self, ncols: usize) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); ncols];
        for (i, &bj) in self.basis.iter().enumerate() {
            if bj < ncols {
                y[bj] = self.t[i][self.ncols].clone();
            }
        }
        y
    }
}

/// maximize `c·y` subject to `A y = b`, `y ≥ 0`.
fn maximize(a: Vec<Vec<Rational>>, b: Vec<Rational>, c: &[Rational]) -> Simplex {
    let m = a.len();
    let n = c.len();
    let total = n + m;
    let mut t = Vec::with_capacity(m);
    for (i, (mut row, mut rhs)) in a.into_iter().zip(b).enumerate() {
        if rhs.is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
            rhs = -rhs;
        }
        row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        row.push(rhs);
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (n..total).collect(), ncols: total };

    // phase one: maximize −Σ artificials
    let mut obj = vec![Rational::zero(); total + 1];
    for row in &tab.t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[total] -= &row[total];
    }
    tab.optimize(&mut obj, n);
    if obj[total].is_negative() {
        return Simplex::Infeasible;
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j, &mut obj),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // phase two on the original columns
    let mut obj = vec![Rational::zero(); total + 1];
    for j in 0..n {
        obj[j] = -c[j].clone();
    }
    for (row, &bj) in tab.t.iter().zip(&tab.basis) {
        if c[bj].is_zero() {
            continue;
        }
        for j in 0..=total {
            if j < n || j == total {
                obj[j] += &c[bj] * &row[j];
            }
        }
    }
    if tab.optimize(&mut obj, n) {
        Simplex::Optimal(tab.solution(n))
    } else {
        Simplex::Unbounded(tab.solution(n))
    }
}
