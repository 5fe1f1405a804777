//! Sparse multivariate polynomials with exact Gaussian-rational coefficients.
//!
//! A [`SparsePoly`] stores only its nonzero terms, keyed by exponent vector.
//! Exact storage keeps the Newton-polytope logic combinatorial; numeric work
//! goes through [`SparsePoly::evaluate`] and [`PolyMap::jacobian`], which
//! convert to `f64` complex arithmetic.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::latgeom::{Face, LatticePoint};
use crate::linalg::ComplexMatrix;
use crate::scalar::{GaussRational, Rational};

pub use parse::{parse_poly, ParseError, ParseErrorKind};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("face point {0:?} is not in the support")]
    FaceNotInSupport(LatticePoint),
    #[error("the zero polynomial has no Newton polyhedron")]
    ZeroPolynomial,
    #[error("a polynomial map needs 1 <= m < n, got m = {m}, n = {n}")]
    BadMapShape { m: usize, n: usize },
}

/// Exponent vector of a monomial. Ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zero(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self(e)
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn to_point(&self) -> LatticePoint {
        self.0.iter().map(|&e| i64::from(e)).collect()
    }

    /// Inverse of [`to_point`](Self::to_point); `None` on negative entries.
    pub fn from_point(p: &[i64]) -> Option<Self> {
        p.iter().map(|&e| u32::try_from(e).ok()).collect::<Option<Vec<_>>>().map(Self)
    }

    fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial as a map from exponents to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<ExponentVector, GaussRational>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(ExponentVector::zero(nvars), c);
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(ExponentVector::unit(nvars, i), GaussRational::from_int(1));
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, GaussRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::DimensionMismatch { expected: nvars, got: e.len() });
            }
            p.add_term(ExponentVector(e), c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<ExponentVector, GaussRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> Option<&GaussRational> {
        self.terms.get(e)
    }

    /// Value at the origin, i.e. the constant coefficient.
    pub fn constant_term(&self) -> GaussRational {
        self.terms.get(&ExponentVector::zero(self.nvars)).cloned().unwrap_or_default()
    }

    /// `supp(f)`: exponents with nonzero coefficient, in graded-lex order.
    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    pub fn support_points(&self) -> Vec<LatticePoint> {
        self.terms.keys().map(ExponentVector::to_point).collect()
    }

    pub fn degree(&self) -> u64 {
        self.terms.keys().map(ExponentVector::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: ExponentVector, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, GaussRational::from_int(1));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.scale(q));
        }
        out
    }

    /// Multiplies by the variable `x_i`.
    pub fn mul_var(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e.0[i] += 1;
            out.add_term(e, c.clone());
        }
        out
    }

    /// Evaluates `Σ a_α z^α` in floating-point complex arithmetic.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64, PolyError> {
        if z.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: z.len() });
        }
        Ok(self.to_numeric().eval(z))
    }

    /// Evaluates at an exact point; no rounding happens.
    pub fn evaluate_exact(&self, z: &[GaussRational]) -> Result<GaussRational, PolyError> {
        if z.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: z.len() });
        }
        let mut acc = GaussRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in z.iter().zip(&e.0) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to variable `i` (0-based).
    pub fn partial(&self, i: usize) -> Result<Self, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut d = e.clone();
            d.0[i] -= 1;
            out.add_term(d, c.scale(&crate::scalar::rat(i64::from(k))));
        }
        Ok(out)
    }

    /// `f_Δ = Σ_{α∈Δ} a_α z^α`. The face may contain the origin even when
    /// `f` has no constant term; any other point must lie in the support.
    pub fn face_restriction(&self, face: &Face) -> Result<Self, PolyError> {
        self.restrict_to_points(&face.points)
    }

    pub fn restrict_to_points(&self, points: &[LatticePoint]) -> Result<Self, PolyError> {
        let mut out = Self::zero(self.nvars);
        for p in points {
            if p.len() != self.nvars {
                return Err(PolyError::DimensionMismatch { expected: self.nvars, got: p.len() });
            }
            let e = ExponentVector::from_point(p).ok_or_else(|| PolyError::FaceNotInSupport(p.clone()))?;
            match self.terms.get(&e) {
                Some(c) => out.add_term(e, c.clone()),
                None if e.is_origin() => {}
                None => return Err(PolyError::FaceNotInSupport(p.clone())),
            }
        }
        Ok(out)
    }

    pub fn to_numeric(&self) -> NumericPoly {
        NumericPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.0.clone(), c.to_complex())).collect(),
        }
    }

    /// Canonical text form using variable names `vars`; re-parses to the
    /// same term map.
    pub fn to_string_with(&self, vars: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { vars[i].to_string() } else { format!("{}^{}", vars[i], p) })
                .collect();
            let (negative, magnitude) = if c.is_real() && c.re < Rational::zero() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            let coeff_one = magnitude == GaussRational::from_int(1);
            let body = if mono.is_empty() {
                magnitude.to_string()
            } else if coeff_one {
                mono.join("*")
            } else {
                format!("{}*{}", magnitude, mono.join("*"))
            };
            match (k, negative) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        out
    }
}

/// Floating-point copy of a polynomial for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct NumericPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl NumericPoly {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(z).fold(*c, |acc, (&p, zi)| if p == 0 { acc } else { acc * zi.powu(p) })
            })
            .sum()
    }
}

/// `F = (F_1, …, F_m)` on `C^n` with `1 <= m < n`.
#[derive(Clone, Debug)]
pub struct PolyMap {
    components: Vec<SparsePoly>,
    vars: Vec<String>,
    numeric: Vec<NumericPoly>,
    // partials[j][i] = ∂F_j/∂x_i
    partials: Vec<Vec<NumericPoly>>,
}

impl PolyMap {
    pub fn new(components: Vec<SparsePoly>) -> Result<Self, PolyError> {
        let m = components.len();
        let n = components.first().map_or(0, SparsePoly::nvars);
        if m == 0 || m >= n {
            return Err(PolyError::BadMapShape { m, n });
        }
        if let Some(bad) = components.iter().find(|c| c.nvars() != n) {
            return Err(PolyError::DimensionMismatch { expected: n, got: bad.nvars() });
        }
        let numeric = components.iter().map(SparsePoly::to_numeric).collect();
        let partials = components
            .iter()
            .map(|c| (0..n).map(|i| c.partial(i).expect("index in range").to_numeric()).collect())
            .collect();
        let vars = (1..=n).map(|i| format!("x{i}")).collect();
        Ok(Self { components, vars, numeric, partials })
    }

    /// Attaches variable names used when printing.
    ///
    /// # Panics
    /// If the number of names differs from the variable count.
    pub fn with_names(mut self, vars: &[&str]) -> Self {
        assert_eq!(vars.len(), self.nvars(), "variable name count");
        self.vars = vars.iter().map(|v| v.to_string()).collect();
        self
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    /// Formal Jacobian, `[j][i] = ∂F_j/∂x_i`.
    pub fn jacobian_polys(&self) -> Vec<Vec<SparsePoly>> {
        self.components
            .iter()
            .map(|c| (0..self.nvars()).map(|i| c.partial(i).expect("index in range")).collect())
            .collect()
    }

    /// All maximal (`m × m`) minors of the formal Jacobian, nonzero ones
    /// only, in lexicographic column order.
    pub fn jacobian_minor_polys(&self) -> Vec<SparsePoly> {
        let jac = self.jacobian_polys();
        let m = self.ncomponents();
        let rows: Vec<usize> = (0..m).collect();
        crate::linalg::combinations(self.nvars(), m)
            .into_iter()
            .map(|cols| poly_det(&jac, &rows, &cols))
            .filter(|p| !p.is_zero())
            .collect()
    }

    /// Parses each expression over the same ordered variable list.
    pub fn parse(exprs: &[&str], vars: &[&str]) -> Result<Self, MapParseError> {
        let comps = exprs
            .iter()
            .enumerate()
            .map(|(k, s)| parse_poly(s, vars).map_err(|e| MapParseError::Component(k, e)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(comps)?.with_names(vars))
    }

    pub fn nvars(&self) -> usize {
        self.components[0].nvars()
    }

    pub fn ncomponents(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SparsePoly] {
        &self.components
    }

    pub fn value_at_origin(&self) -> Vec<GaussRational> {
        self.components.iter().map(SparsePoly::constant_term).collect()
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
        self.check_len(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.numeric.iter().map(|p| p.eval(z)).collect()
    }

    /// `F(z)` computed exactly at the given floating-point point and rounded
    /// once. Plain evaluation of expanded polynomials loses digits to
    /// cancellation far from the origin. `None` for non-finite input.
    pub(crate) fn eval_exact_rounded(&self, z: &[Complex64]) -> Option<Vec<Complex64>> {
        let exact = z.iter().map(|&c| GaussRational::from_complex(c)).collect::<Option<Vec<_>>>()?;
        Some(
            self.components
                .iter()
                .map(|p| p.evaluate_exact(&exact).expect("length checked by caller").to_complex())
                .collect(),
        )
    }

    /// `J(F)(z)`, an `m × n` matrix with entry `(j, i) = ∂F_j/∂x_i (z)`.
    pub fn jacobian(&self, z: &[Complex64]) -> Result<ComplexMatrix, PolyError> {
        self.check_len(z)?;
        Ok(self.jacobian_unchecked(z))
    }

    pub(crate) fn jacobian_unchecked(&self, z: &[Complex64]) -> ComplexMatrix {
        let m = self.ncomponents();
        let n = self.nvars();
        ComplexMatrix::from_fn(m, n, |j, i| self.partials[j][i].eval(z))
    }

    fn check_len(&self, z: &[Complex64]) -> Result<(), PolyError> {
        if z.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars(), got: z.len() });
        }
        Ok(())
    }
}

/// Determinant of the square polynomial submatrix on `rows × cols` by
/// cofactor expansion along the first row.
fn poly_det(jac: &[Vec<SparsePoly>], rows: &[usize], cols: &[usize]) -> SparsePoly {
    let nvars = jac[rows[0]][cols[0]].nvars();
    if rows.len() == 1 {
        return jac[rows[0]][cols[0]].clone();
    }
    let mut acc = SparsePoly::zero(nvars);
    for (k, &c) in cols.iter().enumerate() {
        let entry = &jac[rows[0]][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = entry.mul(&poly_det(jac, &rows[1..], &rest));
        acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum MapParseError {
    #[error("component {0}: {1}")]
    Component(usize, ParseError),
    #[error(transparent)]
    Shape(#[from] PolyError),
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_string_with(&refs))
    }
}
