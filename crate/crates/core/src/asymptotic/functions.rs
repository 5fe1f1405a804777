use num_complex::Complex64;

use crate::linalg::{minors, vec_norm, ComplexMatrix};
use crate::poly::PolyMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixFunctionError {
    #[error("empty matrix")]
    Empty,
    #[error("expected rows <= cols, got {rows} x {cols}")]
    TooManyRows { rows: usize, cols: usize },
}

fn check_shape(j: &ComplexMatrix) -> Result<(), MatrixFunctionError> {
    if j.is_empty() {
        return Err(MatrixFunctionError::Empty);
    }
    if j.rows() > j.cols() {
        return Err(MatrixFunctionError::TooManyRows { rows: j.rows(), cols: j.cols() });
    }
    Ok(())
}

/// Rabier's function `ν(A) = inf_{‖ω‖=1} ‖Σ ω_i grad F_i‖`.
///
/// The map `ω ↦ Σ ω_i grad F_i` is the adjoint of `A`, so `ν` is the
/// smallest (`m`-th) singular value of the `m × n` matrix.
pub fn nu(j: &ComplexMatrix) -> Result<f64, MatrixFunctionError> {
    check_shape(j)?;
    Ok(j.svd().min())
}

/// Gaffney number: root-sum-square of the `m × m` minors over that of all
/// `(m-1) × (m-1)` minors (any deleted row, any column set). For `m = 1` the
/// denominator is `1`, so `g = ‖A‖`. Returns `0` when the denominator
/// vanishes.
pub fn gaffney(j: &ComplexMatrix) -> Result<f64, MatrixFunctionError> {
    check_shape(j)?;
    let m = j.rows();
    let top: f64 = minors(j, m).iter().map(Complex64::norm_sqr).sum();
    if m == 1 {
        return Ok(top.sqrt());
    }
    let bottom: f64 = minors(j, m - 1).iter().map(Complex64::norm_sqr).sum();
    if bottom == 0.0 {
        return Ok(0.0);
    }
    Ok((top / bottom).sqrt())
}

/// Numerical rank test: `σ_min < 1e-8 · (σ_max + 1)`.
pub fn is_rank_deficient(singular_values: &[f64]) -> bool {
    let max = singular_values.first().copied().unwrap_or(0.0);
    let min = singular_values.last().copied().unwrap_or(0.0);
    min < RANK_TOL * (max + 1.0)
}

pub const RANK_TOL: f64 = 1e-8;

/// Stacks `J(F)(p)` over the conjugated position `p̄`, each nonzero row
/// scaled to unit length, and returns the `(m+1)`-th singular value. Zero
/// exactly when `rank [J(F)(p); p̄] ≤ m`. At `p = 0` the position row is
/// omitted and `ν(J(F)(0))` is returned.
pub fn mtame_deficiency(f: &PolyMap, p: &[Complex64]) -> f64 {
    let jac = f.jacobian_unchecked(p);
    let pn = vec_norm(p);
    if pn == 0.0 {
        return jac.svd().min();
    }
    let mut stacked = ComplexMatrix::zeros(0, p.len());
    for r in 0..jac.rows() {
        let row = jac.row(r);
        let norm = vec_norm(row);
        if norm > 0.0 {
            let unit: Vec<Complex64> = row.iter().map(|x| x / norm).collect();
            stacked.push_row(&unit);
        } else {
            stacked.push_row(row);
        }
    }
    let conj: Vec<Complex64> = p.iter().map(|x| x.conj() / pn).collect();
    stacked.push_row(&conj);
    stacked.svd().min()
}
