use super::decomp::{default_rank_tol, svd, sym_eig, SvdFactors, SYMMETRY_TOL};
use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::prob::RngStream;

/// `Σ_{jk} A_jk B_jk`.
pub fn frobenius_inner(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum())
}

pub(crate) fn inner_unchecked(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd(a, 0.0)?.sigmas)
}

/// Schatten-p (quasi-)norm; `p = f64::INFINITY` gives the operator norm.
pub fn schatten_norm(a: &DenseMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Schatten exponent must be positive, got {p}"
        )));
    }
    let s = singular_values(a)?;
    Ok(schatten_from_sigmas(&s, p))
}

pub(crate) fn schatten_from_sigmas(s: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        s.first().copied().unwrap_or(0.0)
    } else if p == 1.0 {
        s.iter().sum()
    } else {
        s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

pub fn nuclear_norm(a: &DenseMatrix) -> Result<f64> {
    schatten_norm(a, 1.0)
}

pub fn operator_norm(a: &DenseMatrix) -> Result<f64> {
    schatten_norm(a, f64::INFINITY)
}

/// Spectral norm of a symmetric matrix as `max |λ_j|`.
pub fn sym_operator_norm(s: &DenseMatrix) -> Result<f64> {
    let e = sym_eig(s)?;
    Ok(e.max().abs().max(e.min().abs()))
}

/// `sgn(A) = Σ_{j < numerical_rank} u_j v_jᵀ`.
pub fn sgn(a: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let f = svd(a, rank_tol)?;
    Ok(sgn_from_factors(&f))
}

pub fn sgn_default(a: &DenseMatrix) -> Result<DenseMatrix> {
    sgn(a, default_rank_tol(a))
}

pub(crate) fn sgn_from_factors(f: &SvdFactors) -> DenseMatrix {
    let r = f.numerical_rank;
    let mut j = 0;
    f.reconstruct_with(|_| {
        let w = if j < r { 1.0 } else { 0.0 };
        j += 1;
        w
    })
}

fn check_symmetric(s: &DenseMatrix) -> Result<()> {
    if !s.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (s.rows(), s.rows()),
            found: s.shape(),
        });
    }
    let asym = s.asymmetry();
    if asym > SYMMETRY_TOL * s.frobenius_norm().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}

/// Matrix exponential of a symmetric matrix through its eigendecomposition.
pub fn sym_expm(s: &DenseMatrix) -> Result<DenseMatrix> {
    check_symmetric(s)?;
    Ok(sym_eig(s)?.apply_fn(f64::exp))
}

/// Principal logarithm of a symmetric positive definite matrix.
pub fn sym_logm(s: &DenseMatrix) -> Result<DenseMatrix> {
    check_symmetric(s)?;
    let e = sym_eig(s)?;
    if e.min() <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: e.min(),
        });
    }
    Ok(e.apply_fn(f64::ln))
}

/// Exponential of a general square matrix: Taylor series on `A / 2^s`
/// with `‖A‖_F / 2^s ≤ 1/2`, then `s` squarings.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (a.rows(), a.rows()),
            found: a.shape(),
        });
    }
    let norm = a.frobenius_norm();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let scaled = a.scale(1.0 / 2f64.powi(squarings as i32));
    let n = a.rows();
    let mut sum = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=24 {
        term = (&term * &scaled).scale(1.0 / k as f64);
        sum += &term;
        if term.max_abs() < 1e-18 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// `(Σ_j |σ_j(A) − σ_j(B)|, Σ_j σ_j(A − B))`; the first never exceeds the
/// second.
pub fn singular_triangle_gap(a: &DenseMatrix, b: &DenseMatrix) -> Result<(f64, f64)> {
    a.check_same_shape(b)?;
    let sa = singular_values(a)?;
    let sb = singular_values(b)?;
    let lhs = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum();
    let rhs = nuclear_norm(&(a - b))?;
    Ok((lhs, rhs))
}

/// `(Σ_j |λ_j(A) − λ_j(B)|, ‖A − B‖_*)` for symmetric `A`, `B`.
pub fn eigenvalue_triangle_gap(a: &DenseMatrix, b: &DenseMatrix) -> Result<(f64, f64)> {
    a.check_same_shape(b)?;
    let la = sym_eig(a)?.lambdas;
    let lb = sym_eig(b)?.lambdas;
    let lhs = la.iter().zip(&lb).map(|(x, y)| (x - y).abs()).sum();
    let rhs = nuclear_norm(&(a - b))?;
    Ok((lhs, rhs))
}

/// Result of probing the dual characterization of the nuclear norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityProbe {
    /// Largest `⟨A, B⟩_F` over random `B` scaled to `‖B‖ = 1`.
    pub best_probe: f64,
    /// `⟨A, U Vᵀ⟩_F` for the singular vectors of `A`.
    pub exact: f64,
}

pub fn nuclear_duality_gap(a: &DenseMatrix, probes: usize, rng: &mut RngStream) -> Result<DualityProbe> {
    if probes == 0 {
        return Err(Error::InvalidArgument("probes must be >= 1".into()));
    }
    let f = svd(a, 0.0)?;
    let maximizer = f.reconstruct_with(|_| 1.0);
    let exact = inner_unchecked(a, &maximizer);
    let (rows, cols) = a.shape();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..probes {
        let b = DenseMatrix::from_raw(rows, cols, rng.normal_vec(rows * cols));
        let nb = operator_norm(&b)?;
        if nb == 0.0 {
            continue;
        }
        best = best.max(inner_unchecked(a, &b) / nb);
    }
    Ok(DualityProbe {
        best_probe: best,
        exact,
    })
}
