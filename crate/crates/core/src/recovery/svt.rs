use crate::error::{invalid, Result};
use crate::linalg::{svd, DenseMatrix};

/// Singular value soft-thresholding `U diag((σ − τ)₊) Vᵀ`, the proximal map
/// of `τ‖·‖_*`.
pub fn svt(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    if !(tau >= 0.0) {
        return Err(invalid(format!("threshold must be non-negative, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(a.clone());
    }
    let f = svd(a, 0.0)?;
    Ok(f.reconstruct_with(|s| (s - tau).max(0.0)))
}
