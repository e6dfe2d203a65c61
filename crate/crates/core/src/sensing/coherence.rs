use serde::{Deserialize, Serialize};

use super::basis::OperatorBasis;
use super::tangent::TangentProjector;
use crate::error::{Error, Result};
use crate::linalg::{inner_unchecked, operator_norm, sgn_default, DenseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    /// `n · max_a ‖X_a‖²`.
    pub nu_basis: f64,
    /// `(max_a ‖𝒫_T X_a‖_F² · n/(2r), max_a ⟨X_a, sgn A⟩² · n²/r)`.
    pub nu_pair: (f64, f64),
    /// `(n/r) · max_i ‖P_U e_i‖²`, entry basis only.
    pub mu1: Option<f64>,
    /// `(n/√r) · max_ij |sgn(A)_ij|`, entry basis only.
    pub mu2: Option<f64>,
    /// `max_a ‖𝒫_T X_a‖_F²`.
    pub max_tangent_sq: f64,
}

impl CoherenceReport {
    /// Smallest `ν` admissible for both conditions of the pair route.
    pub fn nu_pair_max(&self) -> f64 {
        self.nu_pair.0.max(self.nu_pair.1)
    }
}

pub fn coherence(basis: &OperatorBasis, a: &DenseMatrix, p: &TangentProjector) -> Result<CoherenceReport> {
    let n = basis.n();
    if a.shape() != (n, n) || p.n() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            found: a.shape(),
        });
    }
    let r = p.rank() as f64;
    let nf = n as f64;
    let sg = sgn_default(&a.symmetrized())?;

    let mut max_op_sq: f64 = 0.0;
    let mut max_tangent_sq: f64 = 0.0;
    let mut max_sgn_sq: f64 = 0.0;
    for idx in 0..basis.len() {
        let x = basis.element(idx);
        let op = if basis.is_entry() { 1.0 } else { operator_norm(&x)? };
        max_op_sq = max_op_sq.max(op * op);
        max_tangent_sq = max_tangent_sq.max(p.project(&x)?.frobenius_norm().powi(2));
        max_sgn_sq = max_sgn_sq.max(inner_unchecked(&x, &sg).powi(2));
    }

    let (mu1, mu2) = if basis.is_entry() {
        let pu = p.p_u();
        // ‖P_U e_i‖² = (P_U)_ii for an orthogonal projector
        let mu1 = (0..n).map(|i| pu[(i, i)]).fold(0.0, f64::max) * nf / r;
        let mu2 = sg.max_abs() * nf / r.sqrt();
        (Some(mu1), Some(mu2))
    } else {
        (None, None)
    };

    Ok(CoherenceReport {
        nu_basis: nf * max_op_sq,
        nu_pair: (max_tangent_sq * nf / (2.0 * r), max_sgn_sq * nf * nf / r),
        mu1,
        mu2,
        max_tangent_sq,
    })
}
