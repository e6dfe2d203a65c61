use serde::{Deserialize, Serialize};

use super::affine::{AffineProjector, Measurement};
use super::svt::svt;
use crate::error::{invalid, Result};
use crate::linalg::{norm2, nuclear_norm, DenseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Douglas–Rachford step `γ`, the threshold handed to `svt`.
    pub step: f64,
    /// Constraint residual tolerance, relative to `‖y‖₂`.
    pub tol_residual: f64,
    /// Tolerance on `‖X_k − X_{k−1}‖_F / ‖X_k‖_F`.
    pub tol_change: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step: 1.0,
            tol_residual: 1e-9,
            tol_change: 1e-10,
            max_iter: 5000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.step > 0.0 && self.tol_residual > 0.0 && self.tol_change > 0.0 && self.max_iter >= 1;
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid solver config {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryReport {
    #[serde(skip)]
    pub solution: DenseMatrix,
    pub iterations: usize,
    pub constraint_residual: f64,
    /// `‖solution‖_*`.
    pub objective: f64,
    pub converged: bool,
}

/// Minimizes `‖Z‖_*` subject to `measure(Z) = y` by Douglas–Rachford
/// splitting:
/// `W = svt(U, γ)`, `X = P(2W − U)`, `U ← U + X − W`.
///
/// `X` is always feasible and is the returned iterate; the residual
/// `‖measure(W) − y‖` measures how far the low-rank half is from it.
pub fn complete(measurement: &Measurement, y: &[f64], cfg: &SolverConfig) -> Result<RecoveryReport> {
    cfg.validate()?;
    let proj = AffineProjector::new(measurement, y)?;
    let tol_res = cfg.tol_residual * norm2(y);
    let (rows, cols) = measurement.shape();
    let mut u = DenseMatrix::zeros(rows, cols);
    let mut x_prev: Option<DenseMatrix> = None;
    let mut best: Option<(f64, DenseMatrix, usize)> = None;

    for it in 1..=cfg.max_iter {
        let w = svt(&u, cfg.step)?;
        let reflected = &w.scale(2.0) - &u;
        let x = proj.project(&reflected)?;
        u += &(&x - &w);
        let residual = proj.residual(&w)?;
        let change = match &x_prev {
            Some(p) => (&x - p).frobenius_norm() / x.frobenius_norm().max(f64::MIN_POSITIVE),
            None => f64::INFINITY,
        };
        if best.as_ref().is_none_or(|b| residual < b.0) {
            best = Some((residual, x.clone(), it));
        }
        if residual <= tol_res && change <= cfg.tol_change {
            let objective = nuclear_norm(&x)?;
            return Ok(RecoveryReport {
                solution: x,
                iterations: it,
                constraint_residual: residual,
                objective,
                converged: true,
            });
        }
        x_prev = Some(x);
    }

    let (residual, x, _) = best.expect("at least one iteration ran");
    let objective = nuclear_norm(&x)?;
    Ok(RecoveryReport {
        solution: x,
        iterations: cfg.max_iter,
        constraint_residual: residual,
        objective,
        converged: false,
    })
}
