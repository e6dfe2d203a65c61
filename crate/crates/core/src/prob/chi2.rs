use serde::{Deserialize, Serialize};

use super::rng::RngStream;
use super::stats::{ks_distance, normal_cdf};
use super::tail::TailReport;
use super::trials::run_trials;
use crate::error::{invalid, Result};
use crate::linalg::norm2;

/// `E exp(λω²) = 1/sqrt(1 - 2λ)` for standard normal `ω`.
pub fn chi2_mgf(lambda: f64) -> Result<f64> {
    if !(lambda < 0.5) {
        return Err(invalid(format!("chi2 mgf diverges at lambda = {lambda}")));
    }
    Ok(1.0 / (1.0 - 2.0 * lambda).sqrt())
}

/// KS distance between samples of `Σ λ_i ω_i` and `‖λ‖₂·N(0,1)`.
pub fn two_stability_report(lambda_vec: &[f64], trials: usize, rng: &mut RngStream) -> Result<f64> {
    let scale = norm2(lambda_vec);
    if lambda_vec.is_empty() || scale == 0.0 {
        return Err(invalid("two-stability needs a nonzero coefficient vector"));
    }
    if trials < 10_000 {
        return Err(invalid(format!("two-stability needs at least 10^4 trials, got {trials}")));
    }
    let samples: Vec<f64> = (0..trials)
        .map(|_| lambda_vec.iter().map(|l| l * rng.normal()).sum())
        .collect();
    Ok(ks_distance(&samples, |x| normal_cdf(x / scale)))
}

/// `exp(-(m/2)(ε²/2 - ε³/3))`, shared by both χ² tails.
pub fn chi2_tail_bound(m: usize, eps: f64) -> f64 {
    (-(m as f64 / 2.0) * (eps * eps / 2.0 - eps.powi(3) / 3.0)).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chi2TailReport {
    /// Frequency of `Σω² ≥ (1+ε)m`.
    pub upper: TailReport,
    /// Frequency of `Σω² ≤ (1-ε)m`.
    pub lower: TailReport,
}

impl Chi2TailReport {
    /// `empirical ≤ bound + 3·sqrt(bound/trials) + 10/trials` on both tails.
    pub fn within_contract(&self) -> bool {
        [&self.upper, &self.lower].iter().all(|r| {
            (0..r.thresholds.len()).all(|i| {
                let n = r.trials as f64;
                r.empirical[i] <= r.bound[i] + 3.0 * (r.bound[i] / n).sqrt() + 10.0 / n
            })
        })
    }
}

pub fn chi2_tail_experiment(m: usize, eps: f64, trials: usize, rng: &mut RngStream) -> Result<Chi2TailReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    if m == 0 || trials == 0 {
        return Err(invalid("m and trials must be positive"));
    }
    let sums = run_trials(rng, trials, |_, r| (0..m).map(|_| r.normal().powi(2)).sum::<f64>());
    let mf = m as f64;
    let hi = (1.0 + eps) * mf;
    let lo = (1.0 - eps) * mf;
    let bound = chi2_tail_bound(m, eps);
    let n = trials as f64;
    let upper = sums.iter().filter(|&&s| s >= hi).count() as f64 / n;
    let lower = sums.iter().filter(|&&s| s <= lo).count() as f64 / n;
    Ok(Chi2TailReport {
        upper: TailReport::new(vec![hi], vec![upper], vec![bound], trials)?,
        lower: TailReport::new(vec![lo], vec![lower], vec![bound], trials)?,
    })
}
