use super::rng::RngStream;
use super::tail::TailReport;
use super::trials::run_trials;
use crate::error::{invalid, Result};

/// Scalar Bernstein bound for `|Σ_{i≤m} X_i|` with `|X_i| ≤ 1`, `E X_i² ≤ V₀²`:
/// `2 exp(−t²/(4mV₀²))` for `t ≤ 2mV₀²`, else `2 exp(−t/2)`.
pub fn scalar_bernstein_bound(m: usize, v0_sq: f64, t: f64) -> f64 {
    let mv = m as f64 * v0_sq;
    if t <= 2.0 * mv {
        2.0 * (-(t * t) / (4.0 * mv)).exp()
    } else {
        2.0 * (-t / 2.0).exp()
    }
}

/// Frequency of `|ε_1 + … + ε_m| > t` for Rademacher signs, trial `i` on substream `i`.
pub fn rademacher_tail_experiment(m: usize, ts: &[f64], trials: usize, rng: &RngStream) -> Result<TailReport> {
    if m == 0 || trials == 0 {
        return Err(invalid("m and trials must be positive"));
    }
    let sums = run_trials(rng, trials, |_, r| (0..m).map(|_| r.rademacher()).sum::<f64>().abs());
    let empirical = ts
        .iter()
        .map(|&t| sums.iter().filter(|&&s| s > t).count() as f64 / trials as f64)
        .collect();
    TailReport::new(
        ts.to_vec(),
        empirical,
        ts.iter().map(|&t| scalar_bernstein_bound(m, 1.0, t)).collect(),
        trials,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert!((scalar_bernstein_bound(100, 1.0, 20.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((scalar_bernstein_bound(10, 1.0, 30.0) - 2.0 * (-15.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rademacher_below_bound() {
        let rep = rademacher_tail_experiment(100, &[10.0, 20.0], 10_000, &RngStream::new(1, 0)).unwrap();
        assert!(rep.violations().is_empty());
        assert!(rep.empirical[1] < rep.bound[1]);
    }
}
