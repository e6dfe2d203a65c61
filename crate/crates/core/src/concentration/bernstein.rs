use serde::Serialize;

use super::ensembles::{ensemble_params, BernsteinParams, MatrixEnsemble};
use crate::error::{invalid, Result};
use crate::linalg::io::format_float;
use crate::linalg::{sym_eig, DenseMatrix};
use crate::prob::{run_trials, three_sigma_half_width, RngStream};

const EMPIRICAL_PARAM_SAMPLES: usize = 10_000;

/// `2n exp(−t²/(4mV₀²))` for `t ≤ 2mV₀²/c`, else `2n exp(−t/(2c))`.
pub fn theo_bern1_bound(n: usize, m: usize, v0_sq: f64, c: f64, t: f64) -> f64 {
    let mv = m as f64 * v0_sq;
    let nf = n as f64;
    if t <= 2.0 * mv / c {
        2.0 * nf * (-(t * t) / (4.0 * mv)).exp()
    } else {
        2.0 * nf * (-t / (2.0 * c)).exp()
    }
}

/// `2n exp(−(t²/2)/(σ² + Kt/3))`.
pub fn lieb_bernstein_bound(n: usize, sigma_sq: f64, k: f64, t: f64) -> f64 {
    2.0 * n as f64 * (-(t * t / 2.0) / (sigma_sq + k * t / 3.0)).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernsteinReport {
    pub thresholds: Vec<f64>,
    /// Frequency of `‖X_1 + … + X_m‖ > t`.
    pub empirical: Vec<f64>,
    pub bound_theo_bern1: Vec<f64>,
    pub bound_lieb: Vec<f64>,
    /// Pointwise minimum of the two bound curves.
    pub bound_min: Vec<f64>,
    /// `2mV₀²/c`, where the first bound switches regime.
    pub regime_split: f64,
    pub params: BernsteinParams,
    pub trials: usize,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl BernsteinReport {
    pub fn half_width(&self, i: usize) -> f64 {
        three_sigma_half_width(self.empirical[i], self.trials)
    }

    /// Thresholds where the empirical tail exceeds either bound plus three sigma.
    pub fn violations(&self) -> Vec<usize> {
        (0..self.thresholds.len())
            .filter(|&i| {
                let e = self.empirical[i] - self.half_width(i);
                e > self.bound_theo_bern1[i] || e > self.bound_lieb[i]
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,empirical,bound_theo_bern1,bound_lieb,bound_min,trials,n,m,seed\n");
        for i in 0..self.thresholds.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                format_float(self.thresholds[i]),
                format_float(self.empirical[i]),
                format_float(self.bound_theo_bern1[i]),
                format_float(self.bound_lieb[i]),
                format_float(self.bound_min[i]),
                self.trials,
                self.n,
                self.m,
                self.seed
            ));
        }
        out
    }
}

fn spectral_norm(s: &DenseMatrix) -> Result<f64> {
    if s.rows() == 1 {
        return Ok(s[(0, 0)].abs());
    }
    let e = sym_eig(s)?;
    Ok(e.max().abs().max(e.min().abs()))
}

/// Tail of `‖X_1 + … + X_m‖` over `trials` sums against both Bernstein
/// bounds, with `σ² = m·v0_sq`. Trial `i` uses substream `i`; parameters
/// that need estimating use the substream past the last trial.
pub fn bernstein_tail_experiment(
    e: &MatrixEnsemble,
    m: usize,
    ts: &[f64],
    trials: usize,
    rng: &RngStream,
) -> Result<BernsteinReport> {
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("thresholds must be positive"));
    }
    if m == 0 || trials == 0 {
        return Err(invalid("m and trials must be positive"));
    }
    e.validate()?;
    let n = e.dim();
    let params = ensemble_params(e, EMPIRICAL_PARAM_SAMPLES, &mut rng.substream(trials as u64))?.for_sum(m);
    let norms = run_trials(rng, trials, |_, r| {
        let mut acc = DenseMatrix::zeros(n, n);
        for _ in 0..m {
            e.accumulate(r, &mut acc);
        }
        spectral_norm(&acc)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let empirical = ts
        .iter()
        .map(|&t| norms.iter().filter(|&&s| s > t).count() as f64 / trials as f64)
        .collect();
    let b1: Vec<f64> = ts.iter().map(|&t| theo_bern1_bound(n, m, params.v0_sq, params.c, t)).collect();
    let bl: Vec<f64> = ts.iter().map(|&t| lieb_bernstein_bound(n, params.sigma_sq, params.k_bound, t)).collect();
    Ok(BernsteinReport {
        thresholds: ts.to_vec(),
        empirical,
        bound_min: b1.iter().zip(&bl).map(|(a, b)| a.min(*b)).collect(),
        bound_theo_bern1: b1,
        bound_lieb: bl,
        regime_split: 2.0 * m as f64 * params.v0_sq / params.c,
        params,
        trials,
        n,
        m,
        seed: rng.seed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{rademacher_tail_experiment, scalar_bernstein_bound};

    #[test]
    fn single_identity_draw() {
        let e = MatrixEnsemble::RademacherWeighted(vec![DenseMatrix::identity(3)]);
        let rep = bernstein_tail_experiment(&e, 1, &[0.5], 200, &RngStream::new(0, 0)).unwrap();
        assert_eq!(rep.empirical, vec![1.0]);
        assert!(rep.bound_theo_bern1[0] >= 1.0 && rep.bound_lieb[0] >= 1.0);
        assert!(rep.violations().is_empty());
    }

    #[test]
    fn scalar_reduction_is_exact() {
        let e = MatrixEnsemble::RademacherWeighted(vec![DenseMatrix::identity(1)]);
        let ts = [10.0, 20.0];
        let rng = RngStream::new(3, 0);
        let mat = bernstein_tail_experiment(&e, 100, &ts, 2000, &rng).unwrap();
        let scalar = rademacher_tail_experiment(100, &ts, 2000, &rng).unwrap();
        assert_eq!(mat.empirical, scalar.empirical);
        for (i, &t) in ts.iter().enumerate() {
            assert_eq!(theo_bern1_bound(1, 100, 1.0, 1.0, t), scalar_bernstein_bound(100, 1.0, t));
            assert_eq!(mat.bound_theo_bern1[i], scalar.bound[i]);
        }
    }

    #[test]
    fn regime_split_is_continuous_in_form() {
        let (n, m, v, c) = (4, 50, 0.5, 2.0);
        let split = 2.0 * m as f64 * v / c;
        let below = theo_bern1_bound(n, m, v, c, split);
        let above = theo_bern1_bound(n, m, v, c, split + 1e-12);
        assert!((below - above).abs() < 1e-9);
    }

    #[test]
    fn dyads_below_both_bounds() {
        let e = MatrixEnsemble::RandomDyad(4);
        let rep = bernstein_tail_experiment(&e, 50, &[6.0, 9.0, 12.0], 2000, &RngStream::new(4, 0)).unwrap();
        assert!(rep.violations().is_empty(), "{rep:?}");
        assert_eq!(rep.to_csv().lines().count(), 4);
    }
}
