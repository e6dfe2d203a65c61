use serde::{Deserialize, Serialize};

use super::stats::three_sigma_half_width;
use crate::error::{invalid, Result};
use crate::linalg::io::format_float;

/// Empirical tail frequencies next to a bound, one row per threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub thresholds: Vec<f64>,
    pub empirical: Vec<f64>,
    pub bound: Vec<f64>,
    pub trials: usize,
}

impl TailReport {
    pub fn new(thresholds: Vec<f64>, empirical: Vec<f64>, bound: Vec<f64>, trials: usize) -> Result<Self> {
        if empirical.len() != thresholds.len() || bound.len() != thresholds.len() {
            return Err(invalid("tail report columns differ in length"));
        }
        if empirical.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(invalid("empirical frequency outside [0, 1]"));
        }
        if trials == 0 {
            return Err(invalid("tail report needs at least one trial"));
        }
        Ok(Self {
            thresholds,
            empirical,
            bound,
            trials,
        })
    }

    /// Builds frequencies `#{s >= t} / trials` from raw statistics.
    pub fn from_samples(samples: &[f64], thresholds: &[f64], bound: impl Fn(f64) -> f64) -> Result<Self> {
        let trials = samples.len();
        let empirical = thresholds
            .iter()
            .map(|&t| samples.iter().filter(|&&s| s >= t).count() as f64 / trials.max(1) as f64)
            .collect();
        Self::new(
            thresholds.to_vec(),
            empirical,
            thresholds.iter().map(|&t| bound(t)).collect(),
            trials,
        )
    }

    pub fn half_width(&self, i: usize) -> f64 {
        three_sigma_half_width(self.empirical[i], self.trials)
    }

    /// Indices where the empirical frequency exceeds bound plus three-sigma.
    pub fn violations(&self) -> Vec<usize> {
        (0..self.thresholds.len())
            .filter(|&i| self.empirical[i] > self.bound[i] + self.half_width(i))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,empirical,bound,trials\n");
        for i in 0..self.thresholds.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                format_float(self.thresholds[i]),
                format_float(self.empirical[i]),
                format_float(self.bound[i]),
                self.trials
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies_from_samples() {
        let r = TailReport::from_samples(&[0.0, 1.0, 2.0, 3.0], &[1.0, 2.5], |_| 0.5).unwrap();
        assert_eq!(r.empirical, vec![0.75, 0.25]);
        assert!(r.violations().is_empty());
        let tight = TailReport::new(vec![1.0], vec![0.75], vec![0.1], 10_000).unwrap();
        assert_eq!(tight.violations(), vec![0]);
    }

    #[test]
    fn rejects_bad_columns() {
        assert!(TailReport::new(vec![1.0], vec![], vec![1.0], 1).is_err());
        assert!(TailReport::new(vec![1.0], vec![1.5], vec![1.0], 1).is_err());
    }
}
