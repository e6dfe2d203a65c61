use serde::{Deserialize, Serialize};

use super::rng::RngStream;
use crate::error::{invalid, Error, Result};
use crate::linalg::io::{parse_rows, rows_to_csv};
use crate::linalg::norm2;

const WEIGHT_TOL: f64 = 1e-12;

/// Finite set of points in `R^dim`, optionally with probability weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
}

fn check_weights(w: &[f64], len: usize) -> Result<()> {
    if w.len() != len {
        return Err(invalid(format!("{} weights for {len} points", w.len())));
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(invalid("weights must be finite and non-negative"));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(invalid(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::Empty)?;
        if dim == 0 {
            return Err(Error::Empty);
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(invalid(format!("point {i} has dimension {}, expected {dim}", p.len())));
            }
            if let Some(j) = p.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        Ok(Self {
            dim,
            points,
            weights: None,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, self.points.len())?;
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// `Σ λ_j z_j`.
    pub fn convex_combination(&self, weights: &[f64]) -> Result<Vec<f64>> {
        check_weights(weights, self.len())?;
        let mut x = vec![0.0; self.dim];
        for (p, w) in self.points.iter().zip(weights) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += w * pi;
            }
        }
        Ok(x)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        Self::new(parse_rows(text)?)
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(self.points.iter().map(Vec::as_slice))
    }
}

/// `max_j ‖z_j‖₂`.
pub fn radius(set: &PointSet) -> f64 {
    set.points.iter().map(|p| norm2(p)).fold(0.0, f64::max)
}

/// Empirical mean of `n_points` i.i.d. draws from `target_weights`, and its
/// distance to the exact convex combination.
pub fn approx_caratheodory(
    set: &PointSet,
    target_weights: &[f64],
    n_points: usize,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, f64)> {
    if n_points == 0 {
        return Err(invalid("n_points must be positive"));
    }
    let x = set.convex_combination(target_weights)?;
    let mut cumulative = Vec::with_capacity(target_weights.len());
    let mut acc = 0.0;
    for w in target_weights {
        acc += w;
        cumulative.push(acc);
    }
    let last = set.len() - 1;
    let mut mean = vec![0.0; set.dim];
    for _ in 0..n_points {
        let u = rng.uniform() * acc;
        let j = cumulative.partition_point(|&c| c <= u).min(last);
        for (m, p) in mean.iter_mut().zip(&set.points[j]) {
            *m += p;
        }
    }
    for m in &mut mean {
        *m /= n_points as f64;
    }
    let err = norm2(&mean.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok((mean, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize) -> PointSet {
        PointSet::new((0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect()).unwrap()
    }

    #[test]
    fn radius_examples() {
        assert_eq!(radius(&PointSet::new(vec![vec![0.0]]).unwrap()), 0.0);
        assert_eq!(radius(&basis(4)), 1.0);
        assert_eq!(radius(&PointSet::new(vec![vec![3.0, 4.0]]).unwrap()), 5.0);
    }

    #[test]
    fn validation() {
        assert!(PointSet::new(vec![]).is_err());
        assert!(PointSet::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(PointSet::new(vec![vec![f64::NAN]]).is_err());
        assert!(basis(2).with_weights(vec![0.5, 0.6]).is_err());
        assert!(basis(2).with_weights(vec![1.5, -0.5]).is_err());
        assert!(basis(2).with_weights(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn single_point_is_exact() {
        let set = PointSet::new(vec![vec![1.0, -2.0]]).unwrap();
        let mut r = RngStream::new(0, 0);
        for n in [1, 7, 100] {
            assert_eq!(approx_caratheodory(&set, &[1.0], n, &mut r).unwrap().1, 0.0);
        }
    }

    #[test]
    fn two_point_mean_square_error() {
        let set = PointSet::new(vec![vec![-1.0], vec![1.0]]).unwrap();
        let mut r = RngStream::new(1, 0);
        let n = 25;
        let reps = 20_000;
        let mse = (0..reps)
            .map(|_| approx_caratheodory(&set, &[0.5, 0.5], n, &mut r).unwrap().1.powi(2))
            .sum::<f64>()
            / reps as f64;
        assert!((mse * n as f64 - 1.0).abs() < 0.05, "{mse}");
    }

    #[test]
    fn csv_round_trip() {
        let set = basis(3);
        assert_eq!(PointSet::from_csv(&set.to_csv()).unwrap(), set);
    }
}
