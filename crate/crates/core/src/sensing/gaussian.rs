use crate::error::{invalid, Result};
use crate::linalg::{inner_unchecked, DenseMatrix};
use crate::prob::{RngStream, TailReport};

/// Linear map `A ↦ (⟨X_j, A⟩_F)_j`; Gaussian when built by [`gaussian_map_new`].
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMap {
    rows: usize,
    cols: usize,
    mats: Vec<DenseMatrix>,
    /// `(seed, stream_id)` of the generating stream, if random.
    pub origin: Option<(u64, u64)>,
}

/// `m` matrices of shape `n × big_n` with i.i.d. `N(0, 1/m)` entries.
pub fn gaussian_map_new(rng: &mut RngStream, m: usize, n: usize, big_n: usize) -> Result<GaussianMap> {
    if m == 0 || n == 0 || big_n == 0 {
        return Err(invalid("gaussian map dimensions must be positive"));
    }
    let origin = Some((rng.seed(), rng.stream_id()));
    let s = 1.0 / (m as f64).sqrt();
    let mats = (0..m)
        .map(|_| DenseMatrix::from_fn(n, big_n, |_, _| rng.normal() * s))
        .collect();
    Ok(GaussianMap {
        rows: n,
        cols: big_n,
        mats,
        origin,
    })
}

impl GaussianMap {
    /// Map with the given measurement matrices.
    pub fn from_matrices(mats: Vec<DenseMatrix>) -> Result<Self> {
        let (rows, cols) = mats.first().map(|x| x.shape()).ok_or(crate::Error::Empty)?;
        for x in &mats {
            if x.shape() != (rows, cols) {
                return Err(crate::Error::ShapeMismatch {
                    expected: (rows, cols),
                    found: x.shape(),
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            mats,
            origin: None,
        })
    }

    pub fn m(&self) -> usize {
        self.mats.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn matrices(&self) -> &[DenseMatrix] {
        &self.mats
    }

    /// `Σ_j c_j X_j`.
    pub fn adjoint(&self, c: &[f64]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for (x, cj) in self.mats.iter().zip(c) {
            out.axpy(*cj, x);
        }
        out
    }
}

pub fn apply_map(map: &GaussianMap, a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.shape() != map.shape() {
        return Err(crate::Error::ShapeMismatch {
            expected: map.shape(),
            found: a.shape(),
        });
    }
    Ok(map.mats.iter().map(|x| inner_unchecked(x, a)).collect())
}

/// `2 exp(-(m/2)(t²/2 - t³/3))`.
pub fn fixed_vector_bound(m: usize, t: f64) -> f64 {
    2.0 * (-(m as f64 / 2.0) * (t * t / 2.0 - t.powi(3) / 3.0)).exp()
}

/// Samples of `|‖Ax‖² - 1|` for fresh `m × n` Gaussian `A` (entries `N(0, 1/m)`)
/// and a fixed unit `x`.
pub fn isometry_deviation_samples(m: usize, x: &[f64], trials: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if m == 0 || x.is_empty() {
        return Err(invalid("m and dimension must be positive"));
    }
    let s = 1.0 / (m as f64).sqrt();
    Ok((0..trials)
        .map(|_| {
            let sq: f64 = (0..m)
                .map(|_| x.iter().map(|xi| xi * rng.normal() * s).sum::<f64>().powi(2))
                .sum();
            (sq - 1.0).abs()
        })
        .collect())
}

/// Frequency of `|‖Ae₁‖² - 1| ≥ t` against `2 exp(-(m/2)(t²/2 - t³/3))`.
pub fn fixed_vector_isometry_experiment(
    m: usize,
    n: usize,
    trials: usize,
    ts: &[f64],
    rng: &mut RngStream,
) -> Result<TailReport> {
    if ts.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(invalid("thresholds must lie in (0, 1)"));
    }
    if n == 0 || trials == 0 {
        return Err(invalid("n and trials must be positive"));
    }
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let samples = isometry_deviation_samples(m, &e1, trials, rng)?;
    TailReport::from_samples(&samples, ts, |t| fixed_vector_bound(m, t))
}
