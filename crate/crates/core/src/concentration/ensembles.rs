use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{sym_operator_norm, DenseMatrix};
use crate::prob::RngStream;

/// Zero-mean symmetric random matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixEnsemble {
    /// `ε·B_J`, `ε` a Rademacher sign and `J` uniform over the list.
    RademacherWeighted(Vec<DenseMatrix>),
    /// `g·B_J`, `g` standard normal and `J` uniform over the list.
    GaussianWeighted(Vec<DenseMatrix>),
    /// `ε·uuᵀ` with `u` uniform on the unit sphere of `R^n`.
    RandomDyad(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinParams {
    /// Bound on `‖E X²‖`.
    pub v0_sq: f64,
    /// Almost-sure bound on `‖X‖` (sample maximum when estimated).
    pub c: f64,
    /// `‖Σ_j E X_j²‖` for the sum the params describe.
    pub sigma_sq: f64,
    /// Almost-sure bound `K` on each `‖X_j‖`.
    pub k_bound: f64,
    /// Sample count when estimated empirically.
    pub samples: Option<usize>,
}

impl BernsteinParams {
    /// Parameters of a sum of `m` i.i.d. copies: `σ² = m·v0_sq`.
    pub fn for_sum(&self, m: usize) -> Self {
        Self {
            sigma_sq: self.v0_sq * m as f64,
            ..*self
        }
    }
}

fn check_list(mats: &[DenseMatrix]) -> Result<usize> {
    let n = mats.first().ok_or(crate::Error::Empty)?.rows();
    for b in mats {
        if b.shape() != (n, n) {
            return Err(crate::Error::ShapeMismatch {
                expected: (n, n),
                found: b.shape(),
            });
        }
        if b.asymmetry() > 1e-12 * b.frobenius_norm().max(1.0) {
            return Err(crate::Error::NotSymmetric {
                asymmetry: b.asymmetry(),
            });
        }
    }
    Ok(n)
}

impl MatrixEnsemble {
    pub fn validate(&self) -> Result<()> {
        match self {
            MatrixEnsemble::RademacherWeighted(m) | MatrixEnsemble::GaussianWeighted(m) => check_list(m).map(|_| ()),
            MatrixEnsemble::RandomDyad(0) => Err(invalid("dyad dimension must be positive")),
            MatrixEnsemble::RandomDyad(_) => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MatrixEnsemble::RademacherWeighted(m) | MatrixEnsemble::GaussianWeighted(m) => m[0].rows(),
            MatrixEnsemble::RandomDyad(n) => *n,
        }
    }

    fn pick<'a>(mats: &'a [DenseMatrix], rng: &mut RngStream) -> &'a DenseMatrix {
        if mats.len() == 1 {
            &mats[0]
        } else {
            &mats[rng.below(mats.len())]
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> DenseMatrix {
        match self {
            MatrixEnsemble::RademacherWeighted(m) => {
                let s = rng.rademacher();
                Self::pick(m, rng).scale(s)
            }
            MatrixEnsemble::GaussianWeighted(m) => {
                let g = rng.normal();
                Self::pick(m, rng).scale(g)
            }
            MatrixEnsemble::RandomDyad(n) => {
                let s = rng.rademacher();
                let u = rng.unit_vector(*n);
                DenseMatrix::outer(&u, &u).scale(s)
            }
        }
    }

    /// Adds one sample into `acc` without allocating for the dyad case.
    pub(crate) fn accumulate(&self, rng: &mut RngStream, acc: &mut DenseMatrix) {
        match self {
            MatrixEnsemble::RandomDyad(n) => {
                let s = rng.rademacher();
                let u = rng.unit_vector(*n);
                for i in 0..*n {
                    for j in 0..*n {
                        acc[(i, j)] += s * u[i] * u[j];
                    }
                }
            }
            MatrixEnsemble::RademacherWeighted(m) => {
                let s = rng.rademacher();
                acc.axpy(s, Self::pick(m, rng));
            }
            MatrixEnsemble::GaussianWeighted(m) => {
                let g = rng.normal();
                acc.axpy(g, Self::pick(m, rng));
            }
        }
    }
}

fn mean_square(mats: &[DenseMatrix]) -> DenseMatrix {
    let n = mats[0].rows();
    let mut acc = DenseMatrix::zeros(n, n);
    for b in mats {
        acc += &(b * b);
    }
    acc.scale(1.0 / mats.len() as f64)
}

/// Bernstein parameters of a single draw: analytic for Rademacher weights
/// and dyads, otherwise estimated from `empirical_samples` draws.
pub fn ensemble_params(e: &MatrixEnsemble, empirical_samples: usize, rng: &mut RngStream) -> Result<BernsteinParams> {
    e.validate()?;
    let analytic = |v0_sq: f64, c: f64| BernsteinParams {
        v0_sq,
        c,
        sigma_sq: v0_sq,
        k_bound: c,
        samples: None,
    };
    match e {
        MatrixEnsemble::RademacherWeighted(m) => {
            let v0_sq = sym_operator_norm(&mean_square(m).symmetrized())?;
            let c = m.iter().map(sym_operator_norm).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
            Ok(analytic(v0_sq, c))
        }
        MatrixEnsemble::RandomDyad(n) => Ok(analytic(1.0 / *n as f64, 1.0)),
        MatrixEnsemble::GaussianWeighted(_) => {
            if empirical_samples == 0 {
                return Err(invalid("empirical estimate needs samples"));
            }
            let n = e.dim();
            let mut sq = DenseMatrix::zeros(n, n);
            let mut c: f64 = 0.0;
            for _ in 0..empirical_samples {
                let x = e.sample(rng);
                c = c.max(sym_operator_norm(&x)?);
                sq += &(&x * &x);
            }
            let v0_sq = sym_operator_norm(&sq.scale(1.0 / empirical_samples as f64).symmetrized())?;
            Ok(BernsteinParams {
                v0_sq,
                c,
                sigma_sq: v0_sq,
                k_bound: c,
                samples: Some(empirical_samples),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_single_matrix() {
        let b = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = ensemble_params(&MatrixEnsemble::RademacherWeighted(vec![b.clone()]), 0, &mut RngStream::new(0, 0)).unwrap();
        assert!((p.v0_sq - sym_operator_norm(&(&b * &b)).unwrap()).abs() < 1e-12);
        assert!((p.c - sym_operator_norm(&b).unwrap()).abs() < 1e-12);
        let id = ensemble_params(
            &MatrixEnsemble::RademacherWeighted(vec![DenseMatrix::identity(3)]),
            0,
            &mut RngStream::new(0, 0),
        )
        .unwrap();
        assert!((id.v0_sq - 1.0).abs() < 1e-12 && (id.c - 1.0).abs() < 1e-12);
        assert!(p.samples.is_none());
    }

    #[test]
    fn gaussian_weighted_estimate() {
        let b = DenseMatrix::from_diag(&[1.0, 0.5]);
        let e = MatrixEnsemble::GaussianWeighted(vec![b.clone()]);
        let p = ensemble_params(&e, 20_000, &mut RngStream::new(1, 0)).unwrap();
        assert!((p.v0_sq / 1.0 - 1.0).abs() < 0.05, "{p:?}");
        assert_eq!(p.samples, Some(20_000));
    }

    #[test]
    fn samples_are_symmetric() {
        let mut r = RngStream::new(2, 0);
        let e = MatrixEnsemble::RandomDyad(4);
        for _ in 0..10 {
            let x = e.sample(&mut r);
            assert!(x.asymmetry() == 0.0);
            assert!((sym_operator_norm(&x).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(MatrixEnsemble::RademacherWeighted(vec![DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()])
            .validate()
            .is_err());
    }
}
