use serde::{Deserialize, Serialize};

use super::basis::OperatorBasis;
use crate::error::{invalid, Error, Result};
use crate::linalg::DenseMatrix;
use crate::prob::RngStream;

/// `m` indices uniform on `0..n_sq`: i.i.d. with replacement, or a uniform
/// subset by partial Fisher–Yates without.
pub fn sample_indices(rng: &mut RngStream, n_sq: usize, m: usize, replacement: bool) -> Result<Vec<usize>> {
    if n_sq == 0 {
        return Err(invalid("index range is empty"));
    }
    if replacement {
        return Ok((0..m).map(|_| rng.below(n_sq)).collect());
    }
    if m > n_sq {
        return Err(invalid(format!("cannot draw {m} distinct indices from {n_sq}")));
    }
    let mut pool: Vec<usize> = (0..n_sq).collect();
    for i in 0..m {
        let j = i + rng.below(n_sq - i);
        pool.swap(i, j);
    }
    pool.truncate(m);
    Ok(pool)
}

/// `ℛ Z = (n²/m) Σ_j ⟨X_{ω_j}, Z⟩ X_{ω_j}`; duplicate indices count repeatedly.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingOperator {
    basis: OperatorBasis,
    omegas: Vec<usize>,
    replacement: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplingJson {
    n: usize,
    m: usize,
    replacement: bool,
    omegas: Vec<usize>,
    basis: String,
}

impl SamplingOperator {
    pub fn new(basis: OperatorBasis, omegas: Vec<usize>, replacement: bool) -> Result<Self> {
        if omegas.is_empty() {
            return Err(invalid("sampling operator needs at least one index"));
        }
        let n_sq = basis.len();
        if let Some(&bad) = omegas.iter().find(|&&a| a >= n_sq) {
            return Err(invalid(format!("index {bad} outside 0..{n_sq}")));
        }
        if !replacement {
            let mut seen = vec![false; n_sq];
            for &a in &omegas {
                if std::mem::replace(&mut seen[a], true) {
                    return Err(invalid(format!("index {a} repeated without replacement")));
                }
            }
        }
        Ok(Self {
            basis,
            omegas,
            replacement,
        })
    }

    pub fn random(basis: OperatorBasis, m: usize, replacement: bool, rng: &mut RngStream) -> Result<Self> {
        let omegas = sample_indices(rng, basis.len(), m, replacement)?;
        Self::new(basis, omegas, replacement)
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn m(&self) -> usize {
        self.omegas.len()
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn omegas(&self) -> &[usize] {
        &self.omegas
    }

    pub fn replacement(&self) -> bool {
        self.replacement
    }

    /// `n²/m`.
    pub fn scale(&self) -> f64 {
        self.basis.len() as f64 / self.m() as f64
    }

    /// Sorted distinct sampled indices.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.omegas.clone();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn apply(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.n();
        if z.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                expected: (n, n),
                found: z.shape(),
            });
        }
        let s = self.scale();
        let mut out = DenseMatrix::zeros(n, n);
        for &a in &self.omegas {
            self.basis.add_scaled(a, s * self.basis.coefficient(a, z), &mut out);
        }
        Ok(out)
    }

    /// JSON form; `basis_ref` is `"entry"` or the path an explicit basis was read from.
    pub fn to_json(&self, basis_ref: &str) -> String {
        serde_json::to_string_pretty(&SamplingJson {
            n: self.n(),
            m: self.m(),
            replacement: self.replacement,
            omegas: self.omegas.clone(),
            basis: basis_ref.to_string(),
        })
        .expect("sampling json serializes")
    }

    /// Parses the JSON form; explicit bases are resolved through `load_basis`.
    pub fn from_json(text: &str, load_basis: impl FnOnce(&str) -> Result<OperatorBasis>) -> Result<Self> {
        let j: SamplingJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let basis = if j.basis == "entry" {
            OperatorBasis::entry(j.n)
        } else {
            load_basis(&j.basis)?
        };
        if basis.n() != j.n || j.omegas.len() != j.m {
            return Err(invalid("sampling json fields are inconsistent"));
        }
        Self::new(basis, j.omegas, j.replacement)
    }
}

pub fn sampling_apply(op: &SamplingOperator, z: &DenseMatrix) -> Result<DenseMatrix> {
    op.apply(z)
}
