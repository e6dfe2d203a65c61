use crate::error::{invalid, Result};
use crate::linalg::{inner_unchecked, DenseMatrix};

const ORTHONORMAL_TOL: f64 = 1e-10;

/// Frobenius-orthonormal basis `{X_a}` of `n × n` matrices, indexed `0..n²`.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorBasis {
    /// `X_a = e_k e_lᵀ` with `a = k·n + l` (0-based).
    Entry { n: usize },
    Explicit { n: usize, mats: Vec<DenseMatrix> },
}

/// `e_k e_lᵀ` in `n × n`, with 1-based `k, l`.
pub fn entry_basis_element(n: usize, k: usize, l: usize) -> Result<DenseMatrix> {
    if k == 0 || l == 0 || k > n || l > n {
        return Err(invalid(format!("entry ({k}, {l}) outside 1..={n}")));
    }
    let mut e = DenseMatrix::zeros(n, n);
    e[(k - 1, l - 1)] = 1.0;
    Ok(e)
}

impl OperatorBasis {
    pub fn entry(n: usize) -> Self {
        OperatorBasis::Entry { n }
    }

    /// Checks the list has `n²` Frobenius-orthonormal `n × n` matrices.
    pub fn explicit(mats: Vec<DenseMatrix>) -> Result<Self> {
        let n = (mats.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != mats.len() {
            return Err(invalid(format!("{} matrices is not a square count", mats.len())));
        }
        for (i, x) in mats.iter().enumerate() {
            if x.shape() != (n, n) {
                return Err(crate::Error::ShapeMismatch {
                    expected: (n, n),
                    found: x.shape(),
                });
            }
            for (j, y) in mats.iter().enumerate().skip(i) {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = inner_unchecked(x, y);
                if (got - want).abs() > ORTHONORMAL_TOL {
                    return Err(invalid(format!("basis not orthonormal at ({i}, {j}): {got}")));
                }
            }
        }
        Ok(OperatorBasis::Explicit { n, mats })
    }

    pub fn n(&self) -> usize {
        match self {
            OperatorBasis::Entry { n } | OperatorBasis::Explicit { n, .. } => *n,
        }
    }

    pub fn len(&self) -> usize {
        self.n() * self.n()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_entry(&self) -> bool {
        matches!(self, OperatorBasis::Entry { .. })
    }

    pub fn element(&self, a: usize) -> DenseMatrix {
        match self {
            OperatorBasis::Entry { n } => {
                let mut e = DenseMatrix::zeros(*n, *n);
                e.as_mut_slice()[a] = 1.0;
                e
            }
            OperatorBasis::Explicit { mats, .. } => mats[a].clone(),
        }
    }

    /// `⟨X_a, z⟩_F`.
    pub fn coefficient(&self, a: usize, z: &DenseMatrix) -> f64 {
        match self {
            OperatorBasis::Entry { .. } => z.as_slice()[a],
            OperatorBasis::Explicit { mats, .. } => inner_unchecked(&mats[a], z),
        }
    }

    /// Changes `z` along `X_a` so that `⟨X_a, z⟩ = v`.
    pub fn set_coefficient(&self, a: usize, v: f64, z: &mut DenseMatrix) {
        match self {
            OperatorBasis::Entry { .. } => z.as_mut_slice()[a] = v,
            OperatorBasis::Explicit { mats, .. } => {
                let c = inner_unchecked(&mats[a], z);
                z.axpy(v - c, &mats[a]);
            }
        }
    }

    /// `z += c·X_a`.
    pub fn add_scaled(&self, a: usize, c: f64, z: &mut DenseMatrix) {
        match self {
            OperatorBasis::Entry { .. } => z.as_mut_slice()[a] += c,
            OperatorBasis::Explicit { mats, .. } => z.axpy(c, &mats[a]),
        }
    }
}
