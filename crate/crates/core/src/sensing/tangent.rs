use crate::error::{invalid, Error, Result};
use crate::linalg::{extend_orthonormal, svd, DenseMatrix};

/// `𝒫_T Z = P_U Z + Z P_U − P_U Z P_U` for the range `U` of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentProjector {
    u: DenseMatrix,
    pu: DenseMatrix,
    /// `‖A − Aᵀ‖_F` of the matrix this was built from.
    pub asymmetry: f64,
}

impl TangentProjector {
    /// From an `n × r` matrix with orthonormal columns.
    pub fn new(u: DenseMatrix) -> Result<Self> {
        let g = u.t_matmul(&u);
        let err = g.max_abs_diff(&DenseMatrix::identity(u.cols()));
        if err > 1e-10 {
            return Err(invalid(format!("columns not orthonormal (error {err:e})")));
        }
        if u.cols() > u.rows() {
            return Err(invalid("more columns than rows"));
        }
        let pu = u.checked_matmul(&u.transpose())?;
        Ok(Self {
            u,
            pu,
            asymmetry: 0.0,
        })
    }

    /// Symmetrizes `a`, then spans its numerical range.
    pub fn from_matrix(a: &DenseMatrix, rank_tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::ShapeMismatch {
                expected: (a.rows(), a.rows()),
                found: a.shape(),
            });
        }
        let sym = a.symmetrized();
        let f = svd(&sym, rank_tol)?;
        if f.numerical_rank == 0 {
            return Err(invalid("matrix has numerical rank 0"));
        }
        let mut p = Self::new(f.u.leading_columns(f.numerical_rank))?;
        p.asymmetry = a.asymmetry();
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn p_u(&self) -> &DenseMatrix {
        &self.pu
    }

    fn check(&self, z: &DenseMatrix) -> Result<()> {
        let n = self.n();
        if z.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                expected: (n, n),
                found: z.shape(),
            });
        }
        Ok(())
    }

    pub fn project(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        self.check(z)?;
        let pz = &self.pu * z;
        let zp = z * &self.pu;
        let pzp = &pz * &self.pu;
        Ok(&(&pz + &zp) - &pzp)
    }

    /// `P_{U⊥} Z P_{U⊥}`.
    pub fn complement(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(z - &self.project(z)?)
    }

    /// Frobenius-orthonormal basis of `T`: `u_i u_jᵀ`, `u_i w_jᵀ`, `w_j u_iᵀ`
    /// with `w_j` spanning `U⊥`; `2rn − r²` elements.
    pub fn tangent_basis(&self) -> Vec<DenseMatrix> {
        let (n, r) = (self.n(), self.rank());
        let us: Vec<Vec<f64>> = (0..r).map(|j| self.u.column(j)).collect();
        let ws = extend_orthonormal(&us, n, n - r);
        let mut out = Vec::with_capacity(2 * r * n - r * r);
        for ui in &us {
            for uj in &us {
                out.push(DenseMatrix::outer(ui, uj));
            }
        }
        for ui in &us {
            for w in &ws {
                out.push(DenseMatrix::outer(ui, w));
                out.push(DenseMatrix::outer(w, ui));
            }
        }
        out
    }
}

pub fn tangent_project(p: &TangentProjector, z: &DenseMatrix) -> Result<DenseMatrix> {
    p.project(z)
}
