//! Jacobi-type eigen and singular value decompositions.
//!
//! Both routines are cyclic Jacobi sweeps: slow asymptotically but accurate
//! to working precision on the small dense matrices this crate handles.

use super::matrix::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Symmetric tolerance used when an operation requires symmetric input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Thin/full singular value decomposition `A = u · diag(sigmas) · vᵀ`
/// with `k = min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub sigmas: Vec<f64>,
    pub v: DenseMatrix,
    pub numerical_rank: usize,
    pub rank_tol: f64,
}

impl SvdFactors {
    pub fn k(&self) -> usize {
        self.sigmas.len()
    }

    pub fn u_col(&self, j: usize) -> Vec<f64> {
        self.u.column(j)
    }

    pub fn v_col(&self, j: usize) -> Vec<f64> {
        self.v.column(j)
    }

    /// `Σ_{j<rank} σ_j u_j v_jᵀ` with singular values replaced by `f(σ_j)`,
    /// summed over all `k` components.
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> DenseMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = DenseMatrix::zeros(m, n);
        for j in 0..self.k() {
            let s = f(self.sigmas[j]);
            if s == 0.0 {
                continue;
            }
            let data = out.as_mut_slice();
            for r in 0..m {
                let us = self.u[(r, j)] * s;
                if us == 0.0 {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += us * self.v[(c, j)];
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.reconstruct_with(|s| s)
    }
}

/// Eigendecomposition `S = q · diag(lambdas) · qᵀ` of a symmetric matrix,
/// eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub q: DenseMatrix,
    pub lambdas: Vec<f64>,
}

impl SymEig {
    /// `q · diag(f(λ)) · qᵀ`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.q.rows();
        let mut out = DenseMatrix::zeros(n, n);
        for (j, &l) in self.lambdas.iter().enumerate() {
            let w = f(l);
            if w == 0.0 {
                continue;
            }
            let col = self.q.column(j);
            for r in 0..n {
                let a = col[r] * w;
                for c in 0..n {
                    out[(r, c)] += a * col[c];
                }
            }
        }
        out
    }

    pub fn max(&self) -> f64 {
        self.lambdas[0]
    }

    pub fn min(&self) -> f64 {
        *self.lambdas.last().expect("non-empty spectrum")
    }
}

fn canonical_sign(v: &[f64]) -> f64 {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Cyclic Jacobi eigenvalue algorithm. Input must be symmetric within
/// [`SYMMETRY_TOL`] relative to its Frobenius norm; it is symmetrized first.
pub fn sym_eig(s: &DenseMatrix) -> Result<SymEig> {
    if !s.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (s.rows(), s.rows()),
            found: s.shape(),
        });
    }
    let asym = s.asymmetry();
    if asym > SYMMETRY_TOL * s.frobenius_norm().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let n = s.rows();
    let mut a = s.symmetrized();
    let mut q = DenseMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = n == 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                routine: "symmetric Jacobi eigensolver",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        let mut off = 0.0;
        for p in 0..n {
            for r in (p + 1)..n {
                off += a[(p, r)] * a[(p, r)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr.abs() <= f64::MIN_POSITIVE
                    || apr.abs() <= 1e-18 * (a[(p, p)].abs() + a[(r, r)].abs())
                {
                    continue;
                }
                rotated = true;
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - sn * akr;
                    a[(k, r)] = sn * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - sn * ark;
                    a[(r, k)] = sn * apk + c * ark;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - sn * qkr;
                    q[(k, r)] = sn * qkp + c * qkr;
                }
            }
        }
        converged = !rotated;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let lambdas = order.iter().map(|&i| a[(i, i)]).collect();
    let cols: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let c = q.column(i);
            let s = canonical_sign(&c);
            c.into_iter().map(|x| x * s).collect()
        })
        .collect();
    Ok(SymEig {
        q: DenseMatrix::from_columns(&cols),
        lambdas,
    })
}

/// One-sided Jacobi SVD of a tall (rows ≥ cols) matrix given by columns.
/// Returns the rotated columns and the accumulated right rotation.
fn one_sided_jacobi(mut w: Vec<Vec<f64>>) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = w.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = 1e-15;
    // columns this small are numerically zero; rotating them only churns noise
    let negligible = 1e-32 * w.iter().map(|c| dot(c, c)).sum::<f64>();
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0
                    || gamma.abs() <= tol * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = w.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
                let (lo, hi) = v.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::NoConvergence {
        routine: "one-sided Jacobi SVD",
        iterations: MAX_SWEEPS,
    })
}

/// Extends orthonormal vectors `basis` (each of length `dim`) by `extra`
/// further orthonormal vectors, chosen greedily among the standard basis.
pub(crate) fn extend_orthonormal(basis: &[Vec<f64>], dim: usize, extra: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    let mut added = Vec::with_capacity(extra);
    while added.len() < extra {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for i in 0..dim {
            let mut r = vec![0.0; dim];
            r[i] = 1.0;
            for _ in 0..2 {
                for b in &all {
                    let d = dot(&r, b);
                    for (x, y) in r.iter_mut().zip(b) {
                        *x -= d * y;
                    }
                }
            }
            let nr = norm2(&r);
            if best.as_ref().is_none_or(|(bn, _)| nr > *bn) {
                best = Some((nr, r));
            }
        }
        let (nr, mut r) = best.expect("dim > 0");
        assert!(nr > 1e-8, "cannot extend a complete basis");
        r.iter_mut().for_each(|x| *x /= nr);
        all.push(r.clone());
        added.push(r);
    }
    added
}

/// Modified Gram–Schmidt (two passes) on a list of vectors, in order.
fn reorthonormalize(vs: &mut [Vec<f64>]) {
    for i in 0..vs.len() {
        for _ in 0..2 {
            for j in 0..i {
                let (lo, hi) = vs.split_at_mut(i);
                let d = dot(&hi[0], &lo[j]);
                for (x, y) in hi[0].iter_mut().zip(&lo[j]) {
                    *x -= d * y;
                }
            }
        }
        let nr = norm2(&vs[i]);
        vs[i].iter_mut().for_each(|x| *x /= nr);
    }
}

/// Singular value decomposition with `k = min(rows, cols)` components.
///
/// Singular vectors are sign-canonicalized so that the largest-magnitude
/// entry of each left singular vector is positive (lowest index wins ties).
/// `numerical_rank` counts `σ_j > rank_tol · σ_0`.
pub fn svd(a: &DenseMatrix, rank_tol: f64) -> Result<SvdFactors> {
    if !(0.0..1.0).contains(&rank_tol) {
        return Err(Error::InvalidArgument(format!(
            "rank_tol must lie in [0, 1), got {rank_tol}"
        )));
    }
    if !a.all_finite() {
        return Err(Error::InvalidArgument("svd input has non-finite entries".into()));
    }
    let transposed = a.rows() < a.cols();
    let work = if transposed { a.transpose() } else { a.clone() };
    let (m, n) = work.shape();

    let cols: Vec<Vec<f64>> = (0..n).map(|j| work.column(j)).collect();
    let (w, v) = one_sided_jacobi(cols)?;

    let norms: Vec<f64> = w.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigmas: Vec<f64> = order.iter().map(|&i| norms[i]).collect();

    let smax = sigmas[0];
    let tiny = (m.max(n) as f64) * f64::EPSILON * smax;
    let mut lefts: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (pos, &i) in order.iter().enumerate() {
        if sigmas[pos] > tiny && smax > 0.0 {
            lefts.push(w[i].iter().map(|x| x / sigmas[pos]).collect());
        } else {
            break;
        }
    }
    reorthonormalize(&mut lefts);
    let missing = n - lefts.len();
    let completion = extend_orthonormal(&lefts, m, missing);
    lefts.extend(completion);
    let mut rights: Vec<Vec<f64>> = order.iter().map(|&i| v[i].clone()).collect();

    for (l, r) in lefts.iter_mut().zip(rights.iter_mut()) {
        // canonicalize on the final left factor
        let target = if transposed { &*r } else { &*l };
        if canonical_sign(target) < 0.0 {
            l.iter_mut().for_each(|x| *x = -*x);
            r.iter_mut().for_each(|x| *x = -*x);
        }
    }

    let (u, v) = if transposed {
        (DenseMatrix::from_columns(&rights), DenseMatrix::from_columns(&lefts))
    } else {
        (DenseMatrix::from_columns(&lefts), DenseMatrix::from_columns(&rights))
    };
    let numerical_rank = if smax == 0.0 {
        0
    } else {
        sigmas.iter().filter(|&&s| s > rank_tol * smax).count()
    };
    Ok(SvdFactors {
        u,
        sigmas,
        v,
        numerical_rank,
        rank_tol,
    })
}

/// Default rank threshold `1e-10 · max(rows, cols)` (relative to σ₁).
pub fn default_rank_tol(a: &DenseMatrix) -> f64 {
    1e-10 * a.rows().max(a.cols()) as f64
}

/// Orthonormal basis (as vectors) of the null space of `a`, i.e. the
/// orthogonal complement of the right singular vectors with
/// `σ_j > rank_tol · σ_0`.
pub fn null_space(a: &DenseMatrix, rank_tol: f64) -> Result<Vec<Vec<f64>>> {
    let f = svd(a, rank_tol)?;
    let row_space: Vec<Vec<f64>> = (0..f.numerical_rank).map(|j| f.v_col(j)).collect();
    let dim = a.cols();
    Ok(extend_orthonormal(&row_space, dim, dim - f.numerical_rank))
}

/// Orthonormalizes the columns of `a` (rows ≥ cols) by Gram–Schmidt with
/// the sign convention `R_jj > 0`; for Gaussian input this yields a
/// Haar-distributed orthonormal frame.
pub fn orthonormal_columns(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() < a.cols() {
        return Err(Error::InvalidArgument(
            "orthonormal_columns needs rows >= cols".into(),
        ));
    }
    let mut cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    for i in 0..cols.len() {
        let original_norm = norm2(&cols[i]);
        for _ in 0..2 {
            for j in 0..i {
                let (lo, hi) = cols.split_at_mut(i);
                let d = dot(&hi[0], &lo[j]);
                for (x, y) in hi[0].iter_mut().zip(&lo[j]) {
                    *x -= d * y;
                }
            }
        }
        let nr = norm2(&cols[i]);
        if nr <= 1e-12 * original_norm.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidArgument(
                "columns are linearly dependent".into(),
            ));
        }
        cols[i].iter_mut().for_each(|x| *x /= nr);
    }
    Ok(DenseMatrix::from_columns(&cols))
}

/// Polar factor `P Qᵀ` of `a = P Σ Qᵀ`: the Frobenius-nearest matrix with
/// orthonormal rows (rows ≤ cols) or columns (rows ≥ cols).
pub fn polar_factor(a: &DenseMatrix) -> Result<DenseMatrix> {
    let f = svd(a, 0.0)?;
    f.u.checked_matmul(&f.v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormality_error(q: &DenseMatrix) -> f64 {
        let g = q.t_matmul(q);
        g.max_abs_diff(&DenseMatrix::identity(q.cols()))
    }

    #[test]
    fn svd_of_diagonal() {
        let a = DenseMatrix::from_diag(&[3.0, 1.0]);
        let f = svd(&a, 0.0).unwrap();
        assert_eq!(f.sigmas, vec![3.0, 1.0]);
        assert_eq!(f.u, DenseMatrix::identity(2));
        assert_eq!(f.v, DenseMatrix::identity(2));
        assert_eq!(f.numerical_rank, 2);
    }

    #[test]
    fn svd_of_zero_matrix() {
        let f = svd(&DenseMatrix::zeros(2, 3), 1e-10).unwrap();
        assert_eq!(f.sigmas, vec![0.0, 0.0]);
        assert_eq!(f.numerical_rank, 0);
        assert!(orthonormality_error(&f.u) < 1e-12);
        assert!(orthonormality_error(&f.v) < 1e-12);
    }

    #[test]
    fn svd_of_shear_matches_characteristic_polynomial() {
        // AᵀA = [[1,1],[1,2]] has eigenvalues (3 ± √5)/2
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let f = svd(&a, 0.0).unwrap();
        let s5 = 5f64.sqrt();
        assert!((f.sigmas[0] - ((3.0 + s5) / 2.0).sqrt()).abs() < 1e-14);
        assert!((f.sigmas[1] - ((3.0 - s5) / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn svd_rejects_bad_tolerance() {
        assert!(svd(&DenseMatrix::identity(2), 1.0).is_err());
        assert!(svd(&DenseMatrix::identity(2), -0.1).is_err());
    }

    #[test]
    fn wide_and_rank_deficient_inputs() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 4.0, 6.0, 8.0],
            vec![0.0, 1.0, 0.0, 1.0],
        ])
        .unwrap();
        let f = svd(&a, 1e-10).unwrap();
        assert_eq!(f.k(), 3);
        assert_eq!(f.numerical_rank, 2);
        assert!(orthonormality_error(&f.u) < 1e-10);
        assert!(orthonormality_error(&f.v) < 1e-10);
        assert!(f.reconstruct().max_abs_diff(&a) < 1e-12);
        let ns = null_space(&a, 1e-10).unwrap();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(norm2(&a.mul_vec(v)) < 1e-12);
        }
    }

    #[test]
    fn eig_sorted_descending() {
        let s = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = sym_eig(&s).unwrap();
        assert!((e.lambdas[0] - 3.0).abs() < 1e-14);
        assert!((e.lambdas[1] - 1.0).abs() < 1e-14);
        assert!(e.apply_fn(|l| l).max_abs_diff(&s) < 1e-14);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let s = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&s), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn polar_factor_has_orthonormal_rows() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.2, 0.0], vec![0.1, 0.9, 0.3]]).unwrap();
        let p = polar_factor(&a).unwrap();
        let g = &p * &p.transpose();
        assert!(g.max_abs_diff(&DenseMatrix::identity(2)) < 1e-12);
    }
}
