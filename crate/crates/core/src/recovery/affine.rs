use crate::error::{invalid, Error, Result};
use crate::linalg::{inner_unchecked, norm2, sym_eig, DenseMatrix};
use crate::sensing::{apply_map, GaussianMap, SamplingOperator};

/// A linear measurement process `Z ↦ y`.
#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    /// `y_j = ⟨X_j, Z⟩_F`.
    Gaussian(GaussianMap),
    /// `y_j = ⟨X_{ω_j}, Z⟩_F`, one value per drawn index (duplicates included).
    Sampling(SamplingOperator),
}

impl Measurement {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Measurement::Gaussian(g) => g.shape(),
            Measurement::Sampling(s) => (s.n(), s.n()),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Measurement::Gaussian(g) => g.m(),
            Measurement::Sampling(s) => s.m(),
        }
    }

    pub fn measure(&self, z: &DenseMatrix) -> Result<Vec<f64>> {
        if z.shape() != self.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: z.shape(),
            });
        }
        Ok(match self {
            Measurement::Gaussian(g) => apply_map(g, z)?,
            Measurement::Sampling(s) => s.omegas().iter().map(|&a| s.basis().coefficient(a, z)).collect(),
        })
    }

    /// Orthonormal basis of the kernel, as matrices.
    pub fn kernel_basis(&self) -> Result<Vec<DenseMatrix>> {
        let (rows, cols) = self.shape();
        match self {
            Measurement::Sampling(s) => {
                let support = s.support();
                let mut taken = vec![false; s.basis().len()];
                support.iter().for_each(|&a| taken[a] = true);
                Ok((0..taken.len()).filter(|&a| !taken[a]).map(|a| s.basis().element(a)).collect())
            }
            Measurement::Gaussian(g) => {
                let data: Vec<f64> = g.matrices().iter().flat_map(|x| x.as_slice().iter().copied()).collect();
                let a = DenseMatrix::new(g.m(), rows * cols, data)?;
                let tol = crate::linalg::default_rank_tol(&a);
                Ok(crate::linalg::null_space(&a, tol)?
                    .into_iter()
                    .map(|v| DenseMatrix::from_raw(rows, cols, v))
                    .collect())
            }
        }
    }
}

enum Kind {
    /// Orthonormal constraints `⟨X_a, W⟩ = y_a` over distinct `a`.
    Orthonormal { idx: Vec<usize>, vals: Vec<f64> },
    /// `W − 𝒜*(G⁺(𝒜W − y))` with the Gram inverse applied through `solve`.
    Gram { solve: GramSolve },
}

enum GramSolve {
    Cholesky(DenseMatrix),
    Pseudo { q: DenseMatrix, inv: Vec<f64> },
}

/// Euclidean projection onto `{W : measure(W) = y}`, set up once per `y`.
pub struct AffineProjector {
    measurement: Measurement,
    y: Vec<f64>,
    kind: Kind,
    regularized: bool,
}

fn cholesky(g: &DenseMatrix) -> Option<DenseMatrix> {
    let n = g.rows();
    let scale = (0..n).map(|i| g[(i, i)]).fold(0.0, f64::max);
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 1e-12 * scale {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

impl GramSolve {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            GramSolve::Cholesky(l) => {
                let n = b.len();
                let mut x = b.to_vec();
                for i in 0..n {
                    for k in 0..i {
                        x[i] -= l[(i, k)] * x[k];
                    }
                    x[i] /= l[(i, i)];
                }
                for i in (0..n).rev() {
                    for k in i + 1..n {
                        x[i] -= l[(k, i)] * x[k];
                    }
                    x[i] /= l[(i, i)];
                }
                x
            }
            GramSolve::Pseudo { q, inv } => {
                let c = q.t_mul_vec(b);
                let c: Vec<f64> = c.iter().zip(inv).map(|(a, s)| a * s).collect();
                q.mul_vec(&c)
            }
        }
    }
}

impl AffineProjector {
    pub fn new(measurement: &Measurement, y: &[f64]) -> Result<Self> {
        if y.len() != measurement.m() {
            return Err(invalid(format!("{} values for {} measurements", y.len(), measurement.m())));
        }
        let mut regularized = false;
        let kind = match measurement {
            Measurement::Sampling(s) => {
                let mut first: Vec<Option<f64>> = vec![None; s.basis().len()];
                for (&a, &v) in s.omegas().iter().zip(y) {
                    match first[a] {
                        None => first[a] = Some(v),
                        Some(w) if (w - v).abs() > 1e-12 * w.abs().max(1.0) => {
                            return Err(invalid(format!("conflicting values for repeated index {a}")));
                        }
                        Some(_) => {}
                    }
                }
                let (idx, vals) = first.iter().enumerate().filter_map(|(a, v)| v.map(|v| (a, v))).unzip();
                Kind::Orthonormal { idx, vals }
            }
            Measurement::Gaussian(g) => {
                let x = g.matrices();
                let m = x.len();
                let mut gram = DenseMatrix::zeros(m, m);
                for i in 0..m {
                    for j in i..m {
                        let v = inner_unchecked(&x[i], &x[j]);
                        gram[(i, j)] = v;
                        gram[(j, i)] = v;
                    }
                }
                let solve = match cholesky(&gram) {
                    Some(l) => GramSolve::Cholesky(l),
                    None => {
                        regularized = true;
                        let e = sym_eig(&gram)?;
                        let cut = 1e-10 * e.max().max(0.0);
                        let inv = e.lambdas.iter().map(|&l| if l > cut { 1.0 / l } else { 0.0 }).collect();
                        GramSolve::Pseudo { q: e.q, inv }
                    }
                };
                Kind::Gram { solve }
            }
        };
        Ok(Self {
            measurement: measurement.clone(),
            y: y.to_vec(),
            kind,
            regularized,
        })
    }

    /// True when the Gram matrix was singular and a pseudo-inverse was used.
    pub fn regularized(&self) -> bool {
        self.regularized
    }

    pub fn project(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        let mut w = z.clone();
        match (&self.kind, &self.measurement) {
            (Kind::Orthonormal { idx, vals }, Measurement::Sampling(s)) => {
                if z.shape() != (s.n(), s.n()) {
                    return Err(Error::ShapeMismatch {
                        expected: (s.n(), s.n()),
                        found: z.shape(),
                    });
                }
                let b = s.basis();
                for (&a, &v) in idx.iter().zip(vals) {
                    b.set_coefficient(a, v, &mut w);
                }
            }
            (Kind::Gram { solve }, Measurement::Gaussian(g)) => {
                let r: Vec<f64> = self.measurement.measure(z)?.iter().zip(&self.y).map(|(a, b)| a - b).collect();
                let c = solve.solve(&r);
                w -= &g.adjoint(&c);
            }
            _ => unreachable!("projector kind matches its measurement"),
        }
        Ok(w)
    }

    /// `‖measure(z) − y‖₂`.
    pub fn residual(&self, z: &DenseMatrix) -> Result<f64> {
        let v = self.measurement.measure(z)?;
        Ok(norm2(&v.iter().zip(&self.y).map(|(a, b)| a - b).collect::<Vec<_>>()))
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

pub fn affine_project(measurement: &Measurement, y: &[f64], z: &DenseMatrix) -> Result<DenseMatrix> {
    AffineProjector::new(measurement, y)?.project(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::RngStream;
    use crate::sensing::{gaussian_map_new, OperatorBasis};

    fn random(r: &mut RngStream, n: usize, m: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, m, |_, _| r.normal())
    }

    #[test]
    fn sampling_projection_overwrites_entries() {
        let mut r = RngStream::new(1, 0);
        let n = 5;
        let op = SamplingOperator::random(OperatorBasis::entry(n), 12, false, &mut r).unwrap();
        let meas = Measurement::Sampling(op.clone());
        let a = random(&mut r, n, n);
        let y = meas.measure(&a).unwrap();
        let z = random(&mut r, n, n);
        let p = affine_project(&meas, &y, &z).unwrap();
        for &i in op.omegas() {
            assert_eq!(p.as_slice()[i], a.as_slice()[i]);
        }
        assert!(affine_project(&meas, &y, &a).unwrap().max_abs_diff(&a) < 1e-10);
    }

    #[test]
    fn gaussian_projection_is_feasible_and_nearest() {
        let mut r = RngStream::new(2, 0);
        let map = gaussian_map_new(&mut r, 6, 3, 3).unwrap();
        let meas = Measurement::Gaussian(map);
        let a = random(&mut r, 3, 3);
        let y = meas.measure(&a).unwrap();
        let proj = AffineProjector::new(&meas, &y).unwrap();
        assert!(!proj.regularized());
        let z = random(&mut r, 3, 3);
        let p = proj.project(&z).unwrap();
        assert!(proj.residual(&p).unwrap() < 1e-10);
        assert!(proj.project(&p).unwrap().max_abs_diff(&p) < 1e-10);
        let kernel = meas.kernel_basis().unwrap();
        assert_eq!(kernel.len(), 3);
        for _ in 0..1000 {
            let mut w = a.clone();
            for k in &kernel {
                w.axpy(r.normal() * 3.0, k);
            }
            assert!((&z - &p).frobenius_norm() <= (&z - &w).frobenius_norm() + 1e-12);
        }
    }

    #[test]
    fn singular_gram_is_flagged() {
        let mut r = RngStream::new(3, 0);
        let map = gaussian_map_new(&mut r, 6, 2, 2).unwrap();
        let meas = Measurement::Gaussian(map);
        let a = random(&mut r, 2, 2);
        let y = meas.measure(&a).unwrap();
        let proj = AffineProjector::new(&meas, &y).unwrap();
        assert!(proj.regularized());
        let p = proj.project(&random(&mut r, 2, 2)).unwrap();
        assert!(p.max_abs_diff(&a) < 1e-8);
    }

    #[test]
    fn conflicting_duplicates_rejected() {
        let op = SamplingOperator::new(OperatorBasis::entry(2), vec![1, 1], true).unwrap();
        let meas = Measurement::Sampling(op);
        assert!(AffineProjector::new(&meas, &[1.0, 2.0]).is_err());
        assert!(AffineProjector::new(&meas, &[1.0, 1.0]).is_ok());
    }
}
