use super::affine::Measurement;
use crate::error::{invalid, Result};
use crate::linalg::{default_rank_tol, null_space, singular_values, DenseMatrix};
use crate::prob::RngStream;

/// Relative slack under which a non-strict inequality counts as violated.
pub const TIE_TOL: f64 = 1e-12;
const MIN_STEP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Vector(Vec<f64>),
    Matrix(DenseMatrix),
}

/// Outcome of a falsification search. `violated == false` only means no
/// violation was found within the budget.
#[derive(Clone, Debug, PartialEq)]
pub struct NspReport {
    pub violated: bool,
    pub witness: Option<Witness>,
    /// Best normalized margin seen: `(head − tail)/(head + tail)`, where the
    /// property demands `head < tail`. `−∞` for a trivial kernel.
    pub margin: f64,
    pub budget_used: usize,
    pub trivial_kernel: bool,
}

/// `(‖v_T‖₁, ‖v_{Tᶜ}‖₁)` with `T` the `k` largest `|v_i|`.
fn l1_split(v: &[f64], k: usize) -> (f64, f64) {
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    let head: f64 = a[..k].iter().sum();
    (head, a[k..].iter().sum())
}

/// `(Σ_{j≤r} σ_j, Σ_{j>r} σ_j)`.
fn sigma_split(m: &DenseMatrix, r: usize) -> Result<(f64, f64)> {
    let s = singular_values(m)?;
    let head: f64 = s[..r.min(s.len())].iter().sum();
    Ok((head, s[r.min(s.len())..].iter().sum()))
}

fn is_violation(head: f64, tail: f64) -> bool {
    head + tail > 0.0 && head >= tail - TIE_TOL * (head + tail)
}

impl NspReport {
    fn trivial() -> Self {
        Self {
            violated: false,
            witness: None,
            margin: f64::NEG_INFINITY,
            budget_used: 0,
            trivial_kernel: true,
        }
    }

    /// Re-checks a witness before reporting it.
    fn with_witness(witness: Witness, margin: f64, budget_used: usize, k: usize) -> Result<Self> {
        let (head, tail) = match &witness {
            Witness::Vector(v) => l1_split(v, k),
            Witness::Matrix(m) => sigma_split(m, k)?,
        };
        if !is_violation(head, tail) {
            return Err(invalid("witness does not violate the inequality"));
        }
        Ok(Self {
            violated: true,
            witness: Some(witness),
            margin,
            budget_used,
            trivial_kernel: false,
        })
    }
}

struct Search {
    best_margin: f64,
    best: Vec<f64>,
    used: usize,
    found: bool,
}

/// Random restarts plus coordinate ascent over kernel coefficients `c`,
/// maximizing `score(c)` until a violation appears or `budget` evaluations
/// are spent. `score` returns `(head, tail)`.
fn falsify(
    dim: usize,
    budget: usize,
    rng: &mut RngStream,
    mut score: impl FnMut(&[f64]) -> Result<(f64, f64)>,
) -> Result<Search> {
    let margin_of = |(h, t): (f64, f64)| if h + t > 0.0 { (h - t) / (h + t) } else { f64::NEG_INFINITY };
    let mut s = Search {
        best_margin: f64::NEG_INFINITY,
        best: vec![0.0; dim],
        used: 0,
        found: false,
    };
    while s.used < budget {
        let mut c = rng.normal_vec(dim);
        let mut ht = score(&c)?;
        s.used += 1;
        let mut cur = margin_of(ht);
        let mut step = 0.5 * crate::linalg::norm2(&c);
        loop {
            if cur > s.best_margin {
                s.best_margin = cur;
                s.best = c.clone();
            }
            if is_violation(ht.0, ht.1) {
                s.found = true;
                s.best = c;
                s.best_margin = cur;
                return Ok(s);
            }
            if s.used >= budget || step < MIN_STEP * crate::linalg::norm2(&c) {
                break;
            }
            let mut improved = false;
            'coords: for i in 0..dim {
                for sign in [1.0, -1.0] {
                    if s.used >= budget {
                        break 'coords;
                    }
                    let mut trial = c.clone();
                    trial[i] += sign * step;
                    let t = score(&trial)?;
                    s.used += 1;
                    let m = margin_of(t);
                    if m > cur {
                        c = trial;
                        ht = t;
                        cur = m;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
    Ok(s)
}

/// Searches `ker A` for `v` with `‖v_T‖₁ ≥ ‖v_{Tᶜ}‖₁`, `|T| = k`.
pub fn nsp_falsify(a: &DenseMatrix, k: usize, budget: usize, rng: &mut RngStream) -> Result<NspReport> {
    if k == 0 || k > a.cols() {
        return Err(invalid(format!("k = {k} outside 1..={}", a.cols())));
    }
    let kernel = null_space(a, default_rank_tol(a))?;
    if kernel.is_empty() {
        return Ok(NspReport::trivial());
    }
    let combine = |c: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; a.cols()];
        for (ci, b) in c.iter().zip(&kernel) {
            for (x, y) in v.iter_mut().zip(b) {
                *x += ci * y;
            }
        }
        v
    };
    let s = falsify(kernel.len(), budget, rng, |c| Ok(l1_split(&combine(c), k)))?;
    let v = combine(&s.best);
    if s.found {
        NspReport::with_witness(Witness::Vector(v), s.best_margin, s.used, k)
    } else {
        Ok(NspReport {
            violated: false,
            witness: None,
            margin: s.best_margin,
            budget_used: s.used,
            trivial_kernel: false,
        })
    }
}

/// Searches the kernel of the measurement map for `M` with
/// `Σ_{j≤r} σ_j(M) ≥ Σ_{j>r} σ_j(M)`.
pub fn rank_nsp_falsify(measurement: &Measurement, r: usize, budget: usize, rng: &mut RngStream) -> Result<NspReport> {
    let (rows, cols) = measurement.shape();
    if r == 0 || r > rows.min(cols) {
        return Err(invalid(format!("rank {r} out of range")));
    }
    let kernel = measurement.kernel_basis()?;
    if kernel.is_empty() {
        return Ok(NspReport::trivial());
    }
    let combine = |c: &[f64]| -> DenseMatrix {
        let mut m = DenseMatrix::zeros(rows, cols);
        for (ci, b) in c.iter().zip(&kernel) {
            m.axpy(*ci, b);
        }
        m
    };
    let s = falsify(kernel.len(), budget, rng, |c| sigma_split(&combine(c), r))?;
    if s.found {
        let m = combine(&s.best);
        let m = m.scale(1.0 / m.frobenius_norm());
        NspReport::with_witness(Witness::Matrix(m), s.best_margin, s.used, r)
    } else {
        Ok(NspReport {
            violated: false,
            witness: None,
            margin: s.best_margin,
            budget_used: s.used,
            trivial_kernel: false,
        })
    }
}
