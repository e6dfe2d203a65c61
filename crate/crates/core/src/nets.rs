//! ε-nets on the sphere, ball, Stiefel manifold and the rank-r unit ball.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::io::rows_to_csv;
use crate::linalg::{norm2, polar_factor, DenseMatrix};
use crate::prob::RngStream;

pub const DEFAULT_CAP: usize = 1_000_000;
/// Greedy packing stops after this many rejections per accepted element.
pub const REJECTION_FACTOR: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    Sphere { n: usize },
    Ball { n: usize },
    /// `k × n` matrices with orthonormal rows.
    Stiefel { n: usize, k: usize },
    /// `n × big_n` matrices of rank ≤ r and Frobenius norm ≤ 1.
    LowRank { n: usize, big_n: usize, r: usize },
}

impl Ambient {
    /// `(rows, cols)` of an element; vectors are single rows.
    pub fn element_shape(&self) -> (usize, usize) {
        match *self {
            Ambient::Sphere { n } | Ambient::Ball { n } => (1, n),
            Ambient::Stiefel { n, k } => (k, n),
            Ambient::LowRank { n, big_n, .. } => (n, big_n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub ambient: Ambient,
    pub eps: f64,
    /// Row-major flattened elements.
    pub elements: Vec<Vec<f64>>,
    /// Stiefel only: `‖Z − polar(Z)‖_{2,∞}` of the kept product-net candidate.
    pub projection_distance: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    ambient: &'a Ambient,
    eps: f64,
    size: usize,
}

impl Net {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element_matrix(&self, i: usize) -> DenseMatrix {
        let (r, c) = self.ambient.element_shape();
        DenseMatrix::from_raw(r, c, self.elements[i].clone())
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(self.elements.iter().map(Vec::as_slice))
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&Sidecar {
            ambient: &self.ambient,
            eps: self.eps,
            size: self.len(),
        })
        .expect("sidecar serializes")
    }

    /// Smallest distance from `x` to the net in the net's own metric.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        let (rows, cols) = self.ambient.element_shape();
        let metric = |e: &[f64]| match self.ambient {
            Ambient::Stiefel { .. } => two_inf_distance(e, x, rows, cols),
            _ => euclid(e, x),
        };
        self.elements.iter().map(|e| metric(e)).fold(f64::INFINITY, f64::min)
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Max row-wise Euclidean distance between two row-major `rows × cols` matrices.
pub fn two_inf_distance(a: &[f64], b: &[f64], rows: usize, cols: usize) -> f64 {
    (0..rows)
        .map(|i| euclid(&a[i * cols..(i + 1) * cols], &b[i * cols..(i + 1) * cols]))
        .fold(0.0, f64::max)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("net radius must lie in (0, 1), got {eps}")))
    }
}

fn check_cap(what: &'static str, log_bound: f64, cap: usize) -> Result<f64> {
    let bound = log_bound.exp();
    if log_bound > (cap as f64).ln() + 1e-12 {
        return Err(Error::CapExceeded {
            what,
            value: bound,
            cap: cap as f64,
        });
    }
    Ok(bound)
}

/// Greedy ε-packing from an i.i.d. candidate stream; stops after
/// `50·|net|` consecutive rejections.
fn greedy_packing(mut draw: impl FnMut() -> Vec<f64>, eps: f64, limit: f64) -> Vec<Vec<f64>> {
    let mut net: Vec<Vec<f64>> = Vec::new();
    let mut streak = 0;
    loop {
        let c = draw();
        if net.iter().all(|z| euclid(z, &c) >= eps) {
            net.push(c);
            streak = 0;
            if net.len() as f64 >= limit {
                break;
            }
        } else {
            streak += 1;
            if streak >= REJECTION_FACTOR * net.len() {
                break;
            }
        }
    }
    net
}

pub fn sphere_net(n: usize, eps: f64, rng: &mut RngStream, cap: usize) -> Result<Net> {
    check_eps(eps)?;
    if n == 0 {
        return Err(invalid("sphere dimension must be positive"));
    }
    let bound = check_cap("sphere net size", n as f64 * (1.0 + 2.0 / eps).ln(), cap)?;
    Ok(Net {
        ambient: Ambient::Sphere { n },
        eps,
        elements: greedy_packing(|| rng.unit_vector(n), eps, bound),
        projection_distance: None,
    })
}

pub fn ball_net(n: usize, eps: f64, rng: &mut RngStream, cap: usize) -> Result<Net> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("net radius must lie in (0, 1], got {eps}")));
    }
    if n == 0 {
        return Err(invalid("ball dimension must be positive"));
    }
    let bound = check_cap("ball net size", n as f64 * (1.0 + 2.0 / eps).ln(), cap)?;
    let draw = || {
        let dir = rng.unit_vector(n);
        let r = rng.uniform().powf(1.0 / n as f64);
        dir.into_iter().map(|x| x * r).collect()
    };
    Ok(Net {
        ambient: Ambient::Ball { n },
        eps,
        elements: greedy_packing(draw, eps, bound),
        projection_distance: None,
    })
}

/// Product sphere net on `(S^{n-1})^k`, each tuple replaced by its polar
/// factor and kept when that moved it by at most `eps` in `‖·‖_{2,∞}`.
pub fn stiefel_net(n: usize, k: usize, eps: f64, rng: &mut RngStream, cap: usize) -> Result<Net> {
    check_eps(eps)?;
    if k == 0 || k > n {
        return Err(invalid(format!("stiefel net needs 1 <= k <= n, got k={k}, n={n}")));
    }
    check_cap("stiefel net size", (n * k) as f64 * (1.0 + 2.0 / eps).ln(), cap)?;
    let sphere = sphere_net(n, eps, rng, cap)?.elements;
    let total = sphere.len().pow(k as u32);
    if total > cap {
        return Err(Error::CapExceeded {
            what: "stiefel product net size",
            value: total as f64,
            cap: cap as f64,
        });
    }
    let mut elements = Vec::new();
    let mut dists = Vec::new();
    let mut idx = vec![0usize; k];
    for _ in 0..total {
        let z: Vec<f64> = idx.iter().flat_map(|&i| sphere[i].iter().copied()).collect();
        let u = polar_factor(&DenseMatrix::from_raw(k, n, z.clone()))?;
        let d = two_inf_distance(&z, u.as_slice(), k, n);
        if d <= eps {
            elements.push(u.into_vec());
            dists.push(d);
        }
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < sphere.len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(Net {
        ambient: Ambient::Stiefel { n, k },
        eps,
        elements,
        projection_distance: Some(dists),
    })
}

/// `ρ`-net of rank-≤r matrices with `‖·‖_F ≤ 1`, from `Ũᵀ diag(σ̃) Ṽ`.
pub fn lowrank_net(n: usize, big_n: usize, r: usize, rho: f64, rng: &mut RngStream, cap: usize) -> Result<Net> {
    if r == 0 || r > n.min(big_n) {
        return Err(invalid(format!("rank {r} out of range for {n}x{big_n}")));
    }
    if !(rho > 0.0 && rho < 5.0) {
        return Err(invalid(format!("rho must lie in (0, 5), got {rho}")));
    }
    check_cap(
        "lowrank net size",
        (r * (n + big_n + 1)) as f64 * (1.0 + 10.0 / rho).ln(),
        cap,
    )?;
    let eps = rho / 5.0;
    let us = stiefel_net(n, r, eps, rng, cap)?;
    let sig = ball_net(r, eps, rng, cap)?;
    let vs = stiefel_net(big_n, r, eps, rng, cap)?;
    let total = us.len() * sig.len() * vs.len();
    if total > cap {
        return Err(Error::CapExceeded {
            what: "lowrank net size",
            value: total as f64,
            cap: cap as f64,
        });
    }
    let mut elements = Vec::with_capacity(total);
    for i in 0..us.len() {
        let ut = us.element_matrix(i).transpose();
        for s in &sig.elements {
            let us_mat = DenseMatrix::from_fn(n, r, |a, b| ut[(a, b)] * s[b]);
            for j in 0..vs.len() {
                elements.push(us_mat.checked_matmul(&vs.element_matrix(j))?.into_vec());
            }
        }
    }
    Ok(Net {
        ambient: Ambient::LowRank { n, big_n, r },
        eps: rho,
        elements,
        projection_distance: None,
    })
}

/// `(1/(1-ε))·max_{z ∈ net} ‖Az‖₂`, an upper bound on `‖A‖`.
pub fn net_operator_norm_bound(apply: impl Fn(&[f64]) -> Vec<f64>, net: &Net, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !matches!(net.ambient, Ambient::Sphere { .. }) {
        return Err(invalid("operator norm bound needs a sphere net"));
    }
    if net.eps > eps {
        return Err(invalid(format!("net radius {} exceeds eps {eps}", net.eps)));
    }
    let best = net.elements.iter().map(|z| norm2(&apply(z))).fold(0.0, f64::max);
    Ok(best / (1.0 - eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{operator_norm, orthonormal_columns, svd};

    fn packing_ok(net: &Net) -> bool {
        let e = &net.elements;
        (0..e.len()).all(|i| (i + 1..e.len()).all(|j| euclid(&e[i], &e[j]) >= net.eps))
    }

    #[test]
    fn zero_sphere() {
        let net = sphere_net(1, 0.5, &mut RngStream::new(1, 0), DEFAULT_CAP).unwrap();
        let mut v: Vec<f64> = net.elements.iter().map(|e| e[0]).collect();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![-1.0, 1.0]);
    }

    #[test]
    fn circle_net_size_and_covering() {
        let mut rng = RngStream::new(2, 0);
        let net = sphere_net(2, 0.5, &mut rng, DEFAULT_CAP).unwrap();
        assert!(net.len() <= 25);
        assert!(packing_ok(&net));
        for _ in 0..10_000 {
            assert!(net.distance_to(&rng.unit_vector(2)) < 0.5);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = sphere_net(20, 0.1, &mut RngStream::new(0, 0), DEFAULT_CAP).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn interval_ball_net() {
        let mut rng = RngStream::new(3, 0);
        let net = ball_net(1, 1.0, &mut rng, DEFAULT_CAP).unwrap();
        assert!(net.len() <= 3);
        assert!(packing_ok(&net));
        assert!(net.distance_to(&[0.0]) < 1.0);
        for _ in 0..10_000 {
            let x = 2.0 * rng.uniform() - 1.0;
            assert!(net.distance_to(&[x]) < 1.0);
        }
    }

    #[test]
    fn disc_ball_net_covers() {
        let mut rng = RngStream::new(4, 0);
        let net = ball_net(2, 0.5, &mut rng, DEFAULT_CAP).unwrap();
        assert!(net.len() <= 25);
        assert!(packing_ok(&net));
        for _ in 0..10_000 {
            let d = rng.unit_vector(2);
            let r = rng.uniform().sqrt();
            assert!(net.distance_to(&[d[0] * r, d[1] * r]) < 0.5);
        }
    }

    #[test]
    fn trivial_stiefel() {
        let net = stiefel_net(1, 1, 0.5, &mut RngStream::new(5, 0), DEFAULT_CAP).unwrap();
        let mut v: Vec<f64> = net.elements.iter().map(|e| e[0]).collect();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![-1.0, 1.0]);
    }

    #[test]
    fn stiefel_net_covers_haar_frames() {
        let (n, k, eps) = (3, 2, 0.5);
        let mut rng = RngStream::new(6, 0);
        let net = stiefel_net(n, k, eps, &mut rng, DEFAULT_CAP).unwrap();
        assert!((net.len() as f64) <= (1.0 + 2.0 / eps).powi((n * k) as i32));
        for i in 0..net.len() {
            let u = net.element_matrix(i);
            let g = &u * &u.transpose();
            assert!(g.max_abs_diff(&DenseMatrix::identity(k)) < 1e-10);
        }
        for _ in 0..1000 {
            let g = DenseMatrix::from_fn(n, k, |_, _| rng.normal());
            let v = orthonormal_columns(&g).unwrap().transpose();
            assert!(net.distance_to(v.as_slice()) <= 2.0 * eps);
        }
    }

    #[test]
    fn scalar_lowrank_net() {
        let net = lowrank_net(1, 1, 1, 1.0, &mut RngStream::new(7, 0), DEFAULT_CAP).unwrap();
        assert!(net.elements.iter().all(|e| e[0].abs() <= 1.0 + 1e-12));
        for k in 0..=200 {
            let x = -1.0 + k as f64 / 100.0;
            assert!(net.distance_to(&[x]) <= 1.0);
        }
    }

    #[test]
    fn lowrank_net_invariants_and_covering() {
        let (n, big_n, r, rho) = (2, 2, 1, 1.0);
        let mut rng = RngStream::new(8, 0);
        let net = lowrank_net(n, big_n, r, rho, &mut rng, DEFAULT_CAP).unwrap();
        assert!((net.len() as f64) <= (1.0 + 10.0 / rho).powi((r * (n + big_n + 1)) as i32));
        for i in 0..net.len() {
            let m = net.element_matrix(i);
            assert!(m.frobenius_norm() <= 1.0 + 1e-10);
            assert!(svd(&m, 1e-10).unwrap().numerical_rank <= r);
        }
        for _ in 0..1000 {
            let a = DenseMatrix::outer(&rng.normal_vec(n), &rng.normal_vec(big_n));
            let a = a.scale(1.0 / a.frobenius_norm());
            assert!(net.distance_to(a.as_slice()) <= rho);
        }
    }

    #[test]
    fn operator_norm_bound_brackets_sigma1() {
        let eps = 0.5;
        let mut rng = RngStream::new(9, 0);
        let net = sphere_net(5, eps, &mut rng, DEFAULT_CAP).unwrap();
        let id = net_operator_norm_bound(|x| x.to_vec(), &net, eps).unwrap();
        assert!((id - 2.0).abs() < 1e-12);
        assert_eq!(net_operator_norm_bound(|x| vec![0.0; x.len()], &net, eps).unwrap(), 0.0);
        for _ in 0..50 {
            let a = DenseMatrix::from_fn(5, 5, |_, _| rng.normal());
            let s1 = operator_norm(&a).unwrap();
            let b = net_operator_norm_bound(|x| a.mul_vec(x), &net, eps).unwrap();
            assert!(b >= s1 && b <= s1 / (1.0 - eps) + 1e-9, "{b} vs {s1}");
        }
        assert!(net_operator_norm_bound(|x| x.to_vec(), &net, 1.0).is_err());
    }

    #[test]
    fn sidecar_describes_net() {
        let net = sphere_net(1, 0.5, &mut RngStream::new(1, 0), DEFAULT_CAP).unwrap();
        let v: serde_json::Value = serde_json::from_str(&net.sidecar_json()).unwrap();
        assert_eq!(v["ambient"]["kind"], "sphere");
        assert_eq!(v["size"], 2);
        assert_eq!(net.to_csv().lines().count(), 2);
    }
}
