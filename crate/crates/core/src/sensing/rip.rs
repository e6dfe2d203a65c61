use super::gaussian::{apply_map, GaussianMap};
use crate::error::{invalid, Error, Result};
use crate::linalg::{sym_eig, DenseMatrix};
use crate::nets::{lowrank_net, DEFAULT_CAP};
use crate::prob::RngStream;

const SUPPORT_CAP: f64 = 1e6;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact `δ_k`: worst `max(λ_max − 1, 1 − λ_min)` of `A_Sᵀ A_S` over all `|S| = k`.
pub fn sparse_rip_constant(a: &DenseMatrix, k: usize) -> Result<f64> {
    let cols = a.cols();
    if k == 0 || k > cols {
        return Err(invalid(format!("sparsity {k} outside 1..={cols}")));
    }
    let count = binomial(cols, k);
    if count > SUPPORT_CAP {
        return Err(Error::CapExceeded {
            what: "support count",
            value: count,
            cap: SUPPORT_CAP,
        });
    }
    let gram = a.t_matmul(a);
    let mut s: Vec<usize> = (0..k).collect();
    let mut delta: f64 = 0.0;
    loop {
        let sub = DenseMatrix::from_fn(k, k, |i, j| gram[(s[i], s[j])]);
        let e = sym_eig(&sub.symmetrized())?;
        delta = delta.max(e.max() - 1.0).max(1.0 - e.min());
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(delta);
            }
            i -= 1;
            if s[i] < cols - k + i {
                break;
            }
        }
        s[i] += 1;
        for j in i + 1..k {
            s[j] = s[j - 1] + 1;
        }
    }
}

/// `⌈10 (r(n+N) + ln(2/ε)) / δ²⌉`.
pub fn gaussian_rip_sample_count(r: usize, n: usize, big_n: usize, eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0) {
        return Err(invalid("need 0 < eps < 1 and delta > 0"));
    }
    let x = 10.0 * ((r * (n + big_n)) as f64 + (2.0 / eps).ln()) / (delta * delta);
    Ok((x - 1e-9).ceil() as usize)
}

/// Random `n × big_n` matrix of rank `r` with unit Frobenius norm.
pub fn random_rank_r_unit(rng: &mut RngStream, n: usize, big_n: usize, r: usize) -> DenseMatrix {
    loop {
        let l = DenseMatrix::from_fn(n, r, |_, _| rng.normal());
        let rt = DenseMatrix::from_fn(r, big_n, |_, _| rng.normal());
        let a = &l * &rt;
        let f = a.frobenius_norm();
        if f > 1e-300 {
            return a.scale(1.0 / f);
        }
    }
}

/// Lower estimate of the rank-r isometry constant: the largest
/// `|‖𝒳(A)‖² − ‖A‖_F²| / ‖A‖_F²` over random rank-r probes, plus every
/// element of a `ρ = 1/2` low-rank net when that net fits under the cap.
pub fn matrix_rip_estimate(map: &GaussianMap, r: usize, probes: usize, rng: &mut RngStream) -> Result<f64> {
    let (n, big_n) = map.shape();
    if probes == 0 {
        return Err(invalid("need at least one probe"));
    }
    if r == 0 || r > n.min(big_n) {
        return Err(invalid(format!("rank {r} out of range")));
    }
    let deviation = |a: &DenseMatrix| -> Result<f64> {
        let f2 = a.frobenius_norm().powi(2);
        if f2 == 0.0 {
            return Ok(0.0);
        }
        let y = apply_map(map, a)?;
        Ok((y.iter().map(|v| v * v).sum::<f64>() - f2).abs() / f2)
    };
    let mut best: f64 = 0.0;
    for _ in 0..probes {
        best = best.max(deviation(&random_rank_r_unit(rng, n, big_n, r))?);
    }
    match lowrank_net(n, big_n, r, 0.5, rng, DEFAULT_CAP) {
        Ok(net) => {
            for i in 0..net.len() {
                best = best.max(deviation(&net.element_matrix(i))?);
            }
        }
        Err(Error::CapExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::gaussian_map_new;

    #[test]
    fn orthonormal_columns_have_zero_delta() {
        let a = DenseMatrix::from_fn(5, 3, |i, j| (i == j) as u8 as f64);
        assert!(sparse_rip_constant(&a, 2).unwrap() < 1e-14);
        assert!(sparse_rip_constant(&a, 3).unwrap() < 1e-14);
    }

    #[test]
    fn duplicated_column() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((sparse_rip_constant(&a, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_guard() {
        let a = DenseMatrix::zeros(2, 60);
        assert!(matches!(sparse_rip_constant(&a, 10), Err(Error::CapExceeded { .. })));
        assert!(sparse_rip_constant(&a, 0).is_err());
    }

    #[test]
    fn parseval_map_has_no_deviation() {
        let (n, big_n) = (2, 3);
        let mats = (0..n * big_n)
            .map(|a| DenseMatrix::from_fn(n, big_n, |i, j| (i * big_n + j == a) as u8 as f64))
            .collect();
        let map = GaussianMap::from_matrices(mats).unwrap();
        assert!(matrix_rip_estimate(&map, 1, 200, &mut RngStream::new(1, 0)).unwrap() < 1e-12);
    }

    #[test]
    fn monotone_in_probes() {
        let map = gaussian_map_new(&mut RngStream::new(2, 0), 30, 3, 3).unwrap();
        let mut last = 0.0;
        for probes in [1, 10, 100] {
            let e = matrix_rip_estimate(&map, 1, probes, &mut RngStream::new(3, 0)).unwrap();
            assert!(e >= last);
            last = e;
        }
    }

    #[test]
    fn sample_count_formula() {
        let m = gaussian_rip_sample_count(1, 5, 5, 0.01, 1.0).unwrap();
        assert_eq!(m, (10.0 * (10.0 + 200f64.ln())).ceil() as usize);
    }

    #[test]
    fn scalar_case_uses_net() {
        let map = GaussianMap::from_matrices(vec![DenseMatrix::from_diag(&[2.0])]).unwrap();
        let e = matrix_rip_estimate(&map, 1, 1, &mut RngStream::new(4, 0)).unwrap();
        assert!((e - 3.0).abs() < 1e-12);
    }
}
