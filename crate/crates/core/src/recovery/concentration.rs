use crate::error::{invalid, Result};
use crate::linalg::{sym_eig, DenseMatrix};
use crate::prob::{run_trials, RngStream, TailReport};
use crate::sensing::{coherence, OperatorBasis, SamplingOperator, TangentProjector};

/// `4nr exp(−t² m / (4(2νrn + 1)))`.
pub fn tangent_concentration_bound(n: usize, r: usize, nu: f64, m: usize, t: f64) -> f64 {
    let (nf, rf) = (n as f64, r as f64);
    4.0 * nf * rf * (-(t * t) * m as f64 / (4.0 * (2.0 * nu * rf * nf + 1.0))).exp()
}

/// Smallest `m` with `4nr exp(−m/(16(2νrn + 1))) ≤ p_fail`.
pub fn tangent_sample_count(n: usize, r: usize, nu: f64, p_fail: f64) -> Result<usize> {
    if !(p_fail > 0.0 && p_fail < 1.0) {
        return Err(invalid("failure probability must lie in (0, 1)"));
    }
    let (nf, rf) = (n as f64, r as f64);
    let x = 16.0 * (2.0 * nu * rf * nf + 1.0) * (4.0 * nf * rf / p_fail).ln();
    Ok((x - 1e-9).ceil() as usize)
}

/// Coefficients `⟨B_k, X_a⟩` of every basis element against an orthonormal basis of `T`.
fn tangent_coefficients(basis: &OperatorBasis, tb: &[DenseMatrix]) -> Vec<Vec<f64>> {
    (0..basis.len())
        .map(|a| tb.iter().map(|b| basis.coefficient(a, b)).collect())
        .collect()
}

fn deviation_from_coefficients(coef: &[Vec<f64>], omegas: &[usize], scale: f64) -> Result<f64> {
    let d = coef.first().map_or(0, Vec::len);
    let mut m = DenseMatrix::identity(d);
    for &a in omegas {
        let c = &coef[a];
        for i in 0..d {
            if c[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                m[(i, j)] -= scale * c[i] * c[j];
            }
        }
    }
    let e = sym_eig(&m.symmetrized())?;
    Ok(e.max().abs().max(e.min().abs()))
}

/// `‖𝒫_T − 𝒫_T ℛ 𝒫_T‖` restricted to `T`, from the explicit matrix of the
/// operator in an orthonormal basis of `T`.
pub fn restricted_deviation_norm(op: &SamplingOperator, p: &TangentProjector) -> Result<f64> {
    let coef = tangent_coefficients(op.basis(), &p.tangent_basis());
    deviation_from_coefficients(&coef, op.omegas(), op.scale())
}

/// Frequency of `‖𝒫_T − 𝒫_T ℛ 𝒫_T‖ ≥ t` over fresh with-replacement
/// samples of size `m`, against `4nr exp(−t² m / (4(2νrn + 1)))` where
/// `ν = max_a ‖𝒫_T X_a‖_F² · n/(2r)`.
pub fn tangent_operator_concentration(
    basis: &OperatorBasis,
    p: &TangentProjector,
    m: usize,
    trials: usize,
    ts: &[f64],
    rng: &mut RngStream,
) -> Result<TailReport> {
    if ts.iter().any(|&t| !(t > 0.0 && t < 2.0)) {
        return Err(invalid("thresholds must lie in (0, 2)"));
    }
    if m == 0 || trials == 0 {
        return Err(invalid("m and trials must be positive"));
    }
    let n = basis.n();
    let r = p.rank();
    // ν only depends on U and the basis; any matrix with range U will do
    let rep = coherence(basis, p.p_u(), p)?;
    let nu = rep.nu_pair.0;
    let coef = tangent_coefficients(basis, &p.tangent_basis());
    let scale = basis.len() as f64 / m as f64;
    let norms = run_trials(rng, trials, |_, r| {
        let omegas: Vec<usize> = (0..m).map(|_| r.below(basis.len())).collect();
        deviation_from_coefficients(&coef, &omegas, scale)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    TailReport::from_samples(&norms, ts, |t| tangent_concentration_bound(n, r, nu, m, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones_projector(n: usize) -> TangentProjector {
        TangentProjector::from_matrix(&DenseMatrix::from_fn(n, n, |_, _| 1.0), 1e-10).unwrap()
    }

    #[test]
    fn full_sampling_gives_zero() {
        let n = 5;
        let op = SamplingOperator::new(OperatorBasis::entry(n), (0..n * n).collect(), false).unwrap();
        assert!(restricted_deviation_norm(&op, &ones_projector(n)).unwrap() < 1e-12);
    }

    #[test]
    fn matches_dense_operator() {
        let n = 4;
        let p = ones_projector(n);
        let mut rng = RngStream::new(1, 0);
        let op = SamplingOperator::random(OperatorBasis::entry(n), 30, true, &mut rng).unwrap();
        let fast = restricted_deviation_norm(&op, &p).unwrap();
        // power iteration on the dense map Z ↦ 𝒫_T Z − 𝒫_T ℛ 𝒫_T Z
        let apply = |z: &DenseMatrix| {
            let t = p.project(z).unwrap();
            &t - &p.project(&op.apply(&t).unwrap()).unwrap()
        };
        let mut z = p.project(&DenseMatrix::from_fn(n, n, |_, _| rng.normal())).unwrap();
        let mut lam = 0.0;
        for _ in 0..2000 {
            let w = apply(&apply(&z));
            lam = w.frobenius_norm().sqrt() / z.frobenius_norm().sqrt();
            z = w.scale(1.0 / w.frobenius_norm());
        }
        assert!((fast - lam).abs() < 1e-6, "{fast} vs {lam}");
    }

    #[test]
    fn sample_count_formula() {
        assert_eq!(tangent_sample_count(15, 1, 1.0, 1e-2).unwrap(), 4315);
    }

    #[test]
    fn frequencies_are_monotone() {
        let n = 8;
        let p = ones_projector(n);
        let rep = tangent_operator_concentration(&OperatorBasis::entry(n), &p, 300, 200, &[0.5, 1.0], &mut RngStream::new(2, 0))
            .unwrap();
        assert!(rep.empirical[1] <= rep.empirical[0]);
        assert!(rep.violations().is_empty());
    }
}
