use crate::error::{Error, Result};
use crate::linalg::{expm, operator_norm, sym_expm, sym_logm, DenseMatrix};

fn check_square_pair(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (a.rows(), a.rows()),
            found: a.shape(),
        });
    }
    a.check_same_shape(b)
}

/// `‖e^{A+B} − (e^{A/N} e^{B/N})^N‖` for each `N`.
pub fn lie_product_errors(a: &DenseMatrix, b: &DenseMatrix, ns: &[u32]) -> Result<Vec<f64>> {
    check_square_pair(a, b)?;
    let exact = expm(&(a + b))?;
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidArgument("N must be positive".into()));
            }
            let s = 1.0 / n as f64;
            let step = &expm(&a.scale(s))? * &expm(&b.scale(s))?;
            operator_norm(&(&exact - &step.powi(n)))
        })
        .collect()
}

/// `(tr e^{A+B}, tr(e^A e^B))` for symmetric `A`, `B`.
pub fn golden_thompson_gap(a: &DenseMatrix, b: &DenseMatrix) -> Result<(f64, f64)> {
    check_square_pair(a, b)?;
    let lhs = sym_expm(&(a + b).symmetrized())?.trace();
    let ea = sym_expm(a)?;
    let eb = sym_expm(b)?;
    Ok((lhs, (&ea * &eb).trace()))
}

/// Midpoint concavity gap of `A ↦ tr exp(H + log A)`:
/// `f((A+B)/2) − (f(A) + f(B))/2`, non-negative by Lieb's theorem.
pub fn lieb_concavity_probe(h: &DenseMatrix, a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    check_square_pair(h, a)?;
    a.check_same_shape(b)?;
    let f = |x: &DenseMatrix| -> Result<f64> {
        let log = sym_logm(x)?;
        Ok(sym_expm(&(h + &log).symmetrized())?.trace())
    };
    let fa = f(a)?;
    let fb = f(b)?;
    let mid = (a + b).scale(0.5).symmetrized();
    Ok(f(&mid)? - 0.5 * (fa + fb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sym_operator_norm, DenseMatrix};
    use crate::prob::RngStream;

    fn sym(r: &mut RngStream, n: usize, scale: f64) -> DenseMatrix {
        let g = DenseMatrix::from_fn(n, n, |_, _| r.normal());
        let s = (&g + &g.transpose()).scale(0.5);
        s.scale(scale / sym_operator_norm(&s).unwrap())
    }

    fn spd(r: &mut RngStream, n: usize) -> DenseMatrix {
        let g = DenseMatrix::from_fn(n, n, |_, _| r.normal());
        &g.t_matmul(&g) + &DenseMatrix::identity(n).scale(0.1)
    }

    #[test]
    fn lie_commuting_and_zero() {
        let a = DenseMatrix::from_diag(&[0.3, -0.2, 0.5]);
        let b = DenseMatrix::from_diag(&[0.1, 0.4, -0.6]);
        for e in lie_product_errors(&a, &b, &[1, 4, 64]).unwrap() {
            assert!(e < 1e-13);
        }
        let z = DenseMatrix::zeros(3, 3);
        let mut r = RngStream::new(1, 0);
        let g = sym(&mut r, 3, 1.0);
        for e in lie_product_errors(&g, &z, &[1, 8]).unwrap() {
            assert!(e < 1e-13);
        }
    }

    #[test]
    fn lie_first_order_rate() {
        let mut r = RngStream::new(2, 0);
        for _ in 0..20 {
            let a = sym(&mut r, 4, 1.0);
            let b = sym(&mut r, 4, 1.0);
            let e = lie_product_errors(&a, &b, &[64, 128]).unwrap();
            let ratio = e[0] / e[1];
            assert!((1.6..=2.4).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn golden_thompson_cases() {
        let a = DenseMatrix::from_diag(&[0.3, -1.0]);
        let b = DenseMatrix::from_diag(&[2.0, 0.5]);
        let (l, r) = golden_thompson_gap(&a, &b).unwrap();
        assert!((l - r).abs() < 1e-10);
        let mut rng = RngStream::new(3, 0);
        let s = sym(&mut rng, 4, 2.0);
        let (l, r) = golden_thompson_gap(&s, &s).unwrap();
        assert!((l - r).abs() < 1e-12 * r);
        for _ in 0..200 {
            let a = sym(&mut rng, 6, 2.0);
            let b = sym(&mut rng, 6, 2.0);
            let (l, r) = golden_thompson_gap(&a, &b).unwrap();
            assert!(l <= r + 1e-9 * r.abs());
        }
        let asym = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(golden_thompson_gap(&asym, &asym).is_err());
    }

    #[test]
    fn lieb_probe_cases() {
        let mut r = RngStream::new(4, 0);
        let a = spd(&mut r, 4);
        let b = spd(&mut r, 4);
        let h = sym(&mut r, 4, 1.0);
        assert!(lieb_concavity_probe(&h, &a, &a).unwrap().abs() < 1e-10);
        assert!(lieb_concavity_probe(&DenseMatrix::zeros(4, 4), &a, &b).unwrap().abs() < 1e-9);
        for _ in 0..100 {
            let a = spd(&mut r, 5);
            let b = spd(&mut r, 5);
            let h = sym(&mut r, 5, 1.0);
            assert!(lieb_concavity_probe(&h, &a, &b).unwrap() >= -1e-9);
        }
        let bad = DenseMatrix::from_diag(&[1.0, -1.0, 1.0, 1.0]);
        assert!(matches!(lieb_concavity_probe(&h, &a, &bad), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn exp_norm_bound() {
        let mut r = RngStream::new(5, 0);
        for _ in 0..50 {
            let scale = 3.0 * r.uniform();
            let a = sym(&mut r, 5, scale);
            let lhs = operator_norm(&sym_expm(&a).unwrap()).unwrap();
            assert!(lhs <= operator_norm(&a).unwrap().exp() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn trace_cauchy_schwarz() {
        let mut r = RngStream::new(6, 0);
        for _ in 0..100 {
            let a = DenseMatrix::from_fn(4, 4, |_, _| r.normal());
            let b = DenseMatrix::from_fn(4, 4, |_, _| r.normal());
            let lhs = (&a * &b).trace().abs();
            let rhs = ((&a * &a.transpose()).trace() * (&b * &b.transpose()).trace()).sqrt();
            assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn h_function_inequality() {
        for k in 0..=1000 {
            let u = 0.01 * k as f64;
            let h = (1.0 + u) * (1.0 + u).ln() - u;
            assert!(h >= (u * u / 2.0) / (1.0 + u / 3.0) - 1e-15);
        }
    }
}
