use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{operator_norm, sgn_default, DenseMatrix};
use crate::prob::RngStream;
use crate::sensing::{OperatorBasis, SamplingOperator, TangentProjector};

/// `l = ⌈log₂(2n²√r)⌉`.
pub fn golfing_batch_count(n: usize, r: usize) -> usize {
    let x = (2.0 * (n * n) as f64 * (r as f64).sqrt()).log2();
    (x - 1e-9).ceil() as usize
}

/// `m_i = ⌈64 ν r n (ln(6nr) + ln(2l) + β ln n)⌉`.
pub fn golfing_batch_size(nu: f64, r: usize, n: usize, l: usize, beta: f64) -> usize {
    let (nf, rf) = (n as f64, r as f64);
    let x = 64.0 * nu * rf * nf * ((6.0 * nf * rf).ln() + (2.0 * l as f64).ln() + beta * nf.ln());
    (x - 1e-9).ceil() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCertificate {
    #[serde(skip)]
    pub y: DenseMatrix,
    pub batch_sizes: Vec<usize>,
    /// `‖Z_i‖_F` for `i = 0..=l`, starting from `‖sgn A‖_F`.
    pub residual_norms: Vec<f64>,
    /// `‖𝒫_T Y − sgn A‖_F`.
    pub cond_tangent: f64,
    /// `‖𝒫_{T⊥} Y‖`.
    pub cond_complement: f64,
    /// Distinct basis indices sampled over all batches.
    pub support: Vec<usize>,
    #[serde(skip)]
    pub basis: OperatorBasis,
}

impl DualCertificate {
    /// `‖Z_i‖_F ≤ ½‖Z_{i−1}‖_F` at every step.
    pub fn halves_each_step(&self) -> bool {
        self.residual_norms.windows(2).all(|w| w[1] <= 0.5 * w[0])
    }
}

/// Golfing scheme: `Y_i = Y_{i−1} + ℛ_i Z_{i−1}`, `Z_i = sgn A − 𝒫_T Y_i`,
/// each `ℛ_i` on a fresh batch of `m_i` indices.
pub fn golfing_certificate(
    basis: &OperatorBasis,
    a: &DenseMatrix,
    p: &TangentProjector,
    batch_sizes: &[usize],
    replacement: bool,
    rng: &mut RngStream,
) -> Result<DualCertificate> {
    let n = basis.n();
    if a.shape() != (n, n) || p.n() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            found: a.shape(),
        });
    }
    if batch_sizes.is_empty() || batch_sizes.contains(&0) {
        return Err(invalid("batch sizes must be positive"));
    }
    let sg = sgn_default(&a.symmetrized())?;
    let mut y = DenseMatrix::zeros(n, n);
    let mut z = sg.clone();
    let mut norms = vec![z.frobenius_norm()];
    let mut taken = vec![false; basis.len()];
    for &m in batch_sizes {
        let op = SamplingOperator::random(basis.clone(), m, replacement, rng)?;
        op.omegas().iter().for_each(|&a| taken[a] = true);
        y += &op.apply(&z)?;
        z = &sg - &p.project(&y)?;
        norms.push(z.frobenius_norm());
    }
    let cond_tangent = (&p.project(&y)? - &sg).frobenius_norm();
    let cond_complement = operator_norm(&p.complement(&y)?)?;
    Ok(DualCertificate {
        y,
        batch_sizes: batch_sizes.to_vec(),
        residual_norms: norms,
        cond_tangent,
        cond_complement,
        support: (0..taken.len()).filter(|&a| taken[a]).collect(),
        basis: basis.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    /// `Y` lies in the span of the sampled basis elements.
    pub in_range: bool,
    /// `‖𝒫_T Y − sgn A‖_F ≤ 1/(2n²)`.
    pub cond_ii: bool,
    /// `‖𝒫_{T⊥} Y‖ ≤ ½`.
    pub cond_iii: bool,
}

impl CertificateCheck {
    pub fn all(&self) -> bool {
        self.in_range && self.cond_ii && self.cond_iii
    }
}

/// Recomputes both conditions from `cert.y` and checks range membership by
/// re-projecting onto the sampled span.
pub fn verify_certificate(cert: &DualCertificate, a: &DenseMatrix, p: &TangentProjector, n: usize) -> Result<CertificateCheck> {
    if cert.y.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            found: cert.y.shape(),
        });
    }
    let sg = sgn_default(&a.symmetrized())?;
    let tangent = (&p.project(&cert.y)? - &sg).frobenius_norm();
    let complement = operator_norm(&p.complement(&cert.y)?)?;
    let mut rest = cert.y.clone();
    for &idx in &cert.support {
        let c = cert.basis.coefficient(idx, &rest);
        cert.basis.add_scaled(idx, -c, &mut rest);
    }
    let scale = cert.y.frobenius_norm().max(1.0);
    Ok(CertificateCheck {
        in_range: rest.frobenius_norm() <= 1e-10 * scale,
        cond_ii: tangent <= 1.0 / (2.0 * (n * n) as f64),
        cond_iii: complement <= 0.5,
    })
}
