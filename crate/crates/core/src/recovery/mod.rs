//! Nuclear-norm decoding, null-space-property falsifiers and dual certificates.

mod affine;
mod concentration;
mod golfing;
mod nsp;
mod solver;
mod svt;

pub use affine::{affine_project, AffineProjector, Measurement};
pub use concentration::{
    restricted_deviation_norm, tangent_concentration_bound, tangent_operator_concentration,
    tangent_sample_count,
};
pub use golfing::{
    golfing_batch_count, golfing_batch_size, golfing_certificate, verify_certificate,
    CertificateCheck, DualCertificate,
};
pub use nsp::{nsp_falsify, rank_nsp_falsify, NspReport, Witness, TIE_TOL as NSP_TIE_TOL};
pub use solver::{complete, RecoveryReport, SolverConfig};
pub use svt::svt;
