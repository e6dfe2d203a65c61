//! Dense linear algebra kernel.

mod decomp;
mod functions;
pub mod io;
mod matrix;

pub use decomp::{
    default_rank_tol, null_space, orthonormal_columns, polar_factor, svd, sym_eig, SvdFactors,
    SymEig, SYMMETRY_TOL,
};
pub(crate) use decomp::extend_orthonormal;
pub use functions::{
    eigenvalue_triangle_gap, expm, frobenius_inner, nuclear_duality_gap, nuclear_norm,
    operator_norm, schatten_norm, sgn, sgn_default, singular_triangle_gap, singular_values,
    sym_expm, sym_logm, sym_operator_norm, DualityProbe,
};
pub(crate) use functions::inner_unchecked;
pub use matrix::{dot, norm2, DenseMatrix};
