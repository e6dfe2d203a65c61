//! Matrix concentration: Lie product formula, Golden–Thompson, Lieb
//! concavity and matrix Bernstein tails.

mod bernstein;
mod ensembles;
mod trace;

pub use bernstein::{
    bernstein_tail_experiment, lieb_bernstein_bound, theo_bern1_bound, BernsteinReport,
};
pub use ensembles::{ensemble_params, BernsteinParams, MatrixEnsemble};
pub use trace::{golden_thompson_gap, lie_product_errors, lieb_concavity_probe};
