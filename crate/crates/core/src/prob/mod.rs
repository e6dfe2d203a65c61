//! Scalar and vector randomness: sampling, χ² tails, Carathéodory, Monte Carlo, JL.

mod bernstein;
mod chi2;
mod jl;
mod montecarlo;
mod points;
mod rng;
mod stats;
mod tail;
mod trials;

pub use bernstein::{rademacher_tail_experiment, scalar_bernstein_bound};
pub use chi2::{
    chi2_mgf, chi2_tail_bound, chi2_tail_experiment, two_stability_report, Chi2TailReport,
};
pub use jl::{jl_embed, jl_min_dim, jl_min_dim_from_ln, JlEmbedding};
pub use montecarlo::{monte_carlo_integrate, McEstimate};
pub use points::{approx_caratheodory, radius, PointSet};
pub use rng::{gaussian_vector, RngStream};
pub use stats::{ks_distance, normal_cdf, three_sigma_half_width};
pub use tail::TailReport;
pub use trials::run_trials;
