use serde::{Deserialize, Serialize};

use super::rng::RngStream;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// `‖f‖₂/√n`, present when the caller supplied `‖f‖₂`.
    pub rms_bound: Option<f64>,
}

/// Averages `f(x_j)` over `n` draws `(x_j, f(x_j)) = sampler(rng)` from a
/// probability measure.
pub fn monte_carlo_integrate<P>(
    mut sampler: impl FnMut(&mut RngStream) -> (P, f64),
    n: usize,
    f_l2_norm: Option<f64>,
    rng: &mut RngStream,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(invalid("monte carlo needs at least one sample"));
    }
    let total: f64 = (0..n).map(|_| sampler(rng).1).sum();
    Ok(McEstimate {
        estimate: total / n as f64,
        rms_bound: f_l2_norm.map(|f| f / (n as f64).sqrt()),
    })
}
