use serde::{Deserialize, Serialize};

use super::points::PointSet;
use super::rng::RngStream;
use crate::error::{invalid, Result};

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// `⌈4 (ε²/2 - ε³/3)⁻¹ ln_n⌉`.
pub fn jl_min_dim_from_ln(ln_n: f64, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    if !(ln_n > 0.0) || !ln_n.is_finite() {
        return Err(invalid("ln N must be positive"));
    }
    let x = 4.0 * ln_n / (eps * eps / 2.0 - eps.powi(3) / 3.0);
    Ok((x - 1e-9).ceil() as usize)
}

/// Smallest embedding dimension for `n_points` points at distortion `eps`.
pub fn jl_min_dim(n_points: usize, eps: f64) -> Result<usize> {
    if n_points < 2 {
        return Err(invalid("need at least two points"));
    }
    jl_min_dim_from_ln((n_points as f64).ln(), eps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JlEmbedding {
    pub embedded: PointSet,
    /// Max relative squared-distance error over pairs of distinct points.
    pub max_distortion: f64,
    pub within_eps: bool,
}

/// Embeds by `x ↦ Ax` with i.i.d. `N(0, 1/m)` entries.
pub fn jl_embed(set: &PointSet, eps: f64, m: usize, rng: &mut RngStream) -> Result<JlEmbedding> {
    if m == 0 {
        return Err(invalid("embedding dimension must be positive"));
    }
    let d = set.dim();
    let scale = 1.0 / (m as f64).sqrt();
    let a: Vec<f64> = (0..m * d).map(|_| rng.normal() * scale).collect();
    let images: Vec<Vec<f64>> = set
        .points()
        .iter()
        .map(|x| (0..m).map(|i| crate::linalg::dot(&a[i * d..(i + 1) * d], x)).collect())
        .collect();
    let pts = set.points();
    let mut max_distortion: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let orig: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).powi(2)).sum();
            if orig == 0.0 {
                continue;
            }
            let emb: f64 = images[i].iter().zip(&images[j]).map(|(a, b)| (a - b).powi(2)).sum();
            max_distortion = max_distortion.max((emb - orig).abs() / orig);
        }
    }
    Ok(JlEmbedding {
        embedded: PointSet::new(images)?,
        max_distortion,
        within_eps: max_distortion <= eps,
    })
}
