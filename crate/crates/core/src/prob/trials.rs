use rayon::prelude::*;

use super::rng::RngStream;

/// Runs `trials` independent trials, trial `i` on `rng.substream(i)`.
///
/// Results come back in trial order whatever the thread schedule, so output
/// is a function of the parent stream alone.
pub fn run_trials<T, F>(rng: &RngStream, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut RngStream) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut sub = rng.substream(i as u64);
            f(i, &mut sub)
        })
        .collect()
}
