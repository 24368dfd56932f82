//! Monte Carlo experiments: abort-rate and pseudodeterminism estimators,
//! distinguishing games for the ⊥-PRG and ⊥-PRF, and forgery experiments
//! with pluggable adversaries.
//!
//! Trials run on rayon's current thread pool. Each block of trials gets its
//! own tape split off the caller's tape in a fixed order, so results do not
//! depend on the number of threads.

use rayon::prelude::*;

use crate::error::Result;
use crate::tape::RandomTape;

pub mod estimate;
pub mod forgery;
pub mod games;
pub mod plants;
pub mod report;

pub use report::{BoundKind, ExperimentReport, Metric, ReportVerdict, Z_99};

const BLOCK: usize = 64;

/// Runs `f` once per trial and collects the results in trial order.
pub fn run_trials<T, F>(trials: usize, tape: &mut RandomTape, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RandomTape) -> Result<T> + Sync,
{
    let blocks: Vec<(usize, RandomTape)> = (0..trials)
        .step_by(BLOCK)
        .map(|start| (BLOCK.min(trials - start), tape.split()))
        .collect();
    let results = blocks
        .into_par_iter()
        .map(|(n, mut t)| (0..n).map(|_| f(&mut t)).collect::<Result<Vec<T>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(results.into_iter().flatten().collect())
}

/// Number of trials for which `f` returned `true`.
pub fn count_trials<F>(trials: usize, tape: &mut RandomTape, f: F) -> Result<usize>
where
    F: Fn(&mut RandomTape) -> Result<bool> + Sync,
{
    Ok(run_trials(trials, tape, f)?.into_iter().filter(|&b| b).count())
}

/// Smallest `n` with `exp(-n · mean_bound · deviation² / 2) <= 1 - confidence`,
/// and at least 1.
pub fn chernoff_sample_size(deviation: f64, mean_bound: f64, confidence: f64) -> Result<usize> {
    use crate::error::Error;
    if !(deviation > 0.0 && deviation <= 1.0) {
        return Err(Error::InvalidParameter(format!("deviation {deviation} outside (0, 1]")));
    }
    if !(mean_bound > 0.0 && mean_bound <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "mean bound {mean_bound} outside (0, 1]"
        )));
    }
    if !(0.0..1.0).contains(&confidence) {
        return Err(Error::InvalidParameter(format!(
            "confidence {confidence} outside [0, 1)"
        )));
    }
    let n = 2.0 * (1.0 / (1.0 - confidence)).ln() / (mean_bound * deviation * deviation);
    // Guard against 11.999999 style rounding before taking the ceiling.
    Ok(((n - 1e-9).ceil() as usize).max(1))
}
