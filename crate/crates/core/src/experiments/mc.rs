//! Deterministic Monte-Carlo trial runner.
//!
//! Trial `t` always receives `trial_seed(master_seed, t)` and results are
//! returned in trial order, so every reduction is independent of how trials
//! were scheduled across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::trial_seed;

/// Monte-Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: usize,
    pub master_seed: u64,
    /// Worker threads; 0 picks the machine default, 1 runs sequentially.
    pub parallelism: usize,
}

impl McConfig {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            parallelism: 0,
        }
    }

    pub fn with_parallelism(self, parallelism: usize) -> Self {
        Self { parallelism, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Runs `trial(t, seed_t)` for every trial index and returns the results in
/// index order. The first failing trial (by index) aborts the run.
pub fn run_trials<T, F>(mc: &McConfig, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync + Send,
{
    mc.validate()?;
    let seed = |t: usize| trial_seed(mc.master_seed, t as u64);
    #[cfg(feature = "parallel")]
    if mc.parallelism != 1 {
        return run_parallel(mc, |t| trial(t, seed(t)));
    }
    (0..mc.trials).map(|t| trial(t, seed(t))).collect()
}

#[cfg(feature = "parallel")]
fn run_parallel<T, F>(mc: &McConfig, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(mc.parallelism)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    // collecting into Vec<Result> keeps index order; the first error by
    // index is then reported regardless of completion order
    let results: Vec<Result<T>> = pool.install(|| (0..mc.trials).into_par_iter().map(&trial).collect());
    results.into_iter().collect()
}

/// Arithmetic mean, summed in slice order.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased standard deviation; 0 for a single value.
pub fn std_dev(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mu = mean(values);
    (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Standard error of the mean, `std_dev/√n`; 0 for a single value.
pub fn std_error(values: &[f64]) -> f64 {
    std_dev(values) / (values.len().max(1) as f64).sqrt()
}

/// `(1/N)·Σ|xₜ − limit|²`
pub fn mse(values: &[f64], limit: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().map(|v| (v - limit).powi(2)).sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_come_back_in_trial_order() {
        for threads in [1, 2, 3] {
            let mc = McConfig::new(50, 9).with_parallelism(threads);
            let out = run_trials(&mc, |t, s| Ok((t, s))).unwrap();
            for (i, (t, s)) in out.iter().enumerate() {
                assert_eq!(*t, i);
                assert_eq!(*s, trial_seed(9, i as u64));
            }
        }
    }

    #[test]
    fn first_error_by_index_wins() {
        let mc = McConfig::new(20, 0).with_parallelism(4);
        let err = run_trials(&mc, |t, _| {
            if t >= 7 {
                Err(Error::InvalidArgument(format!("{t}")))
            } else {
                Ok(t)
            }
        })
        .unwrap_err();
        assert_eq!(err, Error::InvalidArgument("7".into()));
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_trials(&McConfig::new(0, 0), |_, _| Ok(())).is_err());
    }

    #[test]
    fn statistics() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(std_dev(&[4.0]), 0.0);
        assert!((std_dev(&[1.0, 2.0, 3.0]) - 1.0).abs() < 1e-15);
        assert!((std_error(&[1.0, 2.0, 3.0, 4.0]) - std_dev(&[1.0, 2.0, 3.0, 4.0]) / 2.0).abs() < 1e-15);
        assert_eq!(mse(&[1.0, 3.0], 2.0), 1.0);
    }
}
