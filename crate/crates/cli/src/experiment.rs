use gradclust_core::dataio::{derive_seed, init_centers};
use gradclust_core::engine::run;
use gradclust_core::{DataSet, RunResult, TerminationReason};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::CliError;

/// Sub-stream of a repetition seed used for noise injection.
pub const NOISE_STREAM: u64 = 1;
/// Sub-stream of a repetition seed used for center initialization.
pub const INIT_STREAM: u64 = 2;

/// Environment variable capping the number of concurrent repetitions.
pub const THREADS_ENV: &str = "GRADCLUST_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionSummary {
    pub seed: u64,
    pub iterations: usize,
    pub termination: TerminationReason,
    pub final_cost: f64,
    pub final_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: Config,
    pub alpha_used: f64,
    pub seeds: Vec<u64>,
    pub repetitions: Vec<RepetitionSummary>,
    pub mean_final_accuracy: Option<f64>,
    pub std_final_accuracy: Option<f64>,
    /// Per-iteration accuracy mean, each run carried forward after it stops.
    pub mean_accuracy: Vec<f64>,
    /// Per-iteration sample standard deviation matching `mean_accuracy`.
    pub std_accuracy: Vec<f64>,
}

/// Inputs and outcome of one repetition.
pub struct Repetition {
    pub seed: u64,
    pub data: DataSet,
    pub result: RunResult,
}

/// Runs repetition `seed`: resample noise and the initial centers from
/// sub-seeds, then run the engine.
pub fn run_repetition(config: &Config, clean: &DataSet, seed: u64) -> Result<Repetition, CliError> {
    let pair = config.pair()?;
    let data = config.noisy(clean, derive_seed(seed, NOISE_STREAM))?;
    let init = init_centers(
        config.experiment.init,
        &data,
        config.experiment.k,
        &pair,
        derive_seed(seed, INIT_STREAM),
    )?;
    let alpha = config.alpha(&pair, &data)?;
    let result = run(&data, &pair, init, &config.step_config(alpha, seed))?;
    Ok(Repetition { seed, data, result })
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}={v} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// Runs every repetition and aggregates them in repetition order.
pub fn run_experiment(config: &Config) -> Result<ExperimentSummary, CliError> {
    config.validate()?;
    let clean = config.load_data()?;
    let pair = config.pair()?;
    let alpha_used = config.alpha(&pair, &clean)?;
    let seeds: Vec<u64> = (0..config.experiment.repetitions as u64)
        .map(|i| config.experiment.seed.wrapping_add(i))
        .collect();

    let work = || {
        seeds
            .par_iter()
            .map(|&s| {
                run_repetition(config, &clean, s).map(|r| {
                    let acc = r.result.trace.records.iter().map(|x| x.accuracy).collect::<Vec<_>>();
                    (summarize(&r), acc)
                })
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let outcomes = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let (repetitions, accuracies): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let finals: Option<Vec<f64>> = repetitions.iter().map(|r| r.final_accuracy).collect();
    let series: Option<Vec<Vec<f64>>> = accuracies
        .into_iter()
        .map(|a| a.into_iter().collect::<Option<Vec<f64>>>())
        .collect();
    let (mean_accuracy, std_accuracy) = series.map(|s| aggregate(&s)).unwrap_or_default();
    let (mean_final_accuracy, std_final_accuracy) = match finals {
        Some(f) => {
            let (m, s) = mean_std(&f);
            (Some(m), Some(s))
        }
        None => (None, None),
    };
    Ok(ExperimentSummary {
        config: config.clone(),
        alpha_used,
        seeds,
        repetitions,
        mean_final_accuracy,
        std_final_accuracy,
        mean_accuracy,
        std_accuracy,
    })
}

fn summarize(r: &Repetition) -> RepetitionSummary {
    let last = r.result.trace.records.last().expect("at least one record");
    RepetitionSummary {
        seed: r.seed,
        iterations: r.result.trace.iterations(),
        termination: r.result.trace.termination,
        final_cost: last.cost,
        final_accuracy: last.accuracy,
    }
}

/// Mean and sample standard deviation; the deviation of one value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-index mean and standard deviation with each series padded by its
/// final value up to the longest length.
pub fn aggregate(series: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let len = series.iter().map(Vec::len).max().unwrap_or(0);
    let mut column = Vec::with_capacity(series.len());
    (0..len)
        .map(|t| {
            column.clear();
            column.extend(series.iter().map(|s| s[t.min(s.len() - 1)]));
            mean_std(&column)
        })
        .unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_carries_final_value_forward() {
        let (m, s) = aggregate(&[vec![0.5, 1.0], vec![0.5, 0.75, 0.5]]);
        assert_eq!(m, vec![0.5, 0.875, 0.75]);
        assert_eq!(s[0], 0.0);
        assert!((s[2] - (0.125f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_value_has_zero_std() {
        assert_eq!(mean_std(&[0.3]), (0.3, 0.0));
    }
}
