use std::fs;
use std::path::{Path, PathBuf};

use gradclust_core::dataio::{load_idx, write_csv_dataset};
use gradclust_core::diagnostics::{
    check_fixed_point, check_trace, default_assign_tol, FixedPointReport, TraceReport,
};
use gradclust_core::divergence::PairSpec;
use gradclust_core::{DataSet, DivergencePair, IterationTrace, RunResult, TerminationReason};
use serde::{Deserialize, Serialize};

use crate::config::{Config, Overrides};
use crate::experiment::{run_experiment, run_repetition, ExperimentSummary};
use crate::{exit, to_json, write_output, CliError};

/// Everything needed to re-check a run without the original inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub pair: PairSpec,
    pub dataset: DataSet,
    pub result: RunResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: Config,
    pub seed: u64,
    pub alpha_used: f64,
    pub l_bound: f64,
    pub grad_tol: f64,
    pub termination: TerminationReason,
    pub iterations: usize,
    pub final_cost: f64,
    pub final_accuracy: Option<f64>,
    pub projection_events: usize,
    pub fixed_point: FixedPointReport,
    pub trace_check: TraceReport,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        match self.termination {
            TerminationReason::FixedPoint => exit::FIXED_POINT,
            TerminationReason::MaxIters => exit::MAX_ITERS,
        }
    }
}

fn load_config(path: &Path, overrides: &Overrides) -> Result<Config, CliError> {
    let mut config = Config::load(path)?;
    config.apply(overrides);
    config.validate()?;
    Ok(config)
}

/// Executes repetition 0 of `config` in memory.
pub fn execute_run(config: &Config) -> Result<(RunSummary, RunArtifact), CliError> {
    config.validate()?;
    let clean = config.load_data()?;
    let seed = config.experiment.seed;
    let rep = run_repetition(config, &clean, seed)?;
    let pair = config.pair()?;
    let r = &rep.result;
    let assign_tol = default_assign_tol(&r.final_centers, &r.final_assignment, &rep.data, &pair);
    let fixed_point = check_fixed_point(
        &r.final_centers,
        &r.final_assignment,
        &rep.data,
        &pair,
        assign_tol,
        r.grad_tol_used,
    )?;
    let last = r.trace.records.last().expect("at least one record");
    let summary = RunSummary {
        config: config.clone(),
        seed,
        alpha_used: r.alpha_used,
        l_bound: r.l_bound_used,
        grad_tol: r.grad_tol_used,
        termination: r.trace.termination,
        iterations: r.trace.iterations(),
        final_cost: last.cost,
        final_accuracy: last.accuracy,
        projection_events: r.trace.projection_events,
        fixed_point,
        trace_check: check_trace(&r.trace),
    };
    let artifact = RunArtifact { pair: pair.spec(), dataset: rep.data, result: rep.result };
    Ok((summary, artifact))
}

/// `iter,cost,grad_norm,reassigned,accuracy`; `grad_norm` is the
/// stationarity measure used by the stopping rule.
pub fn trace_csv(trace: &IterationTrace) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["iter", "cost", "grad_norm", "reassigned", "accuracy"])
        .expect("in-memory write");
    for r in &trace.records {
        w.write_record([
            r.iter.to_string(),
            format!("{:?}", r.cost),
            format!("{:?}", r.stationarity),
            r.reassigned.to_string(),
            r.accuracy.map(|a| format!("{a:?}")).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn series_csv(summary: &ExperimentSummary) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["iter", "mean_accuracy", "std_accuracy"]).expect("in-memory write");
    for (t, (m, s)) in summary.mean_accuracy.iter().zip(&summary.std_accuracy).enumerate() {
        w.write_record([t.to_string(), format!("{m:?}"), format!("{s:?}")]).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes `trace.csv`, `summary.json` and `result.json` into the output
/// directory; returns the exit code for the termination reason.
pub fn cmd_run(config_path: &Path, overrides: &Overrides) -> Result<i32, CliError> {
    let config = load_config(config_path, overrides)?;
    let (summary, artifact) = execute_run(&config)?;
    let dir = &config.output.out_dir;
    write_output(&dir.join("trace.csv"), &trace_csv(&artifact.result.trace))?;
    write_output(&dir.join("summary.json"), &to_json(&summary))?;
    write_output(&dir.join("result.json"), &to_json(&artifact))?;
    Ok(summary.exit_code())
}

/// Writes `summary.json` and `series.csv` into the output directory.
pub fn cmd_experiment(config_path: &Path, overrides: &Overrides) -> Result<i32, CliError> {
    let config = load_config(config_path, overrides)?;
    let summary = run_experiment(&config)?;
    let dir = &config.output.out_dir;
    write_output(&dir.join("summary.json"), &to_json(&summary))?;
    write_output(&dir.join("series.csv"), &series_csv(&summary))?;
    Ok(exit::FIXED_POINT)
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub assign_tol: Option<f64>,
    pub grad_tol: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Re-certifies a saved run; exit 0 iff the stored pair is a fixed point.
pub fn cmd_verify(artifact_path: &Path, opts: &VerifyOptions) -> Result<(i32, FixedPointReport), CliError> {
    let text = fs::read(artifact_path)
        .map_err(|e| CliError::Data(format!("{}: {e}", artifact_path.display())))?;
    let artifact: RunArtifact = serde_json::from_slice(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", artifact_path.display())))?;
    let report = verify_artifact(&artifact, opts)?;
    if let Some(out) = &opts.out {
        write_output(out, &to_json(&report))?;
    }
    let code = if report.is_fixed_point { exit::FIXED_POINT } else { exit::VERIFY_FAILED };
    Ok((code, report))
}

pub fn verify_artifact(artifact: &RunArtifact, opts: &VerifyOptions) -> Result<FixedPointReport, CliError> {
    let pair = DivergencePair::try_from(artifact.pair.clone())
        .map_err(|e| CliError::Data(format!("stored pair: {e}")))?;
    let r = &artifact.result;
    let data = &artifact.dataset;
    let assign_tol = opts
        .assign_tol
        .unwrap_or_else(|| default_assign_tol(&r.final_centers, &r.final_assignment, data, &pair));
    let grad_tol = opts.grad_tol.unwrap_or(r.grad_tol_used);
    check_fixed_point(&r.final_centers, &r.final_assignment, data, &pair, assign_tol, grad_tol)
        .map_err(|e| CliError::Data(e.to_string()))
}

/// Converts an IDX pair to CSV with raw pixel values; returns the row count.
pub fn cmd_convert(images: &Path, labels: &Path, out: &Path) -> Result<usize, CliError> {
    let raw = load_idx(images, labels)?;
    let mut buf = Vec::new();
    write_csv_dataset(&mut buf, &raw)?;
    write_output(out, &buf)?;
    Ok(raw.len())
}
