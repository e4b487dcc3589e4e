use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gradclust_cli::commands::VerifyOptions;
use gradclust_cli::{cmd_convert, cmd_experiment, cmd_run, cmd_verify, CliError, Overrides};
use gradclust_core::{PairKind, StepSizeMode, UpdateRule};

#[derive(Parser)]
#[command(name = "gradclust", version, about = "Gradient-based clustering runs and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// `theory` or `paper_mnist`
    #[arg(long, value_parser = parse::<StepSizeMode>)]
    alpha_mode: Option<StepSizeMode>,
    /// Allow step sizes at or above 2/L.
    #[arg(long)]
    unsafe_alpha: bool,
    /// `gradient` or `lloyd`
    #[arg(long, value_parser = parse_update)]
    update: Option<UpdateRule>,
    /// `sqeuclid`, `mahalanobis`, `huber` or `js`
    #[arg(long, value_parser = parse::<PairKind>)]
    pair: Option<PairKind>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run once and write trace.csv, summary.json and result.json.
    Run(RunArgs),
    /// Run seeded repetitions and write summary.json and series.csv.
    Experiment(RunArgs),
    /// Check that a saved result.json holds a fixed point.
    Verify {
        result: PathBuf,
        #[arg(long)]
        assign_tol: Option<f64>,
        #[arg(long)]
        grad_tol: Option<f64>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert an IDX image/label pair to CSV.
    Convert { images: PathBuf, labels: PathBuf, out: PathBuf },
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn parse_update(s: &str) -> Result<UpdateRule, String> {
    match s {
        "gradient" => Ok(UpdateRule::Gradient),
        "lloyd" => Ok(UpdateRule::Lloyd),
        other => Err(format!("unknown update rule `{other}`")),
    }
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            alpha: self.alpha,
            alpha_mode: self.alpha_mode,
            unsafe_alpha: self.unsafe_alpha,
            update: self.update,
            pair: self.pair,
            delta: self.delta,
            epsilon: self.epsilon,
            out_dir: self.out_dir.clone(),
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run(a) => cmd_run(&a.config, &a.overrides()),
        Command::Experiment(a) => cmd_experiment(&a.config, &a.overrides()),
        Command::Verify { result, assign_tol, grad_tol, out } => {
            let (code, report) = cmd_verify(&result, &VerifyOptions { assign_tol, grad_tol, out })?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            let _ = writeln!(std::io::stdout(), "{text}");
            Ok(code)
        }
        Command::Convert { images, labels, out } => {
            let rows = cmd_convert(&images, &labels, &out)?;
            eprintln!("wrote {rows} rows to {}", out.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { gradclust_cli::exit::CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = dispatch(cli).unwrap_or_else(|e| {
        eprintln!("gradclust: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
