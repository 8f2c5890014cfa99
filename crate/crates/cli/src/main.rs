//! `cran-sim`: parameter sweeps, single-point rates and the brute-force
//! verification suite.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure (including a
//! failed verification), 3 I/O error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cran_core::oracle::{self, OracleSettings};
use cran_core::sweep::{self, BaseConfig, Preset, SweepConfig};
use cran_core::{evaluate_point, ExpectationPolicy, FailureModel, Scheme, Strategy};

#[derive(Parser, Debug)]
#[command(name = "cran-sim", version, about = "URLLC/eMBB rate simulator for analog-fronthaul C-RAN")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a preset or JSON-configured sweep and write CSV.
    Sweep(SweepArgs),
    /// Run the brute-force checks of the reduced rate formulas.
    Verify(VerifyArgs),
    /// Evaluate one operating point and print it as JSON.
    Rate(RateArgs),
}

#[derive(Args, Debug)]
struct PolicyArgs {
    /// Seed for Monte Carlo expectations.
    #[arg(long, env = "CRAN_SIM_SEED")]
    seed: Option<u64>,
    /// Expectation strategy.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// State count above which exact enumeration switches to Monte Carlo.
    #[arg(long)]
    exact_state_limit: Option<usize>,
    /// Read the SIC decode-failure indicator as a marginal B(q·eps).
    #[arg(long)]
    marginal_failures: bool,
}

impl PolicyArgs {
    fn apply(&self, policy: &mut ExpectationPolicy, failures: &mut FailureModel) {
        if let Some(seed) = self.seed {
            policy.seed = seed;
        }
        if let Some(s) = self.strategy {
            policy.strategy = match s {
                StrategyArg::Exact => Strategy::ExactEnumeration,
                StrategyArg::Mc => Strategy::MonteCarlo,
            };
        }
        if let Some(n) = self.samples {
            policy.sample_count = n;
        }
        if let Some(n) = self.exact_state_limit {
            policy.exact_state_limit = n;
        }
        if self.marginal_failures {
            *failures = FailureModel::Marginal;
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    Gamma,
    Q,
    Rho,
    Latency,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Gamma => Preset::Gamma,
            PresetArg::Q => Preset::Q,
            PresetArg::Rho => Preset::Rho,
            PresetArg::Latency => Preset::Latency,
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Reference sweep to run.
    #[arg(long, value_enum, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<PresetArg>,
    /// JSON sweep configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path; stdout when neither this nor the config sets one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the number of cells.
    #[arg(long)]
    cells: Option<usize>,
    /// Override a base parameter, e.g. `--set alpha_sq=0.3` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Comma-separated schemes replacing the configured ones.
    #[arg(long, value_delimiter = ',')]
    schemes: Vec<Scheme>,
    /// URLLC powers in dB, one curve each (comma-separated).
    #[arg(long = "p-u-db", value_delimiter = ',', allow_negative_numbers = true)]
    p_u_db: Vec<f64>,
    /// Also write one gnuplot data file per curve into this directory.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Random parameter tuples besides the reference point.
    #[arg(long, default_value_t = 50)]
    tuples: usize,
    #[arg(long, env = "CRAN_SIM_SEED", default_value_t = 0)]
    seed: u64,
    /// Noise realizations for the combining covariance check.
    #[arg(long, default_value_t = 20_000)]
    noise_samples: usize,
    /// Print reports as JSON lines.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RateArgs {
    #[arg(long, default_value = "OMA")]
    scheme: Scheme,
    /// JSON object of base parameters (same keys as a sweep's `base`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a base parameter (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(flatten)]
    policy: PolicyArgs,
}

/// Writes to stdout; a reader that went away (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(cran_core::Error::from(e)).context("writing to stdout")
        }
        _ => Ok(()),
    }
}

fn apply_sets(base: &mut BaseConfig, sets: &[String]) -> Result<()> {
    for s in sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| cran_core::Error::Config(format!("expected KEY=VALUE, got '{s}'")))?;
        base.set(k, v)?;
    }
    Ok(())
}

fn run_sweep_command(args: SweepArgs) -> Result<()> {
    let mut config = match (&args.preset, &args.config) {
        (Some(p), _) => sweep::preset((*p).into()),
        (None, Some(path)) => SweepConfig::load(path)?,
        (None, None) => unreachable!("clap requires one of --preset/--config"),
    };
    if let Some(m) = args.cells {
        config.base.cells = m;
    }
    apply_sets(&mut config.base, &args.sets)?;
    if !args.schemes.is_empty() {
        config.schemes = args.schemes.clone();
    }
    if !args.p_u_db.is_empty() {
        for v in &mut config.variants {
            v.remove("p_u_db");
        }
        config.variants.dedup();
        config = config.with_urllc_powers_db(&args.p_u_db);
    }
    args.policy.apply(&mut config.policy, &mut config.failure_model);
    let out = args.out.clone().or_else(|| config.output_path.as_ref().map(PathBuf::from));

    let result = sweep::run_sweep(&config, args.jobs)?;
    match &out {
        Some(path) => {
            result.write(path)?;
            eprintln!("wrote {} rows to {}", result.rows.len(), path.display());
        }
        None => emit(&result.to_csv())?,
    }
    if let Some(dir) = &args.plot_dir {
        let files = result.write_plot_files(dir)?;
        eprintln!("wrote {} plot data files to {}", files.len(), dir.display());
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<bool> {
    let settings = OracleSettings {
        tuples: args.tuples,
        seed: args.seed,
        noise_samples: args.noise_samples,
        ..OracleSettings::default()
    };
    let reports = oracle::run_all(&settings)?;
    let mut text = String::new();
    for r in &reports {
        let line = if args.json {
            serde_json::to_string(r).context("serializing report")?
        } else {
            r.to_string()
        };
        text.push_str(&line);
        text.push('\n');
    }
    emit(&text)?;
    Ok(reports.iter().all(|r| r.passed))
}

fn run_rate(args: RateArgs) -> Result<()> {
    let mut base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| cran_core::Error::Io(format!("reading {}: {e}", path.display())))?;
            serde_json::from_str::<BaseConfig>(&text)
                .map_err(|e| cran_core::Error::Config(format!("{}: {e}", path.display())))?
        }
        None => BaseConfig::default(),
    };
    apply_sets(&mut base, &args.sets)?;
    let mut policy = ExpectationPolicy::default();
    let mut failures = FailureModel::Conditional;
    args.policy.apply(&mut policy, &mut failures);
    let point = evaluate_point(&base.to_params()?, args.scheme, &policy, failures)?;
    emit(&(serde_json::to_string_pretty(&point).context("serializing rate point")? + "\n"))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<cran_core::Error>())
        .map(|e| e.exit_code() as u8)
        .unwrap_or(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Sweep(args) => run_sweep_command(args).map(|()| true),
        Command::Verify(args) => run_verify(args),
        Command::Rate(args) => run_rate(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
