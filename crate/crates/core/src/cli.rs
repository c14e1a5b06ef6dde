//! Command-line entry point. Every subcommand reads one JSON run config and
//! writes its artifacts into the output directory.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::equilibrium::{check_uniqueness_condition, find_equilibria, tatonnement, ScanConfig, TatonnementConfig};
use crate::error::Error;
use crate::model::{validate, Economy, EconomyParams};
use crate::report::{self, to_json};
use crate::scenarios::{parameter_sweep, subsidy_shock_report, SweepAxis};
use crate::var_lab::{
    estimate_var, granger_lead_lag, impulse_response, load_dataset, simulate_economy, DynamicsSpec, VarDataset,
};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "resune", version, about = "Security-utility equilibrium laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the dynamics seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find all equilibria on the scan window.
    Solve(Common),
    /// Compare equilibria before and after a subsidy cut.
    Halving(Common),
    /// Solve across a grid of one parameter.
    Sweep(Common),
    /// Check the direct-versus-feedback slope condition on the scan window.
    UniquenessCheck(Common),
    /// Run discrete price adjustment from a starting price.
    Tatonnement(Common),
    /// Generate a synthetic weekly dataset.
    Simulate(Common),
    /// Estimate the VAR and lead-lag diagnostics.
    Var(Common),
    /// Estimate the VAR and write impulse responses to the halving dummy.
    Irf(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Solve(c)
            | Command::Halving(c)
            | Command::Sweep(c)
            | Command::UniquenessCheck(c)
            | Command::Tatonnement(c)
            | Command::Simulate(c)
            | Command::Var(c)
            | Command::Irf(c) => c,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalvingOptions {
    #[serde(default = "half")]
    pub factor: f64,
}

fn half() -> f64 {
    0.5
}

impl Default for HalvingOptions {
    fn default() -> Self {
        Self { factor: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VarOptions {
    pub lag_order: usize,
    pub horizon: usize,
    pub max_lag: usize,
    /// Dataset CSV to use instead of simulating; relative to the config file.
    pub dataset: Option<PathBuf>,
}

impl Default for VarOptions {
    fn default() -> Self {
        Self { lag_order: 2, horizon: 52, max_lag: 6, dataset: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub economy: EconomyParams,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub halving: HalvingOptions,
    #[serde(default)]
    pub sweep: Option<SweepAxis>,
    #[serde(default)]
    pub tatonnement: Option<TatonnementConfig>,
    #[serde(default)]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub var: VarOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Config,
    Solver,
    Io,
}

#[derive(Debug, Serialize)]
struct CliError {
    kind: Kind,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self { kind: Kind::Config, message: message.into(), path: None }
    }

    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self {
            kind: Kind::Io,
            message: format!("{}: {err}", path.display()),
            path: Some(path.display().to_string()),
        }
    }

    fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Config => EXIT_CONFIG,
            Kind::Solver => EXIT_SOLVER,
            Kind::Io => EXIT_IO,
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let kind = match err {
            Error::Validation(_) | Error::Dataset { .. } | Error::Schema(_) => Kind::Config,
            _ => Kind::Solver,
        };
        Self { kind, message: err.to_string(), path: None }
    }
}

struct Run {
    config: RunConfig,
    economy: Economy,
    config_dir: PathBuf,
    out: PathBuf,
    seed: Option<u64>,
    summary: Vec<String>,
}

impl Run {
    fn write(&mut self, name: &str, contents: &str, what: String) -> Result<(), CliError> {
        let path = report::write_atomic(&self.out, name, contents.as_bytes()).map_err(|e| CliError::io(&self.out.join(name), e))?;
        self.summary.push(format!("wrote {} ({what})", path.display()));
        Ok(())
    }

    fn dynamics(&self) -> Result<DynamicsSpec, CliError> {
        let mut spec = self
            .config
            .dynamics
            .ok_or_else(|| CliError::config("config has no \"dynamics\" block"))?;
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        Ok(spec)
    }

    fn dataset(&self) -> Result<VarDataset, CliError> {
        match &self.config.var.dataset {
            Some(rel) => {
                let path = self.config_dir.join(rel);
                if !path.is_file() {
                    return Err(CliError::io(&path, "dataset file not found"));
                }
                Ok(load_dataset(&path)?)
            }
            None => Ok(simulate_economy(&self.economy, &self.dynamics()?)?),
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn run(command: &Command) -> Result<Vec<String>, CliError> {
    let common = command.common();
    let config = load_config(&common.config)?;
    let economy = validate(config.economy.clone()).map_err(|e| CliError::from(Error::from(e)))?;
    config.scan.check().map_err(|e| CliError::config(e.to_string()))?;
    std::fs::create_dir_all(&common.out).map_err(|e| CliError::io(&common.out, e))?;
    let mut run = Run {
        config,
        economy,
        config_dir: common.config.parent().map(Path::to_path_buf).unwrap_or_default(),
        out: common.out.clone(),
        seed: common.seed,
        summary: Vec::new(),
    };
    let scan = run.config.scan;

    match command {
        Command::Solve(_) => {
            let set = find_equilibria(&run.economy, &scan)?;
            let n = set.equilibria.len();
            run.write("equilibria.csv", &report::equilibria_csv(&set.equilibria), format!("{n} equilibria"))?;
            run.write("equilibria.json", &to_json(&set), format!("{} warnings", set.warnings.len()))?;
        }
        Command::Halving(_) => {
            let r = subsidy_shock_report(&run.economy, run.config.halving.factor, &scan)?;
            let what = format!("delta_P = {}, delta_H = {}", report::fmt_num(r.delta_p), report::fmt_num(r.delta_h));
            run.write("halving_report.json", &to_json(&r), what)?;
            run.write("halving_report.csv", &report::halving_csv(&r), "pre/post/delta".into())?;
        }
        Command::Sweep(_) => {
            let axis = run
                .config
                .sweep
                .clone()
                .ok_or_else(|| CliError::config("config has no \"sweep\" block"))?;
            let r = parameter_sweep(run.economy.params(), &axis, &scan)?;
            let what = format!("{} rows, {} bifurcation intervals", r.rows.len(), r.bifurcation_points.len());
            run.write("sweep.csv", &report::sweep_csv(&r), what)?;
            run.write("sweep.json", &to_json(&r), format!("axis {}", axis.field))?;
        }
        Command::UniquenessCheck(_) => {
            let r = check_uniqueness_condition(&run.economy, &scan)?;
            let what = format!("holds_everywhere = {}", r.holds_everywhere);
            run.write("uniqueness.json", &to_json(&r), what)?;
        }
        Command::Tatonnement(_) => {
            let cfg = run
                .config
                .tatonnement
                .ok_or_else(|| CliError::config("config has no \"tatonnement\" block"))?;
            let r = tatonnement(&run.economy, &cfg, &scan)?;
            let what = format!("{} iterations, {:?}", r.iterations, r.outcome);
            run.write("tatonnement.csv", &report::tatonnement_csv(&r), what)?;
        }
        Command::Simulate(_) => {
            let data = simulate_economy(&run.economy, &run.dynamics()?)?;
            let mut buf = Vec::new();
            data.write_csv(&mut buf)?;
            let text = String::from_utf8(buf).expect("csv is utf-8");
            run.write("dataset.csv", &text, format!("{} weeks", data.len()))?;
        }
        Command::Var(_) => {
            let data = run.dataset()?;
            let opts = run.config.var.clone();
            let model = estimate_var(&data, opts.lag_order)?;
            let lead_lag = granger_lead_lag(&data, opts.max_lag)?;
            let what = format!("p = {}, spectral radius {}", model.lag_order, report::fmt_num(model.spectral_radius));
            run.write("var_model.json", &to_json(&model), what)?;
            run.write("lead_lag.json", &to_json(&lead_lag), format!("max_lag = {}", opts.max_lag))?;
        }
        Command::Irf(_) => {
            let data = run.dataset()?;
            let opts = run.config.var.clone();
            let model = estimate_var(&data, opts.lag_order)?;
            let irf = impulse_response(&model, opts.horizon)?;
            run.write("irf.csv", &report::irf_csv(&irf), format!("{} horizons", irf.horizons.len()))?;
            run.write("irf.json", &to_json(&irf), format!("non_stationary = {}", irf.non_stationary))?;
        }
    }
    Ok(run.summary)
}

/// Parses `argv`, runs the subcommand and returns the process exit status.
/// Summary lines go to stdout, a JSON error object to stderr.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError::config(e.to_string().trim().to_string());
            eprintln!("{}", serde_json::json!({ "error": err }));
            return EXIT_CONFIG;
        }
    };
    match run(&cli.command) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            0
        }
        Err(err) => {
            eprintln!("{}", serde_json::json!({ "error": err }));
            err.exit_code()
        }
    }
}
