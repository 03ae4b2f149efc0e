use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use selmut_core::{
    concentration_report, epsilon_sweep, EpsilonSweep, Error, Result, SpectralProblem,
    SpectralSummary, SweepPoint,
};

use crate::config::{Model, RunConfig};
use crate::output;
use crate::pipeline::{self, Prediction, RunReport};

pub const FIG1: &str = include_str!("../configs/fig1.conf");
pub const FIG2: &str = include_str!("../configs/fig2.conf");
pub const FIG3: &str = include_str!("../configs/fig3.conf");
pub const FIG4: &str = include_str!("../configs/fig4.conf");

#[derive(Debug, Parser)]
#[command(
    name = "selmut",
    version,
    about = "Selection-mutation population dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to `output_dir` from the config, then `out/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub checks: CheckArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Evaluate the checks enabled in the config (default).
    #[arg(long, overrides_with = "no_check")]
    pub check: bool,
    #[arg(long, overrides_with = "check")]
    pub no_check: bool,
}

impl CheckArgs {
    fn enabled(&self) -> bool {
        !self.no_check
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Figure {
    pub fn config_text(self) -> &'static str {
        match self {
            Figure::Fig1 => FIG1,
            Figure::Fig2 => FIG2,
            Figure::Fig3 => FIG3,
            Figure::Fig4 => FIG4,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured pipeline.
    Run(RunArgs),
    /// Run the configuration with the selection-only model.
    SimulateIde(RunArgs),
    /// Run the configuration with the selection-mutation model.
    SimulatePde(RunArgs),
    /// Principal and second eigenpairs for the configured mutation rate.
    Eigen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Principal eigenpairs along the configured `epsilon` list.
    SweepEps {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Peaks, limit weights and the surviving peak, without simulating.
    Predict {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the bundled figure configurations.
    Reproduce {
        figure: Figure,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        checks: CheckArgs,
    },
}

fn output_dir(cfg: &RunConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| Path::new("out").join(&cfg.name))
}

/// Runs a configuration and writes its artifacts; true when every enabled
/// check passed.
pub fn run_config(cfg: &RunConfig, out: Option<&Path>, checks: bool) -> Result<bool> {
    let outcome = pipeline::run(cfg, checks)?;
    let dir = output_dir(cfg, out);
    output::write_trajectory(&dir, &outcome.trajectory)?;
    output::write(&dir, "summary.json", &output::to_json(&outcome.report)?)?;
    print_checks(&outcome.report, &dir);
    Ok(outcome.report.all_passed())
}

fn print_checks(report: &RunReport, dir: &Path) {
    println!(
        "{}: {} model, t = {}, rho = {:.6}; artifacts in {}",
        report.name,
        report.model,
        report.t_final,
        report.final_rho,
        dir.display()
    );
    for c in &report.checks {
        println!(
            "  {} {}: {:.6e} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.target
        );
    }
}

#[derive(Serialize)]
struct EigenReport {
    beta: f64,
    summary: SpectralSummary,
    residual: f64,
    second_residual: f64,
    peak_locations: Vec<f64>,
    peak_fractions: Vec<f64>,
    off_peak: f64,
}

fn eigen(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    if !(cfg.beta > 0.0) {
        return Err(Error::Config {
            line: 0,
            message: "eigen needs a positive `beta`".into(),
        });
    }
    let landscape = cfg.landscape()?;
    let n0 = cfg.initial_density()?;
    let problem = SpectralProblem::new(&landscape, cfg.beta)?;
    let pair = problem.principal()?;
    let second = problem.second()?;
    let summary = problem.summary(Some(&n0))?;
    let prediction = pipeline::predict(cfg)?;
    let locations: Vec<f64> = prediction.peaks.iter().map(|p| p.location).collect();
    let (peak_fractions, off_peak) = if locations.is_empty() {
        (Vec::new(), 1.0)
    } else {
        let rep = concentration_report(landscape.grid(), &pair.psi, &locations, cfg.check_radius)?;
        (rep.fractions, rep.off_peak)
    };
    let point = SweepPoint {
        epsilon: cfg.beta,
        lambda: summary.lambda,
        lambda2: summary.lambda2,
        gamma: summary.gamma,
        degenerate: summary.degenerate,
        residual: pair.residual,
        peak_fractions: peak_fractions.clone(),
        off_peak,
    };
    let report = EigenReport {
        beta: cfg.beta,
        summary,
        residual: pair.residual,
        second_residual: second.residual,
        peak_locations: locations,
        peak_fractions,
        off_peak,
    };
    let dir = output_dir(cfg, out);
    let json = output::to_json(&report)?;
    output::write(&dir, "eigen.csv", &output::eigen_csv("beta", &[point]))?;
    output::write(
        &dir,
        "psi.csv",
        &output::profile_csv(landscape.grid(), &pair.psi, "psi"),
    )?;
    output::write(&dir, "eigen.json", &json)?;
    print!("{json}");
    Ok(())
}

fn sweep(cfg: &RunConfig, out: Option<&Path>, jobs: usize) -> Result<()> {
    if cfg.epsilons.is_empty() {
        return Err(Error::Config {
            line: 0,
            message: "sweep-eps needs an `epsilon` list".into(),
        });
    }
    let landscape = cfg.landscape()?;
    let result: EpsilonSweep = epsilon_sweep(&landscape, &cfg.epsilons, cfg.check_radius, jobs)?;
    let dir = output_dir(cfg, out);
    let json = output::to_json(&result)?;
    output::write(
        &dir,
        "eigen.csv",
        &output::eigen_csv("epsilon", &result.points),
    )?;
    output::write(&dir, "sweep.json", &json)?;
    print!("{json}");
    Ok(())
}

fn predict(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let prediction: Prediction = pipeline::predict(cfg)?;
    let json = output::to_json(&prediction)?;
    if let Some(dir) = out {
        output::write(dir, "predict.json", &json)?;
    }
    print!("{json}");
    Ok(())
}

fn with_model(path: &Path, model: Model) -> Result<RunConfig> {
    let mut cfg = RunConfig::from_file(path)?;
    cfg.model = model;
    if model == Model::Ide {
        cfg.beta = 0.0;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Dispatches a parsed command; `Ok(false)` means a check failed.
pub fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(a) => run_config(
            &RunConfig::from_file(&a.config)?,
            a.out.as_deref(),
            a.checks.enabled(),
        ),
        Command::SimulateIde(a) => run_config(
            &with_model(&a.config, Model::Ide)?,
            a.out.as_deref(),
            a.checks.enabled(),
        ),
        Command::SimulatePde(a) => run_config(
            &with_model(&a.config, Model::Pde)?,
            a.out.as_deref(),
            a.checks.enabled(),
        ),
        Command::Eigen { config, out } => {
            eigen(&RunConfig::from_file(&config)?, out.as_deref()).map(|_| true)
        }
        Command::SweepEps { config, out, jobs } => {
            sweep(&RunConfig::from_file(&config)?, out.as_deref(), jobs).map(|_| true)
        }
        Command::Predict { config, out } => {
            predict(&RunConfig::from_file(&config)?, out.as_deref()).map(|_| true)
        }
        Command::Reproduce {
            figure,
            out,
            checks,
        } => run_config(
            &RunConfig::parse(figure.config_text())?,
            out.as_deref(),
            checks.enabled(),
        ),
    }
}

/// Exit status: 0 success, 1 failed check, 2 rejected input, 3 numerical failure.
pub fn exit_code(result: &Result<bool>) -> u8 {
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) if e.is_numerical() => 3,
        Err(_) => 2,
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(cli);
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&result))
}
