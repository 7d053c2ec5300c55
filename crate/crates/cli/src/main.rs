use std::path::PathBuf;
use std::process::ExitCode;

use bec_analogue::special::identity_table;
use bec_analogue_cli::error::{EXIT_NUMERIC, EXIT_OK, EXIT_WARNINGS};
use bec_analogue_cli::{load_scenario, run, CliError, Preset, RunReport, ScenarioConfig, Verb};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bec-analogue",
    version,
    about = "Expanding-condensate analogue cosmology scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Thomas-Fermi parameters and validity checks.
    Derive(RunArgs),
    /// Integrate the scale factor.
    Evolve(RunArgs),
    /// Apparent and particle horizons.
    Horizons(RunArgs),
    /// Quasi-2D frozen density spectrum.
    Spectrum2d(RunArgs),
    /// 3D frozen phase and density spectra.
    Spectrum3d(RunArgs),
    /// Every stage listed in the scenario's analysis block.
    Report(RunArgs),
    /// Print the special-function identity table.
    Selftest,
    /// Print a preset as JSON.
    Preset { name: Preset },
}

#[derive(Args)]
struct RunArgs {
    /// Preset name or path to a scenario JSON file.
    #[arg(long, default_value = "sodium-q2d")]
    scenario: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Relative tolerance of the scale-factor integration.
    #[arg(long)]
    tol: Option<f64>,
    /// Lower end of the wavenumber grid in 1/m.
    #[arg(long)]
    kappa_min: Option<f64>,
    /// Upper end of the wavenumber grid in 1/m.
    #[arg(long)]
    kappa_max: Option<f64>,
    #[arg(long)]
    kappa_points: Option<usize>,
}

impl RunArgs {
    fn scenario(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = load_scenario(&self.scenario)?;
        if let Some(t) = self.tol {
            cfg.numeric.tolerance = t;
        }
        if self.kappa_min.is_some() {
            cfg.numeric.kappa_min_per_m = self.kappa_min;
        }
        if self.kappa_max.is_some() {
            cfg.numeric.kappa_max_per_m = self.kappa_max;
        }
        if let Some(n) = self.kappa_points {
            cfg.numeric.kappa_points = n;
        }
        Ok(cfg)
    }
}

fn print_summary(report: &RunReport) {
    println!("scenario {} ({})", report.scenario, report.verb);
    println!("stages: {}", report.stages.join(", "));
    for row in &report.acceptance {
        println!(
            "  {:<28} {:>12.4e} {:<8} published {:>11.4e} ratio {:>8.4}",
            row.key, row.computed, row.unit, row.published, row.ratio
        );
    }
    for w in &report.warnings {
        eprintln!("warning [{}]: {}", w.kind, w.message);
    }
    println!("files: {}", report.files.join(", "));
}

fn execute(verb: Verb, args: &RunArgs) -> Result<i32, CliError> {
    let cfg = args.scenario()?;
    let report = run(&cfg, verb, &args.out)?;
    print_summary(&report);
    Ok(if report.warnings.is_empty() {
        EXIT_OK
    } else {
        EXIT_WARNINGS
    })
}

fn selftest() -> i32 {
    let rows = identity_table();
    for r in &rows {
        let status = if r.passed() { "ok  " } else { "FAIL" };
        println!(
            "{status} {:<44} {:>22.15e} rel {:.2e} (tol {:.0e})",
            r.name, r.computed, r.rel_error, r.tolerance
        );
    }
    if rows.iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_NUMERIC
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Derive(a) => execute(Verb::Derive, a),
        Command::Evolve(a) => execute(Verb::Evolve, a),
        Command::Horizons(a) => execute(Verb::Horizons, a),
        Command::Spectrum2d(a) => execute(Verb::Spectrum2d, a),
        Command::Spectrum3d(a) => execute(Verb::Spectrum3d, a),
        Command::Report(a) => execute(Verb::Report, a),
        Command::Selftest => Ok(selftest()),
        Command::Preset { name } => {
            print!("{}", name.config().to_json());
            Ok(EXIT_OK)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
