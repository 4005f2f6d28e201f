//! Thermal Casimir-Polder scans from the command line.
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 numerical
//! non-convergence (partial results are still written with per-row status).

mod config;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{GeometryKind, Scenario};
use cp_thermal::cylinder::CylinderConfig;
use cp_thermal::engine::{self, PotentialCurve, SampleStatus};
use cp_thermal::keldysh;
use cp_thermal::planar::PlanarConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "cp-thermal",
    about = "Thermal Casimir-Polder potentials for half-space, cavity and cylinder geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for position sweeps (default: all cores;
    /// CP_THERMAL_THREADS is used when the flag is absent).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print progress information.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Parser)]
struct ScanArgs {
    /// Scenario configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file path.
    #[arg(long)]
    output: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Potential and force outside a half-space wall.
    Halfspace(ScanArgs),
    /// Potential and force inside a two-mirror planar cavity.
    Cavity(ScanArgs),
    /// Potential and force inside a cylindrical cavity.
    Cylinder(ScanArgs),
    /// Run the built-in verification battery and emit a JSON report.
    Verify {
        /// Report path (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("CP_THERMAL_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() {
    let cli = Cli::parse();
    init_threads(cli.threads);
    let code = match cli.command {
        Command::Halfspace(args) => run_scan(GeometryKind::HalfSpace, &args, cli.verbose),
        Command::Cavity(args) => run_scan(GeometryKind::Cavity, &args, cli.verbose),
        Command::Cylinder(args) => run_scan(GeometryKind::Cylinder, &args, cli.verbose),
        Command::Verify { output } => run_verify(output.as_deref(), cli.verbose),
    };
    std::process::exit(code);
}

fn run_scan(geometry: GeometryKind, args: &ScanArgs, verbose: bool) -> i32 {
    let scenario = match config::parse_file(&args.config, geometry) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return 2;
        }
    };
    if verbose {
        eprintln!(
            "{}: {} scan points, molecule '{}' ({} transitions), T = {} K",
            geometry.name(),
            scenario.scan.len(),
            scenario.molecule.name,
            scenario.molecule.transitions.len(),
            scenario.temperature
        );
    }

    let curve = match compute_curve(&scenario) {
        Ok(c) => c,
        Err(e) => {
            // grid/domain problems are validation errors; numerical failures
            // inside the sweep are reported per row instead
            eprintln!("error: {e}");
            return match e {
                cp_thermal::Error::Domain(_)
                | cp_thermal::Error::InvalidInput(_)
                | cp_thermal::Error::IncompatibleUnits { .. } => 2,
                _ => 3,
            };
        }
    };

    let doc = output::document(
        &curve,
        geometry.name(),
        scenario.temperature,
        &scenario.molecule.name,
    );
    let planar_split = curve.u_resonant_propagating.is_some();
    let write_result = match args.format {
        Format::Csv => output::write_csv(&args.output, &doc, planar_split),
        Format::Json => output::write_json(&args.output, &doc),
    };
    if let Err(e) = write_result {
        eprintln!("output error: {e}");
        return 2;
    }

    let failed = curve
        .status
        .iter()
        .filter(|s| matches!(s, SampleStatus::Failed(_)))
        .count();
    if failed > 0 {
        eprintln!(
            "{failed} of {} samples failed to converge; see the status column",
            curve.status.len()
        );
        return 3;
    }
    if verbose {
        eprintln!("wrote {}", args.output.display());
    }
    0
}

fn compute_curve(scenario: &Scenario) -> Result<PotentialCurve, cp_thermal::Error> {
    let thermal = cp_thermal::molecule::ThermalContext::new(scenario.temperature)?;
    match scenario.geometry {
        GeometryKind::HalfSpace => {
            let backend = engine::PlanarBackend::new(PlanarConfig::half_space(
                scenario.material,
                scenario.scan[0],
            ));
            engine::total_potential_curve(&scenario.molecule, &backend, &thermal, &scenario.scan)
        }
        GeometryKind::Cavity => {
            let backend = engine::PlanarBackend::new(PlanarConfig::cavity(
                scenario.material,
                scenario.width.expect("validated"),
                scenario.scan[0],
            ));
            engine::total_potential_curve(&scenario.molecule, &backend, &thermal, &scenario.scan)
        }
        GeometryKind::Cylinder => {
            let backend = engine::CylinderBackend::new(CylinderConfig::new(
                scenario.radius.expect("validated"),
                scenario.material,
                0.0,
            ));
            engine::total_potential_curve(&scenario.molecule, &backend, &thermal, &scenario.scan)
        }
    }
}

#[derive(Serialize)]
struct VerifyCheck {
    name: String,
    error: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    checks: Vec<VerifyCheck>,
    all_passed: bool,
}

fn run_verify(output: Option<&std::path::Path>, verbose: bool) -> i32 {
    let outcomes = keldysh::standard_battery();
    let checks: Vec<VerifyCheck> = outcomes
        .iter()
        .map(|c| VerifyCheck {
            name: c.name.clone(),
            error: c.error,
            tolerance: c.tolerance,
            passed: c.passed,
        })
        .collect();
    let all_passed = checks.iter().all(|c| c.passed);
    if verbose {
        for c in &checks {
            eprintln!(
                "{}: {} (error {:.3e}, tolerance {:.0e})",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.error,
                c.tolerance
            );
        }
    }
    let report = VerifyReport { checks, all_passed };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text.as_bytes()) {
                eprintln!("output error: writing '{}': {e}", p.display());
                return 2;
            }
        }
        None => println!("{text}"),
    }
    if all_passed {
        0
    } else {
        3
    }
}
