//! Command-line interface for curvature of multiply warped product
//! spacetimes.
//!
//! Subcommands: `ricci` (grid curvature CSV), `classify` (junction
//! regularity), `schwarzschild` (interior black-hole solution: scan,
//! optional CSV, optional config emission), `verify` (closed forms against
//! the finite-difference oracle).
//!
//! Exit codes: 0 success (and C^1 in `classify`); 1 failed check (residual
//! over tolerance, non-flat scan, or C^0 junction); 2 configuration
//! problems (including `classify` on a junction-free spacetime); 3
//! evaluation problems (grid on the junction, stencil conflicts, output
//! I/O). CSV bytes are identical across runs and thread counts.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use config::{BuiltConfig, SpacetimeConfig};
use warpcurv::geometry::MultiplyWarpedSpacetime;
use warpcurv::junction::analyze_junction;
use warpcurv::oracle::OracleOptions;
use warpcurv::report::{column_names, grid_report, ricci_residual, ReportOptions, RowKind};
use warpcurv::schwarzschild::{verify_ricci_flat, SchwarzschildParams};
use warpcurv::Angles;

#[derive(Parser)]
#[command(
    name = "warpcurv",
    version,
    about = "Curvature of multiply warped product spacetimes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Ricci diagonal on the configured grid and write CSV.
    Ricci {
        /// TOML spacetime configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify the junction: C^1 (exit 0) or C^0 with a delta part (exit 1).
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build the interior black-hole solution and scan its curvature.
    Schwarzschild {
        /// Black-hole mass (sets the proper-time span to mass * pi).
        #[arg(long)]
        mass: f64,
        /// Number of scan points.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Write the scan as CSV to this path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Instead of scanning, write an equivalent TOML config here.
        #[arg(long)]
        emit_config: Option<PathBuf>,
    },
    /// Cross-check closed-form curvature against finite differences.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Largest allowed |analytic - finite difference| Ricci entry.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Finite-difference step override.
        #[arg(long)]
        step: Option<f64>,
        /// Output CSV path (stdout when omitted); includes residual_max.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn config_failure(e: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

fn eval_failure(e: impl std::fmt::Display) -> Failure {
    Failure { code: 3, message: e.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = init_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// WARPCURV_THREADS caps the rayon pool; unset means rayon's default.
fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("WARPCURV_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| config_failure(format!("WARPCURV_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| config_failure(format!("cannot size the thread pool: {e}")))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Ricci { config, output } => ricci(&config, output.as_deref()),
        Command::Classify { config } => classify(&config),
        Command::Schwarzschild { mass, samples, output, emit_config } => {
            schwarzschild(mass, samples, output.as_deref(), emit_config.as_deref())
        }
        Command::Verify { config, tolerance, step, output } => {
            verify(&config, tolerance, step, output.as_deref())
        }
    }
}

fn load(path: &std::path::Path) -> Result<BuiltConfig, Failure> {
    let cfg = SpacetimeConfig::load(path).map_err(config_failure)?;
    cfg.build().map_err(config_failure)
}

fn write_text(path: Option<&std::path::Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| eval_failure(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ricci(config: &std::path::Path, output: Option<&std::path::Path>) -> Result<u8, Failure> {
    let built = load(config)?;
    let options = ReportOptions { angles: built.angles, residuals: None };
    let report = grid_report(&built.spacetime, &built.grid, &options).map_err(eval_failure)?;
    write_text(output, &report.to_csv())?;
    Ok(0)
}

fn classify(config: &std::path::Path) -> Result<u8, Failure> {
    let built = load(config)?;
    let Some(report) =
        analyze_junction(&built.spacetime, &built.angles).map_err(eval_failure)?
    else {
        return Err(config_failure(
            "nothing to classify: every warp is smooth, the spacetime has no junction",
        ));
    };
    println!("junction at t = {}", report.junction);
    for f in &report.fibers {
        println!(
            "fiber {:?} (dim {}): f = {}, derivative jump = {}, shape jump = {}",
            f.label, f.dim, f.warp_value, f.warp_jump, f.shape_jump
        );
    }
    println!("delta coefficients (coordinate / orthonormal):");
    let names = index_names(&built.spacetime);
    for (entry, name) in report.ricci_delta.iter().zip(names.iter()) {
        println!("  {name}: {} / {}", entry.coordinate, entry.orthonormal);
    }
    println!("scalar delta: {}", report.scalar_delta);
    if report.is_c1 {
        println!("classification: C1 (no delta part; curvature is an ordinary tensor)");
        Ok(0)
    } else {
        println!("classification: C0 (delta part concentrated on the junction)");
        Ok(1)
    }
}

fn index_names(m: &MultiplyWarpedSpacetime) -> Vec<String> {
    let mut names = vec!["tt".to_string()];
    for (spec, _) in m.fibers() {
        for axis in 0..spec.dim {
            names.push(format!("{}_{}", spec.label, axis));
        }
    }
    names
}

/// Config equivalent to the built-in interior solution: flat radial line
/// plus round sphere, scan grid away from the degenerate endpoints.
fn schwarzschild_config(mass: f64, samples: usize) -> SpacetimeConfig {
    let span = mass * std::f64::consts::PI;
    SpacetimeConfig {
        junction: None,
        base: config::BaseConfig { t_min: 0.0, t_max: span },
        fibers: vec![
            config::FiberConfig {
                label: "radial".into(),
                dim: 1,
                curvature: 0.0,
                warp: format!("schwarzschild_f1(m={mass})"),
            },
            config::FiberConfig {
                label: "sphere".into(),
                dim: 2,
                curvature: 1.0,
                warp: format!("schwarzschild_f2(m={mass})"),
            },
        ],
        grid: config::GridConfig { points: samples, t_min: 0.05 * span, t_max: 0.95 * span },
        angles: None,
    }
}

fn schwarzschild(
    mass: f64,
    samples: usize,
    output: Option<&std::path::Path>,
    emit_config: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    let params = SchwarzschildParams::new(mass)
        .and_then(|p| p.with_samples(samples))
        .map_err(config_failure)?;
    let cfg = schwarzschild_config(mass, samples);

    if let Some(path) = emit_config {
        let text = toml::to_string_pretty(&cfg)
            .map_err(|e| eval_failure(format!("cannot serialize config: {e}")))?;
        write_text(Some(path), &text)?;
        return Ok(0);
    }

    let report = verify_ricci_flat(&params).map_err(eval_failure)?;
    println!("mass: {}", report.mass);
    println!("samples: {}", report.samples);
    println!(
        "max |orthonormal ricci|: {:e} at mu = {}",
        report.max_abs_ricci, report.worst_mu
    );
    println!("flat within {:e}: {}", params.tolerance, if report.flat { "yes" } else { "no" });

    if let Some(path) = output {
        let built = cfg.build().map_err(config_failure)?;
        let options = ReportOptions { angles: built.angles, residuals: None };
        let csv = grid_report(&built.spacetime, &built.grid, &options)
            .map_err(eval_failure)?
            .to_csv();
        write_text(Some(path), &csv)?;
    }
    Ok(if report.flat { 0 } else { 1 })
}

fn verify(
    config: &std::path::Path,
    tolerance: f64,
    step: Option<f64>,
    output: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(config_failure(format!(
            "tolerance must be positive and finite, got {tolerance}"
        )));
    }
    let mut opts = OracleOptions::default();
    if let Some(h) = step {
        if !(h > 0.0 && h.is_finite()) {
            return Err(config_failure(format!("step must be positive and finite, got {h}")));
        }
        opts.h = h;
    }
    let built = load(config)?;
    let options = ReportOptions { angles: built.angles, residuals: None };
    let mut report = grid_report(&built.spacetime, &built.grid, &options).map_err(eval_failure)?;

    let angles: Angles = built.angles;
    let residuals: Vec<f64> = built
        .grid
        .par_iter()
        .map(|&t| ricci_residual(&built.spacetime, t, &angles, &opts))
        .collect::<Result<_, _>>()
        .map_err(eval_failure)?;
    let mut worst = 0.0f64;
    for (row, r) in report
        .rows
        .iter_mut()
        .filter(|r| r.kind == RowKind::Interior)
        .zip(residuals.iter())
    {
        row.residual = Some(*r);
        worst = worst.max(*r);
    }
    report.columns = column_names(&built.spacetime, true);
    write_text(output, &report.to_csv())?;

    let pass = worst <= tolerance;
    eprintln!(
        "verify: {} points, max residual {worst:e}, tolerance {tolerance:e}: {}",
        built.grid.len(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}
