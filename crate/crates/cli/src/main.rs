use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hmap_core::GridSpec;

mod commands;
mod report;

use report::{Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hmap", version, about = "Planar harmonic mappings of the unit disk")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Evaluation grid as RADIALxANGULAR.
    #[arg(long, global = true, value_parser = parse_resolution, default_value = "64x256")]
    grid: (usize, usize),
    #[arg(long, global = true, default_value_t = hmap_core::grid::DEFAULT_R_MAX)]
    r_max: f64,
    /// Margin tolerance for pass/fail.
    #[arg(long, global = true, default_value_t = hmap_core::bounds::MARGIN_TOL)]
    tolerance: f64,
    /// Report format.
    #[arg(long = "out", global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a map at points, or summarize it on the grid.
    Eval(commands::EvalArgs),
    /// Check one inequality over the grid.
    Verify(commands::VerifyArgs),
    /// Taylor coefficient bounds.
    Coeffs(commands::CoeffsArgs),
    /// Becker and John univalence criteria.
    Univalence(commands::UnivalenceArgs),
    /// Linear connectivity estimate of the image.
    Connectivity(commands::ConnectivityArgs),
    /// Criterion constants, optionally checked on a sheared map.
    Criteria(commands::CriteriaArgs),
    /// John constant bracketing sweep.
    JohnExperiment(commands::JohnArgs),
    /// Growth exponent sweep along rays.
    #[command(name = "conjecture15")]
    GrowthExponent(commands::MapArg),
    /// Random search for violations.
    Falsify(commands::FalsifyArgs),
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (r, a) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected RADIALxANGULAR, got `{s}`"))?;
    let r = r.trim().parse().map_err(|e| format!("{e}"))?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((r, a))
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HMAP_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| format!("HMAP_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("HMAP_THREADS must be a positive integer, got `0`".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let c = &cli.common;
    let grid = match GridSpec::new(c.grid.0, c.grid.1, c.r_max) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (name, default_format) = match &cli.command {
        Command::Eval(_) => ("eval", Format::Json),
        Command::Verify(_) => ("verify", Format::Json),
        Command::Coeffs(_) => ("coeffs", Format::Json),
        Command::Univalence(_) => ("univalence", Format::Json),
        Command::Connectivity(_) => ("connectivity", Format::Json),
        Command::Criteria(_) => ("criteria", Format::Json),
        Command::JohnExperiment(_) => ("john-experiment", Format::Json),
        Command::GrowthExponent(_) => ("conjecture15", Format::Csv),
        Command::Falsify(_) => ("falsify", Format::Csv),
    };
    let mut config = RunConfig {
        subcommand: name.to_string(),
        maps: Vec::new(),
        grid,
        tolerance: c.tolerance,
        seed: None,
        format: c.format.unwrap_or(default_format),
        output: c.output.clone(),
        params: serde_json::Value::Null,
    };
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Eval(a) => commands::eval(a, &mut config),
        Command::Verify(a) => commands::verify(a, &mut config),
        Command::Coeffs(a) => commands::coeffs(a, &mut config),
        Command::Univalence(a) => commands::univalence(a, &mut config),
        Command::Connectivity(a) => commands::connectivity(a, &mut config),
        Command::Criteria(a) => commands::criteria(a, &mut config),
        Command::JohnExperiment(a) => commands::john(a, &mut config),
        Command::GrowthExponent(a) => commands::growth_exponent(a, &mut config),
        Command::Falsify(a) => commands::falsify(a, &mut config),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let pass = outcome.pass;
    let wall = c.timing.then(|| start.elapsed().as_secs_f64());
    if let Err(e) = report::emit(&config, outcome, wall) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
