use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use kontact::suite::{describe, energy_summary, run_suite, to_csv, to_json, Format, Manifold, SuiteConfig, SuiteOutput};
use kontact::GeometryError;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Verifies double K-contact identities on round odd-dimensional spheres.
#[derive(Parser)]
#[command(name = "kontact", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification suite and emit residual reports.
    Verify(VerifyArgs),
    /// Print the generator blocks, conventions and golden constants.
    Describe {
        manifold: Manifold,
    },
    /// Monte Carlo energy estimates of the Reeb field and of the angle normal.
    Energy(EnergyArgs),
}

#[derive(Args)]
struct Common {
    manifold: Manifold,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Points with |f| above this are excluded.
    #[arg(long, default_value_t = 0.9)]
    exclusion: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 100_000)]
    energy_samples: usize,
    /// Tighten a check: NAME=VALUE (repeatable).
    #[arg(long = "tol", value_parser = parse_override)]
    tol: Vec<(String, f64)>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Include a generation timestamp in JSON output.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let v: f64 = value.parse().map_err(|e| format!("bad tolerance '{value}': {e}"))?;
    Ok((name.trim().to_string(), v))
}

fn configure_threads() -> Result<(), String> {
    let threads = match std::env::var("KONTACT_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| format!("KONTACT_THREADS must be a non-negative integer, got '{v}'"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_for(e: &GeometryError) -> u8 {
    match e {
        GeometryError::InvalidConfig(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn verify(args: VerifyArgs) -> Result<u8, (u8, String)> {
    let config = SuiteConfig {
        manifold: args.common.manifold,
        samples: args.samples,
        seed: args.common.seed,
        tol_overrides: args.tol.into_iter().collect::<BTreeMap<_, _>>(),
        exclusion: args.common.exclusion,
        energy_samples: args.energy_samples,
        output_path: args.common.out.clone(),
        format: args.format,
    };
    let reports = run_suite(&config).map_err(|e| (exit_for(&e), e.to_string()))?;
    let mut output = SuiteOutput::new(config, reports);
    if args.timestamp {
        output.generated_at = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    }
    let text = match args.format {
        Format::Json => to_json(&output),
        Format::Csv => to_csv(&output.reports),
    };
    emit(&text, args.common.out.as_ref()).map_err(|e| (EXIT_FAIL, e))?;
    let failures: Vec<_> = output.failures().collect();
    if failures.is_empty() {
        eprintln!("{}: {} checks passed", output.config.manifold, output.reports.len());
        Ok(0)
    } else {
        for r in &failures {
            eprintln!("FAIL {}: max {:e} > tolerance {:e}", r.check_name, r.max, r.tolerance);
        }
        Ok(EXIT_FAIL)
    }
}

fn energy(args: EnergyArgs) -> Result<u8, (u8, String)> {
    let config = SuiteConfig {
        seed: args.common.seed,
        exclusion: args.common.exclusion,
        energy_samples: args.samples,
        ..SuiteConfig::new(args.common.manifold)
    };
    let summary = energy_summary(&config).map_err(|e| (exit_for(&e), e.to_string()))?;
    emit(&to_json(&summary), args.common.out.as_ref()).map_err(|e| (EXIT_FAIL, e))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Verify(args) => verify(args),
        Command::Describe { manifold } => describe(manifold).map(|d| {
            print!("{}", to_json(&d));
            0
        }).map_err(|e| (exit_for(&e), e.to_string())),
        Command::Energy(args) => energy(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
