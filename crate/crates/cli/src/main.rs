use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rnc_cli::chart::ingest_chart;
use rnc_cli::config::{Format, SuiteConfig};
use rnc_cli::suites::{run_suite, SUITES};
use rnc_cli::{CliError, EXIT_FAIL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "rnc", version, about = "Verification suites for Riemann normal coordinates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite and print its report.
    Run {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run twice and fail unless the report bodies are identical.
        #[arg(long)]
        repeat_check: bool,
    },
    /// Print the available suites.
    ListSuites,
    /// Parse and validate the chart of a configuration.
    ValidateChart {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(
    suite: Option<String>,
    config: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    repeat_check: bool,
) -> Result<i32, CliError> {
    let cfg = match config {
        Some(p) => SuiteConfig::load(&p)?,
        None => SuiteConfig::default(),
    };
    let name = suite
        .or_else(|| cfg.suite.clone())
        .ok_or_else(|| CliError::Config("no suite given; pass --suite or set 'suite' in the config".into()))?;
    let format = format.unwrap_or(cfg.format);
    let seed = seed.unwrap_or(cfg.seed);
    let report = run_suite(&name, &cfg, seed)?;
    print!("{}", report.render(format));
    let mut pass = report.all_pass();
    if repeat_check {
        let again = run_suite(&name, &cfg, seed)?;
        if again.body(format) != report.body(format) {
            eprintln!("repeat check: report bodies differ");
            pass = false;
        }
    }
    for r in report.failures() {
        eprintln!("FAIL {}: value {} expected {} tol {}", r.id, r.value, r.expected, r.tol);
    }
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn validate(config: PathBuf) -> Result<i32, CliError> {
    let cfg = SuiteConfig::load(&config)?;
    let spec = cfg.chart.as_ref().ok_or_else(|| CliError::Config("the config has no [chart] table".into()))?;
    let c = ingest_chart(spec, cfg.seed)?;
    println!("chart '{}' ok: dimension {}, {} points validated", spec.name, c.chart.dim(), c.validated.len());
    Ok(EXIT_PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            suite,
            config,
            format,
            seed,
            repeat_check,
        } => run(suite, config, format, seed, repeat_check),
        Command::ListSuites => {
            for (name, description) in SUITES {
                println!("{name:32} {description}");
            }
            Ok(EXIT_PASS)
        }
        Command::ValidateChart { config } => validate(config),
    };
    let code = outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
