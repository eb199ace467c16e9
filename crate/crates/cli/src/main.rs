mod commands;
mod config;
mod svg;

use clap::Parser;
use commands::{Failure, Report};
use config::{Command, Settings};
use std::path::PathBuf;
use std::process::ExitCode;

const LONG_ABOUT: &str = "\
Bifurcation analysis of all-to-all coupled delayed PLL networks.

Parameters are given in physical units and normalized by omega_M before any
computation; every output is in normalized units and the resolved parameters
appear as `#` comment lines at the top of the CSV.

CSV columns by command:
  curves (full-phase)  mu|K, n, root, omega, tau, delta_sign
  curves (phase)       m, mu, K, residual     (needs --half-turns)
  rightmost            tau, re, im, certified
  snmap (full-phase)   tau, n, root, omega, delta, delta_sign
  snmap (phase)        branch, tau, n, root, omega, delta, delta_sign
  releq                branch, tau, omega_hat
  zero-roots           n, tau, delta0
  phasediff-check      lambda_re, lambda_im, defect_p1, defect_p2   (N=2)
                       lambda_re, lambda_im, defect                 (N=3)
  simulate             t, x1_1, x2_1, ..., x1_N, x2_N
  verify               id, title, passed, detail

Exit codes: 0 success, 1 domain error or failed verification, 2 usage or IO error.";

#[derive(Debug, Parser)]
#[command(name = "pllsym", version, about = "Bifurcation analysis of delayed PLL networks", long_about = LONG_ABOUT)]
struct Cli {
    #[arg(value_enum)]
    command: Option<Command>,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

fn emit(report: &Report, settings: &Settings) -> anyhow::Result<()> {
    let csv = report.csv();
    match &settings.out {
        Some(path) => {
            std::fs::write(path, csv)?;
            println!("{}", report.summary);
        }
        None => {
            print!("{csv}");
            eprintln!("{}", report.summary);
        }
    }
    if let (Some(path), Some(chart)) = (&settings.svg, &report.chart) {
        std::fs::write(path, svg::line_chart(&chart.title, chart.x_label, chart.y_label, &chart.series))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, settings) = match &cli.config {
        Some(path) => match config::load(path) {
            Ok(file) => (cli.command.or(file.command), file.settings.overlay(&cli.settings)),
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        None => (cli.command, cli.settings.clone()),
    };
    let Some(command) = command else {
        eprintln!("error: no command given (on the command line or in --config)");
        return ExitCode::from(2);
    };
    if let Some(threads) = settings.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let report = match commands::run(command, &settings) {
        Ok(r) => r,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &settings) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
