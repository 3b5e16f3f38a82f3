//! Command-line harness: time sweeps of the entanglement criteria,
//! refined minimum scans, oracle self-checks, and period inspection.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 degenerate-parameter
//! rejection, 3 failed oracle check.

mod checks;
mod config;
mod output;

use anyhow::Context;
use clap::{Parser, Subcommand};
use config::{Format, Resolved, SweepArgs};
use spinwave::{bipartite_series, min_scan_bipartite, min_scan_tripartite, tripartite_series};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "spinwave",
    version,
    about = "Entanglement dynamics of spin-wave-coupled optical fields: sweeps, scans, self-checks"
)]
struct Cli {
    /// Worker threads for grid evaluation (fallback: SPINWAVE_THREADS)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the criteria over a time grid and emit CSV or JSON
    Sweep(SweepArgs),
    /// Locate the criterion minimum over a grid, with golden-section refinement
    MinScan(SweepArgs),
    /// Run the self-check battery against the exact brute-force oracle
    OracleCheck {
        /// Check depth
        #[arg(long, value_enum, default_value = "fast")]
        level: checks::Level,
        /// Corrupt one closed-form coefficient to exercise failure reporting
        #[arg(long, hide = true)]
        inject_error: bool,
    },
    /// Print beta, the coupling gap, and the oscillation periods
    Period(SweepArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let threads = cli.threads.or_else(|| {
        std::env::var("SPINWAVE_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    let run = || dispatch(cli.command);
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: building thread pool: {e}");
                std::process::exit(1);
            }
        },
        None => run(),
    };

    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<spinwave::Error>() {
                Some(spinwave::Error::DegenerateCouplings { .. }) => 2,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Sweep(args) => sweep(&config::resolve(&args)?),
        Command::MinScan(args) => min_scan(&config::resolve(&args)?),
        Command::OracleCheck {
            level,
            inject_error,
        } => Ok(checks::run(level, inject_error)),
        Command::Period(args) => period(&config::resolve_params_only(&args)?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout")?,
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn sweep(r: &Resolved) -> anyhow::Result<i32> {
    let (text, min_v, argmin_t) = if r.params.is_tripartite() {
        let points = tripartite_series(&r.params, r.convention, r.n_atoms, r.t_max, r.steps)?;
        let (mut min_v, mut argmin_t) = (f64::INFINITY, 0.0);
        for p in &points {
            let w = p.v12.max(p.v13).max(p.v23);
            if w < min_v {
                min_v = w;
                argmin_t = p.t;
            }
        }
        let text = match r.format {
            Format::Csv => output::tripartite_csv(&points),
            Format::Json => output::tripartite_json(&points),
        };
        (text, min_v, argmin_t)
    } else {
        let points = bipartite_series(&r.params, r.convention, r.n_atoms, r.t_max, r.steps)?;
        let (mut min_v, mut argmin_t) = (f64::INFINITY, 0.0);
        for p in &points {
            if p.v < min_v {
                min_v = p.v;
                argmin_t = p.t;
            }
        }
        let text = match r.format {
            Format::Csv => output::bipartite_csv(&points),
            Format::Json => output::bipartite_json(&points),
        };
        (text, min_v, argmin_t)
    };

    emit(r.out.as_deref(), &text)?;
    if let Some(out) = &r.out {
        let sidecar = output::sidecar(r, min_v, argmin_t);
        let mut json = serde_json::to_string_pretty(&sidecar)?;
        json.push('\n');
        let path = sidecar_path(out);
        std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn min_scan(r: &Resolved) -> anyhow::Result<i32> {
    let summary = if r.params.is_tripartite() {
        min_scan_tripartite(&r.params, r.convention, r.n_atoms, r.t_max, r.steps)?
    } else {
        min_scan_bipartite(&r.params, r.convention, r.n_atoms, r.t_max, r.steps)?
    };
    let mut json = serde_json::to_string_pretty(&output::min_scan_report(r, &summary))?;
    json.push('\n');
    emit(r.out.as_deref(), &json)?;
    Ok(0)
}

fn period(r: &Resolved) -> anyhow::Result<i32> {
    let mut json = serde_json::to_string_pretty(&output::period_report(r))?;
    json.push('\n');
    emit(r.out.as_deref(), &json)?;
    Ok(0)
}
