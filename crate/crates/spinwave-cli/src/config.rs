//! Configuration resolution: defaults < JSON config file < named preset
//! < individual command-line flags.

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::Deserialize;
use spinwave::{oscillation_period, CouplingParams, SpinConvention};
use std::path::PathBuf;

pub const DEFAULT_K1: f64 = 1.0;
pub const DEFAULT_K2: f64 = 0.3;
pub const DEFAULT_C: f64 = 30.0;
pub const DEFAULT_N_ATOMS: u64 = 1_000_000;
pub const DEFAULT_STEPS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    /// Spin starts in the balanced single-atom product state.
    Product,
    /// Spin treated as one more bosonic vacuum mode.
    Bosonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by `sweep`, `min-scan`, and `period`.
#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON config file; flags given on the command line override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Named parameter preset: fig2a, fig2b, fig2c, fig3a, fig3b, fig3c
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Stokes coupling rate (sets the time unit)
    #[arg(long)]
    pub k1: Option<f64>,
    /// Anti-Stokes coupling rate
    #[arg(long)]
    pub k2: Option<f64>,
    /// Second Stokes coupling rate; enables the tripartite model
    #[arg(long)]
    pub k3: Option<f64>,
    /// Exchange constant
    #[arg(long)]
    pub c: Option<f64>,
    /// Sweep end time in units of 1/k1 (default: two oscillation periods)
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    pub steps: Option<usize>,
    /// Initial spin-moment convention
    #[arg(long, value_enum)]
    pub spin_convention: Option<ConventionArg>,
    /// Atom count (enters the product-state spin mean)
    #[arg(long)]
    pub n_atoms: Option<u64>,
    /// Output format for sweep data
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output path; data goes to stdout when omitted (sweep also writes
    /// a <out>.meta.json sidecar when set)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// JSON config file contents; every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    k1: Option<f64>,
    k2: Option<f64>,
    k3: Option<f64>,
    c: Option<f64>,
    t_max: Option<f64>,
    steps: Option<usize>,
    spin_convention: Option<String>,
    n_atoms: Option<u64>,
    format: Option<String>,
    out: Option<PathBuf>,
}

struct Preset {
    k1: f64,
    k2: f64,
    k3: Option<f64>,
    c: f64,
}

fn preset(name: &str) -> anyhow::Result<Preset> {
    let (k1, k2, k3, c) = match name {
        "fig2a" => (1.0, 0.3, None, 30.0),
        "fig2b" => (1.0, 1.1, None, 30.0),
        "fig2c" => (1.0, 3.0, None, 30.0),
        "fig3a" => (1.0, 1.0, Some(0.6), 30.0),
        "fig3b" => (1.0, 1.0, Some(1.0), 30.0),
        "fig3c" => (1.0, 1.0, Some(3.0), 30.0),
        _ => bail!(
            "unknown preset '{name}' (expected one of fig2a, fig2b, fig2c, fig3a, fig3b, fig3c)"
        ),
    };
    Ok(Preset { k1, k2, k3, c })
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: CouplingParams,
    pub convention: SpinConvention,
    pub n_atoms: u64,
    pub t_max: f64,
    pub steps: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub fn resolve(args: &SweepArgs) -> anyhow::Result<Resolved> {
    resolve_inner(args, true)
}

/// Resolution for subcommands that never touch the time grid (`period`):
/// identical precedence rules, but no default t_max is derived, so
/// parameter sets without a finite period still resolve.
pub fn resolve_params_only(args: &SweepArgs) -> anyhow::Result<Resolved> {
    resolve_inner(args, false)
}

fn resolve_inner(args: &SweepArgs, need_t_max: bool) -> anyhow::Result<Resolved> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config file {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let preset = args.preset.as_deref().map(preset).transpose()?;

    let k1 = args
        .k1
        .or(preset.as_ref().map(|p| p.k1))
        .or(file.k1)
        .unwrap_or(DEFAULT_K1);
    let k2 = args
        .k2
        .or(preset.as_ref().map(|p| p.k2))
        .or(file.k2)
        .unwrap_or(DEFAULT_K2);
    // a preset decides the arity, overriding any k3 from the config file
    let k3 = match (&args.k3, &preset) {
        (Some(v), _) => Some(*v),
        (None, Some(p)) => p.k3,
        (None, None) => file.k3,
    };
    let c = args
        .c
        .or(preset.as_ref().map(|p| p.c))
        .or(file.c)
        .unwrap_or(DEFAULT_C);

    let params = match k3 {
        Some(k3) => CouplingParams::tripartite(k1, k2, k3, c)?,
        None => CouplingParams::bipartite(k1, k2, c)?,
    };

    let convention = match (&args.spin_convention, &file.spin_convention) {
        (Some(ConventionArg::Product), _) => SpinConvention::ProductState,
        (Some(ConventionArg::Bosonic), _) => SpinConvention::BosonicVacuum,
        (None, Some(name)) => SpinConvention::parse(name).ok_or_else(|| {
            anyhow::anyhow!("config file: unknown spin_convention '{name}' (product|bosonic)")
        })?,
        (None, None) => SpinConvention::BosonicVacuum,
    };

    let format = match (&args.format, &file.format) {
        (Some(f), _) => *f,
        (None, Some(name)) => match name.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => bail!("config file: unknown format '{other}' (csv|json)"),
        },
        (None, None) => Format::Csv,
    };

    let t_max = match args.t_max.or(file.t_max) {
        Some(t) => t,
        None if need_t_max => match oscillation_period(&params) {
            Ok(p) => 2.0 * p.exact,
            Err(e) => bail!("cannot derive a default t_max ({e}); pass --t-max explicitly"),
        },
        None => 0.0,
    };

    Ok(Resolved {
        params,
        convention,
        n_atoms: args.n_atoms.or(file.n_atoms).unwrap_or(DEFAULT_N_ATOMS),
        t_max,
        steps: args.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
        format,
        out: args.out.clone().or(file.out),
    })
}

impl Resolved {
    pub fn convention_name(&self) -> &'static str {
        self.convention.name()
    }
}
