//! `zigzag`: run a zigzag-vs-direct scenario from a JSON config.
//!
//! Exit codes: 0 all checks pass, 1 a check failed its tolerance, 2 bad
//! configuration or output location, 3 numerical failure (caustic, Nyquist
//! guard, degenerate composition).

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use zigzag_core::backend::{BackendRegistry, PotentialSpec, ScenarioConfig};
use zigzag_core::grid::SliceRuleRegistry;
use zigzag_core::CoreError;

use output::{write_kernels, write_report, Report};

#[derive(Parser, Debug)]
#[command(name = "zigzag", version, about = "Zigzag amplitude scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write report.json and kernels.csv.
    Run(Box<RunArgs>),
    /// List registered backends and slice rules.
    List,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// JSON scenario file; defaults apply to anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Backend: analytic, grid or field.
    #[arg(long)]
    mode: Option<String>,
    /// Harmonic frequency; switches the potential to harmonic.
    #[arg(long)]
    omega: Option<f64>,
    /// Use the free potential.
    #[arg(long, conflicts_with = "omega")]
    free: bool,
    #[arg(long)]
    grid_n: Option<usize>,
    /// Grid extent as LO,HI.
    #[arg(long, value_parser = parse_extent, allow_hyphen_values = true)]
    grid_extent: Option<[f64; 2]>,
    /// Time slices per unit time.
    #[arg(long)]
    slices: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    t_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_d: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_f: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid slice rule (see `zigzag list`).
    #[arg(long)]
    slice_rule: Option<String>,
}

fn parse_extent(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([parse(lo)?, parse(hi)?])
}

#[derive(Debug, Error)]
enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    let Some(path) = path else {
        return Ok(ScenarioConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn apply_overrides(cfg: &mut ScenarioConfig, args: &RunArgs) {
    if let Some(m) = &args.mode {
        cfg.mode = m.clone();
    }
    if let Some(omega) = args.omega {
        cfg.potential = PotentialSpec::Harmonic { omega };
    }
    if args.free {
        cfg.potential = PotentialSpec::Free;
    }
    if args.grid_n.is_some() || args.grid_extent.is_some() {
        let mut g = cfg.grid.unwrap_or_default();
        if let Some(n) = args.grid_n {
            g.n = n;
        }
        if let Some(ext) = &args.grid_extent {
            g.extent = *ext;
        }
        cfg.grid = Some(g);
    }
    if let Some(s) = args.slices {
        cfg.slices_per_unit_time = s;
    }
    let t = &mut cfg.times;
    for (slot, value) in [
        (&mut t.t_a, args.t_a),
        (&mut t.t_d, args.t_d),
        (&mut t.t_c, args.t_c),
        (&mut t.t_f, args.t_f),
    ] {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(rule) = &args.slice_rule {
        cfg.slice_rule = Some(rule.clone());
    }
}

fn run(args: &RunArgs) -> Result<String, CliError> {
    let mut cfg = load_config(args.config.as_deref())?;
    apply_overrides(&mut cfg, args);

    let outcome = BackendRegistry::default().run(&cfg)?;

    let dir = &cfg.output_dir;
    let io_err =
        |e: std::io::Error| CliError::Config(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io_err)?;
    write_report(dir, &Report::new(&cfg, &outcome)).map_err(io_err)?;
    write_kernels(dir, &outcome.zigzag_kernel, &outcome.direct_kernel).map_err(io_err)?;

    if let Some(c) = outcome.failed_checks().next() {
        let failed = outcome.failed_checks().count();
        return Err(CliError::Tolerance(format!(
            "{failed} check(s) failed; first: {} = {:.3e} > {:.3e}",
            c.name, c.value, c.tolerance
        )));
    }
    Ok(format!(
        "{}: {} checks passed, report in {}",
        outcome.backend,
        outcome.checks.len(),
        dir.display()
    ))
}

fn list() {
    println!("backends:");
    for b in BackendRegistry::default().iter() {
        println!("  {:<10} {}", b.name(), b.description());
    }
    println!("slice rules:");
    for r in SliceRuleRegistry::default().iter() {
        println!("  {:<10} {}", r.name(), r.description());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run(&args) {
            Ok(summary) => {
                println!("{summary}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                let line = e.to_string().replace('\n', " ");
                eprintln!("zigzag: {line}");
                ExitCode::from(e.exit_code())
            }
        },
    }
}
