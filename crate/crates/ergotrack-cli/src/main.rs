//! Experiment runner for the tracking toolkit.
//!
//! One declarative config file describes one run; this binary executes it,
//! writes CSVs (and the odd SVG), and records a manifest with embedded
//! sanity checks. Exit status: 0 when every check passes, 1 when a check
//! fails, 2 when the run could not be carried out at all.
//!
//! Subcommands `track`, `joinlp`, `quantid`, `complexity`, and `mle` insist
//! the config declares the matching kind; `run` takes whatever the config
//! says; `sweep` re-runs one config across values of a single numeric field
//! with per-value RNG streams.

mod config;
mod output;
mod runner;
mod sweep;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{ExperimentConfig, ExperimentKind};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "ergotrack",
    version,
    about = "Seeded tracking experiments: one config in, CSVs and a manifest out"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Path to the experiment config (TOML, schema version 1).
    #[arg(long)]
    config: PathBuf,
    /// Seed override; required if the config has no `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory override (default: the config's `out`, else runs/<kind>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks automatically. ERGOTRACK_THREADS overrides.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Dotted path of the numeric field to vary, e.g. quantid.p or joinlp.k.
    #[arg(long)]
    axis: String,
    /// Comma-separated values, one run per value.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Track one sampled window with a reference system.
    Track(Common),
    /// Solve a block-coupling program exactly.
    Joinlp(Common),
    /// Identify a rotation angle from noisy quantized labels.
    Quantid(Common),
    /// Count label blocks and estimate entropy.
    Complexity(Common),
    /// Fit a density parameter by grid maximum likelihood.
    Mle(Common),
    /// Run whatever kind the config declares.
    Run(Common),
    /// Re-run one config across values of a single field.
    Sweep(SweepArgs),
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Track(c) => run_one(c, Some(ExperimentKind::Track)),
        Cmd::Joinlp(c) => run_one(c, Some(ExperimentKind::Joinlp)),
        Cmd::Quantid(c) => run_one(c, Some(ExperimentKind::Quantid)),
        Cmd::Complexity(c) => run_one(c, Some(ExperimentKind::Complexity)),
        Cmd::Mle(c) => run_one(c, Some(ExperimentKind::Mle)),
        Cmd::Run(c) => run_one(c, None),
        Cmd::Sweep(s) => run_sweep_cmd(s),
    }
}

/// The environment may override the thread count, and only that.
fn resolve_threads(flag: usize) -> Result<usize> {
    match std::env::var("ERGOTRACK_THREADS") {
        Ok(s) => s
            .trim()
            .parse()
            .with_context(|| format!("ERGOTRACK_THREADS={s:?} is not a thread count")),
        Err(_) => Ok(flag),
    }
}

fn init_rayon(threads: usize) {
    if threads > 0 {
        // a second call in one process is fine; the pool is already up
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

/// Self-contained config text for the manifest: the seed pinned and the
/// output directory inlined, so re-running the written file reproduces the
/// run without any flags.
fn resolve_config_text(raw: &str, seed: u64, dir: &Path) -> Result<String> {
    if seed > i64::MAX as u64 {
        bail!("seed: values above 2^63 - 1 do not round-trip through the config file");
    }
    let mut table: toml::Table = toml::from_str(raw)?;
    table.insert("seed".to_string(), toml::Value::Integer(seed as i64));
    table.insert(
        "out".to_string(),
        toml::Value::String(dir.to_string_lossy().into_owned()),
    );
    Ok(toml::to_string(&table)?)
}

fn out_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs").join(cfg.kind.name()))
}

fn report(manifest: &output::RunManifest, dir: &Path) {
    for check in &manifest.checks {
        let verdict = if check.pass { "pass" } else { "FAIL" };
        println!("check {}: {} ({})", check.name, verdict, check.detail);
    }
    println!(
        "{}: {} file(s), {} in {} ms",
        dir.display(),
        manifest.outputs.len(),
        if manifest.all_checks_pass() { "all checks pass" } else { "CHECKS FAILED" },
        manifest.wall_ms
    );
}

fn run_one(c: Common, expect: Option<ExperimentKind>) -> Result<bool> {
    let raw = fs::read_to_string(&c.config)
        .with_context(|| format!("reading {}", c.config.display()))?;
    let threads = resolve_threads(c.threads)?;
    init_rayon(threads);
    let cfg = ExperimentConfig::parse(&raw)?;
    if let Some(kind) = expect {
        if cfg.kind != kind {
            bail!(
                "config declares kind = {:?} but the subcommand expects {:?} (use `run` to dispatch on the config)",
                cfg.kind.name(),
                kind.name()
            );
        }
    }
    let seed = cfg.seed_or(c.seed)?;
    let dir = out_dir(c.out, &cfg);
    let resolved = resolve_config_text(&raw, seed, &dir)?;
    let (manifest, _) = runner::execute(&cfg, &resolved, seed, 0, threads, &dir)?;
    report(&manifest, &dir);
    Ok(manifest.all_checks_pass())
}

fn run_sweep_cmd(s: SweepArgs) -> Result<bool> {
    let raw = fs::read_to_string(&s.common.config)
        .with_context(|| format!("reading {}", s.common.config.display()))?;
    let threads = resolve_threads(s.common.threads)?;
    init_rayon(threads);
    let cfg = ExperimentConfig::parse(&raw)?;
    let seed = cfg.seed_or(s.common.seed)?;
    let dir = s
        .common
        .out
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs").join(format!("sweep-{}", cfg.kind.name())));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let outcome = sweep::run_sweep(&raw, &s.axis, &s.values, seed, threads, &dir)?;
    for (i, manifest) in outcome.manifests.iter().enumerate() {
        let verdict = if manifest.all_checks_pass() { "pass" } else { "FAIL" };
        println!("run-{i:03}: {verdict}");
    }
    println!(
        "{}: {} runs, summary.csv written, {}",
        dir.display(),
        outcome.manifests.len(),
        if outcome.all_pass { "all checks pass" } else { "CHECKS FAILED" }
    );
    Ok(outcome.all_pass)
}
