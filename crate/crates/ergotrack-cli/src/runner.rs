//! Turns one parsed config into artifacts on disk.
//!
//! Every run follows the same shape: build domain objects from the config,
//! compute, write CSVs (and an SVG where a picture helps), then record a
//! manifest with embedded sanity checks. The process exit code later depends
//! on those checks, so they only assert facts that must hold whenever the
//! toolkit is working, never statistical luck.

use crate::config::{
    parse_family, resolve_schedule, ComplexityConfig, ExperimentConfig, ExperimentKind,
    JoinlpConfig, MleConfig, QuantidConfig, TrackConfig, CONFIG_VERSION,
};
use crate::output::{cell, line_plot_svg, opt_cell, sha256_hex, write_csv, CheckResult, RunManifest};
use anyhow::{bail, Context, Result};
use ergotrack_core::joinlp::{build_instance, rat, ratio_to_f64, solve, solve_float, LpStatus};
use ergotrack_core::mle::{mle_trace, target_set, DensityFamily};
use ergotrack_core::quantident::{
    block_complexity, estimate_trace, generate, rational_block_counts, RotationFamily,
};
use ergotrack_core::tracking::{track_limit_estimate, TrackingOptions, TrackingProblem};
use ergotrack_core::{Grid, Partition, RngStream};
use std::fs;
use std::path::Path;
use std::time::Instant;

/// Key/value pairs a run contributes to a sweep's summary table. Keys are
/// fixed per kind so every run of a sweep fills the same columns.
pub type Headline = Vec<(&'static str, String)>;

struct RunArtifacts {
    outputs: Vec<String>,
    checks: Vec<CheckResult>,
    headline: Headline,
}

/// Execute `cfg` into `dir` and write `config.toml` + `manifest.json` there.
///
/// `resolved_toml` is the self-contained config text (seed pinned, output
/// directory inlined); its bytes are what the manifest hash covers, so
/// re-running that exact file reproduces the run.
pub fn execute(
    cfg: &ExperimentConfig,
    resolved_toml: &str,
    seed: u64,
    stream_index: u64,
    threads: usize,
    dir: &Path,
) -> Result<(RunManifest, Headline)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("config.toml"), resolved_toml)?;
    let started = Instant::now();
    let stream = RngStream::with_stream(seed, stream_index);
    let art = match cfg.kind {
        ExperimentKind::Track => run_track(cfg.track.as_ref().expect("validated"), stream, dir)?,
        ExperimentKind::Joinlp => run_joinlp(cfg.joinlp.as_ref().expect("validated"), dir)?,
        ExperimentKind::Quantid => {
            run_quantid(cfg.quantid.as_ref().expect("validated"), stream, dir)?
        }
        ExperimentKind::Complexity => {
            run_complexity(cfg.complexity.as_ref().expect("validated"), dir)?
        }
        ExperimentKind::Mle => run_mle(cfg.mle.as_ref().expect("validated"), stream, dir)?,
    };
    let manifest = RunManifest {
        config_version: CONFIG_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        kind: cfg.kind.name().to_string(),
        seed,
        stream: stream_index,
        threads,
        config_sha256: sha256_hex(resolved_toml.as_bytes()),
        outputs: art.outputs,
        checks: art.checks,
        wall_ms: started.elapsed().as_millis(),
    };
    manifest.write(dir)?;
    Ok((manifest, art.headline))
}

fn run_track(tc: &TrackConfig, stream: RngStream, dir: &Path) -> Result<RunArtifacts> {
    let problem = TrackingProblem {
        reference: tc.reference.system()?,
        cost: tc.cost.build()?,
    };
    let source = tc.source.build()?;
    let schedule = resolve_schedule(&tc.schedule, tc.n)?;
    let opts = TrackingOptions {
        circle_resolution: tc.circle_resolution,
        refine: tc.refine,
    };
    let trace = track_limit_estimate(&problem, &source, &schedule, stream, &opts)?;

    let rows: Vec<Vec<String>> = trace
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.argmin_id.clone(),
                opt_cell(r.theta_hat),
                cell(r.value),
            ]
        })
        .collect();
    write_csv(&dir.join("trace.csv"), &["n", "argmin_id", "theta_hat", "value"], &rows)?;

    let numeric = trace.rows.iter().all(|r| !r.value.is_nan());
    let last = trace.rows.last().expect("schedule is nonempty");
    Ok(RunArtifacts {
        outputs: vec!["trace.csv".into()],
        checks: vec![CheckResult::new(
            "values-numeric",
            numeric,
            format!("{} tracking values, none NaN", trace.rows.len()),
        )],
        headline: vec![
            ("value", cell(last.value)),
            ("theta_hat", opt_cell(last.theta_hat)),
            ("argmin_id", last.argmin_id.clone()),
        ],
    })
}

fn word_str(w: &[u8]) -> String {
    w.iter().map(|&b| char::from_digit(b as u32, 36).unwrap_or('?')).collect()
}

fn run_joinlp(jc: &JoinlpConfig, dir: &Path) -> Result<RunArtifacts> {
    let graph = jc.reference.graph()?;
    let process = jc.process.build()?;
    let cost = jc.cost.build(graph.alphabet_len(), process.alphabet_len())?;
    let blocks = process.blocks(jc.k + 1)?;
    let instance = build_instance(&graph, &blocks, &cost, jc.k)?;
    let res = solve(&instance)?;
    let optimal = res.status == LpStatus::Optimal;

    let mut outputs = vec!["value.csv".to_string(), "measure.csv".to_string()];
    let mut checks = Vec::new();

    write_csv(
        &dir.join("value.csv"),
        &["k", "status", "value", "value_float", "product_value"],
        &[vec![
            jc.k.to_string(),
            if optimal { "optimal".into() } else { "infeasible".into() },
            res.value.to_string(),
            cell(ratio_to_f64(&res.value)),
            res.product_value.to_string(),
        ]],
    )?;

    let zero = rat(0, 1);
    let measure_rows: Vec<Vec<String>> = res
        .measure
        .iter()
        .enumerate()
        .filter(|(_, m)| **m != zero)
        .map(|(i, m)| {
            let (xw, yw) = instance.variable_words(i);
            vec![word_str(xw), word_str(yw), m.to_string(), cell(ratio_to_f64(m))]
        })
        .collect();
    write_csv(
        &dir.join("measure.csv"),
        &["x_block", "y_block", "mass", "mass_float"],
        &measure_rows,
    )?;

    checks.push(CheckResult::new(
        "status-optimal",
        optimal,
        format!("{} variables, {} constraints", instance.variable_count(), instance.constraint_count()),
    ));
    if optimal {
        let residual = instance.constraint_residual(&res.measure);
        checks.push(CheckResult::new(
            "measure-residual-zero",
            residual == zero,
            format!("exact constraint residual {residual}"),
        ));
        checks.push(CheckResult::new(
            "value-at-most-product",
            res.value <= res.product_value,
            format!("{} vs product coupling {}", res.value, res.product_value),
        ));
    }

    let mut residual_rows = vec![vec![
        "exact".to_string(),
        if optimal { "0".into() } else { String::new() },
        "0".to_string(),
    ]];
    if jc.float_check && optimal {
        let fr = solve_float(&instance)?;
        let drift = (fr.value - ratio_to_f64(&res.value)).abs();
        residual_rows.push(vec![
            "float".into(),
            cell(fr.max_residual),
            cell(fr.most_negative_entry),
        ]);
        checks.push(CheckResult::new(
            "float-within-1e-9",
            fr.max_residual <= 1e-9 && drift <= 1e-9,
            format!("residual {:.3e}, value drift {:.3e}", fr.max_residual, drift),
        ));
    }
    write_csv(
        &dir.join("residuals.csv"),
        &["route", "max_residual", "most_negative_entry"],
        &residual_rows,
    )?;
    outputs.push("residuals.csv".into());

    Ok(RunArtifacts {
        outputs,
        checks,
        headline: vec![
            ("value", res.value.to_string()),
            ("value_float", cell(ratio_to_f64(&res.value))),
            ("product_value", res.product_value.to_string()),
        ],
    })
}

fn run_quantid(qc: &QuantidConfig, stream: RngStream, dir: &Path) -> Result<RunArtifacts> {
    let theta_grid = match &qc.theta_grid {
        Some(g) => g.build()?,
        None => Grid::covering(0.0, 0.5, 1e-4)?,
    };
    let u_grid = match &qc.u_grid {
        Some(g) => g.build()?,
        None => Grid::new(0.0, 0.01, 100)?,
    };
    let family = RotationFamily::new(theta_grid, u_grid, Partition::halves())?;
    let alpha = qc.alpha.build()?;
    let run = generate(alpha, qc.p, qc.n, stream, family.partition(), qc.u_init)?;
    let schedule = resolve_schedule(&qc.schedule, qc.n)?;
    let trace = estimate_trace(&family, &run.observed, &schedule)?;

    let astar = alpha.as_f64();
    let rows: Vec<Vec<String>> = trace
        .iter()
        .map(|(n, est)| {
            vec![
                n.to_string(),
                cell(est.theta),
                cell(est.u),
                cell(est.risk),
                cell((est.theta - astar).abs()),
            ]
        })
        .collect();
    write_csv(
        &dir.join("trace.csv"),
        &["n", "theta_hat", "u_hat", "risk", "abs_err"],
        &rows,
    )?;

    let points: Vec<(f64, f64)> = trace
        .iter()
        .map(|(n, est)| (*n as f64, (est.theta - astar).abs()))
        .collect();
    fs::write(
        dir.join("trace.svg"),
        line_plot_svg("angle identification error", "window length", "|theta_hat - alpha|", &points),
    )?;

    let risks_ok = trace.iter().all(|(_, e)| (0.0..=1.0).contains(&e.risk));
    let theta_ok = trace
        .iter()
        .all(|(_, e)| e.theta >= theta_grid.min() && e.theta <= theta_grid.max());
    let (_, last) = trace.last().expect("schedule is nonempty");
    Ok(RunArtifacts {
        outputs: vec!["trace.csv".into(), "trace.svg".into()],
        checks: vec![
            CheckResult::new(
                "risk-in-unit-interval",
                risks_ok,
                format!("{} estimates", trace.len()),
            ),
            CheckResult::new(
                "theta-within-grid",
                theta_ok,
                format!("grid [{}, {}]", cell(theta_grid.min()), cell(theta_grid.max())),
            ),
        ],
        headline: vec![
            ("theta_hat", cell(last.theta)),
            ("risk", cell(last.risk)),
            ("abs_err", cell((last.theta - astar).abs())),
        ],
    })
}

fn run_complexity(cc: &ComplexityConfig, dir: &Path) -> Result<RunArtifacts> {
    let (counts, entropy, exponent): (Vec<(usize, u64)>, Vec<(usize, f64)>, Option<f64>) =
        match (cc.theta_points, &cc.angle) {
            (Some(_), Some(_)) => bail!("complexity: choose one of `theta_points` or `angle`"),
            (None, None) => bail!("complexity: need `theta_points` (grid) or `angle` (exact)"),
            (Some(k), None) => {
                if k < 2 {
                    bail!("theta_points: need at least 2 grid points");
                }
                let step = 0.5 / (k - 1) as f64;
                let family = RotationFamily::new(
                    Grid::new(0.0, step, k)?,
                    Grid::new(0.0, 0.01, 100)?,
                    Partition::halves(),
                )?;
                let rep = block_complexity(&family, cc.n_max)?;
                (rep.counts.clone(), rep.entropy.clone(), Some(rep.exponent))
            }
            (None, Some(s)) => {
                let (num, den) = s
                    .split_once('/')
                    .with_context(|| format!("angle {s:?}: exact angles are written \"num/den\""))?;
                let num: u64 = num.trim().parse().with_context(|| format!("angle {s:?}"))?;
                let den: u64 = den.trim().parse().with_context(|| format!("angle {s:?}"))?;
                let counts = rational_block_counts(num, den, cc.n_max)?;
                let entropy = counts
                    .iter()
                    .map(|&(n, c)| (n, (c as f64).ln() / n as f64))
                    .collect();
                (counts, entropy, None)
            }
        };

    let rows: Vec<Vec<String>> = counts
        .iter()
        .zip(&entropy)
        .map(|(&(n, c), &(_, h))| vec![n.to_string(), c.to_string(), cell(h)])
        .collect();
    write_csv(&dir.join("complexity.csv"), &["n", "count", "entropy"], &rows)?;

    let nondecreasing = counts.windows(2).all(|w| w[0].1 <= w[1].1);
    let within_power = counts.iter().all(|&(n, c)| (c as u128) <= (1u128 << n));
    let last_entropy = entropy.last().map(|&(_, h)| h).unwrap_or(f64::INFINITY);
    let gate = last_entropy <= cc.entropy_threshold;
    Ok(RunArtifacts {
        outputs: vec!["complexity.csv".into()],
        checks: vec![
            CheckResult::new(
                "counts-nondecreasing",
                nondecreasing,
                format!("lengths 1..={}", cc.n_max),
            ),
            CheckResult::new("counts-within-2^n", within_power, "binary words".into()),
            CheckResult::new(
                "entropy-gate",
                gate,
                format!("ln C(n)/n = {last_entropy:.6} at n = {}, threshold {}", cc.n_max, cc.entropy_threshold),
            ),
        ],
        headline: vec![
            ("last_count", counts.last().map(|&(_, c)| c.to_string()).unwrap_or_default()),
            ("last_entropy", cell(last_entropy)),
            ("exponent", exponent.map(cell).unwrap_or_default()),
        ],
    })
}

fn run_mle(mc: &MleConfig, stream: RngStream, dir: &Path) -> Result<RunArtifacts> {
    let family = DensityFamily::new(parse_family(&mc.family)?, mc.theta_grid.build()?)?;
    let source = mc.source.build()?;
    let window = source.sample(mc.n, stream)?;
    let schedule = resolve_schedule(&mc.schedule, mc.n)?;
    let fits = mle_trace(&family, &window, &schedule, mc.refine)?;

    let rows: Vec<Vec<String>> = fits
        .iter()
        .map(|f| vec![f.n.to_string(), opt_cell(f.theta), cell(f.loglik)])
        .collect();
    write_csv(&dir.join("trace.csv"), &["n", "theta_hat", "loglik"], &rows)?;

    let grid = family.theta_grid;
    let loglik_ok = fits.iter().all(|f| f.loglik <= 0.0);
    let theta_ok = fits
        .iter()
        .all(|f| f.theta.map_or(true, |t| t >= grid.min() && t <= grid.max()));
    let mut checks = vec![
        CheckResult::new(
            "loglik-nonpositive",
            loglik_ok,
            "densities here never exceed 1".into(),
        ),
        CheckResult::new(
            "theta-within-grid",
            theta_ok,
            format!("grid [{}, {}]", cell(grid.min()), cell(grid.max())),
        ),
    ];
    let last = fits.last().expect("schedule is nonempty");
    if let Some(mean) = mc.target_mean {
        let target = target_set(&family, mean)?;
        let tol = mc.target_tol.unwrap_or(0.01);
        let (pass, detail) = match last.theta {
            Some(t) => (
                (t - target).abs() <= tol,
                format!("|{} - {}| vs tol {}", cell(t), cell(target), cell(tol)),
            ),
            None => (false, "no admissible parameter".into()),
        };
        checks.push(CheckResult::new("target-hit", pass, detail));
    } else if mc.target_tol.is_some() {
        bail!("mle: `target_tol` without `target_mean` has no effect");
    }

    Ok(RunArtifacts {
        outputs: vec!["trace.csv".into()],
        checks,
        headline: vec![
            ("theta_hat", opt_cell(last.theta)),
            ("loglik", cell(last.loglik)),
        ],
    })
}
