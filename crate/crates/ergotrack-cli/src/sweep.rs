//! Sweeps: one config re-run across a list of values for a single field.
//!
//! The axis is a dotted path into the TOML tree (`quantid.p`, `joinlp.k`).
//! Each value gets its own run directory, its own RNG stream under the
//! shared seed, and a fully resolved config written next to its outputs.
//! The rewritten file is re-validated through the strict schema, so a typo
//! in the axis path fails loudly instead of sweeping nothing. Runs may
//! execute in parallel; the summary table is assembled afterwards in value
//! order, so output bytes do not depend on the thread count.

use crate::config::ExperimentConfig;
use crate::output::{cell, write_csv, RunManifest};
use crate::runner::execute;
use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use std::path::Path;

#[derive(Debug)]
pub struct SweepOutcome {
    pub manifests: Vec<RunManifest>,
    pub all_pass: bool,
}

/// Rewrite one numeric leaf of the raw config tree.
///
/// Integer fields keep integer type (a fractional value for one is an
/// error); float fields stay floats; a previously absent leaf becomes an
/// integer when the value is integral, so it can land in fields of either
/// type.
fn set_axis(table: &mut toml::Table, axis: &str, value: f64) -> Result<()> {
    let mut parts: Vec<&str> = axis.split('.').collect();
    let leaf = parts.pop().filter(|l| !l.is_empty()).context("axis: empty field path")?;
    let mut cur = table;
    for part in parts {
        cur = cur
            .get_mut(part)
            .with_context(|| format!("axis {axis:?}: no [{part}] section in the config"))?
            .as_table_mut()
            .with_context(|| format!("axis {axis:?}: {part} is not a section"))?;
    }
    let new = match cur.get(leaf) {
        Some(toml::Value::Integer(_)) => {
            if value.fract() != 0.0 {
                bail!("axis {axis:?} is an integer field, cannot take {value}");
            }
            toml::Value::Integer(value as i64)
        }
        Some(toml::Value::Float(_)) => toml::Value::Float(value),
        Some(other) => bail!("axis {axis:?} is not numeric (found a {})", other.type_str()),
        None if value.fract() == 0.0 => toml::Value::Integer(value as i64),
        None => toml::Value::Float(value),
    };
    cur.insert(leaf.to_string(), new);
    Ok(())
}

/// Produce the per-value resolved config text: axis set, seed pinned, output
/// directory inlined.
fn resolved_text(raw: &str, axis: &str, value: f64, seed: u64, dir: &Path) -> Result<String> {
    let mut table: toml::Table = toml::from_str(raw)?;
    set_axis(&mut table, axis, value)?;
    table.insert("seed".to_string(), toml::Value::Integer(seed as i64));
    table.insert(
        "out".to_string(),
        toml::Value::String(dir.to_string_lossy().into_owned()),
    );
    Ok(toml::to_string(&table)?)
}

pub fn run_sweep(
    raw: &str,
    axis: &str,
    values: &[f64],
    seed: u64,
    threads: usize,
    out_dir: &Path,
) -> Result<SweepOutcome> {
    if values.is_empty() {
        bail!("sweep: need at least one value");
    }
    if axis == "seed" {
        bail!("sweep: the seed is shared across a sweep (streams are split per value); vary a parameter instead");
    }
    if seed > i64::MAX as u64 {
        bail!("sweep: seeds above 2^63 - 1 do not round-trip through the config file");
    }
    let base = ExperimentConfig::parse(raw)?;

    // prepare every run up front so path errors surface before any work
    let prepared: Vec<(usize, f64, String, std::path::PathBuf)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let dir = out_dir.join(format!("run-{i:03}"));
            let text = resolved_text(raw, axis, v, seed, &dir)?;
            let cfg = ExperimentConfig::parse(&text)
                .with_context(|| format!("axis {axis:?} = {v} makes the config invalid"))?;
            if cfg.kind != base.kind {
                bail!("axis {axis:?} changed the experiment kind");
            }
            Ok((i, v, text, dir))
        })
        .collect::<Result<_>>()?;

    let mut results: Vec<_> = prepared
        .par_iter()
        .map(|(i, v, text, dir)| {
            let cfg = ExperimentConfig::parse(text)?;
            let (manifest, headline) = execute(&cfg, text, seed, *i as u64, threads, dir)?;
            Ok((*i, *v, manifest, headline))
        })
        .collect::<Result<Vec<_>>>()?;
    results.sort_by_key(|(i, ..)| *i);

    let headline_keys: Vec<&'static str> =
        results[0].3.iter().map(|(k, _)| *k).collect();
    // headline keys are plain identifiers like "value", so the axis value
    // column carries a name no run can shadow
    let mut header: Vec<&str> = vec!["run", "axis", "axis_value"];
    header.extend(headline_keys.iter());
    header.push("checks_pass");
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(i, v, manifest, headline)| {
            let mut row = vec![format!("run-{i:03}"), axis.to_string(), cell(*v)];
            row.extend(headline.iter().map(|(_, val)| val.clone()));
            row.push(manifest.all_checks_pass().to_string());
            row
        })
        .collect();
    write_csv(&out_dir.join("summary.csv"), &header, &rows)?;

    let manifests: Vec<RunManifest> = results.into_iter().map(|(_, _, m, _)| m).collect();
    let all_pass = manifests.iter().all(|m| m.all_checks_pass());
    Ok(SweepOutcome { manifests, all_pass })
}
