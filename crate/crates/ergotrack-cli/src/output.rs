//! Artifact emission: CSV tables, minimal SVG line plots, run manifests.
//!
//! Everything written here must be byte-identical across re-runs of the
//! same config, so all float formatting goes through the 17-digit
//! round-trip form and nothing touches clocks or thread order. The one
//! exception is the manifest's wall time, which is why manifests are not
//! part of the reproducibility contract; the CSVs and SVGs are.

use anyhow::{Context, Result};
use ergotrack_core::tracking::fmt_f64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// One embedded sanity check of a run.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// What one run produced and whether its checks held.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// Schema version of the config that drove the run.
    pub config_version: i64,
    /// Version of this binary.
    pub tool_version: String,
    pub kind: String,
    pub seed: u64,
    /// RNG stream index; sweeps give each value its own.
    pub stream: u64,
    /// Worker threads the process was allowed; 0 means automatic.
    pub threads: usize,
    /// SHA-256 of the resolved config written next to the outputs.
    pub config_sha256: String,
    /// Data files produced, relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub wall_ms: u128,
}

impl RunManifest {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Render a float for a CSV cell; empty optionals become empty cells.
pub fn cell(x: f64) -> String {
    fmt_f64(x)
}

pub fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Write a CSV with a mandatory header. Cells must not contain commas or
/// newlines; every writer in this binary emits numbers, short ids, or
/// rational literals, so no quoting dialect is needed.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        debug_assert!(row.iter().all(|c| !c.contains(',') && !c.contains('\n')));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// A minimal SVG line plot: one polyline over labeled axes. Convenience
/// output only; nothing downstream parses it.
pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const ML: f64 = 70.0; // left margin, leaves room for y tick labels
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;

    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1) = (0.0f64, 1.0f64);
    let (mut y0, mut y1) = (0.0f64, 1.0f64);
    if !finite.is_empty() {
        x0 = finite.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        x1 = finite.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        y0 = finite.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        y1 = finite.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        escape_xml(title)
    );
    // axes
    let _ = writeln!(
        s,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.1}\" stroke=\"black\"/>",
        H - MB
    );
    let _ = writeln!(
        s,
        "<line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        H - MB,
        W - MR,
        H - MB
    );
    // corner tick labels carry the data range
    let _ = writeln!(
        s,
        "<text x=\"{ML}\" y=\"{:.1}\" text-anchor=\"start\">{:.4e}</text>",
        H - MB + 16.0,
        x0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{:.4e}</text>",
        W - MR,
        H - MB + 16.0,
        x1
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{:.4e}</text>",
        ML - 4.0,
        H - MB,
        y0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{:.4e}</text>",
        ML - 4.0,
        MT + 10.0,
        y1
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        (ML + W - MR) / 2.0,
        H - 12.0,
        escape_xml(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        escape_xml(y_label)
    );
    if !finite.is_empty() {
        let mut path = String::new();
        for (x, y) in &finite {
            let _ = write!(path, "{:.2},{:.2} ", sx(*x), sy(*y));
        }
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>",
            path.trim_end()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
