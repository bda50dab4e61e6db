//! Declarative experiment configs.
//!
//! One TOML file describes one run:
//!
//! - `version`, `kind`, and `seed` at the top level; the seed may instead
//!   come from the command line, but never from the wall clock;
//! - exactly one parameter block, named after the kind;
//! - unknown keys anywhere are hard errors, so typos cannot silently change
//!   what a run means;
//! - numeric leaves are plain TOML numbers, which is what lets sweeps
//!   rewrite a single field and re-validate the whole file.

use anyhow::{bail, Context, Result};
use ergotrack_core::joinlp::BigRational;
use ergotrack_core::{
    Angle, CostFunction, DensityKind, Grid, ObservationSource, Partition, SftGraph,
    TopologicalSystem,
};
use serde::Deserialize;

/// The only schema this binary reads or writes.
pub const CONFIG_VERSION: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Track,
    Joinlp,
    Quantid,
    Complexity,
    Mle,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Track => "track",
            ExperimentKind::Joinlp => "joinlp",
            ExperimentKind::Quantid => "quantid",
            ExperimentKind::Complexity => "complexity",
            ExperimentKind::Mle => "mle",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: i64,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Output directory; the command line can override it.
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub track: Option<TrackConfig>,
    #[serde(default)]
    pub joinlp: Option<JoinlpConfig>,
    #[serde(default)]
    pub quantid: Option<QuantidConfig>,
    #[serde(default)]
    pub complexity: Option<ComplexityConfig>,
    #[serde(default)]
    pub mle: Option<MleConfig>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("config does not parse")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural checks that serde alone cannot express.
    fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            bail!(
                "version: expected {CONFIG_VERSION}, got {} (this binary reads schema version {CONFIG_VERSION} only)",
                self.version
            );
        }
        let blocks = [
            ("track", self.track.is_some()),
            ("joinlp", self.joinlp.is_some()),
            ("quantid", self.quantid.is_some()),
            ("complexity", self.complexity.is_some()),
            ("mle", self.mle.is_some()),
        ];
        for (name, present) in blocks {
            let wanted = name == self.kind.name();
            if wanted && !present {
                bail!("kind = {name:?} but the [{name}] block is missing");
            }
            if !wanted && present {
                bail!("block [{name}] does not match kind = {:?}", self.kind.name());
            }
        }
        Ok(())
    }

    /// The seed that will drive the run, after the command line had its say.
    pub fn seed_or(&self, flag: Option<u64>) -> Result<u64> {
        flag.or(self.seed).context(
            "seed: missing (every run must be seeded; add `seed = <integer>` to the config or pass --seed)",
        )
    }
}

/// A uniform grid, `start + i * step` for `i < count`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Ok(Grid::new(self.start, self.step, self.count)?)
    }
}

/// An angle, written either as a float (`0.25`) or an exact fraction
/// (`"1/4"`). The fraction form never drifts along long orbits.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AngleSpec {
    Float(f64),
    Fraction(String),
}

impl AngleSpec {
    pub fn build(&self) -> Result<Angle> {
        match self {
            AngleSpec::Float(a) => Ok(Angle::float(*a)?),
            AngleSpec::Fraction(s) => {
                let (num, den) = s
                    .split_once('/')
                    .with_context(|| format!("angle {s:?}: exact angles are written \"num/den\""))?;
                let num: u64 = num.trim().parse().with_context(|| format!("angle {s:?}"))?;
                let den: u64 = den.trim().parse().with_context(|| format!("angle {s:?}"))?;
                Ok(Angle::rational(num, den)?)
            }
        }
    }
}

/// Reference system selector. `kind` picks the shape; only the fields that
/// belong to that shape may be present.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    pub kind: String,
    #[serde(default)]
    pub symbols: Option<usize>,
    #[serde(default)]
    pub adjacency: Option<Vec<Vec<bool>>>,
    #[serde(default)]
    pub angle: Option<AngleSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub theta_grid: Option<GridSpec>,
    #[serde(default)]
    pub u_grid: Option<GridSpec>,
}

/// Reject fields that the chosen kind does not read.
fn only(kind: &str, allowed: &[&str], present: &[(&str, bool)]) -> Result<()> {
    for (name, is_set) in present {
        if *is_set && !allowed.contains(name) {
            bail!("field `{name}` does not apply to kind = {kind:?}");
        }
    }
    Ok(())
}

impl ReferenceSpec {
    pub fn graph(&self) -> Result<SftGraph> {
        let fields = self.field_presence();
        match self.kind.as_str() {
            "golden-mean" => {
                only("golden-mean", &[], &fields)?;
                Ok(SftGraph::golden_mean())
            }
            "full-shift" => {
                only("full-shift", &["symbols"], &fields)?;
                let k = self.symbols.context("full-shift needs `symbols`")?;
                Ok(SftGraph::full_shift(k)?)
            }
            "fixed-point" => {
                only("fixed-point", &[], &fields)?;
                Ok(SftGraph::full_shift(1)?)
            }
            "two-fixed-points" => {
                only("two-fixed-points", &[], &fields)?;
                Ok(SftGraph::two_fixed_points())
            }
            "adjacency" => {
                only("adjacency", &["adjacency"], &fields)?;
                let rows = self.adjacency.clone().context("adjacency needs `adjacency`")?;
                Ok(SftGraph::new(rows)?)
            }
            other => bail!(
                "reference kind {other:?} is not a subshift (known: golden-mean, full-shift, fixed-point, two-fixed-points, adjacency)"
            ),
        }
    }

    pub fn system(&self) -> Result<TopologicalSystem> {
        let fields = self.field_presence();
        match self.kind.as_str() {
            "circle" => {
                only("circle", &["angle"], &fields)?;
                let angle = self.angle.as_ref().context("circle needs `angle`")?.build()?;
                Ok(TopologicalSystem::circle(angle))
            }
            "params" => {
                only("params", &["grid"], &fields)?;
                let grid = self.grid.context("params needs `grid`")?.build()?;
                Ok(TopologicalSystem::IdentityOnParams { grid })
            }
            "fiber" => {
                only("fiber", &["theta_grid", "u_grid"], &fields)?;
                Ok(TopologicalSystem::FiberProduct {
                    theta_grid: self.theta_grid.context("fiber needs `theta_grid`")?.build()?,
                    u_grid: self.u_grid.context("fiber needs `u_grid`")?.build()?,
                    partition: Partition::halves(),
                })
            }
            _ => Ok(TopologicalSystem::subshift(self.graph()?)),
        }
    }

    fn field_presence(&self) -> [(&'static str, bool); 6] {
        [
            ("symbols", self.symbols.is_some()),
            ("adjacency", self.adjacency.is_some()),
            ("angle", self.angle.is_some()),
            ("grid", self.grid.is_some()),
            ("theta_grid", self.theta_grid.is_some()),
            ("u_grid", self.u_grid.is_some()),
        ]
    }
}

/// Observation source selector.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub kind: String,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub transition: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub angle: Option<AngleSpec>,
    #[serde(default)]
    pub init: Option<f64>,
    #[serde(default)]
    pub flip_p: Option<f64>,
}

impl SourceSpec {
    pub fn build(&self) -> Result<ObservationSource> {
        let fields = [
            ("p", self.p.is_some()),
            ("transition", self.transition.is_some()),
            ("angle", self.angle.is_some()),
            ("init", self.init.is_some()),
            ("flip_p", self.flip_p.is_some()),
        ];
        match self.kind.as_str() {
            "iid-binary" => {
                only("iid-binary", &["p"], &fields)?;
                let p = self.p.context("iid-binary needs `p`")?;
                Ok(ObservationSource::iid_binary(p)?)
            }
            "markov" => {
                only("markov", &["transition"], &fields)?;
                let t = self.transition.clone().context("markov needs `transition`")?;
                Ok(ObservationSource::markov(t)?)
            }
            "rotation" => {
                only("rotation", &["angle", "init"], &fields)?;
                let angle = self.angle.as_ref().context("rotation needs `angle`")?.build()?;
                Ok(ObservationSource::rotation(angle, self.init)?)
            }
            "noisy-label" => {
                only("noisy-label", &["angle", "init", "flip_p"], &fields)?;
                let angle = self.angle.as_ref().context("noisy-label needs `angle`")?.build()?;
                let base = ObservationSource::rotation(angle, self.init)?;
                let flip_p = self.flip_p.context("noisy-label needs `flip_p`")?;
                Ok(ObservationSource::noisy_label(base, Partition::halves(), flip_p)?)
            }
            other => bail!(
                "source kind {other:?} unknown (known: iid-binary, markov, rotation, noisy-label)"
            ),
        }
    }
}

/// Per-step cost selector for tracking runs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub kind: String,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub table: Option<Vec<Vec<f64>>>,
}

impl CostSpec {
    pub fn build(&self) -> Result<CostFunction> {
        let fields = [("family", self.family.is_some()), ("table", self.table.is_some())];
        match self.kind.as_str() {
            "hamming" => {
                only("hamming", &[], &fields)?;
                Ok(CostFunction::hamming())
            }
            "neg-log" => {
                only("neg-log", &["family"], &fields)?;
                let family = parse_family(self.family.as_deref().context("neg-log needs `family`")?)?;
                Ok(CostFunction::NegLogDensity { family })
            }
            "table" => {
                only("table", &["table"], &fields)?;
                let rows = self.table.clone().context("table needs `table`")?;
                Ok(CostFunction::custom(rows)?)
            }
            other => bail!("cost kind {other:?} unknown (known: hamming, neg-log, table)"),
        }
    }
}

pub fn parse_family(name: &str) -> Result<DensityKind> {
    match name {
        "bernoulli" => Ok(DensityKind::Bernoulli),
        "gaussian-location" => Ok(DensityKind::GaussianLocation),
        other => bail!("density family {other:?} unknown (known: bernoulli, gaussian-location)"),
    }
}

fn default_true() -> bool {
    true
}

fn default_circle_resolution() -> f64 {
    1e-3
}

fn default_entropy_threshold() -> f64 {
    0.2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackConfig {
    /// Window length; the source is sampled once at this length.
    pub n: usize,
    /// Strictly increasing prefix lengths; the last entry must equal `n`.
    /// Absent means a single row at `n`.
    #[serde(default)]
    pub schedule: Option<Vec<usize>>,
    #[serde(default = "default_true")]
    pub refine: bool,
    #[serde(default = "default_circle_resolution")]
    pub circle_resolution: f64,
    pub reference: ReferenceSpec,
    pub cost: CostSpec,
    pub source: SourceSpec,
}

/// Exact block distribution selector for coupling programs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    pub kind: String,
    /// Success probability of i.i.d. bits, exact (`"1/2"`, `"0.3"`).
    #[serde(default)]
    pub p: Option<String>,
    /// Row-stochastic matrix with exact entries.
    #[serde(default)]
    pub transition: Option<Vec<Vec<String>>>,
    /// One period of a deterministic cycle.
    #[serde(default)]
    pub word: Option<Vec<u8>>,
}

impl ProcessSpec {
    pub fn build(&self) -> Result<ergotrack_core::joinlp::ExactProcess> {
        use ergotrack_core::joinlp::{parse_rational, ExactProcess};
        let fields = [
            ("p", self.p.is_some()),
            ("transition", self.transition.is_some()),
            ("word", self.word.is_some()),
        ];
        match self.kind.as_str() {
            "iid-bits" => {
                only("iid-bits", &["p"], &fields)?;
                let p = parse_rational(self.p.as_deref().context("iid-bits needs `p`")?)?;
                Ok(ExactProcess::iid_bits(p)?)
            }
            "markov" => {
                only("markov", &["transition"], &fields)?;
                let rows = self.transition.as_ref().context("markov needs `transition`")?;
                let t = rows
                    .iter()
                    .map(|r| r.iter().map(|s| Ok(parse_rational(s)?)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(ExactProcess::markov(t)?)
            }
            "cycle" => {
                only("cycle", &["word"], &fields)?;
                let w = self.word.clone().context("cycle needs `word`")?;
                Ok(ExactProcess::cycle(w)?)
            }
            other => bail!("process kind {other:?} unknown (known: iid-bits, markov, cycle)"),
        }
    }
}

/// Cost table with exact rational entries.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalCostSpec {
    pub kind: String,
    #[serde(default)]
    pub table: Option<Vec<Vec<String>>>,
}

impl RationalCostSpec {
    pub fn build(&self, nx: usize, ny: usize) -> Result<Vec<Vec<BigRational>>> {
        use ergotrack_core::joinlp::{hamming_table, parse_rational};
        let fields = [("table", self.table.is_some())];
        match self.kind.as_str() {
            "hamming" => {
                only("hamming", &[], &fields)?;
                Ok(hamming_table(nx, ny.max(nx)))
            }
            "table" => {
                only("table", &["table"], &fields)?;
                let rows = self.table.as_ref().context("table needs `table`")?;
                rows.iter()
                    .map(|r| r.iter().map(|s| Ok(parse_rational(s)?)).collect())
                    .collect()
            }
            other => bail!("cost kind {other:?} unknown here (known: hamming, table)"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoinlpConfig {
    /// Coupling block level; the program lives on (k+1)-blocks.
    pub k: usize,
    /// Also re-solve in floating point and report residuals.
    #[serde(default)]
    pub float_check: bool,
    pub reference: ReferenceSpec,
    pub process: ProcessSpec,
    pub cost: RationalCostSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantidConfig {
    /// True rotation angle being identified.
    pub alpha: AngleSpec,
    /// Label flip probability in `[0, 1/2)`.
    pub p: f64,
    pub n: usize,
    #[serde(default)]
    pub u_init: Option<f64>,
    /// Prefix lengths to estimate at; absent means one estimate at `n`.
    #[serde(default)]
    pub schedule: Option<Vec<usize>>,
    /// Defaults to `[0, 1/2]` in steps of 1e-4.
    #[serde(default)]
    pub theta_grid: Option<GridSpec>,
    /// Defaults to 100 start points spaced 0.01 apart.
    #[serde(default)]
    pub u_grid: Option<GridSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityConfig {
    /// Largest block length to count.
    pub n_max: usize,
    /// Count over a theta grid of this many points spanning `[0, 1/2]`.
    #[serde(default)]
    pub theta_points: Option<usize>,
    /// Count one exact rational angle `"num/den"` instead of a grid.
    #[serde(default)]
    pub angle: Option<String>,
    /// Entropy estimate at `n_max` must not exceed this.
    #[serde(default = "default_entropy_threshold")]
    pub entropy_threshold: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MleConfig {
    pub family: String,
    pub theta_grid: GridSpec,
    pub n: usize,
    /// Prefix lengths to fit at; absent means one fit at `n`.
    #[serde(default)]
    pub schedule: Option<Vec<usize>>,
    #[serde(default = "default_true")]
    pub refine: bool,
    /// Known marginal mean; when set, the run checks the final estimate
    /// lands within `target_tol` of it.
    #[serde(default)]
    pub target_mean: Option<f64>,
    #[serde(default)]
    pub target_tol: Option<f64>,
    pub source: SourceSpec,
}

/// Expand an optional schedule: absent means a single entry at `n`, present
/// means strictly increasing and ending exactly at `n`.
pub fn resolve_schedule(schedule: &Option<Vec<usize>>, n: usize) -> Result<Vec<usize>> {
    match schedule {
        None => Ok(vec![n]),
        Some(s) => {
            if s.is_empty() || s[0] == 0 || s.windows(2).any(|w| w[0] >= w[1]) {
                bail!("schedule: must be strictly increasing and start above 0");
            }
            if *s.last().unwrap() != n {
                bail!("schedule: last entry {} must equal n = {n}", s.last().unwrap());
            }
            Ok(s.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_TRACK: &str = r#"
        version = 1
        kind = "track"
        seed = 7

        [track]
        n = 64
        [track.reference]
        kind = "golden-mean"
        [track.cost]
        kind = "hamming"
        [track.source]
        kind = "iid-binary"
        p = 0.5
    "#;

    #[test]
    fn minimal_track_config_parses() {
        let cfg = ExperimentConfig::parse(MINIMAL_TRACK).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Track);
        assert_eq!(cfg.seed_or(None).unwrap(), 7);
        assert_eq!(cfg.seed_or(Some(9)).unwrap(), 9);
    }

    #[test]
    fn missing_seed_is_rejected_by_name() {
        let text = MINIMAL_TRACK.replace("seed = 7", "");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        let err = cfg.seed_or(None).unwrap_err().to_string();
        assert!(err.contains("seed"), "error must name the field: {err}");
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = MINIMAL_TRACK.replace("n = 64", "n = 64\nn_wibble = 3");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(format!("{err:#}").contains("n_wibble") || format!("{err:#}").contains("unknown"));
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = MINIMAL_TRACK.replace("version = 1", "version = 2");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn kind_and_block_must_agree() {
        let text = MINIMAL_TRACK.replace("kind = \"track\"", "kind = \"joinlp\"");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("track") || err.contains("joinlp"), "{err}");
    }

    #[test]
    fn stray_fields_on_specs_are_rejected() {
        let text = MINIMAL_TRACK.replace(
            "kind = \"golden-mean\"",
            "kind = \"golden-mean\"\nsymbols = 3",
        );
        let cfg = ExperimentConfig::parse(&text).unwrap();
        let err = cfg.track.unwrap().reference.graph().unwrap_err().to_string();
        assert!(err.contains("symbols"), "{err}");
    }

    #[test]
    fn angles_parse_both_ways() {
        let f: AngleSpec = toml::from_str::<toml::Value>("a = 0.25")
            .unwrap()
            .get("a")
            .unwrap()
            .clone()
            .try_into()
            .unwrap();
        assert_eq!(f.build().unwrap(), Angle::Float(0.25));
        let r = AngleSpec::Fraction("1/4".into()).build().unwrap();
        assert_eq!(r, Angle::Rational { num: 1, den: 4 });
        assert!(AngleSpec::Fraction("2/3".into()).build().is_err());
        assert!(AngleSpec::Fraction("0.25".into()).build().is_err());
    }

    #[test]
    fn schedules_resolve_or_reject() {
        assert_eq!(resolve_schedule(&None, 10).unwrap(), vec![10]);
        assert_eq!(resolve_schedule(&Some(vec![2, 5, 10]), 10).unwrap(), vec![2, 5, 10]);
        assert!(resolve_schedule(&Some(vec![2, 5]), 10).is_err());
        assert!(resolve_schedule(&Some(vec![5, 2, 10]), 10).is_err());
        assert!(resolve_schedule(&Some(vec![]), 10).is_err());
        assert!(resolve_schedule(&Some(vec![0, 10]), 10).is_err());
    }

    #[test]
    fn fixed_point_reference_is_one_symbol() {
        let spec = ReferenceSpec {
            kind: "fixed-point".into(),
            symbols: None,
            adjacency: None,
            angle: None,
            grid: None,
            theta_grid: None,
            u_grid: None,
        };
        assert_eq!(spec.graph().unwrap().alphabet_len(), 1);
    }
}
