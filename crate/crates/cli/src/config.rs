//! Scenario files: one TOML document per run, with every solver
//! tolerance and grid size recorded as an explicit field so the
//! emitted numbers are reconstructible from the config alone.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use yamabe_core::geometry::{choose_alphas, exp_torus_spec, FibreSpec, WarpedProductSpec};
use yamabe_core::profile::{Interval, RadialProfile};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Certify,
    Eigen,
    YamabeAnnulus,
    Barriers,
    Classify,
    Sharpness,
    AlhCheck,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Certify => "certify",
            CommandKind::Eigen => "eigen",
            CommandKind::YamabeAnnulus => "yamabe-annulus",
            CommandKind::Barriers => "barriers",
            CommandKind::Classify => "classify",
            CommandKind::Sharpness => "sharpness",
            CommandKind::AlhCheck => "alh-check",
            CommandKind::Sweep => "sweep",
        }
    }
}

/// One declarative scenario: the command, the geometry it acts on, and
/// the command-specific numeric parameters.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub command: CommandKind,
    pub spec: Option<SpecConfig>,
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub parameters: Params,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Warped-product builders. `exp-torus` takes either the total rate
/// `beta` (circle exponents derived; the equal-rate family is used when
/// `beta > n-1`) or the exponents themselves.
#[derive(Deserialize, Debug)]
#[serde(tag = "builder", rename_all = "kebab-case")]
pub enum SpecConfig {
    ExpTorus {
        n: usize,
        beta: Option<f64>,
        alphas: Option<Vec<f64>>,
    },
    Reference {
        k: i32,
        n: usize,
        r0: f64,
        fibre_volume: Option<f64>,
    },
    WarpedProduct {
        warpings: Vec<String>,
        fibres: Vec<FibreConfig>,
    },
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct FibreConfig {
    pub dim: usize,
    pub scal: f64,
    pub volume: f64,
}

/// Inner interval plus separation; give either endpoints `a`, `b` or a
/// centered half-width `w`.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub w: Option<f64>,
    pub separation: f64,
}

impl DomainConfig {
    pub fn endpoints(&self) -> Result<(f64, f64), ConfigError> {
        match (self.a, self.b, self.w) {
            (Some(a), Some(b), None) => Ok((a, b)),
            (None, None, Some(w)) => Ok((-w, w)),
            _ => err("domain: give either both `a` and `b`, or `w` alone"),
        }
    }
}

/// A value for a swept parameter: a single number, an explicit list,
/// or an arithmetic progression.
#[derive(Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum RangeSpec {
    Single(f64),
    List(Vec<f64>),
    Grid { start: f64, stop: f64, step: f64 },
}

impl RangeSpec {
    pub fn scalar(&self, name: &str) -> Result<f64, ConfigError> {
        match self {
            RangeSpec::Single(x) => Ok(*x),
            _ => err(format!("parameter `{name}` must be a single number here")),
        }
    }

    /// Expands to the sorted list of values; empty ranges are refused.
    pub fn expand(&self, name: &str) -> Result<Vec<f64>, ConfigError> {
        let mut values = match self {
            RangeSpec::Single(x) => vec![*x],
            RangeSpec::List(xs) => xs.clone(),
            RangeSpec::Grid { start, stop, step } => {
                if !(*step > 0.0) {
                    return err(format!("range `{name}`: step must be positive, got {step}"));
                }
                let mut out = Vec::new();
                let mut k = 0usize;
                loop {
                    let x = start + step * k as f64;
                    if x > stop + step * 1e-9 {
                        break;
                    }
                    out.push(x);
                    k += 1;
                }
                out
            }
        };
        if values.is_empty() {
            return err(format!("range `{name}` is empty; nothing to sweep"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return err(format!("range `{name}` contains a non-finite value"));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(values)
    }
}

/// Uniform sample grid for chart tables and decay probes.
#[derive(Deserialize, Clone, Copy, Debug)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridConfig {
    pub fn points(&self, name: &str) -> Result<Vec<f64>, ConfigError> {
        if self.count < 2 || !(self.stop > self.start) {
            return err(format!(
                "grid `{name}` needs stop > start and count >= 2, got [{}, {}] with {}",
                self.start, self.stop, self.count
            ));
        }
        Ok((0..self.count)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64)
            .collect())
    }
}

/// Command-specific knobs, one shared table. Unknown names are
/// rejected at parse time; each command reads the fields it needs.
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Eigensolver cells; also the per-case grid of a sweep.
    pub grid: Option<usize>,
    pub n: Option<usize>,
    pub half_width: Option<f64>,
    /// Radial drift expression in `r` for the annulus solver.
    pub drift: Option<String>,
    /// Scalar-curvature expression in `r` for the annulus solver.
    pub scal: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<RangeSpec>,
    pub c1: Option<f64>,
    /// Drift-ratio expression `q(r)` for barrier verification.
    pub drift_ratio: Option<String>,
    pub nodes: Option<usize>,
    /// Warping expression in `r` for classification.
    pub warping: Option<String>,
    pub k: Option<i32>,
    pub r0: Option<f64>,
    pub fibre_volume: Option<f64>,
    pub big_r: Option<f64>,
    pub z_grid: Option<GridConfig>,
    pub radii: Option<GridConfig>,
    pub order: Option<usize>,
    pub w: Option<RangeSpec>,
    pub r: Option<RangeSpec>,
    pub cap: Option<usize>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub json: Option<String>,
    pub csv: Option<String>,
    pub text: Option<String>,
}

pub fn load(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError(format!("config {}: {e}", path.display())))
}

/// The exponential torus with total rate `beta`: model curvature
/// `-n(n-1)` when `beta <= n-1`, the equal-rate family otherwise.
pub fn torus_for_rate(beta: f64, n: usize) -> Result<WarpedProductSpec<f64>, ConfigError> {
    let alphas = if beta.abs() <= (n - 1) as f64 {
        choose_alphas(beta, n).map_err(|e| ConfigError(e.to_string()))?
    } else {
        vec![beta / (n - 1) as f64; n - 1]
    };
    exp_torus_spec(&alphas)
        .map(|(spec, _)| spec)
        .map_err(|e| ConfigError(e.to_string()))
}

pub fn build_spec(config: &SpecConfig) -> Result<WarpedProductSpec<f64>, ConfigError> {
    match config {
        SpecConfig::ExpTorus { n, beta, alphas } => match (beta, alphas) {
            (Some(beta), None) => torus_for_rate(*beta, *n),
            (None, Some(alphas)) => {
                if alphas.len() != n - 1 {
                    return err(format!(
                        "spec: {} exponents given for n = {n} (need n-1)",
                        alphas.len()
                    ));
                }
                exp_torus_spec(alphas)
                    .map(|(spec, _)| spec)
                    .map_err(|e| ConfigError(e.to_string()))
            }
            _ => err("spec: give exactly one of `beta` or `alphas`"),
        },
        SpecConfig::Reference {
            k,
            n,
            r0,
            fibre_volume,
        } => yamabe_core::geometry::ReferenceHyperbolic::new(
            *k,
            *n,
            *r0,
            fibre_volume.unwrap_or(1.0),
        )
        .and_then(|reference| reference.spec())
        .map_err(|e| ConfigError(e.to_string())),
        SpecConfig::WarpedProduct { warpings, fibres } => {
            let profiles = warpings
                .iter()
                .map(|s| parse_profile(s, "spec.warpings"))
                .collect::<Result<Vec<_>, _>>()?;
            let fibre_specs = fibres
                .iter()
                .map(|f| {
                    FibreSpec::new(f.dim, f.scal, f.volume).map_err(|e| ConfigError(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            WarpedProductSpec::new(fibre_specs, profiles).map_err(|e| ConfigError(e.to_string()))
        }
    }
}

pub fn parse_profile(text: &str, field: &str) -> Result<RadialProfile<f64>, ConfigError> {
    RadialProfile::parse(text, Interval::all())
        .map_err(|e| ConfigError(format!("{field}: cannot parse {text:?}: {e}")))
}
