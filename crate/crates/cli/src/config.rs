//! Experiment configuration files.

use std::path::{Path, PathBuf};

use matconc_core::bounds::FukNagaevForm;
use matconc_core::mc::MIN_TRIALS;
use matconc_core::samplers::{EnsembleSpec, ScalarLaw, VectorModelSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

/// One experiment: shared run settings plus the kind-specific parameters,
/// flattened into a single JSON object keyed by `"kind"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    /// Every random draw derives from this; there is no entropy seeding.
    pub master_seed: u64,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(flatten)]
    pub experiment: Experiment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Empirical tail of a bounded ensemble against the explicit-constant
    /// Bernstein bound.
    VerifyBernstein {
        ensemble: EnsembleSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_grid: Option<Vec<f64>>,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    /// Truncation proposition with its published constants; component tails
    /// are estimated from the same trials.
    VerifyFukNagaev {
        ensemble: EnsembleSpec,
        #[serde(default = "default_form")]
        form: FukNagaevForm,
        /// Truncation level; defaults to twice the largest fixed matrix norm,
        /// or the median of `M` for rank-one ensembles.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_grid: Option<Vec<f64>>,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    /// Moments of `‖ΣW_k‖` against both closed-form Rosenthal bounds.
    VerifyRosenthal {
        ensemble: EnsembleSpec,
        p_list: Vec<f64>,
    },
    /// Moments of `‖ΣX_kX_kᵀ‖` against both PSD Rosenthal bounds.
    VerifyPsdRosenthal {
        ensemble: EnsembleSpec,
        p_list: Vec<f64>,
    },
    /// Mean covariance error over a grid of sample sizes.
    CovScaling {
        model: VectorModelSpec,
        n_grid: Vec<usize>,
        #[serde(default)]
        estimator: CovEstimator,
        #[serde(default = "default_slope_range")]
        slope_range: [f64; 2],
    },
    /// Mean eigenvector error against the relative-rank and classic rates.
    EigScaling {
        model: VectorModelSpec,
        n_grid: Vec<usize>,
        /// 0-based eigenvalue index.
        j: usize,
        #[serde(default = "default_eig_slope")]
        slope_target: f64,
        #[serde(default = "default_eig_tol")]
        slope_tolerance: f64,
        #[serde(default = "default_ratio")]
        min_rate_ratio: f64,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    /// Bernoulli column subsampling moments and bounds.
    Subsample {
        matrix: MatrixSource,
        deltas: Vec<f64>,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    /// Hoffmann-Jørgensen, Lévy, symmetrization and median checks.
    Audit {
        ensemble: EnsembleSpec,
        #[serde(default = "default_levels")]
        levels: Vec<f64>,
        #[serde(default = "default_slack")]
        slack: f64,
        #[serde(default = "default_directions")]
        directions: usize,
        #[serde(default = "default_moments")]
        moments: Vec<f64>,
        #[serde(default)]
        split_trials: bool,
    },
    /// Constant fits for the Fuk-Nagaev tail and the Rosenthal moment bound
    /// over a sweep of scalar-heavy ensembles, re-validated on a second seed.
    FitConstants {
        law: ScalarLaw,
        n_grid: Vec<usize>,
        d_grid: Vec<usize>,
        p_list: Vec<f64>,
        holdout_seed: u64,
        #[serde(default)]
        family_seed: u64,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        #[serde(default = "default_slack")]
        slack: f64,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovEstimator {
    #[default]
    Sample,
    /// Vector-norm truncation at the data-driven default threshold.
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MatrixSource {
    Identity { dim: usize },
    Explicit { rows: Vec<Vec<f64>> },
    /// i.i.d. standard normal entries.
    Gaussian { rows: usize, cols: usize, seed: u64 },
    /// Matrix text file (first line `rows cols`), relative to the config.
    File { path: PathBuf },
}

fn default_slack() -> f64 {
    3.0
}
fn default_form() -> FukNagaevForm {
    FukNagaevForm::Symmetric
}
fn default_grid_points() -> usize {
    40
}
fn default_slope_range() -> [f64; 2] {
    [-0.6, -0.4]
}
fn default_eig_slope() -> f64 {
    -0.5
}
fn default_eig_tol() -> f64 {
    0.1
}
fn default_ratio() -> f64 {
    5.0
}
fn default_levels() -> Vec<f64> {
    vec![0.5, 0.75, 0.9, 0.95, 0.99]
}
fn default_directions() -> usize {
    64
}
fn default_moments() -> Vec<f64> {
    vec![1.0, 2.0]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Shared {
    name: String,
    master_seed: u64,
    trials: usize,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn decode<T: DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value.clone()).map_err(|e| {
        let mut path = e.path().to_string();
        let message = e.into_inner().to_string();
        if path.is_empty() || path == "." {
            path = locate::<T>(&value, &message);
        }
        field(&path, message)
    })
}

fn fails_with<T: DeserializeOwned>(value: &Value, message: &str) -> bool {
    matches!(serde_json::from_value::<T>(value.clone()), Err(e) if e.to_string() == message)
}

/// Path of the value responsible for `message`, found by editing the
/// document: a key (other than the `kind` tag) is the culprit if dropping it
/// changes the error, an array element if replacing it by a sibling does.
/// Needed because tagged enums buffer their content and lose the path.
fn locate<T: DeserializeOwned>(root: &Value, message: &str) -> String {
    let mut path: Vec<Segment> = Vec::new();
    'descend: loop {
        let node = lookup(root, &path);
        match node {
            Value::Object(map) => {
                // the tag is always needed, so dropping it says nothing
                for key in map.keys().filter(|k| *k != "kind") {
                    let mut edited = root.clone();
                    if let Value::Object(m) = lookup_mut(&mut edited, &path) {
                        m.remove(key);
                    }
                    if !fails_with::<T>(&edited, message) {
                        path.push(Segment::Key(key.clone()));
                        continue 'descend;
                    }
                }
            }
            Value::Array(items) => {
                for i in 0..items.len() {
                    for j in (0..items.len()).filter(|&j| j != i) {
                        let mut edited = root.clone();
                        if let Value::Array(a) = lookup_mut(&mut edited, &path) {
                            a[i] = items[j].clone();
                        }
                        if !fails_with::<T>(&edited, message) {
                            path.push(Segment::Index(i));
                            continue 'descend;
                        }
                    }
                }
            }
            _ => {}
        }
        break;
    }
    let mut out = String::new();
    for seg in &path {
        match seg {
            Segment::Key(k) if out.is_empty() => out.push_str(k),
            Segment::Key(k) => {
                out.push('.');
                out.push_str(k);
            }
            Segment::Index(i) => out.push_str(&format!("[{i}]")),
        }
    }
    if out.is_empty() {
        ".".into()
    } else {
        out
    }
}

enum Segment {
    Key(String),
    Index(usize),
}

fn lookup<'a>(mut v: &'a Value, path: &[Segment]) -> &'a Value {
    for seg in path {
        v = match seg {
            Segment::Key(k) => &v[k.as_str()],
            Segment::Index(i) => &v[*i],
        };
    }
    v
}

fn lookup_mut<'a>(mut v: &'a mut Value, path: &[Segment]) -> &'a mut Value {
    for seg in path {
        v = match seg {
            Segment::Key(k) => &mut v[k.as_str()],
            Segment::Index(i) => &mut v[*i],
        };
    }
    v
}

fn field(path: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Parses JSON, reporting the failing field path on schema errors, then
    /// validates. The shared fields and the kind-specific part are decoded
    /// separately so that errors inside either keep their path.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| field("", e.to_string()))?;
        let Value::Object(mut map) = value else {
            return Err(field("", "config must be a JSON object"));
        };
        let mut shared = serde_json::Map::new();
        for key in ["name", "master_seed", "trials", "output_dir"] {
            if let Some(v) = map.remove(key) {
                shared.insert(key.to_string(), v);
            }
        }
        let shared: Shared = decode(Value::Object(shared))?;
        let experiment: Experiment = decode(Value::Object(map))?;
        let cfg = ExperimentConfig {
            name: shared.name,
            master_seed: shared.master_seed,
            trials: shared.trials,
            output_dir: shared.output_dir,
            experiment,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut cfg = Self::from_json(&text)?;
        // file-backed matrices resolve against the config's directory
        if let Experiment::Subsample {
            matrix: MatrixSource::File { path: p },
            ..
        } = &mut cfg.experiment
        {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn kind(&self) -> &'static str {
        self.experiment.kind()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(field("name", "must be nonempty"));
        }
        if self.name.contains(['/', '\\']) {
            return Err(field("name", "must not contain path separators"));
        }
        if self.trials < MIN_TRIALS {
            return Err(field("trials", format!("must be >= {MIN_TRIALS}, got {}", self.trials)));
        }
        self.experiment.validate()
    }
}

fn check_slack(slack: f64) -> Result<()> {
    if !(slack >= 0.0 && slack.is_finite()) {
        return Err(field("slack", format!("must be finite and >= 0, got {slack}")));
    }
    Ok(())
}

fn check_p_list(p_list: &[f64]) -> Result<()> {
    if p_list.is_empty() {
        return Err(field("p_list", "must be nonempty"));
    }
    if let Some(p) = p_list.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
        return Err(field("p_list", format!("every p must be finite and >= 1, got {p}")));
    }
    Ok(())
}

fn check_n_grid(name: &str, grid: &[usize], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(field(name, format!("needs at least {min_len} values")));
    }
    if grid.contains(&0) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(field(name, "must be positive and strictly ascending"));
    }
    Ok(())
}

/// An explicit grid must be ascending; otherwise `grid_points` evenly
/// spaced points are placed from the bound's threshold to the largest
/// simulated norm.
fn check_grid(t_grid: &Option<Vec<f64>>, grid_points: usize) -> Result<()> {
    if let Some(g) = t_grid {
        if g.is_empty() || g.iter().any(|t| !t.is_finite()) || g.windows(2).any(|w| w[0] >= w[1]) {
            return Err(field("t_grid", "must be nonempty, finite and strictly ascending"));
        }
    } else if grid_points < 2 {
        return Err(field("grid_points", "must be >= 2"));
    }
    Ok(())
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::VerifyBernstein { .. } => "verify-bernstein",
            Experiment::VerifyFukNagaev { .. } => "verify-fuk-nagaev",
            Experiment::VerifyRosenthal { .. } => "verify-rosenthal",
            Experiment::VerifyPsdRosenthal { .. } => "verify-psd-rosenthal",
            Experiment::CovScaling { .. } => "cov-scaling",
            Experiment::EigScaling { .. } => "eig-scaling",
            Experiment::Subsample { .. } => "subsample",
            Experiment::Audit { .. } => "audit",
            Experiment::FitConstants { .. } => "fit-constants",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Experiment::VerifyBernstein {
                ensemble,
                t_grid,
                grid_points,
                slack,
            } => {
                if !matches!(ensemble, EnsembleSpec::SignFixed { .. }) {
                    return Err(field("ensemble.kind", "must be sign-fixed (summands bounded a.s.)"));
                }
                check_grid(t_grid, *grid_points)?;
                check_slack(*slack)
            }
            Experiment::VerifyFukNagaev {
                u,
                t_grid,
                grid_points,
                slack,
                ..
            } => {
                if let Some(u) = u {
                    if !(*u > 0.0 && u.is_finite()) {
                        return Err(field("u", format!("must be finite and > 0, got {u}")));
                    }
                }
                check_grid(t_grid, *grid_points)?;
                check_slack(*slack)
            }
            Experiment::VerifyRosenthal { p_list, .. } => check_p_list(p_list),
            Experiment::VerifyPsdRosenthal { ensemble, p_list } => {
                if !matches!(ensemble, EnsembleSpec::PsdRankOne { .. }) {
                    return Err(field("ensemble.kind", "must be psd-rank-one"));
                }
                check_p_list(p_list)
            }
            Experiment::CovScaling {
                n_grid, slope_range, ..
            } => {
                check_n_grid("n_grid", n_grid, 4)?;
                if !(slope_range[0] < slope_range[1]) {
                    return Err(field("slope_range", "must be [low, high] with low < high"));
                }
                Ok(())
            }
            Experiment::EigScaling {
                n_grid,
                slope_tolerance,
                min_rate_ratio,
                slack,
                ..
            } => {
                check_n_grid("n_grid", n_grid, 4)?;
                if !(*slope_tolerance > 0.0) {
                    return Err(field("slope_tolerance", "must be > 0"));
                }
                if !(*min_rate_ratio >= 1.0) {
                    return Err(field("min_rate_ratio", "must be >= 1"));
                }
                check_slack(*slack)
            }
            Experiment::Subsample { deltas, slack, .. } => {
                if deltas.is_empty() {
                    return Err(field("deltas", "must be nonempty"));
                }
                if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
                    return Err(field("deltas", format!("every delta must be in (0, 1], got {d}")));
                }
                check_slack(*slack)
            }
            Experiment::Audit {
                levels,
                slack,
                directions,
                moments,
                ..
            } => {
                if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
                    return Err(field("levels", "must be nonempty with values in (0, 1)"));
                }
                if *directions == 0 {
                    return Err(field("directions", "must be positive"));
                }
                if moments.iter().any(|p| !(*p >= 1.0 && p.is_finite())) {
                    return Err(field("moments", "every p must be finite and >= 1"));
                }
                check_slack(*slack)
            }
            Experiment::FitConstants {
                law,
                n_grid,
                d_grid,
                p_list,
                grid_points,
                slack,
                ..
            } => {
                law.validate().map_err(|e| field("law", e.to_string()))?;
                check_n_grid("n_grid", n_grid, 1)?;
                check_n_grid("d_grid", d_grid, 1)?;
                check_p_list(p_list)?;
                if *grid_points < 2 {
                    return Err(field("grid_points", "must be >= 2"));
                }
                check_slack(*slack)
            }
        }
    }
}
