//! Experiment configuration shared by command-line flags and TOML files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use haarlab::born::SamplingRoute;
use haarlab::verify::Scale;
use haarlab::{GroupId, GroupKind};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Moment,
    TwirlCheck,
    Concentration,
    TvDistance,
    ComplexityBound,
    Packing,
    SqBound,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variants serialize");
        f.write_str(v.as_str().expect("unit variants are strings"))
    }
}

/// Every parameter any command reads. Unset fields take per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupKind>,
    /// Group parameter D (quaternionic dimension for Sp), or the state
    /// dimension for `packing`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<SamplingRoute>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate_set_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer_m: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corollary: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
    /// Overrides the number of standard errors a Monte Carlo check allows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_se: Option<f64>,
}

/// A configuration problem, reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<haarlab::Error> for ConfigError {
    fn from(e: haarlab::Error) -> Self {
        ConfigError(e.to_string())
    }
}

impl Params {
    pub fn require<T: Copy>(value: Option<T>, field: &str) -> Result<T, ConfigError> {
        value.ok_or_else(|| ConfigError(format!("missing parameter `params.{field}` (or --{})", field.replace('_', "-"))))
    }

    pub fn group_kind(&self) -> Result<GroupKind, ConfigError> {
        Self::require(self.group, "group")
    }

    /// The group from `dim`, or from `qubits` when `dim` is unset.
    pub fn group_id(&self) -> Result<GroupId, ConfigError> {
        let kind = self.group_kind()?;
        match (self.dim, self.qubits) {
            (Some(d), _) => Ok(GroupId::new(kind, d)?),
            (None, Some(n)) => Ok(GroupId::for_qubits(kind, n)?),
            (None, None) => Err(ConfigError("missing parameter `params.dim` or `params.qubits` (or --dim/--qubits)".into())),
        }
    }

    pub fn tolerance(&self, default: f64) -> Result<f64, ConfigError> {
        match self.tolerance_se {
            Some(t) if !(t > 0.0) => Err(ConfigError(format!("`params.tolerance_se` must be positive, got {t}"))),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }
}

fn default_seed() -> u64 {
    1
}

/// A TOML experiment file: a command, scalar parameters and an optional grid
/// whose keys are parameter names mapped to lists of values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub grid: BTreeMap<String, Vec<Value>>,
}

impl ExperimentConfig {
    pub fn single(command: Command, seed: u64, output_dir: Option<PathBuf>, params: Params) -> Self {
        Self {
            command,
            seed,
            output_dir,
            params,
            grid: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let config: Self = toml::from_str(&text).map_err(|e| ConfigError(format!("invalid config {}: {e}", path.display())))?;
        // Surface bad grid keys and value types before any work starts.
        config.points()?;
        Ok(config)
    }

    /// The parameter sets of the grid, in row-major order over sorted keys.
    /// A grid key with an empty list yields no points.
    pub fn points(&self) -> Result<Vec<Params>, ConfigError> {
        let base = serde_json::to_value(&self.params).expect("params serialize");
        let mut points = vec![base];
        for (key, values) in &self.grid {
            let mut next = Vec::with_capacity(points.len() * values.len());
            for p in &points {
                for v in values {
                    let mut q = p.clone();
                    q[key] = v.clone();
                    next.push(q);
                }
            }
            points = next;
        }
        points
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                serde_json::from_value(v).map_err(|e| ConfigError(format!("grid point {i}: {e} (check the `grid` and `params` tables)")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_expands_in_sorted_key_order() {
        let c: ExperimentConfig = toml::from_str(
            r#"
            command = "tv-distance"
            seed = 7
            [params]
            group = "so"
            samples = 20
            [grid]
            qubits = [4, 6]
            route = ["pushforward", "elements"]
            "#,
        )
        .unwrap();
        let pts = c.points().unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!((pts[0].qubits, pts[0].route), (Some(4), Some(SamplingRoute::Pushforward)));
        assert_eq!((pts[1].qubits, pts[1].route), (Some(4), Some(SamplingRoute::GroupElements)));
        assert_eq!(pts[3].qubits, Some(6));
        assert!(pts.iter().all(|p| p.samples == Some(20)));
    }

    #[test]
    fn empty_grid_has_no_points() {
        let c: ExperimentConfig = toml::from_str("command = \"moment\"\n[grid]\ndim = []\n").unwrap();
        assert!(c.points().unwrap().is_empty());
    }

    #[test]
    fn unknown_fields_are_named() {
        let err = toml::from_str::<ExperimentConfig>("command = \"moment\"\n[params]\nsamplez = 3\n").unwrap_err();
        assert!(err.to_string().contains("samplez"), "{err}");
        let c: ExperimentConfig = toml::from_str("command = \"moment\"\n[grid]\nqbits = [1]\n").unwrap();
        assert!(c.points().unwrap_err().0.contains("qbits"));
        let c: ExperimentConfig = toml::from_str("command = \"moment\"\n[grid]\ndim = [\"four\"]\n").unwrap();
        assert!(c.points().is_err());
    }

    #[test]
    fn group_resolution() {
        let p = Params {
            group: Some(GroupKind::Sp),
            qubits: Some(4),
            ..Params::default()
        };
        assert_eq!(p.group_id().unwrap(), GroupId::sp(8).unwrap());
        let p = Params {
            group: Some(GroupKind::SU),
            ..Params::default()
        };
        assert!(p.group_id().unwrap_err().0.contains("params.dim"));
        assert_eq!(Command::TwirlCheck.to_string(), "twirl-check");
    }
}
