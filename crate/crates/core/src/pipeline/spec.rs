use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::allocation::PrecisionSpec;
use crate::{Error, Result};

/// How basic strata are formed from the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One basic stratum per domain and auxiliary-category combination.
    Atomic,
    /// One basic stratum per record.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StageKind {
    Km,
    KmScan,
    Em,
    Fc,
    Som,
    Ng,
    SomKm,
    SomEm,
    SomFc,
    NgKm,
    NgEm,
    NgFc,
    HillClimb,
}

const NAMES: [(StageKind, &str); 13] = [
    (StageKind::Km, "KM"),
    (StageKind::KmScan, "KM_SCAN"),
    (StageKind::Em, "EM"),
    (StageKind::Fc, "FC"),
    (StageKind::Som, "SOM"),
    (StageKind::Ng, "NG"),
    (StageKind::SomKm, "SOM+KM"),
    (StageKind::SomEm, "SOM+EM"),
    (StageKind::SomFc, "SOM+FC"),
    (StageKind::NgKm, "NG+KM"),
    (StageKind::NgEm, "NG+EM"),
    (StageKind::NgFc, "NG+FC"),
    (StageKind::HillClimb, "HILL_CLIMB"),
];

const SOM_KEYS: &[&str] = &["rows", "cols", "iterations", "alpha_hi", "alpha_lo", "radius"];
const NG_KEYS: &[&str] = &["lambda_hi", "lambda_lo", "eps_hi", "eps_lo", "iterations", "age_limit"];

impl StageKind {
    pub fn name(self) -> &'static str {
        NAMES
            .iter()
            .find(|(k, _)| *k == self)
            .map(|(_, n)| *n)
            .expect("every kind is named")
    }

    pub fn all() -> impl Iterator<Item = StageKind> {
        NAMES.iter().map(|(k, _)| *k)
    }

    /// Parameter names this stage reads.
    pub fn param_keys(self) -> Vec<&'static str> {
        use StageKind::*;
        let second: &[&str] = match self {
            Km | SomKm | NgKm => &["k", "max_iter"],
            KmScan => &["k_max", "max_iter"],
            Em | SomEm | NgEm => &["k", "max_iter", "tol"],
            Fc | SomFc | NgFc => &["k", "m", "max_iter", "eps"],
            Som => &[],
            Ng => &["k"],
            HillClimb => &["stall_limit", "max_iterations"],
        };
        let first: &[&str] = match self {
            Som | SomKm | SomEm | SomFc => SOM_KEYS,
            Ng => NG_KEYS,
            NgKm | NgEm | NgFc => &[
                "prototypes",
                "lambda_hi",
                "lambda_lo",
                "eps_hi",
                "eps_lo",
                "iterations",
                "age_limit",
            ],
            _ => &[],
        };
        let mut keys: Vec<&str> = first.iter().chain(second).copied().collect();
        if matches!(self, Em | Fc | Ng | Km | SomKm | SomEm | SomFc | NgKm | NgEm | NgFc) {
            keys.push("k_max");
        }
        keys.sort_unstable();
        keys.dedup();
        keys
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        let norm = match norm.as_str() {
            "HC" | "HILLCLIMB" | "HILL_CLIMBING" => "HILL_CLIMB".to_string(),
            "KMSCAN" => "KM_SCAN".to_string(),
            _ => norm,
        };
        NAMES
            .iter()
            .find(|(_, n)| *n == norm)
            .map(|(k, _)| *k)
            .ok_or_else(|| Error::Config(format!("unknown stage `{s}`")))
    }
}

impl TryFrom<String> for StageKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StageKind> for String {
    fn from(k: StageKind) -> String {
        k.name().to_string()
    }
}

/// Numeric stage parameters by name.
pub type ParamMap = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSpec {
    pub kind: StageKind,
    #[serde(default)]
    pub params: ParamMap,
}

impl StageSpec {
    pub fn new(kind: StageKind) -> Self {
        StageSpec {
            kind,
            params: ParamMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn real_or(&self, key: &str, default: f64) -> f64 {
        self.real(key).unwrap_or(default)
    }

    /// A whole, non-negative parameter.
    pub fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(&v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(Some(v as usize)),
            Some(&v) => Err(Error::param(format!(
                "{}: `{key}` must be a whole number, got {v}",
                self.kind
            ))),
        }
    }

    pub fn count_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.count(key)?.unwrap_or(default))
    }

    fn validate(&self) -> Result<()> {
        let keys = self.kind.param_keys();
        if let Some(bad) = self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(Error::Config(format!(
                "stage {} has no parameter `{bad}` (accepted: {})",
                self.kind,
                keys.join(", ")
            )));
        }
        if let Some((k, v)) = self.params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("stage {}: `{k}` = {v} is not finite", self.kind)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    pub mode: Mode,
    pub stages: Vec<StageSpec>,
    pub precision: PrecisionSpec,
    pub seed: u64,
}

impl PipelineSpec {
    /// Stages must include a clusterer, and a hill climb may only come last.
    pub fn validate(&self) -> Result<()> {
        let climbs = self.stages.iter().filter(|s| s.kind == StageKind::HillClimb).count();
        if climbs == self.stages.len() {
            return Err(Error::Config("pipeline needs at least one clustering stage".into()));
        }
        if climbs > 1 || (climbs == 1 && self.stages.last().map(|s| s.kind) != Some(StageKind::HillClimb)) {
            return Err(Error::Config("hill climbing may appear once, as the last stage".into()));
        }
        self.stages.iter().try_for_each(StageSpec::validate)
    }

    /// `KM_SCAN+HILL_CLIMB` style label of the stage sequence.
    pub fn combination(&self) -> String {
        self.stages
            .iter()
            .map(|s| s.kind.name())
            .collect::<Vec<_>>()
            .join(" > ")
    }
}
