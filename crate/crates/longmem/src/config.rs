//! Experiment configuration.
//!
//! A configuration names the full factorial grid of one Monte Carlo run:
//! distributions × processes × lengths × methods, plus the replication
//! count, the master seed, and the analysis conventions. In JSON form every
//! field except `seed` is optional and defaults to the standard study grid.
//! Distribution and process entries are either bare names (`"gamma"`,
//! `"ar1"`) or objects overriding parameters
//! (`{"name": "log-t", "dof": 3}`, `{"kind": "ar1", "theta": 0.4}`).
//!
//! [`ExperimentConfig::to_json_value`] emits a fully resolved echo of the
//! configuration — defaults filled in, entries normalized — which parses
//! back to an equal configuration. Run metadata embeds this echo so that
//! any result file identifies the exact grid that produced it.

use crate::baselines::{BaselineFormula, SummandConvention};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimators::{Method, ScaleAggregation, DEFAULT_MIN_POWER};
use crate::processes::{ProcessKind, ProcessSpec, DEFAULT_ARFIMA_TRUNCATION, DEFAULT_BURN_IN};
use serde::Deserialize;
use serde_json::{json, Map, Value};

/// AR(1) coefficient used when a process entry says just `"ar1"`.
pub const DEFAULT_AR1_THETA: f64 = 0.25;
/// Memory parameter used when a process entry says just `"arfima"`.
pub const DEFAULT_ARFIMA_D: f64 = 0.25;
/// Series lengths of the standard grid.
pub const DEFAULT_LENGTHS: [usize; 6] = [512, 1024, 2048, 4096, 8192, 16384];
/// Replications per cell of the standard grid.
pub const DEFAULT_REPLICATIONS: usize = 1000;

/// A fully resolved Monte Carlo experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub distributions: Vec<DistributionSpec>,
    pub processes: Vec<ProcessSpec>,
    pub lengths: Vec<usize>,
    pub replications: usize,
    pub methods: Vec<Method>,
    pub min_power: u32,
    pub aggregation: ScaleAggregation,
    pub baseline: BaselineFormula,
    pub summand: SummandConvention,
    /// When set, the random stream of a replication ignores the estimation
    /// method, so `rs` and `mrs` see identical innovation sequences.
    pub common_random_numbers: bool,
}

impl ExperimentConfig {
    /// The standard study grid under the given master seed: all eight
    /// distributions, the three processes, six dyadic lengths, both
    /// methods, 1000 replications.
    pub fn standard_grid(master_seed: u64) -> Self {
        ExperimentConfig {
            master_seed,
            distributions: DistributionSpec::all_defaults(),
            processes: default_processes(),
            lengths: DEFAULT_LENGTHS.to_vec(),
            replications: DEFAULT_REPLICATIONS,
            methods: vec![Method::Rs, Method::Mrs],
            min_power: DEFAULT_MIN_POWER,
            aggregation: ScaleAggregation::default(),
            baseline: BaselineFormula::default(),
            summand: SummandConvention::default(),
            common_random_numbers: false,
        }
    }

    /// Parse a JSON configuration, fill defaults, and validate.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(e.to_string()))?;
        resolve(raw)
    }

    /// Check grid invariants. Called by [`from_json_str`] and again by the
    /// harness, so hand-built configurations get the same scrutiny.
    pub fn validate(&self) -> Result<()> {
        if self.distributions.is_empty() {
            return Err(Error::Config("at least one distribution is required".into()));
        }
        if self.processes.is_empty() {
            return Err(Error::Config("at least one process is required".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.lengths.is_empty() {
            return Err(Error::Config("at least one series length is required".into()));
        }
        if self.replications < 2 {
            return Err(Error::Config(format!(
                "replications must be at least 2 to estimate a variance, got {}",
                self.replications
            )));
        }
        if self.min_power == 0 || self.min_power > 62 {
            return Err(Error::Config(format!(
                "min-power must be between 1 and 62, got {}",
                self.min_power
            )));
        }
        let shortest = 1usize << (self.min_power + 1);
        for &len in &self.lengths {
            if len < shortest {
                return Err(Error::Config(format!(
                    "length {len} is too short for min-power {}: need at least {shortest} \
                     observations for two scales",
                    self.min_power
                )));
            }
        }
        check_unique("length", self.lengths.iter().map(|l| l.to_string()))?;
        check_unique("distribution", self.distributions.iter().map(|d| d.label()))?;
        check_unique("process", self.processes.iter().map(|p| p.label()))?;
        check_unique("method", self.methods.iter().map(|m| m.name().to_string()))?;
        Ok(())
    }

    /// The fully resolved JSON echo of this configuration.
    pub fn to_json_value(&self) -> Value {
        json!({
            "seed": self.master_seed,
            "distributions": self.distributions.iter().map(distribution_to_value).collect::<Vec<_>>(),
            "processes": self.processes.iter().map(process_to_value).collect::<Vec<_>>(),
            "lengths": self.lengths,
            "replications": self.replications,
            "methods": self.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "min-power": self.min_power,
            "aggregation": aggregation_name(self.aggregation),
            "baseline": self.baseline.name(),
            "summand": self.summand.name(),
            "common-random-numbers": self.common_random_numbers,
        })
    }

    pub fn to_json_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("config serialization is infallible")
    }
}

fn default_processes() -> Vec<ProcessSpec> {
    vec![
        ProcessSpec::iid(),
        ProcessSpec::ar1(DEFAULT_AR1_THETA).expect("default theta is valid"),
        ProcessSpec::arfima(DEFAULT_ARFIMA_D).expect("default d is valid"),
    ]
}

fn check_unique(what: &str, labels: impl Iterator<Item = String>) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for label in labels {
        if !seen.insert(label.clone()) {
            return Err(Error::Config(format!("duplicate {what} `{label}`")));
        }
    }
    Ok(())
}

fn aggregation_name(a: ScaleAggregation) -> &'static str {
    match a {
        ScaleAggregation::GeometricMean => "geometric-mean",
        ScaleAggregation::ArithmeticMean => "arithmetic-mean",
    }
}

/// The JSON shape of a configuration file. Scalar fields deserialize
/// directly; distribution and process entries stay as raw values so their
/// errors can name the offending entry.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct RawConfig {
    seed: u64,
    #[serde(default)]
    distributions: Option<Vec<Value>>,
    #[serde(default)]
    processes: Option<Vec<Value>>,
    #[serde(default)]
    lengths: Option<Vec<usize>>,
    #[serde(default)]
    replications: Option<usize>,
    #[serde(default)]
    methods: Option<Vec<Method>>,
    #[serde(default)]
    min_power: Option<u32>,
    #[serde(default)]
    aggregation: Option<ScaleAggregation>,
    #[serde(default)]
    baseline: Option<BaselineFormula>,
    #[serde(default)]
    summand: Option<SummandConvention>,
    #[serde(default)]
    common_random_numbers: Option<bool>,
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig> {
    let distributions = match raw.distributions {
        None => DistributionSpec::all_defaults(),
        Some(entries) => entries
            .iter()
            .map(distribution_from_value)
            .collect::<Result<_>>()?,
    };
    let processes = match raw.processes {
        None => default_processes(),
        Some(entries) => entries.iter().map(process_from_value).collect::<Result<_>>()?,
    };
    let mut lengths = raw.lengths.unwrap_or_else(|| DEFAULT_LENGTHS.to_vec());
    lengths.sort_unstable();
    let config = ExperimentConfig {
        master_seed: raw.seed,
        distributions,
        processes,
        lengths,
        replications: raw.replications.unwrap_or(DEFAULT_REPLICATIONS),
        methods: raw.methods.unwrap_or_else(|| vec![Method::Rs, Method::Mrs]),
        min_power: raw.min_power.unwrap_or(DEFAULT_MIN_POWER),
        aggregation: raw.aggregation.unwrap_or_default(),
        baseline: raw.baseline.unwrap_or_default(),
        summand: raw.summand.unwrap_or_default(),
        common_random_numbers: raw.common_random_numbers.unwrap_or(false),
    };
    config.validate()?;
    Ok(config)
}

fn field_f64(map: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v.as_f64().map(Some).ok_or_else(|| {
            Error::Config(format!("field `{key}` must be a number, got {v}"))
        }),
    }
}

fn field_usize(map: &Map<String, Value>, key: &str) -> Result<Option<usize>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|n| Some(n as usize))
            .ok_or_else(|| Error::Config(format!("field `{key}` must be a non-negative integer, got {v}"))),
    }
}

fn reject_unknown_keys(map: &Map<String, Value>, allowed: &[&str], context: &str) -> Result<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "unknown field `{key}` in {context} (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn distribution_from_value(value: &Value) -> Result<DistributionSpec> {
    match value {
        Value::String(name) => DistributionSpec::from_name(name),
        Value::Object(map) => {
            let name = map
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Config("distribution object needs a string `name` field".into()))?;
            let dof = field_f64(map, "dof")?;
            let shape = field_f64(map, "shape")?;
            let scale = field_f64(map, "scale")?;
            let shift = field_f64(map, "shift")?;
            let allowed: &[&str] = match name {
                "log-t" => &["name", "dof", "shift"],
                "gamma" | "inv-gamma" => &["name", "shape", "scale", "shift"],
                "cauchy" => &["name", "scale", "shift"],
                _ => &["name", "shift"],
            };
            reject_unknown_keys(map, allowed, &format!("distribution `{name}`"))?;
            let mut spec = match name {
                "log-t" => DistributionSpec::log_t(dof.unwrap_or(crate::distributions::DEFAULT_LOG_T_DOF))?,
                "gamma" => DistributionSpec::gamma(
                    shape.unwrap_or(crate::distributions::DEFAULT_GAMMA_SHAPE),
                    scale.unwrap_or(crate::distributions::DEFAULT_GAMMA_SCALE),
                )?,
                "inv-gamma" => DistributionSpec::inv_gamma(
                    shape.unwrap_or(crate::distributions::DEFAULT_GAMMA_SHAPE),
                    scale.unwrap_or(crate::distributions::DEFAULT_GAMMA_SCALE),
                )?,
                "cauchy" => DistributionSpec::cauchy(scale.unwrap_or(crate::distributions::DEFAULT_CAUCHY_SCALE))?,
                _ => DistributionSpec::from_name(name)?,
            };
            if let Some(s) = shift {
                spec = spec.with_shift(s)?;
            }
            Ok(spec)
        }
        other => Err(Error::Config(format!(
            "distribution entry must be a name or an object, got {other}"
        ))),
    }
}

fn process_from_value(value: &Value) -> Result<ProcessSpec> {
    match value {
        Value::String(name) => process_by_name(name),
        Value::Object(map) => {
            let kind = map
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Config("process object needs a string `kind` field".into()))?;
            let theta = field_f64(map, "theta")?;
            let d = field_f64(map, "d")?;
            let truncation = field_usize(map, "truncation")?;
            let burn_in = field_usize(map, "burn-in")?;
            let allowed: &[&str] = match kind {
                "iid" => &["kind", "burn-in"],
                "ar1" => &["kind", "theta", "burn-in"],
                "arfima" => &["kind", "d", "truncation", "burn-in"],
                other => {
                    return Err(Error::Config(format!(
                        "unknown process `{other}` (expected one of: iid, ar1, arfima)"
                    )))
                }
            };
            reject_unknown_keys(map, allowed, &format!("process `{kind}`"))?;
            let mut spec = match kind {
                "iid" => ProcessSpec::iid(),
                "ar1" => ProcessSpec::ar1(theta.unwrap_or(DEFAULT_AR1_THETA))?,
                _ => ProcessSpec::arfima_with_truncation(
                    d.unwrap_or(DEFAULT_ARFIMA_D),
                    truncation.unwrap_or(DEFAULT_ARFIMA_TRUNCATION),
                )?,
            };
            if let Some(b) = burn_in {
                spec = spec.with_burn_in(b);
            }
            Ok(spec)
        }
        other => Err(Error::Config(format!(
            "process entry must be a name or an object, got {other}"
        ))),
    }
}

fn process_by_name(name: &str) -> Result<ProcessSpec> {
    match name {
        "iid" => Ok(ProcessSpec::iid()),
        "ar1" => ProcessSpec::ar1(DEFAULT_AR1_THETA),
        "arfima" => ProcessSpec::arfima(DEFAULT_ARFIMA_D),
        other => Err(Error::Config(format!(
            "unknown process `{other}` (expected one of: iid, ar1, arfima)"
        ))),
    }
}

/// Normalized JSON form of a distribution: the bare name when it equals the
/// named default, otherwise an object.
fn distribution_to_value(spec: &DistributionSpec) -> Value {
    if *spec == DistributionSpec::from_name(spec.name()).expect("own name is valid") {
        return Value::String(spec.name().to_string());
    }
    let mut map = Map::new();
    map.insert("name".into(), Value::String(spec.name().to_string()));
    match spec.kind() {
        crate::distributions::DistributionKind::Cauchy { scale } => {
            map.insert("scale".into(), json!(scale));
        }
        crate::distributions::DistributionKind::LogT { dof } => {
            map.insert("dof".into(), json!(dof));
        }
        crate::distributions::DistributionKind::Gamma { shape, scale }
        | crate::distributions::DistributionKind::InvGamma { shape, scale } => {
            map.insert("shape".into(), json!(shape));
            map.insert("scale".into(), json!(scale));
        }
        _ => {}
    }
    let default_shift = DistributionSpec::from_name(spec.name())
        .expect("own name is valid")
        .shift();
    if spec.shift() != default_shift {
        map.insert("shift".into(), json!(spec.shift()));
    }
    Value::Object(map)
}

/// Normalized JSON form of a process: the bare name when it equals the
/// named default, otherwise an object.
fn process_to_value(spec: &ProcessSpec) -> Value {
    if *spec == process_by_name(spec.name()).expect("own name is valid") {
        return Value::String(spec.name().to_string());
    }
    let mut map = Map::new();
    map.insert("kind".into(), Value::String(spec.name().to_string()));
    match spec.kind() {
        ProcessKind::Iid => {}
        ProcessKind::Ar1 { theta } => {
            map.insert("theta".into(), json!(theta));
        }
        ProcessKind::Arfima { d, truncation } => {
            map.insert("d".into(), json!(d));
            if truncation != DEFAULT_ARFIMA_TRUNCATION {
                map.insert("truncation".into(), json!(truncation));
            }
        }
    }
    if spec.burn_in() != DEFAULT_BURN_IN {
        map.insert("burn-in".into(), json!(spec.burn_in()));
    }
    Value::Object(map)
}
