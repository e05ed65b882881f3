//! Config file, `--set` overrides and the resolved [`RunConfig`].
//!
//! ```json
//! {
//!   "scenario": "phase",
//!   "parameters": { "T_s": 0.5, "k_per_m": 1.61e7 },
//!   "sweep": [ { "param": "T_s", "min": 0.01, "max": 1.0, "steps": 20, "scale": "log" } ],
//!   "out": "phase.csv"
//! }
//! ```
//!
//! Every field is optional. Parameter values are numbers or numeric strings
//! such as `"inf"`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::params::{ParamSet, Scenario};
use crate::sweep::{SweepAxis, SweepPlan};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ParamValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<String>,
    #[serde(default)]
    parameters: BTreeMap<String, ParamValue>,
    #[serde(default)]
    sweep: Vec<SweepAxis>,
    out: Option<PathBuf>,
}

/// Contents of a config file, not yet bound to a scenario table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    pub scenario: Option<Scenario>,
    pub parameters: Vec<(String, f64)>,
    pub sweep: Vec<SweepAxis>,
    pub out: Option<PathBuf>,
}

/// Number in Rust float syntax, including `inf`.
pub fn parse_value(text: &str) -> CliResult<f64> {
    let t = text.trim();
    t.parse::<f64>()
        .map_err(|_| CliError::parse(format!("`{t}` is not a number")))
}

pub fn parse_config(text: &str) -> CliResult<ConfigFile> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::parse(e.to_string()))?;
    let scenario = raw.scenario.as_deref().map(str::parse).transpose()?;
    let parameters =
        raw.parameters
            .into_iter()
            .map(|(key, value)| {
                let v = match value {
                    ParamValue::Number(v) => v,
                    ParamValue::Text(s) => parse_value(&s)
                        .map_err(|_| CliError::parse(format!("parameter `{key}`: `{s}` is not a number")))?,
                };
                Ok((key, v))
            })
            .collect::<CliResult<_>>()?;
    for axis in &raw.sweep {
        axis.validate()?;
    }
    Ok(ConfigFile {
        scenario,
        parameters,
        sweep: raw.sweep,
        out: raw.out,
    })
}

/// `key=value` from a `--set` flag.
pub fn parse_override(text: &str) -> CliResult<(String, f64)> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::parse(format!("override `{text}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::parse(format!("override `{text}` has an empty key")));
    }
    Ok((key.to_string(), parse_value(value)?))
}

/// Fully resolved run: parameters after overrides and the sweep plan.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub params: ParamSet,
    pub sweep: SweepPlan,
    pub out: Option<PathBuf>,
}

/// Flag-level inputs layered on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub set: Vec<(String, f64)>,
    pub sweep: Vec<SweepAxis>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults, then the file, then flags. A `--set` or `--sweep` on a
    /// parameter drops any sweep the file declared for it.
    pub fn resolve(scenario: Scenario, file: ConfigFile, flags: Overrides) -> CliResult<Self> {
        if let Some(declared) = file.scenario {
            if declared != scenario {
                return Err(CliError::parse(format!(
                    "config file is for scenario `{declared}` but `{scenario}` was requested"
                )));
            }
        }
        let mut params = ParamSet::defaults(scenario);
        for (key, value) in file.parameters.iter().chain(&flags.set) {
            params.set(key, *value)?;
        }
        let overridden = |axis: &SweepAxis| {
            flags.set.iter().any(|(k, _)| *k == axis.param) || flags.sweep.iter().any(|a| a.param == axis.param)
        };
        let mut axes: Vec<SweepAxis> = file.sweep.into_iter().filter(|a| !overridden(a)).collect();
        axes.extend(flags.sweep);
        if !axes.is_empty() && !scenario.sweepable() {
            return Err(CliError::parse(format!(
                "scenario `{scenario}` does not take sweep axes"
            )));
        }
        let sweep = SweepPlan::new(&params, axes)?;
        Ok(RunConfig {
            scenario,
            params,
            sweep,
            out: flags.out.or(file.out),
        })
    }
}
