//! Sweep axes and their Cartesian product.

use std::str::FromStr;

use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::params::ParamSet;

/// Spacing of the points along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim() {
            "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            other => Err(CliError::parse(format!(
                "unknown sweep scale `{other}`, expected linear or log"
            ))),
        }
    }
}

/// One swept parameter: `steps` points from `min` to `max`, both included.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepAxis {
    pub fn validate(&self) -> CliResult<()> {
        if self.steps == 0 {
            return Err(CliError::parse(format!("sweep over `{}` needs steps >= 1", self.param)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::parse(format!(
                "sweep over `{}` needs finite bounds",
                self.param
            )));
        }
        if self.scale == Scale::Log && !(self.min > 0.0 && self.max > 0.0) {
            return Err(CliError::parse(format!(
                "log sweep over `{}` needs positive bounds, got {} and {}",
                self.param, self.min, self.max
            )));
        }
        Ok(())
    }

    /// Value at position `i`; the last point is `max` exactly.
    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 || i == 0 {
            return self.min;
        }
        if i + 1 == self.steps {
            return self.max;
        }
        let fraction = i as f64 / (self.steps - 1) as f64;
        match self.scale {
            // written so that extreme finite bounds cannot overflow
            Scale::Linear => (1.0 - fraction) * self.min + fraction * self.max,
            Scale::Log => ((1.0 - fraction) * self.min.ln() + fraction * self.max.ln()).exp(),
        }
    }
}

/// `param=min:max:steps[:linear|log]`.
impl FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let (param, range) = s
            .split_once('=')
            .ok_or_else(|| CliError::parse(format!("sweep `{s}` is not of the form param=min:max:steps[:scale]")))?;
        let param = param.trim();
        if param.is_empty() {
            return Err(CliError::parse(format!("sweep `{s}` has an empty parameter name")));
        }
        let fields: Vec<&str> = range.split(':').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(CliError::parse(format!(
                "sweep `{s}` needs min:max:steps with an optional scale"
            )));
        }
        let number = |text: &str| crate::config::parse_value(text);
        let steps = fields[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| CliError::parse(format!("sweep `{s}`: bad step count: {e}")))?;
        let axis = SweepAxis {
            param: param.to_string(),
            min: number(fields[0])?,
            max: number(fields[1])?,
            steps,
            scale: fields.get(3).map_or(Ok(Scale::Linear), |f| f.parse())?,
        };
        axis.validate()?;
        Ok(axis)
    }
}

/// Axes bound to parameter slots; point `n` enumerates the product with the
/// last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    axes: Vec<(usize, SweepAxis)>,
    len: usize,
}

impl SweepPlan {
    pub fn new(base: &ParamSet, axes: Vec<SweepAxis>) -> CliResult<Self> {
        let mut bound = Vec::with_capacity(axes.len());
        let mut len: usize = 1;
        for axis in axes {
            axis.validate()?;
            let slot = base.index(&axis.param).ok_or_else(|| {
                CliError::parse(format!(
                    "sweep references unknown parameter `{}`; known: {}",
                    axis.param,
                    base.names().join(", ")
                ))
            })?;
            if bound.iter().any(|(s, _)| *s == slot) {
                return Err(CliError::parse(format!("parameter `{}` is swept twice", axis.param)));
            }
            len = len
                .checked_mul(axis.steps)
                .ok_or_else(|| CliError::parse("sweep has too many points"))?;
            bound.push((slot, axis));
        }
        Ok(SweepPlan { axes: bound, len })
    }

    /// Number of points, 1 without axes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn point(&self, base: &ParamSet, index: usize) -> ParamSet {
        let mut p = base.clone();
        let mut rest = index;
        for (slot, axis) in self.axes.iter().rev() {
            p.set_slot(*slot, axis.value(rest % axis.steps));
            rest /= axis.steps;
        }
        p
    }
}
