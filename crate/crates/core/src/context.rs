use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Terrestrial gravitational acceleration used throughout the examples [m/s^2].
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Physical constants and the local gravitational acceleration.
///
/// The metric is `g_00 = 1 + 2 g z / c^2`, `g_jj = -1`, with `z` measured upward
/// from the source plane and `g` pointing toward it. `g = 0` describes a
/// spaceborne setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawContext", into = "RawContext")]
pub struct PhysicalContext {
    c: f64,
    hbar: f64,
    g: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContext {
    #[serde(rename = "c_m_per_s", default = "default_c")]
    c: f64,
    #[serde(rename = "hbar_J_s", default = "default_hbar")]
    hbar: f64,
    #[serde(rename = "g_m_per_s2")]
    g: f64,
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

fn default_hbar() -> f64 {
    HBAR
}

impl TryFrom<RawContext> for PhysicalContext {
    type Error = crate::Error;

    fn try_from(raw: RawContext) -> Result<Self> {
        PhysicalContext::new(raw.c, raw.hbar, raw.g)
    }
}

impl From<PhysicalContext> for RawContext {
    fn from(ctx: PhysicalContext) -> Self {
        RawContext {
            c: ctx.c,
            hbar: ctx.hbar,
            g: ctx.g,
        }
    }
}

impl PhysicalContext {
    pub fn new(c: f64, hbar: f64, g: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid("c", format!("must be positive and finite, got {c}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(invalid("hbar", format!("must be positive and finite, got {hbar}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(invalid("g", format!("must be non-negative and finite, got {g}")));
        }
        Ok(PhysicalContext { c, hbar, g })
    }

    /// SI constants with `g = 9.81 m/s^2`.
    pub fn terrestrial() -> Self {
        PhysicalContext {
            c: SPEED_OF_LIGHT,
            hbar: HBAR,
            g: STANDARD_GRAVITY,
        }
    }

    /// SI constants with `g = 0`.
    pub fn microgravity() -> Self {
        PhysicalContext {
            c: SPEED_OF_LIGHT,
            hbar: HBAR,
            g: 0.0,
        }
    }

    pub fn with_g(self, g: f64) -> Result<Self> {
        PhysicalContext::new(self.c, self.hbar, g)
    }

    pub fn with_c(self, c: f64) -> Result<Self> {
        PhysicalContext::new(c, self.hbar, self.g)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Dimensionless potential `g z / c^2`.
    pub fn potential(&self, z: f64) -> f64 {
        self.g * z / (self.c * self.c)
    }
}

impl Default for PhysicalContext {
    fn default() -> Self {
        PhysicalContext::terrestrial()
    }
}
