//! Dilaton background: a plane wave of cosmic origin plus the static field
//! sourced by an infinite homogeneous plane at `z = 0`.
//!
//! ```text
//! rho(t, z) = rho0_bar cos(omega t - k z + phi) + beta_s_bar g z / c^2
//! ```
//!
//! The second term is the light-dilaton limit (`lambda_rho >> z`) of
//! [`dilaton_gravitational_exact`].

use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::error::{finite, invalid, Error, Result};
use crate::special::sinc;

/// Background field and its couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDilaton", into = "RawDilaton")]
pub struct DilatonParams {
    /// Oscillation amplitude `rho0_bar`.
    pub rho0_bar: f64,
    /// Wave number `k_rho` [1/m].
    pub k_rho: f64,
    /// Angular frequency `omega_rho` [rad/s].
    pub omega_rho: f64,
    /// Initial phase `phi_rho` [rad].
    pub phi_rho: f64,
    /// Reduced Compton wavelength `lambda_rho = hbar / (c m_rho)` [m]; infinite when massless.
    pub lambda_rho: f64,
    /// Source-mass expansion coefficient `beta_S_bar`.
    pub beta_s_bar: f64,
    /// Electromagnetic coupling `d_e`.
    pub d_e: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDilaton {
    #[serde(default)]
    rho0_bar: f64,
    #[serde(rename = "k_rho_per_m", default)]
    k_rho: f64,
    /// Absent means "derive from the dispersion relation".
    #[serde(rename = "omega_rho_rad_per_s", default)]
    omega_rho: Option<f64>,
    #[serde(rename = "phi_rho_rad", default)]
    phi_rho: f64,
    /// Absent or `null` means massless (infinite wavelength).
    #[serde(rename = "lambda_rho_m", default)]
    lambda_rho: Option<f64>,
    #[serde(default)]
    beta_s_bar: f64,
    #[serde(default)]
    d_e: f64,
    #[serde(rename = "c_m_per_s", default = "default_c", skip_serializing)]
    c: f64,
}

fn default_c() -> f64 {
    crate::context::SPEED_OF_LIGHT
}

impl TryFrom<RawDilaton> for DilatonParams {
    type Error = Error;

    fn try_from(raw: RawDilaton) -> Result<Self> {
        let lambda = raw.lambda_rho.unwrap_or(f64::INFINITY);
        let omega = match raw.omega_rho {
            Some(w) => w,
            None => {
                if raw.k_rho < 0.0 {
                    return Err(invalid("k_rho", "must be non-negative"));
                }
                let ctx = PhysicalContext::new(raw.c, crate::context::HBAR, 0.0)?;
                dispersion(raw.k_rho, lambda, &ctx)?
            }
        };
        DilatonParams::new(
            raw.rho0_bar,
            raw.k_rho,
            omega,
            raw.phi_rho,
            lambda,
            raw.beta_s_bar,
            raw.d_e,
        )
    }
}

impl From<DilatonParams> for RawDilaton {
    fn from(p: DilatonParams) -> Self {
        RawDilaton {
            rho0_bar: p.rho0_bar,
            k_rho: p.k_rho,
            omega_rho: Some(p.omega_rho),
            phi_rho: p.phi_rho,
            lambda_rho: p.lambda_rho.is_finite().then_some(p.lambda_rho),
            beta_s_bar: p.beta_s_bar,
            d_e: p.d_e,
            c: crate::context::SPEED_OF_LIGHT,
        }
    }
}

impl DilatonParams {
    /// Builds parameters with an explicitly given frequency. The dispersion
    /// relation is not enforced; see [`DilatonParams::from_dispersion`].
    pub fn new(
        rho0_bar: f64,
        k_rho: f64,
        omega_rho: f64,
        phi_rho: f64,
        lambda_rho: f64,
        beta_s_bar: f64,
        d_e: f64,
    ) -> Result<Self> {
        finite("rho0_bar", rho0_bar)?;
        if rho0_bar < 0.0 {
            return Err(invalid("rho0_bar", format!("must be non-negative, got {rho0_bar}")));
        }
        finite("k_rho", k_rho)?;
        finite("omega_rho", omega_rho)?;
        if omega_rho < 0.0 {
            return Err(invalid("omega_rho", format!("must be non-negative, got {omega_rho}")));
        }
        finite("phi_rho", phi_rho)?;
        if lambda_rho.is_nan() || lambda_rho <= 0.0 {
            return Err(invalid("lambda_rho", format!("must be positive, got {lambda_rho}")));
        }
        finite("beta_s_bar", beta_s_bar)?;
        finite("d_e", d_e)?;
        Ok(DilatonParams {
            rho0_bar,
            k_rho,
            omega_rho,
            phi_rho,
            lambda_rho,
            beta_s_bar,
            d_e,
        })
    }

    /// Builds parameters whose frequency satisfies the Klein-Gordon dispersion relation.
    pub fn from_dispersion(
        rho0_bar: f64,
        k_rho: f64,
        lambda_rho: f64,
        phi_rho: f64,
        beta_s_bar: f64,
        d_e: f64,
        ctx: &PhysicalContext,
    ) -> Result<Self> {
        let omega = dispersion(k_rho, lambda_rho, ctx)?;
        DilatonParams::new(rho0_bar, k_rho, omega, phi_rho, lambda_rho, beta_s_bar, d_e)
    }

    /// No dilaton at all: every coupling zero, massless.
    pub fn none() -> Self {
        DilatonParams {
            rho0_bar: 0.0,
            k_rho: 0.0,
            omega_rho: 0.0,
            phi_rho: 0.0,
            lambda_rho: f64::INFINITY,
            beta_s_bar: 0.0,
            d_e: 0.0,
        }
    }

    /// Dilaton mass `m_rho = hbar / (c lambda_rho)` [kg].
    pub fn mass(&self, ctx: &PhysicalContext) -> f64 {
        ctx.hbar() / (ctx.c() * self.lambda_rho)
    }

    /// `(omega^2 - (c k)^2 - (c / lambda)^2) / omega^2`; zero when the dispersion relation holds.
    pub fn dispersion_mismatch(&self, ctx: &PhysicalContext) -> f64 {
        let c = ctx.c();
        let w2 = self.omega_rho * self.omega_rho;
        let mass_term = c / self.lambda_rho;
        let d = w2 - (c * self.k_rho).powi(2) - mass_term * mass_term;
        if w2 == 0.0 {
            d
        } else {
            d / w2
        }
    }
}

impl Default for DilatonParams {
    fn default() -> Self {
        DilatonParams::none()
    }
}

/// Klein-Gordon dispersion `omega = c sqrt(k^2 + 1/lambda^2)`.
///
/// An infinite `lambda_rho` is the massless dilaton and returns exactly `c k`.
pub fn dispersion(k_rho: f64, lambda_rho: f64, ctx: &PhysicalContext) -> Result<f64> {
    finite("k_rho", k_rho)?;
    if k_rho < 0.0 {
        return Err(invalid("k_rho", format!("must be non-negative, got {k_rho}")));
    }
    if lambda_rho.is_nan() || lambda_rho <= 0.0 {
        return Err(invalid("lambda_rho", format!("must be positive, got {lambda_rho}")));
    }
    let c = ctx.c();
    if lambda_rho.is_infinite() {
        return Ok(c * k_rho);
    }
    Ok(c * k_rho.hypot(1.0 / lambda_rho))
}

/// Raised when the light-dilaton approximation `lambda_rho >> z` is not met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    LightDilatonViolated { lambda_rho: f64, z: f64 },
}

/// A field value with an optional validity warning attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub value: f64,
    pub warning: Option<RegimeWarning>,
}

/// `lambda_rho` must exceed the height by this factor for the light-dilaton limit.
pub const LIGHT_DILATON_MARGIN: f64 = 10.0;

/// Plane-wave part `rho0_bar cos(omega t - k z + phi)`.
pub fn homogeneous_part(t: f64, z: f64, p: &DilatonParams) -> f64 {
    p.rho0_bar * (p.omega_rho * t - p.k_rho * z + p.phi_rho).cos()
}

/// Source-mass part in the light-dilaton limit, `beta_s_bar g z / c^2`.
pub fn gravitational_part(z: f64, p: &DilatonParams, ctx: &PhysicalContext) -> f64 {
    p.beta_s_bar * ctx.potential(z)
}

/// Full dilaton field in the light-dilaton limit. A warning is attached when
/// `lambda_rho < 10 |z|`; the value is still returned.
pub fn dilaton_value(t: f64, z: f64, p: &DilatonParams, ctx: &PhysicalContext) -> FieldValue {
    let value = homogeneous_part(t, z, p) + gravitational_part(z, p, ctx);
    let warning = (p.lambda_rho < LIGHT_DILATON_MARGIN * z.abs()).then_some(RegimeWarning::LightDilatonViolated {
        lambda_rho: p.lambda_rho,
        z,
    });
    FieldValue { value, warning }
}

/// Source-mass part before taking `lambda_rho >> z`:
/// `beta_s_bar g lambda sin([1 - g z/(2c^2)] z / lambda) / c^2`.
pub fn dilaton_gravitational_exact(z: f64, p: &DilatonParams, ctx: &PhysicalContext) -> Result<f64> {
    finite("z", z)?;
    if z < 0.0 {
        return Err(invalid(
            "z",
            format!("must be non-negative (above the source plane), got {z}"),
        ));
    }
    let c2 = ctx.c() * ctx.c();
    let stretched = (1.0 - 0.5 * ctx.potential(z)) * z;
    // lambda sin(u / lambda) = u sinc(u / lambda); finite for lambda = inf
    Ok(p.beta_s_bar * ctx.g() * stretched * sinc(stretched / p.lambda_rho) / c2)
}

/// Uniform sampling of a `(t, z)` rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub z_start: f64,
    pub z_end: f64,
    pub n_t: usize,
    pub n_z: usize,
}

impl SpacetimeGrid {
    pub fn t_step(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_t - 1) as f64
    }

    pub fn z_step(&self) -> f64 {
        (self.z_end - self.z_start) / (self.n_z - 1) as f64
    }

    /// Same rectangle with both spacings halved.
    pub fn refined(&self) -> Self {
        SpacetimeGrid {
            n_t: 2 * self.n_t - 1,
            n_z: 2 * self.n_z - 1,
            ..*self
        }
    }

    fn validate(&self, min_points: usize) -> Result<()> {
        if self.n_t < min_points || self.n_z < min_points {
            return Err(Error::Grid(format!(
                "need at least {min_points} points per axis, got {} x {}",
                self.n_t, self.n_z
            )));
        }
        let extents = [self.t_start, self.t_end, self.z_start, self.z_end];
        if extents.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite extent".into()));
        }
        if self.t_end <= self.t_start || self.z_end <= self.z_start {
            return Err(Error::Grid("empty or inverted region".into()));
        }
        Ok(())
    }
}

/// Max over interior grid nodes of `|(d0^2 - dz^2) rho_h + rho_h / lambda^2|` [1/m^2],
/// with second-order central differences on the grid spacing (`x^0 = c t`).
///
/// The `+ rho_h/lambda^2` sign is the one consistent with
/// `omega^2 = (c k)^2 + (c/lambda)^2` for `rho_h = cos(omega t - k z + phi)`.
pub fn klein_gordon_residual(p: &DilatonParams, ctx: &PhysicalContext, grid: &SpacetimeGrid) -> Result<f64> {
    grid.validate(3)?;
    let dt = grid.t_step();
    let dz = grid.z_step();
    let dx0 = ctx.c() * dt;
    let inv_lambda2 = if p.lambda_rho.is_infinite() {
        0.0
    } else {
        1.0 / (p.lambda_rho * p.lambda_rho)
    };
    let field = |i: usize, j: usize| homogeneous_part(grid.t_start + i as f64 * dt, grid.z_start + j as f64 * dz, p);

    let mut worst: f64 = 0.0;
    for i in 1..grid.n_t - 1 {
        for j in 1..grid.n_z - 1 {
            let centre = field(i, j);
            let d00 = (field(i + 1, j) - 2.0 * centre + field(i - 1, j)) / (dx0 * dx0);
            let dzz = (field(i, j + 1) - 2.0 * centre + field(i, j - 1)) / (dz * dz);
            worst = worst.max((d00 - dzz + centre * inv_lambda2).abs());
        }
    }
    Ok(worst)
}
