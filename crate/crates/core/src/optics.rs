//! Geometrical optics in the linear metric `g_00 = 1 + 2 g z / c^2`.
//!
//! Conventions (used by every function in this module):
//!
//! | quantity | convention |
//! |----------|------------|
//! | signature | `(+, -, -, -)`, `x^0 = c t` |
//! | phase | `Phi = c k0 t - q.r - kappa(z)`, `kappa(0) = 0` |
//! | wave vector | `K_mu = d_mu Phi`, so `K_0 = k0`, `K_x = -k_x`, `K_y = -k_y`, `K_z = -kappa'(z)` |
//! | raising | `K^0 = K_0 / (1 + 2 g z / c^2)`, `K^j = -K_j` |
//! | polarization | contravariant `e^mu`, components ordered `(0, x, y, z)` |
//!
//! The eikonal phase never depends on the dilaton; only the amplitude does.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::context::PhysicalContext;
use crate::dilaton::{dilaton_value, DilatonParams};
use crate::error::{finite, invalid, Error, Result};
use crate::special::half_sine_over_wavenumber;

/// Contravariant polarization 4-vector `(e^0, e^x, e^y, e^z)`.
pub type Polarization = [Complex64; 4];

/// Tolerance on `|e*_mu e^mu| = 1` when constructing a [`WaveSpec`].
const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Constants of a single light wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpec {
    k0: f64,
    q: [f64; 2],
    k_z: f64,
    a_in: f64,
    e_in: Polarization,
}

impl WaveSpec {
    /// `k0` follows from `k0^2 = q^2 + k_z^2`. A negative `k_z` propagates downward.
    pub fn new(q: [f64; 2], k_z: f64, a_in: f64, e_in: Polarization) -> Result<Self> {
        finite("q_x", q[0])?;
        finite("q_y", q[1])?;
        finite("k_z", k_z)?;
        if k_z == 0.0 {
            return Err(invalid("k_z", "must be non-zero"));
        }
        if !(a_in.is_finite() && a_in > 0.0) {
            return Err(invalid("a_in", format!("must be positive, got {a_in}")));
        }
        let norm = minkowski_norm(&e_in);
        if !norm.is_finite() || (norm.abs() - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(invalid("e_in", format!("|e*_mu e^mu| must be 1, got {norm}")));
        }
        let k0 = q[0].hypot(q[1]).hypot(k_z);
        Ok(WaveSpec { k0, q, k_z, a_in, e_in })
    }

    /// On-axis wave (`q = 0`, `k0 = |k_z|`) with transverse x polarization.
    pub fn vertical(k_z: f64, a_in: f64) -> Result<Self> {
        WaveSpec::new([0.0, 0.0], k_z, a_in, transverse_x())
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn q(&self) -> [f64; 2] {
        self.q
    }

    pub fn k_z(&self) -> f64 {
        self.k_z
    }

    pub fn a_in(&self) -> f64 {
        self.a_in
    }

    pub fn e_in(&self) -> Polarization {
        self.e_in
    }

    fn q_squared(&self) -> f64 {
        self.q[0] * self.q[0] + self.q[1] * self.q[1]
    }

    /// `K_mu(0) e^mu_in / k0`; zero for a gauge-consistent initial polarization.
    pub fn initial_gauge_mismatch(&self) -> Complex64 {
        let e = &self.e_in;
        (e[0] * self.k0 - e[1] * self.q[0] - e[2] * self.q[1] - e[3] * self.k_z) / self.k0
    }
}

/// Purely transverse polarization along x.
pub fn transverse_x() -> Polarization {
    let zero = Complex64::new(0.0, 0.0);
    [zero, Complex64::new(1.0, 0.0), zero, zero]
}

/// `eta_mu_nu e*^mu e^nu` at the source plane.
pub fn minkowski_norm(e: &Polarization) -> f64 {
    e[0].norm_sqr() - e[1].norm_sqr() - e[2].norm_sqr() - e[3].norm_sqr()
}

/// Phase, wave vector, amplitude and polarization at one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub phase: f64,
    pub wave_vector: [f64; 4],
    pub amplitude: f64,
    pub polarization: Polarization,
}

/// `kappa(z) = k_z [1 - g k0^2 z / (2 c^2 k_z^2)] z`.
pub fn kappa(z: f64, w: &WaveSpec, ctx: &PhysicalContext) -> f64 {
    let ratio = w.k0 * w.k0 / (w.k_z * w.k_z);
    w.k_z * (1.0 - 0.5 * ratio * ctx.potential(z)) * z
}

/// Eikonal phase `Phi = c k0 t - q.r - kappa(z)` [rad].
pub fn eikonal_phase(t: f64, r: [f64; 2], z: f64, w: &WaveSpec, ctx: &PhysicalContext) -> f64 {
    ctx.c() * w.k0 * t - w.q[0] * r[0] - w.q[1] * r[1] - kappa(z, w, ctx)
}

/// Covariant wave vector `K_mu = d_mu Phi` [1/m].
pub fn wave_vector(_t: f64, _r: [f64; 2], z: f64, w: &WaveSpec, ctx: &PhysicalContext) -> [f64; 4] {
    let ratio = w.k0 * w.k0 / (w.k_z * w.k_z);
    [w.k0, -w.q[0], -w.q[1], -w.k_z * (1.0 - ratio * ctx.potential(z))]
}

/// Raises a covector with the linear metric at height `z`.
pub fn raise(covector: [f64; 4], z: f64, ctx: &PhysicalContext) -> [f64; 4] {
    [
        covector[0] / (1.0 + 2.0 * ctx.potential(z)),
        -covector[1],
        -covector[2],
        -covector[3],
    ]
}

/// Null-condition residual `K_mu K^mu / k0^2` at height `z`.
pub fn null_residual(z: f64, w: &WaveSpec, ctx: &PhysicalContext) -> f64 {
    let k = wave_vector(0.0, [0.0, 0.0], z, w, ctx);
    let scaled = k.map(|c| c / w.k0);
    let up = raise(scaled, z, ctx);
    scaled.iter().zip(up.iter()).map(|(a, b)| a * b).sum()
}

/// Dimensionless deviation `a / a_in - 1`.
pub fn amplitude_deviation(z: f64, t: f64, w: &WaveSpec, p: &DilatonParams, ctx: &PhysicalContext) -> f64 {
    let gravity = 0.5 * ctx.potential(z) * (w.q_squared() / (w.k_z * w.k_z) + p.d_e * p.beta_s_bar);
    // (1 - omega k0 / (c k_rho k_z)) sin(k_rho z / 2), continuous at k_rho = 0
    let envelope = (p.k_rho - (p.omega_rho / ctx.c()) * (w.k0 / w.k_z)) * half_sine_over_wavenumber(p.k_rho, z);
    let oscillation = envelope * p.d_e * p.rho0_bar * (p.omega_rho * t - 0.5 * p.k_rho * z + p.phi_rho).sin();
    gravity + oscillation
}

/// Scalar amplitude `a(z, t)` to first order in every perturbation, no cross terms.
pub fn amplitude(z: f64, t: f64, w: &WaveSpec, p: &DilatonParams, ctx: &PhysicalContext) -> f64 {
    w.a_in * (1.0 + amplitude_deviation(z, t, w, p, ctx))
}

/// Transported polarization `e^mu(z)`; the transverse components are constant.
pub fn polarization(z: f64, w: &WaveSpec, ctx: &PhysicalContext) -> Polarization {
    let e = &w.e_in;
    let u = ctx.potential(z);
    let tilt = u * w.k0 / w.k_z;
    [e[0] * (1.0 - u) - e[3] * tilt, e[1], e[2], e[3] - e[0] * tilt]
}

/// Gauge residual `|K_mu e^mu| / k0` at height `z`.
pub fn gauge_residual(z: f64, w: &WaveSpec, ctx: &PhysicalContext) -> f64 {
    let k = wave_vector(0.0, [0.0, 0.0], z, w, ctx);
    let e = polarization(z, w, ctx);
    let sum: Complex64 = k.iter().zip(e.iter()).map(|(kc, ec)| ec * *kc).sum();
    sum.norm() / w.k0
}

/// Evaluates every field quantity at one event.
pub fn field_point(t: f64, r: [f64; 2], z: f64, w: &WaveSpec, p: &DilatonParams, ctx: &PhysicalContext) -> FieldPoint {
    FieldPoint {
        phase: eikonal_phase(t, r, z, w, ctx),
        wave_vector: wave_vector(t, r, z, w, ctx),
        amplitude: amplitude(z, t, w, p, ctx),
        polarization: polarization(z, w, ctx),
    }
}

/// Effective quantities of a counterpropagating two-photon (Raman/Bragg) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhoton {
    /// `c (k_B - k_R)` [rad/s].
    pub delta_omega: f64,
    /// `k_B + k_R` [1/m].
    pub k_eff: f64,
    /// `Phi_B - Phi_R = delta_omega t - k z [1 - g z / (2 c^2)]` [rad].
    pub differential_phase: f64,
}

/// Blue beam propagates upward, red beam downward; both have `q = 0`.
pub fn two_photon_effective(k_red: f64, k_blue: f64, t: f64, z: f64, ctx: &PhysicalContext) -> Result<TwoPhoton> {
    if !(k_red.is_finite() && k_red > 0.0) {
        return Err(invalid("k_red", format!("must be positive, got {k_red}")));
    }
    if !(k_blue.is_finite() && k_blue > 0.0) {
        return Err(invalid("k_blue", format!("must be positive, got {k_blue}")));
    }
    let delta_omega = ctx.c() * (k_blue - k_red);
    let k_eff = k_blue + k_red;
    Ok(TwoPhoton {
        delta_omega,
        k_eff,
        differential_phase: delta_omega * t - k_eff * z * (1.0 - 0.5 * ctx.potential(z)),
    })
}

/// Geometrical-optics expansion parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonScale {
    pub value: f64,
    /// `true` when `value < 1e-2`.
    pub geometrical_optics_valid: bool,
}

/// Threshold below which the eikonal expansion is considered valid.
pub const GEOMETRICAL_OPTICS_LIMIT: f64 = 1e-2;

/// `epsilon = lambda / L`.
pub fn epsilon_scale(wavelength: f64, length: f64) -> Result<EpsilonScale> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(invalid("wavelength", format!("must be positive, got {wavelength}")));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(invalid("length", format!("must be positive, got {length}")));
    }
    let value = wavelength / length;
    Ok(EpsilonScale {
        value,
        geometrical_optics_valid: value < GEOMETRICAL_OPTICS_LIMIT,
    })
}

/// Time at which the constant-phase surface `Phi = phase` (with `r = 0`) reaches `z`.
pub fn light_cone_time(z: f64, phase: f64, w: &WaveSpec, ctx: &PhysicalContext) -> f64 {
    (phase + kappa(z, w, ctx)) / (ctx.c() * w.k0)
}

/// One sample of a cut along the light cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSample {
    pub t: f64,
    pub z: f64,
    /// `-K_z / k_z`.
    pub vertical_wave_number: f64,
    /// `a / a_in - 1`.
    pub amplitude_dev: f64,
}

/// Samples the light cone through the origin (`Phi = 0`) at the given heights.
pub fn light_cone_cut(heights: &[f64], w: &WaveSpec, p: &DilatonParams, ctx: &PhysicalContext) -> Vec<ConeSample> {
    heights
        .iter()
        .map(|&z| {
            let t = light_cone_time(z, 0.0, w, ctx);
            let k = wave_vector(t, [0.0, 0.0], z, w, ctx);
            ConeSample {
                t,
                z,
                vertical_wave_number: -k[3] / w.k_z,
                amplitude_dev: amplitude_deviation(z, t, w, p, ctx),
            }
        })
        .collect()
}

/// Rectangle in `(t, z)` sampled on a uniform grid, plus the scale `L`
/// used to normalize the phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRegion {
    pub t_min: f64,
    pub t_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub n_t: usize,
    pub n_z: usize,
    pub length_scale: f64,
}

/// Values at one grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    /// `Phi / (k_z L)`.
    pub scaled_phase: f64,
    /// `a / a_in - 1`.
    pub amplitude_dev: f64,
    /// `K_0 / k_z`.
    pub k0_scaled: f64,
    /// `K_z / k_z`.
    pub kz_scaled: f64,
}

/// Row-major field grid: node `(i, j)` is at `(t[i], z[j])`, index `i * n_z + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    pub nodes: Vec<GridNode>,
}

fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    let step = (end - start) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { end } else { start + i as f64 * step })
        .collect()
}

/// Samples phase, amplitude and wave vector over a spacetime rectangle (at `r = 0`).
pub fn field_grid(region: &GridRegion, w: &WaveSpec, p: &DilatonParams, ctx: &PhysicalContext) -> Result<FieldGrid> {
    if region.n_t < 2 || region.n_z < 2 {
        return Err(Error::Grid(format!(
            "need n_t, n_z >= 2, got {} x {}",
            region.n_t, region.n_z
        )));
    }
    let bounds = [region.t_min, region.t_max, region.z_min, region.z_max];
    if bounds.iter().any(|b| !b.is_finite()) {
        return Err(Error::Grid("non-finite bounds".into()));
    }
    if region.t_max <= region.t_min || region.z_max <= region.z_min {
        return Err(Error::Grid("zero-sized or inverted region".into()));
    }
    if !(region.length_scale.is_finite() && region.length_scale > 0.0) {
        return Err(Error::Grid(format!(
            "length scale must be positive, got {}",
            region.length_scale
        )));
    }

    let t = linspace(region.t_min, region.t_max, region.n_t);
    let z = linspace(region.z_min, region.z_max, region.n_z);
    let phase_scale = w.k_z * region.length_scale;
    let nodes = t
        .par_iter()
        .flat_map_iter(|&ti| {
            z.iter().map(move |&zj| {
                let k = wave_vector(ti, [0.0, 0.0], zj, w, ctx);
                GridNode {
                    scaled_phase: eikonal_phase(ti, [0.0, 0.0], zj, w, ctx) / phase_scale,
                    amplitude_dev: amplitude_deviation(zj, ti, w, p, ctx),
                    k0_scaled: k[0] / w.k_z,
                    kz_scaled: k[3] / w.k_z,
                }
            })
        })
        .collect();
    Ok(FieldGrid { t, z, nodes })
}

impl FieldGrid {
    pub fn node(&self, i_t: usize, i_z: usize) -> &GridNode {
        &self.nodes[i_t * self.z.len() + i_z]
    }

    pub const CSV_HEADER: &'static str = "t,z,scaled_phase,amplitude_dev,K0_scaled,Kz_scaled";

    /// Writes the grid as CSV with a header row and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for (i, &t) in self.t.iter().enumerate() {
            for (j, &z) in self.z.iter().enumerate() {
                let n = self.node(i, j);
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    t, z, n.scaled_phase, n.amplitude_dev, n.k0_scaled, n.kz_scaled
                )?;
            }
        }
        Ok(())
    }
}

/// Finite-difference residual of the amplitude transport equation
/// `K^mu d_mu a + (a/2) [nabla_mu - (d_mu rho) d_e] K^mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportResidual {
    /// Residual divided by `a_in k0`.
    pub residual: f64,
    /// Largest retained first-order term, also divided by `a_in k0`.
    pub scale: f64,
}

impl TransportResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual.abs()
        } else {
            self.residual.abs() / self.scale
        }
    }
}

/// Second-order central differences with step `h` [m] in both `x^0 = c t` and `z`.
pub fn amplitude_transport_residual(
    t: f64,
    z: f64,
    w: &WaveSpec,
    p: &DilatonParams,
    ctx: &PhysicalContext,
    h: f64,
) -> TransportResidual {
    let c = ctx.c();
    let dt = h / c;
    let dev = |zz: f64, tt: f64| amplitude_deviation(zz, tt, w, p, ctx);
    let rho = |zz: f64, tt: f64| dilaton_value(tt, zz, p, ctx).value;

    let up = raise(wave_vector(t, [0.0, 0.0], z, w, ctx), z, ctx).map(|v| v / w.k0);
    let up_z = |zz: f64| -wave_vector(t, [0.0, 0.0], zz, w, ctx)[3] / w.k0;
    let sqrt_g = |zz: f64| (1.0 + 2.0 * ctx.potential(zz)).sqrt();

    // a = a_in (1 + dev); dividing by a_in leaves derivatives of dev
    let d0_a = (dev(z, t + dt) - dev(z, t - dt)) / (2.0 * h);
    let dz_a = (dev(z + h, t) - dev(z - h, t)) / (2.0 * h);
    let d0_rho = (rho(z, t + dt) - rho(z, t - dt)) / (2.0 * h);
    let dz_rho = (rho(z + h, t) - rho(z - h, t)) / (2.0 * h);
    let divergence = (sqrt_g(z + h) * up_z(z + h) - sqrt_g(z - h) * up_z(z - h)) / (2.0 * h) / sqrt_g(z);

    let a = 1.0 + dev(z, t);
    let terms = [
        up[0] * d0_a,
        up[3] * dz_a,
        0.5 * a * divergence,
        -0.5 * a * p.d_e * (up[0] * d0_rho + up[3] * dz_rho),
    ];
    TransportResidual {
        residual: terms.iter().sum(),
        scale: terms.iter().fold(0.0f64, |m, v| m.max(v.abs())),
    }
}

/// Richardson extrapolation of [`amplitude_transport_residual`] from steps `h` and `h/2`.
pub fn amplitude_transport_residual_extrapolated(
    t: f64,
    z: f64,
    w: &WaveSpec,
    p: &DilatonParams,
    ctx: &PhysicalContext,
    h: f64,
) -> TransportResidual {
    let coarse = amplitude_transport_residual(t, z, w, p, ctx, h);
    let fine = amplitude_transport_residual(t, z, w, p, ctx, 0.5 * h);
    TransportResidual {
        residual: (4.0 * fine.residual - coarse.residual) / 3.0,
        scale: fine.scale,
    }
}
