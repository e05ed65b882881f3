//! First-order interferometer phase along unperturbed branch trajectories.
//!
//! The phase is `phi0 - (1/hbar) int dt (H_u - H_l) + phi_fsl`, with no cross
//! terms between perturbations. Sums over pulses are assembled from moments of
//! the free-fall path and of the recoil displacements, so that the large
//! common-mode position never enters a difference.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{as_mach_zehnder, ensure_closed, trajectories, InterferometerSpec, RecoilSegment};
use crate::oracle::{quad_term_phase, QuadratureConfig};
use crate::special::{sinc, sinc_increment};

/// One perturbation of the unperturbed interferometer Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PerturbationTerm {
    /// Gravitational correction to the laser wave vector, acting at pulse times.
    WaveVectorMod,
    /// EEP-violating potential `m g beta z`.
    DilatonLinear,
    /// Oscillating coupling `m c^2 rho0 cos(omega t - k_rho z + phi)`.
    DilatonOscillation,
    /// Finite speed of light correction.
    Fsl,
}

impl PerturbationTerm {
    pub const ALL: [PerturbationTerm; 4] = [
        PerturbationTerm::WaveVectorMod,
        PerturbationTerm::DilatonLinear,
        PerturbationTerm::DilatonOscillation,
        PerturbationTerm::Fsl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PerturbationTerm::WaveVectorMod => "wave_vector_mod",
            PerturbationTerm::DilatonLinear => "dilaton_linear",
            PerturbationTerm::DilatonOscillation => "dilaton_oscillation",
            PerturbationTerm::Fsl => "fsl",
        }
    }

    /// Terms that are integrals over time rather than sums over pulses.
    pub fn is_continuous(self) -> bool {
        matches!(
            self,
            PerturbationTerm::DilatonLinear | PerturbationTerm::DilatonOscillation
        )
    }
}

impl fmt::Display for PerturbationTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PerturbationTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        PerturbationTerm::ALL
            .into_iter()
            .find(|t| t.name() == trimmed)
            .ok_or_else(|| Error::UnknownTerm(s.to_string()))
    }
}

/// Pulse-indexed moments shared by the delta-function sums.
struct PulseMoments {
    /// `sum_n dk_n tau_n^p`, `dk_n = k_u - k_l`.
    kick: [f64; 5],
    /// `sum_n tau_n^p (k_u d_u - k_l d_l)`.
    recoil: [f64; 3],
    /// `sum_n (k_u d_u^2 - k_l d_l^2)`.
    recoil_squared: f64,
    laser: f64,
}

fn kick_sign(k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k.signum()
    }
}

fn pulse_moments(spec: &InterferometerSpec) -> Result<PulseMoments> {
    let (upper, lower) = trajectories(spec);
    let start = spec.start_time();
    let mut m = PulseMoments {
        kick: [0.0; 5],
        recoil: [0.0; 3],
        recoil_squared: 0.0,
        laser: 0.0,
    };
    for p in spec.pulses() {
        let tau = p.time - start;
        let (d_u, _) = upper.recoil(p.time)?;
        let (d_l, _) = lower.recoil(p.time)?;
        let dk = p.kick_upper - p.kick_lower;
        let r = p.kick_upper * d_u - p.kick_lower * d_l;
        let mut power = 1.0;
        for p_index in 0..5 {
            m.kick[p_index] += dk * power;
            if p_index < 3 {
                m.recoil[p_index] += r * power;
            }
            power *= tau;
        }
        m.recoil_squared += p.kick_upper * d_u * d_u - p.kick_lower * d_l * d_l;
        m.laser += p.laser_phase * (kick_sign(p.kick_upper) - kick_sign(p.kick_lower));
    }
    Ok(m)
}

/// Unperturbed phase `sum_n [k_u z_u(t_n) - k_l z_l(t_n)]` plus the laser
/// phases, each entering with the sign of the kick it accompanies.
pub fn phi0(spec: &InterferometerSpec) -> Result<f64> {
    ensure_closed(spec)?;
    let m = pulse_moments(spec)?;
    let g = spec.ctx().g();
    let free_fall = spec.z0() * m.kick[0] + spec.v0() * m.kick[1] - 0.5 * g * m.kick[2];
    let recoil: f64 = m.recoil[0];
    Ok(free_fall + recoil + m.laser)
}

fn wave_vector_mod_phase(spec: &InterferometerSpec) -> Result<f64> {
    let g = spec.ctx().g();
    if g == 0.0 {
        return Ok(0.0);
    }
    let m = pulse_moments(spec)?;
    let (z0, v0) = (spec.z0(), spec.v0());
    // sum_n [k_u z_u^2 - k_l z_l^2] with z = z_ff + d
    let free_fall = z0 * z0 * m.kick[0] + 2.0 * z0 * v0 * m.kick[1] + (v0 * v0 - g * z0) * m.kick[2]
        - g * v0 * m.kick[3]
        + 0.25 * g * g * m.kick[4];
    let mixed = 2.0 * (z0 * m.recoil[0] + v0 * m.recoil[1] - 0.5 * g * m.recoil[2]);
    let c = spec.ctx().c();
    Ok(-g / (2.0 * c * c) * (free_fall + mixed + m.recoil_squared))
}

/// `int (d_u - d_l) dt` over a pair of aligned recoil segments.
fn separation_integral(u: &RecoilSegment, l: &RecoilSegment) -> f64 {
    let h = u.end - u.start;
    (u.displacement - l.displacement) * h + 0.5 * (u.velocity - l.velocity) * h * h
}

fn dilaton_linear_phase(spec: &InterferometerSpec) -> f64 {
    let species = spec.species();
    let prefactor = species.mass() * spec.ctx().g() * species.beta() / spec.ctx().hbar();
    if prefactor == 0.0 {
        return 0.0;
    }
    let (upper, lower) = trajectories(spec);
    let area: f64 = upper
        .recoil_segments()
        .iter()
        .zip(lower.recoil_segments())
        .map(|(u, l)| separation_integral(u, l))
        .sum();
    -prefactor * area
}

/// Exact phase of the oscillating coupling for uniform motion (`g = 0`).
fn dilaton_oscillation_free(spec: &InterferometerSpec) -> f64 {
    let p = spec.dilaton();
    let (upper, lower) = trajectories(spec);
    let k_rho = p.k_rho;
    let omega = p.omega_rho;
    let v0 = spec.v0();
    let mut total = 0.0;
    for (u, l) in upper.recoil_segments().iter().zip(lower.recoil_segments()) {
        let h = u.end - u.start;
        let z_free = upper.free_fall_position(u.start);
        let separation = u.displacement - l.displacement;
        let z_mean = z_free + 0.5 * (u.displacement + l.displacement);
        let dv = u.velocity - l.velocity;
        let v_mean = v0 + 0.5 * (u.velocity + l.velocity);
        // psi_s(t) = A_s + B_s (t - start); the per-branch integral is h sinc(B h/2) cos(A + B h/2)
        let rate_l = omega - k_rho * (v0 + l.velocity);
        let half_l = 0.5 * rate_l * h;
        let sinc_l = sinc(half_l);
        let sinc_diff = sinc_increment(half_l, -0.5 * k_rho * dv * h);
        let sinc_u = sinc_l + sinc_diff;
        let center = omega * u.start - k_rho * z_mean + p.phi_rho + 0.5 * (omega - k_rho * v_mean) * h;
        let half_gap = -0.5 * k_rho * (separation + 0.5 * dv * h);
        let cos_u = (center + half_gap).cos();
        let cos_l = (center - half_gap).cos();
        let cos_diff = -2.0 * center.sin() * half_gap.sin();
        total += h * (sinc_diff * 0.5 * (cos_u + cos_l) + 0.5 * (sinc_u + sinc_l) * cos_diff);
    }
    let species = spec.species();
    let c = spec.ctx().c();
    -species.mass() * c * c * species.rho0() / spec.ctx().hbar() * total
}

fn dilaton_oscillation_phase(spec: &InterferometerSpec) -> Result<f64> {
    if spec.species().rho0() == 0.0 {
        return Ok(0.0);
    }
    if spec.ctx().g() == 0.0 {
        return Ok(dilaton_oscillation_free(spec));
    }
    let q = quad_term_phase(spec, PerturbationTerm::DilatonOscillation, &QuadratureConfig::default())?;
    Ok(q.value)
}

/// Finite speed of light phase `-3 k g T^2 v_T / c`, with `v_T` the upper
/// branch velocity just before the middle pulse. Mach-Zehnder only.
pub fn fsl_phase(spec: &InterferometerSpec) -> Result<f64> {
    let shape = as_mach_zehnder(spec).ok_or(Error::NotMachZehnder(
        "finite speed of light phase is only defined for the Mach-Zehnder sequence",
    ))?;
    let t = shape.interrogation_time;
    let (upper, _) = trajectories(spec);
    let v_t = upper.velocity(shape.start + t)?;
    let ctx = spec.ctx();
    Ok(-3.0 * shape.k * ctx.g() * t * t * v_t / ctx.c())
}

/// Contribution of one perturbation, `-(1/hbar) int dt (H_u - H_l)` or the
/// equivalent pulse sum.
pub fn term_phase(spec: &InterferometerSpec, term: PerturbationTerm) -> Result<f64> {
    ensure_closed(spec)?;
    match term {
        PerturbationTerm::WaveVectorMod => wave_vector_mod_phase(spec),
        PerturbationTerm::DilatonLinear => Ok(dilaton_linear_phase(spec)),
        PerturbationTerm::DilatonOscillation => dilaton_oscillation_phase(spec),
        PerturbationTerm::Fsl => fsl_phase(spec),
    }
}

/// Phase split into its first-order pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBreakdown {
    pub phi0: f64,
    /// Requested terms other than [`PerturbationTerm::Fsl`], in request order.
    pub terms: Vec<(PerturbationTerm, f64)>,
    /// Zero unless [`PerturbationTerm::Fsl`] was requested.
    pub phi_fsl: f64,
    pub total: f64,
}

impl PhaseBreakdown {
    pub fn term(&self, term: PerturbationTerm) -> Option<f64> {
        if term == PerturbationTerm::Fsl {
            return Some(self.phi_fsl);
        }
        self.terms.iter().find(|(t, _)| *t == term).map(|(_, v)| *v)
    }

    /// Column names matching [`PhaseBreakdown::csv_values`].
    pub fn csv_header(&self) -> Vec<String> {
        let mut names = vec!["phi0".to_string()];
        names.extend(self.terms.iter().map(|(t, _)| t.name().to_string()));
        names.push("phi_fsl".into());
        names.push("total".into());
        names
    }

    pub fn csv_values(&self) -> Vec<f64> {
        let mut values = vec![self.phi0];
        values.extend(self.terms.iter().map(|(_, v)| *v));
        values.push(self.phi_fsl);
        values.push(self.total);
        values
    }

    /// Header plus one record.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.csv_header().join(","))?;
        let row: Vec<String> = self.csv_values().iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(","))
    }
}

impl Serialize for PhaseBreakdown {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len() + 3))?;
        map.serialize_entry("phi0", &self.phi0)?;
        for (t, v) in &self.terms {
            map.serialize_entry(t.name(), v)?;
        }
        map.serialize_entry("phi_fsl", &self.phi_fsl)?;
        map.serialize_entry("total", &self.total)?;
        map.end()
    }
}

/// `phi0` plus each requested term; duplicate requests are evaluated once.
pub fn total_phase(spec: &InterferometerSpec, terms: &[PerturbationTerm]) -> Result<PhaseBreakdown> {
    ensure_closed(spec)?;
    let phi0 = phi0(spec)?;
    let mut seen = Vec::new();
    let mut contributions = Vec::new();
    let mut phi_fsl = 0.0;
    for &term in terms {
        if seen.contains(&term) {
            continue;
        }
        seen.push(term);
        if term == PerturbationTerm::Fsl {
            phi_fsl = fsl_phase(spec)?;
        } else {
            contributions.push((term, term_phase(spec, term)?));
        }
    }
    let total = phi0 + contributions.iter().map(|(_, v)| v).sum::<f64>() + phi_fsl;
    Ok(PhaseBreakdown {
        phi0,
        terms: contributions,
        phi_fsl,
        total,
    })
}
