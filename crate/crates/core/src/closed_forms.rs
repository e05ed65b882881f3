//! Analytic phases for the Mach-Zehnder gravimeter, gradiometer, two-species
//! EEP test and the dark-matter gradiometer.

use serde::Serialize;

use crate::context::PhysicalContext;
use crate::dilaton::DilatonParams;
use crate::error::{finite, invalid, Result};
use crate::geometry::{as_mach_zehnder, mach_zehnder, InterferometerSpec, Species};
use crate::special::sinc;

/// Single Mach-Zehnder interferometer in gravity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzParams {
    pub k: f64,
    pub interrogation_time: f64,
    pub z0: f64,
    pub v0: f64,
    pub mass: f64,
    pub beta: f64,
}

impl MzParams {
    /// Reads the parameters back from a Mach-Zehnder spec.
    pub fn from_spec(spec: &InterferometerSpec) -> Option<Self> {
        let shape = as_mach_zehnder(spec)?;
        Some(MzParams {
            k: shape.k,
            interrogation_time: shape.interrogation_time,
            z0: spec.z0(),
            v0: spec.v0(),
            mass: spec.species().mass(),
            beta: spec.species().beta(),
        })
    }

    /// The corresponding spec with pulses at `0, T, 2T` and no oscillating coupling.
    pub fn to_spec(&self, ctx: &PhysicalContext) -> Result<InterferometerSpec> {
        let species = Species::new(self.mass, self.beta, 0.0)?;
        mach_zehnder(
            self.interrogation_time,
            self.k,
            species,
            self.z0,
            self.v0,
            DilatonParams::none(),
            *ctx,
        )
    }

    pub fn recoil_velocity(&self, ctx: &PhysicalContext) -> f64 {
        ctx.hbar() * self.k / self.mass
    }

    /// Upper-branch position at the middle pulse.
    pub fn z_t(&self, ctx: &PhysicalContext) -> f64 {
        let t = self.interrogation_time;
        self.z0 + self.v0 * t - 0.5 * ctx.g() * t * t + self.recoil_velocity(ctx) * t
    }

    /// Upper-branch velocity just before the middle pulse.
    pub fn v_t(&self, ctx: &PhysicalContext) -> f64 {
        self.v0 - ctx.g() * self.interrogation_time + self.recoil_velocity(ctx)
    }

    fn gravimeter_scale(&self, ctx: &PhysicalContext) -> f64 {
        self.k * ctx.g() * self.interrogation_time * self.interrogation_time
    }
}

/// [`single_phase`] split into its pieces [rad].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinglePhaseTerms {
    /// `-k g T^2`.
    pub gravimeter: f64,
    pub dilaton_linear: f64,
    pub fsl: f64,
    pub wave_vector_mod: f64,
}

impl SinglePhaseTerms {
    pub fn total(&self) -> f64 {
        self.gravimeter + self.dilaton_linear + self.fsl + self.wave_vector_mod
    }
}

pub fn single_phase_terms(p: &MzParams, ctx: &PhysicalContext) -> SinglePhaseTerms {
    let scale = p.gravimeter_scale(ctx);
    let (c, g, t) = (ctx.c(), ctx.g(), p.interrogation_time);
    let v_t = p.v_t(ctx);
    let c2 = c * c;
    let relativistic =
        p.v0 * v_t / c2 - g * p.z_t(ctx) / c2 - (g * t / c2) * (p.v0 + 0.5 * p.recoil_velocity(ctx) - g * t)
            + g * g * t * t / (4.0 * c2);
    SinglePhaseTerms {
        gravimeter: -scale,
        dilaton_linear: -scale * p.beta,
        fsl: -scale * 3.0 * v_t / c,
        wave_vector_mod: -scale * relativistic,
    }
}

/// Mach-Zehnder phase to first order in `beta`, `1/c` and `g/c^2`.
pub fn single_phase(p: &MzParams, ctx: &PhysicalContext) -> f64 {
    single_phase_terms(p, ctx).total()
}

/// Two interferometers separated vertically by `separation`, sharing `T`, `k`, `v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradiometerPair {
    pub separation: f64,
    /// Mean gravitational acceleration [m/s^2].
    pub g: f64,
    /// Difference in gravitational acceleration between the two devices [m/s^2].
    pub delta_g: f64,
    pub interrogation_time: f64,
    pub k: f64,
    pub v0: f64,
    pub mass: f64,
}

impl GradiometerPair {
    /// Shared upper-branch velocity at the middle pulse.
    pub fn v_t(&self, ctx: &PhysicalContext) -> f64 {
        self.v0 - self.g * self.interrogation_time + ctx.hbar() * self.k / self.mass
    }
}

/// Differential gradiometer phase
/// `k g T^2 [-(dg/g)(1 + beta + 3 (v_T - g T)/c) + g l / c^2]`.
pub fn gradiometer_phase(pair: &GradiometerPair, beta: f64, ctx: &PhysicalContext) -> Result<f64> {
    finite("g", pair.g)?;
    if pair.g == 0.0 {
        return Err(invalid("g", "the gradiometer phase is normalized by g, which is zero"));
    }
    if !(pair.separation.is_finite() && pair.separation > 0.0) {
        return Err(invalid(
            "separation",
            format!("must be positive, got {}", pair.separation),
        ));
    }
    let (c, g, t) = (ctx.c(), pair.g, pair.interrogation_time);
    let v_t = pair.v_t(ctx);
    let gradient = -(pair.delta_g / g) * (1.0 + beta + 3.0 * (v_t - g * t) / c);
    let redshift = g * pair.separation / (c * c);
    Ok(pair.k * g * t * t * (gradient + redshift))
}

/// Two species `a` (`lambda = -1`) and `b` (`lambda = +1`) around mean values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EepPair {
    pub mass: f64,
    pub delta_mass: f64,
    pub k: f64,
    pub delta_k: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub v0: f64,
    pub delta_v0: f64,
    pub z0: f64,
    pub delta_z0: f64,
}

/// Species label in an [`EepPair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMember {
    A,
    B,
}

impl PairMember {
    fn lambda(self) -> f64 {
        match self {
            PairMember::A => -1.0,
            PairMember::B => 1.0,
        }
    }
}

impl EepPair {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("delta_mass", self.delta_mass),
            ("k", self.k),
            ("delta_k", self.delta_k),
            ("beta_a", self.beta_a),
            ("beta_b", self.beta_b),
            ("v0", self.v0),
            ("delta_v0", self.delta_v0),
            ("z0", self.z0),
            ("delta_z0", self.delta_z0),
        ] {
            finite(name, v)?;
        }
        if self.mass <= 0.0 {
            return Err(invalid("mass", format!("must be positive, got {}", self.mass)));
        }
        if self.delta_mass.abs() >= 2.0 * self.mass {
            return Err(invalid(
                "delta_mass",
                format!(
                    "|delta_mass| must be below 2 m = {}, got {}",
                    2.0 * self.mass,
                    self.delta_mass
                ),
            ));
        }
        if self.k == 0.0 {
            return Err(invalid("k", "must be non-zero"));
        }
        Ok(())
    }

    /// Mass-defect frequency `delta_m c^2 / hbar`.
    pub fn mass_defect_frequency(&self, ctx: &PhysicalContext) -> f64 {
        self.delta_mass * ctx.c() * ctx.c() / ctx.hbar()
    }

    /// Compton frequency `m c^2 / hbar`.
    pub fn compton_frequency(&self, ctx: &PhysicalContext) -> f64 {
        self.mass * ctx.c() * ctx.c() / ctx.hbar()
    }

    /// `[1 - (delta_m / 2m)^2]^-1`.
    pub fn chi(&self) -> f64 {
        let ratio = self.delta_mass / (2.0 * self.mass);
        1.0 / (1.0 - ratio * ratio)
    }

    pub fn recoil_velocity(&self, ctx: &PhysicalContext) -> f64 {
        ctx.hbar() * self.k / self.mass
    }

    pub fn delta_beta(&self) -> f64 {
        self.beta_b - self.beta_a
    }

    pub fn member_mass(&self, member: PairMember) -> f64 {
        self.mass + 0.5 * member.lambda() * self.delta_mass
    }

    pub fn member_kick(&self, member: PairMember) -> f64 {
        self.k + 0.5 * member.lambda() * self.delta_k
    }

    pub fn initial_velocity(&self, member: PairMember) -> f64 {
        self.v0 + 0.5 * member.lambda() * self.delta_v0
    }

    /// `z0 + lambda delta_z0`, without the factor one half used for velocities.
    pub fn initial_position(&self, member: PairMember) -> f64 {
        self.z0 + member.lambda() * self.delta_z0
    }

    /// Part of `theta` that is odd under `k -> -k`.
    fn reversal_odd(&self, g: f64, t: f64, c: f64) -> f64 {
        let c2 = c * c;
        self.delta_beta() + 3.0 * self.delta_v0 / c - (g / c2) * (self.delta_z0 + 3.0 * self.delta_v0 * t)
            + 2.0 * self.v0 * self.delta_v0 / c2
    }

    /// Recoil terms, even under `k -> -k`.
    fn reversal_even(&self, g: f64, t: f64, ctx: &PhysicalContext) -> f64 {
        let c = ctx.c();
        let v_r = self.recoil_velocity(ctx).abs();
        let chi = self.chi();
        let mass_ratio = self.delta_mass / self.mass;
        let kick_ratio = self.delta_k / self.k;
        chi * (v_r / c) * (3.0 - 1.5 * g * t / c + self.v0 / c) * (kick_ratio - mass_ratio)
            + chi * (v_r * self.delta_v0 / (c * c)) * (1.0 - 0.25 * kick_ratio * mass_ratio)
    }
}

/// Direction of the effective wave vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KickDirection {
    Up,
    Down,
}

impl KickDirection {
    pub fn sign(self) -> f64 {
        match self {
            KickDirection::Up => 1.0,
            KickDirection::Down => -1.0,
        }
    }
}

/// Normalized differential phase `theta_k = phi_a/(|k_a| g T^2) - phi_b/(|k_b| g T^2)`.
pub fn eep_theta(
    pair: &EepPair,
    direction: KickDirection,
    g: f64,
    interrogation_time: f64,
    ctx: &PhysicalContext,
) -> Result<f64> {
    pair.validate()?;
    finite("g", g)?;
    finite("T", interrogation_time)?;
    let odd = pair.reversal_odd(g, interrogation_time, ctx.c());
    let even = pair.reversal_even(g, interrogation_time, ctx);
    Ok(direction.sign() * odd + even)
}

/// `(theta_k - theta_-k) / 2`: the recoil terms cancel.
pub fn k_reversal(pair: &EepPair, g: f64, interrogation_time: f64, ctx: &PhysicalContext) -> Result<f64> {
    pair.validate()?;
    finite("g", g)?;
    finite("T", interrogation_time)?;
    let c = ctx.c();
    let c2 = c * c;
    Ok(
        pair.delta_beta() + 3.0 * pair.delta_v0 / c + 2.0 * pair.v0 * pair.delta_v0 / c2
            - g * pair.delta_z0 / c2
            - 3.0 * g * pair.delta_v0 * interrogation_time / c2,
    )
}

/// Two Mach-Zehnder interferometers a distance `separation` apart in
/// microgravity, the upper one started `separation / c` later.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkMatterPair {
    pub separation: f64,
    pub interrogation_time: f64,
    pub k: f64,
    pub v0: f64,
    pub mass: f64,
    /// Atomic coupling to the oscillating field.
    pub rho0: f64,
    pub omega_rho: f64,
    pub k_rho: f64,
    pub phi_rho: f64,
    /// Must be zero.
    pub g: f64,
}

impl DarkMatterPair {
    pub fn validate(&self) -> Result<()> {
        if self.g != 0.0 {
            return Err(invalid(
                "g",
                format!("the dark-matter pair requires g = 0, got {}", self.g),
            ));
        }
        for (name, v) in [
            ("separation", self.separation),
            ("T", self.interrogation_time),
            ("k", self.k),
            ("v0", self.v0),
            ("mass", self.mass),
            ("rho0", self.rho0),
            ("omega_rho", self.omega_rho),
            ("k_rho", self.k_rho),
            ("phi_rho", self.phi_rho),
        ] {
            finite(name, v)?;
        }
        if self.separation < 0.0 {
            return Err(invalid("separation", "must be non-negative"));
        }
        if self.interrogation_time <= 0.0 {
            return Err(invalid("T", "must be positive"));
        }
        if self.k == 0.0 {
            return Err(invalid("k", "must be non-zero"));
        }
        if self.mass <= 0.0 {
            return Err(invalid("mass", "must be positive"));
        }
        Ok(())
    }

    pub fn recoil_velocity(&self, ctx: &PhysicalContext) -> f64 {
        ctx.hbar() * self.k / self.mass
    }

    /// Mean position of the two devices' upper branches at the middle pulse.
    pub fn mean_position(&self, ctx: &PhysicalContext) -> f64 {
        let t = self.interrogation_time;
        self.separation + self.v0 * t + 0.5 * self.recoil_velocity(ctx) * t
    }

    pub fn v_t(&self, ctx: &PhysicalContext) -> f64 {
        self.v0 + self.recoil_velocity(ctx)
    }

    /// `(c k T)^2`.
    fn phase_scale(&self, ctx: &PhysicalContext) -> f64 {
        let a = ctx.c() * self.k * self.interrogation_time;
        a * a
    }

    /// The common sinc-product envelope, without the `cos` of the field phase.
    fn envelope(&self, ctx: &PhysicalContext) -> f64 {
        let c = ctx.c();
        let t = self.interrogation_time;
        let omega = self.omega_rho;
        // (omega l / 2c)(1 - c k_rho / omega) and (omega T / 2)(1 - v k_rho / omega) without 1/omega
        let delay = self.separation * (omega - c * self.k_rho) / (2.0 * c);
        let first = 0.5 * t * (omega - self.v0 * self.k_rho);
        let second = 0.5 * t * (omega - self.v_t(ctx) * self.k_rho);
        2.0 * self.rho0 * (self.k_rho / self.k) * self.phase_scale(ctx) * delay.sin() * sinc(first) * sinc(second)
    }
}

/// Phase of one interferometer started at `start` from `z0` in the
/// oscillating field, `g = 0`.
pub fn dm_single_phase(pair: &DarkMatterPair, z0: f64, start: f64, ctx: &PhysicalContext) -> Result<f64> {
    pair.validate()?;
    let t = pair.interrogation_time;
    let k_rho = pair.k_rho;
    let v_r = pair.recoil_velocity(ctx);
    let alpha = pair.omega_rho - k_rho * pair.v0;
    let gamma = pair.omega_rho - k_rho * (pair.v0 + v_r);
    let field_phase =
        pair.omega_rho * t - k_rho * (z0 + pair.v0 * t + 0.5 * v_r * t) + pair.omega_rho * start + pair.phi_rho;
    Ok(-pair.rho0
        * (k_rho / pair.k)
        * pair.phase_scale(ctx)
        * field_phase.sin()
        * sinc(0.5 * alpha * t)
        * sinc(0.5 * gamma * t))
}

/// Upper minus lower interferometer phase.
pub fn dm_differential_phase(pair: &DarkMatterPair, ctx: &PhysicalContext) -> Result<f64> {
    pair.validate()?;
    let c = ctx.c();
    let field_phase = pair.omega_rho * pair.interrogation_time - pair.k_rho * pair.mean_position(ctx)
        + pair.omega_rho * pair.separation / (2.0 * c)
        + pair.phi_rho;
    Ok(-field_phase.cos() * pair.envelope(ctx))
}

/// Signed amplitude of [`dm_differential_phase`] over the unknown field phase.
pub fn dm_signal_amplitude_signed(pair: &DarkMatterPair, ctx: &PhysicalContext) -> Result<f64> {
    pair.validate()?;
    Ok(pair.envelope(ctx))
}

/// Standard deviation of the differential phase over the field phase, `>= 0`.
pub fn dm_signal_amplitude(pair: &DarkMatterPair, ctx: &PhysicalContext) -> Result<f64> {
    Ok(dm_signal_amplitude_signed(pair, ctx)?.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{HBAR, SPEED_OF_LIGHT};
    use proptest::prelude::*;

    const RUBIDIUM: f64 = 1.443_160_6e-25;

    fn mz_params(beta: f64) -> MzParams {
        MzParams {
            k: 1.6e7,
            interrogation_time: 0.5,
            z0: 0.0,
            v0: 2.0,
            mass: RUBIDIUM,
            beta,
        }
    }

    fn eep_pair() -> EepPair {
        EepPair {
            mass: RUBIDIUM,
            delta_mass: 0.0,
            k: 1.6e7,
            delta_k: 0.0,
            beta_a: 0.0,
            beta_b: 0.0,
            v0: 0.5,
            delta_v0: 0.0,
            z0: 0.0,
            delta_z0: 0.0,
        }
    }

    fn dm_pair() -> DarkMatterPair {
        DarkMatterPair {
            separation: 1e3,
            interrogation_time: 5.0,
            k: 1.6e7,
            v0: 0.0,
            mass: RUBIDIUM,
            rho0: 1e-20,
            omega_rho: 2.0,
            k_rho: 1e-6,
            phi_rho: 0.3,
            g: 0.0,
        }
    }

    #[test]
    fn gravimeter_limit() {
        let fast = PhysicalContext::terrestrial().with_c(SPEED_OF_LIGHT * 1e6).unwrap();
        let p = mz_params(0.0);
        let phi = single_phase(&p, &fast);
        let expected = -1.6e7 * 9.81 * 0.25;
        assert!(((phi - expected) / expected).abs() < 1e-13);
        let p = mz_params(3e-7);
        let phi = single_phase(&p, &fast);
        assert!(((phi - expected * (1.0 + 3e-7)) / expected).abs() < 1e-13);
    }

    #[test]
    fn single_phase_terms_sum() {
        let ctx = PhysicalContext::terrestrial();
        let terms = single_phase_terms(&mz_params(1e-9), &ctx);
        assert_eq!(terms.total(), single_phase(&mz_params(1e-9), &ctx));
        assert!(terms.fsl != 0.0 && terms.wave_vector_mod != 0.0);
    }

    #[test]
    fn gradiometer_cases() {
        let ctx = PhysicalContext::terrestrial();
        let ell = 1e-13 * SPEED_OF_LIGHT * SPEED_OF_LIGHT / 9.81;
        let pair = GradiometerPair {
            separation: ell,
            g: 9.81,
            delta_g: 0.0,
            interrogation_time: 1.0,
            k: 1.6e7,
            v0: 0.0,
            mass: RUBIDIUM,
        };
        let phi = gradiometer_phase(&pair, 0.0, &ctx).unwrap();
        assert!((phi / (1.6e7 * 9.81) - 1e-13).abs() < 1e-27);
        assert!((ell - 916.0).abs() < 1.0);
        let tiny = GradiometerPair {
            separation: 1e-300,
            ..pair
        };
        assert!(gradiometer_phase(&tiny, 0.0, &ctx).unwrap().abs() < 1e-290);
        let flat = GradiometerPair { g: 0.0, ..pair };
        assert!(gradiometer_phase(&flat, 0.0, &ctx).is_err());
    }

    #[test]
    fn gradiometer_redshift_independent_of_t_k_v0() {
        let ctx = PhysicalContext::terrestrial();
        let base = GradiometerPair {
            separation: 10.0,
            g: 9.81,
            delta_g: 0.0,
            interrogation_time: 1.0,
            k: 1.6e7,
            v0: 0.0,
            mass: RUBIDIUM,
        };
        let norm =
            |p: &GradiometerPair| gradiometer_phase(p, 0.0, &ctx).unwrap() / (p.k * p.g * p.interrogation_time.powi(2));
        let reference = norm(&base);
        for variant in [
            GradiometerPair {
                interrogation_time: 0.1,
                ..base
            },
            GradiometerPair { k: 3e6, ..base },
            GradiometerPair { v0: 4.0, ..base },
        ] {
            assert!((norm(&variant) - reference).abs() <= 1e-15 * reference.abs());
        }
    }

    #[test]
    fn gradiometer_matches_single_phase_difference() {
        let ctx = PhysicalContext::terrestrial();
        let (g, dg, t, k, v0, ell) = (9.81, 3e-6, 0.8, 1.6e7, 1.0, 5.0);
        let pair = GradiometerPair {
            separation: ell,
            g,
            delta_g: dg,
            interrogation_time: t,
            k,
            v0,
            mass: RUBIDIUM,
        };
        let beta = 0.0;
        let phi = gradiometer_phase(&pair, beta, &ctx).unwrap();
        // upper device at z0 = l sees g + dg/2, lower at z0 = 0 sees g - dg/2
        let at = |g_j: f64, z0: f64| {
            let c = ctx.with_g(g_j).unwrap();
            single_phase(
                &MzParams {
                    k,
                    interrogation_time: t,
                    z0,
                    v0,
                    mass: RUBIDIUM,
                    beta,
                },
                &c,
            )
        };
        let diff = at(g + 0.5 * dg, ell) - at(g - 0.5 * dg, 0.0);
        let leading = k * g * t * t * (dg / g);
        // agreement to the neglected cross terms (dg/g times 1/c corrections)
        assert!((phi - diff).abs() < 1e-6 * leading, "{phi:e} {diff:e}");
    }

    #[test]
    fn eep_identical_species() {
        let ctx = PhysicalContext::terrestrial();
        for d in [KickDirection::Up, KickDirection::Down] {
            assert_eq!(eep_theta(&eep_pair(), d, 9.81, 0.5, &ctx).unwrap(), 0.0);
        }
        assert_eq!(k_reversal(&eep_pair(), 9.81, 0.5, &ctx).unwrap(), 0.0);
    }

    #[test]
    fn eep_rejects_heavy_defect() {
        let ctx = PhysicalContext::terrestrial();
        let pair = EepPair {
            delta_mass: 2.0 * RUBIDIUM,
            ..eep_pair()
        };
        assert!(eep_theta(&pair, KickDirection::Up, 9.81, 0.5, &ctx).is_err());
        assert!(k_reversal(&pair, 9.81, 0.5, &ctx).is_err());
    }

    #[test]
    fn magic_clock_pair_dominated_by_delta_beta() {
        let ctx = PhysicalContext::terrestrial();
        let omega_c = RUBIDIUM * SPEED_OF_LIGHT * SPEED_OF_LIGHT / HBAR;
        let delta_mass = 1e-10 * omega_c * HBAR / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
        let pair = EepPair {
            delta_mass,
            beta_a: 0.0,
            beta_b: 1e-12,
            ..eep_pair()
        };
        let theta = eep_theta(&pair, KickDirection::Up, 9.81, 0.5, &ctx).unwrap();
        let v_r = HBAR * 1.6e7 / RUBIDIUM;
        let c = SPEED_OF_LIGHT;
        let expected = 1e-12 - pair.chi() * (v_r / c) * (3.0 - 1.5 * 9.81 * 0.5 / c + 0.5 / c) * 1e-10;
        assert!((theta - expected).abs() < 1e-25);
        assert!((theta - 1e-12).abs() < 1e-18);
    }

    #[test]
    fn two_species_fsl_scale() {
        let ctx = PhysicalContext::terrestrial();
        let dv = 2e-11 * SPEED_OF_LIGHT;
        let pair = EepPair {
            delta_v0: dv,
            v0: 0.0,
            ..eep_pair()
        };
        let fast = k_reversal(&pair, 0.0, 0.5, &ctx).unwrap();
        assert!((fast - 6e-11).abs() < 1e-24);
        let micro = EepPair {
            delta_v0: 1e-6,
            v0: 0.0,
            ..eep_pair()
        };
        let r = k_reversal(&micro, 0.0, 0.5, &ctx).unwrap();
        assert!((r / 3.0 - 1e-6 / SPEED_OF_LIGHT).abs() < 1e-28);
        assert!(r / 3.0 > 3e-15 && r / 3.0 < 4e-15);
    }

    #[test]
    fn dark_matter_limits() {
        let ctx = PhysicalContext::microgravity();
        let massless = DarkMatterPair {
            omega_rho: SPEED_OF_LIGHT * 1e-6,
            ..dm_pair()
        };
        assert_eq!(dm_signal_amplitude(&massless, &ctx).unwrap(), 0.0);
        assert_eq!(dm_differential_phase(&massless, &ctx).unwrap(), 0.0);
        let no_recoil = DarkMatterPair {
            k_rho: 0.0,
            ..dm_pair()
        };
        assert_eq!(dm_signal_amplitude(&no_recoil, &ctx).unwrap(), 0.0);
        let coincident = DarkMatterPair {
            separation: 0.0,
            ..dm_pair()
        };
        assert_eq!(dm_signal_amplitude(&coincident, &ctx).unwrap(), 0.0);
        let gravity = DarkMatterPair { g: 9.81, ..dm_pair() };
        assert!(dm_differential_phase(&gravity, &ctx).is_err());
        assert!(dm_signal_amplitude(&gravity, &ctx).is_err());
    }

    #[test]
    fn dark_matter_static_field_limit() {
        // omega = 0 must not divide by zero
        let ctx = PhysicalContext::microgravity();
        let pair = DarkMatterPair {
            omega_rho: 0.0,
            ..dm_pair()
        };
        assert!(dm_signal_amplitude(&pair, &ctx).unwrap().is_finite());
    }

    #[test]
    fn differential_is_difference_of_singles() {
        let ctx = PhysicalContext::microgravity();
        let pair = dm_pair();
        let ell = pair.separation;
        let lower = dm_single_phase(&pair, 0.5 * ell, 0.0, &ctx).unwrap();
        let upper = dm_single_phase(&pair, 1.5 * ell, ell / SPEED_OF_LIGHT, &ctx).unwrap();
        let diff = dm_differential_phase(&pair, &ctx).unwrap();
        let scale = dm_signal_amplitude(&pair, &ctx).unwrap();
        assert!(
            (upper - lower - diff).abs() < 1e-9 * scale,
            "{:e} {:e}",
            upper - lower,
            diff
        );
    }

    #[test]
    fn signed_and_absolute_amplitudes() {
        let ctx = PhysicalContext::microgravity();
        let pair = dm_pair();
        let s = dm_signal_amplitude_signed(&pair, &ctx).unwrap();
        assert_eq!(dm_signal_amplitude(&pair, &ctx).unwrap(), s.abs());
    }

    proptest! {
        #[test]
        fn k_reversal_identity(
            delta_beta in -1e-9f64..1e-9,
            delta_v0 in -1e-3f64..1e-3,
            delta_z0 in -1e-2f64..1e-2,
            delta_k in -1e5f64..1e5,
            defect in -0.5f64..0.5,
            v0 in -3.0f64..3.0,
            t in 0.01f64..2.0,
        ) {
            let ctx = PhysicalContext::terrestrial();
            let pair = EepPair {
                delta_mass: defect * RUBIDIUM,
                delta_k,
                beta_a: 0.0,
                beta_b: delta_beta,
                v0,
                delta_v0,
                delta_z0,
                ..eep_pair()
            };
            let up = eep_theta(&pair, KickDirection::Up, 9.81, t, &ctx).unwrap();
            let down = eep_theta(&pair, KickDirection::Down, 9.81, t, &ctx).unwrap();
            let closed = k_reversal(&pair, 9.81, t, &ctx).unwrap();
            let composed = 0.5 * (up - down);
            let scale = up.abs().max(down.abs());
            prop_assert!((composed - closed).abs() <= 1e-12 * closed.abs() + 4.0 * f64::EPSILON * scale);
        }

        #[test]
        fn differential_periodic_in_start_offset(phi in 0.0f64..6.3, omega in 0.1f64..10.0) {
            let ctx = PhysicalContext::microgravity();
            let pair = DarkMatterPair { omega_rho: omega, phi_rho: phi, ..dm_pair() };
            let shifted = DarkMatterPair { phi_rho: phi + omega * (std::f64::consts::TAU / omega), ..pair };
            let a = dm_differential_phase(&pair, &ctx).unwrap();
            let b = dm_differential_phase(&shifted, &ctx).unwrap();
            let scale = dm_signal_amplitude(&pair, &ctx).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * scale.max(1e-300));
        }
    }
}
