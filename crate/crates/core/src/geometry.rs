//! Light-pulse interferometer geometry: species, pulse tables and the
//! unperturbed branch trajectories.
//!
//! Each branch is stored as free fall plus a piecewise-linear recoil
//! displacement, `z(t) = z_ff(t) + d(t)`. Branch separations are then kick-only
//! quantities and closure of a balanced sequence is exact.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::context::PhysicalContext;
use crate::dilaton::DilatonParams;
use crate::error::{finite, invalid, Error, Result};

/// Closure tolerance relative to the characteristic recoil scales.
pub const CLOSURE_TOLERANCE: f64 = 1e-12;

/// Relative tolerance on equal pulse spacing when recognizing a Mach-Zehnder.
const SPACING_TOLERANCE: f64 = 1e-12;

/// Atomic species with its dilaton couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawSpecies", into = "RawSpecies")]
pub struct Species {
    mass: f64,
    beta: f64,
    rho0: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpecies {
    mass_kg: f64,
    #[serde(default)]
    beta: f64,
    #[serde(default)]
    rho0: f64,
}

impl TryFrom<RawSpecies> for Species {
    type Error = Error;

    fn try_from(raw: RawSpecies) -> Result<Self> {
        Species::new(raw.mass_kg, raw.beta, raw.rho0)
    }
}

impl From<Species> for RawSpecies {
    fn from(s: Species) -> Self {
        RawSpecies {
            mass_kg: s.mass,
            beta: s.beta,
            rho0: s.rho0,
        }
    }
}

impl Species {
    /// `beta` is the EEP-violation parameter, `rho0` the oscillating-dilaton coupling.
    pub fn new(mass: f64, beta: f64, rho0: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid("mass", format!("must be positive, got {mass}")));
        }
        finite("beta", beta)?;
        finite("rho0", rho0)?;
        Ok(Species { mass, beta, rho0 })
    }

    /// Species without any dilaton coupling.
    pub fn uncoupled(mass: f64) -> Result<Self> {
        Species::new(mass, 0.0, 0.0)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    /// `hbar k / m` [m/s].
    pub fn recoil_velocity(&self, k: f64, ctx: &PhysicalContext) -> f64 {
        ctx.hbar() * k / self.mass
    }
}

/// Instantaneous momentum transfer `hbar k` to each branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseEvent {
    #[serde(rename = "t_s")]
    pub time: f64,
    #[serde(rename = "k_upper_per_m")]
    pub kick_upper: f64,
    #[serde(rename = "k_lower_per_m")]
    pub kick_lower: f64,
    /// Laser phase imprinted on the kicked branch; carried along, zero by default.
    #[serde(rename = "laser_phase_rad", default)]
    pub laser_phase: f64,
}

impl PulseEvent {
    pub fn new(time: f64, kick_upper: f64, kick_lower: f64) -> Self {
        PulseEvent {
            time,
            kick_upper,
            kick_lower,
            laser_phase: 0.0,
        }
    }
}

/// Complete description of one interferometer.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSpec {
    species: Species,
    z0: f64,
    v0: f64,
    pulses: Vec<PulseEvent>,
    dilaton: DilatonParams,
    ctx: PhysicalContext,
}

impl InterferometerSpec {
    /// `z0`, `v0` are the state at the first pulse.
    pub fn new(
        species: Species,
        z0: f64,
        v0: f64,
        pulses: Vec<PulseEvent>,
        dilaton: DilatonParams,
        ctx: PhysicalContext,
    ) -> Result<Self> {
        finite("z0", z0)?;
        finite("v0", v0)?;
        if pulses.len() < 2 {
            return Err(invalid("pulses", format!("need at least 2, got {}", pulses.len())));
        }
        for p in &pulses {
            finite("pulse time", p.time)?;
            finite("kick", p.kick_upper)?;
            finite("kick", p.kick_lower)?;
            finite("laser phase", p.laser_phase)?;
        }
        if pulses.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(invalid("pulses", "times must be strictly increasing"));
        }
        Ok(InterferometerSpec {
            species,
            z0,
            v0,
            pulses,
            dilaton,
            ctx,
        })
    }

    pub fn species(&self) -> &Species {
        &self.species
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn pulses(&self) -> &[PulseEvent] {
        &self.pulses
    }

    pub fn dilaton(&self) -> &DilatonParams {
        &self.dilaton
    }

    pub fn ctx(&self) -> &PhysicalContext {
        &self.ctx
    }

    pub fn start_time(&self) -> f64 {
        self.pulses[0].time
    }

    pub fn end_time(&self) -> f64 {
        self.pulses[self.pulses.len() - 1].time
    }

    /// Same sequence with every pulse time shifted by `offset` [s].
    pub fn delayed(&self, offset: f64) -> Result<Self> {
        finite("offset", offset)?;
        let pulses = self
            .pulses
            .iter()
            .map(|p| PulseEvent {
                time: p.time + offset,
                ..*p
            })
            .collect();
        InterferometerSpec::new(self.species, self.z0, self.v0, pulses, self.dilaton, self.ctx)
    }

    /// Same sequence launched from another initial state.
    pub fn with_initial_state(&self, z0: f64, v0: f64) -> Result<Self> {
        InterferometerSpec::new(self.species, z0, v0, self.pulses.clone(), self.dilaton, self.ctx)
    }

    pub fn with_species(&self, species: Species) -> Self {
        InterferometerSpec {
            species,
            ..self.clone()
        }
    }

    pub fn with_dilaton(&self, dilaton: DilatonParams) -> Self {
        InterferometerSpec {
            dilaton,
            ..self.clone()
        }
    }

    pub fn with_ctx(&self, ctx: PhysicalContext) -> Self {
        InterferometerSpec { ctx, ..self.clone() }
    }

    pub const PULSE_CSV_HEADER: &'static str = "index,t_s,k_upper_per_m,k_lower_per_m,laser_phase_rad";

    /// Writes the pulse table as CSV.
    pub fn write_pulse_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::PULSE_CSV_HEADER)?;
        for (i, p) in self.pulses.iter().enumerate() {
            writeln!(
                out,
                "{i},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.time, p.kick_upper, p.kick_lower, p.laser_phase
            )?;
        }
        Ok(())
    }
}

/// Mach-Zehnder sequence with pulses at `0, T, 2T`.
///
/// Upper branch kicks `(+k, -k, 0)`, lower branch `(0, +k, -k)`.
pub fn mach_zehnder(
    interrogation_time: f64,
    k: f64,
    species: Species,
    z0: f64,
    v0: f64,
    dilaton: DilatonParams,
    ctx: PhysicalContext,
) -> Result<InterferometerSpec> {
    if !(interrogation_time.is_finite() && interrogation_time > 0.0) {
        return Err(invalid("T", format!("must be positive, got {interrogation_time}")));
    }
    finite("k", k)?;
    if k == 0.0 {
        return Err(invalid("k", "must be non-zero"));
    }
    let t = interrogation_time;
    let pulses = vec![
        PulseEvent::new(0.0, k, 0.0),
        PulseEvent::new(t, -k, k),
        PulseEvent::new(2.0 * t, 0.0, -k),
    ];
    InterferometerSpec::new(species, z0, v0, pulses, dilaton, ctx)
}

/// Parameters of a recognized Mach-Zehnder pulse pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachZehnderShape {
    pub start: f64,
    pub interrogation_time: f64,
    pub k: f64,
}

/// Recognizes the three-pulse Mach-Zehnder kick table, at any start time.
pub fn as_mach_zehnder(spec: &InterferometerSpec) -> Option<MachZehnderShape> {
    let p = spec.pulses();
    if p.len() != 3 {
        return None;
    }
    let k = p[0].kick_upper;
    let kicks_match = k != 0.0
        && p[0].kick_lower == 0.0
        && p[1].kick_upper == -k
        && p[1].kick_lower == k
        && p[2].kick_upper == 0.0
        && p[2].kick_lower == -k;
    let first = p[1].time - p[0].time;
    let second = p[2].time - p[1].time;
    let evenly_spaced = (first - second).abs() <= SPACING_TOLERANCE * first.max(second);
    (kicks_match && evenly_spaced).then_some(MachZehnderShape {
        start: p[0].time,
        interrogation_time: 0.5 * (p[2].time - p[0].time),
        k,
    })
}

/// Which arm of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Upper,
    Lower,
}

/// Recoil state between two consecutive pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoilSegment {
    pub start: f64,
    pub end: f64,
    /// Recoil displacement at `start` [m].
    pub displacement: f64,
    /// Accumulated recoil velocity on `(start, end]` [m/s].
    pub velocity: f64,
}

/// Parabola `z(t) = z_start + v_start (t - start) - g (t - start)^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicSegment {
    pub start: f64,
    pub end: f64,
    pub z_start: f64,
    pub v_start: f64,
}

/// Unperturbed classical path of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTrajectory {
    z0: f64,
    v0: f64,
    g: f64,
    segments: Vec<RecoilSegment>,
    final_recoil_velocity: f64,
}

impl BranchTrajectory {
    fn build(spec: &InterferometerSpec, branch: Branch) -> Self {
        let pulses = spec.pulses();
        let ctx = spec.ctx();
        let mut segments = Vec::with_capacity(pulses.len() - 1);
        let mut displacement = 0.0;
        let mut velocity = 0.0;
        for pair in pulses.windows(2) {
            let kick = match branch {
                Branch::Upper => pair[0].kick_upper,
                Branch::Lower => pair[0].kick_lower,
            };
            velocity += spec.species().recoil_velocity(kick, ctx);
            segments.push(RecoilSegment {
                start: pair[0].time,
                end: pair[1].time,
                displacement,
                velocity,
            });
            displacement += velocity * (pair[1].time - pair[0].time);
        }
        let last = pulses[pulses.len() - 1];
        let last_kick = match branch {
            Branch::Upper => last.kick_upper,
            Branch::Lower => last.kick_lower,
        };
        BranchTrajectory {
            z0: spec.z0(),
            v0: spec.v0(),
            g: ctx.g(),
            segments,
            final_recoil_velocity: velocity + spec.species().recoil_velocity(last_kick, ctx),
        }
    }

    pub fn start_time(&self) -> f64 {
        self.segments[0].start
    }

    pub fn end_time(&self) -> f64 {
        self.segments[self.segments.len() - 1].end
    }

    pub fn recoil_segments(&self) -> &[RecoilSegment] {
        &self.segments
    }

    /// Segment containing `t`; a pulse time belongs to the segment that ends there.
    fn segment(&self, t: f64) -> Result<&RecoilSegment> {
        let (start, end) = (self.start_time(), self.end_time());
        if !(t >= start && t <= end) {
            return Err(Error::OutsideTimeDomain { t, start, end });
        }
        if t == start {
            return Ok(&self.segments[0]);
        }
        let index = self.segments.partition_point(|s| s.end < t);
        Ok(&self.segments[index])
    }

    /// Free-fall position from the initial state, without recoils.
    pub fn free_fall_position(&self, t: f64) -> f64 {
        let tau = t - self.start_time();
        self.z0 + self.v0 * tau - 0.5 * self.g * tau * tau
    }

    /// Recoil displacement and pre-kick recoil velocity at `t`.
    pub fn recoil(&self, t: f64) -> Result<(f64, f64)> {
        let s = self.segment(t)?;
        if t == self.start_time() {
            return Ok((0.0, 0.0));
        }
        Ok((s.displacement + s.velocity * (t - s.start), s.velocity))
    }

    /// `z(t)` [m].
    pub fn position(&self, t: f64) -> Result<f64> {
        let (d, _) = self.recoil(t)?;
        Ok(self.free_fall_position(t) + d)
    }

    /// `v(t)` [m/s]; at a pulse time the pre-kick value.
    pub fn velocity(&self, t: f64) -> Result<f64> {
        let (_, u) = self.recoil(t)?;
        Ok(self.v0 - self.g * (t - self.start_time()) + u)
    }

    /// Recoil displacement after the last pulse (continuous, so the same as before it).
    pub fn final_recoil_displacement(&self) -> f64 {
        let s = &self.segments[self.segments.len() - 1];
        s.displacement + s.velocity * (s.end - s.start)
    }

    /// Recoil velocity after every kick, including the last one.
    pub fn final_recoil_velocity(&self) -> f64 {
        self.final_recoil_velocity
    }

    /// Velocity just after the last pulse.
    pub fn final_velocity(&self) -> f64 {
        self.v0 - self.g * (self.end_time() - self.start_time()) + self.final_recoil_velocity
    }

    /// The path as explicit parabolic pieces.
    pub fn parabolic_segments(&self) -> Vec<ParabolicSegment> {
        self.segments
            .iter()
            .map(|s| ParabolicSegment {
                start: s.start,
                end: s.end,
                z_start: self.free_fall_position(s.start) + s.displacement,
                v_start: self.v0 - self.g * (s.start - self.start_time()) + s.velocity,
            })
            .collect()
    }
}

/// `(upper, lower)` branch trajectories.
pub fn trajectories(spec: &InterferometerSpec) -> (BranchTrajectory, BranchTrajectory) {
    (
        BranchTrajectory::build(spec, Branch::Upper),
        BranchTrajectory::build(spec, Branch::Lower),
    )
}

/// Final-time branch differences `(z_u - z_l, v_u - v_l)` after the last pulse.
pub fn closure_check(spec: &InterferometerSpec) -> (f64, f64) {
    let (upper, lower) = trajectories(spec);
    (
        upper.final_recoil_displacement() - lower.final_recoil_displacement(),
        upper.final_recoil_velocity() - lower.final_recoil_velocity(),
    )
}

/// Errors unless both closure differences are within [`CLOSURE_TOLERANCE`]
/// of the largest recoil velocity (and that velocity times the duration).
pub fn ensure_closed(spec: &InterferometerSpec) -> Result<()> {
    let (dz, dv) = closure_check(spec);
    let velocity_scale = spec
        .pulses()
        .iter()
        .flat_map(|p| [p.kick_upper, p.kick_lower])
        .map(|k| spec.species().recoil_velocity(k, spec.ctx()).abs())
        .fold(0.0, f64::max);
    let length_scale = velocity_scale * (spec.end_time() - spec.start_time());
    if dz.abs() > CLOSURE_TOLERANCE * length_scale || dv.abs() > CLOSURE_TOLERANCE * velocity_scale {
        return Err(Error::NotClosed { dz, dv });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::HBAR;
    use proptest::prelude::*;

    const RUBIDIUM: f64 = 1.443_160_6e-25;

    fn mz(t: f64, k: f64, z0: f64, v0: f64, g: f64) -> InterferometerSpec {
        let ctx = PhysicalContext::terrestrial().with_g(g).unwrap();
        let species = Species::uncoupled(RUBIDIUM).unwrap();
        mach_zehnder(t, k, species, z0, v0, DilatonParams::none(), ctx).unwrap()
    }

    /// Symplectic Euler with kicks applied at integer step indices.
    fn symplectic_euler(spec: &InterferometerSpec, branch: Branch, steps_per_span: usize, probe: f64) -> f64 {
        let start = spec.start_time();
        let span = spec.end_time() - start;
        let dt = span / steps_per_span as f64;
        let kick_steps: Vec<(usize, f64)> = spec
            .pulses()
            .iter()
            .map(|p| {
                let k = match branch {
                    Branch::Upper => p.kick_upper,
                    Branch::Lower => p.kick_lower,
                };
                (((p.time - start) / dt).round() as usize, k)
            })
            .collect();
        let probe_step = ((probe - start) / dt).round() as usize;
        let (mut z, mut v) = (spec.z0(), spec.v0());
        let g = spec.ctx().g();
        for step in 0..probe_step {
            for &(index, k) in &kick_steps {
                if index == step {
                    v += spec.species().recoil_velocity(k, spec.ctx());
                }
            }
            v -= g * dt;
            z += v * dt;
        }
        z
    }

    #[test]
    fn mach_zehnder_shape() {
        let spec = mz(0.5, 1.6e7, 0.0, 0.0, 9.81);
        assert_eq!(spec.pulses().len(), 3);
        assert_eq!(closure_check(&spec), (0.0, 0.0));
        ensure_closed(&spec).unwrap();
        let shape = as_mach_zehnder(&spec).unwrap();
        assert_eq!(shape.interrogation_time, 0.5);
        assert_eq!(shape.k, 1.6e7);
        let delayed = spec.delayed(3.0).unwrap();
        assert_eq!(as_mach_zehnder(&delayed).unwrap().start, 3.0);
    }

    #[test]
    fn mach_zehnder_rejects_bad_input() {
        let ctx = PhysicalContext::terrestrial();
        let s = Species::uncoupled(RUBIDIUM).unwrap();
        let none = DilatonParams::none();
        assert!(mach_zehnder(0.0, 1.0, s, 0.0, 0.0, none, ctx).is_err());
        assert!(mach_zehnder(-1.0, 1.0, s, 0.0, 0.0, none, ctx).is_err());
        assert!(mach_zehnder(1.0, 0.0, s, 0.0, 0.0, none, ctx).is_err());
        assert!(Species::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn spec_rejects_unordered_pulses() {
        let ctx = PhysicalContext::terrestrial();
        let s = Species::uncoupled(RUBIDIUM).unwrap();
        let pulses = vec![PulseEvent::new(1.0, 1.0, 0.0), PulseEvent::new(1.0, 0.0, 1.0)];
        assert!(InterferometerSpec::new(s, 0.0, 0.0, pulses, DilatonParams::none(), ctx).is_err());
        let single = vec![PulseEvent::new(0.0, 1.0, 0.0)];
        assert!(InterferometerSpec::new(s, 0.0, 0.0, single, DilatonParams::none(), ctx).is_err());
    }

    #[test]
    fn separation_at_middle_pulse() {
        let species = Species::uncoupled(1.44e-25).unwrap();
        let ctx = PhysicalContext::terrestrial();
        let spec = mach_zehnder(1.0, 1.6e7, species, 0.0, 0.0, DilatonParams::none(), ctx).unwrap();
        let (u, l) = trajectories(&spec);
        let sep = u.position(1.0).unwrap() - l.position(1.0).unwrap();
        let expected = HBAR * 1.6e7 * 1.0 / 1.44e-25;
        assert!((sep - expected).abs() < 1e-15);
        assert!((sep - 1.17e-2).abs() < 1e-4);
    }

    #[test]
    fn mirror_geometry_negates_separation() {
        let a = mz(0.3, 2e7, 1.0, 0.2, 9.81);
        let b = mz(0.3, -2e7, 1.0, 0.2, 9.81);
        let (ua, la) = trajectories(&a);
        let (ub, lb) = trajectories(&b);
        for &t in &[0.1, 0.3, 0.45, 0.6] {
            let sa = ua.position(t).unwrap() - la.position(t).unwrap();
            let sb = ub.position(t).unwrap() - lb.position(t).unwrap();
            assert_eq!(sa, -sb);
        }
    }

    #[test]
    fn upper_branch_kinematics() {
        let spec = mz(0.2, 1e7, 0.0, 0.0, 0.0);
        let (u, _) = trajectories(&spec);
        let vr = HBAR * 1e7 / RUBIDIUM;
        assert_eq!(u.position(0.1).unwrap(), vr * 0.1);

        let (z0, v0, g, t) = (0.4, 1.3, 9.81, 0.25);
        let spec = mz(t, 1.6e7, z0, v0, g);
        let (u, _) = trajectories(&spec);
        let vr = HBAR * 1.6e7 / RUBIDIUM;
        let z_t = z0 + v0 * t - 0.5 * g * t * t + vr * t;
        assert!((u.position(t).unwrap() - z_t).abs() < 1e-15);
        // pre-kick velocity at the middle pulse
        assert!((u.velocity(t).unwrap() - (v0 - g * t + vr)).abs() < 1e-15);
        assert!((u.velocity(t + 1e-9).unwrap() - (v0 - g * (t + 1e-9))).abs() < 1e-12);
    }

    #[test]
    fn outside_domain_is_error() {
        let spec = mz(0.2, 1e7, 0.0, 0.0, 9.81);
        let (u, _) = trajectories(&spec);
        assert!(matches!(u.position(-1e-9), Err(Error::OutsideTimeDomain { .. })));
        assert!(u.position(0.4 + 1e-9).is_err());
        assert!(u.position(f64::NAN).is_err());
        assert!(u.position(0.4).is_ok());
    }

    #[test]
    fn perturbed_middle_kick_opens_interferometer() {
        let base = mz(0.2, 1e7, 0.0, 0.0, 9.81);
        let mut pulses = base.pulses().to_vec();
        pulses[1].kick_upper = -0.9e7;
        let spec =
            InterferometerSpec::new(*base.species(), 0.0, 0.0, pulses, DilatonParams::none(), *base.ctx()).unwrap();
        let (_, dv) = closure_check(&spec);
        let expected = 0.1 * HBAR * 1e7 / RUBIDIUM;
        assert!((dv - expected).abs() < 1e-12 * expected);
        assert!(matches!(ensure_closed(&spec), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn balanced_four_pulse_sequence_closes() {
        // Ramsey-Borde type: solve the two closure constraints for the last two lower kicks
        let times = [0.0, 0.1, 0.35, 0.45];
        let upper = [1.3e7, -1.3e7, 0.0, 0.0];
        let lower_first = [0.0, 0.0];
        // sum_n k_n = 0 and sum_n k_n (t_end - t_n) = 0 for the lower-minus-upper difference
        let end = times[3];
        let target_sum: f64 = upper.iter().sum::<f64>() - lower_first.iter().sum::<f64>();
        let target_moment: f64 = upper.iter().zip(times).map(|(k, t)| k * (end - t)).sum::<f64>()
            - lower_first.iter().zip(times).map(|(k, t)| k * (end - t)).sum::<f64>();
        // unknowns a (at t2), b (at t3): a + b = target_sum, a (end - t2) = target_moment
        let a = target_moment / (end - times[2]);
        let b = target_sum - a;
        let lower = [0.0, 0.0, a, b];
        let pulses = (0..4).map(|i| PulseEvent::new(times[i], upper[i], lower[i])).collect();
        let spec = InterferometerSpec::new(
            Species::uncoupled(RUBIDIUM).unwrap(),
            0.0,
            0.0,
            pulses,
            DilatonParams::none(),
            PhysicalContext::terrestrial(),
        )
        .unwrap();
        ensure_closed(&spec).unwrap();
        assert!(as_mach_zehnder(&spec).is_none());
    }

    #[test]
    fn parabolic_segments_are_continuous() {
        let spec = mz(0.3, 1.6e7, 0.2, 0.5, 9.81);
        let (u, l) = trajectories(&spec);
        for branch in [&u, &l] {
            let segs = branch.parabolic_segments();
            for pair in segs.windows(2) {
                let dt = pair[0].end - pair[0].start;
                let end_z = pair[0].z_start + pair[0].v_start * dt - 0.5 * 9.81 * dt * dt;
                assert!((end_z - pair[1].z_start).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pulse_csv() {
        let spec = mz(0.3, 1.6e7, 0.2, 0.5, 9.81);
        let mut buf = Vec::new();
        spec.write_pulse_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with(InterferometerSpec::PULSE_CSV_HEADER));
    }

    #[test]
    fn species_serde_round_trip() {
        let s: Species = serde_json::from_str(r#"{"mass_kg": 1.4e-25, "beta": 1e-9}"#).unwrap();
        assert_eq!(s.rho0(), 0.0);
        let back: Species = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Species>(r#"{"mass_kg": -1.0}"#).is_err());
        assert!(serde_json::from_str::<Species>(r#"{"mass_kg": 1.0, "extra": 2}"#).is_err());
    }

    #[test]
    fn matches_symplectic_euler() {
        let spec = mz(0.2, 1.6e7, 0.3, 1.1, 9.81);
        let (u, l) = trajectories(&spec);
        let steps = 2_000_000;
        let span = 0.4;
        let vr = HBAR * 1.6e7 / RUBIDIUM;
        let extent = 0.3 + 1.1 * span + 9.81 * span * span + vr * span;
        for &probe in &[0.1, 0.3] {
            for (traj, branch) in [(&u, Branch::Upper), (&l, Branch::Lower)] {
                let numeric = symplectic_euler(&spec, branch, steps, probe);
                let exact = traj.position(probe).unwrap();
                assert!((numeric - exact).abs() / extent < 1e-6, "{probe} {branch:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn mach_zehnder_always_closes(t in 1e-3f64..5.0, k in -3e7f64..3e7, z0 in -10.0f64..10.0, v0 in -5.0f64..5.0, g in 0.0f64..20.0) {
            prop_assume!(k != 0.0);
            let spec = mz(t, k, z0, v0, g);
            prop_assert_eq!(closure_check(&spec), (0.0, 0.0));
        }

        #[test]
        fn kick_bookkeeping(t in 1e-3f64..5.0, k in 1e5f64..3e7, v0 in -5.0f64..5.0, g in 0.0f64..20.0) {
            let spec = mz(t, k, 0.0, v0, g);
            let (u, l) = trajectories(&spec);
            for (traj, kicks) in [(&u, [k, -k, 0.0]), (&l, [0.0, k, -k])] {
                let expected = v0 - g * 2.0 * t + HBAR / RUBIDIUM * kicks.iter().sum::<f64>();
                prop_assert!((traj.final_velocity() - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
            }
        }

        #[test]
        fn separation_independent_of_initial_state_and_gravity(
            t in 1e-3f64..2.0, k in 1e5f64..3e7, z0 in -10.0f64..10.0, v0 in -5.0f64..5.0, g in 0.0f64..20.0, frac in 0.0f64..1.0,
        ) {
            let probe = 2.0 * t * frac;
            let (u, l) = trajectories(&mz(t, k, z0, v0, g));
            let (u0, l0) = trajectories(&mz(t, k, 0.0, 0.0, 0.0));
            let sep = u.recoil(probe).unwrap().0 - l.recoil(probe).unwrap().0;
            let sep0 = u0.recoil(probe).unwrap().0 - l0.recoil(probe).unwrap().0;
            prop_assert_eq!(sep, sep0);
            let full = u.position(probe).unwrap() - l.position(probe).unwrap();
            prop_assert!((full - sep0).abs() <= 1e-12 * (z0.abs() + v0.abs() * 2.0 * t + g * 4.0 * t * t + 1.0));
        }
    }
}
