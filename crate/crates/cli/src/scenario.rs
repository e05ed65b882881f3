//! Per-point evaluation of the sweepable scenarios.
//!
//! Each row is the full parameter table followed by engine values, closed-form
//! values and their relative deviations.

use dilaton_interferometry::closed_forms::{
    dm_differential_phase, dm_signal_amplitude, dm_single_phase, eep_theta, gradiometer_phase, k_reversal,
    single_phase_terms, DarkMatterPair, EepPair, GradiometerPair, KickDirection, MzParams, PairMember,
};
use dilaton_interferometry::geometry::{mach_zehnder, InterferometerSpec, Species};
use dilaton_interferometry::phase_engine::{total_phase, PerturbationTerm};
use dilaton_interferometry::special::relative_deviation;
use dilaton_interferometry::{DilatonParams, PhysicalContext};

use crate::error::CliResult;
use crate::params::{ParamSet, Scenario};

/// Denominator floor for relative deviations [rad].
const DEVIATION_FLOOR: f64 = 1e-30;

/// Terms evaluated for closed-form comparisons, without the oscillating coupling.
const STATIC_TERMS: [PerturbationTerm; 3] = [
    PerturbationTerm::WaveVectorMod,
    PerturbationTerm::DilatonLinear,
    PerturbationTerm::Fsl,
];

pub fn context(p: &ParamSet) -> CliResult<PhysicalContext> {
    Ok(PhysicalContext::new(
        p.get("c_m_per_s"),
        p.get("hbar_J_s"),
        p.get("g_m_per_s2"),
    )?)
}

/// Output column names following the parameter columns.
pub fn output_columns(scenario: Scenario) -> Vec<String> {
    let names: &[&str] = match scenario {
        Scenario::Phase => &[
            "phi0_rad",
            "wave_vector_mod_rad",
            "dilaton_linear_rad",
            "dilaton_oscillation_rad",
            "fsl_rad",
            "total_rad",
            "closed_gravimeter_rad",
            "closed_wave_vector_mod_rad",
            "closed_dilaton_linear_rad",
            "closed_dilaton_oscillation_rad",
            "closed_fsl_rad",
            "closed_total_rad",
            "rel_dev_phi0",
            "rel_dev_wave_vector_mod",
            "rel_dev_dilaton_linear",
            "rel_dev_dilaton_oscillation",
            "rel_dev_fsl",
            "rel_dev_total",
        ],
        Scenario::Gradiometer => &[
            "engine_upper_rad",
            "engine_lower_rad",
            "engine_differential_rad",
            "closed_differential_rad",
            "rel_dev_differential",
        ],
        Scenario::Eep => &[
            "theta_k",
            "theta_minus_k",
            "closed_k_reversal",
            "engine_theta_k",
            "engine_theta_minus_k",
            "engine_k_reversal",
            "rel_dev_theta_k",
            "rel_dev_theta_minus_k",
            "rel_dev_k_reversal",
        ],
        Scenario::DarkMatter => &[
            "engine_lower_rad",
            "engine_upper_rad",
            "engine_differential_rad",
            "closed_differential_rad",
            "signal_amplitude_rad",
            "rel_dev_differential",
        ],
        Scenario::OpticsGrid | Scenario::Validate => &[],
    };
    names.iter().map(|s| s.to_string()).collect()
}

pub fn header(scenario: Scenario) -> Vec<String> {
    let mut names: Vec<String> = ParamSet::defaults(scenario)
        .names()
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.extend(output_columns(scenario));
    names
}

/// Output values for one parameter point, in [`output_columns`] order.
pub fn evaluate(scenario: Scenario, p: &ParamSet) -> CliResult<Vec<f64>> {
    match scenario {
        Scenario::Phase => phase(p),
        Scenario::Gradiometer => gradiometer(p),
        Scenario::Eep => eep(p),
        Scenario::DarkMatter => dark_matter(p),
        Scenario::OpticsGrid | Scenario::Validate => {
            unreachable!("{scenario} is not evaluated point by point")
        }
    }
}

fn deviation(engine: f64, closed: f64) -> f64 {
    relative_deviation(engine, closed, DEVIATION_FLOOR)
}

fn phase(p: &ParamSet) -> CliResult<Vec<f64>> {
    let ctx = context(p)?;
    let (t, k, z0, v0, start) = (
        p.get("T_s"),
        p.get("k_per_m"),
        p.get("z0_m"),
        p.get("v0_m_per_s"),
        p.get("t0_s"),
    );
    let (mass, beta, rho0) = (p.get("mass_kg"), p.get("beta"), p.get("rho0"));
    let (k_rho, omega, phi) = (p.get("k_rho_per_m"), p.get("omega_rho_rad_per_s"), p.get("phi_rho_rad"));
    let dilaton = DilatonParams::new(0.0, k_rho, omega, phi, f64::INFINITY, 0.0, 0.0)?;
    let species = Species::new(mass, beta, rho0)?;
    let spec = mach_zehnder(t, k, species, z0, v0, dilaton, ctx)?.delayed(start)?;
    let engine = total_phase(&spec, &PerturbationTerm::ALL)?;
    let term = |kind| engine.term(kind).unwrap_or(0.0);

    let closed = single_phase_terms(
        &MzParams {
            k,
            interrogation_time: t,
            z0,
            v0,
            mass,
            beta,
        },
        &ctx,
    );
    let closed_oscillation = if rho0 == 0.0 {
        0.0
    } else if ctx.g() == 0.0 {
        let pair = DarkMatterPair {
            separation: 0.0,
            interrogation_time: t,
            k,
            v0,
            mass,
            rho0,
            omega_rho: omega,
            k_rho,
            phi_rho: phi,
            g: 0.0,
        };
        dm_single_phase(&pair, z0, start, &ctx)?
    } else {
        // no closed form in gravity
        f64::NAN
    };
    let closed_total = closed.total() + closed_oscillation;

    let engine_values = [
        engine.phi0,
        term(PerturbationTerm::WaveVectorMod),
        term(PerturbationTerm::DilatonLinear),
        term(PerturbationTerm::DilatonOscillation),
        engine.phi_fsl,
        engine.total,
    ];
    let closed_values = [
        closed.gravimeter,
        closed.wave_vector_mod,
        closed.dilaton_linear,
        closed_oscillation,
        closed.fsl,
        closed_total,
    ];
    let mut row = engine_values.to_vec();
    row.extend(closed_values);
    row.extend(engine_values.iter().zip(&closed_values).map(|(e, c)| deviation(*e, *c)));
    Ok(row)
}

/// Full first-order Mach-Zehnder phase without the oscillating coupling.
fn engine_static_phase(spec: &InterferometerSpec) -> CliResult<f64> {
    Ok(total_phase(spec, &STATIC_TERMS)?.total)
}

fn gradiometer(p: &ParamSet) -> CliResult<Vec<f64>> {
    let base = context(p)?;
    let pair = GradiometerPair {
        separation: p.get("separation_m"),
        g: p.get("g_m_per_s2"),
        delta_g: p.get("delta_g_m_per_s2"),
        interrogation_time: p.get("T_s"),
        k: p.get("k_per_m"),
        v0: p.get("v0_m_per_s"),
        mass: p.get("mass_kg"),
    };
    let beta = p.get("beta");
    let closed = gradiometer_phase(&pair, beta, &base)?;
    let species = Species::new(pair.mass, beta, 0.0)?;
    let device = |g: f64, z0: f64| -> CliResult<f64> {
        let ctx = base.with_g(g)?;
        let spec = mach_zehnder(
            pair.interrogation_time,
            pair.k,
            species,
            z0,
            pair.v0,
            DilatonParams::none(),
            ctx,
        )?;
        engine_static_phase(&spec)
    };
    let z0 = p.get("z0_m");
    let upper = device(pair.g + 0.5 * pair.delta_g, z0 + pair.separation)?;
    let lower = device(pair.g - 0.5 * pair.delta_g, z0)?;
    let differential = upper - lower;
    Ok(vec![
        upper,
        lower,
        differential,
        closed,
        deviation(differential, closed),
    ])
}

fn eep(p: &ParamSet) -> CliResult<Vec<f64>> {
    let ctx = context(p)?;
    let pair = EepPair {
        mass: p.get("mass_kg"),
        delta_mass: p.get("delta_mass_kg"),
        k: p.get("k_per_m"),
        delta_k: p.get("delta_k_per_m"),
        beta_a: p.get("beta_a"),
        beta_b: p.get("beta_b"),
        v0: p.get("v0_m_per_s"),
        delta_v0: p.get("delta_v0_m_per_s"),
        z0: p.get("z0_m"),
        delta_z0: p.get("delta_z0_m"),
    };
    let (g, t) = (ctx.g(), p.get("T_s"));
    let theta_up = eep_theta(&pair, KickDirection::Up, g, t, &ctx)?;
    let theta_down = eep_theta(&pair, KickDirection::Down, g, t, &ctx)?;
    let closed_reversal = k_reversal(&pair, g, t, &ctx)?;
    if g == 0.0 {
        return Err(crate::error::CliError::Precondition(
            "the eep phases are normalized by g T^2, so g must be non-zero".into(),
        ));
    }
    let engine_theta = |direction: KickDirection| -> CliResult<f64> {
        let mut theta = 0.0;
        for (member, sign) in [(PairMember::A, 1.0), (PairMember::B, -1.0)] {
            let beta = match member {
                PairMember::A => pair.beta_a,
                PairMember::B => pair.beta_b,
            };
            let species = Species::new(pair.member_mass(member), beta, 0.0)?;
            let k = direction.sign() * pair.member_kick(member);
            let spec = mach_zehnder(
                t,
                k,
                species,
                pair.initial_position(member),
                pair.initial_velocity(member),
                DilatonParams::none(),
                ctx,
            )?;
            theta += sign * engine_static_phase(&spec)? / (k.abs() * g * t * t);
        }
        Ok(theta)
    };
    let engine_up = engine_theta(KickDirection::Up)?;
    let engine_down = engine_theta(KickDirection::Down)?;
    let engine_reversal = 0.5 * (engine_up - engine_down);
    Ok(vec![
        theta_up,
        theta_down,
        closed_reversal,
        engine_up,
        engine_down,
        engine_reversal,
        deviation(engine_up, theta_up),
        deviation(engine_down, theta_down),
        deviation(engine_reversal, closed_reversal),
    ])
}

/// Lower device centered on `z0 = l/2` at `t = 0`, upper on `3l/2` started `l/c` later.
fn dark_matter(p: &ParamSet) -> CliResult<Vec<f64>> {
    let ctx = context(p)?;
    let pair = DarkMatterPair {
        separation: p.get("separation_m"),
        interrogation_time: p.get("T_s"),
        k: p.get("k_per_m"),
        v0: p.get("v0_m_per_s"),
        mass: p.get("mass_kg"),
        rho0: p.get("rho0"),
        omega_rho: p.get("omega_rho_rad_per_s"),
        k_rho: p.get("k_rho_per_m"),
        phi_rho: p.get("phi_rho_rad"),
        g: ctx.g(),
    };
    let closed = dm_differential_phase(&pair, &ctx)?;
    let amplitude = dm_signal_amplitude(&pair, &ctx)?;
    let dilaton = DilatonParams::new(0.0, pair.k_rho, pair.omega_rho, pair.phi_rho, f64::INFINITY, 0.0, 0.0)?;
    let species = Species::new(pair.mass, 0.0, pair.rho0)?;
    let device = |z0: f64, start: f64| -> CliResult<f64> {
        let spec = mach_zehnder(pair.interrogation_time, pair.k, species, z0, pair.v0, dilaton, ctx)?.delayed(start)?;
        Ok(total_phase(&spec, &[PerturbationTerm::DilatonOscillation])?
            .term(PerturbationTerm::DilatonOscillation)
            .unwrap_or(0.0))
    };
    let ell = pair.separation;
    let lower = device(0.5 * ell, 0.0)?;
    let upper = device(1.5 * ell, ell / ctx.c())?;
    let differential = upper - lower;
    Ok(vec![
        lower,
        upper,
        differential,
        closed,
        amplitude,
        deviation(differential, closed),
    ])
}
