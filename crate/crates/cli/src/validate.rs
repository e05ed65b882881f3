//! Validation suite: random Mach-Zehnder draws, each term evaluated by the
//! phase engine, the closed forms and the numerical oracle.

use std::io::Write;

use dilaton_interferometry::closed_forms::{dm_single_phase, single_phase_terms, DarkMatterPair, MzParams};
use dilaton_interferometry::geometry::{mach_zehnder, InterferometerSpec, Species};
use dilaton_interferometry::oracle::{
    pulse_sum_phi0, pulse_sum_wave_vector_mod, quad_term_phase, secant_fsl_phase, Quadrature, QuadratureConfig,
};
use dilaton_interferometry::phase_engine::{fsl_phase, phi0, term_phase, PerturbationTerm};
use dilaton_interferometry::special::relative_deviation;
use dilaton_interferometry::{DilatonParams, PhysicalContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::output::format_number;
use crate::params::ParamSet;

pub const REPORT_HEADER: &str = "draw,seed,T_s,k_per_m,mass_kg,beta,rho0,z0_m,v0_m_per_s,g_m_per_s2,\
k_rho_per_m,omega_rho_rad_per_s,phi_rho_rad,term,engine_rad,closed_rad,oracle_rad,oracle_error_rad,\
rel_dev_engine_closed,rel_dev_engine_oracle,pass";

/// Parameters of one random draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub index: usize,
    pub interrogation_time: f64,
    pub k: f64,
    pub mass: f64,
    pub beta: f64,
    pub rho0: f64,
    pub z0: f64,
    pub v0: f64,
    pub g: f64,
    pub k_rho: f64,
    pub omega_rho: f64,
    pub phi_rho: f64,
}

/// One term of one draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub draw: Draw,
    pub term: &'static str,
    pub engine: f64,
    pub closed: f64,
    pub oracle: Quadrature,
    pub engine_closed: f64,
    pub engine_oracle: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs_floor: f64,
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Draws alternate between `g = 0` and `g = 9.81 m/s^2`. The oscillating
/// coupling is switched on only in microgravity, where a closed form exists.
pub fn draws(count: usize, seed: u64) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|index| {
            let free = index % 2 == 0;
            let omega_rho = log_uniform(&mut rng, 1e-2, 1e2);
            Draw {
                index,
                interrogation_time: log_uniform(&mut rng, 1e-3, 10.0),
                k: log_uniform(&mut rng, 1e5, 1e8),
                mass: log_uniform(&mut rng, 1e-26, 1e-24),
                beta: rng.gen_range(-1e-6..1e-6),
                rho0: if free { log_uniform(&mut rng, 1e-24, 1e-18) } else { 0.0 },
                z0: rng.gen_range(-1.0..1.0),
                v0: rng.gen_range(-1.0..1.0),
                g: if free { 0.0 } else { 9.81 },
                k_rho: omega_rho / dilaton_interferometry::context::SPEED_OF_LIGHT * rng.gen_range(0.0..1.0),
                omega_rho,
                phi_rho: rng.gen_range(0.0..std::f64::consts::TAU),
            }
        })
        .collect()
}

fn check_draw(draw: Draw, base: &PhysicalContext, cfg: &QuadratureConfig, tol: Tolerances) -> CliResult<Vec<Check>> {
    let ctx = base.with_g(draw.g)?;
    let species = Species::new(draw.mass, draw.beta, draw.rho0)?;
    let dilaton = DilatonParams::new(0.0, draw.k_rho, draw.omega_rho, draw.phi_rho, f64::INFINITY, 0.0, 0.0)?;
    let spec: InterferometerSpec =
        mach_zehnder(draw.interrogation_time, draw.k, species, draw.z0, draw.v0, dilaton, ctx)?;
    let closed = single_phase_terms(
        &MzParams {
            k: draw.k,
            interrogation_time: draw.interrogation_time,
            z0: draw.z0,
            v0: draw.v0,
            mass: draw.mass,
            beta: draw.beta,
        },
        &ctx,
    );
    let mut rows = vec![
        ("phi0", phi0(&spec)?, closed.gravimeter, pulse_sum_phi0(&spec)?),
        (
            PerturbationTerm::WaveVectorMod.name(),
            term_phase(&spec, PerturbationTerm::WaveVectorMod)?,
            closed.wave_vector_mod,
            pulse_sum_wave_vector_mod(&spec)?,
        ),
        (
            PerturbationTerm::DilatonLinear.name(),
            term_phase(&spec, PerturbationTerm::DilatonLinear)?,
            closed.dilaton_linear,
            quad_term_phase(&spec, PerturbationTerm::DilatonLinear, cfg)?,
        ),
        (
            PerturbationTerm::Fsl.name(),
            fsl_phase(&spec)?,
            closed.fsl,
            secant_fsl_phase(&spec)?,
        ),
    ];
    if draw.rho0 != 0.0 {
        let pair = DarkMatterPair {
            separation: 0.0,
            interrogation_time: draw.interrogation_time,
            k: draw.k,
            v0: draw.v0,
            mass: draw.mass,
            rho0: draw.rho0,
            omega_rho: draw.omega_rho,
            k_rho: draw.k_rho,
            phi_rho: draw.phi_rho,
            g: 0.0,
        };
        rows.push((
            PerturbationTerm::DilatonOscillation.name(),
            term_phase(&spec, PerturbationTerm::DilatonOscillation)?,
            dm_single_phase(&pair, draw.z0, 0.0, &ctx)?,
            quad_term_phase(&spec, PerturbationTerm::DilatonOscillation, cfg)?,
        ));
    }
    Ok(rows
        .into_iter()
        .map(|(term, engine, closed, oracle)| {
            let engine_closed = relative_deviation(engine, closed, tol.abs_floor);
            let engine_oracle = relative_deviation(engine, oracle.value, tol.abs_floor);
            let limit = (tol.rel * engine.abs()).max(tol.abs_floor).max(oracle.error);
            let pass = (engine - closed).abs() <= (tol.rel * closed.abs()).max(tol.abs_floor)
                && (engine - oracle.value).abs() <= limit;
            Check {
                draw,
                term,
                engine,
                closed,
                oracle,
                engine_closed,
                engine_oracle,
                pass,
            }
        })
        .collect())
}

pub fn run_checks(params: &ParamSet) -> CliResult<(u64, Vec<Check>)> {
    let count = params.count("draws")?;
    let seed = params.count("seed")? as u64;
    let tol = Tolerances {
        rel: params.get("rel_tol"),
        abs_floor: params.get("abs_floor_rad"),
    };
    if !(tol.rel.is_finite() && tol.rel >= 0.0 && tol.abs_floor.is_finite() && tol.abs_floor >= 0.0) {
        return Err(CliError::Precondition(
            "tolerances must be finite and non-negative".into(),
        ));
    }
    let cfg = QuadratureConfig::new(
        params.get("quad_abs_tol_rad"),
        params.get("quad_rel_tol"),
        params.count("quad_max_subdivisions")?,
    )?;
    let base = PhysicalContext::new(params.get("c_m_per_s"), params.get("hbar_J_s"), 0.0)?;
    let per_draw: Vec<Vec<Check>> = draws(count, seed)
        .into_par_iter()
        .map(|d| check_draw(d, &base, &cfg, tol))
        .collect::<CliResult<_>>()?;
    Ok((seed, per_draw.into_iter().flatten().collect()))
}

pub fn write_report<W: Write>(out: &mut W, seed: u64, checks: &[Check]) -> std::io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for c in checks {
        let d = &c.draw;
        let numbers = [
            d.interrogation_time,
            d.k,
            d.mass,
            d.beta,
            d.rho0,
            d.z0,
            d.v0,
            d.g,
            d.k_rho,
            d.omega_rho,
            d.phi_rho,
        ]
        .map(format_number)
        .join(",");
        let results = [
            c.engine,
            c.closed,
            c.oracle.value,
            c.oracle.error,
            c.engine_closed,
            c.engine_oracle,
        ]
        .map(format_number)
        .join(",");
        writeln!(
            out,
            "{},{seed},{numbers},{},{results},{}",
            d.index,
            c.term,
            u8::from(c.pass)
        )?;
    }
    Ok(())
}
