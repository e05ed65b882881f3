//! Brute-force numerical evaluation used to cross-check the analytic paths.
//!
//! Nothing here shares code with the closed-form antiderivatives: the branch
//! Hamiltonians are sampled pointwise and integrated with a fixed-order
//! adaptive rule.

use crate::closed_forms::{dm_differential_phase, DarkMatterPair};
use crate::context::PhysicalContext;
use crate::error::{invalid, Error, Result};
use crate::geometry::{as_mach_zehnder, ensure_closed, trajectories, InterferometerSpec};
use crate::phase_engine::PerturbationTerm;

/// Stopping rule for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(invalid("abs_tol", format!("must be positive, got {abs_tol}")));
        }
        if !(rel_tol.is_finite() && rel_tol > 0.0) {
            return Err(invalid("rel_tol", format!("must be positive, got {rel_tol}")));
        }
        if max_subdivisions < 1 {
            return Err(invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(QuadratureConfig {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-30,
            rel_tol: 1e-12,
            max_subdivisions: 100_000,
        }
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

#[allow(clippy::excessive_precision)]
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Integral of |f|, for the round-off floor.
    magnitude: f64,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = KRONROD_WEIGHTS[7] * f_center;
    let mut gauss = GAUSS_WEIGHTS[3] * f_center;
    let mut magnitude = KRONROD_WEIGHTS[7] * f_center.abs();
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let (left, right) = (f(center - dx), f(center + dx));
        let sum = left + right;
        let abs_sum = left.abs() + right.abs();
        kronrod += KRONROD_WEIGHTS[i] * sum;
        magnitude += KRONROD_WEIGHTS[i] * abs_sum;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * sum;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        magnitude: magnitude * half.abs(),
    }
}

/// Adaptive G7/K15 quadrature; the worst panel is always split at its midpoint.
///
/// Convergence means `error <= max(abs_tol, rel_tol |value|)`, or that the
/// error has reached the round-off level of `int |f|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    let mut panels = vec![kronrod_panel(&f, a, b)];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let magnitude: f64 = panels.iter().map(|p| p.magnitude).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NotConverged {
                estimate: value,
                error,
                subdivisions: panels.len(),
            });
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        let roundoff = 50.0 * f64::EPSILON * magnitude;
        if error <= target || error <= roundoff {
            return Ok(Quadrature { value, error });
        }
        if panels.len() >= cfg.max_subdivisions {
            return Err(Error::NotConverged {
                estimate: value,
                error,
                subdivisions: panels.len(),
            });
        }
        // first panel with the largest error, for a deterministic order
        let worst = panels
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if p.error > panels[best].error { i } else { best });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            // interval exhausted at double precision
            return Err(Error::NotConverged {
                estimate: value,
                error,
                subdivisions: panels.len(),
            });
        }
        panels[worst] = kronrod_panel(&f, a, mid);
        panels.insert(worst + 1, kronrod_panel(&f, mid, b));
    }
}

/// `-(1/hbar) int dt [H(z_u(t), t) - H(z_l(t), t)]` for a continuous term,
/// integrated segment by segment between pulses.
pub fn quad_term_phase(
    spec: &InterferometerSpec,
    term: PerturbationTerm,
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    if !term.is_continuous() {
        return Err(invalid("term", format!("{term} is not a time integral")));
    }
    ensure_closed(spec)?;
    let (upper, lower) = trajectories(spec);
    let species = spec.species();
    let ctx = spec.ctx();
    let dilaton = spec.dilaton();
    let separation = |t: f64| -> f64 {
        let (d_u, _) = upper.recoil(t).expect("t inside the pulse sequence");
        let (d_l, _) = lower.recoil(t).expect("t inside the pulse sequence");
        d_u - d_l
    };

    let mut value = 0.0;
    let mut error = 0.0;
    let pulses = spec.pulses();
    for pair in pulses.windows(2) {
        let (a, b) = (pair[0].time, pair[1].time);
        let q = match term {
            PerturbationTerm::DilatonLinear => {
                let prefactor = species.mass() * ctx.g() * species.beta() / ctx.hbar();
                integrate(|t| -prefactor * separation(t), a, b, cfg)?
            }
            PerturbationTerm::DilatonOscillation => {
                let c = ctx.c();
                let prefactor = species.mass() * c * c * species.rho0() / ctx.hbar();
                let k_rho = dilaton.k_rho;
                integrate(
                    |t| {
                        // cos(psi_u) - cos(psi_l) = -2 sin(mean) sin(half difference)
                        let z_u = upper.position(t).expect("t inside the pulse sequence");
                        let z_l = lower.position(t).expect("t inside the pulse sequence");
                        let mean = dilaton.omega_rho * t - 0.5 * k_rho * (z_u + z_l) + dilaton.phi_rho;
                        let half_diff = -0.5 * k_rho * separation(t);
                        2.0 * prefactor * mean.sin() * half_diff.sin()
                    },
                    a,
                    b,
                    cfg,
                )?
            }
            _ => unreachable!("continuous kinds only"),
        };
        value += q.value;
        error += q.error;
    }
    Ok(Quadrature { value, error })
}

/// Round-off bound for a plain sum of `terms` summands of total magnitude `magnitude`.
fn summation_bound(terms: usize, magnitude: f64) -> f64 {
    4.0 * terms as f64 * f64::EPSILON * magnitude
}

/// `sum_n [k_u z_u(t_n) - k_l z_l(t_n)]` summed directly from branch positions.
/// The error is a round-off bound, since nothing is truncated.
pub fn pulse_sum_phi0(spec: &InterferometerSpec) -> Result<Quadrature> {
    ensure_closed(spec)?;
    let (upper, lower) = trajectories(spec);
    let mut total = 0.0;
    let mut magnitude = 0.0;
    for p in spec.pulses() {
        let a = p.kick_upper * upper.position(p.time)?;
        let b = p.kick_lower * lower.position(p.time)?;
        total += a - b;
        magnitude += a.abs() + b.abs();
    }
    Ok(Quadrature {
        value: total,
        error: summation_bound(2 * spec.pulses().len(), magnitude),
    })
}

/// `-g/(2c^2) sum_n [k_u z_u(t_n)^2 - k_l z_l(t_n)^2]` summed directly from
/// branch positions, with a round-off bound as the error.
pub fn pulse_sum_wave_vector_mod(spec: &InterferometerSpec) -> Result<Quadrature> {
    ensure_closed(spec)?;
    let (upper, lower) = trajectories(spec);
    let mut total = 0.0;
    let mut magnitude = 0.0;
    for p in spec.pulses() {
        let z_u = upper.position(p.time)?;
        let z_l = lower.position(p.time)?;
        let (a, b) = (p.kick_upper * z_u * z_u, p.kick_lower * z_l * z_l);
        total += a - b;
        magnitude += a.abs() + b.abs();
    }
    let ctx = spec.ctx();
    let prefactor = -ctx.g() / (2.0 * ctx.c() * ctx.c());
    Ok(Quadrature {
        value: prefactor * total,
        error: prefactor.abs() * summation_bound(3 * spec.pulses().len(), magnitude),
    })
}

/// Finite speed of light phase with `v_T` taken from the secant of the upper
/// branch over the first interval, `(z(T) - z(0))/T - g T/2`.
pub fn secant_fsl_phase(spec: &InterferometerSpec) -> Result<Quadrature> {
    let shape = as_mach_zehnder(spec).ok_or(Error::NotMachZehnder(
        "finite speed of light phase is only defined for the Mach-Zehnder sequence",
    ))?;
    let (upper, _) = trajectories(spec);
    let t = shape.interrogation_time;
    let ctx = spec.ctx();
    let (z_end, z_start) = (upper.position(shape.start + t)?, upper.position(shape.start)?);
    let v_t = (z_end - z_start) / t - 0.5 * ctx.g() * t;
    let prefactor = -3.0 * shape.k * ctx.g() * t * t / ctx.c();
    let velocity_bound = summation_bound(4, (z_end.abs() + z_start.abs()) / t + 0.5 * ctx.g() * t);
    Ok(Quadrature {
        value: prefactor * v_t,
        error: prefactor.abs() * velocity_bound,
    })
}

/// `sqrt((1/pi) int_0^{2 pi} dphi delta_phi^2)` by the `n`-point periodic trapezoid rule.
pub fn phi_sa_numeric(pair: &DarkMatterPair, n: usize, ctx: &PhysicalContext) -> Result<f64> {
    if n < 16 {
        return Err(invalid("n", format!("need at least 16 samples, got {n}")));
    }
    let step = std::f64::consts::TAU / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let shifted = DarkMatterPair {
            phi_rho: i as f64 * step,
            ..*pair
        };
        let phase = dm_differential_phase(&shifted, ctx)?;
        sum += phase * phase;
    }
    Ok((sum * step / std::f64::consts::PI).sqrt())
}

fn check_steps(h: &[f64; 4]) -> Result<()> {
    if h.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(invalid("h", format!("steps must be positive, got {h:?}")));
    }
    Ok(())
}

fn central<F: Fn([f64; 4]) -> f64>(f: &F, point: [f64; 4], h: &[f64; 4]) -> [f64; 4] {
    let mut grad = [0.0; 4];
    for axis in 0..4 {
        let mut plus = point;
        let mut minus = point;
        plus[axis] += h[axis];
        minus[axis] -= h[axis];
        grad[axis] = (f(plus) - f(minus)) / (2.0 * h[axis]);
    }
    grad
}

/// Plain second-order central differences along `(t, x, y, z)`.
pub fn central_difference_gradient<F: Fn([f64; 4]) -> f64>(f: F, point: [f64; 4], h: [f64; 4]) -> Result<[f64; 4]> {
    check_steps(&h)?;
    Ok(central(&f, point, &h))
}

/// Central differences at `h` and `h/2` combined by Richardson extrapolation.
pub fn finite_difference_gradient<F: Fn([f64; 4]) -> f64>(f: F, point: [f64; 4], h: [f64; 4]) -> Result<[f64; 4]> {
    check_steps(&h)?;
    let coarse = central(&f, point, &h);
    let fine = central(&f, point, &h.map(|s| 0.5 * s));
    let mut grad = [0.0; 4];
    for axis in 0..4 {
        grad[axis] = (4.0 * fine[axis] - coarse[axis]) / 3.0;
    }
    Ok(grad)
}
