//! Scenario kinds and their unit-suffixed parameter tables.

use std::fmt;
use std::str::FromStr;

use dilaton_interferometry::context::{HBAR, SPEED_OF_LIGHT, STANDARD_GRAVITY};

use crate::error::{CliError, CliResult};

const RUBIDIUM_87_KG: f64 = 1.443_160_648e-25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Phase,
    Gradiometer,
    Eep,
    DarkMatter,
    OpticsGrid,
    Validate,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Phase,
        Scenario::Gradiometer,
        Scenario::Eep,
        Scenario::DarkMatter,
        Scenario::OpticsGrid,
        Scenario::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Phase => "phase",
            Scenario::Gradiometer => "gradiometer",
            Scenario::Eep => "eep",
            Scenario::DarkMatter => "darkmatter",
            Scenario::OpticsGrid => "optics-grid",
            Scenario::Validate => "validate",
        }
    }

    /// Whether sweep axes may be attached.
    pub fn sweepable(self) -> bool {
        !matches!(self, Scenario::OpticsGrid | Scenario::Validate)
    }

    fn defaults(self) -> Vec<(&'static str, f64)> {
        let constants = [("c_m_per_s", SPEED_OF_LIGHT), ("hbar_J_s", HBAR)];
        let mut table = match self {
            Scenario::Phase => vec![
                ("T_s", 0.1),
                ("k_per_m", 1.61e7),
                ("mass_kg", RUBIDIUM_87_KG),
                ("beta", 0.0),
                ("rho0", 0.0),
                ("z0_m", 0.0),
                ("v0_m_per_s", 0.0),
                ("t0_s", 0.0),
                ("g_m_per_s2", STANDARD_GRAVITY),
                ("k_rho_per_m", 0.0),
                ("omega_rho_rad_per_s", 0.0),
                ("phi_rho_rad", 0.0),
            ],
            Scenario::Gradiometer => vec![
                ("separation_m", 10.0),
                ("g_m_per_s2", STANDARD_GRAVITY),
                ("delta_g_m_per_s2", 3e-6),
                ("T_s", 0.1),
                ("k_per_m", 1.61e7),
                ("v0_m_per_s", 0.0),
                ("z0_m", 0.0),
                ("mass_kg", RUBIDIUM_87_KG),
                ("beta", 0.0),
            ],
            Scenario::Eep => vec![
                ("mass_kg", RUBIDIUM_87_KG),
                ("delta_mass_kg", 0.0),
                ("k_per_m", 1.61e7),
                ("delta_k_per_m", 0.0),
                ("beta_a", 0.0),
                ("beta_b", 0.0),
                ("v0_m_per_s", 0.0),
                ("delta_v0_m_per_s", 1e-6),
                ("z0_m", 0.0),
                ("delta_z0_m", 0.0),
                ("g_m_per_s2", STANDARD_GRAVITY),
                ("T_s", 0.1),
            ],
            Scenario::DarkMatter => vec![
                ("separation_m", 1e3),
                ("T_s", 5.0),
                ("k_per_m", 1.61e7),
                ("v0_m_per_s", 0.0),
                ("mass_kg", RUBIDIUM_87_KG),
                ("rho0", 1e-20),
                ("omega_rho_rad_per_s", 1.0),
                ("k_rho_per_m", 1e-9),
                ("phi_rho_rad", 0.0),
                ("g_m_per_s2", 0.0),
            ],
            Scenario::OpticsGrid => vec![
                ("length_m", 1.0),
                ("g_m_per_s2", 0.4 * SPEED_OF_LIGHT * SPEED_OF_LIGHT),
                ("q_x_per_m", 0.0),
                ("q_y_per_m", 0.0),
                ("k_z_per_m", 1.0),
                ("a_in", 1.0),
                ("rho0_bar", 0.02),
                ("k_rho_per_m", 5.0),
                ("omega_rho_rad_per_s", 40.0 * SPEED_OF_LIGHT),
                ("phi_rho_rad", 0.0),
                ("lambda_rho_m", f64::INFINITY),
                ("beta_s_bar", 0.3),
                ("d_e", 1.0),
                ("t_min_s", 0.0),
                ("t_max_s", 1.0 / SPEED_OF_LIGHT),
                ("z_min_m", 0.0),
                ("z_max_m", 1.0),
                ("n_t", 200.0),
                ("n_z", 200.0),
            ],
            Scenario::Validate => vec![
                ("draws", 50.0),
                ("seed", 1.0),
                ("rel_tol", 1e-8),
                ("abs_floor_rad", 1e-30),
                ("quad_abs_tol_rad", 1e-30),
                ("quad_rel_tol", 1e-12),
                ("quad_max_subdivisions", 100_000.0),
            ],
        };
        table.extend(constants);
        table
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim();
        Scenario::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CliError::parse(format!("unknown scenario `{s}`")))
    }
}

/// Ordered parameter table of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    names: Vec<&'static str>,
    values: Vec<f64>,
}

impl ParamSet {
    pub fn defaults(scenario: Scenario) -> Self {
        let (names, values) = scenario.defaults().into_iter().unzip();
        ParamSet { names, values }
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self, key: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == key)
    }

    pub fn set(&mut self, key: &str, value: f64) -> CliResult<()> {
        let slot = self
            .index(key)
            .ok_or_else(|| CliError::parse(format!("unknown parameter `{key}`; known: {}", self.names.join(", "))))?;
        self.values[slot] = value;
        Ok(())
    }

    pub(crate) fn set_slot(&mut self, slot: usize, value: f64) {
        self.values[slot] = value;
    }

    /// Value of a parameter the scenario is known to define.
    ///
    /// # Panics
    /// If `key` is not in the table.
    pub fn get(&self, key: &str) -> f64 {
        match self.index(key) {
            Some(slot) => self.values[slot],
            None => panic!("parameter `{key}` is not defined for this scenario"),
        }
    }

    /// A parameter that must hold a non-negative integer.
    pub fn count(&self, key: &str) -> CliResult<usize> {
        let v = self.get(key);
        if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as usize)
        } else {
            Err(CliError::Precondition(format!(
                "`{key}` must be a non-negative integer, got {v}"
            )))
        }
    }
}
