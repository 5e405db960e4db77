//! Physical constants (SI, CODATA 2018) and declared unit conversions.

/// Boltzmann constant (J/K). Exact since the 2019 SI redefinition.
pub const K_B: f64 = 1.380649e-23;
/// Reduced Planck constant (J·s), h/2π with h exact.
pub const HBAR: f64 = 1.054571817e-34;
/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.8541878128e-12;
/// Bohr magneton (J/T).
pub const MU_B: f64 = 9.2740100783e-24;
/// Newtonian constant of gravitation (m³/(kg·s²)).
pub const G_N: f64 = 6.67430e-11;
/// Electron spin g-factor, taken as exactly 2.
pub const G_S: f64 = 2.0;
/// Speed of light in vacuum (m/s). Exact.
pub const C_LIGHT: f64 = 299792458.0;

/// Mean mass of an air molecule (kg). Default gas species; overridable
/// through [`crate::model::GasEnvironment`].
pub const AIR_MOLECULE_MASS: f64 = 4.81e-26;

/// Declared conversion constant: 1 Torr in Pa.
pub const TORR_TO_PA: f64 = 133.322;
/// Declared conversion constant: 1 mbar in Pa.
pub const MBAR_TO_PA: f64 = 100.0;

/// Immutable bundle of the constants above, for callers that prefer to
/// thread an explicit value instead of referencing the module items.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub k_b: f64,
    pub hbar: f64,
    pub epsilon_0: f64,
    pub mu_b: f64,
    pub g_n: f64,
    pub g_s: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            k_b: K_B,
            hbar: HBAR,
            epsilon_0: EPSILON_0,
            mu_b: MU_B,
            g_n: G_N,
            g_s: G_S,
        }
    }
}
