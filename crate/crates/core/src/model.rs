//! Domain types for the trapped-particle scenario, all in SI units.
//!
//! Every type validates its invariants at construction and is immutable
//! afterwards, so values can be shared freely across threads. Derived
//! quantities (mass, polarizability, mode volumes, ...) are pure functions
//! of the stored fields.

use crate::constants::{EPSILON_0, HBAR, K_B};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Levitated dielectric sphere: geometry and material.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Particle {
    /// Sphere radius (m).
    pub radius: f64,
    /// Mass density (kg/m³).
    pub density: f64,
    /// Relative permittivity ε (dimensionless, > 1).
    pub relative_permittivity: f64,
}

impl Particle {
    pub fn new(radius: f64, density: f64, relative_permittivity: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("particle radius must be > 0, got {radius}")));
        }
        if !(density > 0.0) {
            return Err(Error::Domain(format!("particle density must be > 0, got {density}")));
        }
        if !(relative_permittivity > 1.0) {
            return Err(Error::Domain(format!(
                "relative permittivity must be > 1, got {relative_permittivity}"
            )));
        }
        Ok(Self { radius, density, relative_permittivity })
    }

    /// Sphere volume V = (4/3)πr³ (m³).
    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    /// Sphere mass (kg).
    pub fn mass(&self) -> f64 {
        self.volume() * self.density
    }

    /// Induced polarizability α = 3ε₀V(ε−1)/(ε+2) (C·m²/V).
    pub fn polarizability(&self) -> f64 {
        3.0 * EPSILON_0 * self.volume() * self.clausius_mossotti()
    }

    /// The Clausius-Mossotti factor (ε−1)/(ε+2).
    pub fn clausius_mossotti(&self) -> f64 {
        let eps = self.relative_permittivity;
        (eps - 1.0) / (eps + 2.0)
    }
}

/// Residual gas around the particle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GasEnvironment {
    /// Pressure (Pa).
    pub pressure: f64,
    /// Gas temperature (K).
    pub temperature: f64,
    /// Mass of one gas molecule (kg).
    pub molecule_mass: f64,
}

impl GasEnvironment {
    pub fn new(pressure: f64, temperature: f64, molecule_mass: f64) -> Result<Self> {
        if !(pressure >= 0.0) {
            return Err(Error::Domain(format!("pressure must be >= 0, got {pressure}")));
        }
        if !(temperature > 0.0) {
            return Err(Error::Domain(format!("temperature must be > 0, got {temperature}")));
        }
        if !(molecule_mass > 0.0) {
            return Err(Error::Domain(format!("molecule mass must be > 0, got {molecule_mass}")));
        }
        Ok(Self { pressure, temperature, molecule_mass })
    }

    /// Air at the given pressure and temperature.
    pub fn air(pressure: f64, temperature: f64) -> Result<Self> {
        Self::new(pressure, temperature, crate::constants::AIR_MOLECULE_MASS)
    }

    /// Mean molecular speed v̄ = √(8k_BT/(πm)) (m/s).
    pub fn mean_speed(&self) -> f64 {
        (8.0 * K_B * self.temperature / (PI * self.molecule_mass)).sqrt()
    }
}

/// Optical trap: per-axis resonance frequencies and beam parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TrapConfig {
    /// Angular trap frequencies per axis [x, y, z] (rad/s).
    pub omega: [f64; 3],
    /// Trapping laser wavelength (m).
    pub wavelength: f64,
    /// Trapping beam intensity at the particle (W/m²).
    pub intensity: f64,
}

impl TrapConfig {
    pub fn new(omega: [f64; 3], wavelength: f64, intensity: f64) -> Result<Self> {
        for (i, w) in omega.iter().enumerate() {
            if !(*w > 0.0) {
                return Err(Error::Domain(format!("trap frequency {i} must be > 0, got {w}")));
            }
        }
        if !(wavelength > 0.0) {
            return Err(Error::Domain(format!("wavelength must be > 0, got {wavelength}")));
        }
        if !(intensity >= 0.0) {
            return Err(Error::Domain(format!("intensity must be >= 0, got {intensity}")));
        }
        Ok(Self { omega, wavelength, intensity })
    }
}

/// Transverse cavity mode families used for cooling and readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CavityMode {
    /// Fundamental Gaussian mode, couples to axial motion.
    Tem00,
    /// First-order mode with a node along x.
    Tem01,
    /// First-order mode with a node along y.
    Tem10,
}

/// Optical cavity hosting the cooling modes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CavityConfig {
    /// Cavity length (m).
    pub length: f64,
    /// Mode waist (m).
    pub waist: f64,
    /// Intrinsic linewidth κ (rad/s).
    pub linewidth: f64,
    /// Cavity resonance frequency ω_c (rad/s).
    pub omega_c: f64,
    /// Trap location (x₀, y₀, z₀) inside the cavity (m).
    pub trap_position: [f64; 3],
    /// Standing-wave phases (φ₁, φ₂, φ₃) of the three modes (rad).
    pub mode_phases: [f64; 3],
}

impl CavityConfig {
    pub fn new(
        length: f64,
        waist: f64,
        linewidth: f64,
        omega_c: f64,
        trap_position: [f64; 3],
        mode_phases: [f64; 3],
    ) -> Result<Self> {
        for (name, v) in [
            ("length", length),
            ("waist", waist),
            ("linewidth", linewidth),
            ("omega_c", omega_c),
        ] {
            if !(v > 0.0) {
                return Err(Error::Domain(format!("cavity {name} must be > 0, got {v}")));
            }
        }
        Ok(Self { length, waist, linewidth, omega_c, trap_position, mode_phases })
    }

    /// Default trap point: z₀ = 0, x₀ = y₀ = w/4, φ₁ = π/4, φ₂ = φ₃ = 0,
    /// which places the particle on the gradient of all three modes.
    pub fn with_default_trap_point(
        length: f64,
        waist: f64,
        linewidth: f64,
        omega_c: f64,
    ) -> Result<Self> {
        Self::new(
            length,
            waist,
            linewidth,
            omega_c,
            [0.25 * waist, 0.25 * waist, 0.0],
            [PI / 4.0, 0.0, 0.0],
        )
    }

    /// Mode volume: V_c1 = (π/4)Lw² for TEM00, V_c2 = V_c3 = (π/16)Lw².
    pub fn mode_volume(&self, mode: CavityMode) -> f64 {
        let lw2 = self.length * self.waist * self.waist;
        match mode {
            CavityMode::Tem00 => PI / 4.0 * lw2,
            CavityMode::Tem01 | CavityMode::Tem10 => PI / 16.0 * lw2,
        }
    }

    /// Mode wavevector k = ω_c/c (1/m).
    pub fn wavevector(&self) -> f64 {
        self.omega_c / crate::constants::C_LIGHT
    }
}

/// Drive applied to one cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DriveConfig {
    /// Laser-cavity detuning Δ = ω_c − ω_l (rad/s). Sign free.
    pub detuning: f64,
    /// Driving strength Ω (rad/s).
    pub drive_strength: f64,
    /// Optical power entering the mode (W).
    pub power: f64,
}

impl DriveConfig {
    pub fn new(detuning: f64, drive_strength: f64, power: f64) -> Result<Self> {
        if !(drive_strength >= 0.0) {
            return Err(Error::Domain(format!(
                "drive strength must be >= 0, got {drive_strength}"
            )));
        }
        if !(power >= 0.0) {
            return Err(Error::Domain(format!("power must be >= 0, got {power}")));
        }
        Ok(Self { detuning, drive_strength, power })
    }
}

/// Sphere mass (4/3)πr³ρ (kg).
pub fn mass_of(p: &Particle) -> f64 {
    p.mass()
}

/// Zero-point position spread √(ħ/(2mω)) (m) of a mode with mass `m`
/// and angular frequency `omega`.
pub fn zero_point_fluctuation(mass: f64, omega: f64) -> Result<f64> {
    if !(mass > 0.0) || !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "zero-point fluctuation needs mass > 0 and omega > 0, got m={mass}, omega={omega}"
        )));
    }
    Ok((HBAR / (2.0 * mass * omega)).sqrt())
}

/// Classical-limit mean occupation k_BT/(ħω) of a mode at temperature `t`.
pub fn thermal_occupation(t: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("temperature must be >= 0, got {t}")));
    }
    Ok(K_B * t / (HBAR * omega))
}
