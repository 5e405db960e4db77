//! Thermal-noise-limited force and acceleration sensitivity, including the
//! photon-recoil correction and its two scaling regimes, plus the
//! displacement shot-noise floor, Yukawa-force reach and field-equivalent
//! conversions.

use crate::constants::{C_LIGHT, EPSILON_0, G_N, HBAR, K_B};
use crate::langevin::gas_damping;
use crate::model::{CavityConfig, CavityMode, GasEnvironment, Particle};
use crate::noise::recoil_heating_closed;
use crate::{exec, Error, Result};
use std::f64::consts::PI;
use std::io::Write;

/// Everything a sensitivity evaluation needs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SensingScenario {
    pub particle: Particle,
    pub gas: GasEnvironment,
    /// Trap frequency ω₀ of the sensing mode (rad/s).
    pub omega0: f64,
    /// Measurement bandwidth (Hz).
    pub bandwidth: f64,
    /// Trap laser wavelength (m), entering the recoil rate.
    pub wavelength: f64,
    /// Optional cavity for the displacement shot-noise floor.
    pub cavity: Option<CavityConfig>,
    /// Residual cavity-backaction rate R₊ (1/s); normally negligible
    /// next to the recoil rate and defaulted to zero.
    pub r_plus: f64,
}

impl SensingScenario {
    pub fn new(
        particle: Particle,
        gas: GasEnvironment,
        omega0: f64,
        bandwidth: f64,
        wavelength: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0) || !(bandwidth > 0.0) || !(wavelength > 0.0) {
            return Err(Error::Domain(format!(
                "omega0, bandwidth and wavelength must be > 0, got {omega0}, {bandwidth}, {wavelength}"
            )));
        }
        Ok(Self { particle, gas, omega0, bandwidth, wavelength, cavity: None, r_plus: 0.0 })
    }
}

/// Which noise source limits the sensitivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// χ < 0.5: gas collisions dominate.
    GasLimited,
    /// χ > 2: photon recoil dominates.
    RecoilLimited,
    /// χ in [0.5, 2].
    Crossover,
}

impl Regime {
    fn from_chi(chi: f64) -> Self {
        if chi < 0.5 {
            Regime::GasLimited
        } else if chi > 2.0 {
            Regime::RecoilLimited
        } else {
            Regime::Crossover
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::GasLimited => "gas-limited",
            Regime::RecoilLimited => "recoil-limited",
            Regime::Crossover => "crossover",
        }
    }
}

/// One point of a sensitivity evaluation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SensitivityPoint {
    /// Minimum detectable force (N) at the scenario bandwidth.
    pub f_min: f64,
    /// Equivalent acceleration sensitivity (m/s²).
    pub a_min: f64,
    /// Recoil-to-gas ratio χ = (γ_sc + R₊)/(n_i·γ_g).
    pub chi: f64,
    pub regime: Regime,
}

/// Thermal-noise force floor F = √(4k·k_B·T·b/(ω₀·Q)) (N) for a resonator
/// of spring constant `k` and quality factor `q`.
pub fn f_min_basic(k: f64, t: f64, b: f64, omega0: f64, q: f64) -> f64 {
    (4.0 * k * K_B * t * b / (omega0 * q)).sqrt()
}

/// Recoil-corrected force floor
/// F = √(4k_B·T·m·b·γ_g·[1 + (γ_sc + R₊)/(n_i·γ_g)]).
///
/// Evaluated in the expanded form √(4k_B·T·m·b·γ_g + 4ħω₀·m·b·(γ_sc+R₊)),
/// which stays finite at zero pressure where χ diverges.
pub fn f_min_recoil(s: &SensingScenario) -> SensitivityPoint {
    let m = s.particle.mass();
    let gamma_g = gas_damping(&s.particle, &s.gas);
    let gamma_sc = recoil_heating_closed(&s.particle, s.omega0, s.wavelength);
    let n_i = K_B * s.gas.temperature / (HBAR * s.omega0);
    let chi = (gamma_sc + s.r_plus) / (n_i * gamma_g);
    let f2 = 4.0 * K_B * s.gas.temperature * m * s.bandwidth * gamma_g
        + 4.0 * HBAR * s.omega0 * m * s.bandwidth * (gamma_sc + s.r_plus);
    let f_min = f2.sqrt();
    SensitivityPoint { f_min, a_min: f_min / m, chi, regime: Regime::from_chi(chi) }
}

/// Sweep variable for [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Particle radius (m); mass follows the scenario density.
    Radius,
    /// Trap frequency ω₀ (rad/s).
    Frequency,
}

/// Evaluate [`f_min_recoil`] across `grid` (ascending), varying `axis`.
/// Runs in parallel under the `parallel` feature.
pub fn sweep(s: &SensingScenario, axis: SweepAxis, grid: &[f64]) -> Result<Vec<(f64, SensitivityPoint)>> {
    check_grid(grid)?;
    Ok(exec::map_slice(grid, |&x| (x, eval_at(s, axis, x))))
}

/// Sequential twin of [`sweep`] (reference baseline for the benches).
pub fn sweep_seq(s: &SensingScenario, axis: SweepAxis, grid: &[f64]) -> Result<Vec<(f64, SensitivityPoint)>> {
    check_grid(grid)?;
    Ok(exec::map_slice_seq(grid, |&x| (x, eval_at(s, axis, x))))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("sweep grid must be non-empty and ascending".into()));
    }
    Ok(())
}

fn eval_at(s: &SensingScenario, axis: SweepAxis, x: f64) -> SensitivityPoint {
    let mut sc = *s;
    match axis {
        SweepAxis::Radius => sc.particle.radius = x,
        SweepAxis::Frequency => sc.omega0 = x,
    }
    f_min_recoil(&sc)
}

/// CSV dump of a sweep: `x_value,f_min_N_per_rtHz,a_min,chi,regime`.
pub fn write_sweep_csv<W: Write>(points: &[(f64, SensitivityPoint)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "x_value,f_min_N_per_rtHz,a_min,chi,regime")?;
    for (x, p) in points {
        writeln!(
            w,
            "{x:.16e},{:.16e},{:.16e},{:.16e},{}",
            p.f_min,
            p.a_min,
            p.chi,
            p.regime.label()
        )?;
    }
    Ok(())
}

/// Photon shot-noise limited displacement sensitivity
/// √S_z(ω) = (κ/(4k_c·g))·(1/√I)·√(1 + 4ω²/κ²) (m/√Hz) on `omega_grid`,
/// for cooling power `power` on an impedance-matched cavity.
pub fn displacement_floor(
    cav: &CavityConfig,
    p: &Particle,
    power: f64,
    omega_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if !(power > 0.0) {
        return Err(Error::Domain(format!("cooling power must be > 0, got {power}")));
    }
    let k_c = cav.omega_c / C_LIGHT;
    let g = 3.0 * p.volume() / (4.0 * cav.mode_volume(CavityMode::Tem00))
        * p.clausius_mossotti()
        * cav.omega_c;
    let photon_flux = power / (HBAR * cav.omega_c);
    let dc = cav.linewidth / (4.0 * k_c * g * photon_flux.sqrt());
    Ok(omega_grid
        .iter()
        .map(|&w| (w, dc * (1.0 + 4.0 * w * w / (cav.linewidth * cav.linewidth)).sqrt()))
        .collect())
}

/// Yukawa-corrected gravitational potential
/// V = −G·m₁·m₂/r·[1 + α·e^{−r/λ}] (J).
pub fn yukawa(m1: f64, m2: f64, r: f64, alpha: f64, lambda_y: f64) -> Result<f64> {
    if !(r > 0.0) || !(lambda_y > 0.0) {
        return Err(Error::Domain(format!("need r > 0 and lambda > 0, got {r}, {lambda_y}")));
    }
    Ok(-G_N * m1 * m2 / r * (1.0 + alpha * (-r / lambda_y).exp()))
}

/// Rough scale of the Yukawa force between density-ρ bodies of linear
/// dimension λ at separation λ: F ~ G_N·ρ²·α·λ⁴ (N).
pub fn yukawa_scale(rho: f64, alpha: f64, lambda_y: f64) -> f64 {
    G_N * rho * rho * alpha * lambda_y.powi(4)
}

/// Electric-field sensitivity E = F_min/q for a carried charge `q`.
pub fn field_equivalent(f_min: f64, charge: f64) -> Result<f64> {
    if charge == 0.0 {
        return Err(Error::Domain("field equivalent needs a non-zero charge".into()));
    }
    Ok(f_min / charge.abs())
}

/// Charge on a sphere of radius `radius` whose surface field is
/// `e_surface`: q = 4πε₀·r²·E. Worked-example geometry for
/// [`field_equivalent`].
pub fn surface_field_charge(radius: f64, e_surface: f64) -> f64 {
    4.0 * PI * EPSILON_0 * radius * radius * e_surface
}
