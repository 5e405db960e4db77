//! Single-molecule collision statistics and their signature in the cavity
//! output light: event rates, per-event phonon kicks, pulse resolvability
//! and a stochastic event-stream simulator.

use crate::constants::{HBAR, K_B};
use crate::model::{GasEnvironment, Particle};
use crate::rng::GaussianStream;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::PI;
use std::io::Write;

/// Whether molecules bounce off thermally or stick and re-emit at the
/// surface temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Elasticity {
    Elastic,
    Inelastic,
}

/// Scenario for collision detection through one cavity output mode.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CollisionScenario {
    pub particle: Particle,
    pub gas: GasEnvironment,
    /// Monitored mechanical mode frequency ω_j (rad/s).
    pub omega_j: f64,
    /// Linearized output coupling g_j (rad/s).
    pub g_j: f64,
    /// Intracavity amplitude magnitude |α_j|.
    pub alpha_j: f64,
    /// Cavity linewidth κ_j (rad/s).
    pub kappa_j: f64,
    /// Sphere surface temperature (K), governs inelastic re-emission.
    pub surface_temperature: f64,
    pub elasticity: Elasticity,
}

impl CollisionScenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        particle: Particle,
        gas: GasEnvironment,
        omega_j: f64,
        g_j: f64,
        alpha_j: f64,
        kappa_j: f64,
        surface_temperature: f64,
        elasticity: Elasticity,
    ) -> Result<Self> {
        if !(omega_j > 0.0) {
            return Err(Error::Domain(format!("omega_j must be > 0, got {omega_j}")));
        }
        if !(surface_temperature > 0.0) {
            return Err(Error::Domain(format!(
                "surface temperature must be > 0, got {surface_temperature}"
            )));
        }
        Ok(Self { particle, gas, omega_j, g_j, alpha_j, kappa_j, surface_temperature, elasticity })
    }

    /// Temperature governing the per-event velocity distribution.
    pub fn governing_temperature(&self) -> f64 {
        match self.elasticity {
            Elasticity::Elastic => self.gas.temperature,
            Elasticity::Inelastic => self.surface_temperature,
        }
    }
}

/// One detected molecule impact.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CollisionEvent {
    /// Arrival time (s).
    pub time: f64,
    /// Phonon-number kick of the monitored mode.
    pub phonon_kick: f64,
    /// Photons detected in the resulting output pulse.
    pub detected_photons: u64,
}

/// Collision rate N = 2πr²·P/√(π·m_m·k_B·T/2) (1/s).
pub fn collision_rate(p: &Particle, g: &GasEnvironment) -> f64 {
    2.0 * PI * p.radius * p.radius * g.pressure
        / (PI * g.molecule_mass * K_B * g.temperature / 2.0).sqrt()
}

/// Mean phonon kick and the detectability predicates of one collision.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KickStats {
    /// Mean phonon increase n₀ = 2·m_m·k_B·T/(ħ·ω_j·m) at the governing
    /// temperature.
    pub mean_kick: f64,
    /// 2k_B·T_env > ħω_j·(m/m_m): an elastic collision deposits more than
    /// one phonon on average.
    pub elastic_detectable: bool,
    /// k_B·T_env > 2ħω_j·(m/m_m).
    pub inelastic_detectable_env: bool,
    /// k_B·T_sur > 2ħω_j·(m/m_m).
    pub inelastic_detectable_surface: bool,
}

/// Elastic detectability: 2k_B·T_env > ħω_j·(m/m_m).
pub fn elastic_criterion(p: &Particle, g: &GasEnvironment, omega_j: f64) -> bool {
    2.0 * K_B * g.temperature > HBAR * omega_j * p.mass() / g.molecule_mass
}

/// Inelastic threshold on the environment side: k_B·T_env > 2ħω_j·(m/m_m).
pub fn inelastic_criterion_env(p: &Particle, g: &GasEnvironment, omega_j: f64) -> bool {
    K_B * g.temperature > 2.0 * HBAR * omega_j * p.mass() / g.molecule_mass
}

/// Inelastic threshold on the surface side: k_B·T_sur > 2ħω_j·(m/m_m).
pub fn inelastic_criterion_surface(
    p: &Particle,
    g: &GasEnvironment,
    omega_j: f64,
    t_surface: f64,
) -> bool {
    K_B * t_surface > 2.0 * HBAR * omega_j * p.mass() / g.molecule_mass
}

/// Mean phonon kick n₀ = 2m_m²⟨v_j²⟩/(ħω_j·m) with ⟨v_j²⟩ = k_B·T/m_m at
/// the governing temperature, plus the detectability predicates.
pub fn phonon_kick(
    p: &Particle,
    g: &GasEnvironment,
    omega_j: f64,
    elasticity: Elasticity,
    t_surface: f64,
) -> KickStats {
    let t_gov = match elasticity {
        Elasticity::Elastic => g.temperature,
        Elasticity::Inelastic => t_surface,
    };
    let mean_kick = 2.0 * g.molecule_mass * K_B * t_gov / (HBAR * omega_j * p.mass());
    KickStats {
        mean_kick,
        elastic_detectable: elastic_criterion(p, g, omega_j),
        inelastic_detectable_env: inelastic_criterion_env(p, g, omega_j),
        inelastic_detectable_surface: inelastic_criterion_surface(p, g, omega_j, t_surface),
    }
}

/// Phonon decay / output-pulse duration τ_j = κ_j/(4g_j²|α_j|²) (s).
pub fn pulse_duration(g_j: f64, alpha_j: f64, kappa_j: f64) -> Result<f64> {
    let ga = g_j * alpha_j;
    if ga == 0.0 {
        return Err(Error::Domain(
            "zero output coupling gives an infinite pulse duration".into(),
        ));
    }
    Ok(kappa_j / (4.0 * ga * ga))
}

/// Individual events are resolvable when the pulse is much shorter than
/// the mean inter-arrival time: τ·N < 0.1.
pub fn resolvable(tau: f64, rate: f64) -> bool {
    tau * rate < 0.1
}

/// Simulated event stream and its expected statistics.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CollisionStream {
    pub events: Vec<CollisionEvent>,
    /// Analytic event rate N (1/s).
    pub rate: f64,
    /// Analytic mean phonon kick.
    pub mean_kick: f64,
    /// Output pulses fit between events (τ·N < 0.1); when false the
    /// stream is still generated but pulses would overlap on a detector.
    pub resolvable: bool,
}

/// Sample a Poisson event stream over `duration` seconds: exponential
/// inter-arrival times at the analytic rate, a single-axis thermal
/// velocity per event, the resulting phonon kick, and a Poisson photon
/// count with mean equal to the kick. Deterministic per seed.
pub fn simulate_stream(s: &CollisionScenario, duration: f64, seed: u64) -> Result<CollisionStream> {
    if !(duration > 0.0) {
        return Err(Error::Parameter(format!("duration must be > 0, got {duration}")));
    }
    let rate = collision_rate(&s.particle, &s.gas);
    let kick_stats = phonon_kick(&s.particle, &s.gas, s.omega_j, s.elasticity, s.surface_temperature);
    let tau = if s.g_j * s.alpha_j == 0.0 {
        f64::INFINITY
    } else {
        pulse_duration(s.g_j, s.alpha_j, s.kappa_j)?
    };
    let is_resolvable = resolvable(tau, rate);

    let mut arrivals = GaussianStream::new(seed, 0);
    let mut kicks = GaussianStream::new(seed, 1);
    let mut photons = crate::rng::stream(seed, 2);

    // Per-event kick from the single-axis Maxwell-Boltzmann marginal:
    // v ~ N(0, k_B T / m_m), n0 = 2 m_m^2 v^2 / (hbar omega_j m).
    let sigma_v = (K_B * s.governing_temperature() / s.gas.molecule_mass).sqrt();
    let kick_coeff =
        2.0 * s.gas.molecule_mass * s.gas.molecule_mass / (HBAR * s.omega_j * s.particle.mass());

    let mut events = Vec::new();
    if rate > 0.0 {
        let mut t = 0.0;
        loop {
            let u: f64 = 1.0 - arrivals.uniform();
            t += -u.ln() / rate;
            if t >= duration {
                break;
            }
            let v = sigma_v * kicks.draw();
            let kick = kick_coeff * v * v;
            let detected = if kick > 0.0 {
                Poisson::new(kick)
                    .map(|d| d.sample(&mut photons) as u64)
                    .unwrap_or_else(|_| if photons.gen::<f64>() < kick { 1 } else { 0 })
            } else {
                0
            };
            events.push(CollisionEvent { time: t, phonon_kick: kick, detected_photons: detected });
        }
    }

    Ok(CollisionStream {
        events,
        rate,
        mean_kick: kick_stats.mean_kick,
        resolvable: is_resolvable,
    })
}

/// Invert the photon-count statistics of an inelastic stream for the
/// surface temperature: T̂ = mean(photons)·ħω_j·m/(2·m_m·k_B).
pub fn estimate_surface_temperature(
    events: &[CollisionEvent],
    p: &Particle,
    g: &GasEnvironment,
    omega_j: f64,
) -> Result<f64> {
    if events.is_empty() {
        return Err(Error::Parameter("cannot estimate a temperature from zero events".into()));
    }
    let mean_photons =
        events.iter().map(|e| e.detected_photons as f64).sum::<f64>() / events.len() as f64;
    Ok(mean_photons * HBAR * omega_j * p.mass() / (2.0 * g.molecule_mass * K_B))
}

/// CSV dump: `t_s,n_kick,photons`.
pub fn write_events_csv<W: Write>(events: &[CollisionEvent], mut w: W) -> std::io::Result<()> {
    writeln!(w, "t_s,n_kick,photons")?;
    for e in events {
        writeln!(w, "{:.16e},{:.16e},{}", e.time, e.phonon_kick, e.detected_photons)?;
    }
    Ok(())
}
