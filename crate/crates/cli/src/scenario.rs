//! Scenario files: strict JSON parsing with explicit unit tags, and
//! resolution into the SI configuration structs the runners consume.
//!
//! Unknown keys are rejected naming the key; missing required fields are
//! rejected naming the field; every dimensioned quantity carries a unit
//! tag and is converted to SI at parse time.

use levitsim::constants::{C_LIGHT, MBAR_TO_PA, TORR_TO_PA};
use levitsim::model::{CavityConfig, GasEnvironment, Particle, TrapConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::PathBuf;

/// Raw scenario file (outer envelope).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub kind: Kind,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Brownian,
    Feedback,
    CavityCool,
    Budget,
    Fock,
    Cat,
    SenseSweep,
    Collide,
}

impl Kind {
    pub fn label(&self) -> &'static str {
        match self {
            Kind::Brownian => "brownian",
            Kind::Feedback => "feedback",
            Kind::CavityCool => "cavity-cool",
            Kind::Budget => "budget",
            Kind::Fock => "fock",
            Kind::Cat => "cat",
            Kind::SenseSweep => "sense-sweep",
            Kind::Collide => "collide",
        }
    }
}

// ── unit-tagged quantities ────────────────────────────────────────────

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PressureQ {
    pub value: f64,
    pub unit: PressureUnit,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub enum PressureUnit {
    #[serde(rename = "Pa")]
    Pa,
    #[serde(rename = "torr")]
    Torr,
    #[serde(rename = "mbar")]
    Mbar,
}

impl PressureQ {
    pub fn pascals(&self) -> f64 {
        match self.unit {
            PressureUnit::Pa => self.value,
            PressureUnit::Torr => self.value * TORR_TO_PA,
            PressureUnit::Mbar => self.value * MBAR_TO_PA,
        }
    }
}

/// Frequency with an explicit convention tag: `Hz` values are ordinary
/// frequencies (multiplied by 2π), `rad_s` values are used as-is.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyQ {
    pub value: f64,
    pub unit: FrequencyUnit,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub enum FrequencyUnit {
    #[serde(rename = "Hz")]
    Hz,
    #[serde(rename = "rad_s")]
    RadS,
}

impl FrequencyQ {
    pub fn angular(&self) -> f64 {
        match self.unit {
            FrequencyUnit::Hz => 2.0 * PI * self.value,
            FrequencyUnit::RadS => self.value,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LengthQ {
    pub value: f64,
    pub unit: LengthUnit,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub enum LengthUnit {
    #[serde(rename = "m")]
    M,
    #[serde(rename = "um")]
    Um,
    #[serde(rename = "nm")]
    Nm,
}

impl LengthQ {
    pub fn meters(&self) -> f64 {
        match self.unit {
            LengthUnit::M => self.value,
            LengthUnit::Um => self.value * 1e-6,
            LengthUnit::Nm => self.value * 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureQ {
    pub value: f64,
    pub unit: TemperatureUnit,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub enum TemperatureUnit {
    #[serde(rename = "K")]
    K,
    #[serde(rename = "mK")]
    MilliK,
}

impl TemperatureQ {
    pub fn kelvin(&self) -> f64 {
        match self.unit {
            TemperatureUnit::K => self.value,
            TemperatureUnit::MilliK => self.value * 1e-3,
        }
    }
}

// ── shared sub-specs ──────────────────────────────────────────────────

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    pub radius: LengthQ,
    /// kg/m³
    pub density: f64,
    pub relative_permittivity: f64,
}

impl ParticleSpec {
    pub fn build(&self) -> Result<Particle, String> {
        Particle::new(self.radius.meters(), self.density, self.relative_permittivity)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSpec {
    pub pressure: PressureQ,
    pub temperature: TemperatureQ,
    /// kg; defaults to the mean air molecule.
    #[serde(default)]
    pub molecule_mass: Option<f64>,
}

impl GasSpec {
    pub fn build(&self) -> Result<GasEnvironment, String> {
        GasEnvironment::new(
            self.pressure.pascals(),
            self.temperature.kelvin(),
            self.molecule_mass.unwrap_or(levitsim::constants::AIR_MOLECULE_MASS),
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSpec {
    /// Per-axis trap frequencies [x, y, z].
    pub frequencies: [FrequencyQ; 3],
    pub wavelength: LengthQ,
    /// W/m²
    #[serde(default)]
    pub intensity: f64,
}

impl TrapSpec {
    pub fn build(&self) -> Result<TrapConfig, String> {
        TrapConfig::new(
            [
                self.frequencies[0].angular(),
                self.frequencies[1].angular(),
                self.frequencies[2].angular(),
            ],
            self.wavelength.meters(),
            self.intensity,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySpec {
    pub length: LengthQ,
    pub waist: LengthQ,
    pub linewidth: FrequencyQ,
    /// Resonance given through its vacuum wavelength.
    pub resonance_wavelength: LengthQ,
}

impl CavitySpec {
    pub fn build(&self) -> Result<CavityConfig, String> {
        let omega_c = 2.0 * PI * C_LIGHT / self.resonance_wavelength.meters();
        CavityConfig::with_default_trap_point(
            self.length.meters(),
            self.waist.meters(),
            self.linewidth.angular(),
            omega_c,
        )
        .map_err(|e| e.to_string())
    }
}

// ── per-kind parameter blocks ─────────────────────────────────────────

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrownianParams {
    pub particle: ParticleSpec,
    pub gas: GasSpec,
    pub trap: TrapSpec,
    /// Simulated time per trajectory (s).
    pub duration: f64,
    /// Integration step (s); defaults to 0.9 of the admissible maximum.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub trajectories: usize,
    #[serde(default = "one")]
    pub record_stride: usize,
    /// Per-axis feedback damping ratios Γ_cool/Γ₀ (default off).
    #[serde(default)]
    pub feedback_ratio: Option<f64>,
    /// Detector averaging window for the velocity histogram (s).
    #[serde(default)]
    pub velocity_window: Option<f64>,
    /// Axis whose velocities feed the histogram (0 = x, 1 = y, 2 = z).
    #[serde(default = "one")]
    pub velocity_axis: usize,
    /// Rows written to trajectory.csv (first trajectory only).
    #[serde(default = "default_trajectory_samples")]
    pub trajectory_samples: usize,
}

fn default_trajectory_samples() -> usize {
    20_000
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackParams {
    pub particle: ParticleSpec,
    pub gas: GasSpec,
    pub trap: TrapSpec,
    /// Ladder of feedback gains in units of Γ₀.
    pub gain_ratios: Vec<f64>,
    /// Simulated time per rung (s).
    pub duration: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_segments")]
    pub segments: usize,
    #[serde(default = "one")]
    pub axis: usize,
}

fn default_segments() -> usize {
    32
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub detuning: FrequencyQ,
    pub strength: FrequencyQ,
    /// W (bookkeeping only).
    #[serde(default)]
    pub power: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub from: FrequencyQ,
    pub to: FrequencyQ,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityCoolParams {
    pub omega_m: FrequencyQ,
    pub kappa: FrequencyQ,
    /// Single-photon coupling g (rad/s convention via the tag).
    pub g: FrequencyQ,
    pub drive: DriveSpec,
    #[serde(default = "default_n_init")]
    pub n_init: f64,
    /// Covariance evolution horizon (s); defaults to 25 cooling times.
    #[serde(default)]
    pub evolve_time: Option<f64>,
    #[serde(default = "default_points")]
    pub time_points: usize,
    /// Optional detuning scan for locating the cooling optimum.
    #[serde(default)]
    pub scan: Option<ScanSpec>,
}

fn default_n_init() -> f64 {
    10.0
}

fn default_points() -> usize {
    200
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// 1/Hz at 2ω.
    pub intensity_noise_psd: f64,
    /// m²/Hz at ω.
    pub pointing_psd: f64,
    pub laser_linewidth: FrequencyQ,
    pub phase_corr_rate: FrequencyQ,
    pub intracavity_photons: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetParams {
    pub particle: ParticleSpec,
    pub gas: GasSpec,
    pub trap: TrapSpec,
    pub cavity: CavitySpec,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub axis: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QndSpec {
    /// Readout duration (s).
    pub time: f64,
    #[serde(default)]
    pub phi0: f64,
    /// Rabi offset from ω_m/2 in units of λ.
    #[serde(default = "default_rabi_offset")]
    pub rabi_offset_lambdas: f64,
}

fn default_rabi_offset() -> f64 {
    5.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockParams {
    pub particle: ParticleSpec,
    pub omega_m: FrequencyQ,
    /// Magnetic gradient (T/m).
    pub gradient: f64,
    pub target_n: usize,
    #[serde(default = "default_fock_dim")]
    pub dim: usize,
    #[serde(default)]
    pub qnd: Option<QndSpec>,
}

fn default_fock_dim() -> usize {
    64
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatParams {
    pub particle: ParticleSpec,
    pub omega_m2: FrequencyQ,
    /// Magnetic gradient (T/m).
    pub gradient: f64,
    #[serde(default)]
    pub n_init: usize,
    #[serde(default)]
    pub dim: Option<usize>,
    /// Time-of-flight before imaging (s).
    #[serde(default = "default_flight")]
    pub flight_time: f64,
    #[serde(default = "default_fringe_points")]
    pub fringe_points: usize,
    /// Plotted span in fringe periods.
    #[serde(default = "default_fringe_span")]
    pub fringe_span_periods: f64,
}

fn default_flight() -> f64 {
    10e-3
}

fn default_fringe_points() -> usize {
    400
}

fn default_fringe_span() -> f64 {
    8.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusGrid {
    pub min: LengthQ,
    pub max: LengthQ,
    pub points: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub min: FrequencyQ,
    pub max: FrequencyQ,
    pub points: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SenseSweepParams {
    pub particle: ParticleSpec,
    pub gas: GasSpec,
    pub omega0: FrequencyQ,
    /// Measurement bandwidth (Hz).
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
    pub wavelength: LengthQ,
    /// Residual backaction rate R₊ (1/s).
    #[serde(default)]
    pub r_plus: f64,
    /// Exactly one of the two grids selects the sweep variable.
    #[serde(default)]
    pub radius_grid: Option<RadiusGrid>,
    #[serde(default)]
    pub frequency_grid: Option<FrequencyGrid>,
}

fn default_bandwidth() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollideParams {
    pub particle: ParticleSpec,
    pub gas: GasSpec,
    pub omega: FrequencyQ,
    /// Output coupling g_j (rad/s).
    pub g: FrequencyQ,
    /// Intracavity amplitude |α_j|.
    pub alpha: f64,
    pub kappa: FrequencyQ,
    pub surface_temperature: TemperatureQ,
    pub elasticity: levitsim::collision::Elasticity,
    /// Observation time (s).
    pub duration: f64,
}

/// Parsed and kind-dispatched scenario.
#[derive(Debug)]
pub enum Params {
    Brownian(BrownianParams),
    Feedback(FeedbackParams),
    CavityCool(CavityCoolParams),
    Budget(BudgetParams),
    Fock(FockParams),
    Cat(CatParams),
    SenseSweep(SenseSweepParams),
    Collide(CollideParams),
}

#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub params: Params,
    /// Canonical JSON of the envelope (sorted keys), hashed into the
    /// manifest.
    pub canonical: String,
}

/// Parse and validate scenario JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario, String> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| format!("scenario parse error: {e}"))?;
    let params = match file.kind {
        Kind::Brownian => Params::Brownian(from_params(file.params.clone())?),
        Kind::Feedback => Params::Feedback(from_params(file.params.clone())?),
        Kind::CavityCool => Params::CavityCool(from_params(file.params.clone())?),
        Kind::Budget => Params::Budget(from_params(file.params.clone())?),
        Kind::Fock => Params::Fock(from_params(file.params.clone())?),
        Kind::Cat => Params::Cat(from_params(file.params.clone())?),
        Kind::SenseSweep => Params::SenseSweep(from_params(file.params.clone())?),
        Kind::Collide => Params::Collide(from_params(file.params.clone())?),
    };
    let canonical = serde_json::to_string(&serde_json::json!({
        "name": file.name,
        "kind": file.kind.label(),
        "seed": file.seed,
        "params": file.params,
    }))
    .expect("canonical serialization");
    Ok(Scenario { name: file.name, kind: file.kind, seed: file.seed, output: file.output, params, canonical })
}

fn from_params<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, String> {
    serde_json::from_value(v).map_err(|e| format!("scenario parameter error: {e}"))
}
