//! Stochastic center-of-mass dynamics of the trapped particle.
//!
//! Integrates, per axis, the damped-driven oscillator
//! `ẍ + Γ_tot ẋ + Ω² x = ζ(t) √(2 k_B T Γ₀ / M)` where the velocity
//! feedback adds damping Γ_cool without the corresponding stochastic
//! drive, which is what cools the mode to T₀·Γ₀/Γ_tot.
//!
//! The integrator is a stochastic leapfrog: velocity-Verlet for the
//! conservative part with the exact Ornstein-Uhlenbeck update spliced in
//! for damping plus noise, so the stationary distribution is preserved
//! far better than plain Euler-Maruyama at the same step size.

mod fit;
mod psd;

pub use fit::{fit_mode, ModeFit};
pub use psd::{analytic_psd, estimate_psd, estimate_psd_default, integrated_variance, Estimator, Spectrum};

use crate::constants::K_B;
use crate::model::{GasEnvironment, Particle, TrapConfig};
use crate::rng::GaussianStream;
use crate::{exec, Error, Result};
use std::f64::consts::PI;
use std::io::Write;

/// Velocity-feedback ("cold damping") settings, one rate per axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FeedbackConfig {
    /// Added damping Γ_cool per axis (1/s); zero disables feedback.
    pub gamma_cool: [f64; 3],
}

impl FeedbackConfig {
    pub fn new(gamma_cool: [f64; 3]) -> Result<Self> {
        for (i, g) in gamma_cool.iter().enumerate() {
            if !(*g >= 0.0) {
                return Err(Error::Domain(format!("gamma_cool[{i}] must be >= 0, got {g}")));
            }
        }
        Ok(Self { gamma_cool })
    }

    /// Feedback off on all axes.
    pub fn off() -> Self {
        Self { gamma_cool: [0.0; 3] }
    }

    /// Same cooling rate on all three axes.
    pub fn uniform(gamma: f64) -> Result<Self> {
        Self::new([gamma; 3])
    }
}

/// Uniformly sampled phase-space record of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Spacing between stored samples (s). Equals the integration step
    /// times the recording stride.
    pub dt: f64,
    /// Master seed that produced this run.
    pub seed: u64,
    /// Digest of the physical configuration (FNV-1a over the SI fields).
    pub scenario_hash: u64,
    /// Positions per axis (m).
    pub pos: [Vec<f64>; 3],
    /// Velocities per axis (m/s).
    pub vel: [Vec<f64>; 3],
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.pos[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 * self.dt
    }

    /// CSV dump: `t,x,y,z,vx,vy,vz`, SI units, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,y,z,vx,vy,vz")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                i as f64 * self.dt,
                self.pos[0][i],
                self.pos[1][i],
                self.pos[2][i],
                self.vel[0][i],
                self.vel[1][i],
                self.vel[2][i],
            )?;
        }
        Ok(())
    }
}

/// Gas damping rate γ_g = (16/π)·P/(v̄·r·ρ) (1/s).
pub fn gas_damping(p: &Particle, g: &GasEnvironment) -> f64 {
    16.0 / PI * g.pressure / (g.mean_speed() * p.radius * p.density)
}

/// Optional controls for [`simulate_with`]; `Default` gives the standard
/// thermal run used by [`simulate`].
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    /// Start from this (position, velocity) per axis instead of drawing
    /// from the stationary distribution.
    pub initial: Option<([f64; 3], [f64; 3])>,
    /// Force the stochastic drive to zero (deterministic damped motion).
    pub zero_noise: bool,
    /// Keep every `record_stride`-th sample. Values > 1 thin long runs
    /// whose samples would otherwise be strongly correlated.
    pub record_stride: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { initial: None, zero_noise: false, record_stride: 1 }
    }
}

/// Largest admissible integration step for the given configuration:
/// one twentieth of the fastest oscillation or damping time.
pub fn max_step(trap: &TrapConfig, gamma0: f64, fb: &FeedbackConfig) -> f64 {
    let mut fastest = f64::INFINITY;
    for j in 0..3 {
        let gamma_tot = gamma0 + fb.gamma_cool[j];
        fastest = fastest.min(1.0 / trap.omega[j]);
        if gamma_tot > 0.0 {
            fastest = fastest.min(1.0 / gamma_tot);
        }
    }
    fastest / 20.0
}

fn scenario_hash(
    p: &Particle,
    g: &GasEnvironment,
    trap: &TrapConfig,
    fb: &FeedbackConfig,
    duration: f64,
    dt: f64,
    seed: u64,
) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325; // FNV-1a
    let mut eat = |v: f64| {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    for v in [p.radius, p.density, p.relative_permittivity, g.pressure, g.temperature,
              g.molecule_mass, trap.wavelength, trap.intensity, duration, dt] {
        eat(v);
    }
    for j in 0..3 {
        eat(trap.omega[j]);
        eat(fb.gamma_cool[j]);
    }
    eat(seed as f64);
    h
}

/// Thermal run with equilibrium initial conditions; see [`simulate_with`].
pub fn simulate(
    p: &Particle,
    g: &GasEnvironment,
    trap: &TrapConfig,
    fb: &FeedbackConfig,
    duration: f64,
    dt: f64,
    seed: u64,
) -> Result<Trajectory> {
    simulate_with(p, g, trap, fb, duration, dt, seed, &SimOptions::default())
}

/// Integrate the three axes with independent noise streams.
///
/// Bit-reproducible for a fixed `(seed, dt, duration, options)`; the axis
/// streams are derived from the seed so distinct trajectories or axes can
/// run concurrently without sharing state.
#[allow(clippy::too_many_arguments)]
pub fn simulate_with(
    p: &Particle,
    g: &GasEnvironment,
    trap: &TrapConfig,
    fb: &FeedbackConfig,
    duration: f64,
    dt: f64,
    seed: u64,
    options: &SimOptions,
) -> Result<Trajectory> {
    simulate_stream_block(p, g, trap, fb, duration, dt, seed, 0, options)
}

/// Number of RNG stream ids reserved per trajectory (one per axis plus one
/// spare), used to keep ensemble members independent.
const STREAMS_PER_TRAJECTORY: u64 = 4;

#[allow(clippy::too_many_arguments)]
fn simulate_stream_block(
    p: &Particle,
    g: &GasEnvironment,
    trap: &TrapConfig,
    fb: &FeedbackConfig,
    duration: f64,
    dt: f64,
    seed: u64,
    stream_block: u64,
    options: &SimOptions,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(duration > 0.0) {
        return Err(Error::Parameter(format!(
            "duration and dt must be > 0, got duration={duration}, dt={dt}"
        )));
    }
    let gamma0 = gas_damping(p, g);
    let dt_max = max_step(trap, gamma0, fb);
    if dt > dt_max {
        return Err(Error::StepSize(format!(
            "dt = {dt:.3e} s exceeds the admissible {dt_max:.3e} s \
             (1/20 of the fastest trap/damping time scale)"
        )));
    }
    let n_steps = (duration / dt).round() as u64;
    if n_steps == 0 || n_steps > (1 << 33) {
        return Err(Error::Parameter(format!(
            "duration/dt = {n_steps} steps is outside the supported range"
        )));
    }
    let stride = options.record_stride.max(1) as u64;
    let n_rec = (n_steps / stride) as usize;
    if n_rec == 0 {
        return Err(Error::Parameter(
            "record stride leaves no samples; lower the stride or extend the run".into(),
        ));
    }

    let mass = p.mass();
    let temp = g.temperature;
    let mut pos: [Vec<f64>; 3] = Default::default();
    let mut vel: [Vec<f64>; 3] = Default::default();

    for axis in 0..3 {
        let omega = trap.omega[axis];
        let gamma_tot = gamma0 + fb.gamma_cool[axis];
        // Effective temperature of the stationary state under feedback.
        let t_eff = if gamma_tot > 0.0 { temp * gamma0 / gamma_tot } else { temp };
        let mut gauss =
            GaussianStream::new(seed, stream_block * STREAMS_PER_TRAJECTORY + axis as u64);

        let (mut x, mut v) = match options.initial {
            Some((xs, vs)) => (xs[axis], vs[axis]),
            None => {
                let sx = (K_B * t_eff / (mass * omega * omega)).sqrt();
                let sv = (K_B * t_eff / mass).sqrt();
                (sx * gauss.draw(), sv * gauss.draw())
            }
        };

        // Exact OU coefficients for the damping + noise half of the step.
        let decay = (-gamma_tot * dt).exp();
        let sigma = if options.zero_noise || gamma_tot == 0.0 {
            0.0
        } else {
            (K_B * temp * gamma0 / (mass * gamma_tot) * (1.0 - decay * decay)).sqrt()
        };

        let mut xs = Vec::with_capacity(n_rec);
        let mut vs = Vec::with_capacity(n_rec);
        for step in 1..=n_steps {
            v += -0.5 * dt * omega * omega * x;
            x += 0.5 * dt * v;
            v = decay * v + sigma * gauss.draw();
            x += 0.5 * dt * v;
            v += -0.5 * dt * omega * omega * x;
            if step % stride == 0 && xs.len() < n_rec {
                xs.push(x);
                vs.push(v);
            }
        }
        pos[axis] = xs;
        vel[axis] = vs;
    }

    Ok(Trajectory {
        dt: dt * stride as f64,
        seed,
        scenario_hash: scenario_hash(p, g, trap, fb, duration, dt, seed),
        pos,
        vel,
    })
}

/// Simulate `n_traj` statistically independent runs of the same scenario,
/// in parallel when the `parallel` feature is enabled. Trajectory `i`
/// consumes its own RNG stream block, so the result does not depend on
/// scheduling.
#[allow(clippy::too_many_arguments)]
pub fn ensemble(
    p: &Particle,
    g: &GasEnvironment,
    trap: &TrapConfig,
    fb: &FeedbackConfig,
    duration: f64,
    dt: f64,
    seed: u64,
    n_traj: usize,
    options: &SimOptions,
) -> Result<Vec<Trajectory>> {
    exec::map_indexed(n_traj, |i| {
        simulate_stream_block(p, g, trap, fb, duration, dt, seed, i as u64, options)
    })
    .into_iter()
    .collect()
}

/// Sequential twin of [`ensemble`] (reference baseline for the benches).
#[allow(clippy::too_many_arguments)]
pub fn ensemble_seq(
    p: &Particle,
    g: &GasEnvironment,
    trap: &TrapConfig,
    fb: &FeedbackConfig,
    duration: f64,
    dt: f64,
    seed: u64,
    n_traj: usize,
    options: &SimOptions,
) -> Result<Vec<Trajectory>> {
    exec::map_indexed_seq(n_traj, |i| {
        simulate_stream_block(p, g, trap, fb, duration, dt, seed, i as u64, options)
    })
    .into_iter()
    .collect()
}

/// Velocity estimates recovered from position differences over a finite
/// measurement window, as a real detector would produce them.
#[derive(Debug, Clone)]
pub struct VelocityStats {
    /// Finite-difference velocity samples (m/s).
    pub samples: Vec<f64>,
    /// Root-mean-square of the samples (m/s).
    pub v_rms: f64,
    /// Averaging window actually used (s), a multiple of the sample step.
    pub window: f64,
    /// Histogram bin centers (m/s).
    pub bin_centers: Vec<f64>,
    /// Histogram counts.
    pub bin_counts: Vec<u64>,
    /// Declared bin width (m/s).
    pub bin_width: f64,
}

/// Estimate instantaneous velocities of one axis by differencing positions
/// across `window` seconds.
pub fn instantaneous_velocity(traj: &Trajectory, axis: usize, window: f64) -> Result<VelocityStats> {
    if axis > 2 {
        return Err(Error::Parameter(format!("axis must be 0..=2, got {axis}")));
    }
    if window < traj.dt {
        return Err(Error::Parameter(format!(
            "window {window:.3e} s is below the sample spacing {:.3e} s",
            traj.dt
        )));
    }
    let k = (window / traj.dt).round().max(1.0) as usize;
    let x = &traj.pos[axis];
    if x.len() <= k {
        return Err(Error::Parameter("trajectory too short for the requested window".into()));
    }
    let w = k as f64 * traj.dt;
    let samples: Vec<f64> = (0..x.len() - k).map(|i| (x[i + k] - x[i]) / w).collect();
    let v_rms = crate::stats::rms(&samples);
    let span = 4.5 * v_rms.max(f64::MIN_POSITIVE);
    let bins = 61;
    let (bin_centers, bin_counts, bin_width) = crate::stats::histogram(&samples, -span, span, bins);
    Ok(VelocityStats { samples, v_rms, window: w, bin_centers, bin_counts, bin_width })
}
