//! Power spectral densities: the closed-form thermal spectrum and a Welch
//! averaged-periodogram estimator for simulated trajectories.
//!
//! Convention: `Spectrum::values` holds the symmetric spectral density
//! S(ω) tabulated on the non-negative angular-frequency grid, so the
//! position variance is (1/π)·∫₀^∞ S(ω) dω. The thermal oscillator then
//! reads S(ω) = (2k_BT/M)·Γ/((Ω²−ω²)² + ω²Γ²) and a white position noise
//! of variance σ² sampled at spacing dt is flat at σ²·dt.

use super::Trajectory;
use crate::constants::K_B;
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::io::Write;

/// How a [`Spectrum`] was produced.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum Estimator {
    /// Closed-form evaluation of the thermal spectrum.
    Analytic,
    /// Averaged periodogram with the stated segmentation.
    Welch { segment_len: usize, overlap: f64, window: &'static str },
}

/// One-sided tabulation of a power spectral density.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Spectrum {
    /// Strictly increasing angular-frequency grid (rad/s).
    pub omega: Vec<f64>,
    /// Spectral density values (m²·s), non-negative.
    pub values: Vec<f64>,
    pub estimator: Estimator,
}

impl Spectrum {
    /// CSV dump: `omega_rad_s,psd_m2_s`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega_rad_s,psd_m2_s")?;
        for (om, v) in self.omega.iter().zip(&self.values) {
            writeln!(w, "{om:.16e},{v:.16e}")?;
        }
        Ok(())
    }
}

/// Thermal spectrum S(ω) = (2k_BT/M)·Γ/((Ω²−ω²)² + ω²Γ²) on `omega_grid`.
///
/// With feedback, pass the effective temperature and total damping; the
/// functional form is unchanged.
pub fn analytic_psd(
    mass: f64,
    temperature: f64,
    gamma: f64,
    omega0: f64,
    omega_grid: &[f64],
) -> Spectrum {
    let amp = 2.0 * K_B * temperature / mass * gamma;
    let values = omega_grid
        .iter()
        .map(|&w| {
            let d = (omega0 * omega0 - w * w).powi(2) + w * w * gamma * gamma;
            amp / d
        })
        .collect();
    Spectrum { omega: omega_grid.to_vec(), values, estimator: Estimator::Analytic }
}

/// Position variance implied by the spectrum: (1/π)·∫ S dω (trapezoid).
pub fn integrated_variance(spec: &Spectrum) -> f64 {
    let mut acc = 0.0;
    for i in 1..spec.omega.len() {
        let dw = spec.omega[i] - spec.omega[i - 1];
        acc += 0.5 * (spec.values[i] + spec.values[i - 1]) * dw;
    }
    acc / PI
}

/// Welch estimate with the default segmentation (16 segments, 50% overlap,
/// Hann window).
pub fn estimate_psd_default(traj: &Trajectory, axis: usize) -> Result<Spectrum> {
    estimate_psd(traj, axis, 16, 0.5)
}

/// Welch averaged-periodogram estimate of the position PSD of one axis.
///
/// `n_segments` is the requested number of (Hann-windowed) segments and
/// `overlap` the fractional overlap between neighbours.
pub fn estimate_psd(
    traj: &Trajectory,
    axis: usize,
    n_segments: usize,
    overlap: f64,
) -> Result<Spectrum> {
    if axis > 2 {
        return Err(Error::Parameter(format!("axis must be 0..=2, got {axis}")));
    }
    if n_segments == 0 || !(0.0..1.0).contains(&overlap) {
        return Err(Error::Parameter(format!(
            "need n_segments >= 1 and overlap in [0,1), got {n_segments}, {overlap}"
        )));
    }
    let x = &traj.pos[axis];
    let n = x.len();
    if n < 2 * n_segments {
        return Err(Error::Parameter(format!(
            "trajectory of {n} samples is too short for {n_segments} segments"
        )));
    }
    // n = seg + (k-1)*hop with hop = seg*(1-overlap).
    let seg = (n as f64 / (1.0 + (n_segments as f64 - 1.0) * (1.0 - overlap))) as usize;
    let seg = seg.max(8).min(n);
    let hop = ((seg as f64 * (1.0 - overlap)).round() as usize).max(1);

    let mean = crate::stats::mean(x);
    let window: Vec<f64> = (0..seg)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / seg as f64).cos()))
        .collect();
    let win_power: f64 = window.iter().map(|w| w * w).sum::<f64>() / seg as f64;

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(seg);
    let n_bins = seg / 2 + 1;
    let mut acc = vec![0.0f64; n_bins];
    let mut count = 0usize;
    let mut start = 0usize;
    let mut buf = vec![Complex64::default(); seg];
    while start + seg <= n {
        for i in 0..seg {
            buf[i] = Complex64::new((x[start + i] - mean) * window[i], 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += buf[k].norm_sqr();
        }
        count += 1;
        start += hop;
    }

    let scale = traj.dt / (seg as f64 * win_power) / count as f64;
    let values: Vec<f64> = acc.iter().map(|a| a * scale).collect();
    let omega: Vec<f64> = (0..n_bins).map(|k| 2.0 * PI * k as f64 / (seg as f64 * traj.dt)).collect();

    Ok(Spectrum {
        omega,
        values,
        estimator: Estimator::Welch { segment_len: seg, overlap, window: "hann" },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::GaussianStream;
    use approx::assert_relative_eq;

    fn white_noise_trajectory(sigma: f64, dt: f64, n: usize, seed: u64) -> Trajectory {
        let mut g = GaussianStream::new(seed, 0);
        let x: Vec<f64> = (0..n).map(|_| sigma * g.draw()).collect();
        Trajectory {
            dt,
            seed,
            scenario_hash: 0,
            pos: [x.clone(), x.clone(), x],
            vel: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    #[test]
    fn analytic_on_resonance_value() {
        let (m, t, gamma, omega0) = (2.23e-14, 297.0, 2500.0, 2.0 * PI * 9095.0);
        let spec = analytic_psd(m, t, gamma, omega0, &[omega0]);
        let expected = 2.0 * K_B * t / (m * omega0 * omega0 * gamma);
        assert_relative_eq!(spec.values[0], expected, max_relative = 1e-12);
    }

    #[test]
    fn analytic_variance_by_quadrature() {
        // (1/pi) int S domega = k_B T / (M Omega^2), checked to 0.1% with
        // a fine trapezoid grid as the independent quadrature oracle.
        let (m, t, gamma, omega0) = (2.23e-14, 297.0, 2500.0, 2.0 * PI * 9095.0);
        let grid: Vec<f64> = (0..400_000).map(|i| i as f64 * 0.05 * omega0 / 1000.0).collect();
        let spec = analytic_psd(m, t, gamma, omega0, &grid);
        let var = integrated_variance(&spec);
        let expected = K_B * t / (m * omega0 * omega0);
        assert_relative_eq!(var, expected, max_relative = 1e-3);
    }

    #[test]
    fn doubling_gamma_halves_peak_and_preserves_integral() {
        let (m, t, omega0) = (2.23e-14, 297.0, 2.0 * PI * 9095.0);
        let grid: Vec<f64> = (0..200_000).map(|i| i as f64 * omega0 / 20_000.0).collect();
        let a = analytic_psd(m, t, 2000.0, omega0, &grid);
        let b = analytic_psd(m, t, 4000.0, omega0, &grid);
        let peak = |s: &Spectrum| s.values.iter().cloned().fold(0.0f64, f64::max);
        assert_relative_eq!(peak(&a) / peak(&b), 2.0, max_relative = 1e-3);
        assert_relative_eq!(
            integrated_variance(&a),
            integrated_variance(&b),
            max_relative = 1e-3
        );
    }

    #[test]
    fn welch_white_noise_level() {
        let sigma = 2.5e-11;
        let dt = 1e-6;
        let traj = white_noise_trajectory(sigma, dt, 1 << 17, 21);
        let spec = estimate_psd(&traj, 0, 16, 0.5).unwrap();
        let expected = sigma * sigma * dt;
        // Flat at sigma^2 dt within 10%, away from the DC bin.
        let body = &spec.values[2..spec.values.len() - 1];
        let avg = crate::stats::mean(body);
        assert_relative_eq!(avg, expected, max_relative = 0.1);
    }

    #[test]
    fn welch_parseval() {
        let traj = white_noise_trajectory(1e-10, 1e-6, 1 << 16, 5);
        let spec = estimate_psd_default(&traj, 0).unwrap();
        let var_t = crate::stats::variance(&traj.pos[0]);
        let var_f = integrated_variance(&spec);
        assert_relative_eq!(var_f, var_t, max_relative = 0.05);
    }

    #[test]
    fn welch_pure_tone_power() {
        // A pure sinusoid concentrates its power a^2/2 in one spectral peak.
        let dt = 1e-6;
        let n = 1 << 16;
        let a = 3e-9;
        let f0 = 31_250.0; // exactly on a bin for seg = 2^13
        let x: Vec<f64> = (0..n).map(|i| a * (2.0 * PI * f0 * i as f64 * dt).sin()).collect();
        let traj = Trajectory {
            dt,
            seed: 0,
            scenario_hash: 0,
            pos: [x.clone(), x.clone(), x],
            vel: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        };
        let spec = estimate_psd(&traj, 0, 16, 0.5).unwrap();
        let total = integrated_variance(&spec);
        assert_relative_eq!(total, a * a / 2.0, max_relative = 0.05);
        // and the peak sits on the tone frequency
        let peak_idx = spec
            .values
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .unwrap()
            .0;
        assert_relative_eq!(spec.omega[peak_idx], 2.0 * PI * f0, max_relative = 1e-2);
    }

    #[test]
    fn welch_tracks_analytic_spectrum_pointwise() {
        // A simulated thermal run agrees with the closed form bin by bin
        // at the 3-sigma level of the averaged-periodogram variance.
        use crate::langevin::{gas_damping, max_step, simulate, FeedbackConfig};
        use crate::model::{GasEnvironment, Particle, TrapConfig};
        let p = Particle::new(1.38551e-6, 2000.0, 2.1).unwrap();
        let g = GasEnvironment::air(2750.0, 297.0).unwrap();
        let trap = TrapConfig::new(
            [2.0 * PI * 8066.0, 2.0 * PI * 9095.0, 2.0 * PI * 2072.0],
            1064e-9,
            1e9,
        )
        .unwrap();
        let fb = FeedbackConfig::off();
        let gamma0 = gas_damping(&p, &g);
        let dt = max_step(&trap, gamma0, &fb) * 0.9;
        let n_segments = 48;
        let traj = simulate(&p, &g, &trap, &fb, 0.4, dt, 808).unwrap();
        let est = estimate_psd(&traj, 1, n_segments, 0.5).unwrap();
        let truth = analytic_psd(p.mass(), 297.0, gamma0, trap.omega[1], &est.omega);

        // Hann segments at 50% overlap are weakly correlated; ~0.9 K
        // effective averages is the standard estimate.
        let sigma_rel = 1.0 / (0.9 * n_segments as f64).sqrt();
        let omega0 = trap.omega[1];
        let mut outliers = 0;
        let mut total = 0;
        for i in 0..est.omega.len() {
            let w = est.omega[i];
            if w < omega0 / 3.0 || w > 3.0 * omega0 {
                continue;
            }
            total += 1;
            if (est.values[i] / truth.values[i] - 1.0).abs() > 3.0 * sigma_rel {
                outliers += 1;
            }
        }
        assert!(total > 50, "band too narrow: {total} bins");
        // 3 sigma admits ~0.3% outliers; allow a small finite-sample margin.
        assert!(
            (outliers as f64) < 0.03 * total as f64 + 2.0,
            "{outliers} of {total} bins beyond 3 sigma"
        );
    }

    #[test]
    fn spectrum_csv_layout() {
        let spec = Spectrum {
            omega: vec![1.0, 2.0],
            values: vec![3.0, 4.0],
            estimator: Estimator::Analytic,
        };
        let mut buf = Vec::new();
        spec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("omega_rad_s,psd_m2_s\n1.0000000000000000e0,3.0000000000000000e0\n"));
    }

    #[test]
    fn welch_too_short_rejected() {
        let traj = white_noise_trajectory(1e-10, 1e-6, 16, 5);
        assert!(matches!(estimate_psd(&traj, 0, 16, 0.5), Err(Error::Parameter(_))));
    }
}
