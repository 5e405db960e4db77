//! Mode-temperature extraction: Levenberg-Marquardt fit of the thermal
//! spectrum to an estimated PSD, in log space with an analytic Jacobian.

use super::psd::Spectrum;
use crate::constants::K_B;
use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};

/// Result of fitting the thermal spectrum to a measured PSD.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ModeFit {
    /// Effective mode temperature (K).
    pub t_mode: f64,
    /// Total damping Γ_tot (1/s).
    pub gamma_tot: f64,
    /// Fitted resonance frequency (rad/s).
    pub omega_fit: f64,
    /// RMS residual of the log-spectrum fit (dimensionless).
    pub residual: f64,
}

const MAX_ITER: usize = 200;
const GRAD_TOL: f64 = 1e-10;

/// Fit S(ω) = (2k_BT/M)·Γ/((Ω²−ω²)² + ω²Γ²) to `spec` for a particle of
/// mass `mass`, over the band [Ω̂/3, 3Ω̂] around the spectral peak.
///
/// Parameters are fitted as logarithms so positivity is structural; the
/// iteration stops when the relative gradient falls below 1e-10 or after
/// 200 steps, whichever comes first.
pub fn fit_mode(spec: &Spectrum, mass: f64) -> Result<ModeFit> {
    if spec.omega.len() < 8 {
        return Err(Error::Parameter("spectrum too short to fit".into()));
    }

    // Peak of a lightly smoothed spectrum as the initial resonance guess.
    let smoothed = box_smooth(&spec.values, 2);
    let (peak_idx, peak_val) = smoothed
        .iter()
        .enumerate()
        .skip(1) // never the DC bin
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, v)| (i, *v))
        .unwrap();
    let omega_peak = spec.omega[peak_idx];
    if !(omega_peak > 0.0) || !(peak_val > 0.0) {
        return Err(Error::Parameter("no positive spectral peak found".into()));
    }

    let lo = omega_peak / 3.0;
    let hi = 3.0 * omega_peak;
    if spec.omega[0] > lo || *spec.omega.last().unwrap() < hi {
        return Err(Error::Parameter(format!(
            "spectrum must cover [{lo:.3e}, {hi:.3e}] rad/s around the peak"
        )));
    }

    let mut omegas = Vec::new();
    let mut log_data = Vec::new();
    for (i, &w) in spec.omega.iter().enumerate() {
        if w >= lo && w <= hi && spec.values[i] > 0.0 {
            omegas.push(w);
            log_data.push(spec.values[i].ln());
        }
    }
    if omegas.len() < 8 {
        return Err(Error::Parameter("too few positive bins in the fit band".into()));
    }

    // Initial width from the half-maximum crossing of the smoothed peak,
    // falling back to a tenth of the resonance.
    let half = peak_val / 2.0;
    let mut gamma0 = omega_peak / 10.0;
    for i in peak_idx..smoothed.len() {
        if smoothed[i] < half {
            gamma0 = 2.0 * (spec.omega[i] - omega_peak).max(spec.omega[1] - spec.omega[0]);
            break;
        }
    }
    let t0 = (peak_val * mass * omega_peak * omega_peak * gamma0 / (2.0 * K_B)).max(1e-12);

    // p = (ln T, ln Gamma, ln Omega)
    let mut p = Vector3::new(t0.ln(), gamma0.ln(), omega_peak.ln());
    let model_offset = (2.0 * K_B / mass).ln();

    let residuals = |p: &Vector3<f64>| -> (Vec<f64>, f64) {
        let (t, g, om) = (p[0].exp(), p[1].exp(), p[2].exp());
        let mut r = Vec::with_capacity(omegas.len());
        let mut cost = 0.0;
        for (i, &w) in omegas.iter().enumerate() {
            let d = (om * om - w * w).powi(2) + w * w * g * g;
            let model = model_offset + t.ln() + g.ln() - d.ln();
            let ri = model - log_data[i];
            cost += ri * ri;
            r.push(ri);
        }
        (r, cost)
    };

    let (mut r, mut cost) = residuals(&p);
    let mut lambda = 1e-3;
    let mut converged = false;

    for _ in 0..MAX_ITER {
        let (g, om) = (p[1].exp(), p[2].exp());
        // Analytic Jacobian of the log-model.
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (i, &w) in omegas.iter().enumerate() {
            let d = (om * om - w * w).powi(2) + w * w * g * g;
            let j = Vector3::new(
                1.0,
                1.0 - 2.0 * w * w * g * g / d,
                -4.0 * om * om * (om * om - w * w) / d,
            );
            jtj += j * j.transpose();
            jtr += j * r[i];
        }

        if jtr.amax() < GRAD_TOL * cost.max(1.0) {
            converged = true;
            break;
        }

        // Damped normal equations; retry with stiffer damping on failure.
        let mut accepted = false;
        for _ in 0..12 {
            let mut a = jtj;
            for k in 0..3 {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            if let Some(delta) = a.lu().solve(&(-jtr)) {
                let p_new = p + delta;
                let (r_new, cost_new) = residuals(&p_new);
                if cost_new.is_finite() && cost_new < cost {
                    p = p_new;
                    r = r_new;
                    cost = cost_new;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            converged = true; // stuck at a (local) minimum
            break;
        }
    }

    let residual = (cost / omegas.len() as f64).sqrt();
    if !converged {
        return Err(Error::Fit(format!(
            "no convergence after {MAX_ITER} iterations (rms log residual {residual:.3e})"
        )));
    }
    Ok(ModeFit { t_mode: p[0].exp(), gamma_tot: p[1].exp(), omega_fit: p[2].exp(), residual })
}

fn box_smooth(values: &[f64], half: usize) -> Vec<f64> {
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}
