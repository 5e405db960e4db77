//! Linearized cavity optomechanics: dispersive coupling geometry for the
//! TEM00/TEM01/TEM10 cooling modes, drive self-consistency, sideband-cooling
//! steady state, second-moment dynamics, phonon-to-light state transfer and
//! the parametric squeezing variance.
//!
//! Axes are indexed [x, y, z] throughout; TEM00 couples to motion along z,
//! TEM01 along x and TEM10 along y. Sign convention: cooling requires an
//! effective detuning Δ' < 0 (drive below cavity resonance), and the
//! stability products S1/S2 are evaluated with |Δ'|.

use crate::model::{mass_of, zero_point_fluctuation, CavityConfig, CavityMode, DriveConfig, Particle};
use crate::{ode, Error, Result};
use num_complex::Complex64;
use serde::ser::SerializeStruct;

/// Self-consistent working point of one driven cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptoCoupling {
    /// Single-photon optomechanical coupling g (rad/s).
    pub g: f64,
    /// Steady intracavity amplitude α_c (dimensionless).
    pub alpha_c: Complex64,
    /// Effective detuning Δ' = Δ + 2g²|α_c|²/ω_m (rad/s).
    pub delta_eff: f64,
}

impl OptoCoupling {
    /// Linearized coupling magnitude g·|α_c| (rad/s).
    pub fn g_alpha(&self) -> f64 {
        self.g * self.alpha_c.norm()
    }
}

/// Solve the coupled relations α_c = iΩ/(2iΔ' − κ) and
/// Δ' = Δ + 2g²|α_c|²/ω_m for the working point.
///
/// Damped fixed-point iteration (damping 0.5) with a bisection fallback;
/// the result satisfies both relations to 1e-10 relative.
pub fn solve_coupling(
    g: f64,
    omega_m: f64,
    kappa: f64,
    drive: &DriveConfig,
) -> Result<OptoCoupling> {
    if !(omega_m > 0.0) || !(kappa > 0.0) {
        return Err(Error::Domain(format!(
            "omega_m and kappa must be > 0, got {omega_m}, {kappa}"
        )));
    }
    let delta = drive.detuning;
    let omega_drive = drive.drive_strength;
    let alpha_sq = |d: f64| omega_drive * omega_drive / (4.0 * d * d + kappa * kappa);
    let map = |d: f64| delta + 2.0 * g * g * alpha_sq(d) / omega_m;

    let scale = delta.abs().max(kappa).max(omega_m);
    let tol = 1e-13 * scale;
    let mut d = delta;
    let mut converged = false;
    for _ in 0..10_000 {
        let next = 0.5 * d + 0.5 * map(d);
        if (next - d).abs() <= tol {
            d = next;
            converged = true;
            break;
        }
        d = next;
    }
    if !converged {
        // The shift term is bounded, so the root is bracketed.
        let mut lo = delta;
        let mut hi = delta + 2.0 * g * g * omega_drive * omega_drive / (omega_m * kappa * kappa);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if map(mid) - mid >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        d = 0.5 * (lo + hi);
    }

    let alpha_c = Complex64::new(0.0, omega_drive) / Complex64::new(-kappa, 2.0 * d);
    Ok(OptoCoupling { g, alpha_c, delta_eff: d })
}

/// Cavity frequency shift U_j(x, y, z) (rad/s) induced by the particle in
/// the given transverse mode, in the large-permittivity limit.
pub fn coupling_profile(p: &Particle, cav: &CavityConfig, mode: CavityMode, pos: [f64; 3]) -> f64 {
    let [x, y, z] = pos;
    let w2 = cav.waist * cav.waist;
    let radial = (-2.0 * (x * x + y * y) / w2).exp();
    let k = cav.wavevector();
    let phase = cav.mode_phases[mode_index(mode)];
    let standing = (k * z + phase).cos().powi(2);
    let amp = 3.0 * p.volume() / (2.0 * cav.mode_volume(mode)) * cav.omega_c;
    let transverse = match mode {
        CavityMode::Tem00 => 1.0,
        CavityMode::Tem01 => x * x / w2,
        CavityMode::Tem10 => y * y / w2,
    };
    -amp * transverse * radial * standing
}

fn mode_index(mode: CavityMode) -> usize {
    match mode {
        CavityMode::Tem00 => 0,
        CavityMode::Tem01 => 1,
        CavityMode::Tem10 => 2,
    }
}

/// Single-photon coupling g_j = q_zpf,j · ∂U/∂q_j (rad/s) for displacement
/// along `axis` (0 = x, 1 = y, 2 = z) of the mechanical mode with frequency
/// `omega_j`, evaluated at `pos` by a 5-point central difference with step
/// 1e-6·w.
pub fn coupling_strength(
    p: &Particle,
    cav: &CavityConfig,
    mode: CavityMode,
    axis: usize,
    pos: [f64; 3],
    omega_j: f64,
) -> Result<f64> {
    if axis > 2 {
        return Err(Error::Parameter(format!("axis must be 0..=2, got {axis}")));
    }
    let h = 1e-6 * cav.waist;
    if !(h > 0.0) || !h.is_finite() || pos[axis].abs() + 2.0 * h == pos[axis].abs() {
        return Err(Error::Parameter(format!("derivative step {h:.3e} underflows at {pos:?}")));
    }
    let eval = |delta: f64| {
        let mut q = pos;
        q[axis] += delta;
        coupling_profile(p, cav, mode, q)
    };
    let derivative =
        (-eval(2.0 * h) + 8.0 * eval(h) - 8.0 * eval(-h) + eval(-2.0 * h)) / (12.0 * h);
    let zpf = zero_point_fluctuation(mass_of(p), omega_j)?;
    Ok(zpf * derivative)
}

/// Stability products and sideband-cooling steady state of a driven mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingResult {
    pub g: f64,
    pub alpha_c: Complex64,
    pub delta_eff: f64,
    /// Steady phonon number; `None` on the heating side (Δ' >= 0), where
    /// the cooling formula does not apply.
    pub n_final: Option<f64>,
    /// Cooling rate g²|α_c|²/[κ(1 + κ²/(16ω_m²))] (1/s).
    pub gamma: f64,
    pub s1: f64,
    pub s2: f64,
    /// S1 > 0 and S2 > 0.
    pub stable: bool,
    /// Δ' >= 0: the drive heats rather than cools.
    pub heating_side: bool,
    /// κ <= ω_m/10 (resolved-sideband regime), reported, not enforced.
    pub resolved_sideband: bool,
    /// g|α_c| <= κ/10 (weak-coupling validity of the formulas).
    pub weak_coupling: bool,
}

impl serde::Serialize for CoolingResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct C {
            re: f64,
            im: f64,
        }
        let mut st = s.serialize_struct("CoolingResult", 8)?;
        st.serialize_field("g", &self.g)?;
        st.serialize_field("alpha_c", &C { re: self.alpha_c.re, im: self.alpha_c.im })?;
        st.serialize_field("delta_eff", &self.delta_eff)?;
        st.serialize_field("n_final", &self.n_final)?;
        st.serialize_field("gamma", &self.gamma)?;
        st.serialize_field("s1", &self.s1)?;
        st.serialize_field("s2", &self.s2)?;
        st.serialize_field("stable", &self.stable)?;
        st.end()
    }
}

/// Sideband-cooling steady state for the working point `coupling`.
pub fn steady_state(coupling: &OptoCoupling, omega_m: f64, kappa: f64) -> CoolingResult {
    let d = coupling.delta_eff;
    let ga = coupling.g_alpha();
    let ga2 = ga * ga;
    let s1 = 4.0 * d.abs() * omega_m * ga2 * kappa * kappa;
    let s2 = omega_m * d * d - ga2 * d.abs();
    let heating_side = d >= 0.0;
    let n_final = if heating_side {
        None
    } else {
        Some(-((omega_m + d).powi(2) + (kappa / 2.0).powi(2)) / (4.0 * omega_m * d))
    };
    let gamma = ga2 / (kappa * (1.0 + kappa * kappa / (16.0 * omega_m * omega_m)));
    CoolingResult {
        g: coupling.g,
        alpha_c: coupling.alpha_c,
        delta_eff: d,
        n_final,
        gamma,
        s1,
        s2,
        stable: s1 > 0.0 && s2 > 0.0,
        heating_side,
        resolved_sideband: kappa <= omega_m / 10.0,
        weak_coupling: ga <= kappa / 10.0,
    }
}

/// Second-moment dynamics of the coupled (cavity, phonon) pair with a
/// vacuum optical input: returns the phonon occupation at each requested
/// time of the ascending grid `t_grid`.
///
/// Errors with the violated criterion if the linearized system is outside
/// its S2 stability region.
pub fn covariance_dynamics(
    coupling: &OptoCoupling,
    omega_m: f64,
    kappa: f64,
    n_init: f64,
    t_grid: &[f64],
) -> Result<Vec<f64>> {
    let d = coupling.delta_eff;
    let ga = coupling.g_alpha();
    let s2 = omega_m * d * d - ga * ga * d.abs();
    if ga > 0.0 && s2 <= 0.0 {
        return Err(Error::Instability(format!(
            "S2 = {s2:.3e} <= 0: g|alpha_c| = {ga:.3e} exceeds sqrt(omega_m |delta'|) = {:.3e}",
            (omega_m * d.abs()).sqrt()
        )));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.iter().any(|&t| t < 0.0) {
        return Err(Error::Parameter("time grid must be ascending and non-negative".into()));
    }

    // v = (a_c, a_c!, a_m, a_m!); moments Sigma_ij = <v_i v_j> evolve as
    // Sigma' = M Sigma + Sigma M^T + D with D_(0,1) = kappa (vacuum input).
    let i = Complex64::i();
    let gc = Complex64::new(coupling.g, 0.0) * coupling.alpha_c;
    let gcc = gc.conj();
    let zero = Complex64::default();
    let m: [[Complex64; 4]; 4] = [
        [i * d - kappa / 2.0, zero, -i * gc, -i * gc],
        [zero, -i * d - kappa / 2.0, i * gcc, i * gcc],
        [-i * gcc, -i * gc, -i * omega_m, zero],
        [i * gcc, i * gc, zero, i * omega_m],
    ];

    let deriv = move |_t: f64, s: &[Complex64]| {
        let at = |r: usize, c: usize| s[4 * r + c];
        let mut out = vec![zero; 16];
        for r in 0..4 {
            for c in 0..4 {
                let mut v = zero;
                for k in 0..4 {
                    v += m[r][k] * at(k, c) + at(r, k) * m[c][k];
                }
                if r == 0 && c == 1 {
                    v += Complex64::new(kappa, 0.0);
                }
                out[4 * r + c] = v;
            }
        }
        out
    };

    let mut sigma = vec![zero; 16];
    sigma[1] = Complex64::new(1.0, 0.0); // <a_c a_c!> vacuum
    sigma[4 * 2 + 3] = Complex64::new(n_init + 1.0, 0.0);
    sigma[4 * 3 + 2] = Complex64::new(n_init, 0.0);

    let atol = 1e-12 * (n_init + 1.0);
    let mut out = Vec::with_capacity(t_grid.len());
    let mut t_prev = 0.0;
    for &t in t_grid {
        sigma = ode::integrate(&deriv, t_prev, t, sigma, 1e-8, atol);
        t_prev = t;
        out.push(sigma[4 * 3 + 2].re);
    }
    Ok(out)
}

/// Phonon-to-output-light mapping in the adiabatic (κ ≫ g|α_c|) regime at
/// Δ' = −ω_m.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StateTransfer {
    /// Phonon amplitude decay rate 2g²|α_c|²/κ (1/s).
    pub transfer_rate: f64,
    /// Coefficient of a_m in a_out (modulus; the full coefficient is
    /// −i·2gα_c/√κ).
    pub output_coupling: f64,
}

/// Map the mechanical mode onto the cavity output field.
///
/// Preconditions: Δ' = −ω_m (to 1e-6 relative) and κ >= 10·g|α_c|; a
/// violation is reported as a validity error naming the failed inequality.
pub fn state_transfer(coupling: &OptoCoupling, omega_m: f64, kappa: f64) -> Result<StateTransfer> {
    let d = coupling.delta_eff;
    if (d + omega_m).abs() > 1e-6 * omega_m {
        return Err(Error::Validity(format!(
            "state transfer needs delta_eff = -omega_m; got delta_eff = {d:.6e}, -omega_m = {:.6e}",
            -omega_m
        )));
    }
    let ga = coupling.g_alpha();
    if kappa < 10.0 * ga {
        return Err(Error::Validity(format!(
            "state transfer needs kappa >> g|alpha_c|; got kappa = {kappa:.3e} < 10 x {ga:.3e}"
        )));
    }
    Ok(StateTransfer {
        transfer_rate: 2.0 * ga * ga / kappa,
        output_coupling: 2.0 * ga / kappa.sqrt(),
    })
}

/// Output-field squeezing from parametric trap modulation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Squeezing {
    /// Variance of the squeezed output quadrature at ω = 0, relative to
    /// the unit vacuum variance: (5/16)(κ/ω_m)².
    pub variance: f64,
    /// The same in dB: 10·log₁₀(variance).
    pub decibels: f64,
}

/// Variance of the squeezed output quadrature for linewidth `kappa` and
/// mechanical frequency `omega_m`. The threshold-limit conditions under
/// which the formula holds are assumed, not verified.
pub fn squeezing_variance(kappa: f64, omega_m: f64) -> Squeezing {
    let variance = 5.0 / 16.0 * (kappa / omega_m).powi(2);
    Squeezing { variance, decibels: 10.0 * variance.log10() }
}
