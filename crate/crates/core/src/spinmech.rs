//! Spin-phonon protocols for an optically trapped nanodiamond with a
//! built-in NV center: Jaynes-Cummings Fock-state preparation, QND phonon
//! readout via the spin phase, spatial cat-state generation through the
//! spin-dependent displacement, and the resulting time-of-flight fringes.
//!
//! States live in a truncated (spin ⊗ Fock) space; piecewise-constant
//! Hamiltonians are applied through dense matrix exponentials
//! (scaling-and-squaring), which is exact up to truncation for the modest
//! dimensions involved.

use crate::constants::{G_S, HBAR, MU_B};
use crate::model::{zero_point_fluctuation, Particle};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Spin-level sets used by the protocols.
///
/// `PlusMinus` is the microwave-dressed two-level basis {|+>, |->} of the
/// J-C/QND protocols (index 0 = |+>, 1 = |->). `Triplet` keeps the bare
/// ground-state levels for the cat protocol, ordered |0>, |+1>, |-1>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinBasis {
    PlusMinus,
    Triplet,
}

impl SpinBasis {
    pub fn levels(&self) -> usize {
        match self {
            SpinBasis::PlusMinus => 2,
            SpinBasis::Triplet => 3,
        }
    }
}

/// Pure state on (spin levels) x (Fock truncation) with leak bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinPhononState {
    pub basis: SpinBasis,
    pub dim_fock: usize,
    amps: Vec<Complex64>,
    /// Accumulated truncation-tail norm plus numerical norm drift.
    pub leak: f64,
}

impl SpinPhononState {
    /// Basis state |spin_idx> ⊗ |n>.
    pub fn fock(basis: SpinBasis, spin_idx: usize, n: usize, dim_fock: usize) -> Result<Self> {
        if spin_idx >= basis.levels() {
            return Err(Error::Parameter(format!(
                "spin index {spin_idx} out of range for {basis:?}"
            )));
        }
        if n >= dim_fock {
            return Err(Error::Truncation(format!(
                "Fock index {n} does not fit a truncation of {dim_fock}"
            )));
        }
        let mut amps = vec![Complex64::default(); basis.levels() * dim_fock];
        amps[spin_idx * dim_fock + n] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, dim_fock, amps, leak: 0.0 })
    }

    /// (|+1> + |-1>)/sqrt(2) ⊗ |n> in the triplet basis.
    pub fn cat_initial(n: usize, dim_fock: usize) -> Result<Self> {
        if n >= dim_fock {
            return Err(Error::Truncation(format!(
                "Fock index {n} does not fit a truncation of {dim_fock}"
            )));
        }
        let mut amps = vec![Complex64::default(); 3 * dim_fock];
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[dim_fock + n] = w; // |+1>
        amps[2 * dim_fock + n] = w; // |-1>
        Ok(Self { basis: SpinBasis::Triplet, dim_fock, amps, leak: 0.0 })
    }

    /// Build from raw amplitudes (renormalized).
    pub fn from_amplitudes(basis: SpinBasis, dim_fock: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.levels() * dim_fock {
            return Err(Error::Parameter(format!(
                "expected {} amplitudes, got {}",
                basis.levels() * dim_fock,
                amps.len()
            )));
        }
        let mut state = Self { basis, dim_fock, amps, leak: 0.0 };
        let n = state.norm();
        if !(n > 0.0) {
            return Err(Error::Parameter("cannot normalize a zero state".into()));
        }
        for a in &mut state.amps {
            *a /= n;
        }
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, spin_idx: usize, n: usize) -> Complex64 {
        self.amps[spin_idx * self.dim_fock + n]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Leak below the 1e-6 invalidation threshold.
    pub fn is_valid(&self) -> bool {
        self.leak < 1e-6
    }

    /// Phonon-number populations, traced over the spin.
    pub fn phonon_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.dim_fock];
        for s in 0..self.basis.levels() {
            for n in 0..self.dim_fock {
                p[n] += self.amp(s, n).norm_sqr();
            }
        }
        p
    }

    pub fn mean_phonon(&self) -> f64 {
        self.phonon_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn spin_population(&self, spin_idx: usize) -> f64 {
        (0..self.dim_fock).map(|n| self.amp(spin_idx, n).norm_sqr()).sum()
    }

    /// Motional amplitudes attached to one spin level.
    pub fn branch_motional(&self, spin_idx: usize) -> Vec<Complex64> {
        self.amps[spin_idx * self.dim_fock..(spin_idx + 1) * self.dim_fock].to_vec()
    }

    /// Position expectation <x>/x_zpf of the motional state conditioned on
    /// `spin_idx`, with x = x_zpf·(a + a!). `None` if the branch is empty.
    pub fn branch_centroid(&self, spin_idx: usize) -> Option<f64> {
        let branch = &self.amps[spin_idx * self.dim_fock..(spin_idx + 1) * self.dim_fock];
        let pop: f64 = branch.iter().map(|a| a.norm_sqr()).sum();
        if pop < 1e-300 {
            return None;
        }
        let mut x = 0.0;
        for n in 0..self.dim_fock - 1 {
            x += 2.0 * (branch[n + 1].conj() * branch[n]).re * ((n + 1) as f64).sqrt();
        }
        Some(x / pop)
    }

    fn tail_occupancy(&self, levels: usize) -> f64 {
        let lo = self.dim_fock.saturating_sub(levels);
        (0..self.basis.levels())
            .map(|s| (lo..self.dim_fock).map(|n| self.amp(s, n).norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Serializable dump: dimension, basis and interleaved re/im pairs.
    pub fn dump(&self) -> StateDump {
        let mut amplitudes = Vec::with_capacity(2 * self.amps.len());
        for a in &self.amps {
            amplitudes.push(a.re);
            amplitudes.push(a.im);
        }
        StateDump {
            dim: self.dim_fock,
            spin_basis: match self.basis {
                SpinBasis::PlusMinus => "plus-minus",
                SpinBasis::Triplet => "triplet",
            },
            amplitudes,
        }
    }
}

/// JSON-friendly state snapshot.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StateDump {
    pub dim: usize,
    pub spin_basis: &'static str,
    /// Interleaved [re0, im0, re1, im1, ...].
    pub amplitudes: Vec<f64>,
}

/// Piecewise-constant Hamiltonians of the protocols (rates in rad/s,
/// written with ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "tag", rename_all = "UPPERCASE")]
pub enum Hamiltonian {
    /// λ(σ₊a + σ₋a!): exchanges one spin excitation for one phonon.
    Jc { lambda: f64 },
    /// λ(σ₊a! + σ₋a): joint excitation (anti-Jaynes-Cummings).
    Ajc { lambda: f64 },
    /// χ·σ_z·a!a: phonon-number-dependent spin phase.
    Qnd { chi: f64 },
    /// ω·a!a: free oscillator.
    Free { omega: f64 },
    /// ω·a!a + λ·S_z·(a + a!): spin-dependent displacement (triplet).
    Cat { omega: f64, lambda: f64 },
}

impl Hamiltonian {
    /// Basis the Hamiltonian is defined on; `None` means either works.
    pub fn required_basis(&self) -> Option<SpinBasis> {
        match self {
            Hamiltonian::Jc { .. } | Hamiltonian::Ajc { .. } | Hamiltonian::Qnd { .. } => {
                Some(SpinBasis::PlusMinus)
            }
            Hamiltonian::Cat { .. } => Some(SpinBasis::Triplet),
            Hamiltonian::Free { .. } => None,
        }
    }

    fn matrix(&self, basis: SpinBasis, dim: usize) -> DMatrix<Complex64> {
        let levels = basis.levels();
        let size = levels * dim;
        let mut h = DMatrix::<Complex64>::zeros(size, size);
        let idx = |s: usize, n: usize| s * dim + n;
        let re = |v: f64| Complex64::new(v, 0.0);
        match *self {
            Hamiltonian::Jc { lambda } => {
                // sigma_+ a couples |-, n+1> -> |+, n>.
                for n in 0..dim - 1 {
                    let v = re(lambda * ((n + 1) as f64).sqrt());
                    h[(idx(0, n), idx(1, n + 1))] += v;
                    h[(idx(1, n + 1), idx(0, n))] += v;
                }
            }
            Hamiltonian::Ajc { lambda } => {
                // sigma_+ a! couples |-, n> -> |+, n+1>.
                for n in 0..dim - 1 {
                    let v = re(lambda * ((n + 1) as f64).sqrt());
                    h[(idx(0, n + 1), idx(1, n))] += v;
                    h[(idx(1, n), idx(0, n + 1))] += v;
                }
            }
            Hamiltonian::Qnd { chi } => {
                for n in 0..dim {
                    h[(idx(0, n), idx(0, n))] = re(chi * n as f64);
                    h[(idx(1, n), idx(1, n))] = re(-chi * n as f64);
                }
            }
            Hamiltonian::Free { omega } => {
                for s in 0..levels {
                    for n in 0..dim {
                        h[(idx(s, n), idx(s, n))] = re(omega * n as f64);
                    }
                }
            }
            Hamiltonian::Cat { omega, lambda } => {
                // S_z eigenvalues over the triplet ordering |0>, |+1>, |-1>.
                let sz = [0.0, 1.0, -1.0];
                for (s, &szv) in sz.iter().enumerate() {
                    for n in 0..dim {
                        h[(idx(s, n), idx(s, n))] = re(omega * n as f64);
                    }
                    for n in 0..dim - 1 {
                        let v = re(lambda * szv * ((n + 1) as f64).sqrt());
                        h[(idx(s, n + 1), idx(s, n))] += v;
                        h[(idx(s, n), idx(s, n + 1))] += v;
                    }
                }
            }
        }
        h
    }

    /// Tag used in serialized pulse sequences.
    pub fn tag(&self) -> &'static str {
        match self {
            Hamiltonian::Jc { .. } => "JC",
            Hamiltonian::Ajc { .. } => "AJC",
            Hamiltonian::Qnd { .. } => "QND",
            Hamiltonian::Free { .. } => "FREE",
            Hamiltonian::Cat { .. } => "CAT",
        }
    }
}

/// Ordered pulse steps (Hamiltonian, duration).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PulseSequence {
    pub steps: Vec<(Hamiltonian, f64)>,
}

impl PulseSequence {
    pub fn new(steps: Vec<(Hamiltonian, f64)>) -> Result<Self> {
        for (h, t) in &steps {
            if !(*t > 0.0) {
                return Err(Error::Parameter(format!(
                    "step {} must have a positive duration, got {t}",
                    h.tag()
                )));
            }
        }
        Ok(Self { steps })
    }

    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(|(_, t)| t).sum()
    }
}

/// Unitary evolution of `state` under `hamiltonian` for time `t`.
///
/// Truncation guards: the top two Fock levels must hold less than 1e-8 of
/// the population on entry, and less than 1e-6 may sit on the very top
/// level afterwards; either violation is a truncation error advising a
/// larger dimension. The post-step tail and any numerical norm drift are
/// accumulated into `leak` before renormalization.
pub fn evolve(state: &SpinPhononState, hamiltonian: Hamiltonian, t: f64) -> Result<SpinPhononState> {
    if let Some(required) = hamiltonian.required_basis() {
        if required != state.basis {
            return Err(Error::Parameter(format!(
                "{} requires the {required:?} basis, state is {:?}",
                hamiltonian.tag(),
                state.basis
            )));
        }
    }
    let margin = state.tail_occupancy(2);
    if margin > 1e-8 {
        return Err(Error::Truncation(format!(
            "top-2 Fock levels already hold {margin:.3e} of the population; \
             increase the truncation dimension"
        )));
    }

    let h = hamiltonian.matrix(state.basis, state.dim_fock);
    let u = (h * Complex64::new(0.0, -t)).exp();
    let psi = nalgebra::DVector::from_column_slice(&state.amps);
    let evolved = u * psi;

    let mut out = SpinPhononState {
        basis: state.basis,
        dim_fock: state.dim_fock,
        amps: evolved.iter().copied().collect(),
        leak: state.leak,
    };
    let top = out.tail_occupancy(1);
    if top > 1e-6 {
        return Err(Error::Truncation(format!(
            "top Fock level reached occupancy {top:.3e} > 1e-6; \
             increase the truncation dimension"
        )));
    }
    let nrm = out.norm();
    out.leak += out.tail_occupancy(2) + (1.0 - nrm).abs();
    for a in &mut out.amps {
        *a /= nrm;
    }
    Ok(out)
}

/// Apply the steps of `seq` in order.
pub fn apply_sequence(state: &SpinPhononState, seq: &PulseSequence) -> Result<SpinPhononState> {
    let mut s = state.clone();
    for (h, t) in &seq.steps {
        s = evolve(&s, *h, *t)?;
    }
    Ok(s)
}

/// Spin-phonon coupling λ = g_s·μ_B·G·a₀/ħ (rad/s) for magnetic gradient
/// `gradient` and a mode of frequency `omega_m`.
pub fn spin_coupling(p: &Particle, omega_m: f64, gradient: f64) -> Result<f64> {
    if !(gradient >= 0.0) {
        return Err(Error::Domain(format!("magnetic gradient must be >= 0, got {gradient}")));
    }
    let a0 = zero_point_fluctuation(p.mass(), omega_m)?;
    Ok(G_S * MU_B * gradient * a0 / HBAR)
}

/// Microwave and gradient parameters of one NV scenario.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpinConfig {
    /// Magnetic field gradient along the NV axis (T/m).
    pub magnetic_gradient: f64,
    /// Effective Rabi parameter Ω of the dressed basis (rad/s).
    pub rabi: f64,
    /// Microwave detuning (rad/s).
    pub microwave_detuning: f64,
}

impl SpinConfig {
    pub fn new(magnetic_gradient: f64, rabi: f64, microwave_detuning: f64) -> Result<Self> {
        if !(magnetic_gradient >= 0.0) {
            return Err(Error::Domain(format!(
                "magnetic gradient must be >= 0, got {magnetic_gradient}"
            )));
        }
        Ok(Self { magnetic_gradient, rabi, microwave_detuning })
    }
}

/// Result of a Fock-state preparation.
#[derive(Debug, Clone)]
pub struct FockPreparation {
    pub sequence: PulseSequence,
    pub state: SpinPhononState,
    /// |<target|final>|² against the ideal |±> ⊗ |n>.
    pub fidelity: f64,
}

/// Prepare |n> from |+, 0> by alternating J-C and anti-J-C pulses with
/// durations t_i = π/(2λ√i).
pub fn prepare_fock(n: usize, lambda: f64, dim: usize) -> Result<FockPreparation> {
    if dim < n + 5 {
        return Err(Error::Truncation(format!(
            "dimension {dim} leaves no margin above the target |{n}>; need at least {}",
            n + 5
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
    }
    let t1 = PI / (2.0 * lambda);
    let steps: Vec<(Hamiltonian, f64)> = (1..=n)
        .map(|i| {
            let h = if i % 2 == 1 {
                Hamiltonian::Jc { lambda }
            } else {
                Hamiltonian::Ajc { lambda }
            };
            (h, t1 / (i as f64).sqrt())
        })
        .collect();
    let sequence = PulseSequence::new(steps)?;
    let initial = SpinPhononState::fock(SpinBasis::PlusMinus, 0, 0, dim)?;
    let state = apply_sequence(&initial, &sequence)?;
    let target_spin = n % 2; // |+> after even step counts, |-> after odd
    let fidelity = state.amp(target_spin, n).norm_sqr();
    Ok(FockPreparation { sequence, state, fidelity })
}

/// Dispersive QND rate χ = 4Ωλ²/(4Ω² − ω_m²) and whether the dispersive
/// condition |Ω − ω_m/2| >= 5λ holds.
pub fn qnd_chi(rabi: f64, lambda: f64, omega_m: f64) -> (f64, bool) {
    let chi = 4.0 * rabi * lambda * lambda / (4.0 * rabi * rabi - omega_m * omega_m);
    let valid = (rabi.abs() - omega_m / 2.0).abs() >= 5.0 * lambda;
    (chi, valid)
}

/// Interferometer phase picked up per Fock component under the QND
/// interaction.
#[derive(Debug, Clone, serde::Serialize)]
pub struct QndReadout {
    /// (n, population, φ₀ + 2χ·n·t) per occupied Fock component.
    pub components: Vec<(usize, f64, f64)>,
    /// Ramsey fringe expectation ⟨cos φ⟩ over the phonon distribution.
    pub fringe_expectation: f64,
}

/// Phase distribution of a spin superposition (|+> + e^{iφ₀}|->)/√2 read
/// out against the phonon number: φ_n(t) = φ₀ + 2χ·n·t.
pub fn qnd_readout(state: &SpinPhononState, chi: f64, phi0: f64, t: f64) -> QndReadout {
    let dist = state.phonon_distribution();
    let mut components = Vec::new();
    let mut fringe = 0.0;
    for (n, &p) in dist.iter().enumerate() {
        let phase = phi0 + 2.0 * chi * n as f64 * t;
        fringe += p * phase.cos();
        if p > 1e-12 {
            components.push((n, p, phase));
        }
    }
    QndReadout { components, fringe_expectation: fringe }
}

/// Free-flight interference model of a prepared cat.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FringeModel {
    /// Particle mass (kg).
    pub mass: f64,
    /// Packet separation D_m at release (m).
    pub d_m: f64,
    /// Zero-point spread of the release trap (m).
    pub a2: f64,
}

impl FringeModel {
    /// Fringe period Δz = 2πħt/(m·D_m) after flight time `t`.
    pub fn period(&self, t: f64) -> f64 {
        2.0 * PI * HBAR * t / (self.mass * self.d_m)
    }

    /// Unnormalized interference intensity |ψ(z, t)|² of the two-packet
    /// superposition released from rest (vacuum-packet cats; `sign` +1
    /// for the even cat, -1 for the odd one).
    pub fn pattern(&self, z: f64, t: f64, sign: f64) -> f64 {
        let beta = Complex64::new(self.a2 * self.a2, HBAR * t / (2.0 * self.mass));
        let g = |center: f64| {
            let dz = Complex64::new(z - center, 0.0);
            (-dz * dz / (4.0 * beta)).exp()
        };
        let psi = g(self.d_m / 2.0) + g(-self.d_m / 2.0) * sign;
        psi.norm_sqr()
    }
}

/// Output of the cat-state protocol.
#[derive(Debug, Clone)]
pub struct CatProtocol {
    /// Spin-phonon coupling at the release frequency (rad/s).
    pub lambda: f64,
    /// Zero-point spread a₂ of the release trap (m).
    pub a2: f64,
    /// Closed-form maximum packet separation D_m = 8λa₂/ω (m).
    pub d_m: f64,
    /// Truncation dimension used.
    pub dim: usize,
    /// Entangled state at half the trap period, before disentangling.
    pub state_half_period: SpinPhononState,
    /// Conditional-centroid separation measured on the evolved state (m).
    pub separation: f64,
    /// Motional cat after the conditional spin flip (spin level |0>).
    pub disentangled: SpinPhononState,
    pub fringe: FringeModel,
}

/// Truncation dimension holding a displaced Fock state of amplitude
/// `beta` on top of `n_init` with a Poisson-tail safety margin.
pub fn cat_dimension(beta: f64, n_init: usize) -> usize {
    let n = n_init as f64;
    let needed = beta * beta + n + 6.0 * beta * (2.0 * n + 1.0).sqrt() + 10.0;
    (needed.ceil() as usize).max(32)
}

/// Run the cat protocol: prepare (|+1> + |-1>)/√2 ⊗ |n_init> in a trap of
/// frequency `omega_m2` (the state-preserving frequency quenches are
/// modeled as re-labelling the Fock index in the new trap basis), evolve
/// the spin-dependent displacement for half a period, measure the packet
/// separation, and disentangle the spin by a conditional flip into |0>.
pub fn cat_protocol(
    p: &Particle,
    omega_m2: f64,
    gradient: f64,
    n_init: usize,
    dim: Option<usize>,
) -> Result<CatProtocol> {
    let lambda = spin_coupling(p, omega_m2, gradient)?;
    let a2 = zero_point_fluctuation(p.mass(), omega_m2)?;
    let d_m = 8.0 * lambda * a2 / omega_m2;
    let beta = 2.0 * lambda / omega_m2; // = D_m / 4a2
    let dim = dim.unwrap_or_else(|| cat_dimension(beta, n_init));

    let initial = SpinPhononState::cat_initial(n_init, dim)?;
    let half_period = PI / omega_m2;
    let state = evolve(&initial, Hamiltonian::Cat { omega: omega_m2, lambda }, half_period)?;

    let up = state.branch_centroid(1);
    let down = state.branch_centroid(2);
    let separation = match (up, down) {
        (Some(u), Some(d)) => (u - d).abs() * a2,
        _ => 0.0,
    };

    // Conditional spin flip: both displacement branches land in |0> with
    // their motional content intact (the branches are orthogonal to
    // ~exp(-2 beta^2), so the map is norm-preserving in practice).
    let plus_branch = state.branch_motional(1);
    let minus_branch = state.branch_motional(2);
    let mut amps = vec![Complex64::default(); 3 * dim];
    for n in 0..dim {
        amps[n] = plus_branch[n] + minus_branch[n];
    }
    let disentangled = SpinPhononState::from_amplitudes(SpinBasis::Triplet, dim, amps)?;

    Ok(CatProtocol {
        lambda,
        a2,
        d_m,
        dim,
        state_half_period: state,
        separation,
        disentangled,
        fringe: FringeModel { mass: p.mass(), d_m, a2 },
    })
}
