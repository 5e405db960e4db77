//! Cross-module invariants: statistical laws of the simulator, estimator
//! consistency, and algebraic properties over randomized inputs.

use levitsim::constants::K_B;
use levitsim::langevin::{self, analytic_psd, estimate_psd, fit_mode, FeedbackConfig, Spectrum};
use levitsim::model::{GasEnvironment, Particle, TrapConfig};
use levitsim::{sensing, stats};
use proptest::prelude::*;
use std::f64::consts::PI;

fn microsphere() -> Particle {
    Particle::new(1.38551e-6, 2000.0, 2.1).unwrap()
}

fn microsphere_trap() -> TrapConfig {
    TrapConfig::new(
        [2.0 * PI * 8066.0, 2.0 * PI * 9095.0, 2.0 * PI * 2072.0],
        1064e-9,
        1e9,
    )
    .unwrap()
}

/// Fitted mode temperature tracks T0 Gamma0/(Gamma0 + Gamma_cool) within
/// 10% across three decades of feedback gain.
#[test]
fn feedback_temperature_law_ladder() {
    let p = microsphere();
    let gas = GasEnvironment::air(41.0, 297.0).unwrap();
    let trap = microsphere_trap();
    let gamma0 = langevin::gas_damping(&p, &gas);

    for (i, ratio) in [1.0, 10.0, 100.0].into_iter().enumerate() {
        let fb = FeedbackConfig::uniform(ratio * gamma0).unwrap();
        let gamma_tot = gamma0 * (1.0 + ratio);
        let dt = langevin::max_step(&trap, gamma0, &fb) * 0.9;
        // Segment length resolving the line: >= 30 bins across Gamma_tot.
        let t_seg = 30.0 * 2.0 * PI / gamma_tot;
        let duration = (t_seg * 12.5).min(6.0); // ~24 segments at 50% overlap
        let traj =
            langevin::simulate(&p, &gas, &trap, &fb, duration, dt, 4242 + i as u64).unwrap();
        let n_seg = ((traj.len() as f64 / (t_seg / traj.dt) - 1.0) * 2.0 + 1.0) as usize;
        let spec = estimate_psd(&traj, 1, n_seg.max(12), 0.5).unwrap();
        let fit = fit_mode(&spec, p.mass()).unwrap();
        let expected = 297.0 * gamma0 / gamma_tot;
        assert!(
            (fit.t_mode / expected - 1.0).abs() < 0.10,
            "ratio {ratio}: fitted {:.3} K vs expected {expected:.3} K",
            fit.t_mode
        );
    }
}

/// The Welch estimate converges to the analytic spectrum as the run grows:
/// the L2 distance falls on a doubling ladder of durations.
#[test]
fn estimator_consistency_doubling_ladder() {
    let p = microsphere();
    let gas = GasEnvironment::air(2750.0, 297.0).unwrap();
    let trap = microsphere_trap();
    let fb = FeedbackConfig::off();
    let gamma0 = langevin::gas_damping(&p, &gas);
    let dt = langevin::max_step(&trap, gamma0, &fb) * 0.9;
    let omega0 = trap.omega[1];

    let l2 = |spec: &Spectrum| {
        let truth = analytic_psd(p.mass(), 297.0, gamma0, omega0, &spec.omega);
        let mut acc = 0.0;
        let mut count = 0;
        for i in 0..spec.omega.len() {
            let w = spec.omega[i];
            if w >= omega0 / 2.0 && w <= 2.0 * omega0 {
                let rel = spec.values[i] / truth.values[i] - 1.0;
                acc += rel * rel;
                count += 1;
            }
        }
        (acc / count as f64).sqrt()
    };

    let base = 0.12;
    let mut distances = Vec::new();
    for (k, segments) in [(1.0, 16), (2.0, 32), (4.0, 64)] {
        let traj = langevin::simulate(&p, &gas, &trap, &fb, base * k, dt, 2026).unwrap();
        let spec = estimate_psd(&traj, 1, segments, 0.5).unwrap();
        distances.push(l2(&spec));
    }
    assert!(
        distances[0] > distances[1] && distances[1] > distances[2],
        "L2 ladder not decreasing: {distances:?}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Identical (config, seed) gives bit-identical trajectories; a
    /// different seed does not.
    #[test]
    fn determinism_by_seed(
        seed in 0u64..u64::MAX / 2,
        pressure in 10.0f64..5000.0,
        temperature in 100.0f64..400.0,
    ) {
        let p = microsphere();
        let gas = GasEnvironment::air(pressure, temperature).unwrap();
        let trap = microsphere_trap();
        let fb = FeedbackConfig::off();
        let dt = langevin::max_step(&trap, langevin::gas_damping(&p, &gas), &fb) * 0.9;
        let a = langevin::simulate(&p, &gas, &trap, &fb, 400.0 * dt, dt, seed).unwrap();
        let b = langevin::simulate(&p, &gas, &trap, &fb, 400.0 * dt, dt, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let c = langevin::simulate(&p, &gas, &trap, &fb, 400.0 * dt, dt, seed + 1).unwrap();
        prop_assert_ne!(&a, &c);
    }

    /// Position variance from the analytic spectrum equals k_B T/(M W^2)
    /// for arbitrary parameters (quadrature to 0.5%).
    #[test]
    fn analytic_psd_variance(
        mass_exp in -18.0f64..-13.0,
        temp in 1.0f64..500.0,
        omega0 in 1e3f64..1e7,
        gamma_frac in 1e-4f64..0.3,
    ) {
        let mass = 10f64.powf(mass_exp);
        let gamma = gamma_frac * omega0;
        let grid: Vec<f64> = (0..60_000).map(|i| i as f64 * omega0 / 6_000.0).collect();
        let spec = analytic_psd(mass, temp, gamma, omega0, &grid);
        let var = langevin::integrated_variance(&spec);
        let expected = K_B * temp / (mass * omega0 * omega0);
        prop_assert!((var / expected - 1.0).abs() < 5e-3,
            "variance {var:.4e} vs {expected:.4e}");
    }

    /// White position noise of a known level comes out flat at sigma^2 dt.
    #[test]
    fn welch_white_noise_is_flat(
        sigma_exp in -12.0f64..-9.0,
        seed in 0u64..1_000_000,
    ) {
        let sigma = 10f64.powf(sigma_exp);
        let dt = 1e-6;
        let n = 1 << 15;
        let mut g = levitsim::rng::GaussianStream::new(seed, 0);
        let x: Vec<f64> = (0..n).map(|_| sigma * g.draw()).collect();
        let traj = levitsim::langevin::Trajectory {
            dt,
            seed,
            scenario_hash: 0,
            pos: [x.clone(), x.clone(), x],
            vel: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        };
        let spec = estimate_psd(&traj, 0, 16, 0.5).unwrap();
        let body = &spec.values[2..spec.values.len() - 1];
        let avg = stats::mean(body);
        prop_assert!((avg / (sigma * sigma * dt) - 1.0).abs() < 0.15);
    }

    /// The recoil-corrected force floor is monotone in radius,
    /// temperature, pressure and trap frequency.
    #[test]
    fn f_min_monotone_everywhere(
        radius in 20e-9f64..5e-6,
        pressure_exp in -8.0f64..1.0,
        temp in 10.0f64..600.0,
        omega_exp in 3.0f64..6.5,
    ) {
        let pressure = 10f64.powf(pressure_exp);
        let omega0 = 2.0 * PI * 10f64.powf(omega_exp);
        let s = sensing::SensingScenario::new(
            Particle::new(radius, 2200.0, 2.1).unwrap(),
            GasEnvironment::air(pressure, temp).unwrap(),
            omega0,
            1.0,
            1064e-9,
        ).unwrap();
        let f0 = sensing::f_min_recoil(&s).f_min;
        for bump in [1.02, 1.3] {
            let mut sr = s; sr.particle.radius = radius * bump;
            prop_assert!(sensing::f_min_recoil(&sr).f_min > f0);
            let mut st = s; st.gas.temperature = temp * bump;
            prop_assert!(sensing::f_min_recoil(&st).f_min >= f0);
            let mut sp = s; sp.gas.pressure = pressure * bump;
            prop_assert!(sensing::f_min_recoil(&sp).f_min > f0);
            let mut sw = s; sw.omega0 = omega0 * bump;
            prop_assert!(sensing::f_min_recoil(&sw).f_min >= f0);
        }
    }

    /// Algebraic scalings of the scalar model operations.
    #[test]
    fn model_scalings(
        mass_exp in -20.0f64..-14.0,
        omega in 1e3f64..1e7,
        temp in 0.0f64..500.0,
    ) {
        let mass = 10f64.powf(mass_exp);
        let z1 = levitsim::model::zero_point_fluctuation(mass, omega).unwrap();
        let z4 = levitsim::model::zero_point_fluctuation(mass, 4.0 * omega).unwrap();
        prop_assert!((z4 / z1 - 0.5).abs() < 1e-12);
        let n1 = levitsim::model::thermal_occupation(temp, omega).unwrap();
        let n2 = levitsim::model::thermal_occupation(2.0 * temp, omega).unwrap();
        prop_assert!((n2 - 2.0 * n1).abs() <= 1e-9 * n1.max(1e-300));
    }
}
