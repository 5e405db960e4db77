//! Scenario execution: dispatch to the library modules, emit CSV/JSON
//! artifacts plus a summary, and close with the run manifest.

use crate::manifest::{sha256_hex, Emitter, RunManifest};
use crate::scenario::{
    BrownianParams, BudgetParams, CatParams, CavityCoolParams, CollideParams, FeedbackParams,
    FockParams, Params, Scenario, SenseSweepParams, Spacing,
};
use levitsim::langevin::{self, FeedbackConfig, SimOptions};
use levitsim::model::zero_point_fluctuation;
use levitsim::{cavity, collision, noise, sensing, spinmech, stats};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Tabular artifact encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Failures split by exit code: configuration problems exit 2, numerical
/// or validity problems exit 3.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }

    pub fn to_json(&self, scenario: &str) -> Value {
        let (class, msg) = match self {
            RunError::Config(m) => ("config", m),
            RunError::Numerical(m) => ("numerical", m),
        };
        json!({ "error": class, "scenario": scenario, "message": msg })
    }
}

fn numerical(e: levitsim::Error) -> RunError {
    RunError::Numerical(e.to_string())
}

fn io_err(e: std::io::Error) -> RunError {
    RunError::Numerical(format!("io error: {e}"))
}

/// Render one table either as canonical CSV (numbers at 17 significant
/// digits) or as a JSON array of row objects.
fn table_bytes(format: Format, columns: &[&str], rows: &[Vec<Value>]) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&columns.join(","));
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) => {
                            if let Some(i) = n.as_i64() {
                                format!("{i}")
                            } else {
                                format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN))
                            }
                        }
                        Value::String(s) => s.clone(),
                        Value::Null => "nan".into(),
                        other => other.to_string(),
                    })
                    .collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out.into_bytes()
        }
        Format::Json => {
            let objects: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (c, v) in columns.iter().zip(row) {
                        obj.insert((*c).to_string(), v.clone());
                    }
                    Value::Object(obj)
                })
                .collect();
            serde_json::to_vec_pretty(&objects).expect("table serialization")
        }
    }
}

fn table_name(format: Format, stem: &str) -> String {
    match format {
        Format::Csv => format!("{stem}.csv"),
        Format::Json => format!("{stem}.json"),
    }
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

/// Execute one scenario, writing its artifacts under `dir`.
pub fn run_scenario(scenario: &Scenario, dir: &Path, format: Format) -> Result<PathBuf, RunError> {
    let mut emitter = Emitter::new(dir).map_err(io_err)?;
    let resolved = match &scenario.params {
        Params::Brownian(p) => run_brownian(scenario, p, &mut emitter, format)?,
        Params::Feedback(p) => run_feedback(scenario, p, &mut emitter, format)?,
        Params::CavityCool(p) => run_cavity_cool(scenario, p, &mut emitter, format)?,
        Params::Budget(p) => run_budget(scenario, p, &mut emitter)?,
        Params::Fock(p) => run_fock(scenario, p, &mut emitter)?,
        Params::Cat(p) => run_cat(scenario, p, &mut emitter, format)?,
        Params::SenseSweep(p) => run_sense_sweep(scenario, p, &mut emitter, format)?,
        Params::Collide(p) => run_collide(scenario, p, &mut emitter, format)?,
    };

    let manifest = RunManifest {
        scenario: scenario.name.clone(),
        kind: scenario.kind.label(),
        scenario_hash: sha256_hex(scenario.canonical.as_bytes()),
        toolkit_version: env!("CARGO_PKG_VERSION"),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default().as_secs(),
        seed: scenario.seed,
        resolved_params: resolved,
        files: emitter.records().to_vec(),
    };
    emitter.finish(&manifest).map_err(io_err)?;
    Ok(dir.join("manifest.json"))
}

fn run_brownian(
    scenario: &Scenario,
    p: &BrownianParams,
    emitter: &mut Emitter,
    format: Format,
) -> Result<Value, RunError> {
    let particle = p.particle.build().map_err(RunError::Config)?;
    let gas = p.gas.build().map_err(RunError::Config)?;
    let trap = p.trap.build().map_err(RunError::Config)?;
    let gamma0 = langevin::gas_damping(&particle, &gas);
    let fb = match p.feedback_ratio {
        Some(r) => FeedbackConfig::uniform(r * gamma0).map_err(numerical)?,
        None => FeedbackConfig::off(),
    };
    let dt = p.dt.unwrap_or_else(|| langevin::max_step(&trap, gamma0, &fb) * 0.9);
    let opts = SimOptions { initial: None, zero_noise: false, record_stride: p.record_stride };
    let ensemble = langevin::ensemble(
        &particle, &gas, &trap, &fb, p.duration, dt, scenario.seed, p.trajectories, &opts,
    )
    .map_err(numerical)?;

    // Leading rows of the first trajectory.
    let first = &ensemble[0];
    let rows: Vec<Vec<Value>> = (0..first.len().min(p.trajectory_samples))
        .map(|i| {
            vec![
                num(i as f64 * first.dt),
                num(first.pos[0][i]),
                num(first.pos[1][i]),
                num(first.pos[2][i]),
                num(first.vel[0][i]),
                num(first.vel[1][i]),
                num(first.vel[2][i]),
            ]
        })
        .collect();
    emitter
        .write(
            &table_name(format, "trajectory"),
            &table_bytes(format, &["t", "x", "y", "z", "vx", "vy", "vz"], &rows),
        )
        .map_err(io_err)?;

    let axis = p.velocity_axis.min(2);
    let pooled: Vec<f64> = ensemble.iter().flat_map(|t| t.vel[axis].iter().copied()).collect();
    let v_rms = stats::rms(&pooled);
    let sigma = (levitsim::constants::K_B * gas.temperature
        * (gamma0 / (gamma0 + fb.gamma_cool[axis]))
        / particle.mass())
    .sqrt();
    // The KS test assumes independent draws: thin the pool to ~5 velocity
    // correlation times regardless of the recording stride.
    let gamma_tot = gamma0 + fb.gamma_cool[axis];
    let ks_step = ((5.0 / gamma_tot / first.dt).ceil() as usize).max(1);
    let ks_pool: Vec<f64> = pooled.iter().copied().step_by(ks_step).collect();
    let ks = stats::ks_statistic(&ks_pool, |v| stats::normal_cdf(v, 0.0, sigma));
    let ks_crit = stats::ks_critical(ks_pool.len(), 0.01);

    // Detector-style windowed velocity estimates and their histogram.
    let mut windowed_rms = None;
    if let Some(window) = p.velocity_window {
        let mut samples = Vec::new();
        for traj in &ensemble {
            let vs = langevin::instantaneous_velocity(traj, axis, window).map_err(numerical)?;
            samples.extend(vs.samples);
        }
        let rms = stats::rms(&samples);
        let span = 4.5 * rms;
        let (centers, counts, width) = stats::histogram(&samples, -span, span, 61);
        let rows: Vec<Vec<Value>> = centers
            .iter()
            .zip(&counts)
            .map(|(c, n)| vec![num(*c), Value::from(*n)])
            .collect();
        emitter
            .write(
                &table_name(format, "velocity_histogram"),
                &table_bytes(format, &["v_m_per_s", "count"], &rows),
            )
            .map_err(io_err)?;
        windowed_rms = Some(json!({
            "v_rms_windowed": rms,
            "window_s": window,
            "bin_width": width,
            "samples": samples.len(),
        }));
    }

    let summary = json!({
        "v_rms": v_rms,
        "v_rms_equipartition": (levitsim::constants::K_B * gas.temperature / particle.mass()).sqrt(),
        "ks_statistic": ks,
        "ks_critical_1pct": ks_crit,
        "ks_pass_1pct": ks < ks_crit,
        "n_velocity_samples": pooled.len(),
        "n_ks_samples": ks_pool.len(),
        "windowed": windowed_rms,
    });
    emitter
        .write("summary.json", &serde_json::to_vec_pretty(&summary).unwrap())
        .map_err(io_err)?;

    Ok(json!({
        "particle": particle,
        "gas": gas,
        "trap": trap,
        "feedback": fb,
        "gamma_gas": gamma0,
        "duration": p.duration,
        "dt": dt,
        "trajectories": p.trajectories,
        "record_stride": p.record_stride,
        "velocity_axis": axis,
    }))
}

fn run_feedback(
    scenario: &Scenario,
    p: &FeedbackParams,
    emitter: &mut Emitter,
    format: Format,
) -> Result<Value, RunError> {
    let particle = p.particle.build().map_err(RunError::Config)?;
    let gas = p.gas.build().map_err(RunError::Config)?;
    let trap = p.trap.build().map_err(RunError::Config)?;
    if p.axis > 2 {
        return Err(RunError::Config(format!("axis must be 0..=2, got {}", p.axis)));
    }
    let gamma0 = langevin::gas_damping(&particle, &gas);

    let mut rows = Vec::new();
    let mut rungs = Vec::new();
    for (i, ratio) in p.gain_ratios.iter().enumerate() {
        let fb = FeedbackConfig::uniform(ratio * gamma0).map_err(numerical)?;
        let dt = p.dt.unwrap_or_else(|| langevin::max_step(&trap, gamma0, &fb) * 0.9);
        let traj = langevin::simulate(
            &particle,
            &gas,
            &trap,
            &fb,
            p.duration,
            dt,
            scenario.seed.wrapping_add(i as u64),
        )
        .map_err(numerical)?;
        let spec = langevin::estimate_psd(&traj, p.axis, p.segments, 0.5).map_err(numerical)?;
        let fit = langevin::fit_mode(&spec, particle.mass()).map_err(numerical)?;
        let t_expected = gas.temperature * gamma0 / (gamma0 * (1.0 + ratio));

        let psd_rows: Vec<Vec<Value>> = spec
            .omega
            .iter()
            .zip(&spec.values)
            .map(|(w, v)| vec![num(*w), num(*v)])
            .collect();
        emitter
            .write(
                &table_name(format, &format!("psd_rung_{i}")),
                &table_bytes(format, &["omega_rad_s", "psd_m2_s"], &psd_rows),
            )
            .map_err(io_err)?;

        rows.push(vec![
            num(*ratio),
            num(t_expected),
            num(fit.t_mode),
            num(fit.gamma_tot),
            num(fit.omega_fit),
            num(fit.residual),
        ]);
        rungs.push(json!({
            "gain_ratio": ratio,
            "t_expected_K": t_expected,
            "t_fitted_K": fit.t_mode,
            "gamma_tot": fit.gamma_tot,
            "omega_fit": fit.omega_fit,
        }));
    }
    emitter
        .write(
            &table_name(format, "ladder"),
            &table_bytes(
                format,
                &["gain_ratio", "t_expected_K", "t_fitted_K", "gamma_tot", "omega_fit", "residual"],
                &rows,
            ),
        )
        .map_err(io_err)?;
    emitter
        .write("summary.json", &serde_json::to_vec_pretty(&json!({ "rungs": rungs })).unwrap())
        .map_err(io_err)?;

    Ok(json!({
        "particle": particle,
        "gas": gas,
        "trap": trap,
        "gamma_gas": gamma0,
        "gain_ratios": p.gain_ratios,
        "duration": p.duration,
        "segments": p.segments,
        "axis": p.axis,
    }))
}

fn run_cavity_cool(
    _scenario: &Scenario,
    p: &CavityCoolParams,
    emitter: &mut Emitter,
    format: Format,
) -> Result<Value, RunError> {
    let omega_m = p.omega_m.angular();
    let kappa = p.kappa.angular();
    let g = p.g.angular();
    let drive = levitsim::model::DriveConfig::new(
        p.drive.detuning.angular(),
        p.drive.strength.angular(),
        p.drive.power,
    )
    .map_err(numerical)?;

    let coupling = cavity::solve_coupling(g, omega_m, kappa, &drive).map_err(numerical)?;
    let steady = cavity::steady_state(&coupling, omega_m, kappa);
    emitter
        .write("cooling.json", &serde_json::to_vec_pretty(&steady).unwrap())
        .map_err(io_err)?;

    // Second-moment relaxation towards the steady state.
    let ga = coupling.g_alpha();
    let gamma_n = if ga > 0.0 { 4.0 * ga * ga / kappa } else { 0.0 };
    let t_max = p.evolve_time.unwrap_or(if gamma_n > 0.0 { 25.0 / gamma_n } else { 1e-3 });
    let grid: Vec<f64> = (1..=p.time_points)
        .map(|i| t_max * i as f64 / p.time_points as f64)
        .collect();
    let n_t = cavity::covariance_dynamics(&coupling, omega_m, kappa, p.n_init, &grid)
        .map_err(numerical)?;
    let rows: Vec<Vec<Value>> =
        grid.iter().zip(&n_t).map(|(t, n)| vec![num(*t), num(*n)]).collect();
    emitter
        .write(
            &table_name(format, "covariance"),
            &table_bytes(format, &["t_s", "n_phonon"], &rows),
        )
        .map_err(io_err)?;

    // Optional detuning scan for the cooling optimum.
    let mut optimum = Value::Null;
    if let Some(scan) = &p.scan {
        if scan.points < 2 {
            return Err(RunError::Config("scan needs at least 2 points".into()));
        }
        let (from, to) = (scan.from.angular(), scan.to.angular());
        let mut rows = Vec::new();
        let mut best: Option<(f64, f64)> = None;
        for i in 0..scan.points {
            let detuning = from + (to - from) * i as f64 / (scan.points - 1) as f64;
            let d = levitsim::model::DriveConfig::new(detuning, drive.drive_strength, drive.power)
                .map_err(numerical)?;
            let c = cavity::solve_coupling(g, omega_m, kappa, &d).map_err(numerical)?;
            let s = cavity::steady_state(&c, omega_m, kappa);
            rows.push(vec![
                num(detuning),
                num(s.delta_eff),
                s.n_final.map(num).unwrap_or(Value::Null),
                num(s.gamma),
                Value::from(s.stable),
            ]);
            if let Some(n) = s.n_final {
                if s.stable && best.map(|(_, bn)| n < bn).unwrap_or(true) {
                    best = Some((s.delta_eff, n));
                }
            }
        }
        emitter
            .write(
                &table_name(format, "detuning_scan"),
                &table_bytes(
                    format,
                    &["detuning_rad_s", "delta_eff_rad_s", "n_final", "gamma", "stable"],
                    &rows,
                ),
            )
            .map_err(io_err)?;
        if let Some((d, n)) = best {
            optimum = json!({ "delta_eff": d, "n_final": n, "delta_over_omega_m": d / omega_m });
        }
    }

    let summary = json!({
        "n_final_formula": steady.n_final,
        "backaction_floor": (kappa / (4.0 * omega_m)).powi(2),
        "n_final_dynamics": n_t.last(),
        "cooling_rate_formula": steady.gamma,
        "optimum": optimum,
    });
    emitter
        .write("summary.json", &serde_json::to_vec_pretty(&summary).unwrap())
        .map_err(io_err)?;

    Ok(json!({
        "omega_m": omega_m,
        "kappa": kappa,
        "g": g,
        "drive_detuning": drive.detuning,
        "drive_strength": drive.drive_strength,
        "g_alpha": coupling.g_alpha(),
        "delta_eff": coupling.delta_eff,
        "n_init": p.n_init,
        "evolve_time": t_max,
    }))
}

fn run_budget(
    _scenario: &Scenario,
    p: &BudgetParams,
    emitter: &mut Emitter,
) -> Result<Value, RunError> {
    let particle = p.particle.build().map_err(RunError::Config)?;
    let gas = p.gas.build().map_err(RunError::Config)?;
    let trap = p.trap.build().map_err(RunError::Config)?;
    let cav = p.cavity.build().map_err(RunError::Config)?;
    let inputs = noise::NoiseInputs::new(
        p.noise.intensity_noise_psd,
        p.noise.pointing_psd,
        p.noise.laser_linewidth.angular(),
        p.noise.phase_corr_rate.angular(),
        p.noise.intracavity_photons,
    )
    .map_err(numerical)?;
    let budget = noise::budget(&particle, &gas, &trap, &cav, &inputs, p.axis).map_err(numerical)?;
    emitter
        .write("budget.json", &serde_json::to_vec_pretty(&budget).unwrap())
        .map_err(io_err)?;
    Ok(json!({
        "particle": particle,
        "gas": gas,
        "trap": trap,
        "cavity_linewidth": cav.linewidth,
        "cavity_omega_c": cav.omega_c,
        "axis": p.axis,
        "noise_inputs": inputs,
    }))
}

fn run_fock(
    _scenario: &Scenario,
    p: &FockParams,
    emitter: &mut Emitter,
) -> Result<Value, RunError> {
    let particle = p.particle.build().map_err(RunError::Config)?;
    let omega_m = p.omega_m.angular();
    let lambda = spinmech::spin_coupling(&particle, omega_m, p.gradient).map_err(numerical)?;
    let prep = spinmech::prepare_fock(p.target_n, lambda, p.dim).map_err(numerical)?;

    let steps: Vec<Value> = prep
        .sequence
        .steps
        .iter()
        .map(|(h, t)| json!({ "tag": h.tag(), "duration_s": t }))
        .collect();
    let fock = json!({
        "lambda_rad_s": lambda,
        "target_n": p.target_n,
        "dim": p.dim,
        "fidelity": prep.fidelity,
        "sequence": steps,
        "total_duration_s": prep.sequence.total_duration(),
    });
    emitter.write("fock.json", &serde_json::to_vec_pretty(&fock).unwrap()).map_err(io_err)?;
    emitter
        .write("state.json", &serde_json::to_vec_pretty(&prep.state.dump()).unwrap())
        .map_err(io_err)?;

    let mut qnd_value = Value::Null;
    if let Some(q) = &p.qnd {
        let rabi = omega_m / 2.0 + q.rabi_offset_lambdas * lambda;
        let (chi, valid) = spinmech::qnd_chi(rabi, lambda, omega_m);
        let readout = spinmech::qnd_readout(&prep.state, chi, q.phi0, q.time);
        let qnd = json!({
            "chi_rad_s": chi,
            "dispersive_condition_met": valid,
            "rabi_rad_s": rabi,
            "time_s": q.time,
            "phi0": q.phi0,
            "components": readout.components.iter().map(|(n, p, phase)| {
                json!({ "n": n, "population": p, "phase": phase })
            }).collect::<Vec<_>>(),
            "fringe_expectation": readout.fringe_expectation,
        });
        emitter.write("qnd.json", &serde_json::to_vec_pretty(&qnd).unwrap()).map_err(io_err)?;
        qnd_value = qnd;
    }

    Ok(json!({
        "particle": particle,
        "omega_m": omega_m,
        "gradient": p.gradient,
        "lambda": lambda,
        "target_n": p.target_n,
        "dim": p.dim,
        "qnd": qnd_value,
    }))
}

fn run_cat(
    _scenario: &Scenario,
    p: &CatParams,
    emitter: &mut Emitter,
    format: Format,
) -> Result<Value, RunError> {
    let particle = p.particle.build().map_err(RunError::Config)?;
    let omega = p.omega_m2.angular();
    let cat = spinmech::cat_protocol(&particle, omega, p.gradient, p.n_init, p.dim)
        .map_err(numerical)?;

    let period = cat.fringe.period(p.flight_time);
    let span = p.fringe_span_periods * period;
    let mut rows = Vec::with_capacity(p.fringe_points);
    let mut peak = 0.0f64;
    let samples: Vec<(f64, f64)> = (0..p.fringe_points)
        .map(|i| {
            let z = -span / 2.0 + span * i as f64 / (p.fringe_points.max(2) - 1) as f64;
            let v = cat.fringe.pattern(z, p.flight_time, 1.0);
            (z, v)
        })
        .collect();
    for (_, v) in &samples {
        peak = peak.max(*v);
    }
    for (z, v) in &samples {
        rows.push(vec![num(*z), num(if peak > 0.0 { v / peak } else { 0.0 })]);
    }
    emitter
        .write(
            &table_name(format, "fringes"),
            &table_bytes(format, &["z_m", "intensity"], &rows),
        )
        .map_err(io_err)?;

    let cat_json = json!({
        "lambda_rad_s": cat.lambda,
        "a2_m": cat.a2,
        "d_m_m": cat.d_m,
        "d_m_over_a2": cat.d_m / cat.a2,
        "dim": cat.dim,
        "separation_m": cat.separation,
        "flight_time_s": p.flight_time,
        "fringe_period_m": period,
    });
    emitter.write("cat.json", &serde_json::to_vec_pretty(&cat_json).unwrap()).map_err(io_err)?;
    emitter
        .write("state.json", &serde_json::to_vec_pretty(&cat.disentangled.dump()).unwrap())
        .map_err(io_err)?;

    Ok(json!({
        "particle": particle,
        "omega_m2": omega,
        "gradient": p.gradient,
        "n_init": p.n_init,
        "dim": cat.dim,
        "flight_time": p.flight_time,
    }))
}

fn run_sense_sweep(
    _scenario: &Scenario,
    p: &SenseSweepParams,
    emitter: &mut Emitter,
    format: Format,
) -> Result<Value, RunError> {
    let particle = p.particle.build().map_err(RunError::Config)?;
    let gas = p.gas.build().map_err(RunError::Config)?;
    let mut scenario = sensing::SensingScenario::new(
        particle,
        gas,
        p.omega0.angular(),
        p.bandwidth,
        p.wavelength.meters(),
    )
    .map_err(numerical)?;
    scenario.r_plus = p.r_plus;

    let (axis, grid): (sensing::SweepAxis, Vec<f64>) = match (&p.radius_grid, &p.frequency_grid) {
        (Some(g), None) => (
            sensing::SweepAxis::Radius,
            build_grid(g.min.meters(), g.max.meters(), g.points, g.spacing)?,
        ),
        (None, Some(g)) => (
            sensing::SweepAxis::Frequency,
            build_grid(g.min.angular(), g.max.angular(), g.points, g.spacing)?,
        ),
        _ => {
            return Err(RunError::Config(
                "exactly one of radius_grid / frequency_grid must be given".into(),
            ))
        }
    };

    let points = sensing::sweep(&scenario, axis, &grid).map_err(numerical)?;
    let rows: Vec<Vec<Value>> = points
        .iter()
        .map(|(x, pt)| {
            vec![
                num(*x),
                num(pt.f_min),
                num(pt.a_min),
                num(pt.chi),
                Value::from(pt.regime.label()),
            ]
        })
        .collect();
    emitter
        .write(
            &table_name(format, "sweep"),
            &table_bytes(
                format,
                &["x_value", "f_min_N_per_rtHz", "a_min", "chi", "regime"],
                &rows,
            ),
        )
        .map_err(io_err)?;

    let crossover = points
        .iter()
        .find(|(_, pt)| pt.regime != sensing::Regime::GasLimited)
        .map(|(x, _)| *x);
    let summary = json!({
        "points": points.len(),
        "chi_first": points.first().map(|(_, p)| p.chi),
        "chi_last": points.last().map(|(_, p)| p.chi),
        "f_min_first": points.first().map(|(_, p)| p.f_min),
        "f_min_last": points.last().map(|(_, p)| p.f_min),
        "first_non_gas_limited_x": crossover,
    });
    emitter
        .write("summary.json", &serde_json::to_vec_pretty(&summary).unwrap())
        .map_err(io_err)?;

    Ok(json!({
        "scenario": scenario,
        "axis": axis,
        "grid_points": grid.len(),
        "grid_min": grid.first(),
        "grid_max": grid.last(),
    }))
}

fn build_grid(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>, RunError> {
    if points < 2 || !(max > min) || !(min > 0.0) {
        return Err(RunError::Config(format!(
            "grid needs points >= 2 and 0 < min < max, got {points}, {min}, {max}"
        )));
    }
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / (points - 1) as f64;
            match spacing {
                Spacing::Log => min * (max / min).powf(f),
                Spacing::Linear => min + (max - min) * f,
            }
        })
        .collect())
}

fn run_collide(
    scenario: &Scenario,
    p: &CollideParams,
    emitter: &mut Emitter,
    format: Format,
) -> Result<Value, RunError> {
    let particle = p.particle.build().map_err(RunError::Config)?;
    let gas = p.gas.build().map_err(RunError::Config)?;
    let cs = collision::CollisionScenario::new(
        particle,
        gas,
        p.omega.angular(),
        p.g.angular(),
        p.alpha,
        p.kappa.angular(),
        p.surface_temperature.kelvin(),
        p.elasticity,
    )
    .map_err(numerical)?;

    let stream = collision::simulate_stream(&cs, p.duration, scenario.seed).map_err(numerical)?;
    let rows: Vec<Vec<Value>> = stream
        .events
        .iter()
        .map(|e| vec![num(e.time), num(e.phonon_kick), Value::from(e.detected_photons)])
        .collect();
    emitter
        .write(
            &table_name(format, "events"),
            &table_bytes(format, &["t_s", "n_kick", "photons"], &rows),
        )
        .map_err(io_err)?;

    let mean_photons = if stream.events.is_empty() {
        0.0
    } else {
        stream.events.iter().map(|e| e.detected_photons as f64).sum::<f64>()
            / stream.events.len() as f64
    };
    let tau = if cs.g_j * cs.alpha_j > 0.0 {
        Some(collision::pulse_duration(cs.g_j, cs.alpha_j, cs.kappa_j).map_err(numerical)?)
    } else {
        None
    };
    let t_estimate = if p.elasticity == collision::Elasticity::Inelastic
        && !stream.events.is_empty()
    {
        Some(
            collision::estimate_surface_temperature(&stream.events, &particle, &gas, cs.omega_j)
                .map_err(numerical)?,
        )
    } else {
        None
    };
    let kick = collision::phonon_kick(
        &particle,
        &gas,
        cs.omega_j,
        p.elasticity,
        cs.surface_temperature,
    );
    let summary = json!({
        "rate_per_s": stream.rate,
        "expected_events": stream.rate * p.duration,
        "observed_events": stream.events.len(),
        "mean_kick_analytic": stream.mean_kick,
        "mean_photons_observed": mean_photons,
        "pulse_duration_s": tau,
        "resolvable": stream.resolvable,
        "elastic_detectable": kick.elastic_detectable,
        "inelastic_detectable_env": kick.inelastic_detectable_env,
        "inelastic_detectable_surface": kick.inelastic_detectable_surface,
        "surface_temperature_estimate_K": t_estimate,
    });
    emitter
        .write("summary.json", &serde_json::to_vec_pretty(&summary).unwrap())
        .map_err(io_err)?;

    Ok(json!({
        "scenario": cs,
        "duration": p.duration,
    }))
}

/// Zero-point spread helper shared by validate echoes.
pub fn zpf_of(p: &levitsim::model::Particle, omega: f64) -> Option<f64> {
    zero_point_fluctuation(p.mass(), omega).ok()
}

/// Resolve the SI parameters without running (the `validate` echo).
pub fn resolve_only(scenario: &Scenario) -> Result<Value, RunError> {
    match &scenario.params {
        Params::Brownian(p) => {
            let particle = p.particle.build().map_err(RunError::Config)?;
            let gas = p.gas.build().map_err(RunError::Config)?;
            let trap = p.trap.build().map_err(RunError::Config)?;
            Ok(json!({ "particle": particle, "gas": gas, "trap": trap,
                       "gamma_gas": langevin::gas_damping(&particle, &gas) }))
        }
        Params::Feedback(p) => {
            let particle = p.particle.build().map_err(RunError::Config)?;
            let gas = p.gas.build().map_err(RunError::Config)?;
            let trap = p.trap.build().map_err(RunError::Config)?;
            Ok(json!({ "particle": particle, "gas": gas, "trap": trap,
                       "gain_ratios": p.gain_ratios }))
        }
        Params::CavityCool(p) => Ok(json!({
            "omega_m": p.omega_m.angular(),
            "kappa": p.kappa.angular(),
            "g": p.g.angular(),
            "detuning": p.drive.detuning.angular(),
            "strength": p.drive.strength.angular(),
        })),
        Params::Budget(p) => {
            let particle = p.particle.build().map_err(RunError::Config)?;
            let gas = p.gas.build().map_err(RunError::Config)?;
            let trap = p.trap.build().map_err(RunError::Config)?;
            let cav = p.cavity.build().map_err(RunError::Config)?;
            Ok(json!({ "particle": particle, "gas": gas, "trap": trap,
                       "kappa": cav.linewidth, "omega_c": cav.omega_c }))
        }
        Params::Fock(p) => {
            let particle = p.particle.build().map_err(RunError::Config)?;
            let omega = p.omega_m.angular();
            let lambda =
                spinmech::spin_coupling(&particle, omega, p.gradient).map_err(numerical)?;
            Ok(json!({ "particle": particle, "omega_m": omega, "lambda": lambda,
                       "zpf": zpf_of(&particle, omega), "dim": p.dim }))
        }
        Params::Cat(p) => {
            let particle = p.particle.build().map_err(RunError::Config)?;
            let omega = p.omega_m2.angular();
            let lambda =
                spinmech::spin_coupling(&particle, omega, p.gradient).map_err(numerical)?;
            Ok(json!({ "particle": particle, "omega_m2": omega, "lambda": lambda,
                       "zpf": zpf_of(&particle, omega) }))
        }
        Params::SenseSweep(p) => {
            let particle = p.particle.build().map_err(RunError::Config)?;
            let gas = p.gas.build().map_err(RunError::Config)?;
            Ok(json!({ "particle": particle, "gas": gas,
                       "omega0": p.omega0.angular(), "bandwidth": p.bandwidth,
                       "wavelength": p.wavelength.meters() }))
        }
        Params::Collide(p) => {
            let particle = p.particle.build().map_err(RunError::Config)?;
            let gas = p.gas.build().map_err(RunError::Config)?;
            Ok(json!({ "particle": particle, "gas": gas,
                       "omega": p.omega.angular(),
                       "rate": collision::collision_rate(&particle, &gas),
                       "surface_temperature": p.surface_temperature.kelvin() }))
        }
    }
}
