//! Scenario execution: maps a parsed [`Config`] onto solver runs and
//! produces the result table plus metadata lines.

use darkcool_core::engine::{
    evolve, fit_cooling_rate, scattering_rate_profile, ObservableSet, Tol, Trajectory,
};
use darkcool_core::models::{
    build_effective_two_level, build_multi_ion, build_recoil_model, build_three_level,
    derive_couplings, fock_density, thermal_density, Approx, Basis, BuiltinObs, LevelScheme,
    LindbladModel, PhysParams, SpinInit, THERMAL_TRUNCATION_WARN,
};
use darkcool_core::modes::{load_modes, synth_modes, ModeSpectrum, SynthKind};
use darkcool_core::par::map_grid;
use darkcool_core::qops::{steady_state, trace_sparse_dense, SteadyMethod};
use darkcool_core::strong::{
    build_ladder, closed_form_steady, decay_ladder, default_n_max, ladder_trajectory,
    observable_vectors, summary_formulas, table1_row, ThermalWeight,
};
use darkcool_core::weak::{
    ob_system, phonon_rates, rate_equation_trajectory, spectrum_lorentzian, spectrum_regression,
    SpectrumSource,
};
use darkcool_core::{CoolError, Result, C64, TWO_PI};
use ndarray::Array2;

use crate::config::{Config, InitialChoice, Kind, ModelChoice, ModesSource, Overlay, RecoilMode};
use crate::table::Table;

/// A finished run: the table that becomes the CSV/SVG plus meta lines.
pub struct RunResult {
    pub table: Table,
    pub meta: Vec<(String, String)>,
}

fn modes_for(cfg: &Config, n_ions: usize, omega_m: f64) -> Result<ModeSpectrum> {
    match &cfg.modes_source {
        ModesSource::ComOnly => synth_modes(SynthKind::ComOnly, n_ions, omega_m),
        ModesSource::Degenerate => synth_modes(SynthKind::Degenerate, n_ions, omega_m),
        ModesSource::UniformBand(bw) => synth_modes(SynthKind::UniformBand(*bw), n_ions, omega_m),
        ModesSource::File(path) => {
            let m = load_modes(std::path::Path::new(path))?;
            if m.n_ions() != n_ions {
                return Err(CoolError::invalid(format!(
                    "mode file holds {} modes, scenario wants {n_ions}",
                    m.n_ions()
                )));
            }
            Ok(m)
        }
    }
}

fn t_grid(cfg: &Config) -> Vec<f64> {
    let n = cfg.n_out.max(2);
    (0..n).map(|k| cfg.t_final_us * k as f64 / (n - 1) as f64).collect()
}

fn initial_state(model: &LindbladModel, choice: InitialChoice) -> Result<(Array2<C64>, f64)> {
    let nf = model.params.fock_dim();
    let (phonon, trunc) = match choice {
        InitialChoice::DarkThermal | InitialChoice::BrightThermal => {
            thermal_density(model.params.n_th, nf)
        }
        InitialChoice::DarkVacuum | InitialChoice::BrightVacuum => (fock_density(0, nf)?, 0.0),
        InitialChoice::BrightFock(n) | InitialChoice::DarkFock(n) => (fock_density(n, nf)?, 0.0),
    };
    let spin = match choice {
        InitialChoice::DarkThermal | InitialChoice::DarkVacuum | InitialChoice::DarkFock(_) => {
            SpinInit::AllDark
        }
        _ => SpinInit::AllBright,
    };
    Ok((model.initial_state(spin, &phonon)?, trunc))
}

fn build_model(cfg: &Config, p: &PhysParams) -> Result<LindbladModel> {
    match cfg.model {
        ModelChoice::ThreeLevel => build_three_level(p),
        ModelChoice::EffectiveBare => build_effective_two_level(p, Basis::Bare),
        ModelChoice::EffectiveDressed => build_effective_two_level(p, Basis::Dressed),
        ModelChoice::TavisCummings => {
            let modes = modes_for(cfg, p.n_ions, p.omega_m)?;
            build_multi_ion(p, &modes, Approx::TavisCummings)
        }
        ModelChoice::FullDressed => {
            let modes = modes_for(cfg, p.n_ions, p.omega_m)?;
            build_multi_ion(p, &modes, Approx::FullDressed)
        }
        ModelChoice::AnalyticWeak | ModelChoice::AnalyticStrong => {
            Err(CoolError::invalid("analytic models have no Liouvillian"))
        }
    }
}

fn steady_mean(model: &LindbladModel, obs: BuiltinObs) -> Result<f64> {
    let liouv = model.to_liouvillian()?;
    let method = if model.total_dim() <= 24 {
        SteadyMethod::NullSpace
    } else {
        SteadyMethod::ConstrainedSolve
    };
    let rho = steady_state(&liouv, method)?;
    let op = model.observable(obs)?;
    Ok(trace_sparse_dense(&op.matrix, &rho).re)
}

fn couplings_meta(p: &PhysParams) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if let Ok(dc) = derive_couplings(p) {
        out.push(("omega_ls_2pi_mhz".into(), format!("{}", dc.omega_ls / TWO_PI)));
        out.push((
            "omega_r_2pi_mhz".into(),
            format!("{}+{}i", dc.omega_r.re / TWO_PI, dc.omega_r.im / TWO_PI),
        ));
        out.push(("omega_s_2pi_mhz".into(), format!("{}", dc.omega_s / TWO_PI)));
        out.push(("alpha_rad".into(), format!("{}", dc.alpha)));
        out.push(("gamma_b_2pi_mhz".into(), format!("{}", dc.gamma_b / TWO_PI)));
        out.push(("g_r_2pi_mhz".into(), format!("{}", dc.g_r / TWO_PI)));
        out.push(("q_s".into(), format!("{}", dc.q_s)));
        out.push(("gamma_1sc_2pi_mhz".into(), format!("{}", dc.gamma_1sc / TWO_PI)));
        out.push(("n_ba".into(), format!("{}", dc.n_ba)));
    }
    for (k, w) in p.warnings().iter().enumerate() {
        out.push((format!("warning_{k}"), w.clone()));
    }
    out
}

/// Execute a scenario.
pub fn run_scenario(cfg: &Config) -> Result<RunResult> {
    let mut meta = couplings_meta(&cfg.params);
    let table = match cfg.kind {
        Kind::ScatteringProfile => scattering(cfg)?,
        Kind::SteadySweep => steady_sweep(cfg, &mut meta)?,
        Kind::Spectrum => spectrum(cfg)?,
        Kind::Dynamics => dynamics(cfg, &mut meta)?,
        Kind::CollectiveRates => collective_rates(cfg)?,
        Kind::OptimalityScan => optimality_scan(cfg, &mut meta)?,
        Kind::RecoilCompare => recoil_compare(cfg, &mut meta)?,
    };
    Ok(RunResult { table, meta })
}

fn scattering(cfg: &Config) -> Result<Table> {
    let grid = cfg
        .sweep
        .as_ref()
        .map(|(_, g)| g.clone())
        .unwrap_or_else(|| (0..241).map(|k| 0.9 + 0.2 * k as f64 / 240.0).collect());
    let prof = scattering_rate_profile(&cfg.params, &grid)?;
    let mut t = Table::new();
    t.push("delta_ratio", prof.iter().map(|(r, _)| *r).collect());
    t.push("gamma_rho_rr", prof.iter().map(|(_, v)| *v).collect());
    Ok(t)
}

fn steady_sweep(cfg: &Config, meta: &mut Vec<(String, String)>) -> Result<Table> {
    let (field, grid) = cfg
        .sweep
        .clone()
        .ok_or_else(|| CoolError::invalid("steady_sweep needs a sweep grid"))?;
    let points: Vec<PhysParams> = grid
        .iter()
        .map(|&v| {
            let mut p = cfg.params.clone();
            crate::config::set_param(&mut p, &field, v).map(|_| p)
        })
        .collect::<Result<_>>()?;
    let cfg2 = cfg.clone();
    let results = map_grid(&points, move |p| -> Result<(f64, f64)> {
        let model = build_model(&cfg2, p)?;
        let numeric = steady_mean(&model, BuiltinObs::MeanPhonon)?;
        let analytic = phonon_rates(p, SpectrumSource::Lorentzian)?
            .n_f
            .unwrap_or(f64::NAN);
        Ok((numeric, analytic))
    });
    let mut numeric = Vec::with_capacity(grid.len());
    let mut analytic = Vec::with_capacity(grid.len());
    for r in results {
        let (n, a) = r?;
        numeric.push(n);
        analytic.push(a);
    }
    let mut t = Table::new();
    t.push(format!("{field}_2piMHz"), grid);
    t.push("n_f_numeric", numeric);
    t.push("n_f_analytic", analytic);
    let min_n = t.column("n_f_numeric")?.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_a = t.column("n_f_analytic")?.iter().cloned().fold(f64::INFINITY, f64::min);
    meta.push(("min_n_f_numeric".into(), format!("{min_n}")));
    meta.push(("min_n_f_analytic".into(), format!("{min_a}")));
    Ok(t)
}

fn spectrum(cfg: &Config) -> Result<Table> {
    let dc = derive_couplings(&cfg.params)?;
    let grid: Vec<f64> = cfg.sweep.as_ref().map(|(_, g)| g.clone()).unwrap_or_else(|| {
        (0..801)
            .map(|k| -4.0 * dc.omega_s + 8.0 * dc.omega_s * k as f64 / 800.0)
            .collect()
    });
    let sys = ob_system(&cfg.params)?;
    let mut lor = Vec::with_capacity(grid.len());
    let mut reg = Vec::with_capacity(grid.len());
    for &w in &grid {
        lor.push(spectrum_lorentzian(&cfg.params, w)?);
        reg.push(spectrum_regression(&sys, w)?);
    }
    let mut t = Table::new();
    t.push("omega_rad_per_us", grid);
    t.push("s_lorentzian", lor);
    t.push("s_regression", reg);
    Ok(t)
}

fn effective_cutoff(cfg: &Config, n_ions: usize) -> usize {
    if cfg.cutoff_auto_strong {
        n_ions + 6
    } else {
        cfg.params.cutoff
    }
}

/// Time evolution; multi-N when `n_list` is set (full-dressed model),
/// single-model otherwise. Ladder or rate-equation overlays are appended
/// as extra columns.
fn dynamics(cfg: &Config, meta: &mut Vec<(String, String)>) -> Result<Table> {
    let grid = t_grid(cfg);
    let tol = Tol { rel: cfg.rel_tol, abs: cfg.abs_tol };
    let mut t = Table::new();
    t.push("t_us", grid.clone());

    if cfg.n_list.is_empty() {
        let model = build_model(cfg, &cfg.params)?;
        let (rho0, trunc) = initial_state(&model, cfg.initial)?;
        if trunc > THERMAL_TRUNCATION_WARN {
            meta.push(("warning_truncation".into(), format!("thermal weight {trunc:.3e} truncated")));
        }
        let obs_names: Vec<BuiltinObs> = cfg
            .outputs
            .iter()
            .map(|n| BuiltinObs::parse(n))
            .collect::<Result<_>>()?;
        let obs = ObservableSet::builtin(&model, &obs_names)?;
        let traj = evolve(&model, &rho0, &grid, &obs, tol)?;
        push_stats(meta, "", &traj);
        for (label, values) in &traj.records {
            t.push(label.clone(), values.clone());
        }
        append_overlay(cfg, &cfg.params, &grid, &traj, &mut t)?;
    } else {
        let runs: Vec<usize> = cfg.n_list.clone();
        let cfg2 = cfg.clone();
        let grid2 = grid.clone();
        let results = map_grid(&runs, move |&n| -> Result<(usize, Trajectory, PhysParams)> {
            let mut p = cfg2.params.clone();
            p.n_ions = n;
            p.cutoff = effective_cutoff(&cfg2, n);
            let model = build_model(&cfg2, &p)?;
            let (rho0, _) = initial_state(&model, cfg2.initial)?;
            let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon])?;
            let traj = evolve(&model, &rho0, &grid2, &obs, tol)?;
            Ok((n, traj, p))
        });
        for r in results {
            let (n, traj, p) = r?;
            push_stats(meta, &format!("_N{n}"), &traj);
            t.push(format!("n_N{n}"), traj.record("mean_phonon")?.to_vec());
            if cfg.overlay == Overlay::Ladder {
                let col = ladder_overlay(cfg, &p, &grid)?;
                t.push(format!("n_ladder_N{n}"), col);
            }
        }
    }
    Ok(t)
}

fn push_stats(meta: &mut Vec<(String, String)>, suffix: &str, traj: &Trajectory) {
    meta.push((format!("steps{suffix}"), format!("{}", traj.stats.steps)));
    meta.push((format!("rejected{suffix}"), format!("{}", traj.stats.rejected)));
    meta.push((
        format!("max_trace_drift{suffix}"),
        format!("{:.3e}", traj.stats.max_trace_drift),
    ));
}

fn append_overlay(
    cfg: &Config,
    p: &PhysParams,
    grid: &[f64],
    traj: &Trajectory,
    t: &mut Table,
) -> Result<()> {
    match cfg.overlay {
        Overlay::None => {}
        Overlay::RateEquation => {
            let rates = phonon_rates(p, SpectrumSource::Lorentzian)?;
            let n0 = traj.record("mean_phonon")?[0];
            t.push("n_rate_equation", rate_equation_trajectory(&rates, n0, grid));
        }
        Overlay::Ladder => {
            let col = ladder_overlay(cfg, p, grid)?;
            t.push("n_ladder", col);
        }
    }
    Ok(())
}

/// Classical-ladder ⟨n⟩(t) for the configured initial state.
fn ladder_overlay(cfg: &Config, p: &PhysParams, grid: &[f64]) -> Result<Vec<f64>> {
    let n_ions = p.n_ions;
    let modes = modes_for(cfg, n_ions, p.omega_m)?;
    let n_max = match cfg.initial {
        InitialChoice::BrightVacuum => (n_ions + 2).max(default_n_max(0.0, n_ions)),
        InitialChoice::BrightFock(n) | InitialChoice::DarkFock(n) => {
            (n + n_ions + 2).max(default_n_max(0.0, n_ions))
        }
        _ => default_n_max(p.n_th, n_ions),
    };
    let ladder = build_ladder(p, n_ions, n_max, &modes)?;
    let mut p0 = vec![0.0; n_max + 1];
    match cfg.initial {
        InitialChoice::DarkVacuum => p0[0] = 1.0,
        InitialChoice::BrightVacuum => p0[n_ions] = 1.0,
        InitialChoice::BrightFock(n) => p0[n + n_ions] = 1.0,
        InitialChoice::DarkFock(n) => p0[n] = 1.0,
        InitialChoice::DarkThermal | InitialChoice::BrightThermal => {
            let offset = if cfg.initial == InitialChoice::BrightThermal { n_ions } else { 0 };
            let q = p.n_th / (p.n_th + 1.0);
            for (n, slot) in p0.iter_mut().enumerate().skip(offset) {
                *slot = q.powi((n - offset) as i32) / (p.n_th + 1.0);
            }
            let s: f64 = p0.iter().sum();
            for x in p0.iter_mut() {
                *x /= s;
            }
        }
    }
    let states = ladder_trajectory(&ladder, &p0, grid)?;
    let vecs = observable_vectors(p, n_ions, n_max, &modes)?;
    Ok(states
        .iter()
        .map(|pv| pv.iter().zip(&vecs.n).map(|(a, b)| a * b).sum())
        .collect())
}

/// Decay-ladder rates vs n_ex for each requested N, or the cooling-
/// parameter table when `table1` is set.
fn collective_rates(cfg: &Config) -> Result<Table> {
    let mut t = Table::new();
    if cfg.table1 {
        let ns: Vec<usize> = if cfg.n_list.is_empty() { vec![1, 2, 5, 10, 50] } else { cfg.n_list.clone() };
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 6];
        for &n in &ns {
            let modes = modes_for(cfg, n, cfg.params.omega_m)?;
            let row = table1_row(&cfg.params, n, &modes);
            cols[0].push(n as f64);
            cols[1].push(row.omega_pinned / TWO_PI);
            cols[2].push(row.weak_rate);
            cols[3].push(row.weak_limit);
            cols[4].push(row.strong_rate_small_nex);
            cols[5].push(row.strong_limit_deficit);
        }
        for (name, col) in [
            "N",
            "omega_pinned_2piMHz",
            "weak_rate_rad_per_us",
            "weak_limit",
            "strong_rate_small_nex_rad_per_us",
            "strong_limit_deficit",
        ]
        .iter()
        .zip(cols)
        {
            t.push(*name, col);
        }
        return Ok(t);
    }
    let ns: Vec<usize> =
        if cfg.n_list.is_empty() { vec![10, 60, 110, 160, 210, 260] } else { cfg.n_list.clone() };
    let n_ex_max = 40usize;
    t.push("n_ex", (1..=n_ex_max).map(|n| n as f64).collect());
    for &n in &ns {
        let rates = decay_ladder(&cfg.params, n, n_ex_max)?;
        t.push(format!("gamma_sc_N{n}_rad_per_us"), rates);
    }
    Ok(t)
}

/// Exact N = 1 steady state and 0–50 µs rate over an η_z grid, against
/// the combined analytic formulas.
fn optimality_scan(cfg: &Config, meta: &mut Vec<(String, String)>) -> Result<Table> {
    let grid: Vec<f64> = cfg
        .sweep
        .as_ref()
        .map(|(_, g)| g.clone())
        .unwrap_or_else(|| {
            let (a, b, n) = (1e-3f64, 0.3f64, 13);
            (0..n)
                .map(|k| (a.ln() + (b.ln() - a.ln()) * k as f64 / (n - 1) as f64).exp())
                .collect()
        });
    // analytic-only multi-N branch: closed forms per ion count, no solver
    if !cfg.n_list.is_empty() {
        let mut t = Table::new();
        t.push("eta_z", grid.clone());
        let dc = derive_couplings(&cfg.params)?;
        for &n in &cfg.n_list {
            let modes = modes_for(cfg, n, cfg.params.omega_m)?;
            let mut nf_col = Vec::with_capacity(grid.len());
            let mut nex_col = Vec::with_capacity(grid.len());
            let mut rate_col = Vec::with_capacity(grid.len());
            for &eta in &grid {
                let mut p = cfg.params.clone();
                p.eta_z = eta;
                let s = summary_formulas(&p, n, &modes, p.n_th, ThermalWeight::Geometric)?;
                let cf = closed_form_steady(&p, n, &modes)?;
                nf_col.push(s.n_f_combined);
                nex_col.push(dc.n_ba + cf.n_ex);
                rate_col.push(s.gamma_s_combined);
            }
            t.push(format!("n_f_N{n}"), nf_col);
            t.push(format!("n_ex_N{n}"), nex_col);
            t.push(format!("gamma_s_N{n}_rad_per_us"), rate_col);
        }
        return Ok(t);
    }
    let tol = Tol { rel: cfg.rel_tol.max(1e-6), abs: cfg.abs_tol.max(1e-9) };
    let fit = cfg.fit_window_us;
    let cfg2 = cfg.clone();
    let results = map_grid(&grid, move |&eta| -> Result<[f64; 6]> {
        let mut p = cfg2.params.clone();
        p.eta_z = eta;
        let model = build_effective_two_level(&p, Basis::Dressed)?;
        // steady occupation
        let n_f = steady_mean(&model, BuiltinObs::MeanPhonon)?;
        // fitted initial rate
        let (rho0, _) = initial_state(&model, InitialChoice::DarkThermal)?;
        let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon])?;
        let tg: Vec<f64> = (0..=25).map(|k| fit.1 * k as f64 / 25.0).collect();
        let traj = evolve(&model, &rho0, &tg, &obs, tol)?;
        let rate = fit_cooling_rate(&traj, "mean_phonon", fit)?;
        // analytics
        let modes = modes_for(&cfg2, 1, p.omega_m)?;
        let summary = summary_formulas(&p, 1, &modes, p.n_th, ThermalWeight::Geometric)?;
        let dc = derive_couplings(&p)?;
        Ok([n_f, rate, summary.n_f_combined, summary.gamma_s_combined, dc.n_ba, summary.strong_arm])
    });
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 6];
    for r in results {
        let row = r?;
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    let mut t = Table::new();
    t.push("eta_z", grid);
    for (name, col) in [
        "n_f_numeric",
        "gamma_s_numeric_rad_per_us",
        "n_f_eq_combined",
        "gamma_s_eq_combined_rad_per_us",
        "n_ba",
        "gamma_nsc_thermal_rad_per_us",
    ]
    .iter()
    .zip(cols)
    {
        t.push(*name, col);
    }
    meta.push(("fit_window_us".into(), format!("{:?}", cfg.fit_window_us)));
    Ok(t)
}

/// Recoil on/off comparison: time-resolved (effective scheme) or
/// steady-state (three-level scheme).
fn recoil_compare(cfg: &Config, meta: &mut Vec<(String, String)>) -> Result<Table> {
    match cfg.recoil_mode {
        RecoilMode::Dynamics => {
            let grid = t_grid(cfg);
            let tol = Tol { rel: cfg.rel_tol, abs: cfg.abs_tol };
            let scheme = match cfg.model {
                ModelChoice::ThreeLevel => LevelScheme::ThreeLevel,
                _ => LevelScheme::Effective,
            };
            let runs = [false, true];
            let cfg2 = cfg.clone();
            let grid2 = grid.clone();
            let results = map_grid(&runs, move |&with_recoil| -> Result<Trajectory> {
                let model = if with_recoil {
                    build_recoil_model(&cfg2.params, scheme, cfg2.quad_nodes)?
                } else {
                    match scheme {
                        LevelScheme::ThreeLevel => build_three_level(&cfg2.params)?,
                        LevelScheme::Effective => {
                            build_effective_two_level(&cfg2.params, Basis::Bare)?
                        }
                    }
                };
                let (rho0, _) = initial_state(&model, cfg2.initial)?;
                let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon])?;
                evolve(&model, &rho0, &grid2, &obs, tol)
            });
            let mut cols = Vec::new();
            for (r, lab) in results.into_iter().zip(["n_norecoil", "n_recoil"]) {
                let traj = r?;
                push_stats(meta, &format!("_{lab}"), &traj);
                cols.push((lab.to_string(), traj.record("mean_phonon")?.to_vec()));
            }
            let mut t = Table::new();
            t.push("t_us", grid);
            for (lab, col) in cols {
                t.push(lab, col);
            }
            Ok(t)
        }
        RecoilMode::Steady => {
            let runs = [false, true];
            let cfg2 = cfg.clone();
            let results = map_grid(&runs, move |&with_recoil| -> Result<(f64, f64)> {
                let model = if with_recoil {
                    build_recoil_model(&cfg2.params, LevelScheme::ThreeLevel, cfg2.quad_nodes)?
                } else {
                    build_three_level(&cfg2.params)?
                };
                let liouv = model.to_liouvillian()?;
                let rho = steady_state(&liouv, SteadyMethod::ConstrainedSolve)?;
                let pgs = model.observable(BuiltinObs::GroundStatePop)?;
                let nop = model.observable(BuiltinObs::MeanPhonon)?;
                Ok((
                    trace_sparse_dense(&pgs.matrix, &rho).re,
                    trace_sparse_dense(&nop.matrix, &rho).re,
                ))
            });
            let vals: Vec<(f64, f64)> = results.into_iter().collect::<Result<_>>()?;
            let mut t = Table::new();
            t.push("recoil", vec![0.0, 1.0]);
            t.push("ground_state_pop", vec![vals[0].0, vals[1].0]);
            t.push("mean_phonon", vec![vals[0].1, vals[1].1]);
            meta.push((
                "deficit_change_rel".into(),
                format!("{}", (vals[1].0 - vals[0].0) / (1.0 - vals[0].0)),
            ));
            Ok(t)
        }
    }
}

/// The closed-form steady observables for one parameter set (used by the
/// analytic figure presets).
pub fn analytic_steady_columns(
    p: &PhysParams,
    n_ions: usize,
    modes: &ModeSpectrum,
) -> Result<(f64, f64, f64)> {
    let cf = closed_form_steady(p, n_ions, modes)?;
    Ok((cf.p_gs, cf.n_ex, cf.n))
}
