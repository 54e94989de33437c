//! Cross-module consistency: the adiabatic-elimination chain
//! (three-level ↔ effective two-level ↔ reduced rate theory) and the
//! Tavis-Cummings reduction, checked on exact numerics.

use darkcool_core::engine::{evolve, ObservableSet, Tol};
use darkcool_core::models::{
    build_effective_two_level, build_multi_ion, build_three_level, derive_couplings,
    thermal_density, Approx, Basis, BuiltinObs, PhysParams, SpinInit,
};
use darkcool_core::modes::{synth_modes, SynthKind};
use darkcool_core::qops::{steady_state, trace_sparse_dense, SteadyMethod};
use darkcool_core::two_pi_mhz;
use darkcool_core::weak::{phonon_rates, rate_equation_trajectory, SpectrumSource};

fn fig4b_resonant() -> PhysParams {
    let p = PhysParams {
        gamma_m: two_pi_mhz(0.75e-6),
        ..PhysParams::default()
    };
    let dc = derive_couplings(&p).unwrap();
    PhysParams { omega_m: dc.omega_s, ..p }
}

fn steady_phonon(model: &darkcool_core::models::LindbladModel) -> f64 {
    let liouv = model.to_liouvillian().unwrap();
    let rho = steady_state(&liouv, SteadyMethod::ConstrainedSolve).unwrap();
    let n = model.observable(BuiltinObs::MeanPhonon).unwrap();
    trace_sparse_dense(&n.matrix, &rho).re
}

/// Adiabatic-elimination validity: the three-level and effective
/// two-level steady occupations agree within 5% at the weak-coupling
/// operating point.
#[test]
fn three_level_vs_effective_steady_state() {
    let p = fig4b_resonant();
    let n3 = steady_phonon(&build_three_level(&p).unwrap());
    let n2b = steady_phonon(&build_effective_two_level(&p, Basis::Bare).unwrap());
    let n2d = steady_phonon(&build_effective_two_level(&p, Basis::Dressed).unwrap());
    assert!(
        (n3 - n2b).abs() < 0.05 * n3,
        "three-level {n3} vs bare effective {n2b}"
    );
    assert!(
        (n2b - n2d).abs() < 1e-3 * n2b,
        "bare {n2b} vs dressed {n2d} should be a basis change"
    );
    // both sit near the analytic prediction
    let ana = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap().n_f.unwrap();
    assert!((n3 - ana).abs() < 0.1 * ana, "numeric {n3} vs analytic {ana}");
}

/// Bare-effective dynamics track the three-level master equation within
/// 3% of the initial occupation over the early cooling window.
#[test]
fn three_level_vs_effective_dynamics() {
    let mut p = fig4b_resonant();
    p.cutoff = 24;
    let grid: Vec<f64> = (0..=12).map(|k| 5.0 * k as f64).collect();
    let tol = Tol { rel: 1e-6, abs: 1e-9 };
    let mut curves = Vec::new();
    for model in [
        build_three_level(&p).unwrap(),
        build_effective_two_level(&p, Basis::Bare).unwrap(),
    ] {
        let (th, _) = thermal_density(p.n_th, p.fock_dim());
        let rho0 = model.initial_state(SpinInit::AllDark, &th).unwrap();
        let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon]).unwrap();
        let traj = evolve(&model, &rho0, &grid, &obs, tol).unwrap();
        curves.push(traj.record("mean_phonon").unwrap().to_vec());
    }
    let n0 = curves[0][0];
    for (k, t) in grid.iter().enumerate() {
        let dev = (curves[0][k] - curves[1][k]).abs() / n0;
        assert!(dev < 0.03, "t = {t}: 3L {} vs eff {}", curves[0][k], curves[1][k]);
    }
}

/// Long-window variant of the dynamics agreement at the full figure
/// window (0–2000 µs). Hours of single-core integration; run explicitly
/// with `cargo test --release -- --ignored`.
#[test]
#[ignore = "three-level integration over 2000 us takes hours on one core"]
fn three_level_vs_effective_dynamics_full_window() {
    let p = fig4b_resonant();
    let grid: Vec<f64> = (0..=40).map(|k| 50.0 * k as f64).collect();
    let tol = Tol { rel: 1e-6, abs: 1e-9 };
    let mut curves = Vec::new();
    for model in [
        build_three_level(&p).unwrap(),
        build_effective_two_level(&p, Basis::Bare).unwrap(),
    ] {
        let (th, _) = thermal_density(p.n_th, p.fock_dim());
        let rho0 = model.initial_state(SpinInit::AllDark, &th).unwrap();
        let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon]).unwrap();
        let traj = evolve(&model, &rho0, &grid, &obs, tol).unwrap();
        curves.push(traj.record("mean_phonon").unwrap().to_vec());
    }
    for k in 0..grid.len() {
        let dev = (curves[0][k] - curves[1][k]).abs() / curves[0][k].max(0.05);
        assert!(dev < 0.03, "t = {}: {} vs {}", grid[k], curves[0][k], curves[1][k]);
    }
}

/// Rate-equation solution tracks the exact effective dynamics once the
/// spin has relaxed (t ≳ 5/γ_b).
#[test]
fn rate_equation_tracks_exact_dynamics() {
    let mut p = fig4b_resonant();
    p.cutoff = 24;
    let dc = derive_couplings(&p).unwrap();
    let t_start = 5.0 / dc.gamma_b;
    let grid: Vec<f64> = (0..=20).map(|k| 15.0 * k as f64).collect();
    let model = build_effective_two_level(&p, Basis::Dressed).unwrap();
    let (th, _) = thermal_density(p.n_th, p.fock_dim());
    let rho0 = model.initial_state(SpinInit::AllDark, &th).unwrap();
    let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon]).unwrap();
    let traj = evolve(&model, &rho0, &grid, &obs, Tol { rel: 1e-6, abs: 1e-9 }).unwrap();
    let exact = traj.record("mean_phonon").unwrap();
    let rates = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap();
    let analytic = rate_equation_trajectory(&rates, exact[0], &grid);
    for (k, t) in grid.iter().enumerate() {
        if *t < t_start {
            continue;
        }
        let dev = (exact[k] - analytic[k]).abs() / exact[k];
        assert!(dev < 0.10, "t = {t}: exact {} vs rate eq {}", exact[k], analytic[k]);
    }
}

/// Tavis-Cummings and full-dressed dynamics agree within 2% over five
/// cooling time constants when g_R/ω_m ≤ 0.01 at resonance.
#[test]
fn tavis_cummings_matches_full_dressed() {
    for n_ions in [1usize, 2, 3] {
        let mut p = PhysParams {
            omega_g: two_pi_mhz(35.0),
            omega_e: two_pi_mhz(35.0),
            delta_g: two_pi_mhz(385.0),
            delta_e: two_pi_mhz(385.0),
            n_ions,
            n_th: 1.0,
            cutoff: 9,
            gamma_m: 0.0,
            eta_z: 0.0,
            ..PhysParams::default()
        };
        let dc0 = derive_couplings(&p).unwrap();
        p.omega_m = dc0.omega_s;
        // pick η so that g_R/ω_m = 0.01
        p.eta_z = 2.0 * 0.01 * p.omega_m / dc0.omega_r.norm();
        let dc = derive_couplings(&p).unwrap();
        let gamma_cool = 4.0 * dc.g_r * dc.g_r / dc.gamma_b;
        let t_final = 5.0 / gamma_cool;
        let grid: Vec<f64> = (0..=20).map(|k| t_final * k as f64 / 20.0).collect();
        let modes = synth_modes(SynthKind::ComOnly, n_ions, p.omega_m).unwrap();
        let mut curves = Vec::new();
        for approx in [Approx::TavisCummings, Approx::FullDressed] {
            let model = build_multi_ion(&p, &modes, approx).unwrap();
            let (th, _) = thermal_density(p.n_th, p.fock_dim());
            let rho0 = model.initial_state(SpinInit::AllDark, &th).unwrap();
            let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon]).unwrap();
            let traj = evolve(&model, &rho0, &grid, &obs, Tol { rel: 1e-6, abs: 1e-9 }).unwrap();
            curves.push(traj.record("mean_phonon").unwrap().to_vec());
        }
        for k in 0..grid.len() {
            let dev = (curves[0][k] - curves[1][k]).abs() / curves[1][k].abs().max(1e-6);
            assert!(
                dev < 0.02,
                "N = {n_ions}, t = {}: TC {} vs full {}",
                grid[k],
                curves[0][k],
                curves[1][k]
            );
        }
    }
}

/// Single-ion Tavis-Cummings Rabi flop: |+, n−1⟩ ↔ |−, n⟩. The state
/// completes a full Rabi cycle in T_R = 2π/(g_R√n); the population (and
/// ⟨n̂⟩) repeats every half cycle, so ⟨n⟩ minima recur at T_R/2.
#[test]
fn tc_single_ion_rabi_period() {
    let mut p = PhysParams {
        omega_g: two_pi_mhz(35.0),
        omega_e: two_pi_mhz(35.0),
        delta_g: two_pi_mhz(385.0),
        delta_e: two_pi_mhz(385.0),
        eta_z: 0.13,
        n_th: 0.0,
        cutoff: 12,
        gamma_g: 0.0,
        gamma_e: 0.0,
        ..PhysParams::default()
    };
    // keep a tiny decay so the model is dissipative but nearly coherent
    p.gamma_g = two_pi_mhz(1e-4);
    p.gamma_e = two_pi_mhz(2e-4);
    let dc0 = derive_couplings(&p).unwrap();
    p.omega_m = dc0.omega_s;
    let dc = derive_couplings(&p).unwrap();
    let n_fock = 4usize;
    let t_r = std::f64::consts::TAU / (dc.g_r * (n_fock as f64).sqrt());
    let modes = synth_modes(SynthKind::ComOnly, 1, p.omega_m).unwrap();
    let model = build_multi_ion(&p, &modes, Approx::TavisCummings).unwrap();
    // |+, n−1⟩
    let phonon = darkcool_core::models::fock_density(n_fock - 1, p.fock_dim()).unwrap();
    let rho0 = model.initial_state(SpinInit::AllBright, &phonon).unwrap();
    let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon]).unwrap();
    let grid: Vec<f64> = (0..=1600).map(|k| 1.5 * t_r * k as f64 / 1600.0).collect();
    let traj = evolve(&model, &rho0, &grid, &obs, Tol { rel: 1e-9, abs: 1e-12 }).unwrap();
    let n = traj.record("mean_phonon").unwrap();
    // first return of <n> to its initial minimum happens at T_R/2
    let mut t_min = 0.0;
    let mut best = f64::INFINITY;
    for k in 1..n.len() - 1 {
        if grid[k] > 0.1 * t_r && n[k] < n[k - 1] && n[k] < n[k + 1] && n[k] < best {
            best = n[k];
            t_min = grid[k];
            break;
        }
    }
    assert!(
        (2.0 * t_min - t_r).abs() < 0.03 * t_r,
        "first minimum at {t_min}, expected T_R/2 = {}",
        0.5 * t_r
    );
}
