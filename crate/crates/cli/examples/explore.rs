//! Scratch calibration runs (not shipped).

use darkcool_cli::config::{Config, InitialChoice, Kind, ModelChoice, Overlay};
use darkcool_cli::presets::preset;
use darkcool_cli::scenario::run_scenario;
use darkcool_core::models::{
    build_multi_ion, build_recoil_model, build_three_level, derive_couplings, fock_density,
    Approx, LevelScheme, PhysParams, SpinInit,
};
use darkcool_core::engine::{evolve, ObservableSet, Tol};
use darkcool_core::models::BuiltinObs;
use darkcool_core::modes::{synth_modes, SynthKind};
use darkcool_core::qops::{steady_state, trace_sparse_dense, SteadyMethod};
use darkcool_core::two_pi_mhz;

fn strong_base() -> PhysParams {
    let mut p = PhysParams {
        omega_g: two_pi_mhz(35.0),
        omega_e: two_pi_mhz(35.0),
        delta_g: two_pi_mhz(385.0),
        delta_e: two_pi_mhz(385.0),
        eta_z: 0.13,
        gamma_m: 0.0,
        ..PhysParams::default()
    };
    let dc = derive_couplings(&p).unwrap();
    p.omega_m = dc.omega_s;
    p
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    match which.as_str() {
        "fig6b_thermal" => fig6b_thermal(),
        "rabi" => rabi(),
        "recoil_strong" => recoil_strong(),
        "fig8a_timing" => fig8a_timing(),
        "fig6a_timing" => fig6a_timing(),
        other => eprintln!("unknown experiment `{other}`"),
    }
}

/// Candidate acceptance-6 protocol: manifold-mixed initial state.
fn fig6b_thermal() {
    use darkcool_core::models::manifold_mixed_state;
    use darkcool_core::strong::{build_ladder, ladder_trajectory, observable_vectors};
    let t0 = std::time::Instant::now();
    let gb = derive_couplings(&strong_base()).unwrap().gamma_b;
    println!("3/gamma_b = {:.2} us", 3.0 / gb);
    let grid: Vec<f64> = (0..=40).map(|k| 60.0 * k as f64 / 40.0).collect();
    for n_ions in [1usize, 2, 3, 4] {
        let p = PhysParams { n_ions, cutoff: n_ions + 2, n_th: 0.0, ..strong_base() };
        let modes = synth_modes(SynthKind::ComOnly, n_ions, p.omega_m).unwrap();
        let model = build_multi_ion(&p, &modes, Approx::FullDressed).unwrap();
        let rho0 = manifold_mixed_state(&model, n_ions).unwrap();
        let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon]).unwrap();
        let traj = evolve(&model, &rho0, &grid, &obs, Tol { rel: 1e-6, abs: 1e-9 }).unwrap();
        let ex = traj.record("mean_phonon").unwrap();
        // ladder from p0 = e_N
        let n_max = n_ions + 2;
        let ladder = build_ladder(&p, n_ions, n_max.max(3), &modes).unwrap();
        let mut p0 = vec![0.0; ladder.n_max + 1];
        p0[n_ions] = 1.0;
        let states = ladder_trajectory(&ladder, &p0, &grid).unwrap();
        let vecs = observable_vectors(&p, n_ions, ladder.n_max, &modes).unwrap();
        let lad: Vec<f64> = states
            .iter()
            .map(|pv| pv.iter().zip(&vecs.n).map(|(a, b)| a * b).sum())
            .collect();
        let mut worst: (f64, f64) = (0.0, 0.0);
        let floor = 0.1 * lad[0];
        for ((tt, a), b) in grid.iter().zip(ex).zip(&lad) {
            if *tt > 3.0 / gb && *b >= floor {
                let dev = (a - b).abs() / b.abs().max(1e-9);
                if dev > worst.1 {
                    worst = (*tt, dev);
                }
            }
        }
        // steady-state agreement
        let last_dev = (ex[ex.len() - 1] - lad[lad.len() - 1]).abs() / lad[lad.len() - 1];
        let idx = |tv: f64| grid.iter().position(|x| (x - tv).abs() < 0.8).unwrap();
        let (i1, i2) = (idx(9.0), idx(30.0));
        let rate = -(ex[i2] / ex[i1]).ln() / (grid[i2] - grid[i1]);
        println!(
            "N={n_ions}: n(0) exact={:.4} ladder={:.4}; worst dev on flank = {:.3} at t={:.1}; steady dev {:.3}; fit rate {:.4}; elapsed {:?}",
            ex[0], lad[0], worst.1, worst.0, last_dev, rate, t0.elapsed()
        );
    }
}

/// Weak-coupling recoil dynamics cost probe (acceptance 10a candidate).
fn fig8a_timing() {
    let t0 = std::time::Instant::now();
    let mut p = PhysParams { cutoff: 14, gamma_m: 0.0, ..PhysParams::default() };
    let dc = derive_couplings(&p).unwrap();
    p.omega_m = dc.omega_s;
    let cfg = Config {
        params: p,
        kind: Kind::RecoilCompare,
        model: ModelChoice::EffectiveBare,
        initial: InitialChoice::DarkThermal,
        quad_nodes: 4,
        t_final_us: 5200.0,
        n_out: 14,
        rel_tol: 1e-5,
        abs_tol: 1e-6,
        ..Config::default()
    };
    let r = run_scenario(&cfg).unwrap();
    println!("fig8a-candidate elapsed {:?}", t0.elapsed());
    let t = r.table.column("t_us").unwrap();
    let n0 = r.table.column("n_norecoil").unwrap();
    let n1 = r.table.column("n_recoil").unwrap();
    for k in 0..t.len() {
        println!("t={:7.0} plain={:.4} recoil={:.4} dev={:.4}", t[k], n0[k], n1[k],
            (n1[k] - n0[k]).abs() / n0[k]);
    }
}

/// Rabi-oscillation period scan for the TC oracle.
fn rabi() {
    for n_fock in [4usize, 9] {
        let mut p = PhysParams {
            n_ions: 4,
            cutoff: n_fock + 6,
            n_th: 0.0,
            ..strong_base()
        };
        let dc = derive_couplings(&p).unwrap();
        p.omega_m = dc.omega_s;
        let modes = synth_modes(SynthKind::ComOnly, 4, p.omega_m).unwrap();
        let model = build_multi_ion(&p, &modes, Approx::TavisCummings).unwrap();
        let phonon = fock_density(n_fock, p.fock_dim()).unwrap();
        let rho0 = model.initial_state(SpinInit::AllBright, &phonon).unwrap();
        let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon]).unwrap();
        let g_r = dc.g_r;
        let t_r = std::f64::consts::TAU / (g_r * (n_fock as f64).sqrt());
        let grid: Vec<f64> = (0..=1200).map(|k| 3.0 * t_r * k as f64 / 1200.0).collect();
        let traj = evolve(&model, &rho0, &grid, &obs, Tol { rel: 1e-8, abs: 1e-10 }).unwrap();
        let n = traj.record("mean_phonon").unwrap();
        // first two maxima of <n> after t=0
        let mut maxima = Vec::new();
        for k in 1..n.len() - 1 {
            if n[k] > n[k - 1] && n[k] > n[k + 1] {
                maxima.push(grid[k]);
            }
        }
        println!(
            "n={n_fock}: T_R(2pi/g_R*sqrt(n)) = {t_r:.3}; first maxima at {:?}",
            &maxima[..maxima.len().min(4)]
        );
    }
}

/// Strong-coupling recoil steady state at the pinned k ratios.
fn recoil_strong() {
    for k_ratio in [2.9f64, 20.0] {
        let p = PhysParams {
            k_ratio_g: k_ratio,
            k_ratio_e: k_ratio,
            cutoff: 30,
            ..strong_base()
        };
        let t0 = std::time::Instant::now();
        let plain = build_three_level(&p).unwrap();
        let liouv = plain.to_liouvillian().unwrap();
        let rho = steady_state(&liouv, SteadyMethod::ConstrainedSolve).unwrap();
        let pgs_op = plain.observable(BuiltinObs::GroundStatePop).unwrap();
        let nop = plain.observable(BuiltinObs::MeanPhonon).unwrap();
        let pgs0 = trace_sparse_dense(&pgs_op.matrix, &rho).re;
        let n0 = trace_sparse_dense(&nop.matrix, &rho).re;

        let rec = build_recoil_model(&p, LevelScheme::ThreeLevel, 8).unwrap();
        let liouv_r = rec.to_liouvillian().unwrap();
        let rho_r = steady_state(&liouv_r, SteadyMethod::ConstrainedSolve).unwrap();
        let pgs_r = trace_sparse_dense(&pgs_op.matrix, &rho_r).re;
        let n_r = trace_sparse_dense(&nop.matrix, &rho_r).re;
        println!(
            "k_ratio={k_ratio}: no-recoil p_gs={pgs0:.5} n={n0:.5}; recoil p_gs={pgs_r:.5} n={n_r:.5}; \
             deficit change = {:+.3}; elapsed {:?}",
            ((1.0 - pgs_r) - (1.0 - pgs0)) / (1.0 - pgs0),
            t0.elapsed()
        );
    }
}

fn fig6a_timing() {
    let t0 = std::time::Instant::now();
    let mut cfg = preset("fig6a").unwrap();
    cfg.n_list = vec![1, 2, 3];
    let r = run_scenario(&cfg).unwrap();
    println!("fig6a N=1..3 elapsed {:?}", t0.elapsed());
    let t = r.table.column("t_us").unwrap();
    let last = t.len() - 1;
    let mut curves = Vec::new();
    for n in [1usize, 2, 3] {
        curves.push(r.table.column(&format!("n_N{n}")).unwrap().to_vec());
    }
    let mut worst = 0.0f64;
    for k in 0..=last {
        for a in 0..curves.len() {
            for b in a + 1..curves.len() {
                let dev = (curves[a][k] - curves[b][k]).abs() / curves[b][k].abs().max(1e-9);
                worst = worst.max(dev);
            }
        }
    }
    println!("max pairwise deviation = {worst:.4}; n(0) = {:.3}, n(end) = {:.3}", curves[0][0], curves[0][last]);
}
