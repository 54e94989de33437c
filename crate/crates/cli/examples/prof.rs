use darkcool_core::engine::{evolve, fit_cooling_rate, ObservableSet, Tol};
use darkcool_core::models::{build_effective_two_level, build_three_level, derive_couplings, thermal_density, Basis, BuiltinObs, PhysParams, SpinInit};
use darkcool_core::weak::{phonon_rates, SpectrumSource};
use darkcool_core::two_pi_mhz;

fn main() {
    let base = {
        let p = PhysParams { delta_g: two_pi_mhz(512.0), delta_e: two_pi_mhz(512.0), gamma_m: 0.0, cutoff: 30, ..PhysParams::default() };
        let dc = derive_couplings(&p).unwrap();
        PhysParams { omega_m: dc.omega_s, ..p }
    };
    let eta = 4e-3;
    let p = PhysParams { eta_z: eta, ..base.clone() };
    let theory = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap().gamma_c;
    println!("theory = {theory:.6e}");
    let grid: Vec<f64> = (0..=25).map(|k| 2.0 * k as f64).collect();
    for (name, model) in [
        ("dressed", build_effective_two_level(&p, Basis::Dressed).unwrap()),
        ("bare", build_effective_two_level(&p, Basis::Bare).unwrap()),
        ("three_level", build_three_level(&p).unwrap()),
    ] {
        let (th, _) = thermal_density(p.n_th, p.fock_dim());
        let rho0 = model.initial_state(SpinInit::AllDark, &th).unwrap();
        let obs = ObservableSet::builtin(&model, &[BuiltinObs::MeanPhonon]).unwrap();
        let traj = evolve(&model, &rho0, &grid, &obs, Tol { rel: 1e-7, abs: 1e-9 }).unwrap();
        let n = traj.record("mean_phonon").unwrap();
        let rate = fit_cooling_rate(&traj, "mean_phonon", (10.0, 50.0)).unwrap();
        println!("{name:12} fit(10-50)={rate:.6e} ratio={:.4} n: {:.4} -> {:.4}", rate/theory, n[0], n[25]);
    }
}
