//! Shipped scenario presets reproducing the reference figures and table.

use darkcool_core::models::{derive_couplings, PhysParams};
use darkcool_core::{two_pi_mhz, CoolError, Result};

use crate::config::{Config, InitialChoice, Kind, ModelChoice, ModesSource, Overlay, RecoilMode};

/// Weak-coupling parameter set (balanced drive at 2π×40 MHz, detuning
/// 2π×503.1 MHz chosen so ω_s = ω_m at resonance).
fn weak_base() -> PhysParams {
    PhysParams {
        omega_g: two_pi_mhz(40.0),
        omega_e: two_pi_mhz(40.0),
        delta_g: two_pi_mhz(503.1),
        delta_e: two_pi_mhz(503.1),
        gamma_g: two_pi_mhz(6.0),
        gamma_e: two_pi_mhz(12.0),
        omega_m: two_pi_mhz(1.59),
        eta_z: 1e-3,
        g_odf: 0.0,
        gamma_m: 0.0,
        n_th: 4.6,
        n_ions: 1,
        cutoff: 30,
        k_ratio_g: 20.0,
        k_ratio_e: 20.0,
        eta_split: 0.5,
    }
}

/// Strong-coupling parameter set (2π×35 MHz drive, 2π×385 MHz detuning,
/// η_z = 0.13 → g_R/γ_b ≈ 1.4).
fn strong_base() -> PhysParams {
    PhysParams {
        omega_g: two_pi_mhz(35.0),
        omega_e: two_pi_mhz(35.0),
        delta_g: two_pi_mhz(385.0),
        delta_e: two_pi_mhz(385.0),
        eta_z: 0.13,
        ..weak_base()
    }
}

/// Scan parameter set (2π×40 MHz drive at 2π×512 MHz detuning).
fn scan_base() -> PhysParams {
    PhysParams { delta_g: two_pi_mhz(512.0), delta_e: two_pi_mhz(512.0), ..weak_base() }
}

fn resonant(mut p: PhysParams) -> PhysParams {
    let dc = derive_couplings(&p).expect("preset parameters are valid");
    p.omega_m = dc.omega_s;
    p
}

const GAMMA_M_PAPER: f64 = 0.75e-6; // 2π × 0.75 s⁻¹ in 2π×MHz
const G_ODF_PAPER: f64 = 3.6e-3; // 2π × 3.6 kHz in 2π×MHz

fn steady_sweep(params: PhysParams, name: &str) -> Config {
    Config {
        params,
        kind: Kind::SteadySweep,
        model: ModelChoice::ThreeLevel,
        sweep: Some((
            "Omega_g".into(),
            (0..31).map(|k| 25.0 + 30.0 * k as f64 / 30.0).collect(),
        )),
        seed_figure: Some(name.into()),
        name: name.into(),
        ..Config::default()
    }
}

/// Construct a preset by name.
pub fn preset(name: &str) -> Result<Config> {
    let cfg = match name {
        "fig3b" => Config {
            params: weak_base(),
            kind: Kind::ScatteringProfile,
            sweep: Some((
                "delta_ratio".into(),
                (0..241).map(|k| 0.9 + 0.2 * k as f64 / 240.0).collect(),
            )),
            seed_figure: Some("fig3b".into()),
            name: "fig3b".into(),
            ..Config::default()
        },
        "fig4a" => steady_sweep(weak_base(), "fig4a"),
        "fig4b" => steady_sweep(
            PhysParams { gamma_m: two_pi_mhz(GAMMA_M_PAPER), ..weak_base() },
            "fig4b",
        ),
        "fig4c" => steady_sweep(
            PhysParams { g_odf: two_pi_mhz(G_ODF_PAPER), ..weak_base() },
            "fig4c",
        ),
        "fig4d" => steady_sweep(
            PhysParams {
                g_odf: two_pi_mhz(G_ODF_PAPER),
                gamma_m: two_pi_mhz(GAMMA_M_PAPER),
                ..weak_base()
            },
            "fig4d",
        ),
        "fig4e" | "fig4f" => Config {
            params: resonant(PhysParams {
                gamma_m: two_pi_mhz(GAMMA_M_PAPER),
                g_odf: if name == "fig4f" { two_pi_mhz(G_ODF_PAPER) } else { 0.0 },
                ..weak_base()
            }),
            kind: Kind::Dynamics,
            model: ModelChoice::EffectiveBare,
            overlay: Overlay::RateEquation,
            initial: InitialChoice::DarkThermal,
            t_final_us: 2000.0,
            n_out: 81,
            rel_tol: 1e-5,
            abs_tol: 1e-6,
            seed_figure: Some(name.into()),
            name: name.into(),
            ..Config::default()
        },
        "fig6a" => {
            // weak collective point: g_R/γ_b = 0.013 via η_z
            let mut p = resonant(strong_base());
            let dc = derive_couplings(&p)?;
            p.eta_z = 0.013 * dc.gamma_b * 2.0 / dc.omega_r.norm();
            Config {
                params: PhysParams { cutoff: 22, ..p },
                kind: Kind::Dynamics,
                model: ModelChoice::FullDressed,
                n_list: vec![1, 2, 3, 4, 5],
                initial: InitialChoice::DarkThermal,
                t_final_us: 60.0,
                n_out: 21,
                rel_tol: 1e-5,
                abs_tol: 1e-6,
                seed_figure: Some("fig6a".into()),
                name: "fig6a".into(),
                ..Config::default()
            }
        }
        "fig6b" => Config {
            params: resonant(strong_base()),
            kind: Kind::Dynamics,
            model: ModelChoice::FullDressed,
            n_list: vec![1, 2, 3, 4],
            initial: InitialChoice::BrightVacuum,
            overlay: Overlay::Ladder,
            cutoff_auto_strong: true,
            t_final_us: 80.0,
            n_out: 41,
            rel_tol: 1e-5,
            abs_tol: 1e-8,
            seed_figure: Some("fig6b".into()),
            name: "fig6b".into(),
            ..Config::default()
        },
        "fig6c" => Config {
            params: resonant(strong_base()),
            kind: Kind::CollectiveRates,
            n_list: vec![10, 60, 110, 160, 210, 260],
            seed_figure: Some("fig6c".into()),
            name: "fig6c".into(),
            ..Config::default()
        },
        "fig6d" => Config {
            params: resonant(strong_base()),
            kind: Kind::Dynamics,
            model: ModelChoice::ThreeLevel,
            initial: InitialChoice::DarkThermal,
            overlay: Overlay::Ladder,
            outputs: vec!["mean_phonon".into(), "ground_state_pop".into()],
            t_final_us: 150.0,
            n_out: 51,
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            seed_figure: Some("fig6d".into()),
            name: "fig6d".into(),
            ..Config::default()
        },
        "fig8a" => Config {
            params: resonant(PhysParams { cutoff: 18, ..weak_base() }),
            kind: Kind::RecoilCompare,
            recoil_mode: RecoilMode::Dynamics,
            model: ModelChoice::EffectiveBare,
            initial: InitialChoice::DarkThermal,
            quad_nodes: 4,
            t_final_us: 6000.0,
            n_out: 25,
            rel_tol: 1e-5,
            abs_tol: 1e-6,
            seed_figure: Some("fig8a".into()),
            name: "fig8a".into(),
            ..Config::default()
        },
        "fig8b" => Config {
            // |k|Z_zpf ≈ 0.38 for a light ion at this trap frequency;
            // with η_z = 0.13 that makes |k|/Δk_z ≈ 2.9. The default 20
            // belongs to the weak preset (η_z = 0.001) where the recoil
            // kick stays deep in the Lamb-Dicke regime.
            params: resonant(PhysParams {
                k_ratio_g: 2.9,
                k_ratio_e: 2.9,
                ..strong_base()
            }),
            kind: Kind::RecoilCompare,
            recoil_mode: RecoilMode::Steady,
            model: ModelChoice::ThreeLevel,
            quad_nodes: 8,
            seed_figure: Some("fig8b".into()),
            name: "fig8b".into(),
            ..Config::default()
        },
        "fig9a" | "fig9b" => Config {
            params: resonant(scan_base()),
            kind: Kind::OptimalityScan,
            sweep: Some(("eta_z".into(), log_grid(1e-3, 0.3, 13))),
            fit_window_us: (0.0, 50.0),
            seed_figure: Some(name.into()),
            name: name.into(),
            ..Config::default()
        },
        "fig9c" | "fig9d" => Config {
            params: resonant(scan_base()),
            kind: Kind::OptimalityScan,
            sweep: Some(("eta_z".into(), log_grid(1e-3, 0.3, 17))),
            n_list: vec![1, 5, 10, 30],
            modes_source: ModesSource::UniformBand(two_pi_mhz(0.3)),
            seed_figure: Some(name.into()),
            name: name.into(),
            ..Config::default()
        },
        "tab1" => Config {
            params: resonant(PhysParams { eta_z: 0.01, ..scan_base() }),
            kind: Kind::CollectiveRates,
            table1: true,
            n_list: vec![1, 2, 3, 5, 10, 50],
            seed_figure: Some("tab1".into()),
            name: "tab1".into(),
            ..Config::default()
        },
        other => {
            return Err(CoolError::invalid(format!(
                "unknown preset `{other}`; see `darkcool presets list`"
            )))
        }
    };
    Ok(cfg)
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (a.ln() + (b.ln() - a.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Names plus one-line descriptions for `presets list`.
pub fn catalogue() -> Vec<(&'static str, &'static str)> {
    vec![
        ("fig3b", "steady-state scattering rate vs detuning ratio (CPT dip)"),
        ("fig4a", "steady n_f vs Omega_g, three-level numerics vs analytics, gamma_m = 0"),
        ("fig4b", "same with mode rethermalization (minimum near 0.086)"),
        ("fig4c", "same with optical dipole force, gamma_m = 0"),
        ("fig4d", "ODF + rethermalization (minimum near 0.0039)"),
        ("fig4e", "cooling dynamics at resonance vs rate equation"),
        ("fig4f", "same with the optical dipole force on"),
        ("fig6a", "collective dynamics, weak coupling: N = 1..5 curves collapse"),
        ("fig6b", "collective dynamics, strong coupling: exact vs ladder, N = 1..4"),
        ("fig6c", "collective decay rates vs excitation number for large N"),
        ("fig6d", "strong-coupling three-level dynamics vs ladder, N = 1"),
        ("fig8a", "photon-recoil on/off phonon dynamics, weak coupling"),
        ("fig8b", "photon-recoil on/off steady state, strong coupling"),
        ("fig9a", "optimality scan: steady n_f vs eta_z, exact vs combined formula"),
        ("fig9b", "optimality scan: 0-50 us cooling rate vs eta_z"),
        ("fig9c", "analytic n_f vs eta_z for several ion numbers"),
        ("fig9d", "analytic excitation number vs eta_z for several ion numbers"),
        ("tab1", "cooling-parameter table at the pinned drive"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        for (name, _) in catalogue() {
            let cfg = preset(name).unwrap();
            assert_eq!(cfg.name, name);
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn fig6a_weak_coupling_ratio() {
        let cfg = preset("fig6a").unwrap();
        let dc = derive_couplings(&cfg.params).unwrap();
        assert!((dc.g_r / dc.gamma_b - 0.013).abs() < 1e-12);
    }

    #[test]
    fn resonant_presets_sit_on_resonance() {
        for name in ["fig4e", "fig6b", "fig9a"] {
            let cfg = preset(name).unwrap();
            let dc = derive_couplings(&cfg.params).unwrap();
            assert!(
                ((dc.omega_s - cfg.params.omega_m) / cfg.params.omega_m).abs() < 1e-9,
                "{name} off resonance"
            );
        }
    }
}
