//! Weak-coupling analytic theory: optical-Bloch steady state, spin
//! absorption spectrum (regression-theorem and closed-form routes),
//! reduced phonon rates, and the scalar cooling rate equation.

use crate::error::{CoolError, Result};
use crate::models::{derive_couplings, PhysParams};
use crate::C64;

/// The 3×3 optical-Bloch system ∂_t⟨σ⃗⟩ = A⟨σ⃗⟩ + Γ and its steady state,
/// with the spin-force coupling vector c = (0, g_R, g_O).
#[derive(Debug, Clone)]
pub struct OBSystem {
    pub a: [[f64; 3]; 3],
    pub gamma_vec: [f64; 3],
    pub sigma_ss: [f64; 3],
    pub f_coupling: [f64; 3],
}

/// Solve a 3×3 real system by Gaussian elimination with partial pivoting.
fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Result<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[piv][col].abs() < 1e-300 {
            return Err(CoolError::SolverFailure {
                msg: "singular optical-Bloch kernel".into(),
                residual: m[piv][col].abs(),
            });
        }
        m.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut acc = m[col][3];
        for k in col + 1..3 {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}

/// Solve a 3×3 complex system by Gaussian elimination with partial pivoting.
fn solve3c(a: &[[C64; 3]; 3], b: &[C64; 3]) -> Result<[C64; 3]> {
    let mut m = [[C64::new(0.0, 0.0); 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap())
            .unwrap();
        if m[piv][col].norm() < 1e-300 {
            return Err(CoolError::SolverFailure {
                msg: "singular resolvent".into(),
                residual: m[piv][col].norm(),
            });
        }
        m.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                let sub = f * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    let mut x = [C64::new(0.0, 0.0); 3];
    for col in (0..3).rev() {
        let mut acc = m[col][3];
        for k in col + 1..3 {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}

/// Assemble the optical-Bloch kernel, dissipation vector, and steady state.
/// Requires two-photon resonance (the printed kernel uses Δ_R).
pub fn ob_system(p: &PhysParams) -> Result<OBSystem> {
    if !p.is_two_photon_resonant() {
        return Err(CoolError::invalid(
            "the optical-Bloch kernel is defined at two-photon resonance delta = 0",
        ));
    }
    let dc = derive_couplings(p)?;
    let g = p.gamma();
    let dr = p.delta_r();
    let d2 = g * g + 4.0 * dr * dr;
    let omega_r = dc.omega_r.re; // real at δ = 0
    let a = [
        [-0.5 * dc.gamma_b, -dc.omega_ls, 0.0],
        [dc.omega_ls, -0.5 * dc.gamma_b, -omega_r],
        [
            p.omega_e * p.omega_g * (p.gamma_e - p.gamma_g) / d2,
            omega_r,
            -(p.gamma_e * p.omega_g * p.omega_g + p.gamma_g * p.omega_e * p.omega_e) / d2,
        ],
    ];
    // Derived from the effective jump operators; the overall sign makes the
    // dark state (⟨σ_x⟩ = −1 at equal Rabi) the attractor, which the exact
    // Liouvillian oracle in the tests pins down.
    let gamma_vec = [
        -(p.omega_e * p.omega_g * g) / d2,
        0.0,
        (p.gamma_e * p.omega_g * p.omega_g - p.gamma_g * p.omega_e * p.omega_e) / d2,
    ];
    // σ_ss = −A⁻¹Γ
    let neg = [-gamma_vec[0], -gamma_vec[1], -gamma_vec[2]];
    let sigma_ss = solve3(&a, &neg)?;

    // the spin must relax: Re eig(A) < 0
    let mut m = faer::Mat::<f64>::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = a[i][j];
        }
    }
    let eigs = m.eigenvalues().map_err(|e| CoolError::SolverFailure {
        msg: format!("kernel eigenvalues failed: {e:?}"),
        residual: f64::NAN,
    })?;
    if eigs.iter().any(|l| l.re >= 0.0) {
        return Err(CoolError::SolverFailure {
            msg: "optical-Bloch kernel has a non-decaying eigenvalue".into(),
            residual: eigs.iter().map(|l| l.re).fold(f64::MIN, f64::max),
        });
    }

    Ok(OBSystem { a, gamma_vec, sigma_ss, f_coupling: [0.0, dc.g_r, p.g_odf] })
}

impl OBSystem {
    /// Eigenvalues of the kernel (for diagnostics).
    pub fn kernel_eigenvalues(&self) -> Result<Vec<C64>> {
        let mut m = faer::Mat::<f64>::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = self.a[i][j];
            }
        }
        let eigs = m.eigenvalues().map_err(|e| CoolError::SolverFailure {
            msg: format!("kernel eigenvalues failed: {e:?}"),
            residual: f64::NAN,
        })?;
        Ok(eigs.iter().map(|l| C64::new(l.re, l.im)).collect())
    }
}

/// Quantum-regression spectrum
/// S(ω) = 2 Re[c⃗ᵀ(−iωI − A)⁻¹(⟨σ⃗F⟩_ss − ⟨σ⃗⟩_ss⟨F⟩_ss)],
/// with ⟨σ_aσ_b⟩ = δ_ab + iε_abc⟨σ_c⟩_ss.
pub fn spectrum_regression(sys: &OBSystem, omega: f64) -> Result<f64> {
    let s = &sys.sigma_ss;
    let cvec = &sys.f_coupling;
    // v_a = c_a + i(c × σ_ss)_a − σ_ss_a (c·σ_ss)
    let cross = [
        cvec[1] * s[2] - cvec[2] * s[1],
        cvec[2] * s[0] - cvec[0] * s[2],
        cvec[0] * s[1] - cvec[1] * s[0],
    ];
    let cdot: f64 = cvec.iter().zip(s).map(|(a, b)| a * b).sum();
    let mut v = [C64::new(0.0, 0.0); 3];
    for a in 0..3 {
        v[a] = C64::new(cvec[a] - s[a] * cdot, cross[a]);
    }
    // M = −iωI − A
    let mut m = [[C64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = C64::new(-sys.a[i][j], if i == j { -omega } else { 0.0 });
        }
    }
    let x = solve3c(&m, &v)?;
    let val: C64 = (0..3).map(|a| C64::new(cvec[a], 0.0) * x[a]).sum();
    Ok(2.0 * val.re)
}

/// Closed-form Lorentzian spectrum
/// S(ω) = γ_b[4g_O²Ω_g²Ω_e² + g_R²(Ω_g²+Ω_e²)²] /
///        ((Ω_e²+Ω_g²)²[(ω−ω_s)² + (γ_b/2)²]).
pub fn spectrum_lorentzian(p: &PhysParams, omega: f64) -> Result<f64> {
    if !p.is_two_photon_resonant() {
        return Err(CoolError::invalid("the Lorentzian form holds at delta = 0"));
    }
    let dc = derive_couplings(p)?;
    let og2 = p.omega_g * p.omega_g;
    let oe2 = p.omega_e * p.omega_e;
    let os2 = og2 + oe2;
    let num = dc.gamma_b
        * (4.0 * p.g_odf * p.g_odf * og2 * oe2 + dc.g_r * dc.g_r * os2 * os2);
    let den = os2 * os2 * ((omega - dc.omega_s).powi(2) + 0.25 * dc.gamma_b * dc.gamma_b);
    Ok(num / den)
}

/// Source of S(±ω_m) for the phonon rate reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    Lorentzian,
    Regression,
}

/// Reduced phonon-mode rates obtained by eliminating the spin.
#[derive(Debug, Clone, Copy)]
pub struct PhononRates {
    /// S(ω_m).
    pub s_plus: f64,
    /// S(−ω_m).
    pub s_minus: f64,
    /// Total down rate A₋ = S(ω_m) + γ_m(n_th+1).
    pub a_minus: f64,
    /// Total up rate A₊ = S(−ω_m) + γ_m n_th.
    pub a_plus: f64,
    /// Net cooling rate Γ_c = A₋ − A₊.
    pub gamma_c: f64,
    /// Steady occupation A₊/Γ_c; `None` when Γ_c ≤ 0 ("no cooling").
    pub n_f: Option<f64>,
    /// Spin-induced channel rate γ_s = S(ω_m) − S(−ω_m).
    pub gamma_s: f64,
    /// Spin-channel occupation n_s = S(−ω_m)/γ_s.
    pub n_s: f64,
    /// Set when Γ_c ≤ 0.
    pub no_cooling: bool,
}

/// Evaluate the phonon rate reduction from the chosen spectrum source.
pub fn phonon_rates(p: &PhysParams, source: SpectrumSource) -> Result<PhononRates> {
    let (s_plus, s_minus) = match source {
        SpectrumSource::Lorentzian => (
            spectrum_lorentzian(p, p.omega_m)?,
            spectrum_lorentzian(p, -p.omega_m)?,
        ),
        SpectrumSource::Regression => {
            let sys = ob_system(p)?;
            (
                spectrum_regression(&sys, p.omega_m)?,
                spectrum_regression(&sys, -p.omega_m)?,
            )
        }
    };
    let a_minus = s_plus + p.gamma_m * (p.n_th + 1.0);
    let a_plus = s_minus + p.gamma_m * p.n_th;
    let gamma_c = a_minus - a_plus;
    let gamma_s = s_plus - s_minus;
    let n_s = if gamma_s != 0.0 { s_minus / gamma_s } else { f64::INFINITY };
    let no_cooling = gamma_c <= 0.0;
    let n_f = if no_cooling { None } else { Some(a_plus / gamma_c) };
    Ok(PhononRates { s_plus, s_minus, a_minus, a_plus, gamma_c, n_f, gamma_s, n_s, no_cooling })
}

/// Optimal (resonant) cooling rate and occupation.
#[derive(Debug, Clone, Copy)]
pub struct OptimalRates {
    /// Equal-Rabi closed form 64Δ_R²(g_O²+g_R²)/((16Δ_R²+γ²)γ_b).
    pub gamma_s_opt_equal: f64,
    /// General-Rabi form
    /// 64Δ_R²(γ²+4Δ_R²)[4g_O²Ω_g²Ω_e² + g_R²(Ω_g²+Ω_e²)²] /
    /// (γ(γ²+16Δ_R²)(Ω_g²+Ω_e²)³).
    pub gamma_s_opt_general: f64,
    /// Combined minimum occupation
    /// (γ_s,opt·n_s,min + γ_m·n_th)/(γ_s,opt + γ_m) with n_s,min = (γ/4Δ_R)².
    pub n_f_min: f64,
    /// True when the general form was used for n_f_min (Ω_g ≠ Ω_e).
    pub used_general: bool,
    /// Set when ω_s and ω_m disagree by more than 1%.
    pub resonance_warning: bool,
}

/// Evaluate the closed-form optimum; resonance ω_s = ω_m is the caller's
/// responsibility (a >1% mismatch sets the warning flag).
pub fn optimal_rates(p: &PhysParams) -> Result<OptimalRates> {
    let dc = derive_couplings(p)?;
    let g = p.gamma();
    let dr = p.delta_r();
    let og2 = p.omega_g * p.omega_g;
    let oe2 = p.omega_e * p.omega_e;
    let os2 = og2 + oe2;
    let equal = 64.0 * dr * dr * (p.g_odf * p.g_odf + dc.g_r * dc.g_r)
        / ((16.0 * dr * dr + g * g) * dc.gamma_b);
    let general = 64.0 * dr * dr * (g * g + 4.0 * dr * dr)
        * (4.0 * p.g_odf * p.g_odf * og2 * oe2 + dc.g_r * dc.g_r * os2 * os2)
        / (g * (g * g + 16.0 * dr * dr) * os2 * os2 * os2);
    let used_general = (p.omega_g - p.omega_e).abs() > 1e-12 * os2.sqrt();
    let gamma_s_opt = if used_general { general } else { equal };
    let n_s_min = (g / (4.0 * dr)).powi(2);
    let n_f_min = (gamma_s_opt * n_s_min + p.gamma_m * p.n_th) / (gamma_s_opt + p.gamma_m);
    let resonance_warning = (dc.omega_s - p.omega_m).abs() > 0.01 * p.omega_m.max(1e-300);
    Ok(OptimalRates {
        gamma_s_opt_equal: equal,
        gamma_s_opt_general: general,
        n_f_min,
        used_general,
        resonance_warning,
    })
}

/// Exact solution of ⟨ṅ⟩ = −Γ_c⟨n⟩ + A₊ for each grid time.
pub fn rate_equation_trajectory(rates: &PhononRates, n0: f64, t_grid: &[f64]) -> Vec<f64> {
    let gc = rates.gamma_c;
    let ap = rates.a_plus;
    t_grid
        .iter()
        .map(|&t| {
            if gc.abs() < 1e-300 {
                n0 + ap * t
            } else {
                let nf = ap / gc;
                nf + (n0 - nf) * (-gc * t).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_effective_two_level, Basis};
    use crate::qops::{steady_state, trace_sparse_dense, SteadyMethod};
    use crate::{two_pi_mhz, TWO_PI};

    fn fig4(eta: f64, g_odf: f64, gamma_m: f64) -> PhysParams {
        PhysParams { eta_z: eta, g_odf, gamma_m, ..PhysParams::default() }
    }

    #[test]
    fn kernel_symmetric_couplings_vanish() {
        // Ω_g = Ω_e, γ_g = γ_e → A[2][0] = 0 and Γ[2] = 0
        let p = PhysParams { gamma_g: TWO_PI * 9.0, gamma_e: TWO_PI * 9.0, ..fig4(1e-3, 0.0, 0.0) };
        let sys = ob_system(&p).unwrap();
        assert_eq!(sys.a[2][0], 0.0);
        assert_eq!(sys.gamma_vec[2], 0.0);
    }

    #[test]
    fn steady_state_satisfies_kernel() {
        let p = fig4(1e-3, 0.0, 0.0);
        let sys = ob_system(&p).unwrap();
        for i in 0..3 {
            let mut acc = sys.gamma_vec[i];
            for j in 0..3 {
                acc += sys.a[i][j] * sys.sigma_ss[j];
            }
            assert!(acc.abs() < 1e-12, "row {i} residual {acc}");
        }
    }

    #[test]
    fn kernel_slowest_eigenvalue_is_gamma_b_half() {
        // at Ω_g = Ω_e, Δ_R ≫ γ the slowest decay is −γ_b/2
        let p = fig4(1e-3, 0.0, 0.0);
        let dc = derive_couplings(&p).unwrap();
        let sys = ob_system(&p).unwrap();
        let eigs = sys.kernel_eigenvalues().unwrap();
        let slowest = eigs.iter().map(|l| l.re).fold(f64::MIN, f64::max);
        assert!(
            (slowest + 0.5 * dc.gamma_b).abs() < 0.02 * dc.gamma_b,
            "slowest {slowest} vs -gamma_b/2 {}",
            -0.5 * dc.gamma_b
        );
    }

    /// Independent oracle: σ_ss from the 3×3 kernel equals the exact
    /// Liouvillian steady state of the bare two-level model with the
    /// phonon factor removed (cutoff 1 keeps a single trivial Fock state).
    #[test]
    fn ob_steady_state_matches_exact_liouvillian() {
        // γ_m > 0 with n_th = 0 damps the (decoupled) phonon factor so the
        // joint steady state is unique; the spin block is unaffected.
        let p = PhysParams {
            omega_g: two_pi_mhz(25.0),
            omega_e: two_pi_mhz(40.0),
            cutoff: 1,
            eta_z: 0.0,
            gamma_m: 0.5,
            n_th: 0.0,
            ..PhysParams::default()
        };
        let sys = ob_system(&p).unwrap();
        let model = build_effective_two_level(&p, Basis::Bare).unwrap();
        let liouv = model.to_liouvillian().unwrap();
        let rho = steady_state(&liouv, SteadyMethod::NullSpace).unwrap();
        // spin Pauli expectations in the (e, g) ⊗ |0⟩ basis (dim 4, fock dim 2)
        let sp = crate::qops::spin_ops("e", "g").unwrap();
        for (k, pauli) in [&sp.sx, &sp.sy, &sp.sz].iter().enumerate() {
            let full = crate::qops::embed(&pauli.matrix, "spin", &model.space).unwrap();
            let val = trace_sparse_dense(&full.matrix, &rho).re;
            assert!(
                (val - sys.sigma_ss[k]).abs() < 1e-9,
                "sigma[{k}]: exact {val} vs kernel {}",
                sys.sigma_ss[k]
            );
        }
    }

    #[test]
    fn regression_matches_lorentzian() {
        // two independent routes to S(ω) agree within 1% at Fig.-4-like
        // parameters, at ±ω_m and at the peak
        let p = fig4(1e-3, 0.0, 0.0);
        let dc = derive_couplings(&p).unwrap();
        let sys = ob_system(&p).unwrap();
        for omega in [p.omega_m, -p.omega_m, dc.omega_s] {
            let sr = spectrum_regression(&sys, omega).unwrap();
            let sl = spectrum_lorentzian(&p, omega).unwrap();
            assert!(
                (sr - sl).abs() <= 0.01 * sl.abs(),
                "omega {omega}: regression {sr} vs lorentzian {sl}"
            );
        }
    }

    #[test]
    fn regression_spectrum_positive_and_peaked() {
        let p = fig4(1e-3, 0.0, 0.0);
        let dc = derive_couplings(&p).unwrap();
        let sys = ob_system(&p).unwrap();
        let mut best = (0.0, f64::MIN);
        for k in 0..1000 {
            let omega = -4.0 * dc.omega_s + 8.0 * dc.omega_s * (k as f64) / 999.0;
            let s = spectrum_regression(&sys, omega).unwrap();
            assert!(s >= -1e-12, "S({omega}) = {s}");
            if s > best.1 {
                best = (omega, s);
            }
        }
        let grid_step = 8.0 * dc.omega_s / 999.0;
        assert!(
            (best.0 - dc.omega_s).abs() <= grid_step,
            "peak at {} vs omega_s {}",
            best.0,
            dc.omega_s
        );
    }

    #[test]
    fn lorentzian_shape_identities() {
        let p = fig4(1e-3, 0.0, 0.0);
        let dc = derive_couplings(&p).unwrap();
        // g_O = 0, Ω_g = Ω_e → S(ω_s) = 4g_R²/γ_b
        let peak = spectrum_lorentzian(&p, dc.omega_s).unwrap();
        assert!((peak - 4.0 * dc.g_r * dc.g_r / dc.gamma_b).abs() < 1e-12 * peak);
        // half maximum at ω_s ± γ_b/2
        for sgn in [-1.0, 1.0] {
            let half = spectrum_lorentzian(&p, dc.omega_s + sgn * 0.5 * dc.gamma_b).unwrap();
            assert!((half - 0.5 * peak).abs() < 1e-12 * peak);
        }
    }

    #[test]
    fn sideband_suppression_ratio() {
        // S(ω_m)/S(−ω_m) = (γ_b² + 16ω_s²)/γ_b² at resonance
        let p = fig4(1e-3, 0.0, 0.0);
        let dc = derive_couplings(&p).unwrap();
        let p = PhysParams { omega_m: dc.omega_s, ..p };
        let ratio = spectrum_lorentzian(&p, p.omega_m).unwrap()
            / spectrum_lorentzian(&p, -p.omega_m).unwrap();
        let expect =
            (dc.gamma_b * dc.gamma_b + 16.0 * dc.omega_s * dc.omega_s) / (dc.gamma_b * dc.gamma_b);
        assert!((ratio - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn qbl_at_resonance() {
        // γ_m = 0, resonance: n_f = n_s,min = (γ/4Δ_R)²
        let p = fig4(1e-3, 0.0, 0.0);
        let dc = derive_couplings(&p).unwrap();
        let p = PhysParams { omega_m: dc.omega_s, ..p };
        let rates = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap();
        let n_ba = (p.gamma() / (4.0 * p.delta_r())).powi(2);
        let n_f = rates.n_f.unwrap();
        assert!((n_f - n_ba).abs() < 1e-9 * n_ba, "n_f {n_f} vs QBL {n_ba}");
    }

    #[test]
    fn fig4b_minimum_occupation() {
        // rethermalization-limited optimum ripples around the quoted 0.086
        let gamma_m = TWO_PI * 0.75e-6; // 2π × 0.75 s⁻¹
        let p = fig4(1e-3, 0.0, gamma_m);
        let dc = derive_couplings(&p).unwrap();
        let p = PhysParams { omega_m: dc.omega_s, ..p };
        let rates = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap();
        let n_f = rates.n_f.unwrap();
        assert!(
            (n_f - 0.086).abs() < 0.2 * 0.086,
            "n_f = {n_f}, quoted 0.086 +- 20%"
        );
    }

    #[test]
    fn fig4d_odf_minimum_occupation() {
        let gamma_m = TWO_PI * 0.75e-6;
        let p = fig4(1e-3, TWO_PI * 3.6e-3, gamma_m);
        let dc = derive_couplings(&p).unwrap();
        let p = PhysParams { omega_m: dc.omega_s, ..p };
        let rates = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap();
        let n_f = rates.n_f.unwrap();
        assert!(
            (n_f - 0.0039).abs() < 0.2 * 0.0039,
            "n_f = {n_f}, quoted 0.0039 +- 20%"
        );
    }

    #[test]
    fn optimal_rate_values() {
        // direct evaluation at Fig.-4 parameters: γ_s,opt = 2π×44 Hz ± 2%
        let p = fig4(1e-3, 0.0, 0.0);
        let opt = optimal_rates(&p).unwrap();
        let hz = opt.gamma_s_opt_equal / TWO_PI * 1e6; // rad/µs → Hz
        assert!((hz - 44.0).abs() < 0.02 * 44.0, "gamma_s_opt = {hz} Hz");
        assert!(!opt.used_general);
        // γ_m → 0: n_f_min → (γ/4Δ_R)²
        let n_ba = (p.gamma() / (4.0 * p.delta_r())).powi(2);
        assert!((opt.n_f_min - n_ba).abs() < 1e-12 * n_ba);
    }

    #[test]
    fn odf_scaling_enhances_rate() {
        // g_O = p·g_R multiplies γ_s,opt by (1+p²)
        let base = fig4(1e-3, 0.0, 0.0);
        let dc = derive_couplings(&base).unwrap();
        for pf in [0.5, 2.0, 4.5] {
            let p = PhysParams { g_odf: pf * dc.g_r, ..base.clone() };
            let opt0 = optimal_rates(&base).unwrap();
            let opt1 = optimal_rates(&p).unwrap();
            let ratio = opt1.gamma_s_opt_equal / opt0.gamma_s_opt_equal;
            assert!(
                (ratio - (1.0 + pf * pf)).abs() < 1e-9 * (1.0 + pf * pf),
                "ratio {ratio}"
            );
        }
    }

    #[test]
    fn equal_and_general_forms_agree_at_equal_rabi() {
        let p = fig4(1e-3, TWO_PI * 2e-3, 0.0);
        let opt = optimal_rates(&p).unwrap();
        assert!(
            (opt.gamma_s_opt_equal - opt.gamma_s_opt_general).abs()
                < 1e-10 * opt.gamma_s_opt_equal
        );
    }

    #[test]
    fn rate_equation_solution() {
        let rates = PhononRates {
            s_plus: 0.0,
            s_minus: 0.0,
            a_minus: 0.0,
            a_plus: 0.02,
            gamma_c: 0.5,
            n_f: Some(0.04),
            gamma_s: 0.5,
            n_s: 0.0,
            no_cooling: false,
        };
        let t = [0.0, 1.0, 10.0, 1e6];
        let n = rate_equation_trajectory(&rates, 4.6, &t);
        assert!((n[0] - 4.6).abs() < 1e-12);
        assert!((n[3] - 0.04).abs() < 1e-9);
        let expect = 0.04 + (4.6 - 0.04) * (-0.5f64).exp();
        assert!((n[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn no_cooling_is_flagged_not_fatal() {
        // far off resonance with ω_s ≪ ω_m and rethermalization: heating
        let p = PhysParams {
            omega_g: two_pi_mhz(5.0),
            omega_e: two_pi_mhz(5.0),
            gamma_m: 1e-3,
            n_th: 4.6,
            eta_z: 1e-3,
            ..PhysParams::default()
        };
        let rates = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap();
        // either outcome is acceptable physics; the call must not error and
        // the flag must match the sign
        assert_eq!(rates.no_cooling, rates.gamma_c <= 0.0);
        if rates.no_cooling {
            assert!(rates.n_f.is_none());
        }
    }

    #[test]
    fn qbl_floor_over_grid() {
        // n_f ≥ n_BA(1 − 1e-6) at resonance over an (Ω_g, Ω_e, g_O) grid
        let base = fig4(1e-3, 0.0, 0.0);
        for ig in 0..5 {
            for ie in 0..5 {
                for io in 0..3 {
                    let p = PhysParams {
                        omega_g: two_pi_mhz(10.0 + 15.0 * ig as f64),
                        omega_e: two_pi_mhz(10.0 + 15.0 * ie as f64),
                        ..base.clone()
                    };
                    let dc = derive_couplings(&p).unwrap();
                    let p = PhysParams {
                        omega_m: dc.omega_s,
                        g_odf: io as f64 * dc.g_r,
                        ..p
                    };
                    let rates = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap();
                    let n_ba = (p.gamma() / (4.0 * p.delta_r())).powi(2);
                    let n_f = rates.n_f.unwrap();
                    assert!(
                        n_f >= n_ba * (1.0 - 1e-6),
                        "floor violated: n_f {n_f} < n_BA {n_ba}"
                    );
                    assert!((n_f - n_ba).abs() <= 1e-6 * n_ba);
                }
            }
        }
    }

    #[test]
    fn n_f_monotone_in_g_odf() {
        // with γ_m > 0, adding ODF lowers the steady occupation
        let gamma_m = TWO_PI * 0.75e-6;
        let base = fig4(1e-3, 0.0, gamma_m);
        let dc = derive_couplings(&base).unwrap();
        let base = PhysParams { omega_m: dc.omega_s, ..base };
        let mut prev = f64::INFINITY;
        for k in 0..6 {
            let p = PhysParams { g_odf: k as f64 * 1e-3 * TWO_PI, ..base.clone() };
            let n_f = phonon_rates(&p, SpectrumSource::Lorentzian).unwrap().n_f.unwrap();
            assert!(n_f <= prev + 1e-15, "n_f not monotone: {n_f} after {prev}");
            prev = n_f;
        }
    }
}
