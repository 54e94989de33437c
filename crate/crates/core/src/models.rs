//! Physical model builders: every Hamiltonian + jump-operator set used by
//! the solvers, derived from a single parameter record.
//!
//! Conventions. The three-level Hamiltonian lives in the rotating frame of
//! the two Raman lasers with the optically excited state |r⟩ at zero energy
//! and detunings entering as +Δ_l σ_ll. Adiabatic elimination of |r⟩ then
//! produces light shifts +Δ_lΩ_l²/(4Δ_l²+γ²) on |g⟩, |e⟩, so in the
//! two-level basis ordered (e, g) the σ_z coefficient is (δ + ω_LS)/2 with
//! δ = Δ_e − Δ_g and ω_LS as in [`derive_couplings`]. At the two-photon
//! resonance δ = 0 (the quantitative operating point everywhere in this
//! crate) all sign conventions coincide.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoolError, Result};
use crate::modes::ModeSpectrum;
use crate::qops::{boson_ops, embed, spin_ops, CsMat, HilbertSpace, Liouvillian, QOperator};
use crate::{C64, TWO_PI};

fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

/// All laser/trap/decay parameters of one cooling configuration.
/// Frequencies and rates are angular, rad/µs.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysParams {
    /// Rabi frequency of the |g⟩→|r⟩ laser.
    pub omega_g: f64,
    /// Rabi frequency of the |e⟩→|r⟩ laser.
    pub omega_e: f64,
    /// Single-photon detuning of the g laser.
    pub delta_g: f64,
    /// Single-photon detuning of the e laser.
    pub delta_e: f64,
    /// Partial decay rate |r⟩→|g⟩.
    pub gamma_g: f64,
    /// Partial decay rate |r⟩→|e⟩.
    pub gamma_e: f64,
    /// COM mode frequency.
    pub omega_m: f64,
    /// Two-photon Lamb-Dicke parameter.
    pub eta_z: f64,
    /// Optical-dipole-force coupling.
    pub g_odf: f64,
    /// Mode damping rate.
    pub gamma_m: f64,
    /// Bath / initial thermal occupation.
    pub n_th: f64,
    /// Ion count.
    pub n_ions: usize,
    /// Fock truncation: states |0⟩..|cutoff⟩ are kept.
    pub cutoff: usize,
    /// |k_g| / Δk_z, recoil only.
    pub k_ratio_g: f64,
    /// |k_e| / Δk_z, recoil only.
    pub k_ratio_e: f64,
    /// η_gz = f·η_z, η_ez = (f−1)·η_z; only the split matters for recoil.
    pub eta_split: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            omega_g: TWO_PI * 40.0,
            omega_e: TWO_PI * 40.0,
            delta_g: TWO_PI * 503.1,
            delta_e: TWO_PI * 503.1,
            gamma_g: TWO_PI * 6.0,
            gamma_e: TWO_PI * 12.0,
            omega_m: TWO_PI * 1.59,
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
}

impl PhysParams {
    /// Total decay rate γ = γ_g + γ_e.
    pub fn gamma(&self) -> f64 {
        self.gamma_g + self.gamma_e
    }

    /// δ = Δ_e − Δ_g.
    pub fn two_photon_detuning(&self) -> f64 {
        self.delta_e - self.delta_g
    }

    /// Mean detuning; equals Δ_R at δ = 0.
    pub fn delta_r(&self) -> f64 {
        0.5 * (self.delta_g + self.delta_e)
    }

    /// Number of Fock states kept.
    pub fn fock_dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn is_two_photon_resonant(&self) -> bool {
        let scale = self.delta_g.abs().max(self.delta_e.abs()).max(self.gamma()).max(1e-300);
        self.two_photon_detuning().abs() <= 1e-9 * scale
    }

    /// η_gz from the configured split.
    pub fn eta_gz(&self) -> f64 {
        self.eta_split * self.eta_z
    }

    /// η_ez from the configured split; η_gz − η_ez = η_z always.
    pub fn eta_ez(&self) -> f64 {
        (self.eta_split - 1.0) * self.eta_z
    }

    /// Validity flags that are reported, never fatal.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let scale = 10.0 * self.omega_g.max(self.omega_e).max(self.gamma());
        if self.delta_g.abs() <= scale || self.delta_e.abs() <= scale {
            w.push(format!(
                "far-detuned validity: |Delta_l| should exceed 10*max(Omega_g, Omega_e, gamma) = {scale:.3}"
            ));
        }
        let eta_prime = self.eta_z * (self.n_th + 1.0).sqrt();
        if eta_prime >= 1.0 {
            w.push(format!(
                "Lamb-Dicke validity: eta_z*sqrt(n_th+1) = {eta_prime:.3} is not << 1"
            ));
        }
        w
    }

    fn validate_rates(&self) -> Result<()> {
        for (name, v) in [
            ("Omega_g", self.omega_g),
            ("Omega_e", self.omega_e),
            ("gamma_g", self.gamma_g),
            ("gamma_e", self.gamma_e),
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(CoolError::invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Dressed-basis quantities computed once from [`PhysParams`].
#[derive(Debug, Clone, Copy)]
pub struct DerivedCouplings {
    /// Differential light shift ω_LS.
    pub omega_ls: f64,
    /// Complex Raman coupling Ω_R.
    pub omega_r: C64,
    /// Dressed splitting ω_s.
    pub omega_s: f64,
    /// Mixing angle α, tan α = |Ω_R|/(δ + ω_LS).
    pub alpha: f64,
    /// Bright-state decay γ_b.
    pub gamma_b: f64,
    /// Raman sideband coupling g_R = η_z |Ω_R| / 2.
    pub g_r: f64,
    /// Spectrum quality factor Q_s = ω_s/γ_b.
    pub q_s: f64,
    /// Single-ion strong-coupling decay γ_{1,sc}.
    pub gamma_1sc: f64,
    /// Quantum back-action limit (γ/4Δ_R)².
    pub n_ba: f64,
}

/// Evaluate the adiabatic-elimination couplings.
pub fn derive_couplings(p: &PhysParams) -> Result<DerivedCouplings> {
    p.validate_rates()?;
    let g = p.gamma();
    if p.delta_g == 0.0 && p.delta_e == 0.0 {
        return Err(CoolError::invalid("Delta_g and Delta_e must not both vanish"));
    }
    let dg2 = 4.0 * p.delta_g * p.delta_g + g * g;
    let de2 = 4.0 * p.delta_e * p.delta_e + g * g;
    if dg2 == 0.0 || de2 == 0.0 {
        return Err(CoolError::invalid("division by zero in light shifts"));
    }
    let omega_ls =
        p.delta_e * p.omega_e * p.omega_e / de2 - p.delta_g * p.omega_g * p.omega_g / dg2;
    let omega_r = c(p.omega_g * p.omega_e * (p.delta_g + p.delta_e), 0.0)
        / (4.0 * c(p.delta_g, -0.5 * g) * c(p.delta_e, 0.5 * g));
    let delta = p.two_photon_detuning();
    let zc = delta + omega_ls;
    let omega_s = (zc * zc + omega_r.norm_sqr()).sqrt();
    let alpha = omega_r.norm().atan2(zc);
    let dr = p.delta_r();
    let d2 = g * g + 4.0 * dr * dr;
    let os2 = p.omega_g * p.omega_g + p.omega_e * p.omega_e;
    let gamma_b = g * os2 / d2;
    let g_r = 0.5 * p.eta_z.abs() * omega_r.norm();
    let q_s = if gamma_b > 0.0 { omega_s / gamma_b } else { f64::INFINITY };
    let gamma_1sc =
        0.5 * (p.omega_g * p.omega_g * p.gamma_e + p.omega_e * p.omega_e * p.gamma_g) / d2;
    let n_ba = if dr != 0.0 { (g / (4.0 * dr)).powi(2) } else { f64::INFINITY };
    Ok(DerivedCouplings {
        omega_ls,
        omega_r,
        omega_s,
        alpha,
        gamma_b,
        g_r,
        q_s,
        gamma_1sc,
        n_ba,
    })
}

/// Which physical model a [`LindbladModel`] represents; used to resolve
/// builtin observables and initial states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    ThreeLevel,
    ThreeLevelInternal,
    EffectiveBare,
    EffectiveDressed,
    MultiIonDressed,
    TavisCummings,
    RecoilThreeLevel,
    RecoilEffective,
}

/// Basis choice for the single-ion effective model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Bare,
    Dressed,
}

/// Approximation level for the multi-ion builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approx {
    FullDressed,
    TavisCummings,
}

/// Level scheme for the recoil builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelScheme {
    ThreeLevel,
    Effective,
}

/// A Hamiltonian plus labeled jump operators on a labeled space.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub space: HilbertSpace,
    pub hamiltonian: QOperator,
    pub jumps: Vec<(String, QOperator)>,
    /// Human-readable description of factor ordering and state labels.
    pub basis_doc: String,
    pub kind: ModelKind,
    pub params: PhysParams,
}

impl LindbladModel {
    pub fn to_liouvillian(&self) -> Result<Liouvillian> {
        let jumps: Vec<QOperator> = self.jumps.iter().map(|(_, j)| j.clone()).collect();
        Liouvillian::new(&self.hamiltonian, &jumps)
    }

    pub fn total_dim(&self) -> usize {
        self.space.total_dim()
    }
}

/// σ_{mn} = |m⟩⟨n| on the (g, e, r) three-level basis.
fn sigma3(m: usize, n: usize) -> CsMat {
    CsMat::from_triplets(3, &[(m, n, c(1.0, 0.0))])
}

const G3: usize = 0;
const E3: usize = 1;
const R3: usize = 2;

fn push_thermal_jumps(
    p: &PhysParams,
    space: &HilbertSpace,
    annihilate: &CsMat,
    jumps: &mut Vec<(String, QOperator)>,
) -> Result<()> {
    if p.gamma_m > 0.0 {
        let down_rate = p.gamma_m * (p.n_th + 1.0);
        let up_rate = p.gamma_m * p.n_th;
        let b = embed(annihilate, "fock", space)?;
        jumps.push(("thermal_down".into(), b.scale(c(down_rate.sqrt(), 0.0))));
        if up_rate > 0.0 {
            let bdag = embed(&annihilate.dagger(), "fock", space)?;
            jumps.push(("thermal_up".into(), bdag.scale(c(up_rate.sqrt(), 0.0))));
        }
    }
    Ok(())
}

/// Full three-level ion ⊗ Fock model (Lamb-Dicke expanded sidebands).
pub fn build_three_level(p: &PhysParams) -> Result<LindbladModel> {
    if p.n_ions != 1 {
        return Err(CoolError::unsupported(format!(
            "three-level model is single-ion, got N = {}",
            p.n_ions
        )));
    }
    p.validate_rates()?;
    let nf = p.fock_dim();
    let space = HilbertSpace::new(vec![("ion".into(), 3), ("fock".into(), nf)])?;
    let (a, _, num) = boson_ops(nf)?;
    let x = a.matrix.add(&a.matrix.dagger());

    let mut h = CsMat::zeros(3);
    h = h.add(&sigma3(G3, G3).scale(c(p.delta_g, 0.0)));
    h = h.add(&sigma3(E3, E3).scale(c(p.delta_e, 0.0)));
    h = h.add(&sigma3(R3, G3).add(&sigma3(G3, R3)).scale(c(0.5 * p.omega_g, 0.0)));
    h = h.add(&sigma3(R3, E3).add(&sigma3(E3, R3)).scale(c(0.5 * p.omega_e, 0.0)));
    let mut ham = embed(&h, "ion", &space)?.matrix;

    // sidebands: (Ω_l η_lz / 2)(iσ_rl − iσ_lr)(b + b†)
    for (lab, omega, eta) in [(G3, p.omega_g, p.eta_gz()), (E3, p.omega_e, p.eta_ez())] {
        if eta != 0.0 {
            let s = sigma3(R3, lab).scale(c(0.0, 1.0)).add(&sigma3(lab, R3).scale(c(0.0, -1.0)));
            let term = s.kron(&x).scale(c(0.5 * omega * eta, 0.0));
            ham = ham.add(&term);
        }
    }
    if p.g_odf != 0.0 {
        let sz_ge = sigma3(E3, E3).add(&sigma3(G3, G3).scale(c(-1.0, 0.0)));
        ham = ham.add(&sz_ge.kron(&x).scale(c(p.g_odf, 0.0)));
    }
    ham = ham.add(&embed(&num.matrix, "fock", &space)?.matrix.scale(c(p.omega_m, 0.0)));

    let mut jumps = Vec::new();
    if p.gamma_g > 0.0 {
        jumps.push((
            "decay_g".into(),
            embed(&sigma3(G3, R3), "ion", &space)?.scale(c(p.gamma_g.sqrt(), 0.0)),
        ));
    }
    if p.gamma_e > 0.0 {
        jumps.push((
            "decay_e".into(),
            embed(&sigma3(E3, R3), "ion", &space)?.scale(c(p.gamma_e.sqrt(), 0.0)),
        ));
    }
    push_thermal_jumps(p, &space, &a.matrix, &mut jumps)?;

    Ok(LindbladModel {
        hamiltonian: QOperator::new_hermitian(space.clone(), ham)?,
        space,
        jumps,
        basis_doc: "ion factor ordered (g, e, r); fock factor |0⟩..|cutoff⟩".into(),
        kind: ModelKind::ThreeLevel,
        params: p.clone(),
    })
}

/// Internal three-level dynamics only (no phonon factor); used for the
/// steady-state scattering profile.
pub fn build_three_level_internal(p: &PhysParams) -> Result<LindbladModel> {
    p.validate_rates()?;
    let space = HilbertSpace::new(vec![("ion".into(), 3)])?;
    let mut h = CsMat::zeros(3);
    h = h.add(&sigma3(G3, G3).scale(c(p.delta_g, 0.0)));
    h = h.add(&sigma3(E3, E3).scale(c(p.delta_e, 0.0)));
    h = h.add(&sigma3(R3, G3).add(&sigma3(G3, R3)).scale(c(0.5 * p.omega_g, 0.0)));
    h = h.add(&sigma3(R3, E3).add(&sigma3(E3, R3)).scale(c(0.5 * p.omega_e, 0.0)));
    let mut jumps = Vec::new();
    if p.gamma_g > 0.0 {
        jumps.push((
            "decay_g".into(),
            QOperator::new(space.clone(), sigma3(G3, R3).scale(c(p.gamma_g.sqrt(), 0.0)))?,
        ));
    }
    if p.gamma_e > 0.0 {
        jumps.push((
            "decay_e".into(),
            QOperator::new(space.clone(), sigma3(E3, R3).scale(c(p.gamma_e.sqrt(), 0.0)))?,
        ));
    }
    Ok(LindbladModel {
        hamiltonian: QOperator::new_hermitian(space.clone(), h)?,
        space,
        jumps,
        basis_doc: "ion factor ordered (g, e, r), no motion".into(),
        kind: ModelKind::ThreeLevelInternal,
        params: p.clone(),
    })
}

/// Bare-basis effective jump amplitudes α_kl = √γ_k Ω_l / (2Δ_l − iγ).
fn alpha_kl(p: &PhysParams, gamma_k: f64, omega_l: f64, delta_l: f64) -> C64 {
    c(gamma_k.sqrt() * omega_l, 0.0) / c(2.0 * delta_l, -p.gamma())
}

/// Dressed-basis jump amplitudes α̃_kl = i√γ_k Ω_l / (γ + 2iΔ_R).
fn alpha_tilde(p: &PhysParams, gamma_k: f64, omega_l: f64) -> C64 {
    c(0.0, gamma_k.sqrt() * omega_l) / c(p.gamma(), 2.0 * p.delta_r())
}

/// Single-ion effective two-level model in the bare (e, g) or dressed
/// (+, −) basis.
pub fn build_effective_two_level(p: &PhysParams, basis: Basis) -> Result<LindbladModel> {
    if p.n_ions != 1 {
        return Err(CoolError::unsupported(format!(
            "effective two-level model is single-ion, got N = {}",
            p.n_ions
        )));
    }
    let dc = derive_couplings(p)?;
    let nf = p.fock_dim();
    let (a, _, num) = boson_ops(nf)?;
    let x = a.matrix.add(&a.matrix.dagger());

    match basis {
        Basis::Bare => {
            let sp = spin_ops("e", "g")?;
            let space = HilbertSpace::new(vec![("spin".into(), 2), ("fock".into(), nf)])?;
            let phi = dc.omega_r.arg();
            let zc = p.two_photon_detuning() + dc.omega_ls;
            let mut ham = embed(&sp.sz.matrix, "spin", &space)?.matrix.scale(c(0.5 * zc, 0.0));
            ham = ham.add(
                &embed(&sp.sx.matrix, "spin", &space)?
                    .matrix
                    .scale(c(0.5 * dc.omega_r.norm(), 0.0)),
            );
            let int = sp
                .sy
                .matrix
                .scale(c(dc.g_r, 0.0))
                .add(&sp.sz.matrix.scale(c(p.g_odf, 0.0)));
            ham = ham.add(&int.kron(&x));
            ham = ham.add(&embed(&num.matrix, "fock", &space)?.matrix.scale(c(p.omega_m, 0.0)));

            // zeroth-order effective jumps, Ω_R phase absorbed in the |e⟩ frame
            let gph = c(0.0, -phi).exp();
            let s_gg = sp.proj("g", "g")?.matrix.clone();
            let s_ge = sp.proj("g", "e")?.matrix.clone();
            let s_eg = sp.proj("e", "g")?.matrix.clone();
            let s_ee = sp.proj("e", "e")?.matrix.clone();
            let lg = s_gg
                .scale(alpha_kl(p, p.gamma_g, p.omega_g, p.delta_g))
                .add(&s_ge.scale(alpha_kl(p, p.gamma_g, p.omega_e, p.delta_e) * gph));
            let le = s_eg
                .scale(alpha_kl(p, p.gamma_e, p.omega_g, p.delta_g) * gph.conj())
                .add(&s_ee.scale(alpha_kl(p, p.gamma_e, p.omega_e, p.delta_e)));
            let mut jumps = vec![
                ("eff_g".into(), embed_jump(&lg, &space)?),
                ("eff_e".into(), embed_jump(&le, &space)?),
            ];
            push_thermal_jumps(p, &space, &a.matrix, &mut jumps)?;
            Ok(LindbladModel {
                hamiltonian: QOperator::new_hermitian(space.clone(), ham)?,
                space,
                jumps,
                basis_doc: "spin factor ordered (e, g), σ_z = σ_ee − σ_gg; fock |0⟩..|cutoff⟩"
                    .into(),
                kind: ModelKind::EffectiveBare,
                params: p.clone(),
            })
        }
        Basis::Dressed => {
            if !p.is_two_photon_resonant() {
                return Err(CoolError::unsupported(
                    "dressed basis requires two-photon resonance delta = 0",
                ));
            }
            let space = HilbertSpace::new(vec![("spin".into(), 2), ("fock".into(), nf)])?;
            let (hspin, (l1, l2)) = dressed_spin_parts(p, &dc)?;
            let mut hmat = hspin.kron(&CsMat::identity(nf));
            let int = dressed_interaction(p, &dc);
            hmat = hmat.add(&int.kron(&x));
            hmat = hmat.add(&embed(&num.matrix, "fock", &space)?.matrix.scale(c(p.omega_m, 0.0)));
            let mut jumps = vec![
                ("dressed_1".into(), embed_jump(&l1, &space)?),
                ("dressed_2".into(), embed_jump(&l2, &space)?),
            ];
            push_thermal_jumps(p, &space, &a.matrix, &mut jumps)?;
            Ok(LindbladModel {
                hamiltonian: QOperator::new_hermitian(space.clone(), hmat)?,
                space,
                jumps,
                basis_doc: "spin factor ordered (+, −) dressed states; fock |0⟩..|cutoff⟩".into(),
                kind: ModelKind::EffectiveDressed,
                params: p.clone(),
            })
        }
    }
}

fn embed_jump(spin_mat: &CsMat, space: &HilbertSpace) -> Result<QOperator> {
    embed(spin_mat, "spin", space)
}

/// Dressed spin Hamiltonian (ω_s/2)σ̃_z and the jump pair
/// L̃_1 = (α̃_gg|+⟩ + α̃_ge|−⟩)⟨+|, L̃_2 = (α̃_ee|+⟩ − α̃_eg|−⟩)⟨+|.
fn dressed_spin_parts(p: &PhysParams, dc: &DerivedCouplings) -> Result<(CsMat, (CsMat, CsMat))> {
    let sp = spin_ops("+", "-")?;
    let h = sp.sz.matrix.scale(c(0.5 * dc.omega_s, 0.0));
    let pp = sp.proj("+", "+")?.matrix.clone();
    let mp = sp.proj("-", "+")?.matrix.clone();
    let l1 = pp
        .scale(alpha_tilde(p, p.gamma_g, p.omega_g))
        .add(&mp.scale(alpha_tilde(p, p.gamma_g, p.omega_e)));
    let l2 = pp
        .scale(alpha_tilde(p, p.gamma_e, p.omega_e))
        .add(&mp.scale(-alpha_tilde(p, p.gamma_e, p.omega_g)));
    Ok((h, (l1, l2)))
}

/// [g_O(cos α σ̃_z + sin α σ̃_x) + g_R σ̃_y] on the dressed spin.
fn dressed_interaction(p: &PhysParams, dc: &DerivedCouplings) -> CsMat {
    let sp = spin_ops("+", "-").expect("labels distinct");
    sp.sz
        .matrix
        .scale(c(p.g_odf * dc.alpha.cos(), 0.0))
        .add(&sp.sx.matrix.scale(c(p.g_odf * dc.alpha.sin(), 0.0)))
        .add(&sp.sy.matrix.scale(c(dc.g_r, 0.0)))
}

/// N-ion model on the dressed product space, COM mode retained.
pub fn build_multi_ion(
    p: &PhysParams,
    modes: &ModeSpectrum,
    approx: Approx,
) -> Result<LindbladModel> {
    let n = p.n_ions;
    if n == 0 {
        return Err(CoolError::invalid("need at least one ion"));
    }
    if modes.n_ions() != n {
        return Err(CoolError::invalid(format!(
            "mode spectrum is for {} ions, parameters say {}",
            modes.n_ions(),
            n
        )));
    }
    let dc = derive_couplings(p)?;
    if !p.is_two_photon_resonant() {
        return Err(CoolError::unsupported(
            "multi-ion dressed models require two-photon resonance delta = 0",
        ));
    }
    if approx == Approx::TavisCummings {
        let rel = (dc.omega_s - p.omega_m).abs() / p.omega_m.max(1e-300);
        if rel > 1e-6 {
            return Err(CoolError::unsupported(format!(
                "Tavis-Cummings requires omega_s = omega_m (relative mismatch {rel:.2e})"
            )));
        }
        if p.g_odf != 0.0 {
            return Err(CoolError::unsupported("Tavis-Cummings requires g_O = 0"));
        }
    }

    let nf = p.fock_dim();
    let mut factors: Vec<(String, usize)> = (0..n).map(|j| (format!("ion{j}"), 2)).collect();
    factors.push(("fock".into(), nf));
    let space = HilbertSpace::new(factors)?;
    let (a, _, num) = boson_ops(nf)?;
    let x = a.matrix.add(&a.matrix.dagger());
    let sp = spin_ops("+", "-")?;

    let mut ham = embed(&num.matrix, "fock", &space)?.matrix.scale(c(p.omega_m, 0.0));
    let mut jumps: Vec<(String, QOperator)> = Vec::new();
    let (_, (l1, l2)) = dressed_spin_parts(p, &dc)?;
    for j in 0..n {
        let lab = format!("ion{j}");
        jumps.push((format!("dressed_1_{lab}"), embed(&l1, &lab, &space)?));
        jumps.push((format!("dressed_2_{lab}"), embed(&l2, &lab, &space)?));
    }

    match approx {
        Approx::FullDressed => {
            let x_full = embed(&x, "fock", &space)?.matrix;
            for j in 0..n {
                let lab = format!("ion{j}");
                ham = ham.add(
                    &embed(&sp.sz.matrix, &lab, &space)?.matrix.scale(c(0.5 * dc.omega_s, 0.0)),
                );
                // coupling g_R·K_{0,j}·√(ω_0/ω_0) through the COM mode
                let coupling = modes.profile(0, j)?;
                let int = dressed_interaction(p, &dc).scale(c(coupling, 0.0));
                let int_full = embed(&int, &lab, &space)?.matrix;
                ham = ham.add(&int_full.matmul(&x_full));
            }
        }
        Approx::TavisCummings => {
            // S̃_± = S̃_y ∓ iS̃_x; per ion S̃_+ = −i|+⟩⟨−|.
            let mut s_plus = CsMat::zeros(space.total_dim());
            let mut s_z = CsMat::zeros(space.total_dim());
            let pm = sp.proj("+", "-")?.matrix.clone();
            for j in 0..n {
                let lab = format!("ion{j}");
                s_plus = s_plus.add(&embed(&pm, &lab, &space)?.matrix.scale(c(0.0, -1.0)));
                s_z = s_z.add(&embed(&sp.sz.matrix, &lab, &space)?.matrix.scale(c(0.5, 0.0)));
            }
            let b_full = embed(&a.matrix, "fock", &space)?.matrix;
            let sp_b = s_plus.matmul(&b_full);
            let coupling = c(dc.g_r / (n as f64).sqrt(), 0.0);
            ham = ham.add(&sp_b.scale(coupling));
            ham = ham.add(&sp_b.dagger().scale(coupling.conj()));
            // ω_m(b†b + S̃_z); b†b is already in ham
            ham = ham.add(&s_z.scale(c(p.omega_m, 0.0)));
        }
    }
    push_thermal_jumps(p, &space, &a.matrix, &mut jumps)?;

    Ok(LindbladModel {
        hamiltonian: QOperator::new_hermitian(space.clone(), ham)?,
        space,
        jumps,
        basis_doc: format!(
            "{n} ion factors ordered (+, −) dressed states, then fock |0⟩..|cutoff⟩; COM mode only"
        ),
        kind: if approx == Approx::TavisCummings {
            ModelKind::TavisCummings
        } else {
            ModelKind::MultiIonDressed
        },
        params: p.clone(),
    })
}

/// Gauss-Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 1 {
        return Err(CoolError::invalid("quadrature order must be positive"));
    }
    let mut out = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        out.push((-z, w));
        if n - 1 - i != i {
            out.push((z, w));
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(out)
}

/// Dipole emission pattern along z for circular polarization;
/// ∫₋₁¹ W(µ) dµ = 1.
pub fn dipole_weight(mu: f64) -> f64 {
    0.375 * (1.0 + mu * mu)
}

/// exp(−iθ(b + b†)) on a truncated Fock space, via the eigendecomposition
/// of the (real symmetric tridiagonal) quadrature operator.
fn phase_operator(theta: f64, nf: usize) -> Result<CsMat> {
    use faer::{Mat, Side};
    let (a, _, _) = boson_ops(nf)?;
    let x = a.matrix.add(&a.matrix.dagger());
    let mut m = Mat::<f64>::zeros(nf, nf);
    for (i, j, v) in x.iter() {
        m[(i, j)] = v.re;
    }
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| CoolError::SolverFailure {
        msg: format!("quadrature eigendecomposition failed: {e:?}"),
        residual: f64::NAN,
    })?;
    let mut dense = Array2::<C64>::zeros((nf, nf));
    for i in 0..nf {
        for j in 0..nf {
            let mut acc = c(0.0, 0.0);
            for k in 0..nf {
                let lam = evd.S()[k];
                let ph = c(0.0, -theta * lam).exp();
                acc += c(evd.U()[(i, k)], 0.0) * ph * c(evd.U()[(j, k)], 0.0);
            }
            dense[(i, j)] = acc;
        }
    }
    Ok(CsMat::from_dense(&dense, 1e-14))
}

/// Spontaneous-emission recoil model: the angular integral over emission
/// directions is discretized by Gauss-Legendre quadrature, one independent
/// jump operator per node scaled by √(w_i W(µ_i)).
pub fn build_recoil_model(
    p: &PhysParams,
    scheme: LevelScheme,
    quad_nodes: usize,
) -> Result<LindbladModel> {
    if quad_nodes < 4 || quad_nodes % 2 != 0 {
        return Err(CoolError::invalid(format!(
            "quad_nodes must be even and >= 4, got {quad_nodes}"
        )));
    }
    if p.k_ratio_g <= 0.0 || p.k_ratio_e <= 0.0 {
        return Err(CoolError::invalid("k ratios must be positive"));
    }
    if p.n_ions != 1 {
        return Err(CoolError::unsupported("recoil models are single-ion"));
    }
    let nodes = gauss_legendre(quad_nodes)?;
    let nf = p.fock_dim();
    let (a, _, _) = boson_ops(nf)?;

    match scheme {
        LevelScheme::ThreeLevel => {
            let base = build_three_level(p)?;
            let mut jumps: Vec<(String, QOperator)> = base
                .jumps
                .iter()
                .filter(|(lab, _)| lab.starts_with("thermal"))
                .cloned()
                .collect();
            for (lab, idx, gamma_l, k_ratio) in [
                ("g", G3, p.gamma_g, p.k_ratio_g),
                ("e", E3, p.gamma_e, p.k_ratio_e),
            ] {
                if gamma_l == 0.0 {
                    continue;
                }
                for (q, &(mu, w)) in nodes.iter().enumerate() {
                    let theta = mu * k_ratio * p.eta_z;
                    let phase = phase_operator(theta, nf)?;
                    let op = sigma3(idx, R3).kron(&phase);
                    let scale = (gamma_l * w * dipole_weight(mu)).sqrt();
                    jumps.push((
                        format!("recoil_{lab}_{q}"),
                        QOperator::new(base.space.clone(), op.scale(c(scale, 0.0)))?,
                    ));
                }
            }
            Ok(LindbladModel {
                space: base.space.clone(),
                hamiltonian: base.hamiltonian.clone(),
                jumps,
                basis_doc: format!("{}; recoil quadrature {quad_nodes} nodes", base.basis_doc),
                kind: ModelKind::RecoilThreeLevel,
                params: p.clone(),
            })
        }
        LevelScheme::Effective => {
            let base = build_effective_two_level(p, Basis::Bare)?;
            let dc = derive_couplings(p)?;
            let phi = dc.omega_r.arg();
            let gph = c(0.0, -phi).exp();
            let sp = spin_ops("e", "g")?;
            let x = a.matrix.add(&a.matrix.dagger());
            let id = CsMat::identity(nf);
            let lin = |eta: f64| id.add(&x.scale(c(0.0, eta)));

            let mut jumps: Vec<(String, QOperator)> = base
                .jumps
                .iter()
                .filter(|(lab, _)| lab.starts_with("thermal"))
                .cloned()
                .collect();
            for (lab, k_ratio) in [("g", p.k_ratio_g), ("e", p.k_ratio_e)] {
                for (q, &(mu, w)) in nodes.iter().enumerate() {
                    let kick = mu * k_ratio * p.eta_z;
                    let (part1, amp1, part2, amp2, gamma_l) = if lab == "g" {
                        (
                            sp.proj("g", "g")?.matrix.clone(),
                            alpha_kl(p, p.gamma_g, p.omega_g, p.delta_g),
                            sp.proj("g", "e")?.matrix.clone(),
                            alpha_kl(p, p.gamma_g, p.omega_e, p.delta_e) * gph,
                            p.gamma_g,
                        )
                    } else {
                        (
                            sp.proj("e", "g")?.matrix.clone(),
                            alpha_kl(p, p.gamma_e, p.omega_g, p.delta_g) * gph.conj(),
                            sp.proj("e", "e")?.matrix.clone(),
                            alpha_kl(p, p.gamma_e, p.omega_e, p.delta_e),
                            p.gamma_e,
                        )
                    };
                    if gamma_l == 0.0 {
                        continue;
                    }
                    let op = part1
                        .kron(&lin(p.eta_gz() - kick))
                        .scale(amp1)
                        .add(&part2.kron(&lin(p.eta_ez() - kick)).scale(amp2));
                    let scale = (w * dipole_weight(mu)).sqrt();
                    jumps.push((
                        format!("recoil_{lab}_{q}"),
                        QOperator::new(base.space.clone(), op.scale(c(scale, 0.0)))?,
                    ));
                }
            }
            Ok(LindbladModel {
                space: base.space.clone(),
                hamiltonian: base.hamiltonian.clone(),
                jumps,
                basis_doc: format!("{}; recoil quadrature {quad_nodes} nodes", base.basis_doc),
                kind: ModelKind::RecoilEffective,
                params: p.clone(),
            })
        }
    }
}

/// Geometric thermal density matrix truncated to `dim` states and
/// renormalized; returns the truncated weight alongside.
pub fn thermal_density(n_th: f64, dim: usize) -> (Array2<C64>, f64) {
    let mut rho = Array2::<C64>::zeros((dim, dim));
    if n_th <= 0.0 {
        rho[(0, 0)] = c(1.0, 0.0);
        return (rho, 0.0);
    }
    let q = n_th / (n_th + 1.0);
    let mut w: Vec<f64> = (0..dim).map(|k| q.powi(k as i32) / (n_th + 1.0)).collect();
    let total: f64 = w.iter().sum();
    let truncated = 1.0 - total;
    for x in w.iter_mut() {
        *x /= total;
    }
    for (k, x) in w.iter().enumerate() {
        rho[(k, k)] = c(*x, 0.0);
    }
    (rho, truncated)
}

/// Warn threshold for thermal truncation loss.
pub const THERMAL_TRUNCATION_WARN: f64 = 1e-4;

/// Pure Fock state |n⟩⟨n|.
pub fn fock_density(n: usize, dim: usize) -> Result<Array2<C64>> {
    if n >= dim {
        return Err(CoolError::invalid(format!("fock index {n} >= dim {dim}")));
    }
    let mut rho = Array2::<C64>::zeros((dim, dim));
    rho[(n, n)] = c(1.0, 0.0);
    Ok(rho)
}

/// |ψ⟩⟨ψ| from an amplitude vector (normalized internally).
pub fn pure_density(amps: &[C64]) -> Array2<C64> {
    let n = amps.len();
    let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let mut rho = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            rho[(i, j)] = amps[i] * amps[j].conj() / norm_sq;
        }
    }
    rho
}

/// Kronecker product of density matrices, first factor slowest.
pub fn kron_density(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = Array2::zeros((na * nb, na * nb));
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Spin configuration for initial-state construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinInit {
    /// Every ion in the dark state.
    AllDark,
    /// Every ion in the bright state.
    AllBright,
}

impl LindbladModel {
    /// Amplitudes of the dark state in this model's spin basis.
    pub fn dark_spin_amps(&self) -> Vec<C64> {
        let p = &self.params;
        let os = (p.omega_g * p.omega_g + p.omega_e * p.omega_e).sqrt();
        match self.kind {
            ModelKind::ThreeLevel | ModelKind::ThreeLevelInternal | ModelKind::RecoilThreeLevel => {
                vec![c(p.omega_e / os, 0.0), c(-p.omega_g / os, 0.0), c(0.0, 0.0)]
            }
            ModelKind::EffectiveBare | ModelKind::RecoilEffective => {
                vec![c(-p.omega_g / os, 0.0), c(p.omega_e / os, 0.0)]
            }
            ModelKind::EffectiveDressed | ModelKind::MultiIonDressed | ModelKind::TavisCummings => {
                vec![c(0.0, 0.0), c(1.0, 0.0)]
            }
        }
    }

    /// Amplitudes of the bright state in this model's spin basis.
    pub fn bright_spin_amps(&self) -> Vec<C64> {
        let p = &self.params;
        let os = (p.omega_g * p.omega_g + p.omega_e * p.omega_e).sqrt();
        match self.kind {
            ModelKind::ThreeLevel | ModelKind::ThreeLevelInternal | ModelKind::RecoilThreeLevel => {
                vec![c(p.omega_g / os, 0.0), c(p.omega_e / os, 0.0), c(0.0, 0.0)]
            }
            ModelKind::EffectiveBare | ModelKind::RecoilEffective => {
                vec![c(p.omega_e / os, 0.0), c(p.omega_g / os, 0.0)]
            }
            ModelKind::EffectiveDressed | ModelKind::MultiIonDressed | ModelKind::TavisCummings => {
                vec![c(1.0, 0.0), c(0.0, 0.0)]
            }
        }
    }

    /// Product initial state: chosen spin configuration on every ion,
    /// given phonon density on the Fock factor.
    pub fn initial_state(&self, spin: SpinInit, phonon: &Array2<C64>) -> Result<Array2<C64>> {
        if self.kind == ModelKind::ThreeLevelInternal {
            return Err(CoolError::unsupported("internal model has no phonon factor"));
        }
        let amps = match spin {
            SpinInit::AllDark => self.dark_spin_amps(),
            SpinInit::AllBright => self.bright_spin_amps(),
        };
        let spin_rho = pure_density(&amps);
        let n_spin_factors = self.space.factors().len() - 1;
        let mut rho = spin_rho.clone();
        for _ in 1..n_spin_factors {
            rho = kron_density(&rho, &spin_rho);
        }
        let full = kron_density(&rho, phonon);
        if full.nrows() != self.total_dim() {
            return Err(CoolError::invalid("initial state dimension mismatch"));
        }
        Ok(full)
    }
}

/// Uniform mixture over the excitation-number manifold n̂_ex = n_ex of a
/// dressed-basis model: the state in which the collective rate theory's
/// equidistribution ansatz holds exactly.
pub fn manifold_mixed_state(model: &LindbladModel, n_ex: usize) -> Result<Array2<C64>> {
    match model.kind {
        ModelKind::EffectiveDressed | ModelKind::MultiIonDressed | ModelKind::TavisCummings => {}
        _ => {
            return Err(CoolError::unsupported(
                "excitation manifolds are defined for dressed-basis models",
            ))
        }
    }
    let space = &model.space;
    let dims: Vec<usize> = space.factors().iter().map(|(_, d)| *d).collect();
    let n_factors = dims.len();
    let total = space.total_dim();
    let mut members = Vec::new();
    for flat in 0..total {
        let mut rest = flat;
        let mut bright = 0usize;
        let mut phonon = 0usize;
        for (k, d) in dims.iter().enumerate().rev() {
            let idx = rest % d;
            rest /= d;
            if k == n_factors - 1 {
                phonon = idx;
            } else if idx == 0 {
                bright += 1; // |+⟩ is the first basis state of each ion
            }
        }
        if bright + phonon == n_ex {
            members.push(flat);
        }
    }
    if members.is_empty() {
        return Err(CoolError::invalid(format!(
            "no basis states with n_ex = {n_ex} inside the truncation"
        )));
    }
    let w = 1.0 / members.len() as f64;
    let mut rho = Array2::<C64>::zeros((total, total));
    for k in members {
        rho[(k, k)] = c(w, 0.0);
    }
    Ok(rho)
}

/// Builtin observables resolved against a model's basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinObs {
    MeanPhonon,
    RhoRR,
    SpinZ,
    ExcitationNumber,
    GroundStatePop,
}

impl BuiltinObs {
    pub fn label(&self) -> &'static str {
        match self {
            BuiltinObs::MeanPhonon => "mean_phonon",
            BuiltinObs::RhoRR => "rho_rr",
            BuiltinObs::SpinZ => "spin_z",
            BuiltinObs::ExcitationNumber => "excitation_number",
            BuiltinObs::GroundStatePop => "ground_state_pop",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "mean_phonon" => Ok(BuiltinObs::MeanPhonon),
            "rho_rr" => Ok(BuiltinObs::RhoRR),
            "spin_z" => Ok(BuiltinObs::SpinZ),
            "excitation_number" => Ok(BuiltinObs::ExcitationNumber),
            "ground_state_pop" => Ok(BuiltinObs::GroundStatePop),
            other => Err(CoolError::invalid(format!("unknown observable `{other}`"))),
        }
    }
}

impl LindbladModel {
    /// Build the operator for a builtin observable in this model's basis.
    pub fn observable(&self, obs: BuiltinObs) -> Result<QOperator> {
        let space = &self.space;
        match obs {
            BuiltinObs::MeanPhonon => {
                let nf = space.factor_dim("fock")?;
                let (_, _, num) = boson_ops(nf)?;
                embed(&num.matrix, "fock", space)
            }
            BuiltinObs::RhoRR => match self.kind {
                ModelKind::ThreeLevel
                | ModelKind::ThreeLevelInternal
                | ModelKind::RecoilThreeLevel => embed(&sigma3(R3, R3), "ion", space),
                _ => Err(CoolError::invalid("rho_rr requires a three-level model")),
            },
            BuiltinObs::SpinZ => match self.kind {
                ModelKind::ThreeLevel
                | ModelKind::ThreeLevelInternal
                | ModelKind::RecoilThreeLevel => {
                    let sz = sigma3(E3, E3).add(&sigma3(G3, G3).scale(c(-1.0, 0.0)));
                    embed(&sz, "ion", space)
                }
                ModelKind::EffectiveBare
                | ModelKind::EffectiveDressed
                | ModelKind::RecoilEffective => {
                    let sp = spin_ops("a", "b")?;
                    embed(&sp.sz.matrix, "spin", space)
                }
                ModelKind::MultiIonDressed | ModelKind::TavisCummings => {
                    let sp = spin_ops("a", "b")?;
                    let mut acc = CsMat::zeros(space.total_dim());
                    for j in 0..self.params.n_ions {
                        acc = acc.add(&embed(&sp.sz.matrix, &format!("ion{j}"), space)?.matrix);
                    }
                    QOperator::new(space.clone(), acc)
                }
            },
            BuiltinObs::ExcitationNumber => match self.kind {
                ModelKind::EffectiveDressed => {
                    let nf = space.factor_dim("fock")?;
                    let (_, _, num) = boson_ops(nf)?;
                    let sp = spin_ops("+", "-")?;
                    let nop = embed(&num.matrix, "fock", space)?.matrix;
                    let bright = embed(&sp.proj("+", "+")?.matrix, "spin", space)?.matrix;
                    QOperator::new(space.clone(), nop.add(&bright))
                }
                ModelKind::MultiIonDressed | ModelKind::TavisCummings => {
                    let nf = space.factor_dim("fock")?;
                    let (_, _, num) = boson_ops(nf)?;
                    let sp = spin_ops("+", "-")?;
                    let mut acc = embed(&num.matrix, "fock", space)?.matrix;
                    for j in 0..self.params.n_ions {
                        acc = acc.add(
                            &embed(&sp.proj("+", "+")?.matrix, &format!("ion{j}"), space)?.matrix,
                        );
                    }
                    QOperator::new(space.clone(), acc)
                }
                _ => Err(CoolError::invalid(
                    "excitation_number requires a dressed-basis model",
                )),
            },
            BuiltinObs::GroundStatePop => {
                let amps = self.dark_spin_amps();
                let spin_rho = pure_density(&amps);
                let spin_proj = CsMat::from_dense(&spin_rho, 0.0);
                let nf = space.factor_dim("fock")?;
                let vac = CsMat::from_triplets(nf, &[(0, 0, c(1.0, 0.0))]);
                let n_spin = space.factors().len() - 1;
                let mut acc = CsMat::identity(1);
                for _ in 0..n_spin {
                    acc = acc.kron(&spin_proj);
                }
                acc = acc.kron(&vac);
                QOperator::new(space.clone(), acc)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::trace_sparse_dense;

    fn fig4_params() -> PhysParams {
        PhysParams::default()
    }

    fn fig6_params() -> PhysParams {
        PhysParams {
            omega_g: TWO_PI * 35.0,
            omega_e: TWO_PI * 35.0,
            delta_g: TWO_PI * 385.0,
            delta_e: TWO_PI * 385.0,
            eta_z: 0.13,
            ..PhysParams::default()
        }
    }

    #[test]
    fn couplings_fig4_numbers() {
        // ω_s ≈ ω_m = 2π×1.59 MHz at Δ_R = 2π×503.1 MHz; γ_b = 2π×56.9 kHz
        let dc = derive_couplings(&fig4_params()).unwrap();
        assert!((dc.omega_s / TWO_PI - 1.5896).abs() < 2e-4, "omega_s = {}", dc.omega_s / TWO_PI);
        assert!((dc.gamma_b / TWO_PI - 0.0569).abs() < 2e-4, "gamma_b = {}", dc.gamma_b / TWO_PI);
        // equal Rabi → α = π/2 exactly
        assert!((dc.alpha - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // Q_s = Δ_R/γ at δ=0
        let p = fig4_params();
        assert!((dc.q_s - p.delta_r() / p.gamma()).abs() / dc.q_s < 1e-9);
        assert!((dc.n_ba - (p.gamma() / (4.0 * p.delta_r())).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn couplings_fig6_numbers() {
        // g_R/γ_b ≈ 1.39 and γ_{1,sc} = 2π×18.6 kHz
        let dc = derive_couplings(&fig6_params()).unwrap();
        assert!((dc.g_r / dc.gamma_b - 1.390).abs() < 5e-3, "g_R/gamma_b = {}", dc.g_r / dc.gamma_b);
        assert!(
            (dc.gamma_1sc / TWO_PI - 0.018586).abs() < 1e-5,
            "gamma_1sc = {}",
            dc.gamma_1sc / TWO_PI
        );
    }

    #[test]
    fn couplings_reject_both_deltas_zero() {
        let p = PhysParams { delta_g: 0.0, delta_e: 0.0, ..PhysParams::default() };
        assert!(derive_couplings(&p).is_err());
    }

    #[test]
    fn dressed_jumps_norm_is_gamma_b() {
        // Σ_{k,l} |α̃_kl|² = γ_b
        let p = PhysParams { omega_g: TWO_PI * 25.0, ..PhysParams::default() };
        let dc = derive_couplings(&p).unwrap();
        let sum: f64 = [
            alpha_tilde(&p, p.gamma_g, p.omega_g),
            alpha_tilde(&p, p.gamma_g, p.omega_e),
            alpha_tilde(&p, p.gamma_e, p.omega_e),
            alpha_tilde(&p, p.gamma_e, p.omega_g),
        ]
        .iter()
        .map(|a| a.norm_sqr())
        .sum();
        assert!((sum - dc.gamma_b).abs() / dc.gamma_b < 1e-12);
    }

    #[test]
    fn dressed_jumps_annihilate_dark_state() {
        let p = fig4_params();
        let dc = derive_couplings(&p).unwrap();
        let (_, (l1, l2)) = dressed_spin_parts(&p, &dc).unwrap();
        // |−⟩ is the second basis vector
        for l in [&l1, &l2] {
            assert!(l.get(0, 1).norm() < 1e-15);
            assert!(l.get(1, 1).norm() < 1e-15);
        }
    }

    #[test]
    fn dark_state_dissipator_stationary() {
        // dissipator contributions on |−⟩⟨−| ⊗ |0⟩⟨0| vanish at δ = 0
        let p = PhysParams { cutoff: 5, ..fig4_params() };
        let model = build_effective_two_level(&p, Basis::Dressed).unwrap();
        let liouv = model.to_liouvillian().unwrap();
        let (vac, _) = thermal_density(0.0, p.fock_dim());
        let rho = model.initial_state(SpinInit::AllDark, &vac).unwrap();
        let d = liouv.apply_dissipator(&rho);
        let max = d.iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(max < 1e-12, "dissipator leak {max}");
    }

    #[test]
    fn bare_effective_jumps_annihilate_dark_state() {
        let p = PhysParams { cutoff: 3, ..fig4_params() };
        let model = build_effective_two_level(&p, Basis::Bare).unwrap();
        let dark = model.dark_spin_amps();
        for (lab, j) in &model.jumps {
            if lab.starts_with("thermal") {
                continue;
            }
            // apply the spin part to |dark⟩ ⊗ |0⟩
            let dim = model.total_dim();
            let nf = p.fock_dim();
            let mut v = vec![c(0.0, 0.0); dim];
            for (s, amp) in dark.iter().enumerate() {
                v[s * nf] = *amp;
            }
            let mut out = vec![c(0.0, 0.0); dim];
            for (i, jj, val) in j.matrix.iter() {
                out[i] += val * v[jj];
            }
            let max = out.iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(max < 1e-12, "jump {lab} does not annihilate the dark state: {max}");
        }
    }

    #[test]
    fn consistency_chain_omega_s() {
        // derive_couplings ω_s equals the spin gap of the dressed model
        let p = PhysParams { cutoff: 3, ..fig4_params() };
        let dc = derive_couplings(&p).unwrap();
        let model = build_effective_two_level(&p, Basis::Dressed).unwrap();
        let h = &model.hamiltonian.matrix;
        let nf = p.fock_dim();
        let gap = h.get(0, 0).re - h.get(nf, nf).re;
        assert!((gap - dc.omega_s).abs() / dc.omega_s < 1e-10);
    }

    #[test]
    fn three_level_decoupled_sectors() {
        // η = 0, g_O = 0, γ_m = 0: nothing in the model moves phonons
        let p = PhysParams { eta_z: 0.0, g_odf: 0.0, gamma_m: 0.0, cutoff: 4, ..fig4_params() };
        let model = build_three_level(&p).unwrap();
        let nop = model.observable(BuiltinObs::MeanPhonon).unwrap();
        let h = &model.hamiltonian.matrix;
        let comm = h.matmul(&nop.matrix).add(&nop.matrix.matmul(h).scale(c(-1.0, 0.0)));
        assert_eq!(comm.nnz(), 0);
        for (_, j) in &model.jumps {
            let cm = j.matrix.matmul(&nop.matrix).add(&nop.matrix.matmul(&j.matrix).scale(c(-1.0, 0.0)));
            assert_eq!(cm.nnz(), 0, "jump moves phonons");
        }
    }

    #[test]
    fn tavis_cummings_conserves_excitation() {
        let p = PhysParams {
            eta_z: 0.13,
            omega_g: TWO_PI * 35.0,
            omega_e: TWO_PI * 35.0,
            delta_g: TWO_PI * 385.0,
            delta_e: TWO_PI * 385.0,
            n_ions: 3,
            cutoff: 4,
            ..PhysParams::default()
        };
        let dc = derive_couplings(&p).unwrap();
        let p = PhysParams { omega_m: dc.omega_s, ..p };
        let modes =
            crate::modes::synth_modes(crate::modes::SynthKind::ComOnly, 3, p.omega_m).unwrap();
        let model = build_multi_ion(&p, &modes, Approx::TavisCummings).unwrap();
        let nex = model.observable(BuiltinObs::ExcitationNumber).unwrap();
        let h = &model.hamiltonian.matrix;
        let comm = h.matmul(&nex.matrix).add(&nex.matrix.matmul(h).scale(c(-1.0, 0.0)));
        let max = comm.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max);
        assert!(max < 1e-10 * TWO_PI, "commutator {max}");
    }

    #[test]
    fn tavis_cummings_requires_resonance() {
        let p = PhysParams {
            n_ions: 2,
            cutoff: 3,
            omega_g: TWO_PI * 35.0,
            omega_e: TWO_PI * 35.0,
            delta_g: TWO_PI * 385.0,
            delta_e: TWO_PI * 385.0,
            omega_m: TWO_PI * 1.0,
            ..PhysParams::default()
        };
        let modes =
            crate::modes::synth_modes(crate::modes::SynthKind::ComOnly, 2, p.omega_m).unwrap();
        assert!(matches!(
            build_multi_ion(&p, &modes, Approx::TavisCummings),
            Err(CoolError::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn multi_ion_checks_mode_count() {
        let p = PhysParams { n_ions: 2, cutoff: 3, ..PhysParams::default() };
        let modes =
            crate::modes::synth_modes(crate::modes::SynthKind::ComOnly, 3, p.omega_m).unwrap();
        assert!(build_multi_ion(&p, &modes, Approx::FullDressed).is_err());
    }

    #[test]
    fn quadrature_normalization() {
        // ∫ W(µ) dµ = 1 is exact for any even order ≥ 4; ⟨µ²W⟩ = 2/5
        for n in [4, 8, 16] {
            let nodes = gauss_legendre(n).unwrap();
            let total: f64 = nodes.iter().map(|&(mu, w)| w * dipole_weight(mu)).sum();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}: sum wW = {total}");
            let second: f64 = nodes.iter().map(|&(mu, w)| w * mu * mu * dipole_weight(mu)).sum();
            assert!((second - 0.4).abs() < 1e-12, "mu2 moment = {second}");
        }
    }

    #[test]
    fn recoil_zero_kick_matches_plain_model() {
        // k_ratio → 0: recoil jumps collapse onto the bare decay channels
        let p = PhysParams {
            cutoff: 4,
            k_ratio_g: 1e-12,
            k_ratio_e: 1e-12,
            gamma_m: 0.0,
            ..fig4_params()
        };
        let plain = build_three_level(&p).unwrap().to_liouvillian().unwrap();
        let recoil =
            build_recoil_model(&p, LevelScheme::ThreeLevel, 8).unwrap().to_liouvillian().unwrap();
        let (th, _) = thermal_density(1.0, p.fock_dim());
        let model = build_three_level(&p).unwrap();
        let rho = model.initial_state(SpinInit::AllBright, &th).unwrap();
        let d1 = plain.apply(&rho).unwrap();
        let d2 = recoil.apply(&rho).unwrap();
        let max = d1.iter().zip(d2.iter()).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        assert!(max < 1e-10, "recoil limit deviation {max}");
    }

    #[test]
    fn recoil_rejects_odd_nodes() {
        let p = fig4_params();
        assert!(build_recoil_model(&p, LevelScheme::ThreeLevel, 7).is_err());
        assert!(build_recoil_model(&p, LevelScheme::ThreeLevel, 2).is_err());
    }

    #[test]
    fn thermal_truncation_weight() {
        let (rho, trunc) = thermal_density(4.6, 31);
        let tr: f64 = (0..31).map(|i| rho[(i, i)].re).sum();
        assert!((tr - 1.0).abs() < 1e-12);
        // n_th = 4.6, 31 states kept: lost weight is (4.6/5.6)^31
        let expect = (4.6f64 / 5.6).powi(31);
        assert!((trunc - expect).abs() < 1e-10);
        assert!(trunc > THERMAL_TRUNCATION_WARN, "warning applies at paper parameters");
    }

    #[test]
    fn mean_phonon_of_thermal_state() {
        let (rho, _) = thermal_density(0.5, 60);
        let (_, _, num) = boson_ops(60).unwrap();
        let n = trace_sparse_dense(&num.matrix, &rho).re;
        assert!((n - 0.5).abs() < 1e-9);
    }

    #[test]
    fn warnings_fire() {
        let p = PhysParams { delta_g: TWO_PI * 10.0, delta_e: TWO_PI * 10.0, ..fig4_params() };
        assert!(!p.warnings().is_empty());
        let p = PhysParams { eta_z: 0.6, n_th: 4.6, ..fig4_params() };
        assert!(!p.warnings().is_empty());
        assert!(fig4_params().warnings().is_empty());
    }
}
