//! Strong-coupling collective rate theory: excitation-manifold state
//! counting, the collective decay ladder, second-order pump corrections,
//! the classical population ODE, observable vectors, closed-form steady
//! states, and the combined weak/strong summary formulas.

use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::error::{CoolError, Result};
use crate::models::{derive_couplings, PhysParams};
use crate::modes::ModeSpectrum;

/// Number of eigenstates with a given excitation number:
/// Σ_{m=0}^{min(n_ex,N)} C(N, m), exact.
pub fn state_count(n_ions: usize, n_ex: usize) -> Result<u128> {
    let top = n_ex.min(n_ions);
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(N, 0)
    for m in 0..=top {
        if m > 0 {
            // C(N, m) = C(N, m−1)·(N−m+1)/m, exact at every step
            binom = binom
                .checked_mul((n_ions - m + 1) as u128)
                .ok_or_else(|| CoolError::RangeError("binomial overflows u128".into()))?
                / m as u128;
        }
        total = total
            .checked_add(binom)
            .ok_or_else(|| CoolError::RangeError("state count overflows u128".into()))?;
    }
    Ok(total)
}

/// State-averaged bright-ion number
/// N̄₊(n_ex, N) = Σ m·C(N,m) / Σ C(N,m), the sums over m ≤ min(n_ex, N).
///
/// Exact integer arithmetic up to the u128 width (always sufficient for
/// N ≤ 64); a rescaled floating recursion covers larger crystals.
pub fn mean_bright(n_ions: usize, n_ex: usize) -> f64 {
    let top = n_ex.min(n_ions);
    if top == 0 {
        return 0.0;
    }
    // exact path
    let exact = || -> Option<f64> {
        let mut binom: u128 = 1;
        let mut den: u128 = 1;
        let mut num: u128 = 0;
        for m in 1..=top {
            binom = binom.checked_mul((n_ions - m + 1) as u128)? / m as u128;
            den = den.checked_add(binom)?;
            num = num.checked_add(binom.checked_mul(m as u128)?)?;
        }
        Some(num as f64 / den as f64)
    };
    if let Some(v) = exact() {
        return v;
    }
    // stable ratio recursion with rescaling
    let mut term = 1.0f64;
    let mut den = 1.0f64;
    let mut num = 0.0f64;
    for m in 1..=top {
        term *= (n_ions - m + 1) as f64 / m as f64;
        den += term;
        num += term * m as f64;
        if den > 1e280 {
            term /= 1e280;
            den /= 1e280;
            num /= 1e280;
        }
    }
    num / den
}

/// Collective decay rates γ_{N,sc}^{(n_ex)} = 2·N̄₊(n_ex, N)·γ_{1,sc}
/// for n_ex = 1..=n_max.
pub fn decay_ladder(p: &PhysParams, n_ions: usize, n_max: usize) -> Result<Vec<f64>> {
    if !p.is_two_photon_resonant() {
        return Err(CoolError::invalid("the decay ladder is derived at delta = 0"));
    }
    let dc = derive_couplings(p)?;
    Ok((1..=n_max).map(|n| 2.0 * mean_bright(n_ions, n) * dc.gamma_1sc).collect())
}

/// γ_{1,sc} in the far-detuned limit (γ² dropped against 4Δ_R²); the
/// closed equal-Rabi pump forms and the Table-1 entries are stated in
/// this limit.
pub fn gamma_1sc_far_detuned(p: &PhysParams) -> f64 {
    let dr = p.delta_r();
    0.5 * (p.omega_g * p.omega_g * p.gamma_e + p.omega_e * p.omega_e * p.gamma_g)
        / (4.0 * dr * dr)
}

/// Σ_{ν≠0} 4ω_ν²/(ω_m+ω_ν)² over the non-COM modes.
fn offcom_mode_sum(p: &PhysParams, modes: &ModeSpectrum) -> f64 {
    (1..modes.n_ions())
        .map(|nu| {
            let w = modes.omega(nu);
            4.0 * w * w / (p.omega_m + w).powi(2)
        })
        .sum()
}

/// Second-order pump rates (γ_{1,p}, γ_{2,p}) feeding n_ex = 1 and 2.
///
/// The COM mode must be present as ν = 0 with ω_0 = ω_m.
pub fn pump_rates(p: &PhysParams, modes: &ModeSpectrum) -> Result<(f64, f64)> {
    let rel = (modes.omega(0) - p.omega_m).abs() / p.omega_m.max(1e-300);
    if rel > 1e-6 {
        return Err(CoolError::invalid(format!(
            "mode spectrum must contain the COM mode at omega_m as nu = 0 (mismatch {rel:.2e})"
        )));
    }
    let og2 = p.omega_g * p.omega_g;
    let oe2 = p.omega_e * p.omega_e;
    let dr = p.delta_r();
    let pref = (p.omega_g * p.omega_e * p.eta_z / (4.0 * dr * (og2 + oe2))).powi(2);
    let nu_sum = offcom_mode_sum(p, modes);
    let g1 = pref
        * (nu_sum * (og2 * p.gamma_g + oe2 * p.gamma_e) + og2 * p.gamma_e + oe2 * p.gamma_g);
    let g2 = pref * (og2 * p.gamma_g + oe2 * p.gamma_e);

    // equal-Rabi closed form must reproduce the general display exactly
    if (p.omega_g - p.omega_e).abs() < 1e-12 * (og2 + oe2).sqrt() {
        let fd = gamma_1sc_far_detuned(p);
        let all_sum = nu_sum + 4.0 * p.omega_m * p.omega_m / (2.0 * p.omega_m).powi(2);
        let g1_closed = p.eta_z * p.eta_z / 8.0 * fd * all_sum;
        let g2_closed = p.eta_z * p.eta_z / 8.0 * fd;
        debug_assert!(
            g1 == 0.0 || (g1 - g1_closed).abs() < 1e-10 * g1,
            "equal-Rabi gamma_1p mismatch: {g1} vs {g1_closed}"
        );
        debug_assert!(
            g2 == 0.0 || (g2 - g2_closed).abs() < 1e-10 * g2,
            "equal-Rabi gamma_2p mismatch: {g2} vs {g2_closed}"
        );
    }
    Ok((g1, g2))
}

/// The classical population ladder dp/dt = M p.
#[derive(Debug, Clone)]
pub struct RateLadder {
    pub n_ions: usize,
    pub n_max: usize,
    /// γ_{N,sc}^{(n)} for n = 1..=n_max (index n−1).
    pub gamma_sc: Vec<f64>,
    pub gamma_1p: f64,
    pub gamma_2p: f64,
    /// (n_max+1)×(n_max+1) rate matrix, column-conservative.
    pub m: Vec<Vec<f64>>,
}

impl RateLadder {
    /// Assemble directly from rate values:
    /// M[0][0] = −γ₁ₚ−γ₂ₚ, M[1][0] = γ₁ₚ, M[2][0] = γ₂ₚ,
    /// M[n−1][n] = γ^{(n)}, M[n][n] = −γ^{(n)}.
    pub fn from_rates(
        n_ions: usize,
        gamma_sc: Vec<f64>,
        gamma_1p: f64,
        gamma_2p: f64,
    ) -> Result<Self> {
        let n_max = gamma_sc.len();
        if n_max < 2 {
            return Err(CoolError::invalid(
                "ladder needs n_max >= 2 for the pump structure",
            ));
        }
        if gamma_sc.iter().any(|&g| g < 0.0) || gamma_1p < 0.0 || gamma_2p < 0.0 {
            return Err(CoolError::invalid("ladder rates must be nonnegative"));
        }
        let dim = n_max + 1;
        let mut m = vec![vec![0.0f64; dim]; dim];
        m[0][0] = -(gamma_1p + gamma_2p);
        m[1][0] = gamma_1p;
        m[2][0] = gamma_2p;
        for n in 1..=n_max {
            let g = gamma_sc[n - 1];
            m[n - 1][n] += g;
            m[n][n] -= g;
        }
        Ok(RateLadder { n_ions, n_max, gamma_sc, gamma_1p, gamma_2p, m })
    }
}

/// Build the ladder from physical parameters and a mode spectrum.
pub fn build_ladder(
    p: &PhysParams,
    n_ions: usize,
    n_max: usize,
    modes: &ModeSpectrum,
) -> Result<RateLadder> {
    let gamma_sc = decay_ladder(p, n_ions, n_max.max(2))?;
    if n_max < 2 {
        return Err(CoolError::invalid(
            "ladder needs n_max >= 2 for the pump structure",
        ));
    }
    let (gamma_1p, gamma_2p) = pump_rates(p, modes)?;
    RateLadder::from_rates(n_ions, gamma_sc, gamma_1p, gamma_2p)
}

/// Default ladder truncation: covers the thermal × all-bright support.
pub fn default_n_max(n_th: f64, n_ions: usize) -> usize {
    ((4.0 * n_th).ceil() as usize + n_ions).max(10)
}

/// Dense matrix exponential by scaling-and-squaring with a (6,6) Padé
/// approximant.
fn expm(m: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = m[i][j] * t;
        }
    }
    let norm_inf = a
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm_inf > 0.5 { (norm_inf / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x *= scale;
        }
    }
    // Padé(6,6): N(A) = Σ c_k A^k, D(A) = Σ (−1)^k c_k A^k
    const COEF: [f64; 7] = [
        1.0,
        0.5,
        5.0 / 44.0,
        1.0 / 66.0,
        1.0 / 792.0,
        1.0 / 15840.0,
        1.0 / 665280.0,
    ];
    let matmul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let v = x[i][k];
                if v != 0.0 {
                    for j in 0..n {
                        out[i][j] += v * y[k][j];
                    }
                }
            }
        }
        out
    };
    let mut pow = vec![vec![0.0; n]; n];
    for (i, row) in pow.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut num = vec![vec![0.0; n]; n];
    let mut den = vec![vec![0.0; n]; n];
    for k in 0..=6 {
        if k > 0 {
            pow = matmul(&pow, &a);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..n {
            for j in 0..n {
                num[i][j] += COEF[k] * pow[i][j];
                den[i][j] += sign * COEF[k] * pow[i][j];
            }
        }
    }
    // solve D X = N
    let mut dm = Mat::<f64>::zeros(n, n);
    let mut nm = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            dm[(i, j)] = den[i][j];
            nm[(i, j)] = num[i][j];
        }
    }
    let lu = dm.partial_piv_lu();
    let x = lu.solve(&nm);
    let mut e = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            e[i][j] = x[(i, j)];
        }
    }
    for _ in 0..s {
        e = matmul(&e, &e);
    }
    e
}

/// Exact propagation of dp/dt = M p through the output grid.
pub fn ladder_trajectory(
    ladder: &RateLadder,
    p0: &[f64],
    t_grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let dim = ladder.n_max + 1;
    if p0.len() != dim {
        return Err(CoolError::invalid(format!(
            "initial distribution has {} entries, ladder needs {dim}",
            p0.len()
        )));
    }
    let total: f64 = p0.iter().sum();
    if (total - 1.0).abs() > 1e-10 || p0.iter().any(|&x| x < -1e-12) {
        return Err(CoolError::invalid("initial distribution must be normalized and nonneg"));
    }
    let mut out = Vec::with_capacity(t_grid.len());
    let mut state = p0.to_vec();
    let mut prev_t = 0.0;
    let mut cached: Option<(f64, Vec<Vec<f64>>)> = None;
    for &t in t_grid {
        if t < prev_t {
            return Err(CoolError::invalid("time grid must be nondecreasing"));
        }
        let dt = t - prev_t;
        if dt > 0.0 {
            let prop = match &cached {
                Some((cdt, p)) if (cdt - dt).abs() <= 1e-14 * dt.max(1.0) => p.clone(),
                _ => {
                    let p = expm(&ladder.m, dt);
                    cached = Some((dt, p.clone()));
                    p
                }
            };
            let mut next = vec![0.0; dim];
            for (i, row) in prop.iter().enumerate() {
                next[i] = row.iter().zip(&state).map(|(a, b)| a * b).sum();
            }
            state = next;
        }
        out.push(state.clone());
        prev_t = t;
    }
    Ok(out)
}

/// Normalized steady state of the ladder from the closed-form display:
/// p ∝ [γ⁽¹⁾γ⁽²⁾, (γ₁ₚ+γ₂ₚ)γ⁽²⁾, γ₂ₚγ⁽¹⁾, 0, ..].
pub fn ladder_steady_closed(ladder: &RateLadder) -> Vec<f64> {
    let g1 = ladder.gamma_sc[0];
    let g2 = ladder.gamma_sc[1];
    let (p1, p2) = (ladder.gamma_1p, ladder.gamma_2p);
    let den = (g1 + p1 + p2) * g2 + p2 * g1;
    let mut p = vec![0.0; ladder.n_max + 1];
    p[0] = g1 * g2 / den;
    p[1] = (p1 + p2) * g2 / den;
    p[2] = p2 * g1 / den;
    p
}

/// Steady state of dp/dt = M p with Σp = 1, via a direct solve with the
/// first row replaced by the normalization constraint.
pub fn ladder_steady_null(ladder: &RateLadder) -> Result<Vec<f64>> {
    let dim = ladder.n_max + 1;
    let mut a = Mat::<f64>::zeros(dim, dim);
    for j in 0..dim {
        a[(0, j)] = 1.0;
        for i in 1..dim {
            a[(i, j)] = ladder.m[i][j];
        }
    }
    let mut b = Mat::<f64>::zeros(dim, 1);
    b[(0, 0)] = 1.0;
    let lu = a.partial_piv_lu();
    let x = lu.solve(&b);
    let p: Vec<f64> = (0..dim).map(|i| x[(i, 0)]).collect();
    // verify M p = 0
    let mut worst = 0.0f64;
    for i in 0..dim {
        let r: f64 = (0..dim).map(|j| ladder.m[i][j] * p[j]).sum();
        worst = worst.max(r.abs());
    }
    let scale = ladder.gamma_sc.iter().cloned().fold(1e-300, f64::max);
    if worst > 1e-9 * scale {
        return Err(CoolError::SolverFailure {
            msg: "ladder steady state residual too large".into(),
            residual: worst,
        });
    }
    Ok(p)
}

/// Observable vectors ⟨Ô⟩ = O⃗·p⃗: the excitation number, the COM phonon
/// number, and the dressed-ground-state population.
#[derive(Debug, Clone)]
pub struct ObservableVectors {
    pub n_ex: Vec<f64>,
    pub n: Vec<f64>,
    pub p_gs: Vec<f64>,
}

pub fn observable_vectors(
    p: &PhysParams,
    n_ions: usize,
    n_max: usize,
    modes: &ModeSpectrum,
) -> Result<ObservableVectors> {
    let og2 = p.omega_g * p.omega_g;
    let oe2 = p.omega_e * p.omega_e;
    let os4 = (og2 + oe2) * (og2 + oe2);
    let e2 = p.eta_z * p.eta_z;
    // Σ_ν over all modes of η²Ω_e²Ω_g²ω_m²/[(Ω_e²+Ω_g²)²(ω_m+ω_ν)²]
    let s_all: f64 = (0..modes.n_ions())
        .map(|nu| {
            let w = modes.omega(nu);
            e2 * oe2 * og2 * p.omega_m * p.omega_m / (os4 * (p.omega_m + w).powi(2))
        })
        .sum();
    let mut n_ex = vec![0.0; n_max + 1];
    let mut n = vec![0.0; n_max + 1];
    let mut p_gs = vec![0.0; n_max + 1];
    n_ex[0] = s_all;
    n[0] = e2 * oe2 * og2 / (4.0 * os4);
    p_gs[0] = 1.0 - s_all;
    for j in 1..=n_max {
        n_ex[j] = j as f64;
        n[j] = j as f64 - mean_bright(n_ions, j);
    }
    Ok(ObservableVectors { n_ex, n, p_gs })
}

/// Closed-form steady-state observables of the pumped ladder.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormSteady {
    pub p_gs: f64,
    pub n_ex: f64,
    pub n: f64,
}

pub fn closed_form_steady(
    p: &PhysParams,
    n_ions: usize,
    modes: &ModeSpectrum,
) -> Result<ClosedFormSteady> {
    let gsc = decay_ladder(p, n_ions, 2)?;
    let (g1, g2) = (gsc[0], gsc[1]);
    let (p1, p2) = pump_rates(p, modes)?;
    let den = g1 * g2 + p1 * g2 + p2 * g2 + p2 * g1;
    let nn = n_ions as f64;
    let og2 = p.omega_g * p.omega_g;
    let oe2 = p.omega_e * p.omega_e;
    let os4 = (og2 + oe2) * (og2 + oe2);
    let e2 = p.eta_z * p.eta_z;
    let s_nu = |nu: usize| {
        let w = modes.omega(nu);
        e2 * oe2 * og2 * p.omega_m * p.omega_m / (os4 * (p.omega_m + w).powi(2))
    };
    let s_all: f64 = (0..modes.n_ions()).map(s_nu).sum();
    let s_off: f64 = (1..modes.n_ions()).map(s_nu).sum();

    let p_gs = g1 * g2 / den - s_all;
    let n_ex = (p1 * g2 + p2 * g2 + 2.0 * p2 * g1) / den
        + s_off
        + e2 * oe2 * og2 / (2.0 * os4);
    let n = (p1 * g2 / (nn + 1.0)
        + p2 * g2 / (nn + 1.0)
        + p2 * g1 * (2.0 * nn + 4.0) / (nn * nn + nn + 2.0))
        / den
        + e2 * oe2 * og2 / (4.0 * os4);
    Ok(ClosedFormSteady { p_gs, n_ex, n })
}

/// Effective decay rate Σ_n γ^{(n)} P(n) / n̄_ex for a population vector.
pub fn effective_decay_rate(ladder: &RateLadder, p_ex: &[f64]) -> Result<f64> {
    if p_ex.len() != ladder.n_max + 1 {
        return Err(CoolError::invalid("distribution length mismatch"));
    }
    let total: f64 = p_ex.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(CoolError::invalid("distribution must be normalized"));
    }
    let n_bar: f64 = p_ex.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
    if n_bar <= 0.0 {
        return Err(CoolError::UndefinedRate(
            "mean excitation number vanishes".into(),
        ));
    }
    let num: f64 = (1..=ladder.n_max).map(|n| ladder.gamma_sc[n - 1] * p_ex[n]).sum();
    Ok(num / n_bar)
}

/// Thermal-weight convention for the Eq.-46-style effective rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalWeight {
    /// exp[−2n·coth(2n_th+1)] exactly as printed.
    Verbatim,
    /// exp[−2n·arccoth(2n_th+1)]: the geometric distribution with mean
    /// n_th, which coth almost certainly meant (coth(2n_th+1) ≈ 1 makes
    /// the weight n_th-independent).
    Geometric,
}

/// Thermal-weighted collective rate Σ_n γ^{(n)} w_n / Σ_n n·w_n.
pub fn thermal_weighted_rate(
    p: &PhysParams,
    n_ions: usize,
    n_th: f64,
    weight: ThermalWeight,
) -> Result<f64> {
    let n_max = default_n_max(n_th, n_ions).max(40);
    let gsc = decay_ladder(p, n_ions, n_max)?;
    let beta = match weight {
        ThermalWeight::Verbatim => {
            let x = 2.0 * n_th + 1.0;
            2.0 / x.tanh()
        }
        ThermalWeight::Geometric => {
            // arccoth(x) = ½ ln((x+1)/(x−1))
            let x = 2.0 * n_th + 1.0;
            ((x + 1.0) / (x - 1.0)).ln()
        }
    };
    let mut num = 0.0;
    let mut nbar = 0.0;
    for n in 1..=n_max {
        let w = (-beta * n as f64).exp();
        num += gsc[n - 1] * w;
        nbar += n as f64 * w;
    }
    if nbar == 0.0 {
        return Err(CoolError::UndefinedRate("thermal weight collapsed to n = 0".into()));
    }
    Ok(num / nbar)
}

/// The cooling-parameter table evaluated at the pinned drive
/// Ω_g = Ω_e = √(2Δ_Rω_m) (so ω_s = ω_m in the far-detuned limit).
#[derive(Debug, Clone, Copy)]
pub struct Table1Row {
    /// Pinned Rabi frequency √(2Δ_Rω_m).
    pub omega_pinned: f64,
    /// Weak-coupling rate (Δ_Rω_m/γ)(η_z²/4 + 4g_O²/ω_m²).
    pub weak_rate: f64,
    /// Weak-coupling limit γ²/(16Δ_R²).
    pub weak_limit: f64,
    /// Strong-coupling rate for n_ex ≪ N: (Δ_Rω_m/γ)(γ²/4Δ_R²)·2N/(N+1).
    pub strong_rate_small_nex: f64,
    /// Strong-coupling ground-state deficit
    /// η_z²[Σ_ν(8N(N+1)ω_ν²+8N²ω_m²)/(ω_m+ω_ν)² + 3N²+3N+2]/(32N²).
    pub strong_limit_deficit: f64,
}

/// Strong-coupling rate for n_ex ≥ N: (Δ_Rω_m/γ)(γ²/4Δ_R²)(N/n_ex).
pub fn table1_strong_rate_large_nex(p: &PhysParams, n_ions: usize, n_ex: usize) -> f64 {
    let dr = p.delta_r();
    let g = p.gamma();
    (dr * p.omega_m / g) * (g * g / (4.0 * dr * dr)) * n_ions as f64 / n_ex as f64
}

pub fn table1_row(p: &PhysParams, n_ions: usize, modes: &ModeSpectrum) -> Table1Row {
    let dr = p.delta_r();
    let g = p.gamma();
    let nn = n_ions as f64;
    let e2 = p.eta_z * p.eta_z;
    let mode_sum: f64 = (0..modes.n_ions())
        .map(|nu| {
            let w = modes.omega(nu);
            (8.0 * nn * (nn + 1.0) * w * w + 8.0 * nn * nn * p.omega_m * p.omega_m)
                / (p.omega_m + w).powi(2)
        })
        .sum();
    Table1Row {
        omega_pinned: (2.0 * dr * p.omega_m).sqrt(),
        weak_rate: (dr * p.omega_m / g)
            * (e2 / 4.0 + 4.0 * p.g_odf * p.g_odf / (p.omega_m * p.omega_m)),
        weak_limit: g * g / (16.0 * dr * dr),
        strong_rate_small_nex: (dr * p.omega_m / g) * (g * g / (4.0 * dr * dr)) * 2.0 * nn
            / (nn + 1.0),
        strong_limit_deficit: e2 * (mode_sum + 3.0 * nn * nn + 3.0 * nn + 2.0)
            / (32.0 * nn * nn),
    }
}

/// Combined weak+strong summary for one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct Summary {
    /// n_f ≈ γ²/16Δ_R² + n_f,sc.
    pub n_f_combined: f64,
    /// γ_s ≈ min(η_z²Δ_Rω_m/4γ, γ_{N,sc}) with the thermal-weighted rate.
    pub gamma_s_combined: f64,
    /// The weak arm η_z²Δ_Rω_m/(4γ) by itself.
    pub weak_arm: f64,
    /// The thermal-weighted strong arm by itself.
    pub strong_arm: f64,
    /// Resonant closed form from the spin absorption spectrum at the
    /// pinned drive, for the rate-convention comparison.
    pub weak_rate_eq18: f64,
    /// Same quantity in the table convention.
    pub weak_rate_table1: f64,
    /// η_z where the two arms cross: √(4γ·γ_{N,sc}/(Δ_Rω_m)).
    pub crossover_eta: f64,
    pub table1: Table1Row,
}

pub fn summary_formulas(
    p: &PhysParams,
    n_ions: usize,
    modes: &ModeSpectrum,
    n_th: f64,
    weight: ThermalWeight,
) -> Result<Summary> {
    let dr = p.delta_r();
    let g = p.gamma();
    let cf = closed_form_steady(p, n_ions, modes)?;
    let n_f_combined = g * g / (16.0 * dr * dr) + cf.n;
    let weak_arm = p.eta_z * p.eta_z * dr * p.omega_m / (4.0 * g);
    let strong_arm = thermal_weighted_rate(p, n_ions, n_th, weight)?;
    let table1 = table1_row(p, n_ions, modes);
    // Eq.-18-style optimum evaluated at the pinned drive
    let pinned = PhysParams {
        omega_g: table1.omega_pinned,
        omega_e: table1.omega_pinned,
        g_odf: 0.0,
        ..p.clone()
    };
    let opt = crate::weak::optimal_rates(&pinned)?;
    let weak_rate_table1 = (dr * p.omega_m / g) * (p.eta_z * p.eta_z / 4.0);
    Ok(Summary {
        n_f_combined,
        gamma_s_combined: weak_arm.min(strong_arm),
        weak_arm,
        strong_arm,
        weak_rate_eq18: opt.gamma_s_opt_equal,
        weak_rate_table1,
        crossover_eta: (4.0 * g * strong_arm / (dr * p.omega_m)).sqrt(),
        table1,
    })
}
