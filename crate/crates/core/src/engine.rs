//! Time evolution, observable recording, and the steady-state scattering
//! profile.
//!
//! The integrator is an adaptive embedded Runge-Kutta 5(4) pair with a
//! fourth-order continuous extension; observables are evaluated at the
//! requested grid times from the dense output, never by forcing steps.

use ndarray::Array2;

use crate::error::{CoolError, Result};
use crate::models::{build_three_level_internal, BuiltinObs, LindbladModel, PhysParams};
use crate::par::map_grid;
use crate::qops::{steady_state, trace_sparse_dense, Liouvillian, QOperator, SteadyMethod};
use crate::C64;

/// Relative/absolute integration tolerances.
#[derive(Debug, Clone, Copy)]
pub struct Tol {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { rel: 1e-8, abs: 1e-10 }
    }
}

/// Labeled Hermitian operators recorded during evolution.
#[derive(Debug, Clone, Default)]
pub struct ObservableSet {
    entries: Vec<(String, QOperator)>,
}

impl ObservableSet {
    pub fn new() -> Self {
        ObservableSet { entries: Vec::new() }
    }

    pub fn push(&mut self, label: impl Into<String>, op: QOperator) -> Result<()> {
        let defect = op.matrix.hermiticity_defect();
        if defect >= crate::qops::HERMITICITY_TOL {
            return Err(CoolError::invalid(format!(
                "observable is not Hermitian (defect {defect:e})"
            )));
        }
        self.entries.push((label.into(), op));
        Ok(())
    }

    /// Builtin observables resolved against a model.
    pub fn builtin(model: &LindbladModel, names: &[BuiltinObs]) -> Result<Self> {
        let mut set = ObservableSet::new();
        for name in names {
            set.push(name.label(), model.observable(*name)?)?;
        }
        Ok(set)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.entries.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn evaluate(&self, rho: &Array2<C64>) -> Vec<f64> {
        self.entries
            .iter()
            .map(|(_, op)| trace_sparse_dense(&op.matrix, rho).re)
            .collect()
    }
}

/// Integrator statistics reported with every trajectory.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolverStats {
    pub steps: usize,
    pub rejected: usize,
    /// Largest |Tr ρ − 1| seen at output times.
    pub max_trace_drift: f64,
}

/// Time series of observable expectation values.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub records: Vec<(String, Vec<f64>)>,
    pub stats: SolverStats,
    /// ρ at the last integration time (positivity monitoring, warm starts).
    pub final_state: Array2<C64>,
}

impl Trajectory {
    pub fn record(&self, label: &str) -> Result<&[f64]> {
        self.records
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| CoolError::invalid(format!("no record `{label}`")))
    }

    /// CSV with `t_us` first and one column per observable,
    /// 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut head = vec!["t_us".to_string()];
        head.extend(self.records.iter().map(|(l, _)| l.clone()));
        let mut out = head.join(",");
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![format!("{t:.16e}")];
            for (_, v) in &self.records {
                row.push(format!("{:.16e}", v[k]));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Linear interpolation of a record at time `t`.
    pub fn interp(&self, label: &str, t: f64) -> Result<f64> {
        let v = self.record(label)?;
        let ts = &self.times;
        if t < ts[0] - 1e-12 || t > ts[ts.len() - 1] + 1e-12 {
            return Err(CoolError::invalid(format!(
                "time {t} outside trajectory [{}, {}]",
                ts[0],
                ts[ts.len() - 1]
            )));
        }
        let i = match ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(v[i]),
            Err(i) => i.clamp(1, ts.len() - 1),
        };
        let (t0, t1) = (ts[i - 1], ts[i]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        Ok(v[i - 1] * (1.0 - w) + v[i] * w)
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error weights b − b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense-output coefficients
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Flat complex state with axpy-style helpers.
type State = Vec<C64>;

/// dst = y + h·Σ c_k·k_k, written in place.
fn combo_into(dst: &mut State, y: &State, h: f64, terms: &[(f64, &State)]) {
    dst.copy_from_slice(y);
    for &(cfac, k) in terms {
        let s = h * cfac;
        for (o, xi) in dst.iter_mut().zip(k) {
            o.re += s * xi.re;
            o.im += s * xi.im;
        }
    }
}

/// Evolve dρ/dt = L(ρ) and record observables at the grid times.
pub fn evolve(
    model: &LindbladModel,
    rho0: &Array2<C64>,
    t_grid: &[f64],
    obs: &ObservableSet,
    tol: Tol,
) -> Result<Trajectory> {
    let liouv = model.to_liouvillian()?;
    evolve_liouvillian(&liouv, rho0, t_grid, obs, tol)
}

/// Same as [`evolve`] for a prebuilt Liouvillian.
pub fn evolve_liouvillian(
    liouv: &Liouvillian,
    rho0: &Array2<C64>,
    t_grid: &[f64],
    obs: &ObservableSet,
    tol: Tol,
) -> Result<Trajectory> {
    let n = liouv.dim();
    if rho0.nrows() != n || rho0.ncols() != n {
        return Err(CoolError::invalid("initial state dimension mismatch"));
    }
    if t_grid.is_empty() {
        return Err(CoolError::invalid("empty time grid"));
    }
    if t_grid[0] < 0.0 {
        return Err(CoolError::invalid("time grid must start at t >= 0"));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(CoolError::invalid("time grid must be strictly increasing"));
        }
    }
    let tr0: C64 = (0..n).map(|i| rho0[(i, i)]).sum();
    if (tr0 - C64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(CoolError::invalid(format!(
            "initial state trace {} is not 1",
            tr0.re
        )));
    }

    let mut ws = crate::qops::LiouvWorkspace::new(n);
    let mut y: State = {
        let mut v = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                v[i * n + j] = rho0[(i, j)];
            }
        }
        v
    };
    let t_end = *t_grid.last().unwrap();
    let mut t = 0.0;
    let mut stats = SolverStats::default();
    let mut out_times = Vec::with_capacity(t_grid.len());
    let mut out_vals: Vec<Vec<f64>> = Vec::with_capacity(t_grid.len());
    let mut next_out = 0;

    // output any grid point at t = 0
    while next_out < t_grid.len() && t_grid[next_out] <= 1e-300 {
        out_times.push(t_grid[next_out]);
        out_vals.push(obs.evaluate(rho0));
        next_out += 1;
    }

    let zero = C64::new(0.0, 0.0);
    let nn = n * n;
    let mut k1 = vec![zero; nn];
    let mut k2 = vec![zero; nn];
    let mut k3 = vec![zero; nn];
    let mut k4 = vec![zero; nn];
    let mut k5 = vec![zero; nn];
    let mut k6 = vec![zero; nn];
    let mut k7 = vec![zero; nn];
    let mut stage = vec![zero; nn];
    let mut y1 = vec![zero; nn];
    liouv.apply_flat(&y, &mut k1, &mut ws);
    // initial step from the rhs magnitude
    let mut h = {
        let y_norm = y.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
        let f_norm = k1.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if f_norm > 0.0 {
            (0.01 * y_norm / f_norm).min(t_end / 10.0)
        } else {
            t_end / 10.0
        }
    };
    let h_min = 1e-14 * t_end.max(1.0);
    let trace_bound = 100.0 * tol.abs;
    let mut rejected_last = false;

    while t < t_end {
        if h < h_min {
            return Err(CoolError::StiffnessFailure { t, h });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        combo_into(&mut stage, &y, h, &[(A21, &k1)]);
        liouv.apply_flat(&stage, &mut k2, &mut ws);
        combo_into(&mut stage, &y, h, &[(A31, &k1), (A32, &k2)]);
        liouv.apply_flat(&stage, &mut k3, &mut ws);
        combo_into(&mut stage, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        liouv.apply_flat(&stage, &mut k4, &mut ws);
        combo_into(&mut stage, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        liouv.apply_flat(&stage, &mut k5, &mut ws);
        combo_into(
            &mut stage,
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        liouv.apply_flat(&stage, &mut k6, &mut ws);
        combo_into(&mut y1, &y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        liouv.apply_flat(&y1, &mut k7, &mut ws);
        let enorm = {
            let mut acc = 0.0f64;
            for idx in 0..nn {
                let e = h
                    * (E1 * k1[idx]
                        + E3 * k3[idx]
                        + E4 * k4[idx]
                        + E5 * k5[idx]
                        + E6 * k6[idx]
                        + E7 * k7[idx]);
                let sc = tol.abs + tol.rel * y[idx].norm().max(y1[idx].norm());
                let r = e.norm() / sc;
                acc += r * r;
            }
            (acc / nn as f64).sqrt()
        };

        if enorm <= 1.0 {
            // accept; dense output over (t, t+h]
            let t_new = t + h;
            if next_out < t_grid.len() && t_grid[next_out] <= t_new + 1e-300 {
                // rcont coefficients (Hairer's contd5)
                let mut rc = [
                    y.clone(),
                    vec![C64::new(0.0, 0.0); y.len()],
                    vec![C64::new(0.0, 0.0); y.len()],
                    vec![C64::new(0.0, 0.0); y.len()],
                    vec![C64::new(0.0, 0.0); y.len()],
                ];
                for idx in 0..y.len() {
                    let ydiff = y1[idx] - y[idx];
                    let bspl = h * k1[idx] - ydiff;
                    rc[1][idx] = ydiff;
                    rc[2][idx] = bspl;
                    rc[3][idx] = ydiff - h * k7[idx] - bspl;
                    rc[4][idx] = h
                        * (D1 * k1[idx]
                            + D3 * k3[idx]
                            + D4 * k4[idx]
                            + D5 * k5[idx]
                            + D6 * k6[idx]
                            + D7 * k7[idx]);
                }
                while next_out < t_grid.len() && t_grid[next_out] <= t_new + 1e-300 {
                    let theta = ((t_grid[next_out] - t) / h).clamp(0.0, 1.0);
                    let th1 = 1.0 - theta;
                    let mut rho_out = Array2::<C64>::zeros((n, n));
                    for i in 0..n {
                        for j in 0..n {
                            let idx = i * n + j;
                            let v = rc[0][idx]
                                + theta
                                    * (rc[1][idx]
                                        + th1 * (rc[2][idx] + theta * (rc[3][idx] + th1 * rc[4][idx])));
                            rho_out[(i, j)] = v;
                        }
                    }
                    let tr: C64 = (0..n).map(|i| rho_out[(i, i)]).sum();
                    let drift = (tr - C64::new(1.0, 0.0)).norm();
                    stats.max_trace_drift = stats.max_trace_drift.max(drift);
                    if drift > trace_bound {
                        return Err(CoolError::IntegrationFailure { drift, bound: trace_bound });
                    }
                    out_times.push(t_grid[next_out]);
                    out_vals.push(obs.evaluate(&rho_out));
                    next_out += 1;
                }
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7); // FSAL
            stats.steps += 1;
            let fac = (0.9 * enorm.powf(-0.2)).clamp(0.2, if rejected_last { 1.0 } else { 5.0 });
            h *= fac;
            rejected_last = false;
        } else {
            stats.rejected += 1;
            rejected_last = true;
            h *= (0.9 * enorm.powf(-0.2)).clamp(0.2, 1.0);
        }
    }

    let mut records: Vec<(String, Vec<f64>)> =
        obs.labels().iter().map(|l| (l.to_string(), Vec::with_capacity(out_times.len()))).collect();
    for row in &out_vals {
        for (col, v) in records.iter_mut().zip(row) {
            col.1.push(*v);
        }
    }
    let mut final_state = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            final_state[(i, j)] = y[i * n + j];
        }
    }
    Ok(Trajectory { times: out_times, records, stats, final_state })
}

/// −ln[⟨n⟩(t1)/⟨n⟩(t0)]/(t1−t0) over a window of a recorded trajectory.
pub fn fit_cooling_rate(traj: &Trajectory, record: &str, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    if t1 <= t0 {
        return Err(CoolError::invalid("window must have t1 > t0"));
    }
    let v = traj.record(record)?;
    // every sample inside the window must be positive
    for (t, x) in traj.times.iter().zip(v) {
        if *t >= t0 && *t <= t1 && *x <= 0.0 {
            return Err(CoolError::InvalidData(format!(
                "non-positive phonon number {x} at t = {t}"
            )));
        }
    }
    let n0 = traj.interp(record, t0)?;
    let n1 = traj.interp(record, t1)?;
    if n0 <= 0.0 || n1 <= 0.0 {
        return Err(CoolError::InvalidData("non-positive phonon number at window edge".into()));
    }
    Ok(-(n1 / n0).ln() / (t1 - t0))
}

/// Steady-state scattering rate γ·ρ_rr of the internal three-level system
/// over a grid of detuning ratios Δ_g/Δ_e.
pub fn scattering_rate_profile(p: &PhysParams, ratio_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if p.delta_e == 0.0 {
        return Err(CoolError::invalid("Delta_e must be nonzero"));
    }
    if p.gamma_g == 0.0 && p.gamma_e == 0.0 {
        return Err(CoolError::invalid(
            "no dissipation: gamma_g and gamma_e both vanish",
        ));
    }
    let results = map_grid(ratio_grid, |&ratio| -> Result<(f64, f64)> {
        let mut q = p.clone();
        q.delta_g = ratio * p.delta_e;
        let model = build_three_level_internal(&q)?;
        let liouv = model.to_liouvillian()?;
        let rho = steady_state(&liouv, SteadyMethod::NullSpace)?;
        let rr = model.observable(BuiltinObs::RhoRR)?;
        let val = trace_sparse_dense(&rr.matrix, &rho).re;
        Ok((ratio, p.gamma() * val))
    });
    results.into_iter().collect()
}
