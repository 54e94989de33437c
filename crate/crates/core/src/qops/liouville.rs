//! The Lindblad generator: matrix-free application and superoperator assembly.

use ndarray::Array2;

use crate::error::{CoolError, Result};
use crate::qops::operator::{QOperator, HERMITICITY_TOL};
use crate::qops::sparse::{adjoint_flat, CsMat};
use crate::qops::space::HilbertSpace;
use crate::C64;

/// Largest total dimension for which a dim⁴ superoperator may be cached on
/// the Liouvillian itself.
pub const ASSEMBLED_DIM_CAP: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    MatrixFree,
    Assembled,
}

/// Reusable buffers for the matrix-free application.
#[derive(Debug, Clone)]
pub struct LiouvWorkspace {
    rho_adj: Vec<C64>,
    scratch: Vec<C64>,
    scratch2: Vec<C64>,
}

impl LiouvWorkspace {
    pub fn new(n: usize) -> Self {
        let zero = C64::new(0.0, 0.0);
        LiouvWorkspace {
            rho_adj: vec![zero; n * n],
            scratch: vec![zero; n * n],
            scratch2: vec![zero; n * n],
        }
    }
}

/// dρ/dt = −i[H,ρ] + Σ_k ( L_k ρ L_k† − ½{L_k†L_k, ρ} ).
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub space: HilbertSpace,
    hamiltonian: CsMat,
    jumps: Vec<CsMat>,
    /// Σ_k L_k†L_k, precomputed.
    ntot: CsMat,
    representation: Representation,
    assembled: Option<CsMat>,
}

impl Liouvillian {
    pub fn new(hamiltonian: &QOperator, jumps: &[QOperator]) -> Result<Self> {
        let space = hamiltonian.space.clone();
        let defect = hamiltonian.matrix.hermiticity_defect();
        if defect >= HERMITICITY_TOL {
            return Err(CoolError::invalid(format!(
                "Hamiltonian Hermiticity defect {defect:e} >= {HERMITICITY_TOL:e}"
            )));
        }
        let n = space.total_dim();
        let mut ntot = CsMat::zeros(n);
        let mut jmats = Vec::with_capacity(jumps.len());
        for j in jumps {
            if j.space != space {
                return Err(CoolError::invalid("jump operator on a different space"));
            }
            ntot = ntot.add(&j.matrix.dagger().matmul(&j.matrix));
            jmats.push(j.matrix.clone());
        }
        Ok(Liouvillian {
            space,
            hamiltonian: hamiltonian.matrix.clone(),
            jumps: jmats,
            ntot,
            representation: Representation::MatrixFree,
            assembled: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn hamiltonian(&self) -> &CsMat {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[CsMat] {
        &self.jumps
    }

    /// Switch to the assembled representation (dim ≤ 128 only; a dim⁴ object
    /// is cached).
    pub fn with_assembled(mut self) -> Result<Self> {
        if self.dim() > ASSEMBLED_DIM_CAP {
            return Err(CoolError::invalid(format!(
                "assembled representation capped at dim {ASSEMBLED_DIM_CAP}, got {}",
                self.dim()
            )));
        }
        self.assembled = Some(self.assemble_superoperator());
        self.representation = Representation::Assembled;
        Ok(self)
    }

    /// Apply the generator to a density matrix.
    ///
    /// All products are left-multiplications by sparse factors:
    /// ρA for Hermitian A is computed as (A ρ†)†, which is exact for any ρ.
    pub fn apply(&self, rho: &Array2<C64>) -> Result<Array2<C64>> {
        let n = self.dim();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(CoolError::invalid(format!(
                "density matrix is {}×{}, space dim {n}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        if let Some(sup) = &self.assembled {
            return Ok(apply_superoperator(sup, rho));
        }
        Ok(self.apply_matrix_free(rho))
    }

    fn apply_matrix_free(&self, rho: &Array2<C64>) -> Array2<C64> {
        let n = self.dim();
        let mut ws = LiouvWorkspace::new(n);
        let mut out = Array2::<C64>::zeros((n, n));
        self.apply_flat(
            rho.as_slice().expect("contiguous"),
            out.as_slice_mut().expect("contiguous"),
            &mut ws,
        );
        out
    }

    /// Matrix-free application on flat row-major n² slices with an
    /// externally owned workspace; the integrator hot loop.
    pub fn apply_flat(&self, rho: &[C64], out: &mut [C64], ws: &mut LiouvWorkspace) {
        let zero = C64::new(0.0, 0.0);
        out.fill(zero);
        let n = self.dim();
        adjoint_flat(rho, &mut ws.rho_adj, n);

        // −i(Hρ − ρH);  ρH = (H ρ†)†
        self.hamiltonian.mul_flat_acc(C64::new(0.0, -1.0), rho, out);
        ws.scratch.fill(zero);
        self.hamiltonian.mul_flat_acc(C64::new(1.0, 0.0), &ws.rho_adj, &mut ws.scratch);
        adjoint_flat(&ws.scratch, &mut ws.scratch2, n);
        for (o, x) in out.iter_mut().zip(&ws.scratch2) {
            // += i·x
            o.re -= x.im;
            o.im += x.re;
        }
        self.dissipator_flat_acc(rho, out, ws);
    }

    /// Dissipator part alone: Σ_k D_{L_k}[ρ].
    pub fn apply_dissipator(&self, rho: &Array2<C64>) -> Array2<C64> {
        let n = self.dim();
        let mut ws = LiouvWorkspace::new(n);
        let mut out = Array2::<C64>::zeros((n, n));
        adjoint_flat(
            rho.as_slice().expect("contiguous"),
            &mut ws.rho_adj,
            n,
        );
        self.dissipator_flat_acc(
            rho.as_slice().expect("contiguous"),
            out.as_slice_mut().expect("contiguous"),
            &mut ws,
        );
        out
    }

    /// Accumulate the dissipator; expects ws.rho_adj already filled.
    fn dissipator_flat_acc(&self, rho: &[C64], out: &mut [C64], ws: &mut LiouvWorkspace) {
        let zero = C64::new(0.0, 0.0);
        let n = self.dim();
        // −½{N,ρ};  ρN = (N ρ†)†
        self.ntot.mul_flat_acc(C64::new(-0.5, 0.0), rho, out);
        ws.scratch.fill(zero);
        self.ntot.mul_flat_acc(C64::new(1.0, 0.0), &ws.rho_adj, &mut ws.scratch);
        adjoint_flat(&ws.scratch, &mut ws.scratch2, n);
        for (o, x) in out.iter_mut().zip(&ws.scratch2) {
            o.re -= 0.5 * x.re;
            o.im -= 0.5 * x.im;
        }
        // Σ L ρ L† = Σ L · (L ρ†)†
        for l in &self.jumps {
            ws.scratch.fill(zero);
            l.mul_flat_acc(C64::new(1.0, 0.0), &ws.rho_adj, &mut ws.scratch);
            adjoint_flat(&ws.scratch, &mut ws.scratch2, n);
            l.mul_flat_acc(C64::new(1.0, 0.0), &ws.scratch2, out);
        }
    }

    /// Build the dim²×dim² superoperator in column-stacking convention:
    /// vec(AρB) = (Bᵀ ⊗ A) vec(ρ).
    pub fn assemble_superoperator(&self) -> CsMat {
        let n = self.dim();
        let id = CsMat::identity(n);
        let mi = C64::new(0.0, -1.0);
        // −i(1⊗H − Hᵀ⊗1)
        let mut sup = id
            .kron(&self.hamiltonian)
            .scale(mi)
            .add(&self.hamiltonian.transpose().kron(&id).scale(-mi));
        // Σ L̄ ⊗ L
        for l in &self.jumps {
            sup = sup.add(&l.conj().kron(l));
        }
        // −½(1⊗N + Nᵀ⊗1)
        let half = C64::new(-0.5, 0.0);
        sup = sup.add(&id.kron(&self.ntot).scale(half));
        sup = sup.add(&self.ntot.transpose().kron(&id).scale(half));
        sup
    }
}

/// Apply an assembled superoperator to a density matrix via column-stacking.
pub fn apply_superoperator(sup: &CsMat, rho: &Array2<C64>) -> Array2<C64> {
    let n = rho.nrows();
    let v = vec_columns(rho);
    let mut out_v = vec![C64::new(0.0, 0.0); n * n];
    for (i, j, s) in sup.iter() {
        out_v[i] += s * v[j];
    }
    unvec_columns(&out_v, n)
}

/// Column-stacking vectorization: v[j·n + i] = ρ[i, j].
pub fn vec_columns(rho: &Array2<C64>) -> Vec<C64> {
    let n = rho.nrows();
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            v[j * n + i] = rho[(i, j)];
        }
    }
    v
}

pub fn unvec_columns(v: &[C64], n: usize) -> Array2<C64> {
    let mut rho = Array2::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            rho[(i, j)] = v[j * n + i];
        }
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::operator::boson_ops;
    use crate::qops::dense_adjoint;

    fn thermal(dim: usize, n_th: f64) -> Array2<C64> {
        let q = n_th / (n_th + 1.0);
        let mut w: Vec<f64> = (0..dim).map(|n| q.powi(n as i32)).collect();
        let z: f64 = w.iter().sum();
        for x in w.iter_mut() {
            *x /= z;
        }
        let mut rho = Array2::zeros((dim, dim));
        for (n, x) in w.iter().enumerate() {
            rho[(n, n)] = C64::new(*x, 0.0);
        }
        rho
    }

    #[test]
    fn eigenstate_of_h_is_stationary() {
        // H = ω n̂, no jumps, ρ = |1⟩⟨1| → dρ/dt = 0
        let (_, _, num) = boson_ops(4).unwrap();
        let h = QOperator::new(num.space.clone(), num.matrix.scale(C64::new(2.5, 0.0))).unwrap();
        let liouv = Liouvillian::new(&h, &[]).unwrap();
        let mut rho = Array2::<C64>::zeros((4, 4));
        rho[(1, 1)] = C64::new(1.0, 0.0);
        let d = liouv.apply(&rho).unwrap();
        let max = d.iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(max < 1e-14);
    }

    #[test]
    fn single_photon_decay() {
        // H = 0, jump √γ b, ρ = |1⟩⟨1| → dρ/dt = γ(|0⟩⟨0| − |1⟩⟨1|)
        let gamma: f64 = 0.37;
        let (a, _, _) = boson_ops(3).unwrap();
        let h = QOperator::new(a.space.clone(), CsMat::zeros(3)).unwrap();
        let jump = a.scale(C64::new(gamma.sqrt(), 0.0));
        let liouv = Liouvillian::new(&h, &[jump]).unwrap();
        let mut rho = Array2::<C64>::zeros((3, 3));
        rho[(1, 1)] = C64::new(1.0, 0.0);
        let d = liouv.apply(&rho).unwrap();
        assert!((d[(0, 0)].re - gamma).abs() < 1e-14);
        assert!((d[(1, 1)].re + gamma).abs() < 1e-14);
        assert!(d[(2, 2)].norm() < 1e-14);
    }

    #[test]
    fn thermal_mean_phonon_rate() {
        // d⟨n⟩/dt = −γ⟨n⟩ for pure decay on a thermal state (derived by
        // taking the expectation of the dissipator).
        let gamma: f64 = 0.8;
        let dim = 40;
        let (a, _, num) = boson_ops(dim).unwrap();
        let h = QOperator::new(a.space.clone(), CsMat::zeros(dim)).unwrap();
        let jump = a.scale(C64::new(gamma.sqrt(), 0.0));
        let liouv = Liouvillian::new(&h, &[jump]).unwrap();
        let n_th = 1.7;
        let rho = thermal(dim, n_th);
        let mean_n: f64 = (0..dim).map(|n| n as f64 * rho[(n, n)].re).sum();
        let d = liouv.apply(&rho).unwrap();
        let dn: f64 = crate::qops::sparse::trace_sparse_dense(&num.matrix, &d).re;
        assert!(
            (dn + gamma * mean_n).abs() < 1e-10 * gamma * mean_n.abs().max(1.0),
            "d<n>/dt = {dn}, expected {}",
            -gamma * mean_n
        );
    }

    #[test]
    fn trace_and_hermiticity_preserved() {
        let (a, _, num) = boson_ops(5).unwrap();
        let h = QOperator::new(a.space.clone(), num.matrix.scale(C64::new(1.3, 0.0))).unwrap();
        let jump = a.scale(C64::new(0.5, 0.0));
        let liouv = Liouvillian::new(&h, &[jump]).unwrap();
        let rho = thermal(5, 0.9);
        let d = liouv.apply(&rho).unwrap();
        let tr: C64 = (0..5).map(|i| d[(i, i)]).sum();
        assert!(tr.norm() < 1e-12);
        let d_adj = dense_adjoint(&d);
        let herm = d
            .iter()
            .zip(d_adj.iter())
            .map(|(x, y)| (*x - *y).norm())
            .fold(0.0, f64::max);
        assert!(herm < 1e-13);
    }

    #[test]
    fn assembled_matches_matrix_free() {
        let (a, _, num) = boson_ops(4).unwrap();
        let h = QOperator::new(a.space.clone(), num.matrix.scale(C64::new(0.7, 0.0))).unwrap();
        let j1 = a.scale(C64::new(0.6, 0.0));
        let j2 = a.dagger().scale(C64::new(0.2, 0.0));
        let free = Liouvillian::new(&h, &[j1.clone(), j2.clone()]).unwrap();
        let asm = Liouvillian::new(&h, &[j1, j2]).unwrap().with_assembled().unwrap();
        let rho = thermal(4, 0.5);
        let d1 = free.apply(&rho).unwrap();
        let d2 = asm.apply(&rho).unwrap();
        let max = d1
            .iter()
            .zip(d2.iter())
            .map(|(x, y)| (*x - *y).norm())
            .fold(0.0, f64::max);
        assert!(max < 1e-12, "assembled vs matrix-free deviation {max}");
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let (a, _, _) = boson_ops(3).unwrap();
        let h = QOperator::new(a.space.clone(), a.matrix.clone()).unwrap();
        assert!(Liouvillian::new(&h, &[]).is_err());
    }
}
