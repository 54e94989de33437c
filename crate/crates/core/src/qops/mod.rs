//! Complex linear-operator algebra on labeled composite Hilbert spaces,
//! superoperator construction, and steady-state extraction.

mod liouville;
mod operator;
mod sparse;
mod space;
mod steady;

pub use liouville::{
    apply_superoperator, unvec_columns, vec_columns, LiouvWorkspace, Liouvillian, Representation,
    ASSEMBLED_DIM_CAP,
};
pub use operator::{boson_ops, embed, spin_ops, QOperator, SpinOps, Storage, HERMITICITY_TOL};
pub use sparse::{adjoint_flat, dense_adjoint, dense_adjoint_into, trace_sparse_dense, CsMat};
pub use space::HilbertSpace;
pub use steady::{min_eigenvalue, steady_state, SteadyMethod};

use crate::error::Result;
use crate::C64;
use ndarray::Array2;

/// dρ/dt for a density matrix under the generator; thin wrapper kept for
/// call-site clarity.
pub fn apply_liouvillian(liouv: &Liouvillian, rho: &Array2<C64>) -> Result<Array2<C64>> {
    liouv.apply(rho)
}

/// Tr ρ.
pub fn trace(rho: &Array2<C64>) -> C64 {
    (0..rho.nrows()).map(|i| rho[(i, i)]).sum()
}

/// Frobenius norm.
pub fn fro_norm(rho: &Array2<C64>) -> f64 {
    rho.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
