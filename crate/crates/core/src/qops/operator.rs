//! Operators tied to a labeled space, plus the standard constructors.

use std::collections::HashMap;

use ndarray::Array2;

use crate::error::{CoolError, Result};
use crate::qops::sparse::CsMat;
use crate::qops::space::HilbertSpace;
use crate::C64;

/// How the matrix is meant to be handled downstream. Everything is stored
/// compressed; `Dense` marks operators that are structurally full (for
/// example recoil phase factors) so assembly code can budget for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Storage {
    Dense,
    Sparse,
}

/// A linear operator on a labeled composite Hilbert space.
#[derive(Debug, Clone)]
pub struct QOperator {
    pub space: HilbertSpace,
    pub matrix: CsMat,
    pub storage: Storage,
}

/// Absolute tolerance for the Hermiticity gate. Inputs failing it are
/// rejected, never symmetrized.
pub const HERMITICITY_TOL: f64 = 1e-12;

impl QOperator {
    pub fn new(space: HilbertSpace, matrix: CsMat) -> Result<Self> {
        if matrix.dim() != space.total_dim() {
            return Err(CoolError::invalid(format!(
                "matrix dim {} != space dim {}",
                matrix.dim(),
                space.total_dim()
            )));
        }
        let storage = if matrix.nnz() * 4 > matrix.dim() * matrix.dim() {
            Storage::Dense
        } else {
            Storage::Sparse
        };
        Ok(QOperator { space, matrix, storage })
    }

    /// Construct and verify max|H − H†| < 1e-12.
    pub fn new_hermitian(space: HilbertSpace, matrix: CsMat) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect >= HERMITICITY_TOL {
            return Err(CoolError::invalid(format!(
                "operator flagged Hermitian has defect {defect:e} >= {HERMITICITY_TOL:e}"
            )));
        }
        QOperator::new(space, matrix)
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn dagger(&self) -> QOperator {
        QOperator { space: self.space.clone(), matrix: self.matrix.dagger(), storage: self.storage }
    }

    pub fn to_dense(&self) -> Array2<C64> {
        self.matrix.to_dense()
    }

    pub fn scale(&self, s: C64) -> QOperator {
        QOperator { space: self.space.clone(), matrix: self.matrix.scale(s), storage: self.storage }
    }

    pub fn matmul(&self, rhs: &QOperator) -> Result<QOperator> {
        if self.space != rhs.space {
            return Err(CoolError::invalid("operator spaces differ"));
        }
        QOperator::new(self.space.clone(), self.matrix.matmul(&rhs.matrix))
    }

    pub fn add(&self, rhs: &QOperator) -> Result<QOperator> {
        if self.space != rhs.space {
            return Err(CoolError::invalid("operator spaces differ"));
        }
        QOperator::new(self.space.clone(), self.matrix.add(&rhs.matrix))
    }
}

/// Bosonic ladder operators on a Fock space truncated to `dim` states
/// `|0⟩..|dim−1⟩`.
///
/// `annihilate` has √n on the first superdiagonal, `create = annihilate†`,
/// `number = create·annihilate`.
pub fn boson_ops(dim: usize) -> Result<(QOperator, QOperator, QOperator)> {
    if dim < 2 {
        return Err(CoolError::invalid(format!("fock dimension {dim} < 2")));
    }
    let space = HilbertSpace::single("fock", dim);
    let mut a_tr = Vec::with_capacity(dim - 1);
    let mut n_tr = Vec::with_capacity(dim);
    for n in 1..dim {
        a_tr.push((n - 1, n, C64::new((n as f64).sqrt(), 0.0)));
        n_tr.push((n, n, C64::new(n as f64, 0.0)));
    }
    let a = CsMat::from_triplets(dim, &a_tr);
    let number = CsMat::from_triplets(dim, &n_tr);
    Ok((
        QOperator::new(space.clone(), a.clone())?,
        QOperator::new(space.clone(), a.dagger())?,
        QOperator::new(space, number)?,
    ))
}

/// The full set of two-level operators for the basis ordered
/// `(first, second)`, with `first` the +1 eigenstate of σ_z.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub space: HilbertSpace,
    pub sx: QOperator,
    pub sy: QOperator,
    pub sz: QOperator,
    /// σ_{mn} = |m⟩⟨n| for every ordered label pair, keyed "m,n".
    projectors: HashMap<(String, String), QOperator>,
    labels: (String, String),
}

impl SpinOps {
    /// |m⟩⟨n| for labels m, n.
    pub fn proj(&self, m: &str, n: &str) -> Result<&QOperator> {
        self.projectors
            .get(&(m.to_string(), n.to_string()))
            .ok_or_else(|| CoolError::invalid(format!("no projector |{m}⟩⟨{n}|")))
    }

    pub fn labels(&self) -> (&str, &str) {
        (&self.labels.0, &self.labels.1)
    }
}

/// Pauli operators and projectors for a two-level system.
pub fn spin_ops(first: &str, second: &str) -> Result<SpinOps> {
    if first == second {
        return Err(CoolError::invalid("spin labels must be distinct"));
    }
    let label = format!("spin[{first},{second}]");
    let space = HilbertSpace::single(&label, 2);
    let c = |re, im| C64::new(re, im);
    let sx = CsMat::from_triplets(2, &[(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]);
    let sy = CsMat::from_triplets(2, &[(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))]);
    let sz = CsMat::from_triplets(2, &[(0, 0, c(1.0, 0.0)), (1, 1, c(-1.0, 0.0))]);
    let mut projectors = HashMap::new();
    let names = [first.to_string(), second.to_string()];
    for (i, m) in names.iter().enumerate() {
        for (j, n) in names.iter().enumerate() {
            let p = CsMat::from_triplets(2, &[(i, j, c(1.0, 0.0))]);
            projectors.insert(
                (m.clone(), n.clone()),
                QOperator::new(space.clone(), p)?,
            );
        }
    }
    Ok(SpinOps {
        space: space.clone(),
        sx: QOperator::new(space.clone(), sx)?,
        sy: QOperator::new(space.clone(), sy)?,
        sz: QOperator::new(space, sz)?,
        projectors,
        labels: (first.to_string(), second.to_string()),
    })
}

/// Lift `op` (acting on one factor) to the composite `space`:
/// identity ⊗ .. ⊗ op ⊗ .. ⊗ identity in factor order.
pub fn embed(op: &CsMat, factor_label: &str, space: &HilbertSpace) -> Result<QOperator> {
    let idx = space.factor_index(factor_label)?;
    let dim = space.factors()[idx].1;
    if op.dim() != dim {
        return Err(CoolError::invalid(format!(
            "operator dim {} != factor `{factor_label}` dim {dim}",
            op.dim()
        )));
    }
    let mut acc = CsMat::identity(1);
    for (k, (_, d)) in space.factors().iter().enumerate() {
        if k == idx {
            acc = acc.kron(op);
        } else {
            acc = acc.kron(&CsMat::identity(*d));
        }
    }
    QOperator::new(space.clone(), acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boson_single_excitation_ladder() {
        let (a, _, _) = boson_ops(2).unwrap();
        let d = a.to_dense();
        assert_eq!(d[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(d[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(d[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(d[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn boson_number_diagonal() {
        let (_, _, n) = boson_ops(4).unwrap();
        for k in 0..4 {
            assert!((n.matrix.get(k, k) - C64::new(k as f64, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn boson_ladder_element_sqrt2() {
        // ladder-operator matrix element: ⟨1|a|2⟩ = √2
        let (a, _, _) = boson_ops(3).unwrap();
        assert!((a.matrix.get(1, 2).re - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn boson_cutoff_too_small() {
        assert!(boson_ops(1).is_err());
    }

    #[test]
    fn pauli_conventions() {
        let s = spin_ops("e", "g").unwrap();
        let z = s.sz.to_dense();
        assert_eq!(z[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(z[(1, 1)], C64::new(-1.0, 0.0));
        // σ_x² = identity
        let x2 = s.sx.matmul(&s.sx).unwrap();
        assert!((x2.matrix.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((x2.matrix.get(1, 1).re - 1.0).abs() < 1e-15);
        assert_eq!(x2.matrix.nnz(), 2);
    }

    #[test]
    fn projector_algebra() {
        let s = spin_ops("+", "-").unwrap();
        let pm = s.proj("+", "-").unwrap();
        let mp = s.proj("-", "+").unwrap();
        let pp = pm.matmul(mp).unwrap();
        assert_eq!(pp.matrix, s.proj("+", "+").unwrap().matrix);
    }

    #[test]
    fn duplicate_spin_labels_rejected() {
        assert!(spin_ops("a", "a").is_err());
    }

    #[test]
    fn embedded_disjoint_supports_commute() {
        let s = spin_ops("e", "g").unwrap();
        let space = HilbertSpace::new(vec![
            ("ion0".into(), 2),
            ("ion1".into(), 2),
            ("fock".into(), 3),
        ])
        .unwrap();
        let z0 = embed(&s.sz.matrix, "ion0", &space).unwrap();
        let z1 = embed(&s.sz.matrix, "ion1", &space).unwrap();
        let ab = z0.matmul(&z1).unwrap();
        let ba = z1.matmul(&z0).unwrap();
        let d = ab.matrix.add(&ba.matrix.scale(C64::new(-1.0, 0.0)));
        assert_eq!(d.nnz(), 0);
    }

    #[test]
    fn embedded_identity_is_identity() {
        let space = HilbertSpace::new(vec![("a".into(), 2), ("b".into(), 3)]).unwrap();
        let id = embed(&CsMat::identity(3), "b", &space).unwrap();
        assert_eq!(id.matrix, CsMat::identity(6));
    }

    #[test]
    fn embedded_pauli_trace_vanishes() {
        // Tr(σ_z ⊗ 1 ⊗ 1) = 0 in a 2×2×3 space
        let s = spin_ops("e", "g").unwrap();
        let space = HilbertSpace::new(vec![
            ("s0".into(), 2),
            ("s1".into(), 2),
            ("fock".into(), 3),
        ])
        .unwrap();
        let z = embed(&s.sz.matrix, "s0", &space).unwrap();
        assert!(z.matrix.trace().norm() < 1e-14);
    }

    #[test]
    fn embed_errors() {
        let space = HilbertSpace::new(vec![("a".into(), 2)]).unwrap();
        assert!(embed(&CsMat::identity(2), "nope", &space).is_err());
        assert!(embed(&CsMat::identity(3), "a", &space).is_err());
    }
}
