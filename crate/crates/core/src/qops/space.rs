//! Labeled composite Hilbert spaces.

use crate::error::{CoolError, Result};

/// An ordered tensor product of labeled factors.
///
/// The first factor is the slowest index: the basis state
/// `|i0, i1, ..⟩` has flat index `i0·d1·d2·.. + i1·d2·.. + ..`,
/// matching the Kronecker-product convention `A ⊗ B` with `A` on factor 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    factors: Vec<(String, usize)>,
    total_dim: usize,
}

impl HilbertSpace {
    pub fn new(factors: Vec<(String, usize)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(CoolError::invalid("space needs at least one factor"));
        }
        let mut total = 1usize;
        for (label, dim) in &factors {
            if *dim == 0 {
                return Err(CoolError::invalid(format!("factor `{label}` has dim 0")));
            }
            total = total.checked_mul(*dim).ok_or_else(|| {
                CoolError::RangeError("total dimension overflows usize".into())
            })?;
        }
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                if factors[i].0 == factors[j].0 {
                    return Err(CoolError::invalid(format!(
                        "duplicate factor label `{}`",
                        factors[i].0
                    )));
                }
            }
        }
        Ok(HilbertSpace { total_dim: total, factors })
    }

    /// Single-factor space.
    pub fn single(label: &str, dim: usize) -> Self {
        HilbertSpace::new(vec![(label.to_string(), dim)]).expect("valid single factor")
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn factor_index(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| CoolError::invalid(format!("unknown factor label `{label}`")))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.factor_index(label)?].1)
    }

    /// Flat index of the product basis state with the given per-factor indices.
    pub fn flat_index(&self, per_factor: &[usize]) -> Result<usize> {
        if per_factor.len() != self.factors.len() {
            return Err(CoolError::invalid("index count != factor count"));
        }
        let mut idx = 0usize;
        for ((_, d), &i) in self.factors.iter().zip(per_factor) {
            if i >= *d {
                return Err(CoolError::invalid("factor index out of range"));
            }
            idx = idx * d + i;
        }
        Ok(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_dim_is_product() {
        let s = HilbertSpace::new(vec![
            ("spin".into(), 2),
            ("fock".into(), 31),
        ])
        .unwrap();
        assert_eq!(s.total_dim(), 62);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(HilbertSpace::new(vec![("a".into(), 2), ("a".into(), 3)]).is_err());
    }

    #[test]
    fn flat_index_first_factor_slowest() {
        let s = HilbertSpace::new(vec![("a".into(), 2), ("b".into(), 3)]).unwrap();
        assert_eq!(s.flat_index(&[0, 0]).unwrap(), 0);
        assert_eq!(s.flat_index(&[0, 2]).unwrap(), 2);
        assert_eq!(s.flat_index(&[1, 0]).unwrap(), 3);
        assert_eq!(s.flat_index(&[1, 2]).unwrap(), 5);
    }
}
