//! Minimal compressed-column complex sparse matrices.
//!
//! Jump operators and Hamiltonians are sparse; density matrices are dense.
//! The only products the Liouvillian needs are sparse·dense with the sparse
//! factor on the left, which is what CSC does well against row-major dense
//! storage.

use ndarray::Array2;

use crate::C64;

/// Square complex matrix in compressed-column storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CsMat {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<C64>,
}

fn znear(x: C64, tol: f64) -> bool {
    x.re.abs() <= tol && x.im.abs() <= tol
}

impl CsMat {
    /// Build from (row, col, value) triplets; duplicate entries are summed,
    /// exact zeros dropped.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut per_col: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            assert!(i < n && j < n, "triplet index out of range");
            per_col[j].push((i, v));
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for col in per_col.iter_mut() {
            col.sort_by_key(|&(i, _)| i);
            let mut k = 0;
            while k < col.len() {
                let i = col[k].0;
                let mut v = col[k].1;
                let mut m = k + 1;
                while m < col.len() && col[m].0 == i {
                    v += col[m].1;
                    m += 1;
                }
                if !znear(v, 0.0) {
                    row_idx.push(i);
                    vals.push(v);
                }
                k = m;
            }
            col_ptr.push(row_idx.len());
        }
        CsMat { n, col_ptr, row_idx, vals }
    }

    pub fn zeros(n: usize) -> Self {
        CsMat { n, col_ptr: vec![0; n + 1], row_idx: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        CsMat {
            n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            vals: vec![one; n],
        }
    }

    pub fn from_dense(a: &Array2<C64>, drop_tol: f64) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        let mut trips = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let v = a[(i, j)];
                if !znear(v, drop_tol) {
                    trips.push((i, j, v));
                }
            }
        }
        CsMat::from_triplets(n, &trips)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterate all stored entries as (row, col, value).
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1])
                .map(move |k| (self.row_idx[k], j, self.vals[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        for k in self.col_ptr[j]..self.col_ptr[j + 1] {
            if self.row_idx[k] == i {
                return self.vals[k];
            }
        }
        C64::new(0.0, 0.0)
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut out = Array2::zeros((self.n, self.n));
        for (i, j, v) in self.iter() {
            out[(i, j)] = v;
        }
        out
    }

    pub fn scale(&self, s: C64) -> CsMat {
        let mut out = self.clone();
        for v in out.vals.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &CsMat) -> CsMat {
        assert_eq!(self.n, other.n);
        let trips: Vec<_> = self.iter().chain(other.iter()).map(|(i, j, v)| (i, j, v)).collect();
        CsMat::from_triplets(self.n, &trips)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CsMat {
        let trips: Vec<_> = self.iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        CsMat::from_triplets(self.n, &trips)
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> CsMat {
        let mut out = self.clone();
        for v in out.vals.iter_mut() {
            *v = v.conj();
        }
        out
    }

    pub fn transpose(&self) -> CsMat {
        let trips: Vec<_> = self.iter().map(|(i, j, v)| (j, i, v)).collect();
        CsMat::from_triplets(self.n, &trips)
    }

    /// Sparse·sparse product with a dense accumulator per column.
    pub fn matmul(&self, rhs: &CsMat) -> CsMat {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut acc: Vec<C64> = vec![C64::new(0.0, 0.0); n];
        let mut mark: Vec<bool> = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut trips: Vec<(usize, usize, C64)> = Vec::new();
        for j in 0..n {
            for k in rhs.col_ptr[j]..rhs.col_ptr[j + 1] {
                let m = rhs.row_idx[k];
                let vb = rhs.vals[k];
                for q in self.col_ptr[m]..self.col_ptr[m + 1] {
                    let i = self.row_idx[q];
                    if !mark[i] {
                        mark[i] = true;
                        touched.push(i);
                    }
                    acc[i] += self.vals[q] * vb;
                }
            }
            for &i in &touched {
                if !znear(acc[i], 0.0) {
                    trips.push((i, j, acc[i]));
                }
                acc[i] = C64::new(0.0, 0.0);
                mark[i] = false;
            }
            touched.clear();
        }
        CsMat::from_triplets(n, &trips)
    }

    /// Kronecker product, first factor slowest.
    pub fn kron(&self, rhs: &CsMat) -> CsMat {
        let n = self.n * rhs.n;
        let mut trips = Vec::with_capacity(self.nnz() * rhs.nnz());
        for (ia, ja, va) in self.iter() {
            for (ib, jb, vb) in rhs.iter() {
                trips.push((ia * rhs.n + ib, ja * rhs.n + jb, va * vb));
            }
        }
        CsMat::from_triplets(n, &trips)
    }

    /// `out += s · self · b`, flat row-major slices of length n².
    ///
    /// The inner row-axpy runs on the re/im parts separately so the
    /// compiler can vectorize it.
    pub fn mul_flat_acc(&self, s: C64, bs: &[C64], os: &mut [C64]) {
        let n = self.n;
        debug_assert_eq!(bs.len(), n * n);
        debug_assert_eq!(os.len(), n * n);
        // out[i, :] += s * v * b[j, :] for each entry (i, j, v)
        for j in 0..n {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[k];
                let v = s * self.vals[k];
                let (vr, vi) = (v.re, v.im);
                let src = &bs[j * n..(j + 1) * n];
                let dst = &mut os[i * n..(i + 1) * n];
                if vi == 0.0 {
                    for (d, x) in dst.iter_mut().zip(src) {
                        d.re += vr * x.re;
                        d.im += vr * x.im;
                    }
                } else {
                    for (d, x) in dst.iter_mut().zip(src) {
                        let (xr, xi) = (x.re, x.im);
                        d.re += vr * xr - vi * xi;
                        d.im += vr * xi + vi * xr;
                    }
                }
            }
        }
    }

    /// `out += s · self · b` with `b` dense.
    pub fn mul_dense_acc(&self, s: C64, b: &Array2<C64>, out: &mut Array2<C64>) {
        self.mul_flat_acc(
            s,
            b.as_slice().expect("contiguous"),
            out.as_slice_mut().expect("contiguous"),
        );
    }

    /// `self · b` with `b` dense.
    pub fn mul_dense(&self, b: &Array2<C64>) -> Array2<C64> {
        let mut out = Array2::zeros((self.n, self.n));
        self.mul_dense_acc(C64::new(1.0, 0.0), b, &mut out);
        out
    }

    /// Largest |entry| of `self − self†`; zero for Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.add(&self.dagger().scale(C64::new(-1.0, 0.0)));
        d.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

/// Conjugate transpose of a dense matrix.
pub fn dense_adjoint(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let mut out = Array2::zeros((a.ncols(), n));
    dense_adjoint_into(a, &mut out);
    out
}

/// Conjugate transpose written into an existing buffer.
pub fn dense_adjoint_into(a: &Array2<C64>, out: &mut Array2<C64>) {
    let n = a.nrows();
    debug_assert_eq!(a.ncols(), n);
    adjoint_flat(
        a.as_slice().expect("contiguous"),
        out.as_slice_mut().expect("contiguous"),
        n,
    );
}

/// Conjugate transpose of a flat row-major n×n block.
pub fn adjoint_flat(src: &[C64], dst: &mut [C64], n: usize) {
    debug_assert_eq!(src.len(), n * n);
    debug_assert_eq!(dst.len(), n * n);
    for i in 0..n {
        for j in 0..n {
            dst[j * n + i] = src[i * n + j].conj();
        }
    }
}

/// Tr(A·B) for sparse A and dense B.
pub fn trace_sparse_dense(a: &CsMat, b: &Array2<C64>) -> C64 {
    let mut t = C64::new(0.0, 0.0);
    for (i, j, v) in a.iter() {
        t += v * b[(j, i)];
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsMat::from_triplets(
            3,
            &[(0, 1, c(1.0, 2.0)), (2, 0, c(-1.0, 0.0)), (1, 1, c(0.5, 0.0))],
        );
        let b = CsMat::from_triplets(3, &[(1, 0, c(2.0, 0.0)), (0, 2, c(0.0, 1.0))]);
        let ab = a.matmul(&b);
        let ad = a.to_dense();
        let bd = b.to_dense();
        let mut ref_ab = Array2::<C64>::zeros((3, 3));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    ref_ab[(i, j)] += ad[(i, k)] * bd[(k, j)];
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((ab.get(i, j) - ref_ab[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn kron_dims_and_values() {
        let a = CsMat::from_triplets(2, &[(0, 1, c(1.0, 0.0))]);
        let b = CsMat::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.nnz(), 3);
        assert_eq!(k.get(0, 3), c(1.0, 0.0));
        assert_eq!(k.get(2, 5), c(1.0, 0.0));
    }

    #[test]
    fn dagger_involution() {
        let a = CsMat::from_triplets(2, &[(0, 1, c(1.0, 2.0)), (1, 1, c(3.0, -1.0))]);
        assert_eq!(a.dagger().dagger(), a);
    }
}
