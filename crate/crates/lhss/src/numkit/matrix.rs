//! Real symmetric matrices with dense or sparse storage.
//!
//! A single stored triangle makes symmetry structural: `entry(i, j)` and
//! `entry(j, i)` read the same datum. Dense storage is a packed lower
//! triangle; sparse storage is lower-triangle coordinate form. Mat-vecs
//! respect sparsity; factorizations and eigensolves densify at desk scale.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex vectors are nalgebra column vectors over `Complex64`.
pub type ComplexVector = DVector<Complex64>;

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Packed lower triangle, row by row: entry (i, j) with j <= i lives at
    /// index i*(i+1)/2 + j.
    Dense(Vec<f64>),
    /// Lower-triangle coordinate entries (i, j, v) with j <= i, sorted by
    /// (i, j), duplicates summed at construction.
    Sparse(Vec<(usize, usize, f64)>),
}

/// A real symmetric matrix of order `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSymMatrix {
    n: usize,
    storage: Storage,
}

fn check_finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NotFinite(what.to_string()))
    }
}

impl RealSymMatrix {
    /// Dense zero matrix.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be at least 1");
        RealSymMatrix {
            n,
            storage: Storage::Dense(vec![0.0; n * (n + 1) / 2]),
        }
    }

    /// Sparse identity.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        RealSymMatrix {
            n,
            storage: Storage::Sparse((0..n).map(|i| (i, i, 1.0)).collect()),
        }
    }

    /// Dense matrix from a generator called once per lower-triangle entry
    /// (i, j) with j <= i.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        assert!(n >= 1);
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                check_finite(v, "matrix entry")?;
                data.push(v);
            }
        }
        Ok(RealSymMatrix {
            n,
            storage: Storage::Dense(data),
        })
    }

    /// Sparse diagonal matrix.
    pub fn from_diagonal(d: &[f64]) -> Self {
        assert!(!d.is_empty());
        RealSymMatrix {
            n: d.len(),
            storage: Storage::Sparse(d.iter().copied().enumerate().map(|(i, v)| (i, i, v)).collect()),
        }
    }

    /// Dense matrix from the lower triangle of a full symmetric matrix.
    ///
    /// Fails if `m` is not square or deviates from symmetry by more than
    /// `1e-12 * max|entry|`.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = m.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        for i in 0..m.nrows() {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::SpecViolation(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    /// Sparse matrix from coordinate entries. Entries may address either
    /// triangle; they are folded to the lower one. Duplicates are summed.
    pub fn from_coo(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        assert!(n >= 1);
        let mut folded: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for &(i, j, v) in entries {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch { expected: n, got: i.max(j) + 1 });
            }
            check_finite(v, "matrix entry")?;
            let (r, c) = if i >= j { (i, j) } else { (j, i) };
            folded.push((r, c, v));
        }
        folded.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(folded.len());
        for (i, j, v) in folded {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        Ok(RealSymMatrix {
            n,
            storage: Storage::Sparse(merged),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Number of stored lower-triangle entries.
    pub fn stored_entries(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.len(),
            Storage::Sparse(e) => e.len(),
        }
    }

    /// Symmetric entry accessor.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n);
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        match &self.storage {
            Storage::Dense(d) => d[r * (r + 1) / 2 + c],
            Storage::Sparse(e) => e
                .binary_search_by_key(&(r, c), |&(a, b, _)| (a, b))
                .map(|k| e[k].2)
                .unwrap_or(0.0),
        }
    }

    /// Stored lower-triangle entries as (i, j, v) triples, j <= i.
    pub fn lower_entries(&self) -> Vec<(usize, usize, f64)> {
        match &self.storage {
            Storage::Dense(d) => {
                let mut out = Vec::with_capacity(d.len());
                let mut k = 0;
                for i in 0..self.n {
                    for j in 0..=i {
                        out.push((i, j, d[k]));
                        k += 1;
                    }
                }
                out
            }
            Storage::Sparse(e) => e.clone(),
        }
    }

    /// Materialize the full symmetric matrix.
    pub fn to_dense_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        match &self.storage {
            Storage::Dense(d) => {
                let mut k = 0;
                for i in 0..self.n {
                    for j in 0..=i {
                        m[(i, j)] = d[k];
                        m[(j, i)] = d[k];
                        k += 1;
                    }
                }
            }
            Storage::Sparse(e) => {
                for &(i, j, v) in e {
                    m[(i, j)] += v;
                    if i != j {
                        m[(j, i)] += v;
                    }
                }
            }
        }
        m
    }

    /// Largest entry magnitude (0 for an all-zero matrix).
    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d.iter().fold(0.0f64, |a, &v| a.max(v.abs())),
            Storage::Sparse(e) => e.iter().fold(0.0f64, |a, &(_, _, v)| a.max(v.abs())),
        }
    }

    /// y = M x for a real vector.
    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        let mut y = DVector::zeros(self.n);
        match &self.storage {
            Storage::Dense(d) => {
                let mut k = 0;
                for i in 0..self.n {
                    for j in 0..=i {
                        let v = d[k];
                        y[i] += v * x[j];
                        if i != j {
                            y[j] += v * x[i];
                        }
                        k += 1;
                    }
                }
            }
            Storage::Sparse(e) => {
                for &(i, j, v) in e {
                    y[i] += v * x[j];
                    if i != j {
                        y[j] += v * x[i];
                    }
                }
            }
        }
        y
    }

    /// y = M x for a complex vector (two real mat-vecs).
    pub fn matvec_complex(&self, x: &ComplexVector) -> ComplexVector {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        let mut y = ComplexVector::zeros(self.n);
        match &self.storage {
            Storage::Dense(d) => {
                let mut k = 0;
                for i in 0..self.n {
                    for j in 0..=i {
                        let v = d[k];
                        y[i] += x[j].scale(v);
                        if i != j {
                            y[j] += x[i].scale(v);
                        }
                        k += 1;
                    }
                }
            }
            Storage::Sparse(e) => {
                for &(i, j, v) in e {
                    y[i] += x[j].scale(v);
                    if i != j {
                        y[j] += x[i].scale(v);
                    }
                }
            }
        }
        y
    }

    /// a * M, preserving the storage layout.
    pub fn scale(&self, a: f64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(d) => Storage::Dense(d.iter().map(|&v| a * v).collect()),
            Storage::Sparse(e) => Storage::Sparse(e.iter().map(|&(i, j, v)| (i, j, a * v)).collect()),
        };
        RealSymMatrix { n: self.n, storage }
    }

    /// M + a*I, preserving the storage layout.
    pub fn shift(&self, a: f64) -> Self {
        match &self.storage {
            Storage::Dense(d) => {
                let mut d = d.clone();
                for i in 0..self.n {
                    d[i * (i + 1) / 2 + i] += a;
                }
                RealSymMatrix {
                    n: self.n,
                    storage: Storage::Dense(d),
                }
            }
            Storage::Sparse(e) => {
                let mut entries = e.clone();
                entries.extend((0..self.n).map(|i| (i, i, a)));
                Self::from_coo(self.n, &entries).expect("shift preserves validity")
            }
        }
    }

    /// a*self + b*other. Sparse when both operands are sparse, dense otherwise.
    pub fn add_scaled(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        match (&self.storage, &other.storage) {
            (Storage::Sparse(e1), Storage::Sparse(e2)) => {
                let mut entries: Vec<(usize, usize, f64)> =
                    e1.iter().map(|&(i, j, v)| (i, j, a * v)).collect();
                entries.extend(e2.iter().map(|&(i, j, v)| (i, j, b * v)));
                Self::from_coo(self.n, &entries)
            }
            _ => Self::from_fn(self.n, |i, j| a * self.entry(i, j) + b * other.entry(i, j)),
        }
    }

    /// Entrywise equality of the represented matrices, independent of layout.
    pub fn value_eq(&self, other: &Self) -> bool {
        if self.n != other.n {
            return false;
        }
        for i in 0..self.n {
            for j in 0..=i {
                if self.entry(i, j) != other.entry(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Split a complex vector into (real, imaginary) parts.
pub fn split_parts(x: &ComplexVector) -> (DVector<f64>, DVector<f64>) {
    (x.map(|z| z.re), x.map(|z| z.im))
}

/// Assemble a complex vector from real and imaginary parts.
pub fn join_parts(re: &DVector<f64>, im: &DVector<f64>) -> ComplexVector {
    assert_eq!(re.len(), im.len());
    ComplexVector::from_fn(re.len(), |i, _| Complex64::new(re[i], im[i]))
}

/// Validate that every entry of a complex vector is finite.
pub fn check_vector_finite(x: &ComplexVector, what: &str) -> Result<()> {
    if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NotFinite(what.to_string()))
    }
}
