//! Direct factorizations: SPD Cholesky, symmetric-indefinite LDL^T with
//! Bunch-Kaufman pivoting, and a complex LU for complex symmetric half-steps.
//!
//! Factorizations densify sparse inputs; the solvers in this crate factor
//! once per solve and reuse the factors every iteration, so desk-scale dense
//! factorization is never on the critical path.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::matrix::{join_parts, split_parts, ComplexVector, RealSymMatrix};

const SINGULAR_REL_TOL: f64 = 1e-14;

/// Cholesky factorization of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct SpdFactorization {
    n: usize,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

/// Factor `m = L L^T`. Fails with `NotPositiveDefinite` if a pivot is
/// non-positive; `what` names the matrix in the error.
pub fn spd_factorize(m: &RealSymMatrix, what: &str) -> Result<SpdFactorization> {
    let dense = m.to_dense_matrix();
    match nalgebra::Cholesky::new(dense) {
        Some(chol) => Ok(SpdFactorization { n: m.n(), chol }),
        None => Err(Error::NotPositiveDefinite(what.to_string())),
    }
}

impl SpdFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The lower-triangular factor.
    pub fn l(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `L L^T`, for reconstruction checks.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let l = self.chol.l();
        &l * l.transpose()
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }

    pub fn solve_complex(&self, rhs: &ComplexVector) -> ComplexVector {
        let (re, im) = split_parts(rhs);
        join_parts(&self.chol.solve(&re), &self.chol.solve(&im))
    }

    pub fn solve_matrix_complex(&self, rhs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = rhs.clone();
        for j in 0..rhs.ncols() {
            let col = self.solve_complex(&ComplexVector::from_column_slice(rhs.column(j).as_slice()));
            out.set_column(j, &col);
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
enum Pivot {
    One { d: f64 },
    Two { d11: f64, d21: f64, d22: f64 },
}

/// LDL^T factorization with Bunch-Kaufman 1x1/2x2 pivoting of a symmetric
/// (possibly indefinite) matrix: P A P^T = L D L^T.
#[derive(Debug, Clone)]
pub struct SymIndefFactorization {
    n: usize,
    /// Unit lower-triangular L in the strictly lower triangle; entries
    /// belonging to 2x2 D blocks are excluded (L there is zero).
    work: DMatrix<f64>,
    pivots: Vec<Pivot>,
    /// Block start index for each pivot, parallel to `pivots`.
    starts: Vec<usize>,
    /// perm[i] = original row at factored position i.
    perm: Vec<usize>,
    inertia: (usize, usize, usize),
}

/// Factor `m` as `P m P^T = L D L^T` with Bunch-Kaufman pivoting.
///
/// Fails with `SingularMatrix` when a pivot block (1x1 value or 2x2
/// determinant) falls below `1e-14 * scale` in the appropriate power of the
/// input magnitude `scale = max|entry|`.
pub fn sym_indef_factorize(m: &RealSymMatrix, what: &str) -> Result<SymIndefFactorization> {
    let n = m.n();
    let mut a = m.to_dense_matrix();
    let scale = m.max_abs();
    let tol1 = SINGULAR_REL_TOL * scale;
    let tol2 = (SINGULAR_REL_TOL * scale) * scale;
    let singular = || Err(Error::SingularMatrix(what.to_string()));

    // Bunch-Kaufman threshold constant.
    let alpha = (1.0 + 17.0f64.sqrt()) / 8.0;

    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<Pivot> = Vec::new();
    let mut starts: Vec<usize> = Vec::new();
    let mut n_plus = 0usize;
    let mut n_minus = 0usize;

    let mut k = 0usize;
    while k < n {
        let absakk = a[(k, k)].abs();
        let (imax, colmax) = if k + 1 < n {
            let mut im = k + 1;
            let mut cm = a[(k + 1, k)].abs();
            for i in k + 2..n {
                let v = a[(i, k)].abs();
                if v > cm {
                    cm = v;
                    im = i;
                }
            }
            (im, cm)
        } else {
            (k, 0.0)
        };

        if absakk.max(colmax) <= tol1 {
            // The whole pivot column vanishes; the matrix is singular.
            return singular();
        }

        let mut kstep = 1usize;
        let mut kp = k;
        if absakk < alpha * colmax {
            // Largest off-diagonal in row imax over the trailing block.
            let mut rowmax = 0.0f64;
            for i in k..n {
                if i != imax {
                    rowmax = rowmax.max(a[(imax, i)].abs());
                }
            }
            if absakk * rowmax >= alpha * colmax * colmax {
                // 1x1 pivot at k despite the small diagonal.
            } else if a[(imax, imax)].abs() >= alpha * rowmax {
                kp = imax; // 1x1 pivot after swapping imax into k
            } else {
                kp = imax; // 2x2 pivot with rows (k, imax)
                kstep = 2;
            }
        }

        let swap_to = if kstep == 2 { k + 1 } else { k };
        if kp != swap_to {
            a.swap_rows(swap_to, kp);
            a.swap_columns(swap_to, kp);
            perm.swap(swap_to, kp);
        }

        if kstep == 1 {
            let d = a[(k, k)];
            if d.abs() <= tol1 {
                return singular();
            }
            let w: Vec<f64> = (k + 1..n).map(|i| a[(i, k)]).collect();
            for (ii, i) in (k + 1..n).enumerate() {
                for (jj, j) in (k + 1..=i).enumerate() {
                    let upd = w[ii] * w[jj] / d;
                    a[(i, j)] -= upd;
                    if i != j {
                        a[(j, i)] = a[(i, j)];
                    }
                }
            }
            for (ii, i) in (k + 1..n).enumerate() {
                a[(i, k)] = w[ii] / d;
            }
            if d > 0.0 {
                n_plus += 1;
            } else {
                n_minus += 1;
            }
            starts.push(k);
            pivots.push(Pivot::One { d });
            k += 1;
        } else {
            let d11 = a[(k, k)];
            let d21 = a[(k + 1, k)];
            let d22 = a[(k + 1, k + 1)];
            let det = d11 * d22 - d21 * d21;
            if det.abs() <= tol2 {
                return singular();
            }
            let w1: Vec<f64> = (k + 2..n).map(|i| a[(i, k)]).collect();
            let w2: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            let l1: Vec<f64> = w1
                .iter()
                .zip(&w2)
                .map(|(&x, &y)| (d22 * x - d21 * y) / det)
                .collect();
            let l2: Vec<f64> = w1
                .iter()
                .zip(&w2)
                .map(|(&x, &y)| (-d21 * x + d11 * y) / det)
                .collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..=i).enumerate() {
                    let upd = l1[ii] * w1[jj] + l2[ii] * w2[jj];
                    a[(i, j)] -= upd;
                    if i != j {
                        a[(j, i)] = a[(i, j)];
                    }
                }
            }
            for (ii, i) in (k + 2..n).enumerate() {
                a[(i, k)] = l1[ii];
                a[(i, k + 1)] = l2[ii];
            }
            if det < 0.0 {
                n_plus += 1;
                n_minus += 1;
            } else if d11 + d22 > 0.0 {
                n_plus += 2;
            } else {
                n_minus += 2;
            }
            starts.push(k);
            pivots.push(Pivot::Two { d11, d21, d22 });
            k += 2;
        }
    }

    Ok(SymIndefFactorization {
        n,
        work: a,
        pivots,
        starts,
        perm,
        inertia: (n_plus, n_minus, 0),
    })
}

impl SymIndefFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Signs of the eigenvalues as (n_plus, n_minus, n_zero). A successful
    /// factorization always reports n_zero = 0; singular inputs fail instead.
    pub fn inertia(&self) -> (usize, usize, usize) {
        self.inertia
    }

    /// Product of the pivot-block determinants, i.e. det(A).
    pub fn det(&self) -> f64 {
        self.pivots.iter().fold(1.0, |acc, p| match *p {
            Pivot::One { d } => acc * d,
            Pivot::Two { d11, d21, d22 } => acc * (d11 * d22 - d21 * d21),
        })
    }

    /// The unit lower-triangular factor with 2x2-block structure applied.
    fn l_matrix(&self) -> DMatrix<f64> {
        let mut l = DMatrix::identity(self.n, self.n);
        for (&start, piv) in self.starts.iter().zip(&self.pivots) {
            let width = match piv {
                Pivot::One { .. } => 1,
                Pivot::Two { .. } => 2,
            };
            for c in start..start + width {
                for r in start + width..self.n {
                    l[(r, c)] = self.work[(r, c)];
                }
            }
        }
        l
    }

    /// Reassemble the original matrix from the factors (undoing the
    /// permutation), for reconstruction checks.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let l = self.l_matrix();
        let mut d = DMatrix::zeros(self.n, self.n);
        for (&start, piv) in self.starts.iter().zip(&self.pivots) {
            match *piv {
                Pivot::One { d: v } => d[(start, start)] = v,
                Pivot::Two { d11, d21, d22 } => {
                    d[(start, start)] = d11;
                    d[(start + 1, start)] = d21;
                    d[(start, start + 1)] = d21;
                    d[(start + 1, start + 1)] = d22;
                }
            }
        }
        let m = &l * d * l.transpose();
        let mut out = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(self.perm[i], self.perm[j])] = m[(i, j)];
            }
        }
        out
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        assert_eq!(rhs.len(), self.n, "solve dimension mismatch");
        let mut y = DVector::from_fn(self.n, |i, _| rhs[self.perm[i]]);

        // Forward substitution with unit L, block aware.
        for (&start, piv) in self.starts.iter().zip(&self.pivots) {
            let width = match piv {
                Pivot::One { .. } => 1,
                Pivot::Two { .. } => 2,
            };
            for c in start..start + width {
                let yc = y[c];
                for r in start + width..self.n {
                    y[r] -= self.work[(r, c)] * yc;
                }
            }
        }

        // Block-diagonal solve.
        for (&start, piv) in self.starts.iter().zip(&self.pivots) {
            match *piv {
                Pivot::One { d } => y[start] /= d,
                Pivot::Two { d11, d21, d22 } => {
                    let det = d11 * d22 - d21 * d21;
                    let y1 = y[start];
                    let y2 = y[start + 1];
                    y[start] = (d22 * y1 - d21 * y2) / det;
                    y[start + 1] = (-d21 * y1 + d11 * y2) / det;
                }
            }
        }

        // Backward substitution with L^T.
        for (&start, piv) in self.starts.iter().zip(&self.pivots).rev() {
            let width = match piv {
                Pivot::One { .. } => 1,
                Pivot::Two { .. } => 2,
            };
            for c in (start..start + width).rev() {
                let mut acc = y[c];
                for r in start + width..self.n {
                    acc -= self.work[(r, c)] * y[r];
                }
                y[c] = acc;
            }
        }

        let mut x = DVector::zeros(self.n);
        for i in 0..self.n {
            x[self.perm[i]] = y[i];
        }
        x
    }

    pub fn solve_complex(&self, rhs: &ComplexVector) -> ComplexVector {
        let (re, im) = split_parts(rhs);
        join_parts(&self.solve(&re), &self.solve(&im))
    }

    pub fn solve_matrix_complex(&self, rhs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = rhs.clone();
        for j in 0..rhs.ncols() {
            let col = self.solve_complex(&ComplexVector::from_column_slice(rhs.column(j).as_slice()));
            out.set_column(j, &col);
        }
        out
    }
}

/// LU factorization of a dense complex matrix, used for the complex
/// symmetric half-steps (alpha*I + i*T) and for oracle solves.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    n: usize,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

pub fn complex_lu(m: DMatrix<Complex64>, what: &str) -> Result<ComplexLu> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let lu = m.lu();
    // A zero pivot means the matrix is singular to working precision.
    let diag_ok = (0..n).all(|i| lu.u()[(i, i)].norm() > 0.0);
    if !diag_ok {
        return Err(Error::SingularMatrix(what.to_string()));
    }
    Ok(ComplexLu { n, lu })
}

impl ComplexLu {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &ComplexVector) -> Result<ComplexVector> {
        self.lu
            .solve(rhs)
            .ok_or_else(|| Error::SingularMatrix("complex LU solve".to_string()))
    }

    pub fn solve_matrix(&self, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        self.lu
            .solve(rhs)
            .ok_or_else(|| Error::SingularMatrix("complex LU solve".to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> RealSymMatrix {
        RealSymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
    }

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> RealSymMatrix {
        let m = random_sym(n, rng);
        // diagonally dominant shift makes it SPD
        m.shift(n as f64)
    }

    #[test]
    fn spd_identity_factor_is_identity() {
        let m = RealSymMatrix::identity(3);
        let f = spd_factorize(&m, "I").unwrap();
        assert!((f.l() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-15);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(f.solve(&b), b);
    }

    #[test]
    fn spd_diagonal_factor() {
        let m = RealSymMatrix::from_diagonal(&[1.0, 2.0]);
        let f = spd_factorize(&m, "diag").unwrap();
        let l = f.l();
        assert!((l[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((l[(1, 1)] - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spd_two_by_two_solve() {
        let m = RealSymMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 }).unwrap();
        let f = spd_factorize(&m, "m").unwrap();
        let x = f.solve(&DVector::from_vec(vec![1.0, 1.0]));
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((x[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn spd_rejects_indefinite() {
        let m = RealSymMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            spd_factorize(&m, "T"),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn ldlt_diagonal_inertia_and_solve() {
        let m = RealSymMatrix::from_diagonal(&[1.0, -1.0]);
        let f = sym_indef_factorize(&m, "T").unwrap();
        assert_eq!(f.inertia(), (1, 1, 0));
        let x = f.solve(&DVector::from_vec(vec![2.0, 2.0]));
        assert!((x[0] - 2.0).abs() < 1e-15);
        assert!((x[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn ldlt_zero_pivot_is_singular() {
        let m = RealSymMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            sym_indef_factorize(&m, "T"),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn ldlt_exchange_matrix_uses_two_by_two_pivot() {
        let m = RealSymMatrix::from_coo(2, &[(1, 0, 1.0)]).unwrap();
        let f = sym_indef_factorize(&m, "X").unwrap();
        assert_eq!(f.inertia(), (1, 1, 0));
        assert_eq!(f.pivots.len(), 1);
        assert!(matches!(f.pivots[0], Pivot::Two { .. }));
        let x = f.solve(&DVector::from_vec(vec![1.0, 0.0]));
        assert!((x[0] - 0.0).abs() < 1e-15);
        assert!((x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ldlt_reconstructs_and_matches_eigen_inertia() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [2usize, 3, 5, 8, 13, 21] {
            let m = random_sym(n, &mut rng);
            let f = sym_indef_factorize(&m, "rand").unwrap();
            let rec = f.reconstruct();
            let orig = m.to_dense_matrix();
            let err = (&rec - &orig).norm() / orig.norm();
            assert!(err < 1e-12, "reconstruction error {err} at n={n}");

            let eig = orig.clone().symmetric_eigen();
            let plus = eig.eigenvalues.iter().filter(|&&v| v > 0.0).count();
            let minus = eig.eigenvalues.iter().filter(|&&v| v < 0.0).count();
            assert_eq!(f.inertia(), (plus, minus, 0), "inertia mismatch at n={n}");

            let det_eig: f64 = eig.eigenvalues.iter().product();
            assert!(
                (f.det() - det_eig).abs() <= 1e-7 * det_eig.abs().max(1e-30),
                "det mismatch {} vs {}",
                f.det(),
                det_eig
            );
        }
    }

    #[test]
    fn ldlt_solve_residual_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..30);
            let m = random_sym(n, &mut rng);
            let f = match sym_indef_factorize(&m, "rand") {
                Ok(f) => f,
                Err(_) => continue, // singular draw
            };
            let b = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let x = f.solve(&b);
            let r = (&m.matvec(&x) - &b).norm();
            assert!(r <= 1e-10 * b.norm().max(1e-30), "residual {r} at n={n}");
        }
    }

    #[test]
    fn spd_solve_compose_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(1..25);
            let m = random_spd(n, &mut rng);
            let f = spd_factorize(&m, "spd").unwrap();
            let r = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let err = (&m.matvec(&f.solve(&r)) - &r).norm();
            assert!(err <= 1e-10 * r.norm().max(1e-30));
        }
    }

    #[test]
    fn complex_lu_solves() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 2.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(3.0, -1.0),
            ],
        );
        let f = complex_lu(a.clone(), "A").unwrap();
        let b = ComplexVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        let x = f.solve(&b).unwrap();
        assert!((&a * &x - &b).norm() < 1e-14);
    }

    #[test]
    fn complex_lu_detects_singular() {
        let a = DMatrix::from_element(2, 2, Complex64::new(1.0, 1.0));
        assert!(matches!(
            complex_lu(a, "A"),
            Err(Error::SingularMatrix(_))
        ));
    }
}
