//! Normal forms of unit-superdiagonal Hessenberg matrices under lower
//! unipotent conjugation: the companion form `c_X`, the bidiagonal form
//! `epsilon_Lambda = diag(Lambda) + epsilon`, and the resulting LU-factored
//! eigenvector matrix.
//!
//! Every routine checks its defining identity before returning.

use serde::{Deserialize, Serialize};

use crate::dense::{HessMatrix, Matrix};
use crate::error::{Error, Result};
use crate::matrices::{
    characteristic_polynomial, companion_matrix, epsilon_lambda,
    leading_characteristic_polynomials,
};
use crate::symbols::elementary_symmetric;

/// Tolerance on the scaled residual of the conjugation identities.
pub const CONJUGATION_TOL: f64 = 1e-8;
/// Tolerance on the scaled residual of the eigenvector identity.
pub const EIGEN_TOL: f64 = 1e-7;
/// Relative tolerance when matching supplied eigenvalues to the spectrum.
pub const SPECTRUM_TOL: f64 = 1e-6;

/// `||A B - C D|| / (||A|| ||B|| + ||C|| ||D||)` in the Frobenius norm.
fn scaled_residual(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> f64 {
    let diff = &(a * b) - &(c * d);
    let scale = a.frobenius_norm() * b.frobenius_norm() + c.frobenius_norm() * d.frobenius_norm();
    if scale == 0.0 {
        diff.frobenius_norm()
    } else {
        diff.frobenius_norm() / scale
    }
}

fn verify(what: &'static str, residual: f64, tolerance: f64) -> Result<()> {
    if residual <= tolerance {
        Ok(())
    } else {
        Err(Error::VerificationFailed {
            what,
            residual,
            tolerance,
        })
    }
}

/// The unique lower-unipotent `L1` with `L1^{-1} X L1 = c_X`. Row `k + 1`
/// carries the (ascending) characteristic coefficients of the leading
/// `k x k` block of `X`.
pub fn to_companion_l(x: &HessMatrix) -> Result<Matrix> {
    if !x.has_unit_superdiagonal() {
        return Err(Error::NotUnitHessenberg);
    }
    let n = x.n();
    let polys = leading_characteristic_polynomials(x);
    let mut l1 = Matrix::identity(n);
    for (k, p) in polys.iter().enumerate().take(n) {
        for (j, &c) in p.iter().enumerate() {
            l1[(k, j)] = c;
        }
    }
    let charp = &polys[n];
    let c = companion_matrix(&charp[..n]);
    verify(
        "companion conjugation",
        scaled_residual(x, &l1, &l1, &c),
        CONJUGATION_TOL,
    )?;
    Ok(l1)
}

/// Lower-unipotent `L2` with `L2^{-1} epsilon_Lambda L2 = c_Lambda`:
/// `(L2)_ij = (-1)^{i+j} e_{i-j}(lambda_1, .., lambda_{i-1})` for `i > j`
/// (1-based).
pub fn companion_to_epsilon_l(lambda: &[f64]) -> Result<Matrix> {
    let n = lambda.len();
    let mut l2 = Matrix::identity(n);
    for i in 1..n {
        // 0-based row i uses lambda_1 .. lambda_i (1-based)
        let e = elementary_symmetric(&lambda[..i]);
        for j in 0..i {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            l2[(i, j)] = sign * e[i - j];
        }
    }
    let eps = epsilon_lambda(lambda);
    let charp = elementary_symmetric_char(lambda);
    let c = companion_matrix(&charp[..n]);
    verify(
        "bidiagonal conjugation",
        scaled_residual(&eps, &l2, &l2, &c),
        CONJUGATION_TOL,
    )?;
    Ok(l2)
}

/// Ascending coefficients of `prod_k (x - lambda_k)`.
fn elementary_symmetric_char(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let e = elementary_symmetric(lambda);
    (0..=n)
        .map(|j| {
            let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * e[n - j]
        })
        .collect()
}

/// Upper-triangular `U` with `epsilon_Lambda U = U diag(Lambda)`:
/// `u_ij = prod_{k<i} (lambda_j - lambda_k)`.
pub fn epsilon_diagonalizer(lambda: &[f64]) -> Result<Matrix> {
    let n = lambda.len();
    let scale = lambda.iter().map(|x| x.abs()).fold(0.0, f64::max);
    for i in 0..n {
        for j in i + 1..n {
            if (lambda[i] - lambda[j]).abs() <= 1e-10 * scale {
                return Err(Error::RepeatedEigenvalue { i: i + 1, j: j + 1 });
            }
        }
    }
    let u = Matrix::from_fn(n, n, |i, j| {
        if i > j {
            0.0
        } else {
            (0..i).map(|k| lambda[j] - lambda[k]).product()
        }
    });
    let eps = epsilon_lambda(lambda);
    let d = Matrix::diagonal(lambda);
    verify(
        "bidiagonal diagonalization",
        scaled_residual(&eps, &u, &u, &d),
        CONJUGATION_TOL,
    )?;
    Ok(u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormBundle {
    pub l1: Matrix,
    pub l2: Matrix,
    /// `L = L2 L1^{-1}`, so that `X = L^{-1} epsilon_Lambda L`.
    pub l: Matrix,
    pub l_inv: Matrix,
    pub u: Matrix,
    pub lambda: Vec<f64>,
}

impl NormalFormBundle {
    /// `L^{-1} U`: column `k` is an eigenvector for `lambda[k]`.
    pub fn eigenvectors(&self) -> Matrix {
        &self.l_inv * &self.u
    }
}

/// The eigenvector matrix of `X` in factored form `L^{-1} U`, for the
/// eigenvalue ordering `lambda`.
pub fn eigenfunction_factorized(x: &HessMatrix, lambda: &[f64]) -> Result<NormalFormBundle> {
    let n = x.n();
    if lambda.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} eigenvalues for a {n}x{n} matrix",
            lambda.len()
        )));
    }
    if !x.has_unit_superdiagonal() {
        return Err(Error::NotUnitHessenberg);
    }
    let have = characteristic_polynomial(x);
    let want = elementary_symmetric_char(lambda);
    let size = want.iter().map(|c| c.abs()).fold(1.0, f64::max);
    let mismatch = have
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / size;
    if mismatch > SPECTRUM_TOL {
        return Err(Error::SpectrumMismatch { mismatch });
    }

    let l1 = to_companion_l(x)?;
    let l2 = companion_to_epsilon_l(lambda)?;
    let u = epsilon_diagonalizer(lambda)?;
    let l1_inv = unipotent_inverse(&l1);
    let l = &l2 * &l1_inv;
    let l_inv = unipotent_inverse(&l);
    let v = &l_inv * &u;
    let d = Matrix::diagonal(lambda);
    verify("eigenvector identity", scaled_residual(x, &v, &v, &d), EIGEN_TOL)?;
    Ok(NormalFormBundle {
        l1,
        l2,
        l,
        l_inv,
        u,
        lambda: lambda.to_vec(),
    })
}

/// Inverse of a unit lower-triangular matrix by forward substitution.
fn unipotent_inverse(l: &Matrix) -> Matrix {
    let n = l.rows();
    let mut inv = Matrix::identity(n);
    for j in 0..n {
        for i in j + 1..n {
            let s: f64 = (j..i).map(|k| l[(i, k)] * inv[(k, j)]).sum();
            inv[(i, j)] = -s;
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2() -> HessMatrix {
        HessMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap()
    }

    #[test]
    fn companion_l_examples() {
        let l1 = to_companion_l(&x2()).unwrap();
        assert_eq!(l1.to_rows(), vec![vec![1.0, 0.0], vec![-2.0, 1.0]]);
        let conj = &(&unipotent_inverse(&l1) * &x2()) * &l1;
        assert_eq!(conj.to_rows(), vec![vec![0.0, 1.0], vec![-3.0, 4.0]]);

        let c = companion_matrix(&[1.0, -2.0, 0.5, 3.0]);
        assert_eq!(to_companion_l(&c).unwrap(), Matrix::identity(4));
        let one = HessMatrix::from_rows(&[[7.0]]).unwrap();
        assert_eq!(to_companion_l(&one).unwrap(), Matrix::identity(1));
    }

    #[test]
    fn epsilon_l_examples() {
        let l2 = companion_to_epsilon_l(&[1.0, 2.0]).unwrap();
        assert_eq!(l2.to_rows(), vec![vec![1.0, 0.0], vec![-1.0, 1.0]]);
        let eps = epsilon_lambda(&[1.0, 2.0]);
        let conj = &(&unipotent_inverse(&l2) * &eps) * &l2;
        assert_eq!(conj.to_rows(), vec![vec![0.0, 1.0], vec![-2.0, 3.0]]);
        assert_eq!(companion_to_epsilon_l(&[3.0, 1.0]).unwrap()[(1, 0)], -3.0);
        assert_eq!(companion_to_epsilon_l(&[4.0]).unwrap(), Matrix::identity(1));
    }

    #[test]
    fn diagonalizer_examples() {
        assert_eq!(
            epsilon_diagonalizer(&[1.0, 2.0]).unwrap().to_rows(),
            vec![vec![1.0, 1.0], vec![0.0, 1.0]]
        );
        assert_eq!(
            epsilon_diagonalizer(&[3.0, 1.0]).unwrap().to_rows(),
            vec![vec![1.0, 1.0], vec![0.0, -2.0]]
        );
        assert_eq!(
            epsilon_diagonalizer(&[2.0, 2.0]),
            Err(Error::RepeatedEigenvalue { i: 1, j: 2 })
        );
    }

    #[test]
    fn eigenfunction_two_by_two() {
        let b = eigenfunction_factorized(&x2(), &[3.0, 1.0]).unwrap();
        assert_eq!(b.l1.to_rows(), vec![vec![1.0, 0.0], vec![-2.0, 1.0]]);
        assert_eq!(b.l2.to_rows(), vec![vec![1.0, 0.0], vec![-3.0, 1.0]]);
        assert_eq!(b.l.to_rows(), vec![vec![1.0, 0.0], vec![-1.0, 1.0]]);
        assert_eq!(b.u.to_rows(), vec![vec![1.0, 1.0], vec![0.0, -2.0]]);
        assert_eq!(b.eigenvectors().to_rows(), vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
    }

    #[test]
    fn eigenfunction_of_epsilon_is_u() {
        let lambda = [4.0, 2.5, -1.0];
        let b = eigenfunction_factorized(&epsilon_lambda(&lambda), &lambda).unwrap();
        assert!(b.l.max_abs_diff(&Matrix::identity(3)) < 1e-14);
        assert!(b.eigenvectors().max_abs_diff(&b.u) < 1e-14);
    }

    #[test]
    fn mismatched_spectrum() {
        assert!(matches!(
            eigenfunction_factorized(&x2(), &[3.0, 1.5]),
            Err(Error::SpectrumMismatch { .. })
        ));
    }
}
