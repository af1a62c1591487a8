//! LU factorization of Hessenberg matrices (closed form via initial minors
//! and Doolittle elimination), the LU dynamics `A = LU -> UL`, Schur
//! complements, and the 3x3 Lusztig factorization of the unipotent factor.

use serde::{Deserialize, Serialize};

use crate::dense::{HessMatrix, Matrix};
use crate::error::{Error, Result};
use crate::matrices::{tau_init, MinorIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LuMethod {
    ClosedForm,
    Doolittle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuFactors {
    pub l: Matrix,
    pub u: Matrix,
    pub method: LuMethod,
}

impl LuFactors {
    pub fn product(&self) -> Matrix {
        &self.l * &self.u
    }
}

/// LU factors from ratios of initial minors:
/// `L_ij = tau_{{i} ∪ [j-1]} / tau_[j]`, `U_ii = tau_[i] / tau_[i-1]`,
/// `U_{i,i+1} = 1`.
///
/// The formulas hold for any lower-Hessenberg matrix with unit superdiagonal.
/// With `assume_tpht == false` that shape is checked first; with `true` the
/// caller vouches for it.
pub fn lu_closed_form(t: &HessMatrix, assume_tpht: bool) -> Result<LuFactors> {
    if !assume_tpht && !t.has_unit_superdiagonal() {
        return Err(Error::NotUnitHessenberg);
    }
    let n = t.n();
    let mut lead = Vec::with_capacity(n + 1);
    lead.push(1.0);
    for k in 1..=n {
        let tau = tau_init(t, &MinorIndex::leading(k))?;
        if tau == 0.0 {
            return Err(Error::ZeroLeadingMinor { k });
        }
        lead.push(tau);
    }

    let mut l = Matrix::identity(n);
    for j in 1..=n {
        for i in j + 1..=n {
            l[(i - 1, j - 1)] = tau_init(t, &MinorIndex::leading_plus(i, j))? / lead[j];
        }
    }
    let mut u = Matrix::zeros(n, n);
    for i in 1..=n {
        u[(i - 1, i - 1)] = lead[i] / lead[i - 1];
        if i < n {
            u[(i - 1, i)] = 1.0;
        }
    }
    Ok(LuFactors {
        l,
        u,
        method: LuMethod::ClosedForm,
    })
}

/// Unpivoted Doolittle elimination.
pub fn lu_doolittle(a: &Matrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut l = Matrix::identity(n);
    let mut u = Matrix::zeros(n, n);
    for k in 0..n {
        for j in k..n {
            let s: f64 = (0..k).map(|p| l[(k, p)] * u[(p, j)]).sum();
            u[(k, j)] = a[(k, j)] - s;
        }
        if u[(k, k)] == 0.0 {
            return Err(Error::ZeroPivot { k: k + 1 });
        }
        for i in k + 1..n {
            let s: f64 = (0..k).map(|p| l[(i, p)] * u[(p, k)]).sum();
            l[(i, k)] = (a[(i, k)] - s) / u[(k, k)];
        }
    }
    Ok(LuFactors {
        l,
        u,
        method: LuMethod::Doolittle,
    })
}

/// One step of the LU dynamics: factor `A = LU` and return `UL = U A U^{-1}`.
pub fn lu_dynamics_step(a: &HessMatrix) -> Result<HessMatrix> {
    let f = lu_doolittle(a)?;
    let mut next = &f.u * &f.l;
    // U is bidiagonal in exact arithmetic, so nothing above the superdiagonal
    // survives; clear rounding residue to keep the Hessenberg shape exact.
    let n = next.rows();
    for i in 0..n {
        for j in i + 2..n {
            next[(i, j)] = 0.0;
        }
    }
    Ok(HessMatrix::new_unchecked(next))
}

/// The trajectory `[A, A^(1), .., A^(steps)]`.
pub fn lu_dynamics_iterate(a: &HessMatrix, steps: usize) -> Result<Vec<HessMatrix>> {
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(a.clone());
    for _ in 0..steps {
        let next = lu_dynamics_step(traj.last().expect("non-empty"))?;
        traj.push(next);
    }
    Ok(traj)
}

/// `A22 - A21 A11^{-1} A12` for the block split after row/column `k`.
pub fn schur_complement(a: &Matrix, k: usize) -> Result<Matrix> {
    let n = a.rows();
    if !a.is_square() || k > n {
        return Err(Error::DimensionMismatch(format!(
            "split {k} of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let a22 = a.block(k, n, k, n);
    if k == 0 {
        return Ok(a22);
    }
    let a11 = a.block(0, k, 0, k);
    let a12 = a.block(0, k, k, n);
    let a21 = a.block(k, n, 0, k);
    let x = a11.solve(&a12).map_err(|_| Error::SingularBlock { k })?;
    Ok(&a22 - &(&a21 * &x))
}

/// `det((A - lambda I)[k+1..n, 1..n-k])` (1-based): the bottom-left chop of
/// the shifted matrix. Along the LU dynamics this polynomial in `lambda`
/// changes only by a constant factor, so its roots are invariants.
pub fn chop_determinant(a: &Matrix, k: usize, lambda: f64) -> f64 {
    let n = a.rows();
    let rows: Vec<usize> = (k..n).collect();
    let cols: Vec<usize> = (0..n - k).collect();
    let mut sub = a.select(&rows, &cols);
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            if i == j {
                sub[(r, c)] -= lambda;
            }
        }
    }
    sub.det()
}

/// `L = (I + alpha f1)(I + beta f2)(I + gamma f1)` with `f1 = E_21`,
/// `f2 = E_32`, together with the bidiagonal `U` of `T = L U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LusztigFactors3 {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub u: Matrix,
}

impl LusztigFactors3 {
    pub fn lower(&self) -> Matrix {
        let elem = |i: usize, j: usize, t: f64| {
            let mut m = Matrix::identity(3);
            m[(i, j)] = t;
            m
        };
        let a = elem(1, 0, self.alpha);
        let b = elem(2, 1, self.beta);
        let c = elem(1, 0, self.gamma);
        &(&a * &b) * &c
    }

    pub fn reconstruct(&self) -> Matrix {
        &self.lower() * &self.u
    }
}

/// Splits the unipotent factor of a 3x3 unit-superdiagonal Hessenberg
/// matrix into elementary bidiagonal factors with positive parameters.
pub fn lusztig_factor_3(t: &HessMatrix) -> Result<LusztigFactors3> {
    if t.n() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "Lusztig factorization is implemented for 3x3, got {}x{}",
            t.n(),
            t.n()
        )));
    }
    let f = lu_closed_form(t, false)?;
    let beta = f.l[(2, 1)];
    if beta <= 0.0 {
        return Err(Error::DegenerateFactorization(format!(
            "L32 = {beta} must be positive"
        )));
    }
    let gamma = f.l[(2, 0)] / beta;
    let alpha = f.l[(1, 0)] - gamma;
    if alpha <= 0.0 || gamma <= 0.0 {
        return Err(Error::DegenerateFactorization(format!(
            "parameters alpha = {alpha}, gamma = {gamma} must be positive"
        )));
    }
    Ok(LusztigFactors3 {
        alpha,
        beta,
        gamma,
        u: f.u,
    })
}
