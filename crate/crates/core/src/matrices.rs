//! Construction of Hessenberg-Toeplitz, companion and bidiagonal matrices,
//! initial-column minors, and total-positivity certification.

use serde::{Deserialize, Serialize};

use crate::dense::{HessMatrix, Matrix};
use crate::error::{Error, Result};
use crate::symbols::Symbol;

/// A minor counts as negative only below `-TP_TOLERANCE * max(1, H)`, where
/// `H` is the Hadamard bound (product of row norms) of the submatrix; this
/// keeps structurally zero minors of large-entry matrices from tripping the
/// test through rounding. Neville pivots use `max(1, max |a_ij|)` instead.
pub const TP_TOLERANCE: f64 = 1e-10;

/// Largest dimension accepted by the exhaustive minor enumeration.
pub const EXHAUSTIVE_MAX_N: usize = 10;

/// Lower-Hessenberg Toeplitz matrix with `(i, j)` entry `coeffs[i - j + 1]`
/// (zero outside the coefficient range). `coeffs[0]` fills the superdiagonal.
pub fn hessenberg_toeplitz(coeffs: &[f64], n: usize) -> HessMatrix {
    let m = Matrix::from_fn(n, n, |i, j| {
        let d = i as isize - j as isize + 1;
        if d >= 0 {
            coeffs.get(d as usize).copied().unwrap_or(0.0)
        } else {
            0.0
        }
    });
    HessMatrix::new_unchecked(m)
}

/// The `n x n` truncation of the Toeplitz operator with symbol `s`.
pub fn tpht_truncation(s: &Symbol, n: usize) -> HessMatrix {
    hessenberg_toeplitz(s.coeffs(), n)
}

/// Companion matrix of `x^n + c_{n-1} x^{n-1} + .. + c_0`: unit superdiagonal
/// and last row `(-c_0, .., -c_{n-1})`.
pub fn companion_matrix(char_coeffs: &[f64]) -> HessMatrix {
    let n = char_coeffs.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = 1.0;
    }
    for (j, c) in char_coeffs.iter().enumerate() {
        m[(n - 1, j)] = -c;
    }
    HessMatrix::new_unchecked(m)
}

/// `diag(lambda) + epsilon`: upper bidiagonal with unit superdiagonal.
pub fn epsilon_lambda(lambda: &[f64]) -> HessMatrix {
    let n = lambda.len();
    let mut m = Matrix::diagonal(lambda);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = 1.0;
    }
    HessMatrix::new_unchecked(m)
}

/// Sorted set of 1-based row indices selecting an initial-column minor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinorIndex(Vec<usize>);

impl MinorIndex {
    /// Sorts and deduplicates; index 0 is rejected since rows are 1-based.
    pub fn new(mut rows: Vec<usize>) -> Result<Self> {
        rows.sort_unstable();
        rows.dedup();
        if rows.first() == Some(&0) {
            return Err(Error::InvalidParameter(
                "minor indices are 1-based".to_string(),
            ));
        }
        Ok(Self(rows))
    }

    /// `[k] = {1, .., k}`.
    pub fn leading(k: usize) -> Self {
        Self((1..=k).collect())
    }

    /// `{i} ∪ [j - 1]`.
    pub fn leading_plus(i: usize, j: usize) -> Self {
        let mut rows: Vec<usize> = (1..j).collect();
        if !rows.contains(&i) {
            rows.push(i);
            rows.sort_unstable();
        }
        Self(rows)
    }

    pub fn rows(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Determinant of rows `S` against the first `|S|` columns; 1 for empty `S`.
pub fn tau_init(a: &Matrix, s: &MinorIndex) -> Result<f64> {
    if s.is_empty() {
        return Ok(1.0);
    }
    let max = *s.rows().last().expect("non-empty");
    if max > a.rows() || s.len() > a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "minor rows up to {max} with {} columns on a {}x{} matrix",
            s.len(),
            a.rows(),
            a.cols()
        )));
    }
    let rows: Vec<usize> = s.rows().iter().map(|r| r - 1).collect();
    let cols: Vec<usize> = (0..s.len()).collect();
    Ok(a.select(&rows, &cols).det())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TpMode {
    /// Every minor is evaluated; exact up to [`TP_TOLERANCE`].
    Exhaustive,
    /// Complete Neville elimination; a sufficient certificate.
    Neville,
}

/// A negative minor: 1-based row and column sets and the minor's value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpReport {
    pub is_tp: bool,
    pub method: TpMode,
    /// Present iff `!is_tp` and `method == Exhaustive`.
    pub witness: Option<MinorWitness>,
}

/// Total-positivity check (all minors non-negative).
///
/// Exhaustive mode enumerates every pair of equal-size row and column sets,
/// ordered by size and then lexicographically, and reports the first minor
/// below the scaled cutoff described at [`TP_TOLERANCE`]. It refuses matrices larger than
/// [`EXHAUSTIVE_MAX_N`].
///
/// Neville mode runs complete Neville elimination on `A` and on the transpose
/// of the resulting upper factor. For a nonsingular matrix a clean run (no
/// row exchange needed, all pivots and multipliers non-negative up to the
/// scaled cutoff) is
/// equivalent to total positivity. Singular TP matrices can fail the
/// certificate, so `is_tp == false` in this mode is not a proof.
pub fn is_totally_positive(a: &Matrix, mode: TpMode) -> Result<TpReport> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    match mode {
        TpMode::Exhaustive => {
            let n = a.rows();
            if n > EXHAUSTIVE_MAX_N {
                return Err(Error::DimensionGuard {
                    n,
                    max: EXHAUSTIVE_MAX_N,
                });
            }
            let witness = first_negative_minor(a);
            Ok(TpReport {
                is_tp: witness.is_none(),
                method: mode,
                witness,
            })
        }
        TpMode::Neville => Ok(TpReport {
            is_tp: neville_certificate(a),
            method: mode,
            witness: None,
        }),
    }
}

fn first_negative_minor(a: &Matrix) -> Option<MinorWitness> {
    let n = a.rows();
    for k in 1..=n {
        let subsets = k_subsets(n, k);
        for rows in &subsets {
            for cols in &subsets {
                let sub = a.select(rows, cols);
                let v = sub.det();
                if v < -TP_TOLERANCE * hadamard_bound(&sub).max(1.0) {
                    return Some(MinorWitness {
                        rows: rows.iter().map(|r| r + 1).collect(),
                        cols: cols.iter().map(|c| c + 1).collect(),
                        value: v,
                    });
                }
            }
        }
    }
    None
}

fn hadamard_bound(a: &Matrix) -> f64 {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(|x| x * x).sum::<f64>().sqrt())
        .product()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn neville_certificate(a: &Matrix) -> bool {
    let Some(upper) = neville_pass(a) else {
        return false;
    };
    neville_pass(&upper.transpose()).is_some()
}

/// One Neville sweep: zeroes the subdiagonal column by column, each row
/// reduced by the row directly above it, bottom to top. Returns `None` when a
/// negative pivot appears or when a zero pivot sits above a non-zero entry
/// (which would require a row exchange). Entries within the cutoff of zero
/// are treated as zero.
fn neville_pass(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    let tol = TP_TOLERANCE * a.max_abs().max(1.0);
    let mut w = a.clone();
    for j in 0..n {
        if (j..n).any(|i| w[(i, j)] < -tol) {
            return None;
        }
        for i in (j + 1..n).rev() {
            let v = w[(i, j)];
            if v.abs() <= tol {
                w[(i, j)] = 0.0;
                continue;
            }
            let pivot = w[(i - 1, j)];
            if pivot.abs() <= tol {
                return None;
            }
            // both positive here, so the multiplier is positive
            let mult = v / pivot;
            for c in j..n {
                let above = w[(i - 1, c)];
                w[(i, c)] -= mult * above;
            }
            w[(i, j)] = 0.0;
        }
    }
    Some(w)
}

/// Induced 1-norm (maximum column sum) of the `n x n` truncation of `s`,
/// computed from the coefficients without forming the matrix.
pub fn one_norm_bound(s: &Symbol, n: usize) -> f64 {
    let x = s.coeffs();
    (0..n)
        .map(|j| {
            let above = if j >= 1 { x[0].abs() } else { 0.0 };
            let below: f64 = x.iter().skip(1).take(n - j).map(|v| v.abs()).sum();
            above + below
        })
        .fold(0.0, f64::max)
}

/// Monic characteristic polynomials `det(x I_k - A_k)` of every leading
/// block `A_k` (`k = 0..=n`) of a lower-Hessenberg matrix, as ascending
/// coefficient vectors. Uses the Hessenberg expansion along the last row.
pub fn leading_characteristic_polynomials(a: &HessMatrix) -> Vec<Vec<f64>> {
    let n = a.n();
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    polys.push(vec![1.0]);
    for k in 1..=n {
        let r = k - 1;
        // (x - a_rr) p_{k-1}
        let prev = &polys[k - 1];
        let mut p = vec![0.0; k + 1];
        for (d, &c) in prev.iter().enumerate() {
            p[d + 1] += c;
            p[d] -= a[(r, r)] * c;
        }
        // - sum_{i<k} a_{k,i} (prod_{j=i}^{k-1} a_{j,j+1}) p_{i-1}   (1-based)
        let mut chain = 1.0;
        for i in (1..k).rev() {
            chain *= a[(i - 1, i)];
            if chain == 0.0 {
                break;
            }
            let w = a[(r, i - 1)] * chain;
            if w == 0.0 {
                continue;
            }
            for (d, &c) in polys[i - 1].iter().enumerate() {
                p[d] -= w * c;
            }
        }
        polys.push(p);
    }
    polys
}

/// Monic characteristic polynomial of a lower-Hessenberg matrix (ascending).
pub fn characteristic_polynomial(a: &HessMatrix) -> Vec<f64> {
    leading_characteristic_polynomials(a)
        .pop()
        .expect("at least the empty polynomial")
}
