//! Spectra of Hessenberg matrices: eigenvalues and eigenvectors, empirical
//! spectral distribution statistics, and eigenvector oscillation.

mod moments;
mod oscillation;
mod qr;
mod vectors;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::Matrix;
use crate::error::{Error, Result};

pub use moments::{
    esd_exp_average, esd_moment, esd_moments, truncation_exp_average, truncation_moments,
};
pub use oscillation::{
    check_oscillation, nodes_interlace, piecewise_nodes, sign_variations, OscillationReport,
    INTERLACING_TOL, ZERO_CUTOFF,
};
pub use qr::DEFLATION_TOL;

/// Imaginary parts up to this multiple of `||A||_1` are treated as rounding
/// noise when the spectrum is asserted real.
pub const REAL_SPECTRUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Column `k` pairs with `eigenvalues[k]`; unit norm, last non-zero
    /// entry positive.
    pub eigenvectors: Option<Matrix>,
    /// Largest imaginary part dropped when the spectrum was made real.
    pub max_imag: f64,
    /// `max_k ||A v_k - lambda_k v_k|| / ||v_k||`; zero without eigenvectors.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenOptions {
    pub want_vectors: bool,
    /// Declare the spectrum real (as for TP input) and fail with
    /// `ComplexSpectrum` if it is not.
    pub assert_real: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            want_vectors: false,
            assert_real: true,
        }
    }
}

/// Eigen-decomposition of a lower-Hessenberg matrix whose spectrum is real
/// (e.g. a TP matrix). See [`eigen_hessenberg_with`].
pub fn eigen_hessenberg(a: &Matrix, want_vectors: bool) -> Result<SpectrumResult> {
    eigen_hessenberg_with(
        a,
        EigenOptions {
            want_vectors,
            assert_real: true,
        },
    )
}

/// Eigenvalues by Francis double-shift QR on the transpose (which is upper
/// Hessenberg, so no reduction phase is needed), or by symmetric QL when the
/// input is a tridiagonal matrix similar to a symmetric one. Eigenvectors come
/// from inverse iteration on the original matrix.
///
/// Without `assert_real` the real parts are reported and `max_imag` records
/// what was dropped; eigenvectors always require a real spectrum.
pub fn eigen_hessenberg_with(a: &Matrix, opts: EigenOptions) -> Result<SpectrumResult> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_lower_hessenberg() {
        return Err(Error::NotHessenberg);
    }
    let ev = hessenberg_eigenvalues(a)?;
    let max_imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let tolerance = REAL_SPECTRUM_TOL * a.one_norm().max(f64::MIN_POSITIVE);
    if (opts.assert_real || opts.want_vectors) && max_imag > tolerance {
        return Err(Error::ComplexSpectrum {
            max_imag,
            tolerance,
        });
    }
    let mut eigenvalues: Vec<f64> = ev.iter().map(|z| z.re).collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));

    let mut eigenvectors = None;
    let mut residual = 0.0;
    if opts.want_vectors {
        let n = a.rows();
        let mut vecs = Matrix::zeros(n, n);
        for (k, &lambda) in eigenvalues.iter().enumerate() {
            let (v, r) = vectors::inverse_iteration(a, lambda);
            residual = f64::max(residual, r);
            for (i, x) in v.into_iter().enumerate() {
                vecs[(i, k)] = x;
            }
        }
        eigenvectors = Some(vecs);
    }
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        max_imag,
        residual,
    })
}

/// All eigenvalues of a lower-Hessenberg matrix, complex pairs included, in
/// no particular order.
pub fn hessenberg_eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_lower_hessenberg() {
        return Err(Error::NotHessenberg);
    }
    if let Some((d, e)) = symmetrizable_tridiagonal(a) {
        let ev = qr::tql(d, &e)?;
        return Ok(ev.into_iter().map(|x| Complex64::new(x, 0.0)).collect());
    }
    francis_eigenvalues(a)
}

fn francis_eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    let mut w = qr::Work::new(a.rows(), a.transpose().as_slice().to_vec());
    qr::balance(&mut w);
    qr::hqr(&mut w)
}

/// Diagonal and symmetrized off-diagonal when `a` is tridiagonal with
/// non-negative products of opposite off-diagonal entries (then `a` is
/// similar to the symmetric tridiagonal matrix built from them).
fn symmetrizable_tridiagonal(a: &Matrix) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = a.rows();
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            if a[(i, j)] != 0.0 {
                return None;
            }
        }
    }
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let prod = a[(i, i + 1)] * a[(i + 1, i)];
        if prod < 0.0 {
            return None;
        }
        e.push(prod.sqrt());
    }
    Some((a.diag(), e))
}

/// `(1/n) sum_k f(lambda_k)` over the computed (possibly complex)
/// eigenvalues; the real part is returned.
///
/// Averaging over the complex eigenvalues keeps the result stable for
/// non-normal input, where rounding moves eigenvalues off the real axis in
/// conjugate pairs.
pub fn esd_average<F>(a: &Matrix, f: F) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    let ev = hessenberg_eigenvalues(a)?;
    if ev.is_empty() {
        return Ok(0.0);
    }
    let s: Complex64 = ev.iter().map(|&z| f(z)).sum();
    Ok(s.re / ev.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Uniform-width histogram of real values over `[min, max]`; the last bin is
/// closed. A degenerate range is widened to unit width around the value.
pub fn histogram(values: &[f64], bins: usize) -> Histogram {
    let bins = bins.max(1);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if values.is_empty() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    };
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins).map(|k| lo + width * k as f64).collect();
    let mut counts = vec![0; bins];
    for &v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Histogram { edges, counts }
}

/// Histogram of the real parts of the eigenvalues of `a`.
pub fn esd_histogram(a: &Matrix, bins: usize) -> Result<Histogram> {
    let ev: Vec<f64> = hessenberg_eigenvalues(a)?.iter().map(|z| z.re).collect();
    Ok(histogram(&ev, bins))
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `values` and a continuous CDF.
pub fn ks_against_cdf<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            f64::max((i + 1) as f64 / n - f, f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{epsilon_lambda, tpht_truncation};
    use crate::symbols::Symbol;
    use std::f64::consts::PI;

    #[test]
    fn all_ones_five() {
        let t = tpht_truncation(&Symbol::ones(5), 5);
        let s = eigen_hessenberg(&t, true).unwrap();
        let paper = [11.0024, 7.9317, 4.3187, 1.5285, 0.2187];
        for (x, y) in s.eigenvalues.iter().zip(paper) {
            assert!((x - y).abs() < 5e-4, "{:?}", s.eigenvalues);
        }
        assert!(s.residual < 1e-10);
        let r = check_oscillation(&s).unwrap();
        assert_eq!(r.sign_variations, vec![0, 1, 2, 3, 4]);
        assert!(r.passed());
    }

    #[test]
    fn tridiagonal_closed_form() {
        // symmetric path, n = 50, against 2 + 2 cos(k pi / (n + 1))
        let n = 50;
        let t = tpht_truncation(&Symbol::ones(2), n);
        let s = eigen_hessenberg(&t, false).unwrap();
        for (k, x) in s.eigenvalues.iter().enumerate() {
            let exact = 2.0 + 2.0 * ((k + 1) as f64 * PI / (n as f64 + 1.0)).cos();
            assert!((x - exact).abs() < 1e-9);
        }
        // the general QR path on the same matrices
        let general = francis_eigenvalues(&t).unwrap();
        let mut re: Vec<f64> = general.iter().map(|z| z.re).collect();
        re.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in re.iter().zip(&s.eigenvalues) {
            assert!((x - y).abs() < 1e-9);
        }
        // characteristic-polynomial root oracle at n = 5
        let t5 = tpht_truncation(&Symbol::ones(2), 5);
        let p = crate::matrices::characteristic_polynomial(&t5);
        for z in francis_eigenvalues(&t5).unwrap() {
            let v = p.iter().rev().fold(0.0, |acc, c| acc * z.re + c);
            assert!(v.abs() < 1e-10 && z.im == 0.0);
        }
    }

    #[test]
    fn triangular_input() {
        let b = epsilon_lambda(&[3.0, 2.0, 1.0]);
        let s = eigen_hessenberg(&b, true).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0, 2.0, 1.0]);
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn two_by_two_oscillation() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let s = eigen_hessenberg(&a, true).unwrap();
        let r = check_oscillation(&s).unwrap();
        assert_eq!(r.sign_variations, vec![0, 1]);
        assert!(r.passed());
    }

    #[test]
    fn complex_spectrum_rejected() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert!(matches!(
            eigen_hessenberg(&a, false),
            Err(Error::ComplexSpectrum { .. })
        ));
        let opts = EigenOptions {
            want_vectors: false,
            assert_real: false,
        };
        let s = eigen_hessenberg_with(&a, opts).unwrap();
        assert!((s.max_imag - 1.0).abs() < 1e-14);
    }

    #[test]
    fn moments_and_averages() {
        let t = tpht_truncation(&Symbol::ones(2), 100);
        assert!((esd_moment(&t, 1) - 2.0).abs() < 1e-14);
        assert!((esd_moment(&t, 3) - 19.88).abs() < 1e-10);
        let t3 = tpht_truncation(&Symbol::ones(3), 100);
        assert!((esd_moment(&t3, 3) - 83.4).abs() < 1e-10);
        let one = esd_average(&t3, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let e2 = esd_average(&t, |z| z.exp()).unwrap();
        assert!((e2 - 16.7344).abs() < 5e-3, "{e2}");
        let e3 = esd_average(&t3, |z| z.exp()).unwrap();
        assert!((e3 - 166.85865).abs() < 5e-2, "{e3}");
    }

    #[test]
    fn histogram_examples() {
        let h = esd_histogram(&Matrix::from_rows(&[[4.0]]).unwrap(), 1).unwrap();
        assert_eq!(h.counts, vec![1]);
        assert!(h.edges[0] < 4.0 && 4.0 < h.edges[1]);
        let b = epsilon_lambda(&[0.0, 1.0, 2.0, 3.0]);
        let h = esd_histogram(&b, 3).unwrap();
        assert_eq!(h.counts, vec![1, 1, 2]);
        assert_eq!(h.edges, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn ks_against_uniform() {
        let v = [0.25, 0.75];
        assert!((ks_against_cdf(&v, |x| x.clamp(0.0, 1.0)) - 0.25).abs() < 1e-15);
    }
}
