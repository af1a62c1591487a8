//! Large-n limits of eigenvalue averages of Toeplitz truncations: circle
//! averages of the symbol, computed by coefficient extraction or by periodic
//! quadrature.

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::symbols::{poly_power_truncated, Symbol};

pub const DEFAULT_NODES: usize = 4096;
pub const MIN_NODES: usize = 64;
/// Quadrature results whose imaginary part exceeds this (relative to
/// `max(1, |real part|)`) are rejected.
pub const IMAG_RESIDUE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GsMethod {
    Coefficient,
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsLimit {
    pub value: f64,
    pub method: GsMethod,
    /// Quadrature only.
    pub nodes_used: Option<usize>,
    /// Imaginary part discarded by the quadrature; zero otherwise.
    pub imag_residue: f64,
}

/// `lim (1/n) Tr(T_n^p) = [z^p] (prod_j (1 + a_j z))^p`.
pub fn gs_moment_exact(s: &Symbol, p: usize) -> Result<GsLimit> {
    if p == 0 {
        return Err(Error::InvalidParameter("moment order p must be >= 1".into()));
    }
    let c = poly_power_truncated(s.coeffs(), p, p);
    Ok(GsLimit {
        value: c[p],
        method: GsMethod::Coefficient,
        nodes_used: None,
        imag_residue: 0.0,
    })
}

/// Trapezoidal rule for `(1/2pi) int_0^{2pi} f(phi(e^{i theta})) d theta`.
/// For entire `f` the integrand is smooth and periodic, so the rule converges
/// geometrically in the number of nodes.
pub fn gs_average_quadrature<F>(s: &Symbol, f: F, nodes: usize) -> Result<GsLimit>
where
    F: Fn(Complex64) -> Complex64,
{
    if nodes < MIN_NODES {
        return Err(Error::InvalidParameter(format!(
            "quadrature needs at least {MIN_NODES} nodes, got {nodes}"
        )));
    }
    let h = 2.0 * PI / nodes as f64;
    let vals: Vec<Complex64> = (0..nodes).map(|k| f(s.eval(h * k as f64))).collect();
    let mean = pairwise_sum(&vals) / nodes as f64;
    let residue = mean.im.abs();
    let tolerance = IMAG_RESIDUE_TOL * mean.re.abs().max(1.0);
    if residue > tolerance {
        return Err(Error::ImagResidueTooLarge { residue, tolerance });
    }
    Ok(GsLimit {
        value: mean.re,
        method: GsMethod::Quadrature,
        nodes_used: Some(nodes),
        imag_residue: residue,
    })
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Exponential average for the all-ones symbol of degree `m`:
/// `sum_k C(mk, k) / k!`, summed until the terms stop contributing.
pub fn exp_average_all_ones(m: usize) -> GsLimit {
    let mut total = 0.0;
    let mut k = 0usize;
    loop {
        let mut term = binom_f64(m * k, k);
        for j in 1..=k {
            term /= j as f64;
        }
        total += term;
        if k > 2 && term < f64::EPSILON * total {
            break;
        }
        k += 1;
    }
    GsLimit {
        value: total,
        method: GsMethod::ClosedForm,
        nodes_used: None,
        imag_residue: 0.0,
    }
}

fn binom_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(mp, p)`, exact.
pub fn binom_mp_p(m: u64, p: u64) -> BigUint {
    binom_big(m * p, p)
}

/// `sum over i_1 + .. + i_m = p of prod_j C(p, i_j)`, by enumerating the
/// compositions of `p` into `m` non-negative parts. Equals `C(mp, p)`.
pub fn composition_sum(m: u64, p: u64) -> BigUint {
    let row: Vec<BigUint> = (0..=p).map(|i| binom_big(p, i)).collect();
    fn go(parts_left: u64, rest: u64, row: &[BigUint]) -> BigUint {
        if parts_left == 0 {
            return if rest == 0 {
                BigUint::from(1u32)
            } else {
                BigUint::from(0u32)
            };
        }
        (0..=rest)
            .map(|i| &row[i as usize] * go(parts_left - 1, rest - i, row))
            .sum()
    }
    go(m, p, &row)
}

/// Modified Bessel function `I_0(x) = sum_k (x/2)^{2k} / (k!)^2`.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= f64::EPSILON * sum {
            return sum;
        }
        k += 1.0;
    }
}
