//! Factored Hessenberg symbols `phi(z) = z^{-1} * prod_l (1 + a_l z)`.
//!
//! A symbol keeps both its roots `a_l` and the expanded coefficients
//! `x_k = e_k(a_1, .., a_m)`. Evaluation goes through the factored form; matrix
//! construction reads the expanded coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    roots: Vec<f64>,
    coeffs: Vec<f64>,
}

impl Symbol {
    /// Builds a symbol from non-negative finite roots.
    pub fn from_roots(roots: &[f64]) -> Result<Self> {
        if let Some(bad) = roots.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "symbol roots must be finite and non-negative, got {bad}"
            )));
        }
        Ok(Self {
            roots: roots.to_vec(),
            coeffs: elementary_symmetric(roots),
        })
    }

    /// The all-ones symbol `z^{-1} (1 + z)^m`, whose coefficients are binomials.
    pub fn ones(m: usize) -> Self {
        Self::from_roots(&vec![1.0; m]).expect("unit roots are valid")
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// `(x_0, .., x_m)` with `x_0 = 1`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Number of roots `m`.
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// `phi(e^{i theta})`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        symbol_eval(self, theta)
    }

    /// `phi(z) = z^{-1} prod (1 + a z)` at an arbitrary non-zero point.
    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        self.roots
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * (1.0 + a * z))
            / z
    }
}

/// Elementary symmetric polynomials `(e_0, .., e_m)` of `roots`, i.e. the
/// coefficients of `prod (1 + a z)`, built one linear factor at a time.
pub fn elementary_symmetric(roots: &[f64]) -> Vec<f64> {
    let mut e = Vec::with_capacity(roots.len() + 1);
    e.push(1.0);
    for &a in roots {
        e.push(0.0);
        for k in (1..e.len()).rev() {
            e[k] += a * e[k - 1];
        }
    }
    e
}

/// `phi(e^{i theta}) = e^{-i theta} prod (1 + a e^{i theta})`, evaluated in
/// factored form.
pub fn symbol_eval(s: &Symbol, theta: f64) -> Complex64 {
    s.eval_at(Complex64::from_polar(1.0, theta))
}

/// Full product of two coefficient vectors (ascending powers).
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Product truncated modulo `z^{cap+1}`; the result always has `cap + 1`
/// entries.
pub fn poly_mul_truncated(a: &[f64], b: &[f64], cap: usize) -> Vec<f64> {
    let mut out = vec![0.0; cap + 1];
    for (i, &x) in a.iter().enumerate().take(cap + 1) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(cap + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `(sum_k c_k z^k)^p` modulo `z^{degree_cap+1}`, by repeated
/// truncated convolution. Returns `degree_cap + 1` entries.
pub fn poly_power_truncated(coeffs: &[f64], p: usize, degree_cap: usize) -> Vec<f64> {
    assert!(p >= 1, "poly_power_truncated needs p >= 1");
    let base: Vec<f64> = (0..=degree_cap)
        .map(|k| coeffs.get(k).copied().unwrap_or(0.0))
        .collect();
    let mut acc = base.clone();
    for _ in 1..p {
        acc = poly_mul_truncated(&acc, &base, degree_cap);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn elementary_symmetric_examples() {
        assert_eq!(
            elementary_symmetric(&[1.0; 5]),
            vec![1.0, 5.0, 10.0, 10.0, 5.0, 1.0]
        );
        assert_eq!(elementary_symmetric(&[]), vec![1.0]);
        // (1 + 2z)(1 + 3z) expanded through the independent product routine
        let oracle = poly_mul(&[1.0, 2.0], &[1.0, 3.0]);
        assert_eq!(oracle, vec![1.0, 5.0, 6.0]);
        assert_eq!(elementary_symmetric(&[2.0, 3.0]), oracle);
    }

    #[test]
    fn symbol_eval_examples() {
        let s = Symbol::ones(2);
        let close = |z: Complex64, re: f64| (z - Complex64::new(re, 0.0)).norm() < 1e-14;
        assert!(close(s.eval(0.0), 4.0));
        assert!(close(s.eval(PI), 0.0));
        assert!(close(s.eval(PI / 2.0), 2.0));
        // real-valued 2(1 + cos theta) form for m = 2
        for k in 0..16 {
            let t = k as f64 * 0.4;
            assert!(close(s.eval(t), 2.0 * (1.0 + t.cos())));
        }
    }

    #[test]
    fn poly_power_examples() {
        assert_eq!(poly_power_truncated(&[1.0, 1.0], 2, 2), vec![1.0, 2.0, 1.0]);
        // (1 + z)^6 through binomial coefficients
        let binom6: Vec<f64> = [1.0, 6.0, 15.0, 20.0].to_vec();
        assert_eq!(poly_power_truncated(&[1.0, 2.0, 1.0], 3, 3), binom6);
        assert_eq!(
            poly_power_truncated(&[1.0, 1.0, 1.0, 1.0], 1, 2),
            vec![1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn negative_roots_rejected() {
        assert!(Symbol::from_roots(&[1.0, -0.5]).is_err());
        assert!(Symbol::from_roots(&[f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn factored_and_expanded_evaluation_agree(
            roots in proptest::collection::vec(0.0f64..10.0, 0..=20),
            theta in 0.0f64..(2.0 * PI),
        ) {
            let s = Symbol::from_roots(&roots).unwrap();
            let z = Complex64::from_polar(1.0, theta);
            let mut expanded = Complex64::new(0.0, 0.0);
            let mut zk = Complex64::new(1.0, 0.0);
            for &c in s.coeffs() {
                expanded += c * zk;
                zk *= z;
            }
            expanded /= z;
            let factored = s.eval(theta);
            // relative to the size of the largest term, which bounds the
            // rounding error of either route
            let scale: f64 = s.coeffs().iter().sum();
            prop_assert!((factored - expanded).norm() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn elementary_symmetric_is_permutation_invariant(
            roots in proptest::collection::vec(0.0f64..5.0, 0..=10),
            seed in any::<u64>(),
        ) {
            let mut shuffled = roots.clone();
            // deterministic Fisher-Yates from the seed
            let mut state = seed | 1;
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let j = (state % (i as u64 + 1)) as usize;
                shuffled.swap(i, j);
            }
            let a = elementary_symmetric(&roots);
            let b = elementary_symmetric(&shuffled);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn truncated_power_matches_full_power(
            coeffs in proptest::collection::vec(-5i32..=5, 1..=7),
            p in 1usize..=4,
            cap in 0usize..=12,
        ) {
            let c: Vec<f64> = coeffs.iter().map(|&v| v as f64).collect();
            let mut full = c.clone();
            for _ in 1..p {
                full = poly_mul(&full, &c);
            }
            let expect: Vec<f64> = (0..=cap).map(|k| full.get(k).copied().unwrap_or(0.0)).collect();
            // integer inputs: every intermediate is an exactly representable integer
            prop_assert_eq!(poly_power_truncated(&c, p, cap), expect);
        }
    }
}
