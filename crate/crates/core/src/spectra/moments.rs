//! Trace moments `Tr(A^p) / n` through banded matrix products.

use crate::dense::Matrix;
use crate::symbols::Symbol;

/// Square banded matrix: entry `(i, j)` is stored iff `-lo <= j - i <= hi`.
#[derive(Debug, Clone)]
struct Band {
    n: usize,
    lo: usize,
    hi: usize,
    data: Vec<f64>,
}

impl Band {
    fn width(&self) -> usize {
        self.lo + self.hi + 1
    }

    /// Band form of the `n x n` truncation of `s`, without the dense matrix.
    fn truncation(s: &Symbol, n: usize) -> Self {
        let c = s.coeffs();
        let cap = n.saturating_sub(1);
        let lo = c.len().saturating_sub(2).min(cap);
        let hi = 1.min(cap);
        let mut b = Self {
            n,
            lo,
            hi,
            data: vec![0.0; n * (lo + hi + 1)],
        };
        for i in 0..n {
            for j in i.saturating_sub(lo)..(i + hi + 1).min(n) {
                b.set(i, j, c.get(i + 1 - j).copied().unwrap_or(0.0));
            }
        }
        b
    }

    fn from_dense(a: &Matrix) -> Self {
        let n = a.rows();
        let mut lo = 0;
        let mut hi = 0;
        for i in 0..n {
            for j in 0..n {
                if a[(i, j)] != 0.0 {
                    if i > j {
                        lo = lo.max(i - j);
                    } else {
                        hi = hi.max(j - i);
                    }
                }
            }
        }
        let mut b = Self {
            n,
            lo,
            hi,
            data: vec![0.0; n * (lo + hi + 1)],
        };
        for i in 0..n {
            for j in i.saturating_sub(lo)..(i + hi + 1).min(n) {
                b.set(i, j, a[(i, j)]);
            }
        }
        b
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.lo < i || j > i + self.hi {
            0.0
        } else {
            self.data[i * self.width() + (j + self.lo - i)]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let w = self.width();
        self.data[i * w + (j + self.lo - i)] = v;
    }

    fn mul(&self, rhs: &Band) -> Band {
        let n = self.n;
        let cap = n.saturating_sub(1);
        let lo = (self.lo + rhs.lo).min(cap);
        let hi = (self.hi + rhs.hi).min(cap);
        let mut out = Band {
            n,
            lo,
            hi,
            data: vec![0.0; n * (lo + hi + 1)],
        };
        for i in 0..n {
            for j in i.saturating_sub(lo)..(i + hi + 1).min(n) {
                let k0 = i.saturating_sub(self.lo).max(j.saturating_sub(rhs.hi));
                let k1 = (i + self.hi).min(j + rhs.lo).min(n - 1);
                let mut s = 0.0;
                for k in k0..=k1 {
                    s += self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// `Tr(self * rhs)` without forming the product.
    fn trace_mul(&self, rhs: &Band) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.lo.min(rhs.hi));
            let j1 = (i + self.hi.min(rhs.lo)).min(self.n - 1);
            for j in j0..=j1 {
                s += self.get(i, j) * rhs.get(j, i);
            }
        }
        s
    }
}

/// `Tr(A^p) / n`, using the band structure of `A` so that only the non-zero
/// diagonals of each power are formed.
pub fn esd_moment(a: &Matrix, p: usize) -> f64 {
    assert!(p >= 1, "esd_moment needs p >= 1");
    let n = a.rows();
    if n == 0 {
        return 0.0;
    }
    let base = Band::from_dense(a);
    let mut pow = base.clone();
    for _ in 1..p - 1 {
        pow = pow.mul(&base);
    }
    let tr = if p == 1 {
        (0..n).map(|i| base.get(i, i)).sum()
    } else {
        pow.trace_mul(&base)
    };
    tr / n as f64
}

/// `Tr(A^p) / n` for `p = 1..=pmax`, from a single chain of banded powers.
pub fn esd_moments(a: &Matrix, pmax: usize) -> Vec<f64> {
    moment_chain(Band::from_dense(a), pmax)
}

/// [`esd_moments`] for the `n x n` truncation of `s`, which is never formed
/// densely.
pub fn truncation_moments(s: &Symbol, n: usize, pmax: usize) -> Vec<f64> {
    moment_chain(Band::truncation(s, n), pmax)
}

fn moment_chain(base: Band, pmax: usize) -> Vec<f64> {
    let n = base.n;
    if n == 0 {
        return vec![0.0; pmax];
    }
    let mut out = Vec::with_capacity(pmax);
    if pmax == 0 {
        return out;
    }
    out.push((0..n).map(|i| base.get(i, i)).sum::<f64>() / n as f64);
    let mut pow = base.clone();
    for p in 2..=pmax {
        out.push(pow.trace_mul(&base) / n as f64);
        if p < pmax {
            pow = pow.mul(&base);
        }
    }
    out
}

/// `Tr(exp(A)) / n` by the power series of the exponential, truncated once
/// the tail bound `r^k / k!` (with `r = ||A||_1`) drops below rounding level.
pub fn esd_exp_average(a: &Matrix) -> f64 {
    exp_series(&esd_moments(a, exp_terms(a.one_norm())))
}

/// [`esd_exp_average`] for the `n x n` truncation of `s`.
pub fn truncation_exp_average(s: &Symbol, n: usize) -> f64 {
    let r: f64 = s.coeffs().iter().sum();
    exp_series(&truncation_moments(s, n, exp_terms(r)))
}

fn exp_terms(r: f64) -> usize {
    (std::f64::consts::E * r).ceil() as usize + 40
}

fn exp_series(moments: &[f64]) -> f64 {
    let mut total = 1.0;
    let mut fact = 1.0;
    for (k, m) in moments.iter().enumerate() {
        fact *= (k + 1) as f64;
        total += m / fact;
    }
    total
}
