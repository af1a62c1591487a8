//! Eigenvalue kernels: Francis double-shift QR for upper Hessenberg input and
//! implicit QL for symmetric tridiagonal input.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Subdiagonal entries below this fraction of their neighbouring diagonal
/// magnitudes are set to zero.
pub const DEFLATION_TOL: f64 = 1e-12;

/// Sweeps without a deflation before an exceptional shift is applied.
const EXCEPTIONAL_PERIOD: usize = 10;

/// Row-major square work array.
pub(crate) struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    pub(crate) fn new(n: usize, a: Vec<f64>) -> Self {
        debug_assert_eq!(a.len(), n * n);
        Self { n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    #[inline]
    fn sub(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] -= v;
    }
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable. No permutations are applied.
pub(crate) fn balance(w: &mut Work) {
    const RADIX: f64 = 2.0;
    let n = w.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += w.at(j, i).abs();
                    r += w.at(i, j).abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    let v = w.at(i, j) * g;
                    w.set(i, j, v);
                }
                for j in 0..n {
                    let v = w.at(j, i) * f;
                    w.set(j, i, v);
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis implicit
/// double-shift QR iteration. The work array is destroyed.
pub(crate) fn hqr(w: &mut Work) -> Result<Vec<Complex64>> {
    let n = w.n;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(out);
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += w.at(i, j).abs();
        }
    }
    let cap = 30 * n;
    let mut total = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;

    while nn >= 0 {
        let nu = nn as usize;
        let mut its = 0usize;
        loop {
            // locate the lowest negligible subdiagonal entry
            let mut l = nu;
            while l >= 1 {
                let mut s = w.at(l - 1, l - 1).abs() + w.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if w.at(l, l - 1).abs() <= DEFLATION_TOL * s {
                    w.set(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            let mut x = w.at(nu, nu);
            if l == nu {
                out[nu] = Complex64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = w.at(nu - 1, nu - 1);
            let mut ww = w.at(nu, nu - 1) * w.at(nu - 1, nu);
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + ww;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let hi = x + z;
                    let lo = if z != 0.0 { x - ww / z } else { hi };
                    out[nu - 1] = Complex64::new(hi, 0.0);
                    out[nu] = Complex64::new(lo, 0.0);
                } else {
                    out[nu - 1] = Complex64::new(x + p, -z);
                    out[nu] = Complex64::new(x + p, z);
                }
                nn -= 2;
                break;
            }

            if total >= cap {
                return Err(Error::NoConvergence { iterations: total });
            }
            if its > 0 && its % EXCEPTIONAL_PERIOD == 0 {
                t += x;
                for i in 0..=nu {
                    w.sub(i, i, x);
                }
                let s = w.at(nu, nu - 1).abs() + w.at(nu - 1, nu - 2).abs();
                x = 0.75 * s;
                y = x;
                ww = -0.4375 * s * s;
            }
            its += 1;
            total += 1;

            // find two consecutive small subdiagonal entries
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = w.at(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - ww) / w.at(m + 1, m) + w.at(m, m + 1);
                q = w.at(m + 1, m + 1) - z - rr - ss;
                r = w.at(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = w.at(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (w.at(m - 1, m - 1).abs() + z.abs() + w.at(m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                w.set(i, i - 2, 0.0);
                if i != m + 2 {
                    w.set(i, i - 3, 0.0);
                }
            }
            // double-shift QR sweep on rows/columns l..=nu
            let mut k = m;
            while k < nu {
                if k != m {
                    p = w.at(k, k - 1);
                    q = w.at(k + 1, k - 1);
                    r = if k != nu - 1 { w.at(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            let v = -w.at(k, k - 1);
                            w.set(k, k - 1, v);
                        }
                    } else {
                        w.set(k, k - 1, -s * x);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = w.at(k, j) + q * w.at(k + 1, j);
                        if k != nu - 1 {
                            pp += r * w.at(k + 2, j);
                            w.sub(k + 2, j, pp * z);
                        }
                        w.sub(k + 1, j, pp * y);
                        w.sub(k, j, pp * x);
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * w.at(i, k) + y * w.at(i, k + 1);
                        if k != nu - 1 {
                            pp += z * w.at(i, k + 2);
                            w.sub(i, k + 2, pp * r);
                        }
                        w.sub(i, k + 1, pp * q);
                        w.sub(i, k, pp);
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e.len() == d.len() - 1`) by implicit QL with
/// Wilkinson shifts.
pub(crate) fn tql(mut d: Vec<f64>, e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n <= 1 {
        return Ok(d);
    }
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    let cap = 30 * n;
    let mut total = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if total >= cap {
                return Err(Error::NoConvergence { iterations: total });
            }
            total += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hqr_companion_roots() {
        // upper Hessenberg companion of (x-1)(x-2)(x-3)(x-4)
        let a = vec![
            10.0, -35.0, 50.0, -24.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0,
        ];
        let mut w = Work::new(4, a);
        balance(&mut w);
        let mut ev: Vec<f64> = hqr(&mut w).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        for (k, v) in ev.iter().enumerate() {
            assert!((v - (k as f64 + 1.0)).abs() < 1e-10, "{ev:?}");
        }
    }

    #[test]
    fn hqr_rotation_is_complex() {
        let mut w = Work::new(2, vec![0.0, -1.0, 1.0, 0.0]);
        let ev = hqr(&mut w).unwrap();
        assert!(ev.iter().all(|z| (z.im.abs() - 1.0).abs() < 1e-14 && z.re.abs() < 1e-14));
    }

    #[test]
    fn tql_second_difference() {
        let n = 20;
        let ev = tql(vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        let mut ev = ev;
        ev.sort_by(f64::total_cmp);
        let mut exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        exact.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
