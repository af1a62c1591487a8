//! Eigenvectors of lower-Hessenberg matrices by inverse iteration.
//!
//! `A - mu I` is brought to lower-triangular form by column operations on
//! adjacent columns (with column pivoting), which costs O(n^2) per shift
//! because only the superdiagonal has to be removed.

use crate::dense::Matrix;

struct ShiftedSolver {
    n: usize,
    /// Lower-triangular factor `W = (A - mu I) Q`, row-major.
    w: Vec<f64>,
    /// Per step: whether columns `k, k+1` were swapped, and the multiplier.
    ops: Vec<(bool, f64)>,
}

impl ShiftedSolver {
    fn new(a: &Matrix, mu: f64) -> Self {
        let n = a.rows();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale;
        let mut w = a.as_slice().to_vec();
        for i in 0..n {
            w[i * n + i] -= mu;
        }
        let mut ops = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n.saturating_sub(1) {
            let d = w[k * n + k];
            let s = w[k * n + k + 1];
            let swap = s.abs() > d.abs();
            if swap {
                for i in k..n {
                    w.swap(i * n + k, i * n + k + 1);
                }
            }
            let mut piv = w[k * n + k];
            if piv == 0.0 {
                piv = tiny;
                w[k * n + k] = piv;
            }
            let l = w[k * n + k + 1] / piv;
            if l != 0.0 {
                for i in k..n {
                    w[i * n + k + 1] -= l * w[i * n + k];
                }
            }
            w[k * n + k + 1] = 0.0;
            ops.push((swap, l));
        }
        for i in 0..n {
            if w[i * n + i] == 0.0 {
                w[i * n + i] = tiny;
            }
        }
        Self { n, w, ops }
    }

    /// Solves `(A - mu I) x = b` in place.
    fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        // forward substitution with W
        for i in 0..n {
            let row = &self.w[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(x, y)| x * y).sum();
            b[i] = (b[i] - s) / self.w[i * n + i];
        }
        // x = Q_0 (Q_1 ( .. Q_{n-2} y))
        for (k, &(swap, l)) in self.ops.iter().enumerate().rev() {
            b[k] -= l * b[k + 1];
            if swap {
                b.swap(k, k + 1);
            }
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `||A v - lambda v|| / ||v||`.
pub(crate) fn residual(a: &Matrix, lambda: f64, v: &[f64]) -> f64 {
    let av = a.mul_vec(v);
    let r: Vec<f64> = av.iter().zip(v).map(|(x, y)| x - lambda * y).collect();
    norm(&r) / norm(v)
}

/// Unit vector with its last non-negligible entry positive.
pub(crate) fn normalize(v: &mut [f64]) {
    let nv = norm(v);
    if nv == 0.0 {
        return;
    }
    let cut = 1e-14 * nv;
    let sign = v
        .iter()
        .rev()
        .find(|x| x.abs() > cut)
        .map_or(1.0, |x| x.signum());
    for x in v.iter_mut() {
        *x *= sign / nv;
    }
}

/// Eigenvector for the (real) eigenvalue `lambda`, plus its residual.
pub(crate) fn inverse_iteration(a: &Matrix, lambda: f64) -> (Vec<f64>, f64) {
    let n = a.rows();
    let scale = a.max_abs().max(1.0);
    // nudge off the exact eigenvalue so the shifted system stays solvable
    let mu = lambda + 8.0 * f64::EPSILON * scale;
    let solver = ShiftedSolver::new(a, mu);
    // deterministic start with no special alignment to any eigenvector
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.37 * ((i as f64 + 1.0) * 0.618_033_988_75).fract())
        .collect();
    let mut best = (v.clone(), f64::INFINITY);
    for _ in 0..6 {
        solver.solve(&mut v);
        let nv = norm(&v);
        if !nv.is_finite() || nv == 0.0 {
            break;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        let r = residual(a, lambda, &v);
        if r < best.1 {
            best = (v.clone(), r);
        }
        if r <= 1e-14 * scale {
            break;
        }
    }
    let (mut v, r) = best;
    normalize(&mut v);
    (v, r)
}
