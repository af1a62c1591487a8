//! Sign variations and nodes of eigenvectors viewed as piecewise-linear
//! functions on `[1, n]`.

use serde::{Deserialize, Serialize};

use super::SpectrumResult;
use crate::error::{Error, Result};

/// Entries smaller than this fraction of the vector norm count as zero.
pub const ZERO_CUTOFF: f64 = 1e-12;

/// Node comparisons in the interlacing test use this absolute slack.
pub const INTERLACING_TOL: f64 = 1e-9;

fn snapped(v: &[f64]) -> Vec<f64> {
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let cut = ZERO_CUTOFF * nv;
    v.iter().map(|&x| if x.abs() < cut { 0.0 } else { x }).collect()
}

/// Number of strict sign changes between consecutive non-negligible entries.
pub fn sign_variations(v: &[f64]) -> usize {
    let s = snapped(v);
    let signs: Vec<f64> = s.iter().filter(|x| **x != 0.0).map(|x| x.signum()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Zeros of `x(t) = (k + 1 - t) x_k + (t - k) x_{k+1}` on `[1, n]`
/// (entries indexed from 1).
///
/// Each sign change contributes exactly one node: the interpolation root
/// `k + x_k / (x_k - x_{k+1})` for adjacent opposite signs, or the midpoint
/// of the run of zero entries separating them (a single interior zero thus
/// contributes its own abscissa). Zero runs between equal signs or at either
/// end contribute nothing.
pub fn piecewise_nodes(v: &[f64]) -> Vec<f64> {
    let s = snapped(v);
    let mut nodes = Vec::new();
    let mut prev: Option<usize> = None;
    for (i, &x) in s.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        if let Some(p) = prev {
            let y = s[p];
            if y.signum() != x.signum() {
                let t = if i == p + 1 {
                    (p + 1) as f64 + y / (y - x)
                } else {
                    // zeros occupy 1-based positions p+2 ..= i
                    ((p + 2) + i) as f64 / 2.0
                };
                nodes.push(t);
            }
        }
        prev = Some(i);
    }
    nodes
}

/// `fewer` (k - 1 nodes) interlaces `more` (k nodes) when
/// `more[i] <= fewer[i] <= more[i + 1]` for every `i`, up to
/// [`INTERLACING_TOL`].
pub fn nodes_interlace(fewer: &[f64], more: &[f64]) -> bool {
    if more.len() != fewer.len() + 1 {
        return false;
    }
    fewer.iter().enumerate().all(|(i, &a)| {
        more[i] <= a + INTERLACING_TOL && a <= more[i + 1] + INTERLACING_TOL
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    /// One count per eigenvector, in eigenvalue order (descending).
    pub sign_variations: Vec<usize>,
    pub nodes: Vec<Vec<f64>>,
    /// Entry `k` compares eigenvectors `k` and `k + 1`.
    pub interlacing_ok: Vec<bool>,
}

impl OscillationReport {
    /// Eigenvector `k` (0-based) has exactly `k` sign changes.
    pub fn variations_ok(&self) -> bool {
        self.sign_variations.iter().enumerate().all(|(k, &v)| v == k)
    }

    pub fn passed(&self) -> bool {
        self.variations_ok() && self.interlacing_ok.iter().all(|&b| b)
    }
}

/// Sign-variation and node-interlacing diagnostics for every eigenvector.
pub fn check_oscillation(s: &SpectrumResult) -> Result<OscillationReport> {
    let vecs = s.eigenvectors.as_ref().ok_or_else(|| {
        Error::InvalidParameter("oscillation check needs eigenvectors".to_string())
    })?;
    let n = vecs.cols();
    let cols: Vec<Vec<f64>> = (0..n).map(|k| vecs.column(k)).collect();
    let sign_variations = cols.iter().map(|c| sign_variations(c)).collect();
    let nodes: Vec<Vec<f64>> = cols.iter().map(|c| piecewise_nodes(c)).collect();
    let interlacing_ok = nodes
        .windows(2)
        .map(|w| nodes_interlace(&w[0], &w[1]))
        .collect();
    Ok(OscillationReport {
        sign_variations,
        nodes,
        interlacing_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variation_examples() {
        assert_eq!(sign_variations(&[1.0, -1.0, 1.0, -1.0]), 3);
        assert_eq!(sign_variations(&[0.2, 0.3, 0.4]), 0);
        assert_eq!(sign_variations(&[1.0, 0.0, -1.0]), 1);
        assert_eq!(sign_variations(&[1.0, 1e-20, 1.0]), 0);
        assert_eq!(sign_variations(&[]), 0);
    }

    #[test]
    fn node_examples() {
        assert_eq!(piecewise_nodes(&[1.0, -1.0]), vec![1.5]);
        assert_eq!(piecewise_nodes(&[2.0, -2.0, 2.0]), vec![1.5, 2.5]);
        assert_eq!(piecewise_nodes(&[1.0, 0.0, -1.0]), vec![2.0]);
        assert!(piecewise_nodes(&[1.0, 0.0, 1.0]).is_empty());
        assert!(piecewise_nodes(&[0.0, 1.0, 2.0]).is_empty());
    }

    #[test]
    fn interior_zero_matches_grid_oracle() {
        // evaluate the interpolant on a fine grid and locate its sign change
        let v = [1.0, 0.0, -1.0];
        let x = |t: f64| {
            let k = (t.floor() as usize).clamp(1, 2);
            let f = t - k as f64;
            (1.0 - f) * v[k - 1] + f * v[k]
        };
        let steps = 2000;
        let mut root = None;
        for s in 0..steps {
            let t0 = 1.0 + 2.0 * s as f64 / steps as f64;
            let t1 = 1.0 + 2.0 * (s + 1) as f64 / steps as f64;
            if x(t0) > 0.0 && x(t1) <= 0.0 {
                root = Some(t1);
                break;
            }
        }
        assert!((root.unwrap() - piecewise_nodes(&v)[0]).abs() < 2e-3);
    }

    #[test]
    fn interlacing() {
        assert!(nodes_interlace(&[], &[1.5]));
        assert!(nodes_interlace(&[2.0], &[1.5, 2.5]));
        assert!(!nodes_interlace(&[3.0], &[1.5, 2.5]));
        assert!(!nodes_interlace(&[2.0], &[1.5]));
    }
}
