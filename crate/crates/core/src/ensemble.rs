//! Random-symbol ensembles: finite-n trace moments (LHS) against their
//! large-n limits (RHS), exact log-normal expectations and bounds, the
//! Bernoulli moment law, and two-sample KS statistics.
//!
//! Every sample draws from its own ChaCha8 stream keyed by the run seed and
//! the sample index, so results do not depend on how work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::tpht_truncation;
use crate::spectra::{esd_moment, histogram, Histogram};
use crate::symbols::{elementary_symmetric, poly_power_truncated, Symbol};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x7470_6874;

pub const LOG_HISTOGRAM_BINS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistKind {
    /// `a_j = exp(sigma_j Z)`; a single sigma applies to every coordinate.
    LogNormal { sigmas: Vec<f64> },
    Exponential { mean: f64 },
    /// `a_j = 1` with probability `q`, else 0.
    Bernoulli { q: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistSpec {
    pub kind: DistKind,
    pub m: usize,
}

impl DistSpec {
    pub fn lognormal(sigma: f64, m: usize) -> Self {
        Self {
            kind: DistKind::LogNormal {
                sigmas: vec![sigma],
            },
            m,
        }
    }

    pub fn lognormal_per_root(sigmas: Vec<f64>) -> Self {
        let m = sigmas.len();
        Self {
            kind: DistKind::LogNormal { sigmas },
            m,
        }
    }

    pub fn exponential(mean: f64, m: usize) -> Self {
        Self {
            kind: DistKind::Exponential { mean },
            m,
        }
    }

    pub fn bernoulli(q: f64, m: usize) -> Self {
        Self {
            kind: DistKind::Bernoulli { q },
            m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match &self.kind {
            DistKind::LogNormal { sigmas } => {
                if sigmas.len() != 1 && sigmas.len() != self.m {
                    return bad(format!(
                        "expected 1 or {} sigmas, got {}",
                        self.m,
                        sigmas.len()
                    ));
                }
                if sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                    return bad("sigma must be finite and non-negative".into());
                }
            }
            DistKind::Exponential { mean } => {
                if !(mean.is_finite() && *mean > 0.0) {
                    return bad(format!("exponential mean must be positive, got {mean}"));
                }
            }
            DistKind::Bernoulli { q } => {
                if !(0.0..=1.0).contains(q) {
                    return bad(format!("bernoulli q must lie in [0, 1], got {q}"));
                }
            }
        }
        Ok(())
    }

    /// Per-root sigmas (log-normal only).
    pub fn sigmas(&self) -> Option<Vec<f64>> {
        match &self.kind {
            DistKind::LogNormal { sigmas } if sigmas.len() == 1 => Some(vec![sigmas[0]; self.m]),
            DistKind::LogNormal { sigmas } => Some(sigmas.clone()),
            _ => None,
        }
    }
}

/// Independent stream `id` derived from `seed`.
pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// `m` iid roots.
pub fn sample_roots<R: Rng + ?Sized>(dist: &DistSpec, rng: &mut R) -> Vec<f64> {
    (0..dist.m)
        .map(|j| match &dist.kind {
            DistKind::LogNormal { sigmas } => {
                let s = if sigmas.len() == 1 { sigmas[0] } else { sigmas[j] };
                let z: f64 = rng.sample(StandardNormal);
                (s * z).exp()
            }
            DistKind::Exponential { mean } => {
                // 1 - U lies in (0, 1], keeping the logarithm finite
                let u: f64 = rng.random();
                -mean * (1.0 - u).ln()
            }
            DistKind::Bernoulli { q } => {
                let u: f64 = rng.random();
                if u < *q {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .collect()
}

/// `(1/n) Tr(T_n^p)` for the truncation of the symbol with these roots.
pub fn lhs_from_roots(roots: &[f64], n: usize, p: usize) -> f64 {
    let s = Symbol::from_roots(roots).expect("sampled roots are non-negative");
    esd_moment(&tpht_truncation(&s, n), p)
}

/// `[z^p] (prod_j (1 + a_j z))^p`.
pub fn rhs_from_roots(roots: &[f64], p: usize) -> f64 {
    poly_power_truncated(&elementary_symmetric(roots), p, p)[p]
}

pub fn lhs_moment_sample<R: Rng + ?Sized>(dist: &DistSpec, n: usize, p: usize, rng: &mut R) -> f64 {
    lhs_from_roots(&sample_roots(dist, rng), n, p)
}

pub fn rhs_moment_sample<R: Rng + ?Sized>(dist: &DistSpec, p: usize, rng: &mut R) -> f64 {
    rhs_from_roots(&sample_roots(dist, rng), p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentBounds {
    pub lower: f64,
    pub upper: f64,
    pub mean_exact: f64,
    /// `C(mp, p)`: the moment of the all-ones symbol.
    pub all_ones: f64,
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn ln_binom(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
}

fn finite_or_overflow(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("{what} exceeds the f64 range")))
    }
}

/// Expected RHS moment for independent log-normal roots,
/// `E [z^p] prod_j (1 + a_j z)^p = [z^p] prod_j sum_i C(p, i) e^{i^2 sigma_j^2 / 2} z^i`,
/// with the bounds
/// `C(mp, p) e^{p^2 / (2 sum_j sigma_j^{-2})} <= mean <= C(mp, p) e^{max_j sigma_j^2 p^2 / 2}`.
///
/// Exponents beyond 700 switch the convolution to log space.
pub fn expected_moment_lognormal(sigmas: &[f64], p: usize) -> Result<MomentBounds> {
    let m = sigmas.len();
    let max_s2 = sigmas.iter().map(|s| s * s).fold(0.0, f64::max);
    let ln_ones = ln_binom(m * p, p);
    let all_ones = binom(m * p, p);
    let big = max_s2 * (p * p) as f64 / 2.0 > 700.0;

    let mean_exact = if !big {
        let mut acc = vec![0.0; p + 1];
        acc[0] = 1.0;
        for s in sigmas {
            let factor: Vec<f64> = (0..=p)
                .map(|i| binom(p, i) * ((i * i) as f64 * s * s / 2.0).exp())
                .collect();
            acc = crate::symbols::poly_mul_truncated(&acc, &factor, p);
        }
        acc[p]
    } else {
        let mut acc = vec![f64::NEG_INFINITY; p + 1];
        acc[0] = 0.0;
        for s in sigmas {
            let factor: Vec<f64> = (0..=p)
                .map(|i| ln_binom(p, i) + (i * i) as f64 * s * s / 2.0)
                .collect();
            acc = (0..=p)
                .map(|k| log_sum_exp((0..=k).map(|i| acc[i] + factor[k - i])))
                .collect();
        }
        finite_or_overflow(acc[p].exp(), "expected moment")?
    };

    let inv_sum: f64 = sigmas.iter().map(|s| 1.0 / (s * s)).sum();
    let lower_exp = if inv_sum.is_finite() && inv_sum > 0.0 {
        (p * p) as f64 / (2.0 * inv_sum)
    } else {
        0.0
    };
    let upper_exp = max_s2 * (p * p) as f64 / 2.0;
    let lower = finite_or_overflow((ln_ones + lower_exp).exp(), "lower bound")?;
    let upper = finite_or_overflow((ln_ones + upper_exp).exp(), "upper bound")?;
    Ok(MomentBounds {
        lower,
        upper,
        mean_exact,
        all_ones,
    })
}

/// Law of the RHS moment for Bernoulli(q) roots: with `k ~ Binomial(m, q)`
/// roots equal to one, the moment is `C(pk, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    /// Indexed by `k = 0..=m`.
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

pub fn bernoulli_moment_law(m: usize, q: f64, p: usize) -> Result<DiscreteLaw> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "bernoulli q must lie in [0, 1], got {q}"
        )));
    }
    let values = (0..=m).map(|k| binom(p * k, p)).collect();
    let probs = (0..=m)
        .map(|k| binom(m, k) * q.powi(k as i32) * (1.0 - q).powi((m - k) as i32))
        .collect();
    Ok(DiscreteLaw { values, probs })
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidParameter(
            "KS distance needs non-empty samples".into(),
        ));
    }
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// LHS and RHS of a sample share one root draw.
    Simultaneous,
    /// LHS and RHS draw from separate streams.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub dist: DistSpec,
    pub n: usize,
    pub p: usize,
    pub samples: usize,
    pub seed: u64,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub median: f64,
    pub std_error: f64,
    /// Samples equal to zero (excluded from the log-scale statistics).
    pub zeros: usize,
    /// Histogram of `log10` of the positive samples.
    pub log10_histogram: Histogram,
    /// Skewness of the natural logarithm of the positive samples.
    pub log_skewness: f64,
}

impl SampleSummary {
    pub fn of(v: &[f64]) -> Option<Self> {
        if v.is_empty() {
            return None;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut sorted = v.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        let positive: Vec<f64> = v.iter().copied().filter(|x| *x > 0.0).collect();
        let logs10: Vec<f64> = positive.iter().map(|x| x.log10()).collect();
        let logs: Vec<f64> = positive.iter().map(|x| x.ln()).collect();
        Some(Self {
            mean,
            median,
            std_error: (var / n).sqrt(),
            zeros: v.iter().filter(|x| **x == 0.0).count(),
            log10_histogram: histogram(&logs10, LOG_HISTOGRAM_BINS),
            log_skewness: skewness(&logs),
        })
    }
}

/// Sample skewness `m3 / m2^{3/2}`; zero for fewer than three values or no
/// spread.
pub fn skewness(v: &[f64]) -> f64 {
    if v.len() < 3 {
        return 0.0;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let m2 = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = v.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub lhs: SampleSummary,
    pub rhs: SampleSummary,
    pub ks_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRun {
    pub config: EnsembleConfig,
    pub lhs_samples: Vec<f64>,
    pub rhs_samples: Vec<f64>,
    /// Absent for an empty run.
    pub summary: Option<EnsembleSummary>,
}

/// Draws `samples` LHS/RHS pairs in parallel on the current rayon pool.
/// Sample `i` uses stream `2i` (and `2i + 1` for the RHS in independent
/// mode), so the output is identical for any thread count.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleRun> {
    cfg.dist.validate()?;
    if cfg.p == 0 {
        return Err(Error::InvalidParameter("moment order p must be >= 1".into()));
    }
    if cfg.n == 0 {
        return Err(Error::InvalidParameter("matrix size n must be >= 1".into()));
    }
    let pairs: Vec<(f64, f64)> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i << 1);
            let roots = sample_roots(&cfg.dist, &mut rng);
            let lhs = lhs_from_roots(&roots, cfg.n, cfg.p);
            let rhs = match cfg.mode {
                Mode::Simultaneous => rhs_from_roots(&roots, cfg.p),
                Mode::Independent => {
                    let mut rng = stream(cfg.seed, (i << 1) | 1);
                    rhs_moment_sample(&cfg.dist, cfg.p, &mut rng)
                }
            };
            (lhs, rhs)
        })
        .collect();
    let (lhs_samples, rhs_samples): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let summary = match (
        SampleSummary::of(&lhs_samples),
        SampleSummary::of(&rhs_samples),
    ) {
        (Some(lhs), Some(rhs)) => Some(EnsembleSummary {
            lhs,
            rhs,
            ks_distance: ks_distance(&lhs_samples, &rhs_samples)?,
        }),
        _ => None,
    };
    Ok(EnsembleRun {
        config: cfg.clone(),
        lhs_samples,
        rhs_samples,
        summary,
    })
}

/// Draws only RHS samples (the cheap side), `samples` of them.
pub fn rhs_samples(dist: &DistSpec, p: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    dist.validate()?;
    Ok((0..samples as u64)
        .into_par_iter()
        .map(|i| rhs_moment_sample(dist, p, &mut stream(seed, (i << 1) | 1)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_samplers() {
        let mut rng = stream(1, 0);
        assert_eq!(sample_roots(&DistSpec::bernoulli(1.0, 5), &mut rng), vec![1.0; 5]);
        assert_eq!(sample_roots(&DistSpec::bernoulli(0.0, 5), &mut rng), vec![0.0; 5]);
    }

    #[test]
    fn lognormal_first_moment() {
        let d = DistSpec::lognormal(1.0, 1);
        let mut rng = stream(7, 0);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| sample_roots(&d, &mut rng)[0]).sum::<f64>() / n as f64;
        assert!((mean / 0.5f64.exp() - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn lhs_examples() {
        let mut rng = stream(3, 0);
        let v = lhs_moment_sample(&DistSpec::bernoulli(1.0, 2), 100, 3, &mut rng);
        assert!((v - 19.88).abs() < 1e-10);
        assert_eq!(lhs_moment_sample(&DistSpec::bernoulli(0.0, 4), 30, 2, &mut rng), 0.0);
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(rhs_from_roots(&[1.0; 3], 5), 3003.0);
        assert_eq!(rhs_from_roots(&[0.0; 3], 2), 0.0);
        // (1 + 2z)^2 (1 + 3z)^2 through full products
        let sq = |a: f64| crate::symbols::poly_mul(&[1.0, a], &[1.0, a]);
        let full = crate::symbols::poly_mul(&sq(2.0), &sq(3.0));
        assert_eq!(full[..3], [1.0, 10.0, 37.0]);
        assert_eq!(rhs_from_roots(&[2.0, 3.0], 2), full[2]);
    }

    #[test]
    fn lognormal_expectation() {
        let b = expected_moment_lognormal(&[0.0; 4], 3).unwrap();
        assert_eq!(b.mean_exact, binom(12, 3));
        assert!((b.lower - b.mean_exact).abs() < 1e-9 * b.mean_exact);
        assert!((b.upper - b.mean_exact).abs() < 1e-9 * b.mean_exact);

        let b = expected_moment_lognormal(&[1.0; 3], 5).unwrap();
        assert!((b.lower / (3003.0 * (25.0f64 / 6.0).exp()) - 1.0).abs() < 1e-12);
        assert!((b.upper / (3003.0 * 12.5f64.exp()) - 1.0).abs() < 1e-12);
        assert!(b.lower <= b.mean_exact && b.mean_exact <= b.upper);

        let b = expected_moment_lognormal(&[1.0], 2).unwrap();
        assert!((b.mean_exact - 2f64.exp()).abs() < 1e-12);
        assert!((b.lower - b.upper).abs() < 1e-12);
    }

    #[test]
    fn lognormal_expectation_log_space_agrees() {
        // sigma large enough to trigger the log-space path, compared against
        // direct summation over compositions
        let sigmas = [5.35, 0.5];
        let p = 7;
        let b = expected_moment_lognormal(&sigmas, p).unwrap();
        let mut direct = 0.0;
        for i in 0..=p {
            let j = p - i;
            direct += binom(p, i)
                * binom(p, j)
                * ((i * i) as f64 * 5.35f64.powi(2) / 2.0 + (j * j) as f64 * 0.25 / 2.0).exp();
        }
        assert!((b.mean_exact / direct - 1.0).abs() < 1e-12);
        assert!(b.lower <= b.mean_exact && b.mean_exact <= b.upper);
    }

    #[test]
    fn bernoulli_law() {
        let law = bernoulli_moment_law(10, 0.5, 5).unwrap();
        assert!((law.probs[0] - 1.0 / 1024.0).abs() < 1e-15);
        assert!((law.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(law.values[0], 0.0);
        assert_eq!(law.values[10], binom(50, 5));
        let one = bernoulli_moment_law(4, 1.0, 3).unwrap();
        assert_eq!(one.probs[4], 1.0);
        let zero = bernoulli_moment_law(4, 0.0, 3).unwrap();
        assert_eq!((zero.probs[0], zero.values[0]), (1.0, 0.0));
    }

    #[test]
    fn ks_examples() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(ks_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(ks_distance(&[0.0; 4], &[1.0; 3]).unwrap(), 1.0);
        let d = ks_distance(&x, &[1.5, 2.5, 3.5]).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
        assert!(ks_distance(&[], &x).is_err());
    }

    #[test]
    fn run_is_deterministic_and_empty_runs_are_empty() {
        let cfg = EnsembleConfig {
            dist: DistSpec::lognormal(0.5, 3),
            n: 12,
            p: 3,
            samples: 200,
            seed: 99,
            mode: Mode::Independent,
        };
        let a = run_ensemble(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_ensemble(&cfg).unwrap());
        assert_eq!(a.lhs_samples, b.lhs_samples);
        assert_eq!(a.rhs_samples, b.rhs_samples);

        let empty = run_ensemble(&EnsembleConfig { samples: 0, ..cfg }).unwrap();
        assert!(empty.lhs_samples.is_empty() && empty.summary.is_none());
    }

    #[test]
    fn simultaneous_mode_shares_roots() {
        // with a fixed all-ones draw both sides see the same symbol
        let cfg = EnsembleConfig {
            dist: DistSpec::bernoulli(1.0, 2),
            n: 100,
            p: 3,
            samples: 3,
            seed: 5,
            mode: Mode::Simultaneous,
        };
        let run = run_ensemble(&cfg).unwrap();
        for (l, r) in run.lhs_samples.iter().zip(&run.rhs_samples) {
            assert!((l - 19.88).abs() < 1e-10 && *r == 20.0);
        }
    }
}
