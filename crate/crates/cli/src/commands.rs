use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use tpht::ensemble::{
    bernoulli_moment_law, expected_moment_lognormal, run_ensemble, DistKind, DistSpec,
    EnsembleConfig, EnsembleRun,
};
use tpht::factorization::{lu_closed_form, lu_dynamics_iterate};
use tpht::gs_asymptotics::{
    binom_mp_p, exp_average_all_ones, gs_average_quadrature, gs_moment_exact,
};
use tpht::matrices::{is_totally_positive, tpht_truncation, TpMode, EXHAUSTIVE_MAX_N};
use tpht::spectra::{
    check_oscillation, eigen_hessenberg_with, hessenberg_eigenvalues, histogram, piecewise_nodes,
    truncation_exp_average, truncation_moments, EigenOptions,
};
use tpht::{HessMatrix, Mode, Symbol};

use crate::output::{csv_matrix, csv_row, num, Format, Rendered};
use crate::svg::{range, Chart};
use crate::{DistName, Function, GsArgs, McArgs, ModeName, SymbolArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{} ({})", .0, .0.name())]
    Numerical(tpht::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<tpht::Error> for CliError {
    fn from(e: tpht::Error) -> Self {
        match e {
            tpht::Error::InvalidParameter(msg) => CliError::Usage(msg),
            e => CliError::Numerical(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Echo of the inputs that determine a result.
#[derive(Debug, Serialize)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    roots: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dist: Option<DistSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<usize>,
}

impl RunConfig {
    fn with_roots(command: &'static str, roots: &[f64], n: Option<usize>) -> Self {
        Self {
            command,
            roots: Some(roots.to_vec()),
            dist: None,
            n,
            p: None,
            steps: None,
            samples: None,
            seed: None,
            nodes: None,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit(r: &Rendered, format: Format, path: Option<&Path>) -> Result<()> {
    let text = r.text(format);
    match path {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn symbol(args: &SymbolArgs) -> Result<(Vec<f64>, Symbol)> {
    let roots = args.roots();
    let s = Symbol::from_roots(&roots)?;
    Ok((roots, s))
}

pub fn matrix(args: &SymbolArgs, n: usize) -> Result<Rendered> {
    let (roots, s) = symbol(args)?;
    let t = tpht_truncation(&s, n);
    let mut csv = String::new();
    csv_matrix(&mut csv, &t);
    Ok(Rendered {
        json: json!({
            "config": RunConfig::with_roots("matrix", &roots, Some(n)),
            "matrix": to_json(&t),
        }),
        csv,
    })
}

#[derive(Serialize)]
struct StepReport {
    step: usize,
    eigenvalue_drift: f64,
    is_tp: bool,
    tp_method: TpMode,
}

fn sorted_real_parts(a: &HessMatrix) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = hessenberg_eigenvalues(a)?.iter().map(|z| z.re).collect();
    v.sort_by(|x, y| y.total_cmp(x));
    Ok(v)
}

pub fn lu(args: &SymbolArgs, n: usize, steps: usize) -> Result<Rendered> {
    let (roots, s) = symbol(args)?;
    let t = tpht_truncation(&s, n);
    let f = lu_closed_form(&t, true)?;
    let mut trajectory = Vec::new();
    if steps > 0 {
        let base = sorted_real_parts(&t)?;
        let mode = if n <= EXHAUSTIVE_MAX_N {
            TpMode::Exhaustive
        } else {
            TpMode::Neville
        };
        for (step, a) in lu_dynamics_iterate(&t, steps)?.iter().enumerate().skip(1) {
            let drift = sorted_real_parts(a)?
                .iter()
                .zip(&base)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            trajectory.push(StepReport {
                step,
                eigenvalue_drift: drift,
                is_tp: is_totally_positive(a, mode)?.is_tp,
                tp_method: mode,
            });
        }
    }
    let mut csv = String::new();
    csv_row(&mut csv, ["# L".to_string()]);
    csv_matrix(&mut csv, &f.l);
    csv_row(&mut csv, ["# U".to_string()]);
    csv_matrix(&mut csv, &f.u);
    if !trajectory.is_empty() {
        csv_row(&mut csv, ["# step", "eigenvalue_drift", "is_tp"].map(String::from));
        for r in &trajectory {
            csv_row(
                &mut csv,
                [r.step.to_string(), num(r.eigenvalue_drift), r.is_tp.to_string()],
            );
        }
    }
    let mut config = RunConfig::with_roots("lu", &roots, Some(n));
    config.steps = Some(steps);
    Ok(Rendered {
        json: json!({
            "config": config,
            "l": to_json(&f.l),
            "u": to_json(&f.u),
            "method": to_json(&f.method),
            "trajectory": to_json(&trajectory),
        }),
        csv,
    })
}

const DEFAULT_BINS: usize = 40;

pub fn spectrum(
    args: &SymbolArgs,
    n: usize,
    oscillation: bool,
    bins: Option<usize>,
    svg: Option<&Path>,
) -> Result<Rendered> {
    let (roots, s) = symbol(args)?;
    let t = tpht_truncation(&s, n);
    let spec = eigen_hessenberg_with(
        &t,
        EigenOptions {
            want_vectors: oscillation,
            assert_real: oscillation,
        },
    )?;
    let report = if oscillation {
        Some(check_oscillation(&spec)?)
    } else {
        None
    };
    let hist = bins.map(|b| histogram(&spec.eigenvalues, b));

    let mut csv = String::new();
    csv_row(&mut csv, ["index", "eigenvalue", "sign_variations"].map(String::from));
    for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
        let var = report
            .as_ref()
            .map(|r| r.sign_variations[k].to_string())
            .unwrap_or_default();
        csv_row(&mut csv, [k.to_string(), num(lambda), var]);
    }

    if let Some(path) = svg {
        let chart = match (&report, &spec.eigenvectors) {
            (Some(_), Some(vecs)) => zero_map(vecs),
            _ => {
                let h = hist
                    .clone()
                    .unwrap_or_else(|| histogram(&spec.eigenvalues, DEFAULT_BINS));
                let heights: Vec<f64> = h.counts.iter().map(|&c| c as f64).collect();
                let top = heights.iter().copied().fold(0.0, f64::max);
                let mut c = Chart::new(
                    &format!("eigenvalues, n = {n}"),
                    "eigenvalue",
                    "count",
                    (h.edges[0], *h.edges.last().expect("edges")),
                    (0.0, top),
                );
                c.bars(&h.edges, &heights, "steelblue", 0.8);
                c
            }
        };
        write_file(path, &chart.render())?;
    }

    Ok(Rendered {
        json: json!({
            "config": RunConfig::with_roots("spectrum", &roots, Some(n)),
            "eigenvalues": spec.eigenvalues,
            "max_imag": spec.max_imag,
            "eigenvectors": to_json(&spec.eigenvectors),
            "residual": spec.residual,
            "oscillation": to_json(&report),
            "histogram": to_json(&hist),
        }),
        csv,
    })
}

/// Piecewise-linear eigenvector plots stacked vertically, one band per
/// eigenvector, with the interpolation nodes marked.
fn zero_map(vecs: &tpht::Matrix) -> Chart {
    let n = vecs.rows();
    let mut c = Chart::new(
        "eigenvector interpolants and nodes",
        "entry index",
        "eigenvector (largest eigenvalue on top)",
        (1.0, n.max(2) as f64),
        (-(n as f64), 1.0),
    );
    for k in 0..n {
        let v = vecs.column(k);
        let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let offset = -(k as f64) + 0.5;
        let pts: Vec<(f64, f64)> = v
            .iter()
            .enumerate()
            .map(|(i, x)| ((i + 1) as f64, offset + 0.45 * x / scale))
            .collect();
        c.polyline(&[(1.0, offset), (n as f64, offset)], "#bbbbbb");
        c.polyline(&pts, "black");
        let nodes: Vec<f64> = piecewise_nodes(&v).iter().map(|x| x + 1.0).collect();
        c.markers(&nodes, offset, "royalblue");
    }
    c
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    value: f64,
    difference: f64,
}

pub fn gs(args: &GsArgs) -> Result<Rendered> {
    let (roots, s) = symbol(&args.symbol)?;
    let mut extra = serde_json::Map::new();
    let (limit, label) = match (args.p, args.function) {
        (Some(p), _) => {
            let g = gs_moment_exact(&s, p as usize)?;
            extra.insert("exact".into(), to_json(&g));
            (g.value, format!("p = {p}"))
        }
        (None, Some(Function::Exp)) => {
            let g = gs_average_quadrature(&s, |z: Complex64| z.exp(), args.nodes)?;
            extra.insert("quadrature".into(), to_json(&g));
            if roots.iter().all(|&a| a == 1.0) {
                extra.insert("closed_form".into(), to_json(&exp_average_all_ones(roots.len())));
            }
            (g.value, "f = exp".to_string())
        }
        (None, None) => unreachable!("clap requires -p or --function"),
    };
    let mut table = Vec::new();
    if args.table {
        for &n in &args.sizes {
            if n == 0 {
                return Err(CliError::Usage("table sizes must be positive".into()));
            }
            let value = match args.p {
                Some(p) => truncation_moments(&s, n, p as usize)[p as usize - 1],
                None => truncation_exp_average(&s, n),
            };
            table.push(TableRow {
                n,
                value,
                difference: value - limit,
            });
        }
    }
    let mut csv = String::new();
    csv_row(&mut csv, ["n", "value", "difference"].map(String::from));
    csv_row(&mut csv, ["inf".to_string(), num(limit), num(0.0)]);
    for r in &table {
        csv_row(&mut csv, [r.n.to_string(), num(r.value), num(r.difference)]);
    }
    let mut config = RunConfig::with_roots("gs", &roots, None);
    config.p = args.p.map(|p| p as usize);
    config.nodes = args.function.map(|_| args.nodes);
    extra.insert("config".into(), to_json(&config));
    extra.insert("average".into(), Value::String(label));
    extra.insert("limit".into(), json!(limit));
    extra.insert("table".into(), to_json(&table));
    Ok(Rendered {
        json: Value::Object(extra),
        csv,
    })
}

pub fn mc(args: &McArgs) -> Result<Rendered> {
    let dist = match args.dist {
        DistName::Lognormal => DistSpec::lognormal(args.sigma, args.m),
        DistName::Exp => DistSpec::exponential(args.mean, args.m),
        DistName::Bernoulli => DistSpec::bernoulli(args.q, args.m),
    };
    let p = args.p as usize;
    let cfg = EnsembleConfig {
        dist: dist.clone(),
        n: args.n,
        p,
        samples: args.samples,
        seed: args.seed,
        mode: match args.mode {
            ModeName::Sim => Mode::Simultaneous,
            ModeName::Indep => Mode::Independent,
        },
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let run = pool.install(|| run_ensemble(&cfg))?;

    let all_ones = binom_mp_p(args.m as u64, p as u64).to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    let bounds = match dist.sigmas() {
        Some(sigmas) => Some(expected_moment_lognormal(&sigmas, p)?),
        None => None,
    };
    let law = match dist.kind {
        DistKind::Bernoulli { q } => Some(bernoulli_moment_law(args.m, q, p)?),
        _ => None,
    };

    let mut csv = String::new();
    csv_row(&mut csv, ["side", "log10_lo", "log10_hi", "count"].map(String::from));
    if let Some(sum) = &run.summary {
        for (side, h) in [("lhs", &sum.lhs.log10_histogram), ("rhs", &sum.rhs.log10_histogram)] {
            for (k, &c) in h.counts.iter().enumerate() {
                csv_row(
                    &mut csv,
                    [side.to_string(), num(h.edges[k]), num(h.edges[k + 1]), c.to_string()],
                );
            }
        }
    }

    if let Some(path) = &args.svg {
        write_file(path, &ensemble_chart(&run, all_ones).render())?;
    }

    let config = RunConfig {
        command: "mc",
        roots: None,
        dist: Some(dist),
        n: Some(args.n),
        p: Some(p),
        steps: None,
        samples: Some(args.samples),
        seed: Some(args.seed),
        nodes: None,
    };
    Ok(Rendered {
        json: json!({
            "config": config,
            "mode": to_json(&cfg.mode),
            "summary": to_json(&run.summary),
            "all_ones_moment": all_ones,
            "bounds": to_json(&bounds),
            "bernoulli_law": to_json(&law),
        }),
        csv,
    })
}

/// Overlaid `log10` histograms of both sides on shared bins, with the
/// all-ones moment marked.
fn ensemble_chart(run: &EnsembleRun, all_ones: f64) -> Chart {
    let logs = |v: &[f64]| -> Vec<f64> {
        v.iter().filter(|x| **x > 0.0).map(|x| x.log10()).collect()
    };
    let lhs = logs(&run.lhs_samples);
    let rhs = logs(&run.rhs_samples);
    let (lo, hi) = range(lhs.iter().chain(&rhs).copied());
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let bins = tpht::ensemble::LOG_HISTOGRAM_BINS;
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
    let count = |v: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; bins];
        for &x in v {
            c[(((x - lo) / width) as usize).min(bins - 1)] += 1.0;
        }
        c
    };
    let (cl, cr) = (count(&lhs), count(&rhs));
    let top = cl.iter().chain(&cr).copied().fold(0.0, f64::max);
    let cfg = &run.config;
    let mut c = Chart::new(
        &format!(
            "p = {} moments, n = {}, {} samples (blue: trace, orange: symbol)",
            cfg.p, cfg.n, cfg.samples
        ),
        "log10 moment",
        "count",
        (edges[0], edges[bins]),
        (0.0, top),
    );
    c.bars(&edges, &cl, "steelblue", 0.5);
    c.bars(&edges, &cr, "darkorange", 0.5);
    if all_ones > 0.0 && all_ones.is_finite() {
        c.markers(&[all_ones.log10()], 0.0, "crimson");
    }
    c
}

pub fn fp_demo(args: &SymbolArgs, n: usize, curve_points: usize, svg: Option<&Path>) -> Result<Rendered> {
    let (roots, s) = symbol(args)?;
    if curve_points < 2 {
        return Err(CliError::Usage("--curve-points must be at least 2".into()));
    }
    let t = tpht_truncation(&s, n);
    let ev = hessenberg_eigenvalues(&t)?;
    let curve: Vec<Complex64> = (0..=curve_points)
        .map(|k| s.eval(2.0 * std::f64::consts::PI * k as f64 / curve_points as f64))
        .collect();
    let right = s.eval(0.0).re;
    let max_imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    let mut csv = String::new();
    csv_row(&mut csv, ["kind", "re", "im"].map(String::from));
    for z in &ev {
        csv_row(&mut csv, ["eigenvalue".to_string(), num(z.re), num(z.im)]);
    }
    for z in &curve {
        csv_row(&mut csv, ["curve".to_string(), num(z.re), num(z.im)]);
    }

    if let Some(path) = svg {
        let xs = range(ev.iter().chain(&curve).map(|z| z.re).chain([0.0, right]));
        let ys = range(ev.iter().chain(&curve).map(|z| z.im));
        let mut c = Chart::new(
            &format!("computed eigenvalues, n = {n}, against the symbol curve"),
            "Re",
            "Im",
            xs,
            ys,
        );
        c.polyline(&curve.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>(), "crimson");
        c.polyline(&[(0.0, 0.0), (right, 0.0)], "crimson");
        c.dots(&ev.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>(), "black");
        write_file(path, &c.render())?;
    }

    let pairs = |v: &[Complex64]| -> Vec<[f64; 2]> { v.iter().map(|z| [z.re, z.im]).collect() };
    let mut summary = String::new();
    let _ = write!(summary, "{} eigenvalues, max |Im| {max_imag:e}", ev.len());
    Ok(Rendered {
        json: json!({
            "config": RunConfig::with_roots("fp-demo", &roots, Some(n)),
            "eigenvalues": pairs(&ev),
            "max_imag": max_imag,
            "curve": pairs(&curve),
            "interval": [0.0, right],
            "summary": summary,
        }),
        csv,
    })
}
