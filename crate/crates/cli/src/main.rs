mod grid;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dope_core::ensembles::MultiplicativeFunctional;
use dope_core::fredholm::{charlier_expectation_det, det_continuum, joint_rows, plancherel_gap, tracy_widom, FredholmResult, IntervalSystem};
use dope_core::kernels::Kernel;
use dope_core::models::{percolation_gap_exact, word_gap, WordLength};
use dope_core::rsk::{bernoulli_path_max, longest_weakly_increasing, rsk_shape_intmatrix, rsk_shape_permutation, rsk_shape_word};
use dope_core::sampler::{
    below, empirical_law, exhaustive_permutation_shapes, exhaustive_word_shapes, sample_bernoulli_matrix, sample_geometric_matrix, sample_permutation, sample_poisson, sample_word,
    EmpiricalDistribution,
};
use dope_core::verify::{run_suite, SUITES};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::grid::{parse_grid, parse_int_grid};
use crate::manifest::{write_with_manifest, RunManifest};

#[derive(Parser)]
#[command(name = "dope", version, about = "Plancherel measures, discrete ensembles and Fredholm determinants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gap probabilities P[largest point <= threshold] as CSV.
    Gap(GapArgs),
    /// Tracy-Widom distribution, single or joint, as CSV.
    Tw(TwArgs),
    /// Empirical shape laws as JSON.
    Sample(SampleArgs),
    /// Run a named oracle suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum GapKernel {
    Bessel,
    Charlier,
    Airy,
    Hermite,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum GapModel {
    Percolation,
    Word,
}

#[derive(Args, Serialize)]
struct GapArgs {
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    kernel: Option<GapKernel>,
    #[arg(long)]
    model: Option<GapModel>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Rows of the matrix, letters of the alphabet, or particles.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Columns of the matrix or the word length.
    #[arg(long = "N")]
    n_len: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Integer thresholds for discrete models, e.g. `0..8`.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    /// Real thresholds for continuum kernels, e.g. `-4..2:0.25`.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TwArgs {
    /// Grid of `t` values for `F(t)`.
    #[arg(long = "t-grid", alias = "t", allow_hyphen_values = true, conflicts_with = "joint", required_unless_present = "joint")]
    t_grid: Option<String>,
    /// Thresholds `t_1,...,t_k` for the joint law of the `k` largest points.
    #[arg(long, allow_hyphen_values = true)]
    joint: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum SampleModel {
    /// RSK shape of a uniform permutation of `N`.
    Permutation,
    /// RSK shape of a uniform word of length `N` over `M` letters.
    Word,
    /// Longest weakly increasing subsequence of a word of Poisson(alpha)
    /// length over `M` letters.
    PoissonizedWord,
    /// RSK shape of an `M x N` matrix of geometric(q) entries.
    Geometric,
    /// Bernoulli(p) percolation time `L(W)` of an `M x N` matrix.
    Bernoulli,
}

#[derive(Args, Serialize)]
struct SampleArgs {
    #[arg(long)]
    model: SampleModel,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long = "N")]
    n_len: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Enumerate every permutation or word instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    suite: String,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Core(dope_core::Error),
    Io(std::io::Error),
    Checks(usize),
}

impl From<dope_core::Error> for Failure {
    fn from(e: dope_core::Error) -> Self {
        Self::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

type Outcome<T> = Result<T, Failure>;

fn need<T>(v: Option<T>, flag: &str, what: &str) -> Outcome<T> {
    v.ok_or_else(|| Failure::Usage(format!("{what} needs {flag}")))
}

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

/// 17 significant digits, enough to round-trip any `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

struct Row {
    threshold: String,
    value: f64,
    tail: f64,
}

impl Row {
    fn from_result(threshold: String, r: FredholmResult) -> Self {
        Self { threshold, value: r.value, tail: r.tail_estimate }
    }

    fn exact(threshold: usize, value: f64) -> Self {
        Self { threshold: threshold.to_string(), value, tail: 0.0 }
    }
}

fn table(rows: &[Row]) -> String {
    let mut s = String::from("threshold,value,tail_estimate\n");
    for r in rows {
        s.push_str(&format!("{},{},{}\n", r.threshold, num(r.value), num(r.tail)));
    }
    s
}

/// Rows in parallel, reported in grid order.
fn rows<T: Sync>(grid: &[T], f: impl Fn(&T) -> dope_core::Result<Row> + Sync) -> Outcome<Vec<Row>> {
    let out: Vec<dope_core::Result<Row>> = grid.par_iter().map(|x| f(x)).collect();
    Ok(out.into_iter().collect::<dope_core::Result<Vec<_>>>()?)
}

fn int_grid(s: Option<String>, default: impl FnOnce() -> Outcome<String>) -> Outcome<Vec<usize>> {
    let s = match s {
        Some(s) => s,
        None => default()?,
    };
    parse_int_grid(&s).map_err(Failure::Usage)
}

fn real_grid(s: Option<&String>, what: &str) -> Outcome<Vec<f64>> {
    parse_grid(need(s, "--t", what)?).map_err(Failure::Usage)
}

fn cmd_gap(a: &GapArgs) -> Outcome<String> {
    if !(a.tol > 0.0) {
        return usage("--tol must be positive");
    }
    let tol = a.tol;
    let rows = match (a.kernel, a.model) {
        (Some(GapKernel::Bessel), _) => {
            let alpha = need(a.alpha, "--alpha", "the Bessel kernel")?;
            let ns = int_grid(a.n.clone(), || usage("the Bessel kernel needs --n"))?;
            rows(&ns, |&n| Ok(Row::from_result(n.to_string(), plancherel_gap(alpha, n, tol)?)))?
        }
        (Some(GapKernel::Charlier), _) => {
            let alpha = need(a.alpha, "--alpha", "the Charlier kernel")?;
            let m = need(a.m, "--M", "the Charlier kernel")?;
            let ns = int_grid(a.n.clone(), || usage("the Charlier kernel needs --n"))?;
            rows(&ns, |&n| Ok(Row::from_result(n.to_string(), charlier_expectation_det(alpha, m, &MultiplicativeFunctional::first_row_at_most(n), tol)?)))?
        }
        (Some(GapKernel::Airy), _) => {
            let ts = real_grid(a.t.as_ref(), "the Airy kernel")?;
            rows(&ts, |&t| Ok(Row::from_result(t.to_string(), tracy_widom(t, tol)?)))?
        }
        (Some(GapKernel::Hermite), _) => {
            let m = need(a.m, "--M", "the Hermite kernel")?;
            let ts = real_grid(a.t.as_ref(), "the Hermite kernel")?;
            rows(&ts, |&t| Ok(Row::from_result(t.to_string(), det_continuum(&Kernel::Hermite { m }, t, tol)?)))?
        }
        (None, Some(GapModel::Percolation)) => {
            let m = need(a.m, "--M", "percolation")?;
            let cols = need(a.n_len, "--N", "percolation")?;
            let p = need(a.p, "--p", "percolation")?;
            if !(p > 0.0 && p < 1.0) {
                return usage(format!("--p must lie in (0, 1), got {p}"));
            }
            let pr = BigRational::from_float(p).expect("finite");
            let ns = int_grid(a.n.clone(), || Ok(format!("0..{m}")))?;
            rows(&ns, |&n| Ok(Row::exact(n, percolation_gap_exact(m, cols, n, &pr)?.to_f64().unwrap_or(f64::NAN))))?
        }
        (None, Some(GapModel::Word)) => {
            let m = need(a.m, "--M", "the word model")?;
            let len = match (a.n_len, a.alpha) {
                (Some(n), None) => WordLength::Fixed(n),
                (None, Some(alpha)) => WordLength::Poissonized(alpha),
                _ => return usage("the word model needs exactly one of --N and --alpha"),
            };
            let default_top = match len {
                WordLength::Fixed(n) => n,
                WordLength::Poissonized(alpha) => (alpha + 10.0 * alpha.sqrt() + 10.0).ceil() as usize,
            };
            let ns = int_grid(a.n.clone(), || Ok(format!("0..{default_top}")))?;
            rows(&ns, |&n| Ok(Row::exact(n, word_gap(m, len, n)?)))?
        }
        (None, None) => return usage("gap needs --kernel or --model"),
    };
    Ok(table(&rows))
}

fn cmd_tw(a: &TwArgs) -> Outcome<String> {
    if !(a.tol > 0.0) {
        return usage("--tol must be positive");
    }
    if let Some(ts) = &a.t_grid {
        let ts = parse_grid(ts).map_err(Failure::Usage)?;
        return Ok(table(&rows(&ts, |&t| Ok(Row::from_result(t.to_string(), tracy_widom(t, a.tol)?)))?));
    }
    let ts = parse_grid(need(a.joint.as_ref(), "--t-grid or --joint", "tw")?).map_err(Failure::Usage)?;
    let value = joint_rows(&Kernel::Airy, &IntervalSystem::new(&ts)?, a.tol)?;
    // the law of the first k-1 points bounds the joint law from above, and
    // equals it when the last threshold does not bind
    let k = ts.len();
    let marginal = if k == 1 { value.value } else { joint_rows(&Kernel::Airy, &IntervalSystem::new(&ts[..k - 1])?, a.tol)?.value };
    let slack = 1e-8;
    let binding = k > 1 && ts[k - 1] < ts[k - 2];
    let consistent = (-slack..=1.0 + slack).contains(&value.value) && value.value <= marginal + slack && (binding || (value.value - marginal).abs() < 1e-6);
    let thresholds: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
    Ok(format!(
        "thresholds,value,tail_estimate,marginal,marginal_consistent\n{},{},{},{},{}\n",
        thresholds.join(";"),
        num(value.value),
        num(value.tail_estimate),
        num(marginal),
        consistent
    ))
}

fn law_json<K: Ord + Clone + Serialize>(d: &EmpiricalDistribution<K>) -> String {
    serde_json::to_string_pretty(d).expect("distribution serializes") + "\n"
}

fn cmd_sample(a: &SampleArgs) -> Outcome<String> {
    let seed = a.seed;
    if a.exhaustive {
        let d = match a.model {
            SampleModel::Permutation => exhaustive_permutation_shapes(need(a.n_len, "--N", "permutations")?)?,
            SampleModel::Word => exhaustive_word_shapes(need(a.m, "--M", "words")?, need(a.n_len, "--N", "words")?)?,
            other => return usage(format!("--exhaustive is not available for {other:?}")),
        };
        if let Some(s) = a.samples {
            if s != d.total {
                return usage(format!("--samples {s} does not match the {} outcomes enumerated", d.total));
            }
        }
        return Ok(law_json(&d));
    }
    let samples = need(a.samples, "--samples", "sampling")?;
    if samples == 0 {
        return usage("--samples must be positive");
    }
    let out = match a.model {
        SampleModel::Permutation => {
            let n = need(a.n_len, "--N", "permutations")?;
            law_json(&empirical_law(samples, seed, |r| rsk_shape_permutation(&sample_permutation(n, r)))?)
        }
        SampleModel::Word => {
            let (m, n) = (need(a.m, "--M", "words")?, need(a.n_len, "--N", "words")?);
            law_json(&empirical_law(samples, seed, |r| Ok(rsk_shape_word(&sample_word(m, n, r)?)))?)
        }
        SampleModel::PoissonizedWord => {
            let m = need(a.m, "--M", "words")?;
            let alpha = need(a.alpha, "--alpha", "Poissonized words")?;
            if m == 0 {
                return usage("--M must be positive");
            }
            law_json(&empirical_law(samples, seed, |r| {
                let len = sample_poisson(alpha, r)?;
                let w: Vec<usize> = (0..len).map(|_| below(r, m as u64) as usize).collect();
                Ok(longest_weakly_increasing(&w))
            })?)
        }
        SampleModel::Geometric => {
            let (m, n) = (need(a.m, "--M", "geometric matrices")?, need(a.n_len, "--N", "geometric matrices")?);
            let q = need(a.q, "--q", "geometric matrices")?;
            law_json(&empirical_law(samples, seed, |r| Ok(rsk_shape_intmatrix(&sample_geometric_matrix(m, n, q, r)?)))?)
        }
        SampleModel::Bernoulli => {
            let (m, n) = (need(a.m, "--M", "Bernoulli matrices")?, need(a.n_len, "--N", "Bernoulli matrices")?);
            let p = need(a.p, "--p", "Bernoulli matrices")?;
            law_json(&empirical_law(samples, seed, |r| Ok(bernoulli_path_max(&sample_bernoulli_matrix(m, n, p, r)?)))?)
        }
    };
    Ok(out)
}

fn cmd_verify(a: &VerifyArgs) -> Outcome<(String, usize)> {
    if !SUITES.contains(&a.suite.as_str()) {
        return usage(format!("unknown suite `{}`; known: {}", a.suite, SUITES.join(", ")));
    }
    let checks = run_suite(&a.suite)?;
    let mut s = String::new();
    let mut failed = 0;
    for c in &checks {
        if !c.passed {
            failed += 1;
        }
        s.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    s.push_str(&format!("{}: {} of {} checks passed\n", a.suite, checks.len() - failed, checks.len()));
    Ok((s, failed))
}

fn emit(command: &str, params: &impl Serialize, seed: Option<u64>, out: Option<&PathBuf>, body: &str, start: Instant) -> Outcome<()> {
    match out {
        None => print!("{body}"),
        Some(path) => {
            let manifest = RunManifest {
                command: command.into(),
                params: serde_json::to_value(params).expect("parameters serialize"),
                argv: std::env::args().skip(1).collect(),
                seed,
                version: env!("CARGO_PKG_VERSION").into(),
                wall_time_seconds: start.elapsed().as_secs_f64(),
                output_sha256: String::new(),
            };
            write_with_manifest(path, body, manifest)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    let start = Instant::now();
    match &cli.command {
        Command::Gap(a) => emit("gap", a, None, a.out.as_ref(), &cmd_gap(a)?, start),
        Command::Tw(a) => emit("tw", a, None, a.out.as_ref(), &cmd_tw(a)?, start),
        Command::Sample(a) => {
            let body = cmd_sample(a)?;
            emit("sample", a, (!a.exhaustive).then_some(a.seed), a.out.as_ref(), &body, start)
        }
        Command::Verify(a) => {
            let (body, failed) = cmd_verify(a)?;
            emit("verify", a, None, a.out.as_ref(), &body, start)?;
            if failed > 0 {
                return Err(Failure::Checks(failed));
            }
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("DOPE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("DOPE_THREADS=`{v}` is not a positive integer"))?;
    if n == 0 {
        return Err("DOPE_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                dope_core::Error::NoConvergence(_) | dope_core::Error::Truncation { .. } => ExitCode::from(3),
                dope_core::Error::Domain(_) | dope_core::Error::TooLarge(_) => ExitCode::from(2),
            }
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Checks(n)) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(1)
        }
    }
}
