//! Probability mass functions of the partition-valued ensembles and their
//! Coulomb-gas forms in particle coordinates.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::numeric::{factorial, ln_binomial, ln_factorial, log_sum_exp, poisson_tail};
use crate::partitions::{enumerate_partitions, frobenius_dimension, ln_frobenius_dimension, vandermonde_v, weight_w, ParticleConfig, Partition};

/// Largest tail mass a truncated sum may leave behind.
pub const MAX_TAIL: f64 = 1e-6;

/// Enumeration cap for finite-support families summed configuration by
/// configuration.
pub const MAX_CONFIGS: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EnsembleSpec {
    /// `(f^λ)^2 / N!` on partitions of `n`.
    Plancherel { n: usize },
    PoissonizedPlancherel { alpha: f64 },
    /// Pushforward of `m x n` geometric(q) matrices, `n >= m`.
    Meixner { m: usize, n: usize, q: f64 },
    Charlier { m: usize, alpha: f64 },
    /// Shape law of uniform words of length `n` over `m` letters.
    Words { m: usize, n: usize },
    /// `n` particles in `{0..k}` with binomial(k, p) weight.
    Krawtchouk { n: usize, k: usize, p: f64 },
    /// `particles` points in `{0..n}` with Hahn weight of parameters
    /// `alpha`, `beta`.
    Hahn { particles: usize, alpha: f64, beta: f64, n: usize },
}

impl EnsembleSpec {
    /// The hexagon slice case `α = β = a - k`, support `{0..a+k-1}`.
    pub fn hexagon(a: usize, k: usize) -> Result<Self> {
        if a == 0 || k > a {
            return domain(format!("need a >= 1 and k <= a, got a={a}, k={k}"));
        }
        let alpha = (a - k) as f64;
        Ok(Self::Hahn { particles: k, alpha, beta: alpha, n: a + k - 1 })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Plancherel { .. } => true,
            Self::PoissonizedPlancherel { alpha } => alpha > 0.0 && alpha.is_finite(),
            Self::Meixner { m, n, q } => m >= 1 && n >= m && q > 0.0 && q < 1.0,
            Self::Charlier { m, alpha } => m >= 1 && alpha > 0.0 && alpha.is_finite(),
            Self::Words { m, .. } => m >= 1,
            Self::Krawtchouk { n, k, p } => n >= 1 && k + 1 >= n && p > 0.0 && p < 1.0,
            Self::Hahn { particles, alpha, beta, n } => particles <= n + 1 && alpha >= 0.0 && beta >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            domain(format!("invalid parameters {self:?}"))
        }
    }

    /// Number of particles used for the Coulomb-gas picture, when finite.
    pub fn particles(&self) -> Option<usize> {
        match *self {
            Self::Meixner { m, .. } | Self::Charlier { m, .. } | Self::Words { m, .. } => Some(m),
            Self::Krawtchouk { n, .. } => Some(n),
            Self::Hahn { particles, .. } => Some(particles),
            Self::Plancherel { .. } | Self::PoissonizedPlancherel { .. } => None,
        }
    }

    fn has_finite_support(&self) -> bool {
        matches!(self, Self::Plancherel { .. } | Self::Words { .. } | Self::Krawtchouk { .. } | Self::Hahn { .. })
    }
}

/// `g(λ) = ∏_i f(λ_i + L - i)` for a bounded `f` equal to 1 on negatives.
#[derive(Clone)]
pub struct MultiplicativeFunctional {
    f: Arc<dyn Fn(i64) -> f64 + Send + Sync>,
    shift: usize,
    sup: f64,
}

impl fmt::Debug for MultiplicativeFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeFunctional").field("shift", &self.shift).field("sup", &self.sup).finish()
    }
}

impl MultiplicativeFunctional {
    /// Wraps `f`; values at negative arguments are forced to 1. `sup` must
    /// bound `|f|`.
    pub fn new(f: impl Fn(i64) -> f64 + Send + Sync + 'static, shift: usize, sup: f64) -> Self {
        Self { f: Arc::new(f), shift, sup: sup.max(1.0) }
    }

    pub fn one() -> Self {
        Self::new(|_| 1.0, 0, 1.0)
    }

    /// `f = 1 - χ_{[n, ∞)}` with no shift, so that `g(λ) = 1{λ_1 <= n}`.
    pub fn first_row_at_most(n: usize) -> Self {
        Self::new(move |k| if k < n as i64 { 1.0 } else { 0.0 }, 0, 1.0)
    }

    pub fn f(&self, k: i64) -> f64 {
        if k < 0 {
            1.0
        } else {
            (self.f)(k)
        }
    }

    /// `φ = f - 1`, supported on the nonnegative integers.
    pub fn phi(&self, k: i64) -> f64 {
        self.f(k) - 1.0
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    /// `c(g) = sup |f|`.
    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn eval(&self, lambda: &Partition) -> f64 {
        let l = self.shift as i64;
        (1..=lambda.length() + self.shift)
            .map(|i| self.f(lambda.part(i) as i64 + l - i as i64))
            .product()
    }
}

/// A truncated sum together with a bound on the omitted mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSum {
    pub value: f64,
    pub tail: f64,
}

fn ln_vandermonde_sq(parts: &[usize]) -> f64 {
    let m = parts.len();
    let mut s = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            s += 2.0 * ((parts[i] + j - i - parts[j]) as f64).ln();
        }
    }
    s
}

fn ln_w(parts: &[usize]) -> f64 {
    let m = parts.len();
    -parts.iter().enumerate().map(|(i, &x)| ln_factorial((x + m - 1 - i) as u64)).sum::<f64>()
}

/// `ln Δ(h)^2` for distinct positions.
pub fn ln_delta_sq(h: &[usize]) -> f64 {
    let mut s = 0.0;
    for i in 0..h.len() {
        for j in i + 1..h.len() {
            s += 2.0 * (h[i] as f64 - h[j] as f64).abs().ln();
        }
    }
    s
}

/// `ln C(x + a, x)` for real `a >= 0`.
fn ln_gen_binomial(x: usize, a: f64) -> f64 {
    ln_gamma(x as f64 + a + 1.0) - ln_factorial(x as u64) - ln_gamma(a + 1.0)
}

/// Single-site log weight of the finite particle families.
pub fn ln_site_weight(spec: &EnsembleSpec, x: usize) -> f64 {
    match *spec {
        EnsembleSpec::Meixner { m, n, q } => ln_binomial((x + n - m) as u64, x as u64) + x as f64 * q.ln(),
        EnsembleSpec::Charlier { m, alpha } => {
            let a = alpha / m as f64;
            x as f64 * a.ln() - a - ln_factorial(x as u64)
        }
        EnsembleSpec::Krawtchouk { k, p, .. } => {
            if x > k {
                f64::NEG_INFINITY
            } else {
                ln_binomial(k as u64, x as u64) + x as f64 * p.ln() + (k - x) as f64 * (1.0 - p).ln()
            }
        }
        EnsembleSpec::Hahn { alpha, beta, n, .. } => {
            if x > n {
                f64::NEG_INFINITY
            } else {
                ln_gen_binomial(x, alpha) + ln_gen_binomial(n - x, beta)
            }
        }
        _ => f64::NAN,
    }
}

/// `ln Z` for the Krawtchouk ensemble, summed over ordered tuples.
pub fn krawtchouk_ln_z(n: usize, k: usize, p: f64) -> f64 {
    let q = 1.0 - p;
    let mut s = ln_factorial(n as u64) + n as f64 * ln_factorial(k as u64);
    for j in 0..n {
        s += ln_factorial(j as u64) - ln_factorial((k - j) as u64);
    }
    s + (n * n.saturating_sub(1) / 2) as f64 * (p * q).ln()
}

/// Log probability of `λ`, or `None` outside the support.
pub fn ln_pmf(spec: &EnsembleSpec, lambda: &Partition) -> Result<Option<f64>> {
    spec.validate()?;
    let big_n = lambda.size();
    let v = match *spec {
        EnsembleSpec::Plancherel { n } => {
            (big_n == n).then(|| 2.0 * ln_frobenius_dimension(lambda) - ln_factorial(n as u64))
        }
        EnsembleSpec::PoissonizedPlancherel { alpha } => Some(
            -alpha + big_n as f64 * alpha.ln() + 2.0 * ln_frobenius_dimension(lambda) - 2.0 * ln_factorial(big_n as u64),
        ),
        EnsembleSpec::Meixner { m, n, q } => (lambda.length() <= m).then(|| {
            let parts = lambda.padded(m).unwrap();
            let mut s = (m * n) as f64 * (1.0 - q).ln();
            for j in 0..m {
                s += ln_factorial((n - m) as u64) - ln_factorial(j as u64) - ln_factorial((n - m + j) as u64);
            }
            s += ln_vandermonde_sq(&parts);
            for (i, &x) in parts.iter().enumerate() {
                s += ln_binomial((x + n - 1 - i) as u64, (x + m - 1 - i) as u64) + x as f64 * q.ln();
            }
            s
        }),
        EnsembleSpec::Charlier { m, alpha } => (lambda.length() <= m).then(|| {
            let parts = lambda.padded(m).unwrap();
            let a = alpha / m as f64;
            let mut s = -(1..m).map(|j| ln_factorial(j as u64)).sum::<f64>();
            s += ln_vandermonde_sq(&parts) + ln_w(&parts);
            s + big_n as f64 * a.ln() - alpha
        }),
        EnsembleSpec::Words { m, n } => (lambda.length() <= m && big_n == n).then(|| {
            let parts = lambda.padded(m).unwrap();
            let mut s = ln_factorial(n as u64) - n as f64 * (m as f64).ln();
            s -= (1..m).map(|j| ln_factorial(j as u64)).sum::<f64>();
            s + ln_vandermonde_sq(&parts) + ln_w(&parts)
        }),
        EnsembleSpec::Krawtchouk { n, .. } | EnsembleSpec::Hahn { particles: n, .. } => {
            if lambda.length() > n {
                None
            } else {
                let h = ParticleConfig::from_partition(lambda, n)?;
                return ln_pmf_particles(spec, &h);
            }
        }
    };
    Ok(v)
}

/// Probability of `λ`; zero outside the support.
pub fn pmf(spec: &EnsembleSpec, lambda: &Partition) -> Result<f64> {
    Ok(ln_pmf(spec, lambda)?.map_or(0.0, f64::exp))
}

/// Log probability of an unordered particle configuration for the
/// families with a fixed particle count.
pub fn ln_pmf_particles(spec: &EnsembleSpec, h: &ParticleConfig) -> Result<Option<f64>> {
    spec.validate()?;
    match *spec {
        EnsembleSpec::Krawtchouk { n, k, p } => {
            if h.count() != n {
                return domain(format!("expected {n} particles, got {}", h.count()));
            }
            if h.positions()[0] > k {
                return Ok(None);
            }
            let w: f64 = h.positions().iter().map(|&x| ln_site_weight(spec, x)).sum();
            Ok(Some(ln_factorial(n as u64) + ln_delta_sq(h.positions()) + w - krawtchouk_ln_z(n, k, p)))
        }
        EnsembleSpec::Hahn { particles, n, .. } => {
            if h.count() != particles {
                return domain(format!("expected {particles} particles, got {}", h.count()));
            }
            if particles > 0 && h.positions()[0] > n {
                return Ok(None);
            }
            let w: f64 = h.positions().iter().map(|&x| ln_site_weight(spec, x)).sum();
            Ok(Some(ln_delta_sq(h.positions()) + w - hahn_ln_z(spec)?))
        }
        _ => {
            let m = spec.particles().ok_or_else(|| Error::Domain("family has no particle picture".into()))?;
            if h.count() != m {
                return domain(format!("expected {m} particles, got {}", h.count()));
            }
            ln_pmf(spec, &h.to_partition())
        }
    }
}

pub fn pmf_particles(spec: &EnsembleSpec, h: &ParticleConfig) -> Result<f64> {
    Ok(ln_pmf_particles(spec, h)?.map_or(0.0, f64::exp))
}

/// All `k`-subsets of `{0..n}` in decreasing order, as a flat visitor.
pub fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            let mut desc = cur.clone();
            desc.reverse();
            visit(&desc);
            return;
        }
        let need = k - cur.len();
        for x in start..=n + 1 - need {
            cur.push(x);
            rec(x + 1, n, k, cur, visit);
            cur.pop();
        }
    }
    if k > n + 1 {
        return;
    }
    rec(0, n, k, &mut Vec::with_capacity(k), &mut visit);
}

fn subset_count(n: usize, k: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (n as u128 + 1 - i) / (i + 1);
        if c > MAX_CONFIGS * 1000 {
            break;
        }
    }
    c
}

/// `ln Σ_{sets} Δ^2 ∏ w` for the Hahn ensemble, by direct summation.
pub fn hahn_ln_z(spec: &EnsembleSpec) -> Result<f64> {
    let EnsembleSpec::Hahn { particles, n, .. } = *spec else {
        return domain("not a Hahn ensemble");
    };
    if subset_count(n, particles) > MAX_CONFIGS {
        return Err(Error::TooLarge(format!("{particles} particles on {{0..{n}}}")));
    }
    let w: Vec<f64> = (0..=n).map(|x| ln_site_weight(spec, x)).collect();
    let mut terms = Vec::new();
    for_each_subset(n, particles, |h| terms.push(ln_delta_sq(h) + h.iter().map(|&x| w[x]).sum::<f64>()));
    Ok(log_sum_exp(&terms))
}

/// Negative binomial upper tail `P[S > t]`, `S ~ NegBin(r, q)`.
fn negbin_tail(r: usize, q: f64, t: usize) -> f64 {
    let mut tail = 0.0;
    let mean = r as f64 * q / (1.0 - q);
    let mut s = t + 1;
    loop {
        let p = (ln_binomial((s + r - 1) as u64, s as u64) + s as f64 * q.ln() + r as f64 * (1.0 - q).ln()).exp();
        tail += p;
        if s as f64 > mean && p <= 1e-20 * tail.max(1e-300) {
            return tail;
        }
        s += 1;
    }
}

/// Upper bound on the mass of configurations with `|λ| > truncation`.
pub fn tail_bound(spec: &EnsembleSpec, truncation: usize) -> f64 {
    match *spec {
        EnsembleSpec::PoissonizedPlancherel { alpha } | EnsembleSpec::Charlier { alpha, .. } => poisson_tail(alpha, truncation as u64),
        EnsembleSpec::Meixner { m, n, q } => negbin_tail(m * n, q, truncation),
        _ => 0.0,
    }
}

/// Smallest size cutoff whose tail bound is below `tol`.
pub fn auto_truncation(spec: &EnsembleSpec, tol: f64) -> Result<usize> {
    spec.validate()?;
    if spec.has_finite_support() {
        return Ok(max_size(spec, 0));
    }
    let mut t = 0;
    while tail_bound(spec, t) > tol {
        t += 1;
        if t > 100_000 {
            return Err(Error::NoConvergence("tail bound does not fall below tolerance".into()));
        }
    }
    Ok(t)
}

fn max_size(spec: &EnsembleSpec, truncation: usize) -> usize {
    match *spec {
        EnsembleSpec::Plancherel { n } | EnsembleSpec::Words { n, .. } => n,
        EnsembleSpec::Krawtchouk { n, k, .. } => n * (k + 1 - n),
        EnsembleSpec::Hahn { particles, n, .. } => particles * (n + 1 - particles),
        _ => truncation,
    }
}

/// Every partition in the support with `|λ| <= truncation` (finite
/// families ignore the truncation).
pub fn support(spec: &EnsembleSpec, truncation: usize) -> Result<Vec<Partition>> {
    spec.validate()?;
    let (lo, hi, len, part) = match *spec {
        EnsembleSpec::Plancherel { n } => (n, n, n, n),
        EnsembleSpec::Words { m, n } => (n, n, m, n),
        EnsembleSpec::PoissonizedPlancherel { .. } => (0, truncation, truncation, truncation),
        EnsembleSpec::Meixner { m, .. } | EnsembleSpec::Charlier { m, .. } => (0, truncation, m, truncation),
        EnsembleSpec::Krawtchouk { n, k, .. } => {
            if subset_count(k, n) > MAX_CONFIGS {
                return Err(Error::TooLarge(format!("{n} particles on {{0..{k}}}")));
            }
            (0, max_size(spec, 0), n, k + 1 - n)
        }
        EnsembleSpec::Hahn { particles, n, .. } => {
            if subset_count(n, particles) > MAX_CONFIGS {
                return Err(Error::TooLarge(format!("{particles} particles on {{0..{n}}}")));
            }
            (0, max_size(spec, 0), particles, n + 1 - particles)
        }
    };
    Ok((lo..=hi).flat_map(|s| enumerate_partitions(s, len, part)).collect())
}

fn check_tail(tail: f64) -> Result<()> {
    if tail > MAX_TAIL {
        return Err(Error::Truncation { tail, limit: MAX_TAIL });
    }
    Ok(())
}

/// Total probability over the truncated support, with the tail bound.
pub fn normalization(spec: &EnsembleSpec, truncation: usize) -> Result<TruncatedSum> {
    expectation(spec, &MultiplicativeFunctional::one(), truncation)
}

/// `Σ_λ g(λ) P[λ]` over the truncated support.
pub fn expectation(spec: &EnsembleSpec, g: &MultiplicativeFunctional, truncation: usize) -> Result<TruncatedSum> {
    let tail = tail_bound(spec, truncation);
    check_tail(tail)?;
    let hahn_z = match spec {
        EnsembleSpec::Hahn { .. } => Some(hahn_ln_z(spec)?),
        _ => None,
    };
    let mut value = 0.0;
    for lambda in support(spec, truncation)? {
        let lp = match (hahn_z, *spec) {
            (Some(z), EnsembleSpec::Hahn { particles, .. }) => {
                let h = ParticleConfig::from_partition(&lambda, particles)?;
                let w: f64 = h.positions().iter().map(|&x| ln_site_weight(spec, x)).sum();
                Some(ln_delta_sq(h.positions()) + w - z)
            }
            _ => ln_pmf(spec, &lambda)?,
        };
        if let Some(lp) = lp {
            let gv = g.eval(&lambda);
            if gv != 0.0 {
                value += gv * lp.exp();
            }
        }
    }
    let growth = match spec.particles() {
        Some(m) => g.sup().powi((m + g.shift()) as i32),
        None => g.sup().powi((truncation + g.shift()) as i32),
    };
    Ok(TruncatedSum { value, tail: tail * growth })
}

/// Ratio `F_M[g] / F_M[1]` of the Coulomb-gas approximation with weight
/// `Δ(x)^2 ∏ α^{x_i} / (x_i!)^2` on `M` particles, summed over
/// `|λ| <= truncation`.
pub fn coulomb_approx_f(alpha: f64, m: usize, g: &MultiplicativeFunctional, truncation: usize) -> Result<TruncatedSum> {
    if alpha <= 0.0 || m < g.shift() {
        return domain(format!("need alpha > 0 and M >= L, got alpha={alpha}, M={m}, L={}", g.shift()));
    }
    let mut num = Vec::new();
    let mut den = Vec::new();
    for lambda in (0..=truncation).flat_map(|s| enumerate_partitions(s, m, s)) {
        let x: Vec<usize> = (1..=m).map(|j| lambda.part(m + 1 - j) + j - 1).collect();
        let lw = ln_delta_sq(&x) + x.iter().map(|&xi| xi as f64 * alpha.ln() - 2.0 * ln_factorial(xi as u64)).sum::<f64>();
        den.push(lw);
        let gv = g.eval(&lambda);
        if gv > 0.0 {
            num.push(lw + gv.ln());
        } else if gv < 0.0 {
            return domain("coulomb approximation is implemented for nonnegative g");
        }
    }
    let ln_den = log_sum_exp(&den);
    // the unrestricted sum of (f^λ/|λ|!)^2 α^|λ| is e^α; compare the captured
    // mass against it to bound what lies beyond the cutoff.
    let shift = (m * m.saturating_sub(1) / 2) as f64 * alpha.ln();
    let captured = (ln_den - shift - alpha).exp();
    let tail = poisson_tail(alpha, truncation as u64) / captured;
    check_tail(tail)?;
    Ok(TruncatedSum { value: (log_sum_exp(&num) - ln_den).exp(), tail })
}

/// Limiting particle density `u(t)` of the constrained Coulomb gas.
pub fn equilibrium_density(t: f64, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return domain(format!("r must be positive, got {r}"));
    }
    let lo = 1.0 - 2.0 / r;
    let hi = 1.0 + 2.0 / r;
    Ok(if t <= lo {
        1.0
    } else if t >= hi {
        0.0
    } else {
        0.5 - (r * (t - 1.0) / 2.0).asin() / std::f64::consts::PI
    })
}

/// Exact `(f^λ)^2 / N!`.
pub fn plancherel_exact(lambda: &Partition) -> BigRational {
    let f = BigInt::from(frobenius_dimension(lambda));
    BigRational::new(&f * &f, BigInt::from(factorial(lambda.size() as u64)))
}

/// Exact shape probability of a uniform word of length `n` over `m` letters.
pub fn word_measure_exact(m: usize, n: usize, lambda: &Partition) -> BigRational {
    if lambda.size() != n || lambda.length() > m {
        return BigRational::zero();
    }
    let v = BigInt::from(vandermonde_v(lambda, m).unwrap());
    let mut r = weight_w(lambda, m).unwrap() * BigRational::from_integer(&v * &v);
    r *= BigRational::new(BigInt::from(factorial(n as u64)), BigInt::from(BigUint::from(m).pow(n as u32)));
    for j in 1..m {
        r /= BigRational::from_integer(BigInt::from(factorial(j as u64)));
    }
    r
}

/// Exact Krawtchouk probability of an unordered configuration of `n`
/// particles in `{0..k}` with rational `p`, normalized by direct summation.
pub fn krawtchouk_exact_table(n: usize, k: usize, p: &BigRational) -> Result<Vec<(Vec<usize>, BigRational)>> {
    if n == 0 || k + 1 < n || subset_count(k, n) > MAX_CONFIGS {
        return domain(format!("unsupported Krawtchouk size n={n}, k={k}"));
    }
    let q = BigRational::one() - p;
    let w: Vec<BigRational> = (0..=k)
        .map(|x| BigRational::from_integer(BigInt::from(crate::numeric::binomial(k as u64, x as u64))) * p.pow(x as i32) * (&q).pow((k - x) as i32))
        .collect();
    let mut out = Vec::new();
    let mut z = BigRational::zero();
    for_each_subset(k, n, |h| {
        let mut t = BigRational::one();
        for i in 0..h.len() {
            t *= &w[h[i]];
            for j in i + 1..h.len() {
                let d = BigRational::from_integer(BigInt::from(h[i] - h[j]));
                t *= &d * &d;
            }
        }
        z += &t;
        out.push((h.to_vec(), t));
    });
    for (_, t) in out.iter_mut() {
        *t /= &z;
    }
    Ok(out)
}

/// Closed-form `Z` of the Krawtchouk ensemble as an exact rational.
pub fn krawtchouk_z_exact(n: usize, k: usize, p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    let mut z = BigRational::from_integer(BigInt::from(factorial(n as u64)));
    for j in 0..n {
        z *= BigRational::new(BigInt::from(factorial(j as u64)), BigInt::from(factorial((k - j) as u64)));
    }
    z *= BigRational::from_integer(BigInt::from(factorial(k as u64))).pow(n as i32);
    z * (p * &q).pow((n * n.saturating_sub(1) / 2) as i32)
}
