//! Correlation kernels on the integer lattice and on the real line, and
//! their rescalings near the edge and in the bulk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::ln_binomial;
use crate::quad::integrate_doubling;
use crate::specfun::{airy, bessel_j_range, bessel_l_range, charlier_a, charlier_d, charlier_f, ContourWeight};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case")]
pub enum Kernel {
    /// Discrete Bessel kernel with parameter `alpha`.
    Bessel { alpha: f64 },
    /// Christoffel-Darboux kernel of `m` orthonormal Charlier functions with
    /// weight parameter `alpha / m`.
    Charlier { alpha: f64, m: usize },
    /// Meixner kernel for `m` particles, weight `C(x+k-1, x) q^x`.
    Meixner { q: f64, k: usize, m: usize },
    /// Unscaled Hermite kernel of `m` Hermite functions.
    Hermite { m: usize },
    Airy,
    DiscreteSine { r: f64 },
    Sine,
}

const NEAR_DIAGONAL: f64 = 1e-6;

impl Kernel {
    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::Bessel { .. } | Self::Charlier { .. } | Self::Meixner { .. } | Self::DiscreteSine { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Bessel { alpha } => alpha >= 0.0 && alpha.is_finite(),
            Self::Charlier { alpha, m } => alpha > 0.0 && m >= 1,
            Self::Meixner { q, k, m } => q > 0.0 && q < 1.0 && k >= 1 && m >= 1,
            Self::Hermite { m } => m >= 1,
            Self::DiscreteSine { r } => r > -2.0 && r < 2.0,
            Self::Airy | Self::Sine => true,
        };
        if ok {
            Ok(())
        } else {
            domain(format!("invalid kernel parameters {self:?}"))
        }
    }

    /// `K(x, y)`; discrete kernels require integer arguments.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.matrix_rect(&[x], &[y])?[0])
    }

    /// The symmetric matrix `[K(p_i, p_j)]`, row-major.
    pub fn matrix(&self, points: &[f64]) -> Result<Vec<f64>> {
        self.matrix_rect(points, points)
    }

    /// `[K(x_i, y_j)]` for two point lists, sharing special-function work.
    pub fn matrix_rect(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        if self.is_discrete() {
            if let Some(bad) = xs.iter().chain(ys).find(|v| v.fract() != 0.0) {
                return domain(format!("lattice kernel evaluated at non-integer point {bad}"));
            }
        }
        let xi: Vec<i64> = xs.iter().map(|&v| v as i64).collect();
        let yi: Vec<i64> = ys.iter().map(|&v| v as i64).collect();
        match *self {
            Self::Bessel { alpha } => bessel_matrix(alpha, &xi, &yi),
            Self::Charlier { alpha, m } => {
                let a = alpha / m as f64;
                Ok(cd_matrix(&xi, &yi, m, alpha.sqrt(), |x| if x < 0 { vec![0.0; m + 1] } else { charlier_functions(m + 1, x as u64, a) }))
            }
            Self::Meixner { q, k, m } => {
                let lead = (m as f64 * (m as f64 + k as f64 - 1.0) * q).sqrt() / (1.0 - q);
                Ok(cd_matrix(&xi, &yi, m, lead, |x| if x < 0 { vec![0.0; m + 1] } else { meixner_functions(m + 1, x as u64, q, k) }))
            }
            Self::Hermite { m } => Ok(pairwise(xs, ys, |x, y| hermite_kernel(m, x, y))),
            Self::Airy => Ok(pairwise(xs, ys, airy_kernel)),
            Self::Sine => Ok(pairwise(xs, ys, |x, y| {
                let d = x - y;
                if d.abs() < NEAR_DIAGONAL {
                    1.0
                } else {
                    (PI * d).sin() / (PI * d)
                }
            })),
            Self::DiscreteSine { r } => Ok(pairwise(xs, ys, |x, y| discrete_sine(r, (x - y) as i64))),
        }
    }

    /// Rescaled kernel near the upper edge, which tends to the Airy kernel.
    pub fn scaled_edge(&self, xi: f64, eta: f64) -> Result<f64> {
        match *self {
            Self::Bessel { alpha } => {
                let s = alpha.powf(1.0 / 6.0);
                let c = 2.0 * alpha.sqrt();
                let x = round_half_up(c + xi * s);
                let y = round_half_up(c + eta * s);
                Ok(s * self.eval(x, y)?)
            }
            Self::Charlier { alpha, m } => {
                let (nu, sigma) = charlier_edge(alpha, m);
                let base = nu.floor();
                let x = base + round_half_up(xi * sigma);
                let y = base + round_half_up(eta * sigma);
                Ok(sigma * self.eval(x, y)?)
            }
            Self::Hermite { m } => {
                let mf = m as f64;
                let scale = 1.0 / (2f64.sqrt() * mf.powf(1.0 / 6.0));
                let c = (2.0 * mf).sqrt();
                Ok(scale * hermite_kernel(m, c + xi * scale, c + eta * scale))
            }
            Self::Airy => Ok(airy_kernel(xi, eta)),
            _ => domain(format!("no edge scaling for {self:?}")),
        }
    }
}

/// Centre `ν = M + α/M + 2√α` and scale `σ = (1 + √α/M)^{2/3} α^{1/6}` of
/// the Charlier edge.
pub fn charlier_edge(alpha: f64, m: usize) -> (f64, f64) {
    let mf = m as f64;
    let nu = mf + alpha / mf + 2.0 * alpha.sqrt();
    let sigma = (1.0 + alpha.sqrt() / mf).powf(2.0 / 3.0) * alpha.powf(1.0 / 6.0);
    (nu, sigma)
}

pub fn round_half_up(v: f64) -> f64 {
    (v + 0.5).floor()
}

fn pairwise(xs: &[f64], ys: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect()
}

fn bessel_matrix(alpha: f64, xs: &[i64], ys: &[i64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    if alpha == 0.0 {
        // J_x(0) = δ_{x0}: the kernel is the projection onto x = y < 0.
        for &x in xs {
            for &y in ys {
                out.push(if x == y && x < 0 { 1.0 } else { 0.0 });
            }
        }
        return Ok(out);
    }
    let lo = *xs.iter().chain(ys).min().unwrap_or(&0);
    let hi = *xs.iter().chain(ys).max().unwrap_or(&0) + 1;
    let j = bessel_j_range(lo, hi, alpha)?;
    let jj = |n: i64| j[(n - lo) as usize];
    let mut diag: Vec<i64> = xs.iter().filter(|x| ys.contains(x)).copied().collect();
    diag.sort_unstable();
    diag.dedup();
    let mut dval = std::collections::HashMap::new();
    for &d in &diag {
        dval.insert(d, bessel_diagonal(alpha, d)?);
    }
    let sa = alpha.sqrt();
    for &x in xs {
        for &y in ys {
            out.push(if x == y {
                dval[&x]
            } else {
                sa * (jj(x) * jj(y + 1) - jj(x + 1) * jj(y)) / (x - y) as f64
            });
        }
    }
    Ok(out)
}

/// Christoffel-Darboux kernel from per-point function vectors
/// `φ_0..φ_m`: quotient form off the diagonal, sum form on it.
fn cd_matrix(xs: &[i64], ys: &[i64], m: usize, lead: f64, funcs: impl Fn(i64) -> Vec<f64>) -> Vec<f64> {
    let fx: Vec<Vec<f64>> = xs.iter().map(|&x| funcs(x)).collect();
    let fy: Vec<Vec<f64>> = ys.iter().map(|&y| funcs(y)).collect();
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for (a, &x) in fx.iter().zip(xs) {
        for (b, &y) in fy.iter().zip(ys) {
            out.push(if x == y {
                a[..m].iter().map(|v| v * v).sum()
            } else {
                lead * (a[m] * b[m - 1] - a[m - 1] * b[m]) / (x - y) as f64
            });
        }
    }
    out
}

/// `c_n(x; a) w_a(x)^{1/2}` for `n < count`. The forward recurrence is used
/// while it grows; past the turning point the decaying tail is taken from a
/// backward sweep matched at the switch index.
pub fn charlier_functions(count: usize, x: u64, a: f64) -> Vec<f64> {
    let turn = ((x as f64).sqrt() + a.sqrt()).powi(2).floor() as usize + 2;
    if count <= turn + 4 {
        return crate::specfun::charlier_functions(count, x, a);
    }
    let mut out = crate::specfun::charlier_functions(turn + 1, x, a);
    let xf = x as f64;
    let top = count + 60;
    let mut back = vec![0.0; top + 2];
    back[top] = 1e-200;
    for n in (1..=top).rev() {
        let nf = n as f64;
        back[n - 1] = ((xf - nf - a) * back[n] - ((nf + 1.0) * a).sqrt() * back[n + 1]) / (nf * a).sqrt();
        if back[n - 1].abs() > 1e200 {
            back.iter_mut().for_each(|v| *v *= 1e-200);
        }
    }
    let (p, q) = (out[turn], out[turn - 1]);
    let scale = (p * back[turn] + q * back[turn - 1]) / (back[turn] * back[turn] + back[turn - 1] * back[turn - 1]);
    out.truncate(turn);
    out.extend((turn..count).map(|n| back[n] * scale));
    out
}

/// Orthonormal Meixner functions `p_n(x) w(x)^{1/2}`, `n < count`, for the
/// weight `C(x+k-1, x) q^x` normalized to a probability.
pub fn meixner_functions(count: usize, x: u64, q: f64, k: usize) -> Vec<f64> {
    let beta = k as f64;
    let xf = x as f64;
    let ln_w = ln_binomial(x + k as u64 - 1, x) + xf * q.ln() + beta * (1.0 - q).ln();
    let a = |n: f64| (n + (n + beta) * q) / (1.0 - q);
    let b = |n: f64| (n * (n + beta - 1.0) * q).sqrt() / (1.0 - q);
    let mut out = Vec::with_capacity(count);
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut ln_scale = 0.5 * ln_w;
    for n in 0..count {
        out.push(cur * ln_scale.exp());
        let nf = n as f64;
        let next = ((xf - a(nf)) * cur - b(nf) * prev) / b(nf + 1.0);
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > 1e100 {
            cur /= big;
            prev /= big;
            ln_scale += big.ln();
        }
    }
    out
}

pub(crate) fn hermite_triple(m: usize, x: f64) -> (f64, f64, f64) {
    // φ_{m-2}, φ_{m-1}, φ_m with running rescale
    let mut ln_scale = -x * x / 2.0;
    let (mut pp, mut p, mut c) = (0.0, 0.0, PI.powf(-0.25));
    for n in 0..m {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * c - (nf / (nf + 1.0)).sqrt() * p;
        pp = p;
        p = c;
        c = next;
        let big = c.abs().max(p.abs());
        if big > 1e150 {
            pp /= big;
            p /= big;
            c /= big;
            ln_scale += big.ln();
        }
    }
    let s = ln_scale.exp();
    (pp * s, p * s, c * s)
}

/// `K_m(x, y)` built from the first `m` Hermite functions.
pub fn hermite_kernel(m: usize, x: f64, y: f64) -> f64 {
    let mf = m as f64;
    if (x - y).abs() < NEAR_DIAGONAL {
        let z = 0.5 * (x + y);
        let (pp, p, c) = hermite_triple(m, z);
        return mf * p * p - (mf * (mf - 1.0)).sqrt() * pp * c;
    }
    let (_, px, cx) = hermite_triple(m, x);
    let (_, py, cy) = hermite_triple(m, y);
    (mf / 2.0).sqrt() * (cx * py - px * cy) / (x - y)
}

/// `A(ξ, η)` from Airy functions, with the derivative form on the diagonal.
pub fn airy_kernel(xi: f64, eta: f64) -> f64 {
    if (xi - eta).abs() < NEAR_DIAGONAL {
        let z = 0.5 * (xi + eta);
        let (a, ap) = airy(z);
        return ap * ap - z * a * a;
    }
    let (a, ap) = airy(xi);
    let (b, bp) = airy(eta);
    (a * bp - ap * b) / (xi - eta)
}

/// `∫_0^∞ Ai(ξ + t) Ai(η + t) dt`, an independent route to the Airy kernel.
pub fn airy_kernel_integral(xi: f64, eta: f64) -> Result<f64> {
    let hi = 16.0 - xi.min(eta).min(0.0);
    integrate_doubling(0.0, hi, 8, 1e-13, |t| airy(xi + t).0 * airy(eta + t).0)
}

/// Discrete sine kernel `sin(uR)/(uπ)` with `R = arccos(r/2)`.
pub fn discrete_sine(r: f64, u: i64) -> f64 {
    let big_r = (r / 2.0).acos();
    if u == 0 {
        big_r / PI
    } else {
        (u as f64 * big_r).sin() / (u as f64 * PI)
    }
}

/// Index past which `J_n(2√α)^2` is below `1e-34` for all larger `n`.
fn bessel_cutoff(alpha: f64, from: i64) -> i64 {
    let t = 2.0 * alpha.sqrt();
    let mut n = from.max(t.ceil() as i64 + 1);
    while n as f64 * (t / 2.0).ln() - crate::numeric::ln_factorial(n as u64) > -80.0 {
        n += 4;
    }
    n
}

/// `B(x, x) = Σ_{n>x} J_n^2`, using `Σ_n J_n^2 = 1` when `x < 0` so the sum
/// never cancels.
pub fn bessel_diagonal(alpha: f64, x: i64) -> Result<f64> {
    let from = if x >= 0 { x + 1 } else { -x };
    let hi = bessel_cutoff(alpha, from);
    if hi < from {
        return Ok(if x >= 0 { 0.0 } else { 1.0 });
    }
    let j = bessel_j_range(from, hi, alpha)?;
    // smallest terms first
    let s: f64 = j.iter().rev().map(|v| v * v).sum();
    Ok(if x >= 0 { s } else { 1.0 - s })
}

/// Diagonal through the order derivatives of `J`; accurate for moderate
/// `|x|`, used to cross-check [`bessel_diagonal`].
pub fn bessel_diagonal_derivative(alpha: f64, x: i64) -> Result<f64> {
    let l = bessel_l_range(x, x + 1, alpha)?;
    let j = bessel_j_range(x, x + 1, alpha)?;
    Ok(alpha.sqrt() * (l[0] * j[1] - j[0] * l[1]))
}

/// `Σ_{k>=1} J_{x+k} J_{y+k}` summed until the terms fall below machine
/// precision, with a bound on the remainder.
pub fn bessel_series(alpha: f64, x: i64, y: i64) -> Result<(f64, f64)> {
    let t = 2.0 * alpha.sqrt();
    let lo = x.min(y) + 1;
    let start = x.max(y) + 1;
    // past the turning point |J_n(t)| <= (t/2)^n / n! shrinks faster than
    // geometrically
    let mut hi = start.max(t.ceil() as i64 + 1) + 20;
    let bound = |n: i64| -> f64 {
        if n <= 0 {
            return 1.0;
        }
        (n as f64 * (t / 2.0).ln() - crate::numeric::ln_factorial(n as u64)).exp()
    };
    while bound(hi - (x - y).abs()) > 1e-20 {
        hi += 10;
    }
    let j = bessel_j_range(lo, hi + (x - y).abs() + 1, alpha)?;
    let jj = |n: i64| j[(n - lo) as usize];
    let mut s = 0.0;
    let mut k = 1;
    while x.min(y) + k <= hi {
        s += jj(x + k) * jj(y + k);
        k += 1;
    }
    let tail: f64 = (0..40).map(|i| bound(hi + 1 + i - (x - y).abs())).sum();
    if tail > 1e-12 {
        return domain(format!("Bessel series tail {tail:e} too large"));
    }
    Ok((s, tail))
}

/// `B^α(⌊r√α⌉, ⌊r√α⌉ + u)`, which tends to the discrete sine kernel.
pub fn bulk_scaled(alpha: f64, r: f64, u: i64) -> Result<f64> {
    if !(r > -2.0 && r < 2.0) {
        return domain(format!("need -2 < r < 2, got {r}"));
    }
    let x = round_half_up(r * alpha.sqrt());
    Kernel::Bessel { alpha }.eval(x, x + u as f64)
}

/// Rescaled Bessel kernel in the intermediate region, which tends to the
/// sine kernel.
pub fn intermediate_scaled(alpha: f64, delta: f64, xi: f64, eta: f64) -> Result<f64> {
    if !(delta > 1.0 / 6.0 && delta < 0.5) {
        return domain(format!("need 1/6 < delta < 1/2, got {delta}"));
    }
    let s = PI * alpha.powf(0.25 - delta / 2.0);
    let c = 2.0 * alpha.sqrt() - alpha.powf(delta);
    let x = round_half_up(c + xi * s);
    let y = round_half_up(c + eta * s);
    Ok(s * Kernel::Bessel { alpha }.eval(x, y)?)
}

/// Charlier kernel at integer points from the contour-integral formulas,
/// an independent route to [`Kernel::Charlier`].
pub fn charlier_kernel_contour(x: i64, y: i64, m: usize, alpha: f64, r: f64) -> Result<f64> {
    use ContourWeight::*;
    if x < 0 || y < 0 {
        return Ok(0.0);
    }
    if x != y {
        let ax = charlier_a(x, m, alpha)?;
        let ay = charlier_a(y, m, alpha)?;
        let num = charlier_d(x, m, alpha, r, G1)? * charlier_d(y, m, alpha, r, G2)?
            - charlier_d(x, m, alpha, r, G2)? * charlier_d(y, m, alpha, r, G1)?;
        return Ok((ax * ay).sqrt() * num / (x - y) as f64);
    }
    let a = charlier_a(x, m, alpha)?;
    let d1 = charlier_d(x, m, alpha, r, G1)?;
    let d2 = charlier_d(x, m, alpha, r, G2)?;
    let main = d2 * charlier_d(x - 1, m, alpha, r, G3)? - d1 * charlier_d(x - 1, m, alpha, r, G4)?;
    let corr = charlier_f(x, m, alpha, r, G1)? * d2 - charlier_f(x, m, alpha, r, G2)? * d1;
    Ok(a * (main + corr))
}
