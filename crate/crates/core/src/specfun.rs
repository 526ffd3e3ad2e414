//! Bessel functions of integer order and their order derivative, Airy
//! functions, orthonormal Hermite functions and Charlier polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::numeric::ln_factorial;
use crate::quad::integrate_doubling;

/// First trapezoid node count on the circle.
pub const START_NODES: usize = 256;
/// Largest trapezoid node count tried before giving up.
pub const MAX_NODES: usize = 1 << 16;
const NODE_TOL: f64 = 1e-12;

/// Circle radius and trapezoid node count for contour integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourParams {
    pub r: f64,
    pub nodes: usize,
}

impl ContourParams {
    pub fn new(r: f64, nodes: usize) -> Result<Self> {
        if !(r > 0.0) || nodes < 64 || nodes % 2 != 0 {
            return domain(format!("need r > 0 and an even node count >= 64, got r={r}, nodes={nodes}"));
        }
        Ok(Self { r, nodes })
    }
}

fn trapezoid_j(orders: &[i64], t: f64, nodes: usize) -> Vec<f64> {
    let mut acc = vec![0.0; orders.len()];
    for k in 0..nodes {
        let th = 2.0 * PI * k as f64 / nodes as f64;
        let ts = t * th.sin();
        for (a, &n) in acc.iter_mut().zip(orders) {
            *a += (n as f64 * th - ts).cos();
        }
    }
    acc.iter_mut().for_each(|a| *a /= nodes as f64);
    acc
}

/// `J_n(2√α)` for every integer `n` in `lo..=hi`, by the trapezoid rule on
/// the periodic integral over a full turn, doubling nodes until stable.
pub fn bessel_j_range(lo: i64, hi: i64, alpha: f64) -> Result<Vec<f64>> {
    if alpha < 0.0 || !alpha.is_finite() {
        return domain(format!("alpha must be finite and nonnegative, got {alpha}"));
    }
    let orders: Vec<i64> = (lo..=hi).collect();
    if alpha == 0.0 {
        return Ok(orders.iter().map(|&n| if n == 0 { 1.0 } else { 0.0 }).collect());
    }
    let t = 2.0 * alpha.sqrt();
    let need = orders.iter().map(|n| n.unsigned_abs() as f64).fold(0.0, f64::max) + t;
    let mut nodes = START_NODES;
    while (nodes as f64) < need {
        nodes *= 2;
    }
    let mut prev = trapezoid_j(&orders, t, nodes);
    while nodes < MAX_NODES {
        nodes *= 2;
        let next = trapezoid_j(&orders, t, nodes);
        let diff = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if diff < NODE_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NoConvergence(format!("Bessel trapezoid rule unstable at {MAX_NODES} nodes for alpha={alpha}")))
}

/// `J_x(2√α)` for integer `x`.
pub fn bessel_j(x: i64, alpha: f64) -> Result<f64> {
    // negative orders through the reflection J_{-n} = (-1)^n J_n
    let v = bessel_j_range(x.abs(), x.abs(), alpha)?[0];
    Ok(if x < 0 && x % 2 != 0 { -v } else { v })
}

/// Upper limit beyond which `exp(-x u - t sinh u)` is below `e^{-50}` of
/// its peak, together with the peak location.
fn sinh_integrand_window(x: f64, t: f64) -> (f64, f64) {
    let phi = |u: f64| -x * u - t * u.sinh();
    let peak = if -x > t { (-x / t).acosh() } else { 0.0 };
    let top = phi(peak);
    let mut hi = peak + 1.0;
    while phi(hi) > top - 50.0 {
        hi = peak + 2.0 * (hi - peak);
    }
    (peak, hi)
}

/// `∫_0^∞ exp(-x u - t sinh u) du`.
fn sinh_integral(x: f64, t: f64) -> Result<f64> {
    let (peak, hi) = sinh_integrand_window(x, t);
    let f = |u: f64| (-x * u - t * u.sinh()).exp();
    let mut total = 0.0;
    if peak > 0.0 {
        total += integrate_doubling(0.0, peak, 2, 1e-14, f)?;
    }
    total += integrate_doubling(peak, hi, 2, 1e-14, f)?;
    Ok(total)
}

fn oscillatory_panels(freq: f64) -> usize {
    (freq / 2.0).ceil().max(2.0) as usize
}

/// `J_ν(2√α)` for real order, from both terms of the Schläfli-type
/// integral. Used as an independent check of the integer-order routines.
pub fn bessel_j_real(nu: f64, alpha: f64) -> Result<f64> {
    if alpha <= 0.0 {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let t = 2.0 * alpha.sqrt();
    let first = integrate_doubling(0.0, PI, oscillatory_panels(nu.abs() + t), 1e-14, |th| (nu * th - t * th.sin()).cos())? / PI;
    let s = (PI * nu).sin();
    if s == 0.0 {
        return Ok(first);
    }
    Ok(first - s / PI * sinh_integral(nu, t)?)
}

/// `L_x(2√α) = ∂_ν J_ν(2√α)` at integer `ν = x`.
pub fn bessel_j_orderderiv(x: i64, alpha: f64) -> Result<f64> {
    if alpha <= 0.0 {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let t = 2.0 * alpha.sqrt();
    let xf = x as f64;
    let first = -integrate_doubling(0.0, PI, oscillatory_panels(xf.abs() + t), 1e-14, |th| th * (xf * th - t * th.sin()).sin())? / PI;
    let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
    Ok(first - sign * sinh_integral(xf, t)?)
}

/// `L_n(2√α)` for every integer `n` in `lo..=hi`.
pub fn bessel_l_range(lo: i64, hi: i64, alpha: f64) -> Result<Vec<f64>> {
    (lo..=hi).map(|n| bessel_j_orderderiv(n, alpha)).collect()
}

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;

fn airy_maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    let (mut fp, mut gp) = (0.0, 1.0);
    let (mut tfp, mut tgp) = (x * x / 2.0, 1.0);
    fp += tfp;
    let mut k = 0.0;
    loop {
        tf *= x3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        tg *= x3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
        tgp *= x3 / ((3.0 * k + 1.0) * (3.0 * k + 3.0));
        if k >= 1.0 {
            tfp *= x3 / ((3.0 * k) * (3.0 * k + 2.0));
            fp += tfp;
        }
        f += tf;
        g += tg;
        gp += tgp;
        k += 1.0;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if k > 3.0 && tf.abs() + tg.abs() + tfp.abs() + tgp.abs() < 1e-18 * scale {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// `K_ν(z) = ∫_0^∞ exp(-z cosh u) cosh(ν u) du`, scaled by `e^{z}`.
fn bessel_k_scaled(nu: f64, z: f64) -> f64 {
    let hi = (1.0 + 45.0 / z).acosh() + 1.0;
    integrate_doubling(0.0, hi, 2, 1e-15, |u| (-z * (u.cosh() - 1.0)).exp() * (nu * u).cosh())
        .expect("smooth decaying integrand")
}

fn airy_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let e = (-zeta).exp();
    let ai = (x / 3.0).sqrt() / PI * bessel_k_scaled(1.0 / 3.0, zeta) * e;
    let aip = -x / (PI * 3f64.sqrt()) * bessel_k_scaled(2.0 / 3.0, zeta) * e;
    (ai, aip)
}

fn airy_negative_asymptotic(x: f64) -> (f64, f64) {
    let z = -x;
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    // u_k and v_k coefficients of the oscillatory expansion
    let mut u = vec![1.0f64];
    let mut v = vec![1.0f64];
    for k in 1..40 {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    let series = |c: &[f64], odd: bool| {
        let mut s = 0.0;
        let mut last = f64::INFINITY;
        for k in 0.. {
            let idx = 2 * k + usize::from(odd);
            if idx >= c.len() {
                break;
            }
            let term = c[idx] / zeta.powi(idx as i32);
            if term.abs() > last {
                break;
            }
            last = term.abs();
            s += if k % 2 == 0 { term } else { -term };
            if term.abs() < 1e-17 {
                break;
            }
        }
        s
    };
    let ph = zeta - PI / 4.0;
    let ai = (ph.cos() * series(&u, false) + ph.sin() * series(&u, true)) / (PI.sqrt() * z.powf(0.25));
    let aip = z.powf(0.25) / PI.sqrt() * (ph.sin() * series(&v, false) - ph.cos() * series(&v, true));
    (ai, aip)
}

/// `(Ai(x), Ai'(x))`.
pub fn airy(x: f64) -> (f64, f64) {
    if x > 104.0 {
        // both values underflow past here
        (0.0, 0.0)
    } else if x > 2.0 {
        airy_positive(x)
    } else if x >= -8.0 {
        airy_maclaurin(x)
    } else {
        airy_negative_asymptotic(x)
    }
}

pub fn airy_ai(x: f64) -> f64 {
    airy(x).0
}

pub fn airy_ai_prime(x: f64) -> f64 {
    airy(x).1
}

/// Orthonormal Hermite polynomial `h_m(x)` for the weight `e^{-x^2}`.
pub fn hermite_normalized(m: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    for n in 0..m {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Hermite functions `h_{m-1}(x) e^{-x^2/2}` and `h_m(x) e^{-x^2/2}`,
/// evaluated with a running rescale so neither factor overflows.
pub fn hermite_function_pair(m: usize, x: f64) -> (f64, f64) {
    assert!(m >= 1);
    let mut ln_scale = -x * x / 2.0;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    for n in 0..m {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            cur *= 1e-150;
            prev *= 1e-150;
            ln_scale += 150.0 * 10f64.ln();
        }
    }
    let s = ln_scale.exp();
    (prev * s, cur * s)
}

/// Orthonormal Charlier functions `c_n(x; a) w_a(x)^{1/2}` for
/// `n = 0..count`, from the three-term recurrence, kept in the form
/// `(mantissa, log scale)` so that huge polynomial values times tiny
/// weights stay representable.
pub fn charlier_functions(count: usize, x: u64, a: f64) -> Vec<f64> {
    let xf = x as f64;
    let ln_w_half = 0.5 * (-a + xf * a.ln() - ln_factorial(x));
    let mut out = Vec::with_capacity(count);
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut ln_scale = ln_w_half;
    for n in 0..count {
        out.push(cur * ln_scale.exp());
        let nf = n as f64;
        let next = ((xf - nf - a) * cur - (nf * a).sqrt() * prev) / ((nf + 1.0) * a).sqrt();
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > 1e100 || (big < 1e-100 && big > 0.0) {
            let r = big.ln();
            cur /= big;
            prev /= big;
            ln_scale += r;
        }
    }
    out
}

/// Charlier polynomial `c_n(x; a)` from the generating function
/// `Σ a^{n/2} c_n w^n / √(n!) = e^{-a w} (1 + w)^x`, by exact Taylor
/// coefficients. Only meant for small `n`.
pub fn charlier_from_generating(n: usize, x: u64, a: f64) -> f64 {
    // coefficient of w^n in e^{-aw}(1+w)^x is Σ_k (-a)^{n-k}/(n-k)! C(x,k)
    let mut coef = 0.0;
    for k in 0..=n.min(x as usize) {
        let b = (ln_factorial(x) - ln_factorial(k as u64) - ln_factorial(x - k as u64)).exp();
        let j = n - k;
        coef += (-a).powi(j as i32) / (ln_factorial(j as u64)).exp() * b;
    }
    coef * (ln_factorial(n as u64)).exp().sqrt() / a.powf(n as f64 / 2.0)
}

/// Auxiliary weight function used by the Charlier contour integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourWeight {
    /// `g ≡ 1`
    G1,
    /// `g(z) = z - 1`
    G2,
    /// `g(z) = u log u` with `u = (√α + M z)/(√α + M)`
    G3,
    /// `g_2 g_3`
    G4,
}

impl ContourWeight {
    fn eval(self, z: Complex64, alpha: f64, m: usize) -> Complex64 {
        let sa = alpha.sqrt();
        let u = (sa + m as f64 * z) / (sa + m as f64);
        match self {
            Self::G1 => Complex64::new(1.0, 0.0),
            Self::G2 => z - 1.0,
            Self::G3 => u * u.ln(),
            Self::G4 => (z - 1.0) * u * u.ln(),
        }
    }
}

/// `A_M^α(x) = √α M!/M^M w_{α/M}(x) (1 + M/√α)^{2x} e^{-2√α}`.
pub fn charlier_a(x: i64, m: usize, alpha: f64) -> Result<f64> {
    if x < 0 {
        return Ok(0.0);
    }
    let mf = m as f64;
    let a = alpha / mf;
    let sa = alpha.sqrt();
    let ln = 0.5 * alpha.ln() + ln_factorial(m as u64) - mf * mf.ln() + (-a + x as f64 * a.ln() - ln_factorial(x as u64))
        + 2.0 * x as f64 * (1.0 + mf / sa).ln()
        - 2.0 * sa;
    Ok(ln.exp())
}

fn d_integrand(theta: f64, x: i64, m: usize, alpha: f64, r: f64, g: ContourWeight) -> f64 {
    let sa = alpha.sqrt();
    let z = Complex64::from_polar(r, theta);
    let u = (sa + m as f64 * z) / (sa + m as f64);
    let ln = sa * (1.0 - z) + x as f64 * u.ln() - m as f64 * z.ln();
    (g.eval(z, alpha, m) * ln.exp()).re
}

/// `D_M^{α,r}(x, g) = (1/2π) ∮ g(z) e^{√α(1-z)} u(z)^x z^{-M} dθ` on
/// `|z| = r`.
pub fn charlier_d(x: i64, m: usize, alpha: f64, r: f64, g: ContourWeight) -> Result<f64> {
    if m == 0 || alpha <= 0.0 || r <= 0.0 {
        return domain(format!("need M >= 1, alpha > 0, r > 0; got M={m}, alpha={alpha}, r={r}"));
    }
    let crosses_cut = matches!(g, ContourWeight::G3 | ContourWeight::G4) && r > alpha.sqrt() / m as f64;
    if crosses_cut {
        // the logarithm jumps at θ = ±π, so integrate over the open interval
        let v = integrate_doubling(-PI, PI, 4, 1e-14, |th| d_integrand(th, x, m, alpha, r, g))?;
        return Ok(v / (2.0 * PI));
    }
    let mut nodes = START_NODES;
    let trap = |n: usize| (0..n).map(|k| d_integrand(2.0 * PI * k as f64 / n as f64 - PI, x, m, alpha, r, g)).sum::<f64>() / n as f64;
    let mut prev = trap(nodes);
    while nodes < MAX_NODES {
        nodes *= 2;
        let next = trap(nodes);
        if (next - prev).abs() <= NODE_TOL * next.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NoConvergence(format!("Charlier contour integral unstable at {MAX_NODES} nodes")))
}

/// `F_M^{α,r}(x, g)`: the correction from the part of the negative real
/// axis between `√α/M` and `r`; zero when `r <= √α/M`.
pub fn charlier_f(x: i64, m: usize, alpha: f64, r: f64, g: ContourWeight) -> Result<f64> {
    let sa = alpha.sqrt();
    let lo = sa / m as f64;
    if r <= lo {
        return Ok(0.0);
    }
    let mf = m as f64;
    let sign = if (x + m as i64 + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let h = |s: f64| {
        let gv = g.eval(Complex64::new(-s, 0.0), alpha, m).re;
        gv * (sa * (1.0 + s) + x as f64 * ((sa - mf * s).abs() / (sa + mf)).ln() - (mf + 1.0) * s.ln()).exp()
    };
    Ok(sign * integrate_doubling(lo, r, 4, 1e-13, h)?)
}

/// Every Charlier auxiliary in one place, selected by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharlierFn {
    D(ContourWeight),
    F(ContourWeight),
    A,
}

pub fn charlier_fns(x: i64, m: usize, alpha: f64, r: f64, which: CharlierFn) -> Result<f64> {
    match which {
        CharlierFn::A => charlier_a(x, m, alpha),
        CharlierFn::D(g) => charlier_d(x, m, alpha, r, g),
        CharlierFn::F(g) => charlier_f(x, m, alpha, r, g),
    }
}

/// Radius policy for the Charlier contours: `1/2` when `√α/M` is below it
/// and a guard `1 - 2√α/M` otherwise.
pub fn charlier_radius(m: usize, alpha: f64) -> f64 {
    let ratio = alpha.sqrt() / m as f64;
    if ratio < 0.5 {
        0.5
    } else {
        (1.0 - 2.0 * ratio).max(0.5 * ratio)
    }
}
