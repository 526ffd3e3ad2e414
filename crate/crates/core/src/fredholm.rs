//! Fredholm determinants `det(I + K φ)` on the lattice and on the line,
//! gap probabilities and joint laws of the largest points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::MultiplicativeFunctional;
use crate::error::{domain, Error, Result};
use crate::kernels::{hermite_triple, Kernel};
use crate::linalg::{det_complex, det_real};
use crate::quad::gauss_legendre;
use crate::specfun::airy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FredholmResult {
    pub value: f64,
    /// Number of lattice points or quadrature nodes in the final matrix.
    pub truncation_size: usize,
    pub tail_estimate: f64,
    pub converged: bool,
}

/// Past this many lattice points a truncation is abandoned.
const MAX_LATTICE: i64 = 100_000;
const WINDOW: i64 = 16;
const NYSTROM_START: usize = 40;
const NYSTROM_CAP: usize = 640;
const NYSTROM_SCALE: f64 = 10.0;

/// Smallest `X >= from` such that the weighted diagonal beyond `X` is
/// below `budget`, with the estimated remainder.
fn lattice_cutoff(kernel: &Kernel, shift: i64, from: i64, weight: f64, budget: f64) -> Result<(i64, f64)> {
    let mut x = from;
    loop {
        if x - from > MAX_LATTICE {
            return Err(Error::NoConvergence(format!("kernel diagonal of {kernel:?} not summable")));
        }
        let pts: Vec<f64> = (x + 1..=x + WINDOW).map(|v| (v + shift) as f64).collect();
        let d: Vec<f64> = diagonal(kernel, &pts)?;
        let window: f64 = d.iter().sum::<f64>() * weight;
        let (a, b) = (d[WINDOW as usize - 2].abs(), d[WINDOW as usize - 1].abs());
        let ratio = if a > 0.0 { b / a } else { 0.0 };
        if window < budget && ratio < 1.0 {
            // rest beyond the window, bounded geometrically
            let rest = if b == 0.0 { 0.0 } else { weight * b * ratio / (1.0 - ratio) };
            return Ok((x, window + rest));
        }
        x += WINDOW;
    }
}

fn diagonal(kernel: &Kernel, pts: &[f64]) -> Result<Vec<f64>> {
    match *kernel {
        Kernel::Bessel { alpha } => pts.iter().map(|&p| crate::kernels::bessel_diagonal(alpha, p as i64)).collect(),
        _ => pts.iter().map(|&p| kernel.eval(p, p)).collect(),
    }
}

/// `det(I + K(x + s, y + s) φ(y))` over the nonnegative integers, where
/// `φ` is given by `weights(x)` and vanishes below `start`.
fn lattice_det(kernel: &Kernel, shift: i64, start: i64, phi: impl Fn(i64) -> f64, sup_phi: f64, tol: f64) -> Result<FredholmResult> {
    kernel.validate()?;
    if !kernel.is_discrete() {
        return domain(format!("{kernel:?} is not a lattice kernel"));
    }
    // First settle the bulk by a tail budget, then tighten with the trace.
    let (mut end, mut tail) = lattice_cutoff(kernel, shift, start, sup_phi, tol)?;
    loop {
        let pts: Vec<i64> = (start..=end).filter(|&x| phi(x) != 0.0).collect();
        let args: Vec<f64> = pts.iter().map(|&x| (x + shift) as f64).collect();
        let k = kernel.matrix(&args)?;
        let n = pts.len();
        let trace: f64 = (0..n).map(|i| (k[i * n + i] * phi(pts[i])).abs()).sum();
        let bound = tail * (trace + tail).exp();
        if bound > tol && tail > 0.0 {
            let (e, t) = lattice_cutoff(kernel, shift, end, sup_phi, tail * 1e-3)?;
            if e > end {
                end = e;
                tail = t;
                continue;
            }
        }
        let mut a = k;
        for j in 0..n {
            let w = phi(pts[j]);
            for i in 0..n {
                a[i * n + j] *= w;
            }
            a[j * n + j] += 1.0;
        }
        let value = det_real(a, n);
        return Ok(FredholmResult { value, truncation_size: n, tail_estimate: bound, converged: bound <= tol });
    }
}

fn phi_start(g: &MultiplicativeFunctional) -> i64 {
    // φ vanishes on negatives by construction
    0.max(-(g.shift() as i64))
}

/// `det(I + K(x - L, y - L) φ(y))` on `ℓ²(ℕ)` with `L` the shift of `g`.
/// For the Bessel kernel this is `E[g]` under Poissonized Plancherel.
pub fn det_discrete(kernel: &Kernel, g: &MultiplicativeFunctional, tol: f64) -> Result<FredholmResult> {
    let l = g.shift() as i64;
    lattice_det(kernel, -l, phi_start(g), |x| g.phi(x), g.sup() + 1.0, tol)
}

/// `E[g]` under the Charlier ensemble through `det(I + K_Ch(x+M-L, y+M-L) φ(y))`.
pub fn charlier_expectation_det(alpha: f64, m: usize, g: &MultiplicativeFunctional, tol: f64) -> Result<FredholmResult> {
    let l = g.shift() as i64;
    if l > m as i64 {
        return domain(format!("shift L={l} exceeds M={m}"));
    }
    let kernel = Kernel::Charlier { alpha, m };
    lattice_det(&kernel, m as i64 - l, phi_start(g), |x| g.phi(x), g.sup() + 1.0, tol)
}

/// Gap probability `P[λ_1 <= n]` under Poissonized Plancherel.
pub fn plancherel_gap(alpha: f64, n: usize, tol: f64) -> Result<FredholmResult> {
    if alpha == 0.0 {
        return Ok(FredholmResult { value: 1.0, truncation_size: 0, tail_estimate: 0.0, converged: true });
    }
    det_discrete(&Kernel::Bessel { alpha }, &MultiplicativeFunctional::first_row_at_most(n), tol)
}

/// Quadrature nodes and weights for `(t, ∞)` after `s = t + c(1+u)/(1-u)`.
fn half_line_nodes(t: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (u, w) = gauss_legendre(n);
    let c = NYSTROM_SCALE;
    let s = u.iter().map(|&u| t + c * (1.0 + u) / (1.0 - u)).collect();
    let ws = u.iter().zip(&w).map(|(&u, &w)| w * 2.0 * c / ((1.0 - u) * (1.0 - u))).collect();
    (s, ws)
}

fn interval_nodes(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (u, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    (u.iter().map(|&u| a + h * (u + 1.0)).collect(), w.iter().map(|&w| w * h).collect())
}

/// Real-line kernel with per-node data cached, so an `n`-node matrix costs
/// `n` special-function evaluations.
fn continuum_matrix(kernel: &Kernel, s: &[f64]) -> Result<Vec<f64>> {
    let n = s.len();
    let mut out = vec![0.0; n * n];
    match *kernel {
        Kernel::Airy => {
            let v: Vec<(f64, f64)> = s.iter().map(|&x| airy(x)).collect();
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = if i == j || (s[i] - s[j]).abs() < 1e-6 {
                        crate::kernels::airy_kernel(s[i], s[j])
                    } else {
                        (v[i].0 * v[j].1 - v[i].1 * v[j].0) / (s[i] - s[j])
                    };
                }
            }
        }
        Kernel::Hermite { m } => {
            let mf = m as f64;
            let scale = 1.0 / (2f64.sqrt() * mf.powf(1.0 / 6.0));
            let c = (2.0 * mf).sqrt();
            let x: Vec<f64> = s.iter().map(|&v| c + v * scale).collect();
            let v: Vec<(f64, f64, f64)> = x.iter().map(|&x| hermite_triple(m, x)).collect();
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = scale
                        * if i == j {
                            mf * v[i].1 * v[i].1 - (mf * (mf - 1.0)).sqrt() * v[i].0 * v[i].2
                        } else {
                            (mf / 2.0).sqrt() * (v[i].2 * v[j].1 - v[i].1 * v[j].2) / (x[i] - x[j])
                        };
                }
            }
        }
        Kernel::Sine => return kernel.matrix(s),
        _ => return domain(format!("{kernel:?} is not a real-line kernel")),
    }
    Ok(out)
}

fn symmetric_weighted(k: &mut [f64], w: &[f64]) {
    let n = w.len();
    let r: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] *= r[i] * r[j];
        }
    }
}

/// `det(I - K)` on `L²(t, ∞)` for the Airy kernel or the edge-scaled
/// Hermite kernel, by Nyström discretization with node doubling.
pub fn det_continuum(kernel: &Kernel, t: f64, tol: f64) -> Result<FredholmResult> {
    let eval = |n: usize| -> Result<f64> {
        let (s, w) = half_line_nodes(t, n);
        let mut k = continuum_matrix(kernel, &s)?;
        symmetric_weighted(&mut k, &w);
        for v in k.iter_mut() {
            *v = -*v;
        }
        for i in 0..n {
            k[i * n + i] += 1.0;
        }
        Ok(det_real(k, n))
    };
    let mut n = NYSTROM_START;
    let mut prev = eval(n)?;
    while n < NYSTROM_CAP {
        n *= 2;
        let cur = eval(n)?;
        let change = (cur - prev).abs();
        if change < tol {
            return Ok(FredholmResult { value: cur, truncation_size: n, tail_estimate: change, converged: true });
        }
        prev = cur;
    }
    Err(Error::NoConvergence(format!("Nyström determinant at t={t} did not settle by n={NYSTROM_CAP}")))
}

/// Tracy-Widom distribution `F(t)`.
pub fn tracy_widom(t: f64, tol: f64) -> Result<FredholmResult> {
    det_continuum(&Kernel::Airy, t, tol)
}

/// Thresholds `a_1 >= ... >= a_k` on the `k` largest points, defining
/// `I_1 = (a_1, ∞)` and `I_{j+1} = (a_{j+1}, a_j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSystem {
    thresholds: Vec<f64>,
}

impl IntervalSystem {
    /// A later threshold above an earlier one constrains nothing, so it is
    /// lowered to its predecessor.
    pub fn new(thresholds: &[f64]) -> Result<Self> {
        if thresholds.is_empty() || thresholds.len() > 4 {
            return domain(format!("need 1..=4 thresholds, got {}", thresholds.len()));
        }
        if thresholds.iter().any(|t| t.is_nan()) {
            return domain("threshold is NaN");
        }
        let mut out: Vec<f64> = Vec::with_capacity(thresholds.len());
        for &t in thresholds {
            out.push(out.last().map_or(t, |&p: &f64| p.min(t)));
        }
        Ok(Self { thresholds: out })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// Counts `n` with `n_1 + ... + n_j <= j - 1` for every `j`: the events
    /// whose union is `{x^(j) <= a_j for all j}`.
    pub fn admissible_counts(&self) -> Vec<Vec<usize>> {
        let k = self.len();
        let mut out = vec![vec![]];
        for j in 0..k {
            let mut next = Vec::new();
            for c in &out {
                let used: usize = c.iter().sum();
                for v in 0..=(j - used) {
                    let mut c2 = c.clone();
                    c2.push(v);
                    next.push(c2);
                }
            }
            out = next;
        }
        out
    }
}

const CAUCHY_NODES: usize = 8;
const CAUCHY_RADIUS: f64 = 0.1;

/// `Σ_n P[N(I_j) = n_j ∀j]` over admissible `n`, from the generating function
/// `E[∏ w_j^{N_j}] = det(I + Σ_j (w_j - 1) K χ_{I_j})` with coefficients read
/// off by the Cauchy integral on `|w_j| = ρ`.
fn joint_from_matrix(k: &[f64], class: &[usize], sys: &IntervalSystem) -> f64 {
    let n = class.len();
    let kk = sys.len();
    if kk == 1 {
        let mut a: Vec<f64> = k.iter().map(|v| -v).collect();
        for i in 0..n {
            a[i * n + i] += 1.0;
        }
        return det_real(a, n);
    }
    let p = CAUCHY_NODES;
    let roots: Vec<Complex64> = (0..p).map(|j| Complex64::from_polar(CAUCHY_RADIUS, 2.0 * std::f64::consts::PI * j as f64 / p as f64)).collect();
    let counts = sys.admissible_counts();
    let mut acc = vec![Complex64::new(0.0, 0.0); counts.len()];
    let total = p.pow(kk as u32);
    for idx in 0..total {
        let mut digits = vec![0usize; kk];
        let mut r = idx;
        for d in digits.iter_mut() {
            *d = r % p;
            r /= p;
        }
        let w: Vec<Complex64> = digits.iter().map(|&d| roots[d]).collect();
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = k[i * n + j] * (w[class[j]] - 1.0);
            }
            a[i * n + i] += 1.0;
        }
        let g = det_complex(a, n);
        for (slot, c) in acc.iter_mut().zip(&counts) {
            let mut z = g;
            for (j, &cj) in c.iter().enumerate() {
                z /= w[j].powu(cj as u32);
            }
            *slot += z;
        }
    }
    acc.iter().map(|z| z.re).sum::<f64>() / total as f64
}

/// Joint law of the largest points, `P[x^(j) <= a_j, j = 1..k]`.
///
/// For [`Kernel::Bessel`] the points are `λ_i - i` under Poissonized
/// Plancherel; for [`Kernel::Airy`] this is the joint edge distribution.
pub fn joint_rows(kernel: &Kernel, sys: &IntervalSystem, tol: f64) -> Result<FredholmResult> {
    let th = sys.thresholds();
    match *kernel {
        Kernel::Bessel { alpha } => {
            let a: Vec<i64> = th.iter().map(|t| t.floor() as i64).collect();
            let start = *a.last().unwrap() + 1;
            let (end, tail) = lattice_cutoff(kernel, 0, a[0].max(start), 1.0, tol)?;
            let pts: Vec<i64> = (start..=end).collect();
            let class: Vec<usize> = pts.iter().map(|&x| a.iter().take_while(|&&aj| x <= aj).count()).collect();
            let args: Vec<f64> = pts.iter().map(|&x| x as f64).collect();
            let k = Kernel::Bessel { alpha }.matrix(&args)?;
            let trace: f64 = (0..pts.len()).map(|i| k[i * pts.len() + i]).sum();
            let bound = tail * (trace + tail).exp() * 2f64.powi(sys.len() as i32);
            let value = joint_from_matrix(&k, &class, sys);
            Ok(FredholmResult { value, truncation_size: pts.len(), tail_estimate: bound, converged: bound <= tol })
        }
        Kernel::Airy | Kernel::Hermite { .. } => {
            let eval = |n: usize| -> Result<f64> {
                let (mut s, mut w) = half_line_nodes(th[0], n);
                let mut class = vec![0usize; n];
                for j in 1..th.len() {
                    if th[j] < th[j - 1] {
                        let (s2, w2) = interval_nodes(th[j], th[j - 1], n / 2);
                        class.extend(std::iter::repeat(j).take(s2.len()));
                        s.extend(s2);
                        w.extend(w2);
                    }
                }
                let mut k = continuum_matrix(kernel, &s)?;
                symmetric_weighted(&mut k, &w);
                Ok(joint_from_matrix(&k, &class, sys))
            };
            let mut n = NYSTROM_START;
            let mut prev = eval(n)?;
            while n < NYSTROM_CAP {
                n *= 2;
                let cur = eval(n)?;
                let change = (cur - prev).abs();
                if change < tol {
                    return Ok(FredholmResult { value: cur, truncation_size: n, tail_estimate: change, converged: true });
                }
                prev = cur;
            }
            Err(Error::NoConvergence(format!("joint law at {th:?} did not settle by n={NYSTROM_CAP}")))
        }
        _ => domain(format!("joint_rows is not available for {kernel:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{expectation, EnsembleSpec};
    use crate::numeric::poisson_pmf;
    use crate::partitions::{enumerate_partitions, Partition};

    fn plancherel_fixed(n: usize, pred: impl Fn(&Partition) -> bool) -> f64 {
        enumerate_partitions(n, n, n)
            .filter(|l| pred(l))
            .map(|l| crate::ensembles::pmf(&EnsembleSpec::Plancherel { n }, &l).unwrap())
            .sum()
    }

    fn poissonized(alpha: f64, pred: impl Fn(&Partition) -> bool) -> f64 {
        (0..=25).map(|n| poisson_pmf(alpha, n as u64) * plancherel_fixed(n, &pred)).sum()
    }

    #[test]
    fn trivial_phi_gives_one() {
        let g = MultiplicativeFunctional::new(|_| 1.0, 0, 1.0);
        let r = det_discrete(&Kernel::Bessel { alpha: 2.0 }, &g, 1e-12).unwrap();
        assert_eq!(r.value, 1.0);
        let r = charlier_expectation_det(1.0, 3, &g, 1e-12).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn plancherel_gap_matches_enumeration() {
        for n in [0usize, 2, 4] {
            let d = plancherel_gap(1.0, n, 1e-12).unwrap();
            let e = poissonized(1.0, |l| l.part(1) <= n);
            assert!((d.value - e).abs() < 1e-8, "n={n}: {} vs {e}", d.value);
            assert!(d.converged);
        }
        assert!((plancherel_gap(1e-12, 0, 1e-12).unwrap().value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn charlier_det_matches_direct_sum() {
        let g = MultiplicativeFunctional::first_row_at_most(3);
        let d = charlier_expectation_det(1.0, 3, &g, 1e-12).unwrap();
        let e = expectation(&EnsembleSpec::Charlier { m: 3, alpha: 1.0 }, &g, 40).unwrap();
        assert!((d.value - e.value).abs() < 1e-8, "{} vs {}", d.value, e.value);
    }

    #[test]
    fn shifted_functional() {
        // f(k) = 1{k < 4} with L = 1 gives 1{λ_1 <= 3}
        let g = MultiplicativeFunctional::new(|k| if k < 4 { 1.0 } else { 0.0 }, 1, 1.0);
        let d = det_discrete(&Kernel::Bessel { alpha: 1.5 }, &g, 1e-12).unwrap();
        let e = poissonized(1.5, |l| l.part(1) <= 3);
        assert!((d.value - e).abs() < 1e-8);
    }

    #[test]
    fn tracy_widom_shape() {
        let hi = tracy_widom(4.0, 1e-10).unwrap().value;
        let mid = tracy_widom(-1.0, 1e-10).unwrap().value;
        let lo = tracy_widom(-5.0, 1e-10).unwrap().value;
        assert!(hi > 0.999 && hi <= 1.0);
        assert!(lo < mid && mid < hi);
        assert!(lo < 0.05);
        // mean of the GUE edge law is about -1.77; F(-1.77) sits near 0.5
        let med = tracy_widom(-1.8, 1e-10).unwrap().value;
        assert!((med - 0.5).abs() < 0.1, "{med}");
    }

    #[test]
    fn bessel_joint_rows_match_enumeration() {
        let alpha = 1.0;
        for (a1, a2) in [(4i64, 3i64), (2, 0), (1, -1)] {
            let sys = IntervalSystem::new(&[a1 as f64, a2 as f64]).unwrap();
            let d = joint_rows(&Kernel::Bessel { alpha }, &sys, 1e-12).unwrap();
            let e = poissonized(alpha, |l| l.part(1) as i64 - 1 <= a1 && l.part(2) as i64 - 2 <= a2);
            assert!((d.value - e).abs() < 1e-6, "({a1},{a2}): {} vs {e}", d.value);
        }
        let one = joint_rows(&Kernel::Bessel { alpha }, &IntervalSystem::new(&[2.0]).unwrap(), 1e-12).unwrap();
        assert!((one.value - plancherel_gap(alpha, 3, 1e-12).unwrap().value).abs() < 1e-10);
    }

    #[test]
    fn airy_joint_marginal() {
        let one = joint_rows(&Kernel::Airy, &IntervalSystem::new(&[-1.0]).unwrap(), 1e-9).unwrap().value;
        let two = joint_rows(&Kernel::Airy, &IntervalSystem::new(&[-1.0, -1.0]).unwrap(), 1e-9).unwrap().value;
        assert!((one - two).abs() < 1e-6);
        let three = joint_rows(&Kernel::Airy, &IntervalSystem::new(&[-1.0, -2.0]).unwrap(), 1e-9).unwrap().value;
        assert!(three <= one + 1e-9 && three > 0.0);
        assert!((one - tracy_widom(-1.0, 1e-10).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn admissible_counts_small() {
        let s = IntervalSystem::new(&[3.0, 2.0, 1.0]).unwrap();
        let c = s.admissible_counts();
        assert_eq!(c.len(), 5);
        assert!(c.contains(&vec![0, 1, 1]));
        assert!(!c.contains(&vec![1, 0, 0]));
        assert_eq!(IntervalSystem::new(&[1.0, 5.0]).unwrap().thresholds(), &[1.0, 1.0]);
    }
}
