//! Seeded samplers for permutations, words, random matrices and Poisson
//! sizes, empirical laws built from them, and goodness-of-fit statistics.
//!
//! The generator is SplitMix64 (increment `0x9E3779B97F4A7C15`, finalizer
//! multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`). Stream `i` of
//! master seed `s` starts from state `s ^ mix(i + 1)` where `mix` is the same
//! finalizer. Uniform reals are `(u >> 11) * 2^-53`; bounded integers use
//! rejection on the top multiple of the bound.

use std::collections::BTreeMap;

use rand_core::{RngCore, SeedableRng};
pub use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::ln_factorial;
use crate::partitions::Partition;
use crate::rsk::{rsk_shape_permutation, rsk_shape_word, IntMatrix, Word};

const MIX_A: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_B: u64 = 0x94D0_49BB_1331_11EB;
/// Work is split into this many blocks, each with its own stream, so results
/// do not depend on the thread count.
pub const BLOCKS: u64 = 64;
const POISSON_INVERSION_MAX: f64 = 30.0;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_A);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_B);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

pub fn stream(seed: u64, index: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed ^ mix(index.wrapping_add(1)))
}

/// Uniform on `[0, 1)` with 53 random bits.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on `{0..bound-1}`.
pub fn below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % bound;
        }
    }
}

/// Uniform permutation of `{1..n}` in one-line notation (Fisher-Yates from
/// the top).
pub fn sample_permutation(n: usize, rng: &mut impl RngCore) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        p.swap(i, j);
    }
    p
}

pub fn sample_word(m: usize, n: usize, rng: &mut impl RngCore) -> Result<Word> {
    if m == 0 {
        return domain("alphabet must be nonempty");
    }
    Word::new((0..n).map(|_| below(rng, m as u64) as usize + 1).collect(), m)
}

pub fn sample_bernoulli_matrix(m: usize, n: usize, p: f64, rng: &mut impl RngCore) -> Result<IntMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p must lie in [0, 1], got {p}"));
    }
    IntMatrix::new(m, n, (0..m * n).map(|_| u64::from(uniform(rng) < p)).collect())
}

/// `P[k] = (1 - q) q^k` by inversion.
pub fn sample_geometric(q: f64, rng: &mut impl RngCore) -> Result<u64> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q must lie in [0, 1), got {q}"));
    }
    if q == 0.0 {
        return Ok(0);
    }
    let u = 1.0 - uniform(rng);
    Ok((u.ln() / q.ln()).floor() as u64)
}

pub fn sample_geometric_matrix(rows: usize, cols: usize, q: f64, rng: &mut impl RngCore) -> Result<IntMatrix> {
    let entries = (0..rows * cols).map(|_| sample_geometric(q, rng)).collect::<Result<Vec<_>>>()?;
    IntMatrix::new(rows, cols, entries)
}

/// Poisson(α): sequential inversion for `α <= 30`, Hörmann's PTRS above.
pub fn sample_poisson(alpha: f64, rng: &mut impl RngCore) -> Result<u64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be finite and nonnegative, got {alpha}"));
    }
    if alpha == 0.0 {
        return Ok(0);
    }
    if alpha <= POISSON_INVERSION_MAX {
        let u = uniform(rng);
        let mut k = 0u64;
        let mut p = (-alpha).exp();
        let mut cdf = p;
        while u >= cdf {
            k += 1;
            p *= alpha / k as f64;
            cdf += p;
            if p == 0.0 && cdf < u {
                // rounding left a sliver of mass uncovered; stop at the mode
                return Ok(alpha.floor() as u64);
            }
        }
        return Ok(k);
    }
    let slam = alpha.sqrt();
    let loglam = alpha.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = uniform(rng) - 0.5;
        let v = uniform(rng);
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + alpha + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return Ok(k as u64);
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -alpha + k * loglam - ln_factorial(k as u64) {
            return Ok(k as u64);
        }
    }
}

/// Outcome counts with the seed that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution<K: Ord> {
    pub counts: BTreeMap<K, u64>,
    pub total: u64,
    pub seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct Entry<K> {
    outcome: K,
    count: u64,
}

#[derive(Serialize)]
struct Wire<'a, K> {
    total: u64,
    seed: Option<u64>,
    counts: Vec<Entry<&'a K>>,
}

impl<K: Ord + Serialize> Serialize for EmpiricalDistribution<K> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire { total: self.total, seed: self.seed, counts: self.counts.iter().map(|(k, &c)| Entry { outcome: k, count: c }).collect() }.serialize(s)
    }
}

impl<K: Ord + Clone> EmpiricalDistribution<K> {
    pub fn new(seed: Option<u64>) -> Self {
        Self { counts: BTreeMap::new(), total: 0, seed }
    }

    pub fn add(&mut self, k: K) {
        *self.counts.entry(k).or_insert(0) += 1;
        self.total += 1;
    }

    /// Merging is associative and commutative, so block order is irrelevant.
    pub fn merge(mut self, other: Self) -> Self {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
        self
    }

    pub fn frequency(&self, k: &K) -> f64 {
        self.counts.get(k).copied().unwrap_or(0) as f64 / self.total as f64
    }

    /// Relabels outcomes, merging counts that collide.
    pub fn map<J: Ord + Clone>(&self, f: impl Fn(&K) -> J) -> EmpiricalDistribution<J> {
        let mut out = EmpiricalDistribution::new(self.seed);
        for (k, &c) in &self.counts {
            *out.counts.entry(f(k)).or_insert(0) += c;
        }
        out.total = self.total;
        out
    }
}

/// Draws `samples` values of `draw`, split over [`BLOCKS`] streams of
/// `seed` and run in parallel; identical seeds give identical counts.
pub fn empirical_law<K, F>(samples: u64, seed: u64, draw: F) -> Result<EmpiricalDistribution<K>>
where
    K: Ord + Clone + Send,
    F: Fn(&mut SplitMix64) -> Result<K> + Sync,
{
    if samples == 0 {
        return domain("need at least one sample");
    }
    let per = samples / BLOCKS;
    let extra = samples % BLOCKS;
    let blocks: Vec<Result<EmpiricalDistribution<K>>> = (0..BLOCKS)
        .into_par_iter()
        .map(|b| {
            let mut r = stream(seed, b);
            let mut d = EmpiricalDistribution::new(Some(seed));
            for _ in 0..per + u64::from(b < extra) {
                d.add(draw(&mut r)?);
            }
            Ok(d)
        })
        .collect();
    let mut out = EmpiricalDistribution::new(Some(seed));
    for b in blocks {
        out = out.merge(b?);
    }
    Ok(out)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// RSK shapes of every permutation of `{1..n}`.
pub fn exhaustive_permutation_shapes(n: usize) -> Result<EmpiricalDistribution<Partition>> {
    if n > 10 {
        return domain(format!("exhaustive enumeration of S_{n} is too large"));
    }
    let mut p: Vec<usize> = (1..=n).collect();
    let mut d = EmpiricalDistribution::new(None);
    loop {
        d.add(rsk_shape_permutation(&p)?);
        if !next_permutation(&mut p) {
            return Ok(d);
        }
    }
}

/// RSK shapes of all `m^n` words.
pub fn exhaustive_word_shapes(m: usize, n: usize) -> Result<EmpiricalDistribution<Partition>> {
    if m == 0 || (m as f64).powi(n as i32) > 1e7 {
        return domain(format!("cannot enumerate all words with m={m}, n={n}"));
    }
    let mut letters = vec![1usize; n];
    let mut d = EmpiricalDistribution::new(None);
    loop {
        d.add(rsk_shape_word(&Word::new(letters.clone(), m)?));
        // odometer increment
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(d);
            }
            i -= 1;
            if letters[i] < m {
                letters[i] += 1;
                break;
            }
            letters[i] = 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson test of `observed` against `prob`. Outcomes with expected count
/// below 5, together with the mass outside the listed support, are pooled
/// into one cell.
pub fn chi_square<K: Ord + Clone>(observed: &EmpiricalDistribution<K>, support: &[K], prob: impl Fn(&K) -> f64) -> Result<ChiSquare> {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let n = observed.total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    let mut listed_p = 0.0;
    let mut listed_o = 0u64;
    for k in support {
        let p = prob(k);
        listed_p += p;
        let o = observed.counts.get(k).copied().unwrap_or(0);
        listed_o += o;
        let e = p * n;
        if e < 5.0 {
            pool_o += o as f64;
            pool_e += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    pool_o += (observed.total - listed_o) as f64;
    pool_e += (1.0 - listed_p).max(0.0) * n;
    if pool_e > 0.0 || pool_o > 0.0 {
        if pool_e < 5.0 && !cells.is_empty() {
            let (i, _) = cells.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).unwrap();
            let (o, e) = cells.remove(i);
            cells.push((o + pool_o, e + pool_e));
        } else {
            cells.push((pool_o, pool_e));
        }
    }
    if cells.len() < 2 {
        return domain("chi-square test needs at least two cells after pooling");
    }
    let statistic: f64 = cells.iter().map(|(o, e)| if *e > 0.0 { (o - e) * (o - e) / e } else { f64::INFINITY }).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| crate::Error::Domain(e.to_string()))?;
    Ok(ChiSquare { statistic, dof, p_value: 1.0 - dist.cdf(statistic) })
}

/// Kolmogorov distance between the empirical law of `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        let f = cdf(s[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_reproducible() {
        let a: Vec<u64> = (0..5).map({
            let mut r = rng(7);
            move |_| r.next_u64()
        }).collect();
        let mut r = rng(7);
        assert!(a.iter().all(|&v| v == r.next_u64()));
        assert_ne!(stream(7, 0).next_u64(), stream(7, 1).next_u64());
        let u = uniform(&mut rng(3));
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn geometric_mean() {
        let q = 0.2;
        let n = 1_000_000u64;
        let d = empirical_law(n, 11, |r| sample_geometric(q, r)).unwrap();
        let mean = d.counts.iter().map(|(k, c)| *k as f64 * *c as f64).sum::<f64>() / n as f64;
        let sd = (q / ((1.0 - q) * (1.0 - q)) / n as f64).sqrt();
        assert!((mean - q / (1.0 - q)).abs() < 4.0 * sd, "{mean}");
    }

    #[test]
    fn poisson_samplers() {
        let n = 200_000u64;
        for alpha in [1.0, 12.0, 80.0] {
            let d = empirical_law(n, 5, |r| sample_poisson(alpha, r)).unwrap();
            let mean = d.counts.iter().map(|(k, c)| *k as f64 * *c as f64).sum::<f64>() / n as f64;
            assert!((mean - alpha).abs() < 4.0 * (alpha / n as f64).sqrt(), "alpha={alpha}: {mean}");
            let support: Vec<u64> = (0..(alpha * 3.0) as u64 + 20).collect();
            let chi = chi_square(&d, &support, |&k| crate::numeric::poisson_pmf(alpha, k)).unwrap();
            assert!(chi.p_value > 1e-3, "alpha={alpha}: {chi:?}");
        }
        let d = empirical_law(n, 9, |r| sample_poisson(1.0, r)).unwrap();
        let p0 = (-1f64).exp();
        assert!((d.frequency(&0) - p0).abs() < 4.0 * (p0 * (1.0 - p0) / n as f64).sqrt());
    }

    #[test]
    fn permutations_uniform() {
        let d = empirical_law(100_000, 1, |r| Ok(sample_permutation(4, r))).unwrap();
        assert_eq!(d.counts.len(), 24);
        let support: Vec<Vec<usize>> = d.counts.keys().cloned().collect();
        let chi = chi_square(&d, &support, |_| 1.0 / 24.0).unwrap();
        assert!(chi.p_value > 1e-3, "{chi:?}");
    }

    #[test]
    fn exhaustive_laws() {
        let d = exhaustive_word_shapes(2, 2).unwrap();
        assert_eq!(d.counts[&Partition::new(vec![2]).unwrap()], 3);
        assert_eq!(d.counts[&Partition::new(vec![1, 1]).unwrap()], 1);
        let s = exhaustive_permutation_shapes(4).unwrap();
        assert_eq!(s.total, 24);
        assert_eq!(s.counts[&Partition::new(vec![2, 2]).unwrap()], 4);
    }

    #[test]
    fn same_seed_same_counts() {
        let f = |r: &mut SplitMix64| Ok(rsk_shape_permutation(&sample_permutation(6, r))?);
        let a = empirical_law(5000, 42, f).unwrap();
        let b = empirical_law(5000, 42, f).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"seed\":42"));
    }

    #[test]
    fn ks_basics() {
        let s: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_distance(&s, |x| x.clamp(0.0, 1.0)) < 1.1e-3);
        assert!((ks_distance(&[0.0; 10], |x| if x < 0.0 { 0.0 } else { 0.5 }) - 0.5).abs() < 1e-15);
    }
}
