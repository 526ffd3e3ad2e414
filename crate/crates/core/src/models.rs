//! Random words, Bernoulli last passage percolation, Aztec diamond zig-zag
//! paths and hexagon lozenge slices, each with an exhaustive oracle.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ensembles::{auto_truncation, expectation, for_each_subset, krawtchouk_exact_table, krawtchouk_z_exact, word_measure_exact, EnsembleSpec, MultiplicativeFunctional};
use crate::error::{domain, Error, Result};
use crate::numeric::{binomial, factorial};
use crate::partitions::enumerate_partitions;
use crate::rsk::{bernoulli_path_max, IntMatrix};

/// Largest word length summed exactly.
pub const MAX_EXACT_WORD: usize = 20;
/// Largest `N + M - 1` for exact Krawtchouk sums.
pub const MAX_KRAWTCHOUK_SUPPORT: usize = 24;
pub const MAX_AZTEC_ORDER: usize = 5;

fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WordLength {
    Fixed(usize),
    /// Length drawn from Poisson(α).
    Poissonized(f64),
}

/// `P[L(w) <= t]` for a uniform word over `m` letters.
pub fn word_gap(m: usize, len: WordLength, t: usize) -> Result<f64> {
    match len {
        WordLength::Fixed(n) => Ok(word_gap_exact(m, n, t)?.to_f64().unwrap_or(f64::NAN)),
        WordLength::Poissonized(alpha) => {
            let spec = EnsembleSpec::Charlier { m, alpha };
            spec.validate()?;
            let trunc = auto_truncation(&spec, 1e-13)?;
            Ok(expectation(&spec, &MultiplicativeFunctional::first_row_at_most(t), trunc)?.value)
        }
    }
}

pub fn word_gap_exact(m: usize, n: usize, t: usize) -> Result<BigRational> {
    if m == 0 {
        return domain("alphabet must be nonempty");
    }
    if n > MAX_EXACT_WORD {
        return Err(Error::TooLarge(format!("word length {n} exceeds {MAX_EXACT_WORD}; use the sampler")));
    }
    Ok(enumerate_partitions(n, m, t).map(|l| word_measure_exact(m, n, &l)).sum())
}

/// Seppäläinen's first-passage model: vertical edges take `tau0`, horizontal
/// edges take `lambda` with probability `p` and `kappa` otherwise. The target
/// point is `(k, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationSpec {
    pub tau0: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub p: f64,
    pub k: usize,
    pub l: usize,
}

impl PercolationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau0 > 0.0 && self.kappa > self.lambda && self.lambda >= 0.0 && self.p > 0.0 && self.p < 1.0) {
            return domain(format!("invalid percolation parameters {self:?}"));
        }
        Ok(())
    }

    /// Dimensions `(M, N) = (k, l + 1)` of the Bernoulli matrix.
    pub fn matrix_shape(&self) -> (usize, usize) {
        (self.k, self.l + 1)
    }
}

/// Exact law of `L(W)` for an `m x n` Bernoulli(p) matrix, by enumerating all
/// `2^{mn}` matrices. Entry `ℓ` is `P[L(W) = ℓ]`.
pub fn percolation_law_bruteforce(m: usize, n: usize, p: &BigRational) -> Result<Vec<BigRational>> {
    let cells = m * n;
    if m == 0 || n == 0 || cells > 24 {
        return Err(Error::TooLarge(format!("{m}x{n} matrices are too many to enumerate")));
    }
    // tally by (L, number of ones) and weigh at the end
    let mut tally = vec![vec![0u64; cells + 1]; m + 1];
    let mut w = IntMatrix::zeros(m, n)?;
    for bits in 0u32..(1 << cells) {
        for c in 0..cells {
            w.set(c / n, c % n, u64::from((bits >> c) & 1));
        }
        tally[bernoulli_path_max(&w) as usize][bits.count_ones() as usize] += 1;
    }
    let q = BigRational::one() - p;
    let pw: Vec<BigRational> = (0..=cells).map(|o| p.pow(o as i32) * (&q).pow((cells - o) as i32)).collect();
    Ok(tally
        .iter()
        .map(|row| row.iter().zip(&pw).filter(|(c, _)| **c > 0).map(|(&c, w)| int(c) * w).sum())
        .collect())
}

/// `P[L(W) <= n]` from the Krawtchouk ensemble with `N` particles on
/// `{0..N+M-1}`: the probability that every particle sits at or below
/// `n + N - 1`.
pub fn percolation_gap_exact(m: usize, n_cols: usize, n: usize, p: &BigRational) -> Result<BigRational> {
    if m == 0 || n_cols == 0 {
        return domain("matrix dimensions must be positive");
    }
    if n >= m {
        return Ok(BigRational::one());
    }
    let k = n_cols + m - 1;
    if k > MAX_KRAWTCHOUK_SUPPORT {
        return Err(Error::TooLarge(format!("Krawtchouk support {k} too large for exact sums; use the sampler")));
    }
    let cap = n + n_cols - 1;
    Ok(krawtchouk_exact_table(n_cols, k, p)?
        .into_iter()
        .filter(|(h, _)| h.iter().all(|&x| x <= cap))
        .map(|(_, pr)| pr)
        .sum())
}

pub fn percolation_gap(spec: &PercolationSpec, n: usize) -> Result<f64> {
    spec.validate()?;
    let (m, cols) = spec.matrix_shape();
    let p = BigRational::from_float(spec.p).ok_or_else(|| Error::Domain("p is not finite".into()))?;
    Ok(percolation_gap_exact(m, cols, n, &p)?.to_f64().unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationConstants {
    /// Time constant `μ(x, y)`.
    pub mu: f64,
    /// Fluctuation scale; zero when `degenerate`.
    pub sigma: f64,
    /// True when `py >= qx`, where no Tracy-Widom fluctuations are claimed.
    pub degenerate: bool,
}

pub fn percolation_constants(x: f64, y: f64, spec: &PercolationSpec) -> Result<PercolationConstants> {
    spec.validate()?;
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("need x, y > 0, got ({x}, {y})"));
    }
    let (p, q) = (spec.p, 1.0 - spec.p);
    let base = spec.lambda * x + spec.tau0 * y;
    if p * y > q * x {
        return Ok(PercolationConstants { mu: base, sigma: 0.0, degenerate: true });
    }
    let gap = (q * x).sqrt() - (p * y).sqrt();
    let mu = base + (spec.kappa - spec.lambda) * gap * gap;
    if gap <= 0.0 {
        return Ok(PercolationConstants { mu, sigma: 0.0, degenerate: true });
    }
    let sigma = (p * q).powf(1.0 / 6.0) / (x * y).powf(1.0 / 6.0) * ((p * x).sqrt() + (q * y).sqrt()).powf(2.0 / 3.0) * gap.powf(2.0 / 3.0);
    Ok(PercolationConstants { mu, sigma, degenerate: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathColor {
    White,
    Black,
}

/// A zig-zag path of row `r` in the Aztec diamond of order `n`, given by its
/// turn positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AztecZigzag {
    n: usize,
    r: usize,
    color: PathColor,
    turns: Vec<usize>,
}

impl AztecZigzag {
    pub fn new(n: usize, r: usize, color: PathColor, mut turns: Vec<usize>) -> Result<Self> {
        turns.sort_unstable();
        let top = match color {
            PathColor::White => n,
            PathColor::Black => n.saturating_sub(1),
        };
        let distinct = turns.windows(2).all(|w| w[0] < w[1]);
        if n == 0 || r == 0 || r > n || turns.len() != r || !distinct || turns.iter().any(|&t| t > top) {
            return domain(format!("invalid zig-zag path n={n}, r={r}, {color:?}, turns {turns:?}"));
        }
        Ok(Self { n, r, color, turns })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn color(&self) -> PathColor {
        self.color
    }

    pub fn turns(&self) -> &[usize] {
        &self.turns
    }

    /// Size `K` of the Krawtchouk support `{0..K}` for this path.
    fn support(&self) -> usize {
        match self.color {
            PathColor::White => self.n,
            PathColor::Black => self.n - 1,
        }
    }
}

/// Exact Krawtchouk probability of the particle set `h` in `{0..k}`.
pub fn krawtchouk_set_exact(h: &[usize], k: usize, p: &BigRational) -> BigRational {
    let n = h.len();
    if h.iter().any(|&x| x > k) {
        return BigRational::zero();
    }
    let q = BigRational::one() - p;
    let mut t = int(factorial(n as u64));
    for i in 0..n {
        t *= int(binomial(k as u64, h[i] as u64)) * p.pow(h[i] as i32) * (&q).pow((k - h[i]) as i32);
        for j in i + 1..n {
            let d = BigInt::from(h[i] as i64 - h[j] as i64);
            t *= int(&d * &d);
        }
    }
    t / krawtchouk_z_exact(n, k, p)
}

/// Probability of a zig-zag path under uniform tilings: the Krawtchouk
/// ensemble with `p = 1/2`.
pub fn aztec_zigzag_pmf(z: &AztecZigzag) -> BigRational {
    krawtchouk_set_exact(&z.turns, z.support(), &ratio(1, 2))
}

fn ratio_product(v: &[usize], reversed: bool) -> BigRational {
    // ∏_{i<j} |v_i - v_j| / (j - i)
    let mut t = BigRational::one();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = if reversed { v[j] as i64 - v[i] as i64 } else { v[i] as i64 - v[j] as i64 };
            t *= ratio(d, (j - i) as i64);
        }
    }
    t
}

/// The same probability as the count of tilings above the path times the
/// count below it, over all tilings.
pub fn aztec_zigzag_pmf_product(z: &AztecZigzag) -> BigRational {
    let n = z.support();
    let r = z.r;
    // turns in decreasing order h_1 > ... > h_r
    let h: Vec<usize> = z.turns.iter().rev().copied().collect();
    let k: Vec<usize> = (0..=n).filter(|x| !z.turns.contains(x)).collect();
    let two = int(2);
    let upper = (&two).pow((r * (r - 1) / 2) as i32) * ratio_product(&h, false);
    let lower = (&two).pow(((n + 1 - r) * n.saturating_sub(r) / 2) as i32) * ratio_product(&k, true);
    upper * lower / (&two).pow((n * (n + 1) / 2) as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Partner {
    Left,
    Right,
    Up,
    Down,
}

/// A domino tiling of the Aztec diamond, stored as the partner direction of
/// every unit square `[m, m+1] x [l, l+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AztecTiling {
    n: usize,
    grid: Vec<Option<Partner>>,
}

fn in_diamond(n: usize, m: i64, l: i64) -> bool {
    let lim = n as i64 + 1;
    [(m, l), (m + 1, l), (m, l + 1), (m + 1, l + 1)].iter().all(|(x, y)| x.abs() + y.abs() <= lim)
}

impl AztecTiling {
    fn width(n: usize) -> i64 {
        2 * n as i64 + 2
    }

    fn index(n: usize, m: i64, l: i64) -> usize {
        let off = n as i64 + 1;
        ((l + off) * Self::width(n) + (m + off)) as usize
    }

    fn partner(&self, m: i64, l: i64) -> Option<Partner> {
        if !in_diamond(self.n, m, l) {
            return None;
        }
        self.grid[Self::index(self.n, m, l)]
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Turn positions of the white zig-zag path of row `r`: the diagonal
    /// square `k` has corners `(k-r, n+1-k-r)` and `(k-r+1, n-k-r)`, and the
    /// path passes it east then south exactly when the domino covering it
    /// lies to its left or below.
    pub fn white_zigzag(&self, r: usize) -> Vec<usize> {
        let (n, ri) = (self.n as i64, r as i64);
        (0..=self.n)
            .filter(|&k| {
                let (m, l) = (k as i64 - ri, n - k as i64 - ri);
                matches!(self.partner(m, l), Some(Partner::Left | Partner::Down))
            })
            .collect()
    }

    /// Turn positions of the black zig-zag path of row `r` through the
    /// squares with corners `(k-r, n-r-k)` and `(k-r+1, n-r-k-1)`; the path
    /// turns south then east exactly when the domino lies above or to the
    /// right.
    pub fn black_zigzag(&self, r: usize) -> Vec<usize> {
        let (n, ri) = (self.n as i64, r as i64);
        (0..self.n)
            .filter(|&k| {
                let (m, l) = (k as i64 - ri, n - ri - k as i64 - 1);
                matches!(self.partner(m, l), Some(Partner::Up | Partner::Right))
            })
            .collect()
    }
}

/// All domino tilings of the Aztec diamond of order `n`, by filling the
/// lowest, then leftmost, free square.
pub fn enumerate_aztec_tilings(n: usize) -> Result<Vec<AztecTiling>> {
    if n == 0 || n > MAX_AZTEC_ORDER {
        return Err(Error::TooLarge(format!("Aztec order must be in 1..={MAX_AZTEC_ORDER}, got {n}")));
    }
    let lim = n as i64 + 1;
    let cells: Vec<(i64, i64)> = (-lim..lim).flat_map(|l| (-lim..lim).map(move |m| (m, l))).filter(|&(m, l)| in_diamond(n, m, l)).collect();
    let w = AztecTiling::width(n);
    let mut grid = vec![None; (w * w) as usize];
    let mut out = Vec::new();
    fill(n, &cells, 0, &mut grid, &mut out);
    Ok(out)
}

fn fill(n: usize, cells: &[(i64, i64)], from: usize, grid: &mut [Option<Partner>], out: &mut Vec<AztecTiling>) {
    let Some(pos) = (from..cells.len()).find(|&i| {
        let (m, l) = cells[i];
        grid[AztecTiling::index(n, m, l)].is_none()
    }) else {
        out.push(AztecTiling { n, grid: grid.to_vec() });
        return;
    };
    let (m, l) = cells[pos];
    let here = AztecTiling::index(n, m, l);
    for (dm, dl, mine, theirs) in [(1, 0, Partner::Right, Partner::Left), (0, 1, Partner::Up, Partner::Down)] {
        let (m2, l2) = (m + dm, l + dl);
        if !in_diamond(n, m2, l2) {
            continue;
        }
        let there = AztecTiling::index(n, m2, l2);
        if grid[there].is_some() {
            continue;
        }
        grid[here] = Some(mine);
        grid[there] = Some(theirs);
        fill(n, cells, pos + 1, grid, out);
        grid[here] = None;
        grid[there] = None;
    }
}

/// Empirical zig-zag law over all tilings: counts keyed by turn set.
pub fn aztec_zigzag_counts(tilings: &[AztecTiling], r: usize, color: PathColor) -> BTreeMap<Vec<usize>, u64> {
    let mut counts = BTreeMap::new();
    for t in tilings {
        let turns = match color {
            PathColor::White => t.white_zigzag(r),
            PathColor::Black => t.black_zigzag(r),
        };
        *counts.entry(turns).or_insert(0) += 1;
    }
    counts
}

fn hahn_weight(a: usize, k: usize, h: usize) -> BigRational {
    int(binomial((h + a - k) as u64, h as u64)) * int(binomial((2 * a - 1 - h) as u64, (a + k - 1 - h) as u64))
}

/// Probability of the vertical-lozenge positions `h` on line `k` of a
/// uniformly random lozenge tiling of the `a, a, a` hexagon.
pub fn hexagon_slice_pmf(a: usize, k: usize, h: &[usize]) -> Result<BigRational> {
    if a == 0 || k > a || h.len() != k {
        return domain(format!("need a >= 1, k <= a and k positions, got a={a}, k={k}, {h:?}"));
    }
    if a + k > 21 {
        return Err(Error::TooLarge(format!("hexagon a={a}, k={k} too large for exact sums")));
    }
    let top = a + k - 1;
    let mut sorted = h.to_vec();
    sorted.sort_unstable();
    if sorted.iter().any(|&x| x > top) || sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(BigRational::zero());
    }
    let weight = |h: &[usize]| -> BigRational {
        let mut t = BigRational::one();
        for i in 0..h.len() {
            t *= hahn_weight(a, k, h[i]);
            for j in i + 1..h.len() {
                let d = BigInt::from(h[i] as i64 - h[j] as i64);
                t *= int(&d * &d);
            }
        }
        t
    };
    let mut z = BigRational::zero();
    for_each_subset(top, k, |s| z += weight(s));
    Ok(weight(&sorted) / z)
}

/// Counts of slice configurations over all plane partitions in the
/// `a x a x a` box. The top face of column `(i, j)` lies on line `k` when
/// `j - i = a - k`, at position `π(i, j) - i + k`.
pub fn hexagon_slice_counts(a: usize, k: usize) -> Result<BTreeMap<Vec<usize>, u64>> {
    if a == 0 || a > 4 || k > a {
        return Err(Error::TooLarge(format!("plane partition oracle supports a <= 4, k <= a; got a={a}, k={k}")));
    }
    let mut counts = BTreeMap::new();
    let mut pi = vec![0usize; a * a];
    plane_partitions(a, 0, &mut pi, &mut |pi| {
        let mut h: Vec<usize> = (1..=k).map(|i| pi[(i - 1) * a + (i + a - k - 1)] + k - i).collect();
        h.sort_unstable();
        *counts.entry(h).or_insert(0) += 1;
    });
    Ok(counts)
}

fn plane_partitions(a: usize, cell: usize, pi: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    if cell == a * a {
        visit(pi);
        return;
    }
    let (i, j) = (cell / a, cell % a);
    let mut hi = a;
    if i > 0 {
        hi = hi.min(pi[(i - 1) * a + j]);
    }
    if j > 0 {
        hi = hi.min(pi[i * a + j - 1]);
    }
    for v in 0..=hi {
        pi[cell] = v;
        plane_partitions(a, cell + 1, pi, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_gap_small() {
        assert_eq!(word_gap_exact(2, 2, 1).unwrap(), ratio(1, 4));
        assert_eq!(word_gap_exact(3, 4, 4).unwrap(), BigRational::one());
        assert!(word_gap_exact(2, 21, 3).is_err());
        let v = word_gap(2, WordLength::Fixed(2), 1).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn poissonized_word_gap_matches_mixture() {
        let (m, alpha, t) = (2usize, 1.0, 2usize);
        let direct = word_gap(m, WordLength::Poissonized(alpha), t).unwrap();
        let mix: f64 = (0..=MAX_EXACT_WORD)
            .map(|n| crate::numeric::poisson_pmf(alpha, n as u64) * word_gap_exact(m, n, t).unwrap().to_f64().unwrap())
            .sum();
        assert!((direct - mix).abs() < 1e-12, "{direct} vs {mix}");
    }

    #[test]
    fn percolation_small() {
        let p = ratio(1, 3);
        assert_eq!(percolation_gap_exact(1, 1, 0, &p).unwrap(), ratio(2, 3));
        assert_eq!(percolation_gap_exact(3, 2, 3, &p).unwrap(), BigRational::one());
        for (m, n) in [(2, 3), (3, 2), (3, 3), (1, 4)] {
            let law = percolation_law_bruteforce(m, n, &p).unwrap();
            let mut cum = BigRational::zero();
            for (l, pr) in law.iter().enumerate() {
                cum += pr;
                assert_eq!(cum, percolation_gap_exact(m, n, l, &p).unwrap(), "m={m} n={n} l={l}");
            }
        }
    }

    #[test]
    fn percolation_branches() {
        let spec = PercolationSpec { tau0: 1.0, kappa: 2.0, lambda: 0.5, p: 0.5, k: 1, l: 1 };
        let c = percolation_constants(1.0, 1.0, &spec).unwrap();
        assert!(c.degenerate && c.sigma == 0.0);
        assert!((c.mu - 1.5).abs() < 1e-15);
        let c = percolation_constants(1.0, 2.0, &spec).unwrap();
        assert!(c.degenerate && (c.mu - 2.5).abs() < 1e-15);
        let s2 = PercolationSpec { p: 0.25, ..spec };
        let c = percolation_constants(2.0, 1.0, &s2).unwrap();
        let gap = (1.5f64).sqrt() - 0.5;
        assert!(!c.degenerate && (c.mu - (1.0 + 1.0 + 1.5 * gap * gap)).abs() < 1e-14);
        assert!(c.sigma > 0.0);
    }

    #[test]
    fn aztec_counts_and_laws() {
        for n in 1..=4 {
            let tilings = enumerate_aztec_tilings(n).unwrap();
            assert_eq!(tilings.len(), 1 << (n * (n + 1) / 2));
            let total = int(tilings.len() as u64);
            for r in 1..=n {
                for color in [PathColor::White, PathColor::Black] {
                    let counts = aztec_zigzag_counts(&tilings, r, color);
                    let mut mass = BigRational::zero();
                    for (turns, c) in counts {
                        let z = AztecZigzag::new(n, r, color, turns.clone()).unwrap_or_else(|_| panic!("n={n} r={r} {color:?} turns {turns:?}"));
                        let p = aztec_zigzag_pmf(&z);
                        assert_eq!(p, int(c) / &total, "n={n} r={r} {color:?} {turns:?}");
                        assert_eq!(p, aztec_zigzag_pmf_product(&z));
                        mass += p;
                    }
                    assert_eq!(mass, BigRational::one());
                }
            }
        }
    }

    #[test]
    fn aztec_order_one() {
        for t in [0, 1] {
            let z = AztecZigzag::new(1, 1, PathColor::White, vec![t]).unwrap();
            assert_eq!(aztec_zigzag_pmf(&z), ratio(1, 2));
        }
        assert!(AztecZigzag::new(2, 1, PathColor::Black, vec![2]).is_err());
        assert!(enumerate_aztec_tilings(6).is_err());
    }

    #[test]
    fn hexagon_matches_plane_partitions() {
        for a in 1..=3 {
            for k in 0..=a {
                let counts = hexagon_slice_counts(a, k).unwrap();
                let total: u64 = counts.values().sum();
                let mut mass = BigRational::zero();
                for (h, c) in &counts {
                    let p = hexagon_slice_pmf(a, k, h).unwrap();
                    assert_eq!(p, ratio(*c, total), "a={a} k={k} {h:?}");
                    mass += p;
                }
                assert_eq!(mass, BigRational::one());
            }
        }
        assert_eq!(hexagon_slice_counts(2, 1).unwrap().values().sum::<u64>(), 20);
        assert_eq!(hexagon_slice_pmf(2, 1, &[5]).unwrap(), BigRational::zero());
    }
}
