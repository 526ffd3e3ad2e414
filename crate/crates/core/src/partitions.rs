//! Integer partitions, particle coordinates and the exact products that
//! appear in dimension formulas.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::factorial;

/// A partition stored as its nonzero parts in weakly decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Builds a partition, stripping trailing zeros. Fails if the parts are
    /// not weakly decreasing.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("parts {parts:?} are not weakly decreasing"));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self(parts))
    }

    /// Sorts arbitrary row lengths into a partition.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Self(parts)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// `λ_i` with 1-based `i`; zero past the length.
    pub fn part(&self, i: usize) -> usize {
        assert!(i >= 1, "parts are indexed from 1");
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parts padded with zeros to exactly `m` entries.
    pub fn padded(&self, m: usize) -> Result<Vec<usize>> {
        if m < self.length() {
            return domain(format!("length {} exceeds m = {m}", self.length()));
        }
        let mut v = self.0.clone();
        v.resize(m, 0);
        Ok(v)
    }

    /// Column lengths `λ'_k = #{i : λ_i >= k}`.
    pub fn conjugate(&self) -> Self {
        let cols = self.0.first().copied().unwrap_or(0);
        Self((1..=cols).map(|k| self.0.iter().take_while(|&&p| p >= k).count()).collect())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

pub fn conjugate(lambda: &Partition) -> Partition {
    lambda.conjugate()
}

/// `M` strictly decreasing nonnegative positions `h_i = λ_i + M - i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParticleConfig {
    h: Vec<usize>,
}

impl ParticleConfig {
    pub fn new(mut h: Vec<usize>) -> Result<Self> {
        h.sort_unstable_by(|a, b| b.cmp(a));
        if h.windows(2).any(|w| w[0] == w[1]) {
            return domain(format!("positions {h:?} are not distinct"));
        }
        Ok(Self { h })
    }

    pub fn from_partition(lambda: &Partition, m: usize) -> Result<Self> {
        let parts = lambda.padded(m)?;
        Ok(Self {
            h: parts.iter().enumerate().map(|(i, &p)| p + m - 1 - i).collect(),
        })
    }

    pub fn to_partition(&self) -> Partition {
        let m = self.h.len();
        Partition(self.h.iter().enumerate().map(|(i, &x)| x + 1 + i - m).filter(|&p| p > 0).collect())
    }

    /// Positions in decreasing order.
    pub fn positions(&self) -> &[usize] {
        &self.h
    }

    pub fn count(&self) -> usize {
        self.h.len()
    }
}

/// `V_m(λ) = ∏_{i<j≤m} (λ_i - λ_j + j - i)`.
pub fn vandermonde_v(lambda: &Partition, m: usize) -> Result<BigUint> {
    let p = lambda.padded(m)?;
    let mut acc = BigUint::one();
    for i in 0..m {
        for j in i + 1..m {
            acc *= BigUint::from(p[i] - p[j] + j - i);
        }
    }
    Ok(acc)
}

/// `W_m(λ) = ∏_{i≤m} 1/(λ_i + m - i)!`.
pub fn weight_w(lambda: &Partition, m: usize) -> Result<BigRational> {
    let p = lambda.padded(m)?;
    let den = p
        .iter()
        .enumerate()
        .fold(BigUint::one(), |acc, (i, &x)| acc * factorial((x + m - 1 - i) as u64));
    Ok(BigRational::new(BigInt::one(), BigInt::from(den)))
}

/// Number of standard Young tableaux of shape `λ`, `N! V_ℓ W_ℓ`.
pub fn frobenius_dimension(lambda: &Partition) -> BigUint {
    let l = lambda.length();
    let v = vandermonde_v(lambda, l).expect("m equals the length");
    let w = weight_w(lambda, l).expect("m equals the length");
    let f = BigRational::from_integer(BigInt::from(factorial(lambda.size() as u64) * v)) * w;
    debug_assert!(f.is_integer());
    f.to_integer().to_biguint().expect("dimension is positive")
}

/// Floating `ln f^λ`, for sizes where exact arithmetic is not needed.
pub fn ln_frobenius_dimension(lambda: &Partition) -> f64 {
    use crate::numeric::ln_factorial;
    let l = lambda.length();
    let p = lambda.parts();
    let mut s = ln_factorial(lambda.size() as u64);
    for i in 0..l {
        s -= ln_factorial((p[i] + l - 1 - i) as u64);
        for j in i + 1..l {
            s += ((p[i] - p[j] + j - i) as f64).ln();
        }
    }
    s
}

/// All partitions of `n` with at most `max_len` parts, each at most
/// `max_part`, in decreasing lexicographic order.
pub fn enumerate_partitions(n: usize, max_len: usize, max_part: usize) -> impl Iterator<Item = Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill(n, max_len, max_part.min(n), &mut cur, &mut out);
    out.into_iter()
}

fn fill(rest: usize, slots: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition(cur.clone()));
        return;
    }
    if slots == 0 {
        return;
    }
    for p in (1..=cap.min(rest)).rev() {
        if p.saturating_mul(slots) < rest {
            break;
        }
        cur.push(p);
        fill(rest - p, slots - 1, p, cur, out);
        cur.pop();
    }
}

/// Partitions with `ℓ <= max_len`, `λ_1 <= max_part` and size at most
/// `max_size`, grouped by size.
pub fn enumerate_up_to(max_size: usize, max_len: usize, max_part: usize) -> impl Iterator<Item = Partition> {
    (0..=max_size).flat_map(move |n| enumerate_partitions(n, max_len, max_part))
}

/// Checks that `{μ_i + n + 1 - i}` and `{n + j - μ'_j}` split `{1..n+m}`
/// and that the accompanying factorial identity for `V_m(μ')` holds, for
/// `μ` with at most `n` rows and `μ_1 <= m`.
pub fn complement_identity_holds(mu: &Partition, n: usize, m: usize) -> bool {
    if mu.length() > n || mu.part(1) > m {
        return false;
    }
    let conj = mu.conjugate();
    let mut seen = vec![false; n + m + 1];
    let s = (1..=n).map(|i| mu.part(i) + n + 1 - i);
    let r = (1..=m).map(|j| n + j - conj.part(j));
    for v in s.chain(r) {
        if v == 0 || v > n + m || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    let lhs = BigRational::from_integer(BigInt::from(vandermonde_v(&conj, m).unwrap()));
    let mut rhs = BigRational::from_integer(BigInt::from(vandermonde_v(mu, n).unwrap())) * weight_w(mu, n).unwrap();
    for j in 1..n + m {
        rhs *= BigRational::from_integer(BigInt::from(factorial(j as u64)));
    }
    for j in 1..=n {
        rhs /= BigRational::from_integer(BigInt::from(factorial((m + j - 1 - mu.part(j)) as u64)));
    }
    lhs == rhs
}

/// `f^λ` as an `f64`, exact for small shapes.
pub fn dimension_f64(lambda: &Partition) -> f64 {
    frobenius_dimension(lambda).to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(&p(&[2, 1])), p(&[2, 1]));
        assert_eq!(conjugate(&p(&[])), p(&[]));
        assert_eq!(conjugate(&p(&[3, 1])), p(&[2, 1, 1]));
    }

    #[test]
    fn normalizes_trailing_zeros() {
        assert_eq!(p(&[2, 0, 0]), p(&[2]));
        assert_eq!(p(&[2, 0]).length(), 1);
        assert!(Partition::new(vec![1, 2]).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(frobenius_dimension(&p(&[1])), BigUint::from(1u32));
        assert_eq!(frobenius_dimension(&p(&[2, 1])), BigUint::from(2u32));
        assert_eq!(frobenius_dimension(&p(&[])), BigUint::from(1u32));
        assert_eq!(frobenius_dimension(&p(&[3, 2])), BigUint::from(5u32));
        assert!((ln_frobenius_dimension(&p(&[3, 2])) - 5f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn v_and_w() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(vandermonde_v(&p(&[2]), 2).unwrap(), BigUint::from(3u32));
        assert_eq!(weight_w(&p(&[2]), 2).unwrap(), r(1, 6));
        assert_eq!(vandermonde_v(&p(&[1, 1]), 2).unwrap(), BigUint::from(1u32));
        assert_eq!(weight_w(&p(&[1, 1]), 2).unwrap(), r(1, 2));
        assert!(vandermonde_v(&p(&[1, 1]), 1).is_err());
        assert!(weight_w(&p(&[1, 1]), 1).is_err());
        for m in 0..6 {
            let e = p(&[]);
            let vw = BigRational::from_integer(BigInt::from(vandermonde_v(&e, m).unwrap())) * weight_w(&e, m).unwrap();
            assert!(vw.is_one());
        }
    }

    #[test]
    fn enumeration() {
        let all: Vec<_> = enumerate_partitions(0, 5, 5).collect();
        assert_eq!(all, vec![p(&[])]);
        let all: Vec<_> = enumerate_partitions(3, usize::MAX, usize::MAX).collect();
        assert_eq!(all, vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]);
        let all: Vec<_> = enumerate_partitions(4, 2, usize::MAX).collect();
        assert_eq!(all, vec![p(&[4]), p(&[3, 1]), p(&[2, 2])]);
        assert_eq!(enumerate_partitions(10, 10, 10).count(), 42);
        assert_eq!(enumerate_partitions(6, 2, 3).count(), 1);
        assert_eq!(enumerate_partitions(6, 3, 3).count(), 3);
    }

    #[test]
    fn sum_of_squared_dimensions() {
        for n in 0..=10usize {
            let total: BigUint = enumerate_partitions(n, n, n)
                .map(|l| {
                    let f = frobenius_dimension(&l);
                    &f * &f
                })
                .sum();
            assert_eq!(total, factorial(n as u64), "n = {n}");
        }
    }

    #[test]
    fn particle_round_trip() {
        let l = p(&[3, 1]);
        let h = ParticleConfig::from_partition(&l, 4).unwrap();
        assert_eq!(h.positions(), &[6, 3, 1, 0]);
        assert_eq!(h.to_partition(), l);
        assert!(ParticleConfig::from_partition(&l, 1).is_err());
    }

    #[test]
    fn complement_identity_small() {
        for n in 0..=5 {
            for m in 0..=5 {
                for mu in enumerate_up_to(n * m, n, m) {
                    assert!(complement_identity_holds(&mu, n, m), "{mu} n={n} m={m}");
                }
            }
        }
    }
}
