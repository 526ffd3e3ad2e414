//! Shared floating-point helpers: a growable log-factorial table and a few
//! log-space utilities.

use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::One;

static LOG_FACTORIALS: RwLock<Vec<f64>> = RwLock::new(Vec::new());

/// `ln(n!)`, read from an append-only table that grows on demand.
///
/// Entries are accumulated with compensated summation so that the absolute
/// error stays near machine precision even for `n` in the millions.
pub fn ln_factorial(n: u64) -> f64 {
    let n = n as usize;
    {
        let table = LOG_FACTORIALS.read().expect("log-factorial table poisoned");
        if let Some(v) = table.get(n) {
            return *v;
        }
    }
    let mut table = LOG_FACTORIALS.write().expect("log-factorial table poisoned");
    if table.is_empty() {
        table.push(0.0);
    }
    let target = (n + 1).max(table.len() * 2).max(256);
    // Recover the running compensated sum from the last entry.
    let mut sum = *table.last().unwrap();
    let mut comp = 0.0;
    for k in table.len()..target {
        let y = (k as f64).ln() - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        table.push(sum);
    }
    table[n]
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Numerically stable `ln(sum(exp(xs)))`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Poisson probability `e^{-a} a^n / n!`.
pub fn poisson_pmf(a: f64, n: u64) -> f64 {
    if a == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-a + n as f64 * a.ln() - ln_factorial(n)).exp()
}

/// Upper tail `P[N > n]` of a Poisson(a) variable, summed directly.
pub fn poisson_tail(a: f64, n: u64) -> f64 {
    let mut tail = 0.0;
    let mut k = n + 1;
    loop {
        let p = poisson_pmf(a, k);
        tail += p;
        if (k as f64) > a && p < 1e-20 * tail.max(1e-300) {
            break;
        }
        if p == 0.0 && (k as f64) > a {
            break;
        }
        k += 1;
    }
    tail
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_log_factorials() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
        assert!((ln_factorial(20) - 2432902008176640000f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn stirling_agrees_at_large_n() {
        let n = 100_000u64;
        let x = n as f64;
        let stirling = x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3));
        assert!((ln_factorial(n) - stirling).abs() < 1e-8);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 4), BigUint::from(0u32));
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn poisson_tail_sums_to_one() {
        let a = 2.5;
        let head: f64 = (0..=6).map(|k| poisson_pmf(a, k)).sum();
        assert!((head + poisson_tail(a, 6) - 1.0).abs() < 1e-14);
    }
}
