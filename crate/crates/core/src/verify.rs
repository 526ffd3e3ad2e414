//! Named oracle suites: exhaustive enumerations checked against closed forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::ensembles::{plancherel_exact, word_measure_exact};
use crate::error::{domain, Result};
use crate::kernels::{bessel_diagonal, bessel_series, Kernel};
use crate::models::{
    aztec_zigzag_counts, aztec_zigzag_pmf, aztec_zigzag_pmf_product, enumerate_aztec_tilings, hexagon_slice_counts, hexagon_slice_pmf, percolation_gap_exact, percolation_law_bruteforce,
    AztecZigzag, PathColor,
};
use crate::numeric::factorial;
use crate::partitions::Partition;
use crate::sampler::{exhaustive_permutation_shapes, exhaustive_word_shapes};
use crate::specfun::bessel_j_range;

pub const SUITES: [&str; 6] = ["plancherel-s7", "words-exact", "percolation-exact", "aztec-exact", "hexagon-exact", "kernel-identities"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Mismatch description when failed, summary otherwise.
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

pub fn run_suite(name: &str) -> Result<Vec<Check>> {
    match name {
        "plancherel-s7" => Ok(plancherel_suite(7)),
        "words-exact" => words_suite(),
        "percolation-exact" => percolation_suite(),
        "aztec-exact" => aztec_suite(4),
        "hexagon-exact" => hexagon_suite(3),
        "kernel-identities" => kernel_suite(),
        _ => domain(format!("unknown suite `{name}`; known: {}", SUITES.join(", "))),
    }
}

fn ratio(n: u64, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(BigInt::from(n), d.into())
}

pub fn plancherel_suite(max_n: usize) -> Vec<Check> {
    (1..=max_n)
        .map(|n| {
            let d = match exhaustive_permutation_shapes(n) {
                Ok(d) => d,
                Err(e) => return Check::new(format!("S_{n} shapes"), false, e.to_string()),
            };
            let nf = BigInt::from(factorial(n as u64));
            let bad: Vec<String> = d
                .counts
                .iter()
                .filter(|(l, &c)| ratio(c, nf.clone()) != plancherel_exact(l))
                .map(|(l, c)| format!("{l}: {c}/{n}! vs {}", plancherel_exact(l)))
                .collect();
            Check::new(format!("S_{n} shape law"), bad.is_empty(), if bad.is_empty() { format!("{} shapes", d.counts.len()) } else { bad.join("; ") })
        })
        .collect()
}

pub fn words_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (m, n) in [(2, 2), (3, 3), (4, 3), (3, 4)] {
        let d = exhaustive_word_shapes(m, n)?;
        let total = BigInt::from(d.total);
        let bad: Vec<String> = d
            .counts
            .iter()
            .filter(|(l, &c)| ratio(c, total.clone()) != word_measure_exact(m, n, l))
            .map(|(l, c)| format!("{l}: {c}/{} vs {}", d.total, word_measure_exact(m, n, l)))
            .collect();
        let mass: BigRational = crate::partitions::enumerate_partitions(n, m, n).map(|l| word_measure_exact(m, n, &l)).sum();
        let ok = bad.is_empty() && mass.is_one();
        out.push(Check::new(format!("words M={m} N={n}"), ok, if ok { format!("{} shapes", d.counts.len()) } else { bad.join("; ") }));
    }
    let two = word_measure_exact(2, 2, &Partition::new(vec![2])?);
    let one_one = word_measure_exact(2, 2, &Partition::new(vec![1, 1])?);
    let ok = two == ratio(3, 4) && one_one == ratio(1, 4);
    out.push(Check::new("M=N=2 worked values", ok, format!("P[(2)]={two}, P[(1,1)]={one_one}")));
    Ok(out)
}

pub fn percolation_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (pn, pd) in [(1u64, 4u64), (1, 2), (3, 4)] {
        let p = ratio(pn, pd);
        let mut failures = Vec::new();
        let mut cases = 0;
        for m in 1..=12usize {
            for n in 1..=12 / m {
                cases += 1;
                let law = percolation_law_bruteforce(m, n, &p)?;
                let mut cum = BigRational::zero();
                for (l, pr) in law.iter().enumerate() {
                    cum += pr;
                    let kr = percolation_gap_exact(m, n, l, &p)?;
                    if kr != cum {
                        failures.push(format!("M={m} N={n} n={l}: brute {cum} vs Krawtchouk {kr}"));
                    }
                }
            }
        }
        out.push(Check::new(format!("L(W) law, p={pn}/{pd}"), failures.is_empty(), if failures.is_empty() { format!("{cases} shapes") } else { failures.join("; ") }));
    }
    Ok(out)
}

pub fn aztec_suite(max_n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let tilings = enumerate_aztec_tilings(n)?;
        let expected = 1u64 << (n * (n + 1) / 2);
        out.push(Check::new(format!("A_{n} tiling count"), tilings.len() as u64 == expected, format!("{} tilings, expected {expected}", tilings.len())));
        let total = BigInt::from(tilings.len());
        for color in [PathColor::White, PathColor::Black] {
            let mut failures = Vec::new();
            for r in 1..=n {
                let counts = aztec_zigzag_counts(&tilings, r, color);
                let mut mass = BigRational::zero();
                for (turns, c) in counts {
                    let z = match AztecZigzag::new(n, r, color, turns.clone()) {
                        Ok(z) => z,
                        Err(e) => {
                            failures.push(format!("r={r}: {e}"));
                            continue;
                        }
                    };
                    let emp = ratio(c, total.clone());
                    let kr = aztec_zigzag_pmf(&z);
                    if kr != emp || aztec_zigzag_pmf_product(&z) != emp {
                        failures.push(format!("r={r} turns {turns:?}: tilings {emp}, Krawtchouk {kr}"));
                    }
                    mass += kr;
                }
                if !mass.is_one() {
                    failures.push(format!("r={r}: observed paths carry mass {mass}"));
                }
            }
            out.push(Check::new(format!("A_{n} {color:?} zig-zag law"), failures.is_empty(), failures.join("; ")));
        }
    }
    Ok(out)
}

pub fn hexagon_suite(max_a: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for a in 1..=max_a {
        for k in 0..=a {
            let counts = hexagon_slice_counts(a, k)?;
            let total: u64 = counts.values().sum();
            let mut failures = Vec::new();
            let mut mass = BigRational::zero();
            for (h, &c) in &counts {
                let p = hexagon_slice_pmf(a, k, h)?;
                if p != ratio(c, total) {
                    failures.push(format!("{h:?}: {c}/{total} vs {p}"));
                }
                mass += p;
            }
            if mass != BigRational::one() {
                failures.push(format!("mass {mass}"));
            }
            out.push(Check::new(format!("hexagon a={a} k={k}"), failures.is_empty(), if failures.is_empty() { format!("{total} plane partitions") } else { failures.join("; ") }));
        }
    }
    Ok(out)
}

/// `Σ_{x >= -L} B(x, x)`, summed until the diagonal is negligible.
pub fn bessel_trace(alpha: f64, l: i64) -> Result<f64> {
    let mut s = 0.0;
    let mut x = -l;
    loop {
        let d = bessel_diagonal(alpha, x)?;
        s += d;
        if x > 2 * alpha.sqrt().ceil() as i64 + 2 && d < 1e-18 {
            return Ok(s);
        }
        x += 1;
    }
}

pub fn kernel_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let pts: Vec<f64> = (-10..=10).map(f64::from).collect();
    for alpha in [0.25, 1.0, 4.0, 25.0] {
        let mat = Kernel::Bessel { alpha }.matrix(&pts)?;
        let mut worst: f64 = 0.0;
        for (i, &x) in pts.iter().enumerate() {
            for (j, &y) in pts.iter().enumerate() {
                let (s, _) = bessel_series(alpha, x as i64, y as i64)?;
                worst = worst.max((s - mat[i * pts.len() + j]).abs());
            }
        }
        out.push(Check::new(format!("series vs closed form, alpha={alpha}"), worst < 1e-10, format!("max diff {worst:.3e}")));
        let j = bessel_j_range(-31, 31, alpha)?;
        let t = 2.0 * alpha.sqrt();
        let mut rec: f64 = 0.0;
        for x in -30i64..=30 {
            let k = (x + 31) as usize;
            rec = rec.max((j[k + 1] - (2.0 * x as f64 / t * j[k] - j[k - 1])).abs());
        }
        out.push(Check::new(format!("Bessel recurrence, alpha={alpha}"), rec < 1e-10, format!("max residual {rec:.3e}")));
    }
    // Σ n J_n^2 <= (Σ n^2 J_n^2)^{1/2} (Σ J_n^2)^{1/2} <= √α · √(1/2)
    for alpha in [0.25, 1.0, 4.0, 25.0] {
        for l in [0i64, 2, 5] {
            let tr = bessel_trace(alpha, l)?;
            let bound = (alpha / 2.0).sqrt() + l as f64;
            out.push(Check::new(format!("trace bound, alpha={alpha} L={l}"), tr <= bound, format!("{tr:.6} <= {bound:.6}")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        for s in ["words-exact", "hexagon-exact"] {
            for c in run_suite(s).unwrap() {
                assert!(c.passed, "{s}: {} {}", c.name, c.detail);
            }
        }
        for c in plancherel_suite(5).into_iter().chain(aztec_suite(3).unwrap()) {
            assert!(c.passed, "{} {}", c.name, c.detail);
        }
        assert!(run_suite("nope").is_err());
    }

    #[test]
    fn trace_identity() {
        // Σ_{x >= 0} B(x, x) = Σ_{n >= 1} n J_n^2
        let alpha = 2.0;
        let j = bessel_j_range(0, 60, alpha).unwrap();
        let direct: f64 = (1..=60).map(|n| n as f64 * j[n] * j[n]).sum();
        assert!((bessel_trace(alpha, 0).unwrap() - direct).abs() < 1e-12);
    }
}
