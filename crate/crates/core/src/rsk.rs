//! Shapes under the Robinson-Schensted-Knuth correspondence, longest
//! increasing statistics and lattice path maxima.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::models::PercolationSpec;
use crate::partitions::Partition;

/// A word of length `N` over the alphabet `{1..M}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<usize>,
    alphabet: usize,
}

impl Word {
    pub fn new(letters: Vec<usize>, alphabet: usize) -> Result<Self> {
        if let Some(bad) = letters.iter().find(|&&x| x == 0 || x > alphabet) {
            return domain(format!("letter {bad} outside 1..={alphabet}"));
        }
        Ok(Self { letters, alphabet })
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Dense row-major matrix of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return domain("matrix dimensions must be positive");
        }
        if entries.len() != rows * cols {
            return domain(format!("expected {} entries, got {}", rows * cols, entries.len()));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().sum()
    }
}

/// Row insertion keeping only as much of the tableau as the shape needs.
/// An incoming value bumps the leftmost entry strictly greater than it.
#[derive(Debug, Default, Clone)]
struct Tableau {
    rows: Vec<Vec<usize>>,
}

impl Tableau {
    fn insert(&mut self, mut x: usize) {
        for row in self.rows.iter_mut() {
            let pos = row.partition_point(|&y| y <= x);
            if pos == row.len() {
                row.push(x);
                return;
            }
            std::mem::swap(&mut row[pos], &mut x);
        }
        self.rows.push(vec![x]);
    }

    fn shape(&self) -> Partition {
        Partition::new(self.rows.iter().map(Vec::len).collect()).expect("tableau rows shrink")
    }
}

fn shape_of(seq: impl IntoIterator<Item = usize>) -> Partition {
    let mut t = Tableau::default();
    for x in seq {
        t.insert(x);
    }
    t.shape()
}

/// Shape of the tableau pair of a permutation of `{1..N}` in one-line
/// notation.
pub fn rsk_shape_permutation(pi: &[usize]) -> Result<Partition> {
    check_permutation(pi)?;
    Ok(shape_of(pi.iter().copied()))
}

pub(crate) fn check_permutation(pi: &[usize]) -> Result<()> {
    let n = pi.len();
    let mut seen = vec![false; n + 1];
    for &x in pi {
        if x == 0 || x > n || seen[x] {
            return domain(format!("{pi:?} is not a permutation of 1..={n}"));
        }
        seen[x] = true;
    }
    Ok(())
}

pub fn rsk_shape_word(w: &Word) -> Partition {
    shape_of(w.letters.iter().copied())
}

/// Shape under the Knuth correspondence of the biword of `a`, read in
/// lexicographic order.
pub fn rsk_shape_intmatrix(a: &IntMatrix) -> Partition {
    let seq = (0..a.rows).flat_map(|i| (0..a.cols).flat_map(move |j| std::iter::repeat(j + 1).take(a.get(i, j) as usize)));
    shape_of(seq)
}

/// Longest weakly increasing subsequence by patience sorting.
pub fn longest_weakly_increasing(w: &[usize]) -> usize {
    let mut piles: Vec<usize> = Vec::new();
    for &x in w {
        let pos = piles.partition_point(|&y| y <= x);
        if pos == piles.len() {
            piles.push(x);
        } else {
            piles[pos] = x;
        }
    }
    piles.len()
}

/// Longest strictly increasing subsequence by patience sorting.
pub fn longest_increasing(w: &[usize]) -> usize {
    let mut piles: Vec<usize> = Vec::new();
    for &x in w {
        let pos = piles.partition_point(|&y| y < x);
        if pos == piles.len() {
            piles.push(x);
        } else {
            piles[pos] = x;
        }
    }
    piles.len()
}

/// Maximum entry sum over up/right lattice paths from the first to the last
/// cell.
pub fn up_right_path_max(a: &IntMatrix) -> u64 {
    let mut best = vec![0u64; a.cols];
    for i in 0..a.rows {
        for j in 0..a.cols {
            let from = if j > 0 { best[j].max(best[j - 1]) } else { best[j] };
            best[j] = from + a.get(i, j);
        }
    }
    best[a.cols - 1]
}

/// Maximum of `Σ_i w(i, j_i)` over column choices `j_1 <= ... <= j_M`, one
/// cell per row.
pub fn bernoulli_path_max(w: &IntMatrix) -> u64 {
    let mut best = vec![0u64; w.cols];
    for i in 0..w.rows {
        let mut running = 0u64;
        for j in 0..w.cols {
            running = running.max(best[j]);
            best[j] = running + w.get(i, j);
        }
    }
    best.into_iter().max().unwrap_or(0)
}

/// First-passage time `l τ0 + k κ - (κ - λ) L(W)`.
pub fn passage_time(spec: &PercolationSpec, lw: u64) -> Result<f64> {
    spec.validate()?;
    Ok(spec.l as f64 * spec.tau0 + spec.k as f64 * spec.kappa - (spec.kappa - spec.lambda) * lw as f64)
}
