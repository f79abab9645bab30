//! Exhaustive enumeration of Ω(A) for small matrices.
//!
//! This is the ground truth the alignment algorithms are checked against, so
//! it does nothing clever: every distinct member is generated and solved.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::matrix::{Matrix, SortDirection};
use crate::spectral::{perron, PerronOptions};

pub const DEFAULT_LIMIT_N: usize = 4;

const BATCH: usize = 4096;

/// Streams every distinct member of Ω(A) exactly once.
///
/// Each row walks its distinct multiset permutations in lexicographic order;
/// rows are combined odometer-style with the last row varying fastest.
pub struct OmegaIter {
    n: usize,
    current: Vec<f64>,
    done: bool,
}

impl Iterator for OmegaIter {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        if self.done {
            return None;
        }
        let out = Matrix::from_trusted(self.n, self.current.clone());
        self.done = true;
        for row in self.current.chunks_exact_mut(self.n).rev() {
            if next_permutation(row) {
                self.done = false;
                break;
            }
            // wrapped back to ascending order; carry into the row above
        }
        Some(out)
    }
}

/// Advances to the next lexicographic arrangement, or resets to ascending
/// order and returns `false` after the last one.
fn next_permutation(v: &mut [f64]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn worst_case(n: usize) -> String {
    let f: u128 = (1..=n as u128).product();
    match (0..n).try_fold(1u128, |acc, _| acc.checked_mul(f)) {
        Some(v) => v.to_string(),
        None => format!("more than {}", u128::MAX),
    }
}

pub fn enumerate_omega(a: &Matrix, limit_n: usize) -> Result<OmegaIter, OracleError> {
    let n = a.n();
    if n > limit_n {
        return Err(OracleError::DimensionTooLarge {
            n,
            limit: limit_n,
            worst: worst_case(n),
        });
    }
    Ok(OmegaIter {
        n,
        current: a.sort_rows(SortDirection::Ascending).as_slice().to_vec(),
        done: false,
    })
}

/// `|Ω(A)|`: product over rows of `n! / prod(multiplicity!)`.
pub fn omega_size(a: &Matrix) -> u128 {
    let sorted = a.sort_rows(SortDirection::Ascending);
    sorted
        .rows()
        .map(|row| {
            let mut count: u128 = 1;
            let mut run = 0u128;
            for (k, v) in row.iter().enumerate() {
                run = if k > 0 && row[k - 1] == *v {
                    run + 1
                } else {
                    1
                };
                // multiply by (k+1) and divide by the run length keeps the
                // partial multinomial integral
                count = count * (k as u128 + 1) / run;
            }
            count
        })
        .fold(1u128, |acc, c| acc.saturating_mul(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub perron: PerronOptions,
    pub limit_n: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            perron: PerronOptions::default(),
            limit_n: DEFAULT_LIMIT_N,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub min_rho: f64,
    pub argmin: Matrix,
    pub max_rho: f64,
    pub argmax: Matrix,
    pub count: u64,
    pub mean_row_sum: f64,
}

#[derive(Clone)]
struct Extremes {
    min: (f64, Matrix),
    max: (f64, Matrix),
    count: u64,
}

// Equal roots resolve to the lexicographically smallest witness so the
// result does not depend on how work was split across threads.
fn better_min(a: &(f64, Matrix), b: &(f64, Matrix)) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1.lex_cmp(&b.1).is_lt(),
    }
}

fn better_max(a: &(f64, Matrix), b: &(f64, Matrix)) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.1.lex_cmp(&b.1).is_lt(),
    }
}

impl Extremes {
    fn single(rho: f64, m: Matrix) -> Self {
        Extremes {
            min: (rho, m.clone()),
            max: (rho, m),
            count: 1,
        }
    }

    fn merge(self, other: Extremes) -> Extremes {
        Extremes {
            min: if better_min(&other.min, &self.min) {
                other.min
            } else {
                self.min
            },
            max: if better_max(&other.max, &self.max) {
                other.max
            } else {
                self.max
            },
            count: self.count + other.count,
        }
    }
}

/// Minimum and maximum Perron root over all of Ω(A), with witnesses.
pub fn oracle_extremes(a: &Matrix, opts: &OracleOptions) -> Result<OracleReport, OracleError> {
    let mut iter = enumerate_omega(a, opts.limit_n)?;
    let mut acc: Option<Extremes> = None;
    loop {
        let batch: Vec<Matrix> = iter.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            break;
        }
        let part = batch
            .into_par_iter()
            .map(|b| perron(&b, &opts.perron).map(|p| Extremes::single(p.rho, b)))
            .try_reduce_with(|x, y| Ok(x.merge(y)))
            .expect("batch is nonempty")?;
        acc = Some(match acc {
            Some(prev) => prev.merge(part),
            None => part,
        });
    }
    let ext = acc.expect("Ω(A) always contains A");
    Ok(OracleReport {
        min_rho: ext.min.0,
        argmin: ext.min.1,
        max_rho: ext.max.0,
        argmax: ext.max.1,
        count: ext.count,
        mean_row_sum: a.mean_row_sum(),
    })
}
