//! Perron root and Perron vector of a nonnegative matrix.
//!
//! Irreducible inputs run power iteration on `A + I`, which is primitive and
//! therefore converges even when `A` itself is periodic. Reducible inputs get
//! the same iteration under a limited budget; when the Perron root carries a
//! nontrivial Jordan block that iteration stalls, and the matrix is instead
//! split into strongly connected classes. The Perron root is then the largest
//! class root and a nonnegative eigenvector is assembled from a distinguished
//! class by back substitution through the classes that reach it.

use serde::{Deserialize, Serialize};

use crate::error::SpectralError;
use crate::matrix::Matrix;

use super::structure::{is_irreducible, pattern_graph, strongly_connected_components};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Power iterations tried on a reducible matrix before falling back to the
/// class decomposition.
const REDUCIBLE_POWER_BUDGET: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerronOptions {
    /// Relative residual target: `|Ax - rho x|_inf <= tol * max(rho, 1)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl PerronOptions {
    pub fn allowed_residual(&self, rho: f64) -> f64 {
        self.tol * rho.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerronFlags {
    /// All entries were zero; `rho = 0` and `x` is flat.
    pub zero_matrix: bool,
    /// The pattern is not strongly connected, so positivity of `x` is not
    /// guaranteed.
    pub reducible: bool,
    /// More than one class attains the Perron root; the eigenvector returned
    /// is one of several nonnegative choices.
    pub degenerate: bool,
}

/// Certified Perron pair, `x >= 0` with `sum(x) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronPair {
    pub rho: f64,
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub flags: PerronFlags,
}

/// `max_i |(Ax)_i - rho x_i|`.
pub fn eigen_residual(a: &Matrix, x: &[f64], rho: f64) -> f64 {
    a.mul_vec(x)
        .iter()
        .zip(x)
        .map(|(ax, xi)| (ax - rho * xi).abs())
        .fold(0.0, f64::max)
}

pub fn perron(a: &Matrix, opts: &PerronOptions) -> Result<PerronPair, SpectralError> {
    let n = a.n();
    if a.is_zero() {
        return Ok(PerronPair {
            rho: 0.0,
            x: vec![1.0 / n as f64; n],
            residual: 0.0,
            iterations: 0,
            flags: PerronFlags {
                zero_matrix: true,
                ..Default::default()
            },
        });
    }
    if n == 1 {
        return Ok(PerronPair {
            rho: a.get(0, 0),
            x: vec![1.0],
            residual: 0.0,
            iterations: 0,
            flags: PerronFlags::default(),
        });
    }
    if is_irreducible(a) {
        let (rho, x, residual, iterations) =
            shifted_power_iteration(n, a.as_slice(), opts, Stop::Componentwise)?;
        return Ok(PerronPair {
            rho,
            x,
            residual,
            iterations,
            flags: PerronFlags::default(),
        });
    }
    reducible_perron(a, opts)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stop {
    /// `|r_i| <= eps * x_i` for every `i`: the Collatz-Wielandt bracket has
    /// relative width at most `2 * tol`. Needs `x > 0`.
    Componentwise,
    /// `max_i |r_i| <= eps`.
    MaxNorm,
}

/// Power iteration on `B + I` for a row-major block `B`, where
/// `r = Bx - rho x` and `eps = tol * max(rho, 1)`.
///
/// Returns `(rho, x, max_i |r_i|, iterations)` with `x` L1-normalized.
fn shifted_power_iteration(
    n: usize,
    b: &[f64],
    opts: &PerronOptions,
    stop: Stop,
) -> Result<(f64, Vec<f64>, f64, usize), SpectralError> {
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 0..=opts.max_iter {
        for (yi, row) in y.iter_mut().zip(b.chunks_exact(n)) {
            *yi = row.iter().zip(&x).map(|(a, b)| a * b).sum();
        }
        // sum(Bx) = rho * sum(x) = rho at a fixed point
        let rho: f64 = y.iter().sum();
        let eps = opts.allowed_residual(rho);
        residual = 0.0;
        let mut converged = true;
        for (yi, xi) in y.iter().zip(&x) {
            let r = (yi - rho * xi).abs();
            residual = f64::max(residual, r);
            converged &= match stop {
                Stop::Componentwise => r <= eps * xi,
                Stop::MaxNorm => r <= eps,
            };
        }
        if converged {
            return Ok((rho, x, residual, iter));
        }
        if iter == opts.max_iter {
            break;
        }
        let scale = 1.0 / (rho + 1.0);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = (*xi + yi) * scale;
        }
    }
    Err(SpectralError::NoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

fn reducible_perron(a: &Matrix, opts: &PerronOptions) -> Result<PerronPair, SpectralError> {
    let n = a.n();
    let graph = pattern_graph(a);
    // reverse topological: classes reached from class c precede c
    let classes = strongly_connected_components(&graph);
    let mut class_of = vec![0; n];
    for (c, members) in classes.iter().enumerate() {
        for &v in members {
            class_of[v] = c;
        }
    }

    let mut iterations = 0;
    let mut class_rho = Vec::with_capacity(classes.len());
    let mut class_vec = Vec::with_capacity(classes.len());
    for members in &classes {
        let block = submatrix(a, members);
        let k = members.len();
        if k == 1 {
            class_rho.push(block[0]);
            class_vec.push(vec![1.0]);
        } else {
            let (rho, x, _, it) = shifted_power_iteration(k, &block, opts, Stop::Componentwise)?;
            iterations += it;
            class_rho.push(rho);
            class_vec.push(x);
        }
    }
    let rho = class_rho.iter().copied().fold(0.0, f64::max);
    let near = |r: f64| r >= rho - opts.allowed_residual(rho);

    // reach[c][d]: class c has a path into class d
    let m = classes.len();
    let mut reach = vec![vec![false; m]; m];
    for c in 0..m {
        reach[c][c] = true;
        for &v in &classes[c] {
            for &w in &graph[v] {
                let d = class_of[w];
                if d != c && !reach[c][d] {
                    // d precedes c, so its row is complete
                    let row_d = reach[d].clone();
                    for (r, &t) in reach[c].iter_mut().zip(&row_d) {
                        *r |= t;
                    }
                }
            }
        }
    }

    let maximal: Vec<usize> = (0..m).filter(|&c| near(class_rho[c])).collect();
    let flags = PerronFlags {
        zero_matrix: false,
        reducible: true,
        degenerate: maximal.len() > 1,
    };

    let budget = PerronOptions {
        max_iter: opts.max_iter.min(REDUCIBLE_POWER_BUDGET),
        ..*opts
    };
    if let Ok((rho, x, residual, it)) =
        shifted_power_iteration(n, a.as_slice(), &budget, Stop::MaxNorm)
    {
        return Ok(PerronPair {
            rho,
            x,
            residual,
            iterations: iterations + it,
            flags,
        });
    }
    iterations += budget.max_iter;

    // a maximal class that no other maximal class can reach
    let chosen = *maximal
        .iter()
        .find(|&&c| !maximal.iter().any(|&d| d != c && reach[d][c]))
        .expect("class reachability is acyclic");

    let mut x = vec![0.0; n];
    for (&v, &xv) in classes[chosen].iter().zip(&class_vec[chosen]) {
        x[v] = xv;
    }
    // classes after `chosen` in the list are the only ones that can reach it
    for c in chosen + 1..m {
        if !reach[c][chosen] {
            continue;
        }
        let members = &classes[c];
        let k = members.len();
        let rhs: Vec<f64> = members
            .iter()
            .map(|&v| {
                graph[v]
                    .iter()
                    .filter(|&&w| class_of[w] != c)
                    .map(|&w| a.get(v, w) * x[w])
                    .sum()
            })
            .collect();
        // (rho I - A_cc) x_c = rhs
        let mut sys = submatrix(a, members);
        for v in sys.iter_mut() {
            *v = -*v;
        }
        for i in 0..k {
            sys[i * k + i] += rho;
        }
        let sol = solve_dense(k, sys, rhs);
        for (&v, s) in members.iter().zip(sol) {
            x[v] = s.max(0.0);
        }
    }

    let total: f64 = x.iter().sum();
    for v in x.iter_mut() {
        *v /= total;
    }
    let residual = eigen_residual(a, &x, rho);
    let allowed = opts.allowed_residual(rho);
    if residual > allowed {
        return Err(SpectralError::NoConvergence {
            iterations,
            residual,
        });
    }
    Ok(PerronPair {
        rho,
        x,
        residual,
        iterations,
        flags,
    })
}

fn submatrix(a: &Matrix, members: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(members.len() * members.len());
    for &i in members {
        for &j in members {
            out.push(a.get(i, j));
        }
    }
    out
}

/// Gaussian elimination with partial pivoting. The systems solved here are
/// nonsingular M-matrices.
fn solve_dense(k: usize, mut m: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&r, &s| m[r * k + col].abs().total_cmp(&m[s * k + col].abs()))
            .unwrap();
        if pivot != col {
            for j in 0..k {
                m.swap(col * k + j, pivot * k + j);
            }
            b.swap(col, pivot);
        }
        let d = m[col * k + col];
        for r in col + 1..k {
            let f = m[r * k + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..k {
                m[r * k + j] -= f * m[col * k + j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|j| m[r * k + j] * x[j]).sum();
        x[r] = (b[r] - s) / m[r * k + r];
    }
    x
}
