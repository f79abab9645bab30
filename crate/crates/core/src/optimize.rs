//! Eigenvector/row alignment search for the extreme Perron roots over Ω(A).
//!
//! Start from `C0`, the copy of `A` with every row sorted ascending, put its
//! rows in a heuristic initial order `Q`, and repeat: take the Perron vector
//! `x` of `C = Q C0`; if `x` is not in the target order (ascending to
//! maximize, descending to minimize), reorder the rows of `C` by the
//! permutation `P` that sorts `x` and accumulate `Q := P Q`. Once `x` is in
//! order, every row of `C` is aligned with `x` (maximize) or against it
//! (minimize), `C` is optimal, and the member `C0 Q` of Ω(A) has the same
//! Perron root.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{OptimizeError, SpectralError};
use crate::matrix::{Matrix, SortDirection};
use crate::permutation::Permutation;
use crate::spectral::{eigen_residual, is_fully_indecomposable, perron, PerronOptions, PerronPair};

pub const DEFAULT_MAX_LOOPS: usize = 64;

/// Relative tolerance under which eigenvector components count as tied.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Max,
    Min,
}

impl Objective {
    /// Target order of the eigenvector and of the initial row order.
    pub fn sort_direction(self) -> SortDirection {
        match self {
            Objective::Max => SortDirection::Ascending,
            Objective::Min => SortDirection::Descending,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Max => "max",
            Objective::Min => "min",
        })
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(Objective::Max),
            "min" => Ok(Objective::Min),
            other => Err(format!("unknown objective {other:?} (expected max or min)")),
        }
    }
}

/// How the rows of `C0` are ordered before the first eigensolve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialOrder {
    /// Sort rows by Euclidean norm.
    #[default]
    RowNorms,
    /// Sort rows by row sum.
    RowSums,
    /// Keep the rows of `C0` where they are.
    Identity,
}

impl FromStr for InitialOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "row-norms" => Ok(InitialOrder::RowNorms),
            "row-sums" => Ok(InitialOrder::RowSums),
            "identity" => Ok(InitialOrder::Identity),
            other => Err(format!(
                "unknown initial order {other:?} (expected row-norms, row-sums or identity)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub perron: PerronOptions,
    pub max_loops: usize,
    pub initial_order: InitialOrder,
    /// Skip the positivity / full indecomposability gate.
    pub unsafe_accept: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            perron: PerronOptions::default(),
            max_loops: DEFAULT_MAX_LOOPS,
            initial_order: InitialOrder::default(),
            unsafe_accept: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rho: f64,
    pub eigenvector: Vec<f64>,
    pub applied_permutation: Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeTrace {
    pub steps: Vec<TraceStep>,
    pub loop_count: usize,
    pub initial_permutation: Permutation,
}

impl OptimizeTrace {
    /// The step records as a JSON array.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.steps).expect("trace serialization is infallible")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub objective: Objective,
    /// `C0 Q`, a member of Ω(A).
    pub witness: Matrix,
    pub rho: f64,
    /// Final row-reordered iterate `Q C0`; shares its Perron root with the witness.
    pub aligned: Matrix,
    /// Perron vector of `aligned`.
    pub eigenvector: Vec<f64>,
    pub trace: OptimizeTrace,
    /// Alignment certificate verified on the final iterate.
    pub certificate: bool,
}

/// Permutation `P` such that `P x` is sorted in `direction`.
///
/// Components within `TIE_TOL * max(x)` of each other are treated as equal,
/// and the identity is returned whenever `x` is already sorted under that
/// rule. Otherwise `x` is sorted stably by exact value.
pub fn align_to_vector(x: &[f64], direction: SortDirection) -> Permutation {
    let n = x.len();
    let tie = TIE_TOL * x.iter().copied().fold(0.0, f64::max);
    let sorted = match direction {
        SortDirection::Ascending => {
            let mut hi = f64::NEG_INFINITY;
            x.iter().all(|&v| {
                hi = hi.max(v);
                v >= hi - tie
            })
        }
        SortDirection::Descending => {
            let mut lo = f64::INFINITY;
            x.iter().all(|&v| {
                lo = lo.min(v);
                v <= lo + tie
            })
        }
    };
    if sorted {
        return Permutation::identity(n);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    match direction {
        SortDirection::Ascending => idx.sort_by(|&a, &b| x[a].total_cmp(&x[b])),
        SortDirection::Descending => idx.sort_by(|&a, &b| x[b].total_cmp(&x[a])),
    }
    Permutation::from_map(idx).expect("sorted indices form a permutation")
}

fn initial_permutation(c0: &Matrix, order: InitialOrder, direction: SortDirection) -> Permutation {
    let keys = match order {
        InitialOrder::Identity => return Permutation::identity(c0.n()),
        InitialOrder::RowNorms => c0.row_norms(),
        InitialOrder::RowSums => c0.row_sums(),
    };
    let mut idx: Vec<usize> = (0..c0.n()).collect();
    match direction {
        SortDirection::Ascending => idx.sort_by(|&a, &b| keys[a].total_cmp(&keys[b])),
        SortDirection::Descending => idx.sort_by(|&a, &b| keys[b].total_cmp(&keys[a])),
    }
    Permutation::from_map(idx).expect("sorted indices form a permutation")
}

pub fn maximize_rho(a: &Matrix, opts: &OptimizeOptions) -> Result<OptimizeResult, OptimizeError> {
    optimize(a, Objective::Max, opts)
}

pub fn minimize_rho(a: &Matrix, opts: &OptimizeOptions) -> Result<OptimizeResult, OptimizeError> {
    optimize(a, Objective::Min, opts)
}

pub fn optimize(
    a: &Matrix,
    objective: Objective,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult, OptimizeError> {
    if !opts.unsafe_accept && !a.is_positive() && !is_fully_indecomposable(a) {
        return Err(OptimizeError::PreconditionFailed);
    }
    let direction = objective.sort_direction();
    // rows ascending for both objectives: the eigenvector order alone decides
    // between alignment and anti-alignment
    let c0 = a.sort_rows(SortDirection::Ascending);
    let q0 = initial_permutation(&c0, opts.initial_order, direction);
    let mut q = q0.clone();
    let mut c = c0.permute_rows(&q).expect("dimensions agree");
    let mut steps = Vec::new();

    loop {
        let pair = perron(&c, &opts.perron)?;
        let p = align_to_vector(&pair.x, direction);
        steps.push(TraceStep {
            rho: pair.rho,
            eigenvector: pair.x.clone(),
            applied_permutation: p.clone(),
        });
        let done = p.is_identity();
        if done || steps.len() >= opts.max_loops {
            let trace = OptimizeTrace {
                loop_count: steps.len(),
                steps,
                initial_permutation: q0,
            };
            let result = finish(objective, &c0, &q, c, pair, trace, opts)?;
            if done {
                return Ok(result);
            }
            return Err(OptimizeError::LoopLimitExceeded {
                max_loops: opts.max_loops,
                best: Box::new(result),
            });
        }
        c = c.permute_rows(&p).expect("dimensions agree");
        q = p.compose(&q);
    }
}

fn finish(
    objective: Objective,
    c0: &Matrix,
    q: &Permutation,
    c: Matrix,
    pair: PerronPair,
    trace: OptimizeTrace,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult, OptimizeError> {
    let certificate = match objective {
        Objective::Max => is_max_optimal(&c, &pair.x, opts.perron.tol)?,
        Objective::Min => is_min_optimal(&c, &pair.x, opts.perron.tol)?,
    };
    Ok(OptimizeResult {
        objective,
        witness: c0.permute_cols(q).expect("dimensions agree"),
        rho: pair.rho,
        aligned: c,
        eigenvector: pair.x,
        trace,
        certificate,
    })
}

/// `x_k < x_j` (beyond the tie tolerance) implies `c_ik <= c_ij` in every row.
///
/// For irreducible `C` with a positive Perron vector `x`, this holds exactly
/// when `rho(C)` is the maximum over Ω(C).
pub fn is_max_optimal(c: &Matrix, x: &[f64], tol: f64) -> Result<bool, SpectralError> {
    alignment_holds(c, x, tol, Objective::Max)
}

/// `x_k < x_j` (beyond the tie tolerance) implies `c_ik >= c_ij` in every row.
pub fn is_min_optimal(c: &Matrix, x: &[f64], tol: f64) -> Result<bool, SpectralError> {
    alignment_holds(c, x, tol, Objective::Min)
}

fn alignment_holds(
    c: &Matrix,
    x: &[f64],
    tol: f64,
    objective: Objective,
) -> Result<bool, SpectralError> {
    let n = c.n();
    if x.len() != n {
        return Err(SpectralError::Length {
            expected: n,
            found: x.len(),
        });
    }
    let total: f64 = x.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(SpectralError::NonPositiveVector { index: 0 });
    }
    let x: Vec<f64> = x.iter().map(|v| v / total).collect();
    let rho = c.mul_vec(&x).iter().sum::<f64>();
    let residual = eigen_residual(c, &x, rho);
    let allowed = 100.0 * tol * rho.max(1.0);
    if residual > allowed {
        return Err(SpectralError::ResidualTooLarge { residual, allowed });
    }

    let tie = TIE_TOL * x.iter().copied().fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    for row in c.rows() {
        // sweep j in ascending x; `seen` covers every k with x_k < x_j - tie
        let mut seen = 0;
        let mut extreme = match objective {
            Objective::Max => f64::NEG_INFINITY,
            Objective::Min => f64::INFINITY,
        };
        for &j in &order {
            while seen < n && x[order[seen]] < x[j] - tie {
                let v = row[order[seen]];
                extreme = match objective {
                    Objective::Max => extreme.max(v),
                    Objective::Min => extreme.min(v),
                };
                seen += 1;
            }
            let ok = match objective {
                Objective::Max => extreme <= row[j],
                Objective::Min => extreme >= row[j],
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn alignment() {
        let x = [0.3561, 0.4098, 0.5091, 0.5301, 0.4063];
        let p = align_to_vector(&x, SortDirection::Ascending);
        assert_eq!(p.as_slice(), &[0, 4, 1, 2, 3]);
        assert!(align_to_vector(&[0.1, 0.2, 0.3], SortDirection::Ascending).is_identity());
        assert!(align_to_vector(&[0.2; 4], SortDirection::Ascending).is_identity());
        assert!(align_to_vector(&[0.2; 4], SortDirection::Descending).is_identity());
        assert!(align_to_vector(&[0.3, 0.2, 0.1], SortDirection::Descending).is_identity());
        let p = align_to_vector(&[0.1, 0.3, 0.2], SortDirection::Descending);
        assert_eq!(p.as_slice(), &[1, 2, 0]);
        // a sub-tolerance inversion is a tie
        let x = [0.25, 0.25 + 1e-12, 0.25, 0.25 - 1e-12];
        assert!(align_to_vector(&x, SortDirection::Ascending).is_identity());
    }

    #[test]
    fn two_by_two_runs() {
        let a = m(&[&[1., 2.], &[3., 4.]]);
        let max = maximize_rho(&a, &OptimizeOptions::default()).unwrap();
        assert!((max.rho - (5.0 + 33f64.sqrt()) / 2.0).abs() < 1e-10);
        assert!(max.certificate && max.witness.in_omega(&a));
        let min = minimize_rho(&a, &OptimizeOptions::default()).unwrap();
        assert!((min.rho - (5.0 + 17f64.sqrt()) / 2.0).abs() < 1e-10);
        assert_eq!(min.witness, m(&[&[2., 1.], &[4., 3.]]));
        assert!(min.certificate);
    }

    #[test]
    fn equal_row_sums() {
        let a = m(&[&[1., 2.], &[2., 1.]]);
        for objective in [Objective::Max, Objective::Min] {
            let r = optimize(&a, objective, &OptimizeOptions::default()).unwrap();
            assert!((r.rho - 3.0).abs() < 1e-10);
            assert_eq!(r.trace.loop_count, 1);
        }
    }

    #[test]
    fn certificates_on_small_matrices() {
        let tol = 1e-12;
        let opts = PerronOptions::default();
        let argmin = m(&[&[2., 1.], &[4., 3.]]);
        let x = perron(&argmin, &opts).unwrap().x;
        assert!(is_min_optimal(&argmin, &x, tol).unwrap());
        assert!(!is_max_optimal(&argmin, &x, tol).unwrap());
        let a = m(&[&[1., 2.], &[3., 4.]]);
        let x = perron(&a, &opts).unwrap().x;
        assert!(!is_min_optimal(&a, &x, tol).unwrap());
        assert!(is_max_optimal(&a, &x, tol).unwrap());
        let flat = m(&[&[3., 3.], &[5., 5.]]);
        let x = perron(&flat, &opts).unwrap().x;
        assert!(is_max_optimal(&flat, &x, tol).unwrap());
        assert!(is_min_optimal(&flat, &x, tol).unwrap());
        assert!(matches!(
            is_max_optimal(&a, &[0.5, 0.5], tol),
            Err(SpectralError::ResidualTooLarge { .. })
        ));
    }

    #[test]
    fn precondition_gate() {
        let swap = m(&[&[0., 1.], &[1., 0.]]);
        assert!(matches!(
            maximize_rho(&swap, &OptimizeOptions::default()),
            Err(OptimizeError::PreconditionFailed)
        ));
        let opts = OptimizeOptions {
            unsafe_accept: true,
            ..Default::default()
        };
        assert!(maximize_rho(&swap, &opts).is_ok());
        let fi = m(&[&[1., 1., 0.], &[0., 1., 1.], &[1., 0., 1.]]);
        assert!(maximize_rho(&fi, &OptimizeOptions::default()).is_ok());
    }

    #[test]
    fn loop_limit_returns_best() {
        let a = m(&[
            &[2., 5., 2., 2., 5.],
            &[6., 6., 2., 3., 1.],
            &[7., 3., 5., 5., 3.],
            &[3., 3., 4., 6., 8.],
            &[2., 4., 2., 5., 5.],
        ]);
        let opts = OptimizeOptions {
            max_loops: 1,
            initial_order: InitialOrder::Identity,
            ..Default::default()
        };
        match maximize_rho(&a, &opts) {
            Err(OptimizeError::LoopLimitExceeded { max_loops: 1, best }) => {
                assert!(best.witness.in_omega(&a));
                assert!(!best.certificate);
                assert!((best.rho - 20.3067).abs() < 1e-4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trace_json_shape() {
        let a = m(&[&[1., 2.], &[3., 4.]]);
        let r = maximize_rho(&a, &OptimizeOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.trace.to_json()).unwrap();
        let step = &v[0];
        assert!(step["rho"].is_f64());
        assert_eq!(step["eigenvector"].as_array().unwrap().len(), 2);
        assert_eq!(step["applied_permutation"], serde_json::json!([1, 2]));
    }
}
