//! Mean-row-sum bounds on the extreme Perron roots and their equality cases.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::matrix::Matrix;
use crate::optimize::{maximize_rho, minimize_rho, OptimizeOptions};
use crate::oracle::{oracle_extremes, OracleOptions, DEFAULT_LIMIT_N};

/// Absolute slack allowed on either side of `min_rho <= mean <= max_rho`.
pub const SANDWICH_SLACK: f64 = 1e-9;

/// Gaps at or below this count as equalities.
pub const EQUALITY_GAP: f64 = 1e-9;

/// Relative spread under which values count as equal.
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityCase {
    /// All row sums agree, so the flat vector is a Perron vector of every
    /// member of Ω(A).
    FlatEigenvector,
    /// Every row is constant, so Ω(A) = {A}.
    ConstantRows,
    None,
}

impl fmt::Display for EqualityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EqualityCase::FlatEigenvector => "flat_eigenvector",
            EqualityCase::ConstantRows => "constant_rows",
            EqualityCase::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Algorithm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oracle => "oracle",
            Method::Algorithm => "algorithm",
        })
    }
}

fn spread_within(values: impl Iterator<Item = f64>, tol: f64) -> bool {
    let (mut lo, mut hi, mut sum, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
        count += 1;
    }
    if count == 0 {
        return true;
    }
    let mean = sum / count as f64;
    hi - lo <= tol * mean.abs()
}

/// Which equality structure, if any, `A` has.
///
/// `ConstantRows` takes precedence when both hold (e.g. every entry equal).
/// The classification is meant for positive matrices.
pub fn detect_equality_case(a: &Matrix, tol: f64) -> EqualityCase {
    if a.rows().all(|r| spread_within(r.iter().copied(), tol)) {
        EqualityCase::ConstantRows
    } else if spread_within(a.row_sums().into_iter(), tol) {
        EqualityCase::FlatEigenvector
    } else {
        EqualityCase::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub optimize: OptimizeOptions,
    pub limit_n: usize,
    pub equality_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            optimize: OptimizeOptions::default(),
            limit_n: DEFAULT_LIMIT_N,
            equality_tol: DEFAULT_EQUALITY_TOL,
        }
    }
}

impl AnalysisOptions {
    fn oracle(&self) -> OracleOptions {
        OracleOptions {
            perron: self.optimize.perron,
            limit_n: self.limit_n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub mean_row_sum: f64,
    pub max_rho: f64,
    pub min_rho: f64,
    /// `max_rho - mean_row_sum`
    pub gap_upper: f64,
    /// `mean_row_sum - min_rho`
    pub gap_lower: f64,
    pub method: Method,
    pub equality_case: EqualityCase,
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization is infallible")
    }

    pub fn summary(&self) -> String {
        format!(
            "n: {}\nmethod: {}\nmin_rho: {:?}\nmean_row_sum: {:?}\nmax_rho: {:?}\ngap_lower: {:?}\ngap_upper: {:?}\nequality_case: {}",
            self.n,
            self.method,
            self.min_rho,
            self.mean_row_sum,
            self.max_rho,
            self.gap_lower,
            self.gap_upper,
            self.equality_case
        )
    }
}

/// Extremes of the Perron root over Ω(A) against the mean row sum.
///
/// Fails with `InvariantViolation` if the computed extremes do not sandwich
/// the mean, which would point at a solver defect.
pub fn bound_report(
    a: &Matrix,
    method: Method,
    opts: &AnalysisOptions,
) -> Result<BoundReport, AnalysisError> {
    let mean = a.mean_row_sum();
    let (min_rho, max_rho) = match method {
        Method::Oracle => {
            let r = oracle_extremes(a, &opts.oracle())?;
            (r.min_rho, r.max_rho)
        }
        Method::Algorithm => {
            let max = maximize_rho(a, &opts.optimize)?;
            let min = minimize_rho(a, &opts.optimize)?;
            (min.rho, max.rho)
        }
    };
    let report = BoundReport {
        n: a.n(),
        mean_row_sum: mean,
        max_rho,
        min_rho,
        gap_upper: max_rho - mean,
        gap_lower: mean - min_rho,
        method,
        equality_case: detect_equality_case(a, opts.equality_tol),
    };
    check_report(&report)?;
    Ok(report)
}

fn check_report(r: &BoundReport) -> Result<(), AnalysisError> {
    if r.gap_upper < -SANDWICH_SLACK || r.gap_lower < -SANDWICH_SLACK {
        return Err(AnalysisError::InvariantViolation(format!(
            "min_rho {} <= mean {} <= max_rho {} does not hold",
            r.min_rho, r.mean_row_sum, r.max_rho
        )));
    }
    if r.equality_case != EqualityCase::None
        && (r.gap_upper.abs() > EQUALITY_GAP || r.gap_lower.abs() > EQUALITY_GAP)
    {
        return Err(AnalysisError::InvariantViolation(format!(
            "equality case {} but gaps are {:e} and {:e}",
            r.equality_case, r.gap_lower, r.gap_upper
        )));
    }
    Ok(())
}

/// Sandwich of the perturbed matrix `A + eps` (every entry shifted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedBound {
    pub epsilon: f64,
    pub report: BoundReport,
}

/// Checks the bound on `A + eps` for each `eps`, which is strictly positive
/// and so satisfies the algorithm preconditions. As `eps` shrinks the gaps
/// approach those of `A` by continuity of the Perron root.
pub fn perturbation_sandwich(
    a: &Matrix,
    epsilons: &[f64],
    method: Method,
    opts: &AnalysisOptions,
) -> Result<Vec<PerturbedBound>, AnalysisError> {
    epsilons
        .iter()
        .map(|&eps| {
            let perturbed = a.epsilon_perturb(eps)?;
            Ok(PerturbedBound {
                epsilon: eps,
                report: bound_report(&perturbed, method, opts)?,
            })
        })
        .collect()
}

/// Which of the three equivalent conditions held on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    /// mean row sum equals the maximum Perron root
    pub mean_is_max: bool,
    /// flat Perron vector or constant rows
    pub structural: bool,
    /// mean row sum equals the minimum Perron root
    pub mean_is_min: bool,
    pub equality_case: EqualityCase,
    pub report: BoundReport,
}

impl EquivalenceVerdict {
    pub fn consistent(&self) -> bool {
        self.mean_is_max == self.structural && self.structural == self.mean_is_min
    }

    pub fn all_hold(&self) -> bool {
        self.mean_is_max && self.structural && self.mean_is_min
    }
}

/// Evaluates the three equality conditions on a positive matrix using the
/// exhaustive oracle.
pub fn verify_equality_equivalence(
    a: &Matrix,
    opts: &AnalysisOptions,
) -> Result<EquivalenceVerdict, AnalysisError> {
    if !a.is_positive() {
        return Err(AnalysisError::Precondition(
            "equality characterization needs a strictly positive matrix".into(),
        ));
    }
    let mean = a.mean_row_sum();
    let r = oracle_extremes(a, &opts.oracle())?;
    let report = BoundReport {
        n: a.n(),
        mean_row_sum: mean,
        max_rho: r.max_rho,
        min_rho: r.min_rho,
        gap_upper: r.max_rho - mean,
        gap_lower: mean - r.min_rho,
        method: Method::Oracle,
        equality_case: detect_equality_case(a, opts.equality_tol),
    };
    if report.gap_upper < -SANDWICH_SLACK || report.gap_lower < -SANDWICH_SLACK {
        return Err(AnalysisError::InvariantViolation(
            report.summary().replace('\n', ", "),
        ));
    }
    Ok(EquivalenceVerdict {
        mean_is_max: report.gap_upper.abs() <= EQUALITY_GAP,
        structural: report.equality_case != EqualityCase::None,
        mean_is_min: report.gap_lower.abs() <= EQUALITY_GAP,
        equality_case: report.equality_case,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn equality_cases() {
        let tol = DEFAULT_EQUALITY_TOL;
        assert_eq!(
            detect_equality_case(&m(&[&[1., 2.], &[2., 1.]]), tol),
            EqualityCase::FlatEigenvector
        );
        assert_eq!(
            detect_equality_case(&m(&[&[3., 3.], &[5., 5.]]), tol),
            EqualityCase::ConstantRows
        );
        assert_eq!(
            detect_equality_case(&m(&[&[1., 2.], &[3., 4.]]), tol),
            EqualityCase::None
        );
        // both hold: constant rows wins
        assert_eq!(
            detect_equality_case(&Matrix::filled(3, 2.0).unwrap(), tol),
            EqualityCase::ConstantRows
        );
    }

    #[test]
    fn oracle_report() {
        let r = bound_report(
            &m(&[&[1., 2.], &[3., 4.]]),
            Method::Oracle,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert!((r.min_rho - 4.56155281280883).abs() < 1e-9);
        assert_eq!(r.mean_row_sum, 5.0);
        assert!((r.max_rho - 5.372281323269014).abs() < 1e-9);
        assert_eq!(r.equality_case, EqualityCase::None);
        let line = r.summary();
        assert!(line.starts_with("n: 2\nmethod: oracle\n"), "{line}");
        let back: BoundReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn flat_report() {
        let r = bound_report(
            &m(&[&[1., 2.], &[2., 1.]]),
            Method::Algorithm,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert_eq!(r.equality_case, EqualityCase::FlatEigenvector);
        assert!(r.gap_upper.abs() < 1e-9 && r.gap_lower.abs() < 1e-9);
    }

    #[test]
    fn equivalence_verdicts() {
        let o = AnalysisOptions::default();
        let v = verify_equality_equivalence(&m(&[&[1., 2.], &[2., 1.]]), &o).unwrap();
        assert!(v.all_hold());
        let v = verify_equality_equivalence(&m(&[&[3., 3.], &[5., 5.]]), &o).unwrap();
        assert!(v.all_hold());
        let v = verify_equality_equivalence(&m(&[&[1., 2.], &[3., 4.]]), &o).unwrap();
        assert!(v.consistent() && !v.mean_is_max && !v.structural && !v.mean_is_min);
        assert!(verify_equality_equivalence(&m(&[&[0., 2.], &[3., 4.]]), &o).is_err());
    }

    #[test]
    fn perturbation_route_on_reducible_input() {
        let a = m(&[&[1., 0., 0.], &[2., 3., 0.], &[0., 1., 4.]]);
        let o = AnalysisOptions::default();
        let rows = perturbation_sandwich(&a, &[1e-3, 1e-6], Method::Algorithm, &o).unwrap();
        let direct = bound_report(&a, Method::Oracle, &o).unwrap();
        for r in &rows {
            assert!(r.report.gap_lower >= -SANDWICH_SLACK && r.report.gap_upper >= -SANDWICH_SLACK);
        }
        // gaps move continuously toward the unperturbed values
        let d_far = (rows[0].report.gap_upper - direct.gap_upper).abs();
        let d_near = (rows[1].report.gap_upper - direct.gap_upper).abs();
        assert!(d_near < d_far && d_near < 1e-2);
    }
}
