//! Collatz-Wielandt brackets and sub/super-eigenvector certificates.

use serde::{Deserialize, Serialize};

use crate::error::SpectralError;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CwBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, rho: f64, slack: f64) -> bool {
        self.lower - slack <= rho && rho <= self.upper + slack
    }
}

/// `min_i (Ax)_i / x_i` and `max_i (Ax)_i / x_i` for a positive `x`; these
/// bracket the Perron root.
pub fn cw_bounds(a: &Matrix, x: &[f64]) -> Result<CwBounds, SpectralError> {
    if x.len() != a.n() {
        return Err(SpectralError::Length {
            expected: a.n(),
            found: x.len(),
        });
    }
    if let Some(index) = x.iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(SpectralError::NonPositiveVector { index });
    }
    let ax = a.mul_vec(x);
    let (lower, upper) = ax
        .iter()
        .zip(x)
        .map(|(ax, xi)| ax / xi)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        });
    Ok(CwBounds { lower, upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    /// `alpha x <= A x`, certifying `rho(A) >= alpha`.
    Lower,
    /// `A x <= alpha x`, certifying `rho(A) <= alpha`.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// The inequality holds; `strict` lists (0-based) rows where it is strict.
    /// For irreducible `A` a nonempty set certifies a strict bound on `rho`.
    Holds { strict: Vec<usize> },
    /// First (0-based) row where the inequality fails.
    FailsAt(usize),
}

impl Certificate {
    pub fn holds(&self) -> bool {
        matches!(self, Certificate::Holds { .. })
    }
}

/// Checks `alpha x <= A x` (lower) or `A x <= alpha x` (upper) row by row.
///
/// Comparisons are made with an absolute slack of `tol * max(|alpha|, 1)`:
/// a row fails only if it is violated by more than the slack and counts as
/// strict only if it clears it by more than the slack.
pub fn strict_improvement_certificate(
    a: &Matrix,
    x: &[f64],
    alpha: f64,
    side: BoundSide,
    tol: f64,
) -> Result<Certificate, SpectralError> {
    if x.len() != a.n() {
        return Err(SpectralError::Length {
            expected: a.n(),
            found: x.len(),
        });
    }
    let slack = tol * alpha.abs().max(1.0);
    let ax = a.mul_vec(x);
    let mut strict = Vec::new();
    for (i, (axi, xi)) in ax.iter().zip(x).enumerate() {
        // margin > 0 means the certified inequality holds with room to spare
        let margin = match side {
            BoundSide::Lower => axi - alpha * xi,
            BoundSide::Upper => alpha * xi - axi,
        };
        if margin < -slack {
            return Ok(Certificate::FailsAt(i));
        }
        if margin > slack {
            strict.push(i);
        }
    }
    Ok(Certificate::Holds { strict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::perron::{perron, PerronOptions};

    fn a() -> Matrix {
        Matrix::from_rows(vec![vec![1., 2.], vec![3., 4.]]).unwrap()
    }

    #[test]
    fn flat_vector_gives_row_sums() {
        let b = cw_bounds(&a(), &[0.5, 0.5]).unwrap();
        assert_eq!(
            b,
            CwBounds {
                lower: 3.0,
                upper: 7.0
            }
        );
        assert!(b.contains((5.0 + 33f64.sqrt()) / 2.0, 0.0));
    }

    #[test]
    fn perron_vector_collapses_bracket() {
        let p = perron(&a(), &PerronOptions::default()).unwrap();
        let b = cw_bounds(&a(), &p.x).unwrap();
        assert!(b.width() <= 1e-11);
        assert!(b.contains(p.rho, 1e-11));
    }

    #[test]
    fn rejects_non_positive() {
        assert_eq!(
            cw_bounds(&a(), &[0.5, 0.0]),
            Err(SpectralError::NonPositiveVector { index: 1 })
        );
        assert!(cw_bounds(&a(), &[1.0]).is_err());
    }

    #[test]
    fn certificates() {
        let c =
            strict_improvement_certificate(&a(), &[0.5, 0.5], 3.0, BoundSide::Lower, 0.0).unwrap();
        assert_eq!(c, Certificate::Holds { strict: vec![1] });
        let c =
            strict_improvement_certificate(&a(), &[0.5, 0.5], 8.0, BoundSide::Lower, 0.0).unwrap();
        assert_eq!(c, Certificate::FailsAt(0));
        let c =
            strict_improvement_certificate(&a(), &[0.5, 0.5], 7.0, BoundSide::Upper, 0.0).unwrap();
        assert_eq!(c, Certificate::Holds { strict: vec![0] });

        let p = perron(&a(), &PerronOptions::default()).unwrap();
        for side in [BoundSide::Lower, BoundSide::Upper] {
            let c = strict_improvement_certificate(&a(), &p.x, p.rho, side, 1e-11).unwrap();
            assert_eq!(c, Certificate::Holds { strict: vec![] });
        }
    }
}
