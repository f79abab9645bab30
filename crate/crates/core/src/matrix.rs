//! Dense nonnegative square matrices and the row-wise permutation set Ω(A).
//!
//! Every matrix handed out by this module is square, finite and entrywise
//! nonnegative. Validation happens once, at construction or parse time.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::MatrixError;
use crate::permutation::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortDirection {
    Ascending,
    Descending,
}

impl SortDirection {
    pub fn reversed(self) -> Self {
        match self {
            SortDirection::Ascending => SortDirection::Descending,
            SortDirection::Descending => SortDirection::Ascending,
        }
    }
}

/// Square nonnegative matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = MatrixError;

    fn try_from(repr: MatrixRepr) -> Result<Self, Self::Error> {
        if repr.rows.len() != repr.n {
            return Err(MatrixError::RowCount {
                expected: repr.n,
                found: repr.rows.len(),
            });
        }
        Matrix::from_rows(repr.rows)
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> Self {
        MatrixRepr {
            n: m.n,
            rows: m.to_rows(),
        }
    }
}

fn check_entry(row: usize, col: usize, v: f64) -> Result<f64, MatrixError> {
    if !v.is_finite() {
        return Err(MatrixError::NonFinite {
            row: row + 1,
            col: col + 1,
        });
    }
    if v < 0.0 {
        return Err(MatrixError::Negative {
            row: row + 1,
            col: col + 1,
            value: v,
        });
    }
    // folds -0.0 into 0.0 so exact comparisons agree with sorting
    Ok(v + 0.0)
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::Ragged {
                    row: i + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                data.push(check_entry(i, j, v)?);
            }
        }
        Ok(Matrix { n, data })
    }

    /// Builds an `n x n` matrix from row-major data.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        if data.len() != n * n {
            return Err(MatrixError::RowCount {
                expected: n * n,
                found: data.len(),
            });
        }
        let data = data
            .iter()
            .enumerate()
            .map(|(k, &v)| check_entry(k / n, k % n, v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix { n, data })
    }

    /// Caller guarantees the entries came from an already validated matrix.
    pub(crate) fn from_trusted(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Matrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0);
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    pub fn filled(n: usize, value: f64) -> Result<Self, MatrixError> {
        Matrix::from_vec(n, vec![value; n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&v| v > 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        self.rows()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    /// Arithmetic mean of the row sums, `(1/n) * sum_ij a_ij`.
    pub fn mean_row_sum(&self) -> f64 {
        self.row_sums().iter().sum::<f64>() / self.n as f64
    }

    /// Sorts the entries of every row independently. The sort is stable.
    pub fn sort_rows(&self, direction: SortDirection) -> Matrix {
        let mut data = self.data.clone();
        for row in data.chunks_exact_mut(self.n) {
            match direction {
                SortDirection::Ascending => row.sort_by(|a, b| a.total_cmp(b)),
                SortDirection::Descending => row.sort_by(|a, b| b.total_cmp(a)),
            }
        }
        Matrix { n: self.n, data }
    }

    /// `P A`: row `i` of the result is row `p[i]` of `self`.
    pub fn permute_rows(&self, p: &Permutation) -> Result<Matrix, MatrixError> {
        self.check_dim(p.len())?;
        let mut data = Vec::with_capacity(self.data.len());
        for &src in p.as_slice() {
            data.extend_from_slice(self.row(src));
        }
        Ok(Matrix { n: self.n, data })
    }

    /// `A P`: column `k` of `self` lands in column `p[k]`.
    pub fn permute_cols(&self, p: &Permutation) -> Result<Matrix, MatrixError> {
        self.check_dim(p.len())?;
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for (k, &dst) in p.as_slice().iter().enumerate() {
                data[i * n + dst] = self.data[i * n + k];
            }
        }
        Ok(Matrix { n, data })
    }

    pub fn row_signature(&self) -> RowSignature {
        RowSignature {
            rows: self.sort_rows(SortDirection::Ascending).to_rows(),
        }
    }

    /// Whether `self` is obtained from `other` by permuting entries within rows.
    pub fn in_omega(&self, other: &Matrix) -> bool {
        self.n == other.n && self.row_signature() == other.row_signature()
    }

    /// Adds `eps` to every entry.
    pub fn epsilon_perturb(&self, eps: f64) -> Result<Matrix, MatrixError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(MatrixError::InvalidEpsilon(eps));
        }
        Ok(Matrix {
            n: self.n,
            data: self.data.iter().map(|v| v + eps).collect(),
        })
    }

    /// Euclidean norm of each row.
    pub fn row_norms(&self) -> Vec<f64> {
        self.rows()
            .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    fn check_dim(&self, m: usize) -> Result<(), MatrixError> {
        if m == self.n {
            Ok(())
        } else {
            Err(MatrixError::DimensionMismatch {
                left: self.n,
                right: m,
            })
        }
    }

    /// Plain-text form: `n` on the first line, then one row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(s: &str) -> Result<Matrix, MatrixError> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first, header) = lines.next().ok_or(MatrixError::Empty)?;
        let n: usize = header.parse().map_err(|_| MatrixError::Parse {
            line: first,
            message: format!("expected the dimension, found {header:?}"),
        })?;
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        let mut row = 0;
        for (line, text) in lines {
            if row == n {
                return Err(MatrixError::Parse {
                    line,
                    message: format!("unexpected content after {n} rows"),
                });
            }
            let mut count = 0;
            for (col, tok) in text.split_whitespace().enumerate() {
                let v: f64 = tok.parse().map_err(|_| MatrixError::Parse {
                    line,
                    message: format!("row {}, column {}: cannot parse {tok:?}", row + 1, col + 1),
                })?;
                if col < n {
                    data.push(check_entry(row, col, v)?);
                }
                count += 1;
            }
            if count != n {
                return Err(MatrixError::Ragged {
                    row: row + 1,
                    expected: n,
                    found: count,
                });
            }
            row += 1;
        }
        if row != n {
            return Err(MatrixError::RowCount {
                expected: n,
                found: row,
            });
        }
        Ok(Matrix { n, data })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization is infallible")
    }

    pub fn parse_json(s: &str) -> Result<Matrix, MatrixError> {
        serde_json::from_str(s).map_err(|e| MatrixError::Json(e.to_string()))
    }

    /// Accepts either format, choosing JSON when the input starts with `{`.
    pub fn parse_any(s: &str) -> Result<Matrix, MatrixError> {
        if s.trim_start().starts_with('{') {
            Matrix::parse_json(s)
        } else {
            Matrix::parse_text(s)
        }
    }

    /// Lexicographic comparison of the row-major entries.
    pub(crate) fn lex_cmp(&self, other: &Matrix) -> std::cmp::Ordering {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

impl FromStr for Matrix {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Matrix::parse_any(s)
    }
}

/// Right-aligned columns, one row per line.
impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|v| format!("{v}")).collect();
        let width = cells.iter().map(|c| c.len()).max().unwrap_or(1);
        for row in cells.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Each row's entries sorted ascending. Two matrices share a signature
/// exactly when each lies in the other's Ω-set.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSignature {
    pub rows: Vec<Vec<f64>>,
}
