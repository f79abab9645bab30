use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MatrixError;

/// A permutation of `0..n`, read as the permutation matrix `P` with
/// `P[i][map[i]] = 1`.
///
/// Applied to a vector, `(P v)[i] = v[map[i]]`. Applied on the left of a
/// matrix it moves row `map[i]` into position `i`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// Builds a permutation from a 0-based index map.
    pub fn from_map(map: Vec<usize>) -> Result<Self, MatrixError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || seen[m] {
                return Err(MatrixError::NotAPermutation(map));
            }
            seen[m] = true;
        }
        Ok(Permutation { map })
    }

    /// Builds a permutation from the 1-based index arrays used in text output.
    pub fn from_one_based(map: &[usize]) -> Result<Self, MatrixError> {
        if map.contains(&0) {
            return Err(MatrixError::NotAPermutation(map.to_vec()));
        }
        Self::from_map(map.iter().map(|&m| m - 1).collect())
    }

    /// Swaps positions `i` and `j` of the identity.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(n);
        p.map.swap(i, j);
        p
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|m| m + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        Permutation { map: inv }
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len(), "permutation length mismatch");
        Permutation {
            map: self.map.iter().map(|&m| other.map[m]).collect(),
        }
    }

    /// `(P v)[i] = v[map[i]]`.
    pub fn apply<T: Copy>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.len(), v.len(), "permutation length mismatch");
        self.map.iter().map(|&m| v[m]).collect()
    }

    /// Dense 0/1 matrix form, row-major.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let n = self.len();
        self.map
            .iter()
            .map(|&m| {
                let mut row = vec![0u8; n];
                row[m] = 1;
                row
            })
            .collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_based())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|m| m.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = MatrixError;

    fn try_from(map: Vec<usize>) -> Result<Self, Self::Error> {
        Permutation::from_one_based(&map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.one_based()
    }
}
