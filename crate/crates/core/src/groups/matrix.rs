use std::fmt;

use crate::error::{Error, Result};

/// Square integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl IntMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        IntMatrix { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![0; dim * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "matrix row {r} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Ok(IntMatrix { dim, entries })
    }

    /// Builds the matrix with columns `cols[j]`.
    pub fn from_columns(cols: &[Vec<i64>]) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: i64) {
        self.entries[r * self.dim + c] = value;
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        // chunks(0) panics, so the empty matrix yields no rows
        self.entries.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                out.entries[c * n + r] = self.entries[r * n + c];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = Self::zero(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == 0 {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] += a * other.entries[k * n + c];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        IntMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.dim, v.len(), "matrix/vector dimension mismatch");
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> i128 {
        leading_minor(self, self.dim)
    }

    /// Leading principal minors of orders 1..=dim.
    pub fn leading_minors(&self) -> Vec<i128> {
        (1..=self.dim).map(|k| leading_minor(self, k)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    /// Sylvester's criterion on a symmetric matrix.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric() && self.leading_minors().iter().all(|&m| m > 0)
    }

    /// Inverse over the integers, when the determinant is a unit.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if det != 1 && det != -1 {
            return Err(Error::InvalidParameter(format!(
                "matrix {self:?} has determinant {det}, not invertible over Z"
            )));
        }
        let n = self.dim;
        let mut out = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                // adjugate entry (r, c) is the (c, r) cofactor
                let minor = self.minor_without(c, r);
                let sign = if (r + c) % 2 == 0 { 1 } else { -1 };
                let value = sign * minor.determinant() * det;
                out.entries[r * n + c] = i64::try_from(value)
                    .map_err(|_| Error::InvalidParameter("matrix inverse overflows i64".into()))?;
            }
        }
        Ok(out)
    }

    fn minor_without(&self, skip_row: usize, skip_col: usize) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity((n - 1) * (n - 1));
        for r in (0..n).filter(|&r| r != skip_row) {
            for c in (0..n).filter(|&c| c != skip_col) {
                entries.push(self.entries[r * n + c]);
            }
        }
        IntMatrix {
            dim: n - 1,
            entries,
        }
    }

    /// Little-endian encoding of the dimension and entries.
    pub fn key_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 8 * self.entries.len());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out
    }
}

fn leading_minor(m: &IntMatrix, k: usize) -> i128 {
    if k == 0 {
        return 1;
    }
    let n = m.dim;
    let mut a: Vec<Vec<i128>> = (0..k)
        .map(|r| (0..k).map(|c| m.entries[r * n + c] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for p in 0..k {
        if a[p][p] == 0 {
            let Some(swap) = (p + 1..k).find(|&r| a[r][p] != 0) else {
                return 0;
            };
            a.swap(p, swap);
            sign = -sign;
        }
        for r in p + 1..k {
            for c in p + 1..k {
                a[r][c] = (a[r][c] * a[p][p] - a[r][p] * a[p][c]) / prev;
            }
        }
        prev = a[p][p];
    }
    sign * a[k - 1][k - 1]
}
