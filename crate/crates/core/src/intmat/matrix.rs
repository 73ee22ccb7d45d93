use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::IntMatError;

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, IntMatError> {
        if rows == 0 || cols == 0 {
            return Err(IntMatError::EmptyShape);
        }
        Ok(IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] })
    }

    pub fn identity(n: usize) -> Result<Self, IntMatError> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m[(i, i)] = BigInt::from(1);
        }
        Ok(m)
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, IntMatError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(IntMatError::EmptyShape);
        }
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(IntMatError::RaggedRows { row: i, expected: c, found: row.len() });
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> BigInt,
    ) -> Result<Self, IntMatError> {
        if rows == 0 || cols == 0 {
            return Err(IntMatError::EmptyShape);
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[BigInt]) -> Result<Self, IntMatError> {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { BigInt::zero() })
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.data.chunks(self.cols)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_nested(&self) -> Vec<Vec<BigInt>> {
        self.rows().map(<[BigInt]>::to_vec).collect()
    }

    /// Entries as `i64` rows, failing if any entry does not fit.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>, IntMatError> {
        self.rows()
            .map(|row| {
                row.iter()
                    .map(|x| x.to_i64().ok_or(IntMatError::EntryTooLarge))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, IntMatError> {
        if self.cols != other.rows {
            return Err(IntMatError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `selfᵗ · self`, the Gram matrix of the columns.
    pub fn gram(&self) -> IntMatrix {
        self.transpose().mul(self).expect("transpose shapes always agree")
    }

    pub fn scale(&self, s: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| x.sign() != num_bigint::Sign::Minus)
    }

    pub fn entry_sum(&self) -> BigInt {
        self.data.iter().sum()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn diag(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    /// Simultaneous row/column permutation: entry `(i, j)` of the result is
    /// entry `(perm[i], perm[j])` of `self`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> IntMatrix {
        debug_assert_eq!(perm.len(), self.rows);
        let n = self.rows;
        let mut data = Vec::with_capacity(n * n);
        for &pi in perm {
            for &pj in perm {
                data.push(self[(pi, pj)].clone());
            }
        }
        IntMatrix { rows: n, cols: n, data }
    }

    /// Submatrix on the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<IntMatrix, IntMatError> {
        IntMatrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub(crate) fn require_square(&self) -> Result<(), IntMatError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(IntMatError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub(crate) fn require_symmetric(&self) -> Result<(), IntMatError> {
        self.require_square()?;
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(IntMatError::NotSymmetric)
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntMatrix {
    /// Compact bracket notation, e.g. `[[5,2],[2,4]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Serializes one integer as a JSON number when it fits in `i64`, otherwise
/// as a decimal string.
pub(crate) struct JsonInt<'a>(pub &'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInt {
    Int(i64),
    Text(String),
}

impl RawInt {
    fn into_bigint<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            RawInt::Int(v) => Ok(BigInt::from(v)),
            RawInt::Text(s) => s.trim().parse().map_err(|_| E::custom(format!("not an integer: {s:?}"))),
        }
    }
}

pub(crate) fn serialize_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    JsonInt(x).serialize(s)
}

pub(crate) fn deserialize_bigint<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    RawInt::deserialize(d)?.into_bigint()
}

pub(crate) fn serialize_bigint_vec<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&JsonInt(x))?;
    }
    seq.end()
}

pub(crate) fn deserialize_bigint_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    Vec::<RawInt>::deserialize(d)?.into_iter().map(RawInt::into_bigint).collect()
}

struct RowsRef<'a>(&'a IntMatrix);

impl Serialize for RowsRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows))?;
        for row in self.0.rows() {
            seq.serialize_element(&RowRef(row))?;
        }
        seq.end()
    }
}

struct RowRef<'a>(&'a [BigInt]);

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_bigint_vec(self.0, s)
    }
}

/// Exchange format: `{"rows": [[int, ...], ...]}`.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IntMatrix", 1)?;
        st.serialize_field("rows", &RowsRef(self))?;
        st.end()
    }
}

/// Accepts `{"rows": [[...]]}` or a bare `[[...]]`.
impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wrapped {
            rows: Vec<Vec<RawInt>>,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Wrapped(Wrapped),
            Bare(Vec<Vec<RawInt>>),
        }
        let raw = match Either::deserialize(d)? {
            Either::Wrapped(w) => w.rows,
            Either::Bare(rows) => rows,
        };
        let rows = raw
            .into_iter()
            .map(|row| row.into_iter().map(RawInt::into_bigint).collect::<Result<Vec<_>, D::Error>>())
            .collect::<Result<Vec<_>, _>>()?;
        IntMatrix::from_rows(&rows).map_err(de::Error::custom)
    }
}
