//! Prime-field arithmetic and dense matrices over GF(p).
//!
//! Entries are stored as `u8` residues, which covers every prime up to 251.
//! Elimination is deterministic: pivot columns are taken left to right and the
//! pivot row is the first remaining row with a nonzero entry in that column,
//! so every routine built on [`Mat::rref`] is reproducible.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A prime field GF(p) with 2 <= p <= 251.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    p: u8,
}

impl FieldSpec {
    pub const GF2: FieldSpec = FieldSpec { p: 2 };

    pub fn new(p: u32) -> Result<Self> {
        if !(2..=251).contains(&p) || !(2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(FieldSpec { p: p as u8 })
    }

    #[inline]
    pub fn modulus(self) -> u8 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn reduce(self, v: u64) -> u8 {
        (v % self.p as u64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.p as u16 - b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    /// Multiplicative inverse by Fermat's little theorem; `None` for zero.
    pub fn inv(self, a: u8) -> Option<u8> {
        if a == 0 {
            return None;
        }
        let mut result = 1u8;
        let mut base = a;
        let mut e = self.p as u32 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        Some(result)
    }

    /// Dot product of two equal-length vectors.
    pub fn dot(self, a: &[u8], b: &[u8]) -> u8 {
        debug_assert_eq!(a.len(), b.len());
        let p = self.p as u32;
        let mut acc = 0u32;
        for (&x, &y) in a.iter().zip(b) {
            acc = (acc + x as u32 * y as u32) % p;
        }
        acc as u8
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
    field: FieldSpec,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols], field }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Mat::zeros(n, n, field);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major residues, rejecting out-of-range entries.
    pub fn from_entries(rows: usize, cols: usize, field: FieldSpec, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(&bad) = data.iter().find(|&&e| e >= field.p) {
            return Err(Error::EntryOutOfRange { value: bad as u64, p: field.p });
        }
        Ok(Mat { rows, cols, data, field })
    }

    /// Builds a matrix from nested rows. All rows must have the same length.
    pub fn from_rows<R: AsRef<[u64]>>(field: FieldSpec, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    row.len()
                )));
            }
            for &v in row {
                if v >= field.p as u64 {
                    return Err(Error::EntryOutOfRange { value: v, p: field.p });
                }
                data.push(v as u8);
            }
        }
        Ok(Mat { rows: rows.len(), cols, data, field })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn entries(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        self.data[r * self.cols + c]
    }

    /// Sets an entry. Panics if `v` is not a residue of the field.
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        assert!(v < self.field.p, "entry {v} out of range for {}", self.field);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == (i == j) as u8))
    }

    fn check_field(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch { left: self.field.p, right: other.field.p });
        }
        Ok(())
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.field.p as u32;
        let mut out = Mat::zeros(self.rows, other.cols, self.field);
        let mut acc = vec![0u32; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u32;
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot = (*slot + a * b as u32) % p;
                }
            }
            for (j, &v) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = v as u8;
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · x`.
    pub fn mul_vec(&self, x: &[u8]) -> Result<Vec<u8>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|r| self.field.dot(self.row(r), x)).collect())
    }

    /// Row-vector product `y · self`.
    pub fn vec_mul(&self, y: &[u8]) -> Result<Vec<u8>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "row vector of length {} against {} rows",
                y.len(),
                self.rows
            )));
        }
        let p = self.field.p as u32;
        let mut acc = vec![0u32; self.cols];
        for (r, &coef) in y.iter().enumerate() {
            if coef == 0 {
                continue;
            }
            for (slot, &b) in acc.iter_mut().zip(self.row(r)) {
                *slot = (*slot + coef as u32 * b as u32) % p;
            }
        }
        Ok(acc.into_iter().map(|v| v as u8).collect())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(&self, other: &Mat, op: impl Fn(FieldSpec, u8, u8) -> u8) -> Result<Mat> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(self.field, a, b)).collect();
        Ok(Mat { rows: self.rows, cols: self.cols, data, field: self.field })
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    /// Horizontal concatenation `(self | other)`.
    pub fn hstack(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!("hstack of {} rows with {} rows", self.rows, other.rows)));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Mat { rows: self.rows, cols, data, field: self.field })
    }

    /// Vertical concatenation of `self` above `other`.
    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} columns with {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat { rows: self.rows + other.rows, cols: self.cols, data, field: self.field })
    }

    /// Submatrix made of the given (0-based) columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.rows, cols.len(), self.field);
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.reduce_in_place(self.cols);
        (m, pivots)
    }

    /// Gauss-Jordan elimination restricted to the first `limit` columns.
    fn reduce_in_place(&mut self, limit: usize) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..limit {
            if lead == self.rows {
                break;
            }
            let Some(piv) = (lead..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if piv != lead {
                for j in 0..cols {
                    self.data.swap(piv * cols + j, lead * cols + j);
                }
            }
            let inv = f.inv(self.data[lead * cols + c]).expect("pivot is nonzero");
            for j in 0..cols {
                self.data[lead * cols + j] = f.mul(self.data[lead * cols + j], inv);
            }
            for r in 0..self.rows {
                if r == lead {
                    continue;
                }
                let factor = self.data[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for j in 0..cols {
                    let v = f.mul(factor, self.data[lead * cols + j]);
                    self.data[r * cols + j] = f.sub(self.data[r * cols + j], v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// One solution of `self · x = b`, or `None` when the system is inconsistent.
    ///
    /// Free variables are zero, so the returned vector is unique for a given system.
    /// Panics if `b.len()` differs from the row count.
    pub fn solve_affine(&self, b: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(b.len(), self.rows, "right-hand side length must equal the row count");
        let n = self.cols;
        let mut aug = Mat::zeros(self.rows, n + 1, self.field);
        for (r, &v) in b.iter().enumerate() {
            aug.data[r * (n + 1)..r * (n + 1) + n].copy_from_slice(self.row(r));
            aug.data[r * (n + 1) + n] = self.field.reduce(v as u64);
        }
        let pivots = aug.reduce_in_place(n);
        let rank = pivots.len();
        if (rank..self.rows).any(|r| aug.data[r * (n + 1) + n] != 0) {
            return None;
        }
        let mut x = vec![0u8; n];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = aug.data[i * (n + 1) + n];
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Mat::identity(n, self.field)).ok()?;
        let mut red = aug;
        let pivots = red.reduce_in_place(n);
        if pivots.len() != n {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(red.select_cols(&cols))
    }
}

impl fmt::Display for Mat {
    /// Text format: `rows cols p` on the first line, then one line per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows, self.cols, self.field.p)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Mat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims: Vec<u32> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols, p] = dims[..] else {
            return Err(Error::Parse(format!("header must be \"rows cols p\", got {header:?}")));
        };
        let field = FieldSpec::new(p)?;
        let (rows, cols) = (rows as usize, cols as usize);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = if cols == 0 {
                ""
            } else {
                lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", r + 1)))?
            };
            let before = data.len();
            for t in line.split_whitespace() {
                let v: u64 = t.parse().map_err(|_| Error::Parse(format!("bad entry {t:?}")))?;
                if v >= field.p as u64 {
                    return Err(Error::EntryOutOfRange { value: v, p: field.p });
                }
                data.push(v as u8);
            }
            if data.len() - before != cols {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {cols}",
                    r + 1,
                    data.len() - before
                )));
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing data after the last row".into()));
        }
        Mat::from_entries(rows, cols, field, data)
    }
}
