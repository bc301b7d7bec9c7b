//! Permutations of `[1..r]`, their matrices, and matrices commuting with an
//! involutory permutation.
//!
//! A permutation acts as a row permutation under left multiplication: the
//! matrix of `σ` has a 1 at `(σ(j), j)`, so row `j` of `M` becomes row `σ(j)`
//! of `P·M`.
//!
//! Cycle strings are concatenated parenthesised groups. Inside a group,
//! elements are separated by spaces or commas; a group with no separator is
//! read digit by digit, so `(13)(2)` and `(1 3)(2)` are the same permutation.
//! Fixed points may be left out when the size is known.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, Mat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// 0-based images: `images[i] = σ(i + 1) - 1`.
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// From 1-based images `σ(1), …, σ(n)`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection on 1..={n}")));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images: images.iter().map(|v| v - 1).collect() })
    }

    /// Parses cycle notation on `[1..size]`. Elements are separated by spaces
    /// or commas; for sizes up to 9 an unseparated group like `(132)` is read
    /// digit by digit, otherwise it is a single element.
    pub fn parse_cycles(s: &str, size: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..size).collect();
        let mut seen = vec![false; size];
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| Error::InvalidPermutation(format!("malformed cycle string {s:?}")))?;
            let (group, tail) = body;
            rest = tail.trim_start();
            let tokens: Vec<&str> = if group.contains([' ', ',']) {
                group.split([' ', ',']).filter(|t| !t.is_empty()).collect()
            } else if size > 9 {
                vec![group]
            } else {
                (0..group.len()).map(|i| &group[i..i + 1]).collect()
            };
            let cycle: Vec<usize> = tokens
                .iter()
                .map(|t| match t.parse::<usize>() {
                    Ok(v) if (1..=size).contains(&v) => Ok(v - 1),
                    _ => Err(Error::InvalidPermutation(format!("element {t:?} outside 1..={size}"))),
                })
                .collect::<Result<_>>()?;
            for &e in &cycle {
                if std::mem::replace(&mut seen[e], true) {
                    return Err(Error::InvalidPermutation(format!("element {} appears twice", e + 1)));
                }
            }
            for (i, &e) in cycle.iter().enumerate() {
                images[e] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Reads a permutation matrix back into a permutation.
    pub fn from_matrix(m: &Mat) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::DimensionMismatch(format!("{}x{} is not square", n, m.cols())));
        }
        let mut images = Vec::with_capacity(n);
        for j in 0..n {
            let col = m.col(j);
            let ones: Vec<usize> = (0..n).filter(|&i| col[i] == 1).collect();
            if ones.len() != 1 || col.iter().filter(|&&v| v != 0).count() != 1 {
                return Err(Error::InvalidPermutation(format!("column {} is not a unit vector", j + 1)));
            }
            images.push(ones[0] + 1);
        }
        Permutation::from_images(&images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `σ(i)` for 1-based `i`.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    pub fn to_matrix(&self, field: FieldSpec) -> Mat {
        let n = self.len();
        let mut m = Mat::zeros(n, n, field);
        for (j, &i) in self.images.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    /// Disjoint cycles (1-based), each starting at its smallest element,
    /// sorted by that element. Fixed points are included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn is_involutory(&self) -> bool {
        self.cycles().iter().all(|c| c.len() <= 2)
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.image(i) == i
    }
}

impl fmt::Display for Permutation {
    /// Canonical cycle string; elements are space separated once any exceeds 9.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.len() > 9 { " " } else { "" };
        for cycle in self.cycles() {
            let parts: Vec<String> = cycle.iter().map(|e| e.to_string()).collect();
            write!(f, "({})", parts.join(sep))?;
        }
        Ok(())
    }
}

/// A permutation with every cycle of length at most two.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvolutoryPermutation(Permutation);

impl InvolutoryPermutation {
    pub fn new(p: Permutation) -> Result<Self> {
        if !p.is_involutory() {
            return Err(Error::NotInvolutory(p.to_string()));
        }
        Ok(InvolutoryPermutation(p))
    }

    pub fn identity(n: usize) -> Self {
        InvolutoryPermutation(Permutation::identity(n))
    }

    pub fn parse_cycles(s: &str, size: usize) -> Result<Self> {
        Self::new(Permutation::parse_cycles(s, size)?)
    }

    pub fn permutation(&self) -> &Permutation {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0.image(i)
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.0.is_fixed(i)
    }

    pub fn to_matrix(&self, field: FieldSpec) -> Mat {
        self.0.to_matrix(field)
    }

    /// `C₁`: diagonal, with a 1 exactly at the fixed points.
    pub fn fixed_point_projector(&self, field: FieldSpec) -> Mat {
        let n = self.len();
        let mut m = Mat::zeros(n, n, field);
        for i in 1..=n {
            if self.is_fixed(i) {
                m.set(i - 1, i - 1, 1);
            }
        }
        m
    }

    /// `Y = I + C − C₁`, which commutes with `C`.
    pub fn commuting_y(&self, field: FieldSpec) -> Mat {
        let n = self.len();
        Mat::identity(n, field)
            .add(&self.to_matrix(field))
            .and_then(|m| m.sub(&self.fixed_point_projector(field)))
            .expect("square matrices of one size and field")
    }
}

impl fmt::Display for InvolutoryPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Whether `a·c == c·a`.
pub fn commutes(a: &Mat, c: &Mat) -> Result<bool> {
    if a.rows() != a.cols() || c.rows() != c.cols() || a.rows() != c.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{} are not square matrices of one size",
            a.rows(),
            a.cols(),
            c.rows(),
            c.cols()
        )));
    }
    Ok(a.mul(c)? == c.mul(a)?)
}
