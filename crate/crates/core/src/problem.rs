//! Fitting matrices, X-fitting matrices and index coding problems.
//!
//! Grid positions passed to accessors are 0-based `(row, col)` pairs. Message
//! indices stored in an [`IcProblem`] are 1-based, as are the row and column
//! numbers reported in errors and text formats.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, Mat};

/// One cell of a fitting matrix: `0`, `1`, or the placeholder `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternEntry {
    Zero,
    One,
    Star,
}

impl PatternEntry {
    fn token(self) -> char {
        match self {
            PatternEntry::Zero => '0',
            PatternEntry::One => '1',
            PatternEntry::Star => 'X',
        }
    }
}

/// An unchecked L×K grid of pattern entries.
///
/// This is the raw form read from text; [`FittingMatrix`] and [`XPattern`]
/// are the validated views.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    rows: usize,
    cols: usize,
    grid: Vec<PatternEntry>,
}

impl Pattern {
    pub fn new(rows: usize, cols: usize, grid: Vec<PatternEntry>) -> Result<Self> {
        if grid.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} pattern", grid.len())));
        }
        Ok(Pattern { rows, cols, grid })
    }

    pub fn filled(rows: usize, cols: usize, entry: PatternEntry) -> Self {
        Pattern { rows, cols, grid: vec![entry; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> PatternEntry {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        self.grid[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: PatternEntry) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        self.grid[r * self.cols + c] = e;
    }

    pub fn row(&self, r: usize) -> &[PatternEntry] {
        &self.grid[r * self.cols..(r + 1) * self.cols]
    }

    /// The `rows × cols` block anchored at the top-left corner.
    pub fn top_left(&self, rows: usize, cols: usize) -> Option<Pattern> {
        if rows > self.rows || cols > self.cols {
            return None;
        }
        let grid = (0..rows).flat_map(|r| self.row(r)[..cols].iter().copied()).collect();
        Some(Pattern { rows, cols, grid })
    }

    /// Assembles a block matrix from a grid of equally shaped blocks.
    pub fn from_blocks(blocks: &[Vec<&Pattern>]) -> Result<Pattern> {
        let first = blocks
            .first()
            .and_then(|row| row.first())
            .ok_or_else(|| Error::DimensionMismatch("empty block grid".into()))?;
        let (br, bc) = (first.rows, first.cols);
        let width = blocks[0].len();
        if blocks.iter().any(|row| row.len() != width || row.iter().any(|b| b.rows != br || b.cols != bc)) {
            return Err(Error::DimensionMismatch("blocks must share one shape".into()));
        }
        let rows = br * blocks.len();
        let cols = bc * width;
        let mut grid = Vec::with_capacity(rows * cols);
        for block_row in blocks {
            for r in 0..br {
                for b in block_row {
                    grid.extend_from_slice(b.row(r));
                }
            }
        }
        Ok(Pattern { rows, cols, grid })
    }

    fn count(&self, e: PatternEntry) -> usize {
        self.grid.iter().filter(|&&g| g == e).count()
    }

    pub fn star_count(&self) -> usize {
        self.count(PatternEntry::Star)
    }
}

impl fmt::Display for Pattern {
    /// Text format: `L K` on the first line, then L lines of K tokens from `{0,1,X}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|e| e.token().to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty fitting matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("header must be \"L K\", got {header:?}")));
        };
        let mut grid = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", r + 1)))?;
            let before = grid.len();
            for t in line.split_whitespace() {
                grid.push(match t {
                    "0" => PatternEntry::Zero,
                    "1" => PatternEntry::One,
                    "X" | "x" => PatternEntry::Star,
                    _ => return Err(Error::Parse(format!("bad token {t:?} in row {}", r + 1))),
                });
            }
            if grid.len() - before != cols {
                return Err(Error::Parse(format!("row {} has {} tokens, expected {cols}", r + 1, grid.len() - before)));
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing data after the last row".into()));
        }
        Pattern::new(rows, cols, grid)
    }
}

/// Checks that every row holds exactly one `1` and every column holds at least one.
pub fn validate(p: &Pattern) -> Result<()> {
    let mut covered = vec![false; p.cols];
    for r in 0..p.rows {
        let ones: Vec<usize> = (0..p.cols).filter(|&c| p.get(r, c) == PatternEntry::One).collect();
        if ones.len() != 1 {
            return Err(Error::RowOneCount { row: r + 1, count: ones.len() });
        }
        covered[ones[0]] = true;
    }
    if let Some(c) = covered.iter().position(|&v| !v) {
        return Err(Error::ColumnUncovered(c + 1));
    }
    Ok(())
}

/// A validated fitting matrix: one `1` per row, every column demanded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FittingMatrix {
    pattern: Pattern,
    demands: Vec<usize>,
}

impl FittingMatrix {
    pub fn new(pattern: Pattern) -> Result<Self> {
        validate(&pattern)?;
        let demands = (0..pattern.rows)
            .map(|r| pattern.row(r).iter().position(|&e| e == PatternEntry::One).expect("validated"))
            .collect();
        Ok(FittingMatrix { pattern, demands })
    }

    /// The fitting matrix of a problem with no side information.
    pub fn identity(k: usize) -> Self {
        let mut p = Pattern::filled(k, k, PatternEntry::Zero);
        for i in 0..k {
            p.set(i, i, PatternEntry::One);
        }
        FittingMatrix::new(p).expect("identity pattern is valid")
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn rows(&self) -> usize {
        self.pattern.rows
    }

    pub fn cols(&self) -> usize {
        self.pattern.cols
    }

    pub fn get(&self, r: usize, c: usize) -> PatternEntry {
        self.pattern.get(r, c)
    }

    pub fn row(&self, r: usize) -> &[PatternEntry] {
        self.pattern.row(r)
    }

    /// 0-based column of the `1` in row `r`.
    pub fn demand_col(&self, r: usize) -> usize {
        self.demands[r]
    }

    /// Replaces every `1` by `X`.
    pub fn x_relax(&self) -> XPattern {
        XPattern::relax(&self.pattern)
    }

    /// Adds side information: each listed 0-based position becomes `X`.
    /// Positions already holding `X` are left alone; a `1` cannot be widened.
    pub fn with_stars(&self, positions: &[(usize, usize)]) -> Result<FittingMatrix> {
        let mut p = self.pattern.clone();
        for &(r, c) in positions {
            if r >= p.rows || c >= p.cols {
                return Err(Error::DimensionMismatch(format!(
                    "position ({}, {}) outside a {}x{} fitting matrix",
                    r + 1,
                    c + 1,
                    p.rows,
                    p.cols
                )));
            }
            if p.get(r, c) == PatternEntry::One {
                return Err(Error::InvalidProblem(format!(
                    "row {} column {} is a demand and cannot become side information",
                    r + 1,
                    c + 1
                )));
            }
            p.set(r, c, PatternEntry::Star);
        }
        FittingMatrix::new(p)
    }

    pub fn to_problem(&self, field: FieldSpec) -> IcProblem {
        let receivers = (0..self.rows())
            .map(|r| Receiver {
                demand: self.demands[r] + 1,
                side: (0..self.cols()).filter(|&c| self.get(r, c) == PatternEntry::Star).map(|c| c + 1).collect(),
            })
            .collect();
        IcProblem { k: self.cols(), field, receivers }
    }

    pub fn from_problem(problem: &IcProblem) -> Result<Self> {
        problem.validate()?;
        let mut p = Pattern::filled(problem.receivers.len(), problem.k, PatternEntry::Zero);
        for (r, rx) in problem.receivers.iter().enumerate() {
            p.set(r, rx.demand - 1, PatternEntry::One);
            for &s in &rx.side {
                p.set(r, s - 1, PatternEntry::Star);
            }
        }
        FittingMatrix::new(p)
    }
}

impl fmt::Display for FittingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.pattern.fmt(f)
    }
}

impl FromStr for FittingMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FittingMatrix::new(s.parse()?)
    }
}

/// A pattern over `{0, X}` only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XPattern {
    pattern: Pattern,
}

impl XPattern {
    pub fn new(pattern: Pattern) -> Result<Self> {
        for r in 0..pattern.rows {
            if let Some(c) = pattern.row(r).iter().position(|&e| e == PatternEntry::One) {
                return Err(Error::OneInXPattern { row: r + 1, col: c + 1 });
            }
        }
        Ok(XPattern { pattern })
    }

    /// Turns every `1` of an arbitrary pattern into `X`.
    pub fn relax(p: &Pattern) -> XPattern {
        let grid = p.grid.iter().map(|&e| if e == PatternEntry::One { PatternEntry::Star } else { e }).collect();
        XPattern { pattern: Pattern { rows: p.rows, cols: p.cols, grid } }
    }

    /// The smallest X-pattern admitting `m`: `X` exactly where `m` is nonzero.
    pub fn support_of(m: &Mat) -> XPattern {
        let grid = m.entries().iter().map(|&e| if e == 0 { PatternEntry::Zero } else { PatternEntry::Star }).collect();
        XPattern { pattern: Pattern { rows: m.rows(), cols: m.cols(), grid } }
    }

    pub fn all_star(rows: usize, cols: usize) -> XPattern {
        XPattern { pattern: Pattern::filled(rows, cols, PatternEntry::Star) }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn into_pattern(self) -> Pattern {
        self.pattern
    }

    pub fn rows(&self) -> usize {
        self.pattern.rows
    }

    pub fn cols(&self) -> usize {
        self.pattern.cols
    }

    pub fn get(&self, r: usize, c: usize) -> PatternEntry {
        self.pattern.get(r, c)
    }
}

impl fmt::Display for XPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.pattern.fmt(f)
    }
}

impl FromStr for XPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        XPattern::new(s.parse()?)
    }
}

fn check_shape(m: &Mat, p: &Pattern) -> Result<()> {
    if m.rows() != p.rows || m.cols() != p.cols {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix against a {}x{} pattern",
            m.rows(),
            m.cols(),
            p.rows,
            p.cols
        )));
    }
    Ok(())
}

/// `m ≈ f` with demand entries pinned: 0 at every `0`, exactly 1 at every `1`.
pub fn fits(m: &Mat, f: &FittingMatrix) -> Result<bool> {
    check_shape(m, &f.pattern)?;
    Ok(m.entries().iter().zip(&f.pattern.grid).all(|(&v, &e)| match e {
        PatternEntry::Zero => v == 0,
        PatternEntry::One => v == 1,
        PatternEntry::Star => true,
    }))
}

/// `m ≈ x`: `m` vanishes wherever `x` has a `0`.
pub fn fits_x(m: &Mat, x: &XPattern) -> Result<bool> {
    check_shape(m, &x.pattern)?;
    Ok(m.entries().iter().zip(&x.pattern.grid).all(|(&v, &e)| e != PatternEntry::Zero || v == 0))
}

/// One demand at one receiver.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Receiver {
    pub demand: usize,
    pub side: BTreeSet<usize>,
}

/// An index coding problem with 1-based message indices.
///
/// A receiver with several demands is represented by several entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IcProblem {
    pub k: usize,
    pub field: FieldSpec,
    pub receivers: Vec<Receiver>,
}

#[derive(Serialize, Deserialize)]
struct IcProblemJson {
    #[serde(rename = "K")]
    k: usize,
    p: u32,
    receivers: Vec<Receiver>,
}

impl IcProblem {
    pub fn validate(&self) -> Result<()> {
        let mut demanded = vec![false; self.k];
        for (t, rx) in self.receivers.iter().enumerate() {
            let t = t + 1;
            if rx.demand == 0 || rx.demand > self.k {
                return Err(Error::InvalidProblem(format!(
                    "receiver {t} demands message {} outside 1..={}",
                    rx.demand, self.k
                )));
            }
            if let Some(&s) = rx.side.iter().find(|&&s| s == 0 || s > self.k) {
                return Err(Error::InvalidProblem(format!("receiver {t} has side message {s} outside 1..={}", self.k)));
            }
            if rx.side.contains(&rx.demand) {
                return Err(Error::InvalidProblem(format!("receiver {t} already knows its demand {}", rx.demand)));
            }
            demanded[rx.demand - 1] = true;
        }
        if let Some(m) = demanded.iter().position(|&d| !d) {
            return Err(Error::InvalidProblem(format!("message {} is never demanded", m + 1)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let raw = IcProblemJson { k: self.k, p: self.field.modulus() as u32, receivers: self.receivers.clone() };
        let mut s = serde_json::to_string_pretty(&raw).expect("problem serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: IcProblemJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let problem = IcProblem { k: raw.k, field: FieldSpec::new(raw.p)?, receivers: raw.receivers };
        problem.validate()?;
        Ok(problem)
    }
}
