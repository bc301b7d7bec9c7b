//! Deciding whether a matrix is a scalar linear index code, and decoding.
//!
//! `G` (r×K) is an index code for a fitting matrix `F` (L×K) iff some L×r
//! matrix `D` has `D·G ≈ F`. The constraint decouples by row: row `t` of `D`
//! must combine the rows of `G` into a vector that is 1 at the demanded column
//! and 0 at every `0` of row `t`. Each row is one small affine solve.

use std::collections::BTreeMap;

use rand_core::RngCore;
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, Mat};
use crate::problem::{FittingMatrix, PatternEntry};

/// An r×K encoding matrix; the broadcast for messages `x` is `G·x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeMatrix(Mat);

impl CodeMatrix {
    pub fn new(g: Mat) -> Result<Self> {
        if g.rows() == 0 {
            return Err(Error::DimensionMismatch("a code needs at least one row".into()));
        }
        Ok(CodeMatrix(g))
    }

    pub fn matrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_matrix(self) -> Mat {
        self.0
    }

    /// Code length r.
    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn messages(&self) -> usize {
        self.0.cols()
    }

    pub fn field(&self) -> FieldSpec {
        self.0.field()
    }
}

/// An L×r decoding matrix paired with a code and a fitting matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecodingMatrix(Mat);

impl DecodingMatrix {
    pub fn matrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_matrix(self) -> Mat {
        self.0
    }
}

fn check_messages(g: &CodeMatrix, f: &FittingMatrix) -> Result<()> {
    if g.messages() != f.cols() {
        return Err(Error::DimensionMismatch(format!(
            "code covers {} messages, fitting matrix has {}",
            g.messages(),
            f.cols()
        )));
    }
    Ok(())
}

/// Solves for the decoding row of receiver `row`, if one exists.
pub(crate) fn decoding_row(g: &Mat, f: &FittingMatrix, row: usize) -> Option<Vec<u8>> {
    let demand = f.demand_col(row);
    let constrained: Vec<usize> =
        (0..f.cols()).filter(|&c| c == demand || f.get(row, c) == PatternEntry::Zero).collect();
    let system = g.select_cols(&constrained).transpose();
    let rhs: Vec<u8> = constrained.iter().map(|&c| (c == demand) as u8).collect();
    system.solve_affine(&rhs)
}

/// Finds `D` with `D·G ≈ F`, row by row; `None` if some receiver cannot decode.
pub fn find_decoding(g: &CodeMatrix, f: &FittingMatrix) -> Result<Option<DecodingMatrix>> {
    check_messages(g, f)?;
    let r = g.len();
    let mut data = Vec::with_capacity(f.rows() * r);
    for t in 0..f.rows() {
        match decoding_row(g.matrix(), f, t) {
            Some(d) => data.extend(d),
            None => return Ok(None),
        }
    }
    let d = Mat::from_entries(f.rows(), r, g.field(), data)?;
    Ok(Some(DecodingMatrix(d)))
}

pub fn verify_code(g: &CodeMatrix, f: &FittingMatrix) -> Result<bool> {
    Ok(find_decoding(g, f)?.is_some())
}

/// The transmitted vector `G·x`.
pub fn encode(g: &CodeMatrix, x: &[u8]) -> Result<Vec<u8>> {
    g.matrix().mul_vec(x)
}

/// Recovers one receiver's demand from the broadcast and its side information.
///
/// Returns `d·y − Σ_j (d·G)_j · x_j` over the `X` columns of the fitting row.
/// `side_values` is keyed by 1-based message index.
pub fn receiver_decode(
    d_row: &[u8],
    g: &CodeMatrix,
    y: &[u8],
    side_values: &BTreeMap<usize, u8>,
    row: &[PatternEntry],
) -> Result<u8> {
    if d_row.len() != g.len() || y.len() != g.len() || row.len() != g.messages() {
        return Err(Error::DimensionMismatch(format!(
            "decoding row {}, transmission {}, fitting row {} against a {}x{} code",
            d_row.len(),
            y.len(),
            row.len(),
            g.len(),
            g.messages()
        )));
    }
    let field = g.field();
    let combined = g.matrix().vec_mul(d_row)?;
    let mut value = field.dot(d_row, y);
    for (j, (&coef, &entry)) in combined.iter().zip(row).enumerate() {
        if entry != PatternEntry::Star || coef == 0 {
            continue;
        }
        let known = *side_values.get(&(j + 1)).ok_or(Error::MissingSideValue(j + 1))?;
        value = field.sub(value, field.mul(coef, known));
    }
    Ok(value)
}

/// Outcome of [`simulate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationReport {
    pub trials: usize,
    pub receivers: usize,
    pub failures: usize,
}

/// Reproducible message source: SplitMix64 seeded with `seed`, each symbol
/// drawn as `next_u64() mod p`, message 1 first.
pub struct MessageSource {
    rng: SplitMix64,
    field: FieldSpec,
}

impl MessageSource {
    pub fn new(seed: u64, field: FieldSpec) -> Self {
        MessageSource { rng: <SplitMix64 as rand_core::SeedableRng>::seed_from_u64(seed), field }
    }

    pub fn next_message(&mut self, k: usize) -> Vec<u8> {
        (0..k).map(|_| self.field.reduce(self.rng.next_u64())).collect()
    }
}

/// Runs `trials` encode/decode rounds; every receiver decodes every trial.
pub fn simulate(g: &CodeMatrix, f: &FittingMatrix, trials: usize, seed: u64) -> Result<SimulationReport> {
    let d = find_decoding(g, f)?.ok_or(Error::InvalidSeedCode)?;
    let mut source = MessageSource::new(seed, g.field());
    let mut failures = 0;
    for _ in 0..trials {
        let x = source.next_message(f.cols());
        let y = encode(g, &x)?;
        for t in 0..f.rows() {
            let side: BTreeMap<usize, u8> =
                (0..f.cols()).filter(|&c| f.get(t, c) == PatternEntry::Star).map(|c| (c + 1, x[c])).collect();
            let got = receiver_decode(d.matrix().row(t), g, &y, &side, f.row(t))?;
            if got != x[f.demand_col(t)] {
                failures += 1;
            }
        }
    }
    Ok(SimulationReport { trials, receivers: f.rows(), failures })
}
