//! Rank-invariant extensions of an index coding problem.
//!
//! Every construction returns an extended fitting matrix that contains the
//! seed in its top-left corner together with a verified code of the seed's
//! length. When the seed code is optimal, the extension therefore has the
//! same minrank as the seed (see [`crate::minrank::certify_rank_invariance`]).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf::Mat;
use crate::involution::{commutes, InvolutoryPermutation};
use crate::problem::{FittingMatrix, Pattern, PatternEntry, XPattern};
use crate::verifier::{find_decoding, verify_code, CodeMatrix};

/// Disjoint, equally sized column blocks `I_1, …, I_T` (1-based message indices).
///
/// Position `q` within a block is its `q`-th listed column; a block need not
/// be contiguous or sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    blocks: Vec<Vec<usize>>,
}

impl BlockLayout {
    pub fn new(blocks: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let mut seen = BTreeSet::new();
        if let Some(first) = blocks.first() {
            if first.is_empty() {
                return Err(Error::InvalidLayout("blocks must be nonempty".into()));
            }
            if let Some(i) = blocks.iter().position(|b| b.len() != first.len()) {
                return Err(Error::InvalidLayout(format!(
                    "block {} has {} columns, block 1 has {}",
                    i + 1,
                    blocks[i].len(),
                    first.len()
                )));
            }
        }
        for &c in blocks.iter().flatten() {
            if c == 0 || c > k {
                return Err(Error::InvalidLayout(format!("column {c} outside 1..={k}")));
            }
            if !seen.insert(c) {
                return Err(Error::InvalidLayout(format!("column {c} appears in two blocks")));
            }
        }
        Ok(BlockLayout { blocks })
    }

    pub fn empty() -> Self {
        BlockLayout { blocks: Vec::new() }
    }

    /// `T` blocks of `r` consecutive columns starting at column 1.
    pub fn consecutive(r: usize, t: usize) -> Self {
        BlockLayout { blocks: (0..t).map(|i| (i * r + 1..=(i + 1) * r).collect()).collect() }
    }

    /// Parses `1-3,4-6`-style layouts: blocks separated by `,`, each block a
    /// `+`-joined list of columns `a` or inclusive ranges `a-b`.
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return BlockLayout::new(Vec::new(), k);
        }
        let bad = |t: &str| Error::InvalidLayout(format!("cannot read {t:?}"));
        let mut blocks = Vec::new();
        for block in s.split(',') {
            let mut cols = Vec::new();
            for piece in block.split('+').map(str::trim) {
                match piece.split_once('-') {
                    Some((a, b)) => {
                        let a: usize = a.trim().parse().map_err(|_| bad(piece))?;
                        let b: usize = b.trim().parse().map_err(|_| bad(piece))?;
                        if a > b {
                            return Err(bad(piece));
                        }
                        cols.extend(a..=b);
                    }
                    None => cols.push(piece.parse().map_err(|_| bad(piece))?),
                }
            }
            blocks.push(cols);
        }
        BlockLayout::new(blocks, k)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_size(&self) -> Option<usize> {
        self.blocks.first().map(Vec::len)
    }

    /// Columns outside every block, ascending.
    pub fn residual(&self, k: usize) -> Vec<usize> {
        let used: BTreeSet<usize> = self.blocks.iter().flatten().copied().collect();
        (1..=k).filter(|c| !used.contains(c)).collect()
    }
}

/// An extended problem with its code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionResult {
    pub f_ext: FittingMatrix,
    pub g_ext: CodeMatrix,
    /// Off-diagonal X-fitting block of a 2-order extension.
    pub b: Option<XPattern>,
    /// The seed code the extension was built from (row-reduced for the systematic construction).
    pub seed: CodeMatrix,
}

fn require_code(g: &CodeMatrix, f: &FittingMatrix) -> Result<()> {
    if !verify_code(g, f)? {
        return Err(Error::InvalidSeedCode);
    }
    Ok(())
}

/// `m` copies of the seed on the diagonal, `F^X` elsewhere, code `(G|G|…|G)`.
pub fn replicate_extension(f: &FittingMatrix, g: &CodeMatrix, m: usize) -> Result<ExtensionResult> {
    if m == 0 {
        return Err(Error::DimensionMismatch("replication order must be at least 1".into()));
    }
    require_code(g, f)?;
    let relaxed = f.x_relax();
    let grid: Vec<Vec<&Pattern>> =
        (0..m).map(|i| (0..m).map(|j| if i == j { f.pattern() } else { relaxed.pattern() }).collect()).collect();
    let f_ext = FittingMatrix::new(Pattern::from_blocks(&grid)?)?;
    let mut g_ext = g.matrix().clone();
    for _ in 1..m {
        g_ext = g_ext.hstack(g.matrix())?;
    }
    finish(f_ext, CodeMatrix::new(g_ext)?, None, g.clone())
}

fn finish(f_ext: FittingMatrix, g_ext: CodeMatrix, b: Option<XPattern>, seed: CodeMatrix) -> Result<ExtensionResult> {
    if !verify_code(&g_ext, &f_ext)? {
        return Err(Error::ExtensionUnverified);
    }
    Ok(ExtensionResult { f_ext, g_ext, b, seed })
}

/// Assembles `(F B; B F)` with code `(G CG)` and verifies it.
fn two_order(f: &FittingMatrix, b: XPattern, g: &CodeMatrix, c: &Mat) -> Result<ExtensionResult> {
    let grid = [vec![f.pattern(), b.pattern()], vec![b.pattern(), f.pattern()]];
    let f_ext = FittingMatrix::new(Pattern::from_blocks(&grid)?)?;
    let g_ext = CodeMatrix::new(g.matrix().hstack(&c.mul(g.matrix())?)?)?;
    finish(f_ext, g_ext, Some(b), g.clone())
}

fn require_involutory(c: &Mat, r: usize) -> Result<()> {
    if c.rows() != r || c.cols() != r {
        return Err(Error::DimensionMismatch(format!("C is {}x{}, the code has {r} rows", c.rows(), c.cols())));
    }
    if !c.mul(c)?.is_identity() {
        return Err(Error::MatrixNotInvolutory);
    }
    Ok(())
}

/// The general 2-order construction for any involutory `C`.
///
/// `B` is the smallest X-fitting matrix admitted by `D·C·G`, with `D` the
/// decoding matrix returned by [`find_decoding`]. Any pattern with more `X`s
/// also works; callers may widen it.
pub fn derive_bxx(f: &FittingMatrix, g: &CodeMatrix, c: &Mat) -> Result<ExtensionResult> {
    require_involutory(c, g.len())?;
    let d = find_decoding(g, f)?.ok_or(Error::InvalidSeedCode)?;
    let dcg = d.matrix().mul(c)?.mul(g.matrix())?;
    two_order(f, XPattern::support_of(&dcg), g, c)
}

/// `B` for the block construction: permute each block's columns by `σ_C`,
/// turn the columns outside all blocks into `X`, then turn every `1` into `X`.
pub fn structured_bxx(f: &FittingMatrix, layout: &BlockLayout, c: &InvolutoryPermutation) -> Result<XPattern> {
    if let Some(r) = layout.block_size() {
        if r != c.len() {
            return Err(Error::InvalidLayout(format!("blocks of size {r} with a permutation of size {}", c.len())));
        }
    }
    let k = f.cols();
    if let Some(&c) = layout.blocks().iter().flatten().find(|&&c| c > k) {
        return Err(Error::InvalidLayout(format!("column {c} outside 1..={k}")));
    }
    let mut p = f.pattern().clone();
    for block in layout.blocks() {
        for row in 0..f.rows() {
            for (q, &col) in block.iter().enumerate() {
                // Right multiplication by C moves column σ(q) of the block to position q.
                let src = block[c.image(q + 1) - 1];
                p.set(row, col - 1, f.get(row, src - 1));
            }
        }
    }
    for col in layout.residual(k) {
        for row in 0..f.rows() {
            p.set(row, col - 1, PatternEntry::Star);
        }
    }
    Ok(XPattern::relax(&p))
}

/// The block construction: each `r×r` block of `G` on the layout must commute with `C`.
pub fn involutory_block_extension(
    f: &FittingMatrix,
    g: &CodeMatrix,
    layout: &BlockLayout,
    c: &InvolutoryPermutation,
) -> Result<ExtensionResult> {
    if c.len() != g.len() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of size {} for a code with {} rows",
            c.len(),
            g.len()
        )));
    }
    require_code(g, f)?;
    let b = structured_bxx(f, layout, c)?;
    let cm = c.to_matrix(g.field());
    for (i, block) in layout.blocks().iter().enumerate() {
        let cols: Vec<usize> = block.iter().map(|c| c - 1).collect();
        if !commutes(&g.matrix().select_cols(&cols), &cm)? {
            return Err(Error::CommutationViolation(i + 1));
        }
    }
    two_order(f, b, g, &cm)
}

/// Row-reduces any full-row-rank code so its first independent columns form
/// `I`, then applies the block construction with that single block.
pub fn systematic_extension(
    f: &FittingMatrix,
    g_any: &CodeMatrix,
    c: &InvolutoryPermutation,
) -> Result<ExtensionResult> {
    let (rows, rank) = (g_any.len(), g_any.matrix().rank());
    if rank != rows {
        return Err(Error::RankDeficient { rank, rows });
    }
    let (_, pivots) = g_any.matrix().rref();
    let inv = g_any.matrix().select_cols(&pivots).inverse().expect("pivot columns are independent");
    let g = CodeMatrix::new(inv.mul(g_any.matrix())?)?;
    let layout = BlockLayout::new(vec![pivots.iter().map(|p| p + 1).collect()], f.cols())?;
    involutory_block_extension(f, &g, &layout, c)
}

/// Finds an involutory `C` with `C·G = A`, given that `(G A; A G)` has the rank of `G`.
///
/// Returns `None` when the stacked matrix has larger rank.
pub fn recover_involution(g: &CodeMatrix, a: &Mat) -> Result<Option<Mat>> {
    let gm = g.matrix();
    if a.rows() != gm.rows() || a.cols() != gm.cols() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, G is {}x{}",
            a.rows(),
            a.cols(),
            gm.rows(),
            gm.cols()
        )));
    }
    let r = gm.rows();
    let rank = gm.rank();
    if rank != r {
        return Err(Error::RankDeficient { rank, rows: r });
    }
    let top = gm.hstack(a)?;
    let bottom = a.hstack(gm)?;
    if top.vstack(&bottom)?.rank() != r {
        return Ok(None);
    }
    // Row j of C solves c_j·(G A) = (a_j g_j).
    let system = top.transpose();
    let mut data = Vec::with_capacity(r * r);
    for j in 0..r {
        match system.solve_affine(bottom.row(j)) {
            Some(row) => data.extend(row),
            None => return Ok(None),
        }
    }
    let c = Mat::from_entries(r, r, gm.field(), data)?;
    if !c.mul(&c)?.is_identity() || c.mul(gm)? != *a {
        return Ok(None);
    }
    Ok(Some(c))
}
