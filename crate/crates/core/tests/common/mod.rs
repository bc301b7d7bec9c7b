#![allow(dead_code)]

use std::path::PathBuf;

use icext_core::{
    CodeMatrix, FieldSpec, FittingMatrix, InvolutoryPermutation, Mat, Pattern, PatternEntry, Permutation,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const GF2: FieldSpec = FieldSpec::GF2;

/// Cells of the example1 fitting matrix (1-based row, column) that go beyond
/// the generated minimal side information.
pub const WIDENED: [(usize, usize); 6] = [(2, 10), (4, 2), (5, 12), (6, 7), (8, 10), (11, 6)];

pub fn data(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn example1() -> (FittingMatrix, CodeMatrix) {
    let f = data("example1.fx").parse().unwrap();
    let g = CodeMatrix::new(data("example1.code").parse().unwrap()).unwrap();
    (f, g)
}

/// Uniform-ish random fitting matrix: a random surjection of rows onto
/// demanded columns, every other cell a Star with probability `star_p`.
pub fn random_fitting(rng: &mut StdRng, max_rows: usize, max_cols: usize, star_p: f64) -> FittingMatrix {
    let k = rng.gen_range(1..=max_cols);
    let l = rng.gen_range(k..=max_rows.max(k));
    let mut demands: Vec<usize> = (0..k).collect();
    demands.extend((k..l).map(|_| rng.gen_range(0..k)));
    demands.shuffle(rng);
    let mut p = Pattern::filled(l, k, PatternEntry::Zero);
    for (r, &d) in demands.iter().enumerate() {
        for c in 0..k {
            if c == d {
                p.set(r, c, PatternEntry::One);
            } else if rng.gen_bool(star_p) {
                p.set(r, c, PatternEntry::Star);
            }
        }
    }
    FittingMatrix::new(p).unwrap()
}

pub fn random_involution(rng: &mut StdRng, n: usize) -> InvolutoryPermutation {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut images: Vec<usize> = (1..=n).collect();
    for pair in order.chunks_exact(2).take(rng.gen_range(0..=n / 2)) {
        images[pair[0] - 1] = pair[1];
        images[pair[1] - 1] = pair[0];
    }
    InvolutoryPermutation::new(Permutation::from_images(&images).unwrap()).unwrap()
}

pub fn random_full_rank(rng: &mut StdRng, r: usize, k: usize) -> Mat {
    loop {
        let data: Vec<u8> = (0..r * k).map(|_| rng.gen_range(0..2)).collect();
        let m = Mat::from_entries(r, k, GF2, data).unwrap();
        if bit_rank(&m) == r {
            return m;
        }
    }
}

/// Rank over GF(2) by elimination on bit masks, independent of the library.
pub fn bit_rank(m: &Mat) -> usize {
    let mut rows: Vec<u64> = (0..m.rows())
        .map(|r| (0..m.cols()).filter(|&c| m.get(r, c) & 1 == 1).fold(0u64, |acc, c| acc | 1 << c))
        .collect();
    let mut rank = 0;
    for bit in 0..m.cols() {
        if let Some(i) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) {
            rows.swap(rank, i);
            let pivot = rows[rank];
            for (j, row) in rows.iter_mut().enumerate() {
                if j != rank && *row >> bit & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Minrank over GF(2) as the least rank among all completions of the Stars.
pub fn completion_minrank(f: &FittingMatrix) -> usize {
    let (l, k) = (f.rows(), f.cols());
    let stars: Vec<(usize, usize)> =
        (0..l).flat_map(|r| (0..k).map(move |c| (r, c))).filter(|&(r, c)| f.get(r, c) == PatternEntry::Star).collect();
    assert!(stars.len() <= 20, "too many stars for completion search");
    let mut base = Mat::zeros(l, k, GF2);
    for r in 0..l {
        base.set(r, f.demand_col(r), 1);
    }
    let mut best = usize::MAX;
    for mask in 0u32..1 << stars.len() {
        let mut m = base.clone();
        for (b, &(r, c)) in stars.iter().enumerate() {
            m.set(r, c, (mask >> b & 1) as u8);
        }
        best = best.min(bit_rank(&m));
    }
    best
}

/// Number of `k`-dimensional subspaces of GF(2)^n from the product formula.
pub fn subspace_count(n: u32, k: u32) -> u128 {
    let num: u128 = (0..k).map(|i| (1u128 << (n - i)) - 1).product();
    let den: u128 = (0..k).map(|i| (1u128 << (k - i)) - 1).product();
    num / den
}
