//! Exact minrank by exhaustive subspace enumeration.
//!
//! A fitting matrix admits an r-row code iff some r-dimensional subspace of
//! GF(p)^K contains, for every receiver, a vector that is 1 on the demand and
//! 0 on the receiver's unknown messages. Each subspace is visited once through
//! its unique reduced row echelon basis: pivot sets in lexicographic order,
//! then the free entries as an odometer whose last position turns fastest.
//! The first feasible basis in that order is the witness.
//!
//! Over GF(2) with K <= 64 rows are packed into `u64` and, for each candidate,
//! the whole span (2^r vectors) is checked against every receiver's mask.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, Mat};
use crate::problem::{FittingMatrix, PatternEntry};
use crate::verifier::{decoding_row, find_decoding, verify_code, CodeMatrix};

/// Search limits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinrankConfig {
    /// Largest number of r-dimensional subspaces a single rank may enumerate.
    pub guard: u128,
    /// Worker threads; 1 runs on the calling thread.
    pub workers: usize,
    /// Stop after this code length instead of K.
    pub max_rank: Option<usize>,
}

impl Default for MinrankConfig {
    fn default() -> Self {
        MinrankConfig { guard: 1_000_000_000, workers: 1, max_rank: None }
    }
}

/// Exhaustive infeasibility record for one code length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    pub subspaces_examined: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinrankResult {
    pub value: usize,
    pub witness: CodeMatrix,
    /// One entry per r < value, in increasing r.
    pub certificate: Vec<RankCertificate>,
}

/// Number of k-dimensional subspaces of GF(q)^n, saturating at `u128::MAX`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        let top = q.checked_pow((n - i) as u32).map(|v| v - 1);
        let bottom = q.checked_pow((i + 1) as u32).map(|v| v - 1);
        match (top.and_then(|t| num.checked_mul(t)), bottom.and_then(|b| den.checked_mul(b))) {
            (Some(n2), Some(d2)) => {
                // Keep the running fraction reduced so intermediate products stay small.
                let g = gcd(n2, d2);
                num = n2 / g;
                den = d2 / g;
            }
            _ => return u128::MAX,
        }
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lexicographically next r-subset of `0..n`, in place.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let r = c.len();
    let Some(i) = (0..r).rev().find(|&i| c[i] < n - r + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..r {
        c[j] = c[j - 1] + 1;
    }
    true
}

fn pivot_sets(k: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..r).collect();
    loop {
        out.push(c.clone());
        if !next_combination(&mut c, k) {
            return out;
        }
    }
}

/// Free (row, col) positions of an RREF basis with the given pivot columns.
fn free_positions(k: usize, pivots: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        for c in p + 1..k {
            if !pivots.contains(&c) {
                out.push((i, c));
            }
        }
    }
    out
}

/// Every r-dimensional subspace of GF(p)^k, as its RREF basis, in canonical order.
pub struct SubspaceBases {
    k: usize,
    field: FieldSpec,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    current: Option<Mat>,
    single_set: bool,
}

impl SubspaceBases {
    pub fn new(k: usize, r: usize, field: FieldSpec) -> Self {
        assert!(r <= k, "subspace dimension exceeds ambient dimension");
        Self::start(k, (0..r).collect(), field, false)
    }

    /// Only the subspaces whose RREF basis has exactly these pivot columns.
    pub fn with_pivots(k: usize, pivots: Vec<usize>, field: FieldSpec) -> Self {
        Self::start(k, pivots, field, true)
    }

    fn start(k: usize, pivots: Vec<usize>, field: FieldSpec, single_set: bool) -> Self {
        let free = free_positions(k, &pivots);
        let mut m = Mat::zeros(pivots.len(), k, field);
        for (i, &p) in pivots.iter().enumerate() {
            m.set(i, p, 1);
        }
        SubspaceBases { k, field, pivots, free, current: Some(m), single_set }
    }

    fn advance(&mut self) {
        let Some(m) = self.current.as_mut() else { return };
        let p = self.field.modulus();
        for &(i, c) in self.free.iter().rev() {
            let v = m.get(i, c) + 1;
            if v < p {
                m.set(i, c, v);
                return;
            }
            m.set(i, c, 0);
        }
        if self.single_set || !next_combination(&mut self.pivots, self.k) {
            self.current = None;
            return;
        }
        *self = Self::start(self.k, std::mem::take(&mut self.pivots), self.field, false);
    }
}

impl Iterator for SubspaceBases {
    type Item = Mat;

    fn next(&mut self) -> Option<Mat> {
        let out = self.current.clone()?;
        self.advance();
        Some(out)
    }
}

/// Receiver constraints packed as bit masks for the GF(2) kernel.
struct MaskConstraints {
    /// `(mask, want)`: a span vector `v` serves the receiver iff `v & mask == want`.
    rows: Vec<(u64, u64)>,
}

impl MaskConstraints {
    fn new(f: &FittingMatrix) -> Self {
        let mut rows: Vec<(u64, u64)> = Vec::new();
        for t in 0..f.rows() {
            let want = 1u64 << f.demand_col(t);
            let zeros = (0..f.cols()).filter(|&c| f.get(t, c) == PatternEntry::Zero).fold(0u64, |acc, c| acc | 1 << c);
            if !rows.contains(&(zeros | want, want)) {
                rows.push((zeros | want, want));
            }
        }
        MaskConstraints { rows }
    }
}

struct SetOutcome {
    found: Option<Mat>,
    examined: u128,
}

const CANCEL_CHECK_INTERVAL: u64 = 1 << 12;

fn search_set_gf2(
    k: usize,
    pivots: &[usize],
    constraints: &MaskConstraints,
    cancelled: &dyn Fn() -> bool,
) -> SetOutcome {
    let r = pivots.len();
    let free = free_positions(k, pivots);
    let mut rows: Vec<u64> = pivots.iter().map(|&p| 1u64 << p).collect();
    let mut span = vec![0u64; 1 << r];
    let total: u64 = 1 << free.len();
    let mut n: u64 = 0;
    loop {
        for i in 1..span.len() {
            span[i] = span[i & (i - 1)] ^ rows[i.trailing_zeros() as usize];
        }
        let feasible = constraints.rows.iter().all(|&(mask, want)| span.iter().any(|&v| v & mask == want));
        if feasible {
            let data =
                (0..r).flat_map(|i| (0..k).map(move |c| (i, c))).map(|(i, c)| (rows[i] >> c & 1) as u8).collect();
            let m = Mat::from_entries(r, k, FieldSpec::GF2, data).expect("binary entries");
            return SetOutcome { found: Some(m), examined: n as u128 + 1 };
        }
        if n + 1 == total {
            return SetOutcome { found: None, examined: total as u128 };
        }
        if n.is_multiple_of(CANCEL_CHECK_INTERVAL) && cancelled() {
            return SetOutcome { found: None, examined: n as u128 + 1 };
        }
        // Bit b of the counter drives free position `len - 1 - b`.
        let flips = n ^ (n + 1);
        n += 1;
        for b in 0..=flips.trailing_ones().min(63) as usize {
            if flips >> b & 1 == 1 {
                let (i, c) = free[free.len() - 1 - b];
                rows[i] ^= 1 << c;
            }
        }
    }
}

fn feasible_generic(basis: &Mat, f: &FittingMatrix) -> bool {
    (0..f.rows()).all(|t| decoding_row(basis, f, t).is_some())
}

fn search_set_generic(
    k: usize,
    pivots: &[usize],
    field: FieldSpec,
    f: &FittingMatrix,
    cancelled: &dyn Fn() -> bool,
) -> SetOutcome {
    let mut examined: u128 = 0;
    for basis in SubspaceBases::with_pivots(k, pivots.to_vec(), field) {
        examined += 1;
        if feasible_generic(&basis, f) {
            return SetOutcome { found: Some(basis), examined };
        }
        if examined.is_multiple_of(CANCEL_CHECK_INTERVAL as u128) && cancelled() {
            break;
        }
    }
    SetOutcome { found: None, examined }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kernel {
    Auto,
    #[cfg_attr(not(test), allow(dead_code))]
    Generic,
}

struct Search {
    found: Option<CodeMatrix>,
    examined: u128,
}

fn search_rank(
    f: &FittingMatrix,
    field: FieldSpec,
    r: usize,
    config: &MinrankConfig,
    kernel: Kernel,
) -> Result<Search> {
    let k = f.cols();
    if r == 0 || r > k {
        return Err(Error::RankOutOfRange { r, k });
    }
    let count = gaussian_binomial(k, r, field.modulus() as u64);
    if count > config.guard {
        return Err(Error::ResourceGuard { r, count, ceiling: config.guard });
    }
    let packed = (kernel == Kernel::Auto && field == FieldSpec::GF2 && k <= 64 && r <= 20 && r * (k - r) < 63)
        .then(|| MaskConstraints::new(f));
    let run_set = |pivots: &[usize], cancelled: &dyn Fn() -> bool| match &packed {
        Some(c) => search_set_gf2(k, pivots, c, cancelled),
        None => search_set_generic(k, pivots, field, f, cancelled),
    };
    let sets = pivot_sets(k, r);

    let outcomes: Vec<SetOutcome> = if config.workers <= 1 {
        let mut out = Vec::new();
        for set in &sets {
            let o = run_set(set, &|| false);
            let done = o.found.is_some();
            out.push(o);
            if done {
                break;
            }
        }
        out
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidProblem(format!("cannot start worker pool: {e}")))?;
        let best = AtomicUsize::new(usize::MAX);
        pool.install(|| {
            sets.par_iter()
                .enumerate()
                .map(|(idx, set)| {
                    if best.load(Ordering::Relaxed) < idx {
                        return SetOutcome { found: None, examined: 0 };
                    }
                    let o = run_set(set, &|| best.load(Ordering::Relaxed) < idx);
                    if o.found.is_some() {
                        best.fetch_min(idx, Ordering::Relaxed);
                    }
                    o
                })
                .collect()
        })
    };

    // Sets before the first hit always run to completion, so the count is exact.
    let mut examined = 0;
    for o in outcomes {
        examined += o.examined;
        if let Some(m) = o.found {
            let witness = CodeMatrix::new(m)?;
            debug_assert!(find_decoding(&witness, f)?.is_some());
            return Ok(Search { found: Some(witness), examined });
        }
    }
    Ok(Search { found: None, examined })
}

/// The first code (in canonical order) of length `r` for `f`, if any exists.
pub fn is_achievable(
    f: &FittingMatrix,
    field: FieldSpec,
    r: usize,
    config: &MinrankConfig,
) -> Result<Option<CodeMatrix>> {
    Ok(search_rank(f, field, r, config, Kernel::Auto)?.found)
}

fn minrank_with(f: &FittingMatrix, field: FieldSpec, config: &MinrankConfig, kernel: Kernel) -> Result<MinrankResult> {
    let limit = config.max_rank.map_or(f.cols(), |m| m.min(f.cols()));
    let mut certificate = Vec::new();
    for r in 1..=limit {
        let s = search_rank(f, field, r, config, kernel)?;
        match s.found {
            Some(witness) => return Ok(MinrankResult { value: r, witness, certificate }),
            None => certificate.push(RankCertificate { rank: r, subspaces_examined: s.examined }),
        }
    }
    Err(Error::RankLimit(limit))
}

/// Smallest code length for `f` over `field`, with a witness code.
pub fn minrank(f: &FittingMatrix, field: FieldSpec, config: &MinrankConfig) -> Result<MinrankResult> {
    minrank_with(f, field, config, Kernel::Auto)
}

/// Checks that `f` is the top-left block of `f_ext`, the premise of
/// `minrk(f_ext) >= minrk(f)`.
pub fn minrank_lower_bound_submatrix(f_ext: &FittingMatrix, f: &FittingMatrix) -> Result<bool> {
    match f_ext.pattern().top_left(f.rows(), f.cols()) {
        Some(block) if block == *f.pattern() => Ok(true),
        Some(_) => Err(Error::ContainmentViolation(format!(
            "top-left {}x{} block differs from the seed fitting matrix",
            f.rows(),
            f.cols()
        ))),
        None => Err(Error::ContainmentViolation(format!(
            "{}x{} extension cannot contain a {}x{} seed",
            f_ext.rows(),
            f_ext.cols(),
            f.rows(),
            f.cols()
        ))),
    }
}

/// `minrk(f_ext) == seed_minrank` follows when `f` sits in the top-left corner
/// of `f_ext` (lower bound) and `g_ext` is a verified code of that length (upper bound).
pub fn certify_rank_invariance(
    f: &FittingMatrix,
    seed_minrank: usize,
    f_ext: &FittingMatrix,
    g_ext: &CodeMatrix,
) -> Result<bool> {
    minrank_lower_bound_submatrix(f_ext, f)?;
    Ok(g_ext.len() == seed_minrank && verify_code(g_ext, f_ext)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::tests::arb_fitting;
    use crate::problem::Pattern;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Minimum rank over every assignment of field values to the `X` entries.
    fn brute_force_minrank(f: &FittingMatrix, field: FieldSpec) -> usize {
        let stars: Vec<(usize, usize)> = (0..f.rows())
            .flat_map(|r| (0..f.cols()).map(move |c| (r, c)))
            .filter(|&(r, c)| f.get(r, c) == PatternEntry::Star)
            .collect();
        let p = field.modulus() as u64;
        let total = p.pow(stars.len() as u32);
        let mut best = usize::MAX;
        for n in 0..total {
            let mut m = Mat::zeros(f.rows(), f.cols(), field);
            for r in 0..f.rows() {
                m.set(r, f.demand_col(r), 1);
            }
            let mut rest = n;
            for &(r, c) in &stars {
                m.set(r, c, (rest % p) as u8);
                rest /= p;
            }
            best = best.min(m.rank());
        }
        best
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(12, 1, 2), 4095);
        assert_eq!(gaussian_binomial(12, 2, 2), 2_794_155);
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(3, 0, 5), 1);
        assert_eq!(gaussian_binomial(3, 4, 2), 0);
        assert_eq!(gaussian_binomial(200, 100, 251), u128::MAX);
    }

    #[test]
    fn enumeration_visits_each_subspace_once() {
        for (k, r, p) in [(4, 2, 2), (5, 2, 2), (3, 2, 3), (4, 3, 2)] {
            let field = FieldSpec::new(p).unwrap();
            let bases: Vec<Mat> = SubspaceBases::new(k, r, field).collect();
            assert_eq!(bases.len() as u128, gaussian_binomial(k, r, p as u64));
            let distinct: HashSet<Mat> = bases.iter().map(|b| b.rref().0).collect();
            assert_eq!(distinct.len(), bases.len());
            assert!(bases.iter().all(|b| b.rank() == r && b.rref().0 == *b));
        }
    }

    #[test]
    fn identity_problem_needs_every_message() {
        let f = FittingMatrix::identity(3);
        let res = minrank(&f, FieldSpec::GF2, &MinrankConfig::default()).unwrap();
        assert_eq!(res.value, 3);
        assert!(res.witness.matrix().is_identity());
        assert_eq!(res.certificate.len(), 2);
        assert_eq!(is_achievable(&f, FieldSpec::GF2, 3, &MinrankConfig::default()).unwrap(), Some(res.witness));
    }

    #[test]
    fn full_side_information_needs_one_transmission() {
        let f: FittingMatrix = "3 3\n1 X X\nX 1 X\nX X 1\n".parse().unwrap();
        let g = is_achievable(&f, FieldSpec::GF2, 1, &MinrankConfig::default()).unwrap().unwrap();
        assert_eq!(g.matrix(), &Mat::from_rows(FieldSpec::GF2, &[[1u64, 1, 1]]).unwrap());
        let f3 = FieldSpec::new(3).unwrap();
        let g3 = is_achievable(&f, f3, 1, &MinrankConfig::default()).unwrap().unwrap();
        assert_eq!(g3.matrix(), &Mat::from_rows(f3, &[[1u64, 1, 1]]).unwrap());
    }

    #[test]
    fn rank_range_and_guard() {
        let f = FittingMatrix::identity(3);
        let cfg = MinrankConfig::default();
        assert_eq!(is_achievable(&f, FieldSpec::GF2, 0, &cfg), Err(Error::RankOutOfRange { r: 0, k: 3 }));
        assert_eq!(is_achievable(&f, FieldSpec::GF2, 4, &cfg), Err(Error::RankOutOfRange { r: 4, k: 3 }));
        let tight = MinrankConfig { guard: 6, ..Default::default() };
        assert_eq!(minrank(&f, FieldSpec::GF2, &tight), Err(Error::ResourceGuard { r: 1, count: 7, ceiling: 6 }));
        let capped = MinrankConfig { max_rank: Some(2), ..Default::default() };
        assert_eq!(minrank(&f, FieldSpec::GF2, &capped), Err(Error::RankLimit(2)));
    }

    #[test]
    fn submatrix_containment() {
        let f: FittingMatrix = "2 2\n1 X\n0 1\n".parse().unwrap();
        let ext: FittingMatrix = "3 3\n1 X 0\n0 1 X\nX 0 1\n".parse().unwrap();
        assert_eq!(minrank_lower_bound_submatrix(&ext, &f), Ok(true));
        let other: FittingMatrix = "2 2\n1 0\n0 1\n".parse().unwrap();
        assert!(matches!(minrank_lower_bound_submatrix(&ext, &other), Err(Error::ContainmentViolation(_))));
        assert!(matches!(minrank_lower_bound_submatrix(&f, &ext), Err(Error::ContainmentViolation(_))));
    }

    #[test]
    fn parallel_search_matches_serial() {
        let f: FittingMatrix =
            "6 6\n1 X 0 0 X 0\n0 1 X 0 0 X\nX 0 1 X 0 0\n0 X 0 1 X 0\n0 0 X 0 1 X\nX 0 0 X 0 1\n".parse().unwrap();
        let serial = minrank(&f, FieldSpec::GF2, &MinrankConfig::default()).unwrap();
        let parallel = minrank(&f, FieldSpec::GF2, &MinrankConfig { workers: 4, ..Default::default() }).unwrap();
        assert_eq!(serial, parallel);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_completion_brute_force(f in arb_fitting(5, 4)) {
            prop_assume!(f.pattern().star_count() <= 12);
            let res = minrank(&f, FieldSpec::GF2, &MinrankConfig::default()).unwrap();
            prop_assert_eq!(res.value, brute_force_minrank(&f, FieldSpec::GF2));
            prop_assert!(verify_code(&res.witness, &f).unwrap());
            prop_assert_eq!(res.witness.len(), res.value);
            prop_assert!(res.value >= 1 && res.value <= f.cols());
        }

        #[test]
        fn matches_completion_brute_force_gf3(f in arb_fitting(4, 3)) {
            prop_assume!(f.pattern().star_count() <= 7);
            let f3 = FieldSpec::new(3).unwrap();
            let res = minrank(&f, f3, &MinrankConfig::default()).unwrap();
            prop_assert_eq!(res.value, brute_force_minrank(&f, f3));
        }

        #[test]
        fn packed_kernel_matches_generic(f in arb_fitting(6, 5)) {
            let cfg = MinrankConfig::default();
            let fast = minrank_with(&f, FieldSpec::GF2, &cfg, Kernel::Auto).unwrap();
            let slow = minrank_with(&f, FieldSpec::GF2, &cfg, Kernel::Generic).unwrap();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn no_stars_means_full_rank(k in 1usize..6) {
            let res = minrank(&FittingMatrix::identity(k), FieldSpec::GF2, &MinrankConfig::default()).unwrap();
            prop_assert_eq!(res.value, k);
        }

        #[test]
        fn removing_side_information_never_helps(f in arb_fitting(6, 5), pick in any::<prop::sample::Index>()) {
            let stars: Vec<(usize, usize)> = (0..f.rows())
                .flat_map(|r| (0..f.cols()).map(move |c| (r, c)))
                .filter(|&(r, c)| f.get(r, c) == PatternEntry::Star)
                .collect();
            prop_assume!(!stars.is_empty());
            let (r, c) = stars[pick.index(stars.len())];
            let mut p: Pattern = f.pattern().clone();
            p.set(r, c, PatternEntry::Zero);
            let fewer = FittingMatrix::new(p).unwrap();
            let cfg = MinrankConfig::default();
            prop_assert!(minrank(&fewer, FieldSpec::GF2, &cfg).unwrap().value >= minrank(&f, FieldSpec::GF2, &cfg).unwrap().value);
        }
    }
}
