//! The three-type block family: `rT` messages in `T` consecutive blocks of
//! size `r`, each block tagged A, B or C, tied together by an involution `σ`.
//!
//! Block `i` of the closed-form code is `I`, `C` or `Y = I + C − C₁` for
//! types A, B and C. The generated side information is the smallest that lets
//! every receiver decode from that code; callers may add more.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{involutory_block_extension, BlockLayout, ExtensionResult};
use crate::gf::{FieldSpec, Mat};
use crate::involution::InvolutoryPermutation;
use crate::problem::{FittingMatrix, Pattern, PatternEntry};
use crate::verifier::CodeMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockType {
    A,
    B,
    C,
}

impl BlockType {
    pub fn symbol(self) -> char {
        match self {
            BlockType::A => 'A',
            BlockType::B => 'B',
            BlockType::C => 'C',
        }
    }
}

/// How a Type C receiver of a message in a swap decodes.
///
/// `Cond1` uses transmission `k` and needs `k` in the A blocks and `σ(k)` in
/// the B blocks. `Cond2` uses transmission `σ(k)` and needs the reverse.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeCChoice {
    #[default]
    Cond1,
    Cond2,
}

/// A member of the family. Block and message indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbcSpec {
    r: usize,
    types: Vec<BlockType>,
    sigma: InvolutoryPermutation,
    field: FieldSpec,
    typec_choice: BTreeMap<(usize, usize), TypeCChoice>,
}

impl AbcSpec {
    /// Every Type C receiver of a non-fixed message starts at [`TypeCChoice::Cond1`].
    pub fn new(types: Vec<BlockType>, sigma: InvolutoryPermutation, field: FieldSpec) -> Result<Self> {
        let r = sigma.len();
        if r == 0 || types.is_empty() {
            return Err(Error::InvalidSpec("need at least one block of at least one message".into()));
        }
        let mut typec_choice = BTreeMap::new();
        for (i, &t) in types.iter().enumerate() {
            if t == BlockType::C {
                for k in (1..=r).filter(|&k| !sigma.is_fixed(k)) {
                    typec_choice.insert((i + 1, k), TypeCChoice::Cond1);
                }
            }
        }
        Ok(AbcSpec { r, types, sigma, field, typec_choice })
    }

    /// Parses a type string such as `ABBC`.
    pub fn parse_types(s: &str) -> Result<Vec<BlockType>> {
        s.trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'A' => Ok(BlockType::A),
                'B' => Ok(BlockType::B),
                'C' => Ok(BlockType::C),
                _ => Err(Error::InvalidSpec(format!("unknown block type {c:?}"))),
            })
            .collect()
    }

    pub fn set_choice(&mut self, block: usize, k: usize, choice: TypeCChoice) -> Result<()> {
        match self.typec_choice.get_mut(&(block, k)) {
            Some(slot) => {
                *slot = choice;
                Ok(())
            }
            None => Err(Error::InvalidSpec(format!(
                "{block}:{k} is not a Type C receiver of a message moved by the involution"
            ))),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn blocks(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[BlockType] {
        &self.types
    }

    pub fn sigma(&self) -> &InvolutoryPermutation {
        &self.sigma
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn choice(&self, block: usize, k: usize) -> Option<TypeCChoice> {
        self.typec_choice.get(&(block, k)).copied()
    }

    pub fn to_json(&self) -> String {
        let doc = SpecDoc {
            r: self.r,
            types: self.types.iter().map(|t| t.symbol()).collect(),
            sigma: self.sigma.to_string(),
            p: self.field.modulus() as u32,
            typec_choice: self
                .typec_choice
                .iter()
                .filter(|(_, &c)| c != TypeCChoice::Cond1)
                .map(|(&(b, k), &c)| (format!("{b}:{k}"), c))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: SpecDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let sigma = InvolutoryPermutation::parse_cycles(&doc.sigma, doc.r)?;
        let mut spec = AbcSpec::new(AbcSpec::parse_types(&doc.types)?, sigma, FieldSpec::new(doc.p)?)?;
        for (key, choice) in doc.typec_choice {
            let (b, k) = parse_receiver(&key)?;
            spec.set_choice(b, k, choice)?;
        }
        Ok(spec)
    }

    fn col(&self, block: usize, k: usize) -> usize {
        (block - 1) * self.r + k - 1
    }

    fn blocks_of(&self, t: BlockType) -> impl Iterator<Item = usize> + '_ {
        (1..=self.types.len()).filter(move |&j| self.types[j - 1] == t)
    }
}

/// Parses a `block:message` receiver key.
pub fn parse_receiver(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("receiver {s:?} is not block:message"));
    let (b, k) = s.trim().split_once(':').ok_or_else(bad)?;
    Ok((b.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?))
}

impl fmt::Display for AbcSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let types: String = self.types.iter().map(|t| t.symbol()).collect();
        write!(f, "r={} types={} sigma={} over {}", self.r, types, self.sigma, self.field)
    }
}

#[derive(Serialize, Deserialize)]
struct SpecDoc {
    r: usize,
    types: String,
    sigma: String,
    p: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    typec_choice: BTreeMap<String, TypeCChoice>,
}

/// The `rT×rT` fitting matrix with one receiver per (block, message), in block-major order.
pub fn abc_problem(spec: &AbcSpec) -> FittingMatrix {
    let (r, t) = (spec.r, spec.types.len());
    let n = r * t;
    let mut p = Pattern::filled(n, n, PatternEntry::Zero);
    for i in 1..=t {
        for k in 1..=r {
            let row = spec.col(i, k);
            let s = spec.sigma.image(k);
            let mut side = Vec::new();
            let own = spec.types[i - 1];
            let others = |ty: BlockType| spec.blocks_of(ty).filter(move |&j| j != i);
            match own {
                BlockType::A | BlockType::B => {
                    let mirror = if own == BlockType::A { BlockType::B } else { BlockType::A };
                    side.extend(others(own).map(|j| (j, k)));
                    side.extend(spec.blocks_of(mirror).map(|j| (j, s)));
                    side.extend(spec.blocks_of(BlockType::C).flat_map(|j| [(j, k), (j, s)]));
                }
                BlockType::C => {
                    side.extend(others(BlockType::C).map(|j| (j, k)));
                    if spec.sigma.is_fixed(k) {
                        side.extend(spec.blocks_of(BlockType::A).map(|j| (j, k)));
                        side.extend(spec.blocks_of(BlockType::B).map(|j| (j, k)));
                    } else {
                        side.extend(spec.blocks_of(BlockType::C).map(|j| (j, s)));
                        let (on_a, on_b) = match spec.choice(i, k).unwrap_or_default() {
                            TypeCChoice::Cond1 => (k, s),
                            TypeCChoice::Cond2 => (s, k),
                        };
                        side.extend(spec.blocks_of(BlockType::A).map(|j| (j, on_a)));
                        side.extend(spec.blocks_of(BlockType::B).map(|j| (j, on_b)));
                    }
                }
            }
            for (j, m) in side {
                p.set(row, spec.col(j, m), PatternEntry::Star);
            }
            p.set(row, row, PatternEntry::One);
        }
    }
    FittingMatrix::new(p).expect("one demand per row on the diagonal")
}

/// The `r×rT` code with blocks `I`, `C` and `I + C − C₁` for types A, B and C.
pub fn abc_code(spec: &AbcSpec) -> CodeMatrix {
    let f = spec.field;
    let blocks: Vec<Mat> = spec
        .types
        .iter()
        .map(|t| match t {
            BlockType::A => Mat::identity(spec.r, f),
            BlockType::B => spec.sigma.to_matrix(f),
            BlockType::C => spec.sigma.commuting_y(f),
        })
        .collect();
    let g = blocks[1..].iter().fold(blocks[0].clone(), |acc, b| acc.hstack(b).expect("equal heights"));
    CodeMatrix::new(g).expect("r is positive")
}

/// The 2-order extension of `f` (the generated problem, possibly widened)
/// with the family code and every block permuted by `σ`.
pub fn abc_extension(spec: &AbcSpec, f: &FittingMatrix) -> Result<ExtensionResult> {
    let n = spec.r * spec.types.len();
    if f.cols() != n {
        return Err(Error::DimensionMismatch(format!("problem has {} messages, the spec has {n}", f.cols())));
    }
    let layout = BlockLayout::consecutive(spec.r, spec.types.len());
    involutory_block_extension(f, &abc_code(spec), &layout, &spec.sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involution::{commutes, Permutation};
    use crate::verifier::verify_code;
    use proptest::prelude::*;

    const GF2: FieldSpec = FieldSpec::GF2;

    fn spec(types: &str, sigma: &str, r: usize) -> AbcSpec {
        AbcSpec::new(AbcSpec::parse_types(types).unwrap(), InvolutoryPermutation::parse_cycles(sigma, r).unwrap(), GF2)
            .unwrap()
    }

    #[test]
    fn single_message() {
        let s = spec("A", "(1)", 1);
        assert_eq!(abc_problem(&s).to_string(), "1 1\n1\n");
        let ext = abc_extension(&s, &abc_problem(&s)).unwrap();
        assert_eq!(ext.f_ext.to_string(), "2 2\n1 X\nX 1\n");
        assert_eq!(ext.g_ext.matrix().to_string(), "1 2 2\n1 1\n");
    }

    #[test]
    fn two_type_a_blocks() {
        let s = spec("AA", "(12)", 2);
        let f = abc_problem(&s);
        assert_eq!(f.row(0), &[PatternEntry::One, PatternEntry::Zero, PatternEntry::Star, PatternEntry::Zero]);
        assert_eq!(abc_code(&s).matrix().to_string(), "2 4 2\n1 0 1 0\n0 1 0 1\n");
    }

    #[test]
    fn single_type_b_block_is_the_swap() {
        let s = spec("B", "(12)", 2);
        assert_eq!(abc_code(&s).matrix().to_string(), "2 2 2\n0 1\n1 0\n");
    }

    #[test]
    fn printed_code_of_the_worked_example() {
        let s = spec("ABBC", "(13)(2)", 3);
        let expected: Mat =
            "3 12 2\n1 0 0 0 0 1 0 0 1 1 0 1\n0 1 0 0 1 0 0 1 0 0 1 0\n0 0 1 1 0 0 1 0 0 1 0 1\n".parse().unwrap();
        assert_eq!(abc_code(&s).matrix(), &expected);
        assert!(verify_code(&abc_code(&s), &abc_problem(&s)).unwrap());
    }

    #[test]
    fn choices_are_restricted_to_moved_type_c_messages() {
        let mut s = spec("ABBC", "(13)(2)", 3);
        assert!(s.set_choice(4, 1, TypeCChoice::Cond2).is_ok());
        assert!(s.set_choice(4, 2, TypeCChoice::Cond2).is_err());
        assert!(s.set_choice(1, 1, TypeCChoice::Cond2).is_err());
        assert_eq!(s.choice(4, 3), Some(TypeCChoice::Cond1));
    }

    #[test]
    fn json_round_trip() {
        let mut s = spec("ABBC", "(13)(2)", 3);
        s.set_choice(4, 3, TypeCChoice::Cond2).unwrap();
        let back = AbcSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let parsed =
            AbcSpec::from_json(r#"{"r":2,"types":"CA","sigma":"(12)","p":3,"typec_choice":{"1:2":"cond2"}}"#).unwrap();
        assert_eq!(parsed.field().modulus(), 3);
        assert_eq!(parsed.choice(1, 2), Some(TypeCChoice::Cond2));
        assert!(AbcSpec::from_json(r#"{"r":2,"types":"AD","sigma":"(12)","p":2}"#).is_err());
        assert!(
            AbcSpec::from_json(r#"{"r":2,"types":"A","sigma":"(12)","p":2,"typec_choice":{"1:1":"cond2"}}"#).is_err()
        );
    }

    #[test]
    fn type_b_mirrors_type_a() {
        let ab = abc_problem(&spec("AB", "(12)", 2));
        let ba = abc_problem(&spec("BA", "(12)", 2));
        // Swapping the two blocks of both rows and columns maps one to the other.
        let swap = |i: usize| (i + 2) % 4;
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(ab.get(r, c), ba.get(swap(r), swap(c)));
            }
        }
    }

    fn random_spec(r: usize, types: Vec<BlockType>, seed: u64, field: FieldSpec) -> AbcSpec {
        use rand::{rngs::StdRng, seq::SliceRandom, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(seed);
        let mut order: Vec<usize> = (1..=r).collect();
        order.shuffle(&mut rng);
        let mut images: Vec<usize> = (1..=r).collect();
        for pair in order.chunks_exact(2).take(rng.gen_range(0..=r / 2)) {
            images[pair[0] - 1] = pair[1];
            images[pair[1] - 1] = pair[0];
        }
        let sigma = InvolutoryPermutation::new(Permutation::from_images(&images).unwrap()).unwrap();
        let mut s = AbcSpec::new(types, sigma, field).unwrap();
        let keys: Vec<_> = s.typec_choice.keys().copied().collect();
        for (b, k) in keys {
            if rng.gen_bool(0.5) {
                s.set_choice(b, k, TypeCChoice::Cond2).unwrap();
            }
        }
        s
    }

    fn arb_types() -> impl Strategy<Value = Vec<BlockType>> {
        prop::collection::vec(prop_oneof![Just(BlockType::A), Just(BlockType::B), Just(BlockType::C)], 1..=4)
    }

    proptest! {
        #[test]
        fn family_code_decodes(r in 1usize..=4, types in arb_types(), seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3), Just(5)]) {
            let s = random_spec(r, types, seed, FieldSpec::new(p).unwrap());
            let f = abc_problem(&s);
            let g = abc_code(&s);
            prop_assert!(verify_code(&g, &f).unwrap());
            let c = s.sigma().to_matrix(s.field());
            for i in 0..s.blocks() {
                let cols: Vec<usize> = (i * r..(i + 1) * r).collect();
                prop_assert!(commutes(&g.matrix().select_cols(&cols), &c).unwrap());
            }
            let ext = abc_extension(&s, &f).unwrap();
            prop_assert!(verify_code(&ext.g_ext, &ext.f_ext).unwrap());
        }

        #[test]
        fn widening_keeps_the_code(r in 1usize..=3, types in arb_types(), seed in any::<u64>(), extra in prop::collection::vec((0usize..12, 0usize..12), 0..8)) {
            let s = random_spec(r, types, seed, GF2);
            let f = abc_problem(&s);
            let n = f.cols();
            let stars: Vec<_> = extra
                .into_iter()
                .map(|(a, b)| (a % n, b % n))
                .filter(|&(a, b)| f.get(a, b) == PatternEntry::Zero)
                .collect();
            let wide = f.with_stars(&stars).unwrap();
            prop_assert!(verify_code(&abc_code(&s), &wide).unwrap());
            prop_assert!(abc_extension(&s, &wide).is_ok());
        }

        #[test]
        fn transmission_support(r in 1usize..=4, types in arb_types(), seed in any::<u64>()) {
            let s = random_spec(r, types, seed, GF2);
            let g = abc_code(&s);
            for k in 1..=r {
                let sk = s.sigma().image(k);
                let mut expected = Vec::new();
                for (i, t) in s.types().iter().enumerate() {
                    let mut cols = match t {
                        BlockType::A => vec![k],
                        BlockType::B => vec![sk],
                        BlockType::C => vec![k, sk],
                    };
                    cols.sort_unstable();
                    cols.dedup();
                    expected.extend(cols.into_iter().map(|c| i * r + c - 1));
                }
                let actual: Vec<usize> = (0..g.messages()).filter(|&c| g.matrix().get(k - 1, c) != 0).collect();
                prop_assert_eq!(actual, expected);
            }
        }
    }
}
