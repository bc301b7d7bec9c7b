//! Linear index coding over prime fields: fitting matrices, exact minrank,
//! and rank-preserving extensions built from involutory permutations.

pub mod abc;
pub mod error;
pub mod extension;
pub mod gf;
pub mod involution;
pub mod minrank;
pub mod problem;
pub mod verifier;

pub use abc::{abc_code, abc_extension, abc_problem, AbcSpec, BlockType, TypeCChoice};
pub use error::{Error, Result};
pub use extension::{
    derive_bxx, involutory_block_extension, recover_involution, replicate_extension, structured_bxx,
    systematic_extension, BlockLayout, ExtensionResult,
};
pub use gf::{FieldSpec, Mat};
pub use involution::{commutes, InvolutoryPermutation, Permutation};
pub use minrank::{
    certify_rank_invariance, gaussian_binomial, is_achievable, minrank, minrank_lower_bound_submatrix, MinrankConfig,
    MinrankResult, RankCertificate,
};
pub use problem::{fits, fits_x, FittingMatrix, IcProblem, Pattern, PatternEntry, Receiver, XPattern};
pub use verifier::{encode, find_decoding, simulate, verify_code, CodeMatrix, DecodingMatrix, SimulationReport};
