//! Lempel-Ziv complexity measures for individual sequences, and the finite-n
//! machinery needed to check how they relate to empirical entropies.
//!
//! The crate provides:
//!
//! - [`seq`]: alphabets, sequences, sequence pairs, block partitions, and the
//!   text/binary file formats shared by everything else.
//! - [`lz78`]: incremental (LZ78) parsing, the phrase count `c(x^n)`, the
//!   normalized complexity `rho = c log2(c) / n`, and block-averaged variants.
//! - [`condlz`]: joint parsing of sequence pairs, the conditional complexity
//!   `rho(y|x) = (1/n) sum_l c_l log2(c_l)`, and a concrete conditional coder
//!   with a matching decoder.
//! - [`empirical`]: empirical distributions of d-blocks (non-overlapping,
//!   sliding-window, cyclic sliding-window, and an end-anchored cyclic
//!   variant), their entropies, conditional entropies and mutual information.
//! - [`fse`]: the finite-state encoder model, information-losslessness
//!   checking, compression ratios, generalized Kraft sums, and brute-force
//!   s-state compressibility on tiny instances.
//! - [`bounds`]: explicit redundancy terms and evaluators that compute both
//!   sides of the finite-n lower/upper bounds and chain-rule inequalities,
//!   producing term-by-term [`bounds::BoundReport`]s, plus parameter sweeps.
//! - [`gen`]: deterministic, seedable corpus generators, including the
//!   oscillating pair construction used to separate `rho(x,y)` from
//!   `rho(x) + rho(y|x)`.
//!
//! All logarithms are base 2 and `0 log 0 = 0` throughout.

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod bounds;
pub mod condlz;
pub mod empirical;
pub mod fse;
pub mod gen;
pub mod lz78;
pub mod seq;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence is empty; this operation requires length >= 1")]
    EmptySequence,

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("block length {k} does not divide sequence length {n}")]
    Divisibility { n: usize, k: usize },

    #[error("symbol index {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: u32 },

    #[error("parameter cap exceeded: {what} = {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("segment lengths violate the dominance requirement: {0}")]
    DominanceViolated(String),

    #[error("undecodable bit stream: {0}")]
    Decode(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `x log2 x` with the `0 log 0 = 0` convention.
pub(crate) fn xlog2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `c log2 c` for an integer count, exact at `c <= 1`.
pub(crate) fn count_log2(c: u64) -> f64 {
    if c <= 1 {
        0.0
    } else {
        c as f64 * (c as f64).log2()
    }
}
