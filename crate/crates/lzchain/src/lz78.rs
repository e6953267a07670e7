//! LZ78 incremental parsing and the normalized LZ complexity.
//!
//! The parser emits, at each step, the shortest prefix of the remaining input
//! that has not yet appeared as a phrase; the final phrase may be an
//! incomplete duplicate of an earlier phrase and is counted in `c`. The
//! normalized complexity of `x^n` is `c log2(c) / n`.
//!
//! The phrase dictionary is a trie keyed by symbol index, and phrases are
//! stored as `(start, len)` ranges into the input, so parsing is O(n) time
//! and space in the sequence length. Per-block parsing resets the dictionary
//! at every block boundary; blocks are independent, so callers may evaluate
//! them concurrently as long as the aggregation order stays fixed.

use crate::seq::{partition, Sequence};
use crate::{count_log2, Error, Result};

const NO_CHILD: u32 = u32::MAX;

/// Result of incrementally parsing one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseResult {
    /// Phrases as `(start, len)` ranges into the source, in parse order.
    pub phrases: Vec<(usize, usize)>,
    /// Phrase count `c`, including a possibly-incomplete final phrase.
    pub c: usize,
    /// True iff the final phrase is distinct from all earlier phrases.
    pub last_complete: bool,
}

/// Growable trie over symbol indices; children are stored densely per node.
pub(crate) struct Trie {
    alpha: usize,
    children: Vec<u32>,
}

impl Trie {
    pub(crate) fn new(alpha: u32) -> Self {
        Trie {
            alpha: alpha as usize,
            children: vec![NO_CHILD; alpha as usize],
        }
    }

    pub(crate) fn child(&self, node: u32, symbol: u32) -> Option<u32> {
        let c = self.children[node as usize * self.alpha + symbol as usize];
        (c != NO_CHILD).then_some(c)
    }

    /// Insert a new child and return its node id.
    pub(crate) fn insert(&mut self, node: u32, symbol: u32) -> u32 {
        let id = (self.children.len() / self.alpha) as u32;
        self.children[node as usize * self.alpha + symbol as usize] = id;
        self.children.extend(std::iter::repeat(NO_CHILD).take(self.alpha));
        id
    }
}

pub(crate) fn parse_symbols(symbols: &[u32], alpha: u32) -> ParseResult {
    let mut trie = Trie::new(alpha);
    let mut phrases = Vec::new();
    let mut node = 0u32;
    let mut start = 0usize;
    for (i, &s) in symbols.iter().enumerate() {
        match trie.child(node, s) {
            Some(next) => node = next,
            None => {
                trie.insert(node, s);
                phrases.push((start, i + 1 - start));
                node = 0;
                start = i + 1;
            }
        }
    }
    let last_complete = start == symbols.len();
    if !last_complete {
        // The walk ended inside the trie: the trailing symbols equal an
        // earlier phrase and still count as one.
        phrases.push((start, symbols.len() - start));
    }
    ParseResult {
        c: phrases.len(),
        phrases,
        last_complete,
    }
}

/// Incrementally parse a nonempty sequence.
pub fn parse(x: &Sequence) -> Result<ParseResult> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(parse_symbols(x.symbols(), x.alphabet_size()))
}

pub(crate) fn complexity_symbols(symbols: &[u32], alpha: u32) -> f64 {
    let c = parse_symbols(symbols, alpha).c as u64;
    count_log2(c) / symbols.len() as f64
}

/// Normalized LZ complexity `c(x^n) log2 c(x^n) / n`, with `1 log 1 = 0`.
pub fn complexity(x: &Sequence) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(complexity_symbols(x.symbols(), x.alphabet_size()))
}

/// Upper bound `(c+1) log2(2 alpha (c+1))` on the LZ78 code length in bits.
pub fn code_length_bound(c: u64, alpha: u32) -> f64 {
    debug_assert!(c >= 1 && alpha >= 1);
    let c1 = (c + 1) as f64;
    c1 * (2.0 * alpha as f64 * c1).log2()
}

/// Average of per-block complexities, `(1/n) sum_i c_i log2 c_i`, parsing
/// each length-`k` block with a fresh dictionary.
pub fn block_average_complexity(x: &Sequence, k: usize) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let part = partition(x.len(), k)?;
    let alpha = x.alphabet_size();
    let total: f64 = part
        .blocks()
        .iter()
        .map(|&(s, e)| count_log2(parse_symbols(&x.symbols()[s..e], alpha).c as u64))
        .sum();
    Ok(total / x.len() as f64)
}

pub(crate) fn ceil_log2(m: u64) -> u32 {
    debug_assert!(m >= 1);
    64 - (m - 1).leading_zeros()
}

/// Exact bit length of the reference LZ78 codeword layout for a parse:
/// phrase `j` spends `ceil(log2 j)` bits on its predecessor index (zero when
/// `j = 1`) plus `ceil(log2 alpha)` bits on the innovation symbol; an
/// incomplete final phrase is a bare predecessor pointer of
/// `ceil(log2 c)` bits.
pub fn code_length(result: &ParseResult, alpha: u32) -> u64 {
    let complete = result.c - usize::from(!result.last_complete);
    let innovation_bits = ceil_log2(alpha as u64) as u64;
    let mut bits = complete as u64 * innovation_bits;
    for j in 1..=complete as u64 {
        bits += ceil_log2(j) as u64;
    }
    if !result.last_complete {
        bits += ceil_log2(result.c as u64) as u64;
    }
    bits
}

/// Measured code length of one sequence (parse + [`code_length`]).
pub fn measured_code_length(x: &Sequence) -> Result<u64> {
    Ok(code_length(&parse(x)?, x.alphabet_size()))
}

/// Largest measured per-symbol redundancy `bits/k - rho` over the `k`-blocks
/// of `x`. Together with the per-block parse this makes
/// `(1/n) sum_i bits_i <= (k/n) sum_i rho_i + eps` hold by construction.
pub fn measured_block_redundancy(x: &Sequence, k: usize) -> Result<f64> {
    let part = partition(x.len(), k)?;
    let alpha = x.alphabet_size();
    let mut worst = f64::NEG_INFINITY;
    for &(s, e) in part.blocks() {
        let parsed = parse_symbols(&x.symbols()[s..e], alpha);
        let bits = code_length(&parsed, alpha) as f64;
        let rho = count_log2(parsed.c as u64) / k as f64;
        worst = worst.max(bits / k as f64 - rho);
    }
    Ok(worst)
}

/// Render the parsed phrases of a sequence as glyph strings.
pub fn phrase_strings(x: &Sequence, result: &ParseResult) -> Vec<String> {
    result
        .phrases
        .iter()
        .map(|&(s, l)| x.slice(s, s + l).render())
        .collect()
}
