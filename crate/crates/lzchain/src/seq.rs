//! Alphabets, sequences, sequence pairs, and block partitioning.
//!
//! Symbols are dense integer indices into a declared [`Alphabet`]. Textual
//! corpora are mapped through an explicit alphabet declaration rather than
//! inferred from the data, so the alphabet cardinality used by the bound
//! evaluators is exact even when some symbols never occur.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A finite alphabet: a cardinality plus optional display glyphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    size: u32,
    glyphs: Option<Vec<char>>,
}

impl Alphabet {
    /// Alphabet of the given cardinality with no display glyphs.
    pub fn new(size: u32) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter(
                "alphabet size must be >= 1".into(),
            ));
        }
        Ok(Self { size, glyphs: None })
    }

    /// Alphabet whose symbols are displayed with the given glyphs, one per
    /// symbol index. Glyphs must be distinct.
    pub fn with_glyphs(glyphs: &str) -> Result<Self> {
        let chars: Vec<char> = glyphs.chars().collect();
        if chars.is_empty() {
            return Err(Error::InvalidParameter(
                "alphabet needs at least one glyph".into(),
            ));
        }
        for (i, a) in chars.iter().enumerate() {
            if chars[..i].contains(a) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate glyph {a:?} in alphabet"
                )));
            }
        }
        Ok(Self {
            size: chars.len() as u32,
            glyphs: Some(chars),
        })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn glyphs(&self) -> Option<&[char]> {
        self.glyphs.as_deref()
    }

    /// Glyph for one symbol index; falls back to the decimal index when the
    /// alphabet was declared without glyphs.
    pub fn render(&self, symbol: u32) -> String {
        match &self.glyphs {
            Some(g) if (symbol as usize) < g.len() => g[symbol as usize].to_string(),
            _ => symbol.to_string(),
        }
    }

    pub fn index_of(&self, glyph: char) -> Option<u32> {
        self.glyphs
            .as_ref()
            .and_then(|g| g.iter().position(|&c| c == glyph))
            .map(|i| i as u32)
    }
}

/// An individual sequence over a declared alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    alphabet: Arc<Alphabet>,
    symbols: Vec<u32>,
}

impl Sequence {
    pub fn new(alphabet: Alphabet, symbols: Vec<u32>) -> Result<Self> {
        for &s in &symbols {
            if s >= alphabet.size() {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet: alphabet.size(),
                });
            }
        }
        Ok(Self {
            alphabet: Arc::new(alphabet),
            symbols,
        })
    }

    /// Parse a glyph string against an alphabet declaration, e.g.
    /// `Sequence::from_glyphs("ab", "abba")`.
    pub fn from_glyphs(alphabet: &str, text: &str) -> Result<Self> {
        let alphabet = Alphabet::with_glyphs(alphabet)?;
        let mut symbols = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match alphabet.index_of(ch) {
                Some(i) => symbols.push(i),
                None => {
                    return Err(Error::Format(format!(
                        "symbol {ch:?} not in declared alphabet"
                    )))
                }
            }
        }
        Ok(Self {
            alphabet: Arc::new(alphabet),
            symbols,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet.size()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Sub-sequence over the half-open index range, sharing the alphabet.
    pub fn slice(&self, start: usize, end: usize) -> Sequence {
        Sequence {
            alphabet: Arc::clone(&self.alphabet),
            symbols: self.symbols[start..end].to_vec(),
        }
    }

    pub fn render(&self) -> String {
        self.symbols
            .iter()
            .map(|&s| self.alphabet.render(s))
            .collect()
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A pair of equal-length sequences viewed jointly.
///
/// Symbol `i` of the pair is `(x_i, y_i)`, encoded over the product alphabet
/// of size `alpha * beta` as `x_i * beta + y_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedSequence {
    x: Sequence,
    y: Sequence,
}

/// Pair two equal-length sequences.
pub fn pair(x: Sequence, y: Sequence) -> Result<PairedSequence> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(PairedSequence { x, y })
}

impl PairedSequence {
    pub fn x(&self) -> &Sequence {
        &self.x
    }

    pub fn y(&self) -> &Sequence {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn alpha(&self) -> u32 {
        self.x.alphabet_size()
    }

    pub fn beta(&self) -> u32 {
        self.y.alphabet_size()
    }

    /// Cardinality of the product alphabet.
    pub fn product_alphabet_size(&self) -> u32 {
        self.alpha() * self.beta()
    }

    /// Product-alphabet index of the pair at position `i`.
    pub fn product_symbol(&self, i: usize) -> u32 {
        self.x.symbols[i] * self.beta() + self.y.symbols[i]
    }

    /// The pair as one sequence over the product alphabet.
    pub fn product_sequence(&self) -> Sequence {
        let beta = self.beta();
        let symbols = self
            .x
            .symbols
            .iter()
            .zip(&self.y.symbols)
            .map(|(&a, &b)| a * beta + b)
            .collect();
        Sequence {
            alphabet: Arc::new(Alphabet::new(self.product_alphabet_size().max(1)).unwrap()),
            symbols,
        }
    }

    /// Recover the two component sequences.
    pub fn unpair(&self) -> (Sequence, Sequence) {
        (self.x.clone(), self.y.clone())
    }

    /// Paired view of the index range `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> PairedSequence {
        PairedSequence {
            x: self.x.slice(start, end),
            y: self.y.slice(start, end),
        }
    }
}

/// A partition of `[0, n)` into contiguous blocks of equal length `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    k: usize,
    blocks: Vec<(usize, usize)>,
}

/// Partition `[0, n)` into `n/k` blocks of length `k`. `k` must divide `n`;
/// there is no silent truncation.
pub fn partition(n: usize, k: usize) -> Result<BlockPartition> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "partition requires n >= 1 and k >= 1".into(),
        ));
    }
    if n % k != 0 {
        return Err(Error::Divisibility { n, k });
    }
    let blocks = (0..n / k).map(|i| (i * k, (i + 1) * k)).collect();
    Ok(BlockPartition { n, k, blocks })
}

impl BlockPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

/// Sidecar descriptor for the binary sequence format.
#[derive(Debug, Serialize, Deserialize)]
struct AlphabetDescriptor {
    size: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    glyphs: Option<String>,
}

/// Text format: a header line `alphabet: <glyphs>` followed by the symbol
/// stream; whitespace in the stream is ignored.
pub fn write_text(seq: &Sequence) -> Result<String> {
    let glyphs = seq.alphabet.glyphs().ok_or_else(|| {
        Error::InvalidParameter("text format requires an alphabet with glyphs".into())
    })?;
    let header: String = glyphs.iter().collect();
    Ok(format!("alphabet: {header}\n{}\n", seq.render()))
}

pub fn read_text(text: &str) -> Result<Sequence> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty sequence file".into()))?;
    let glyphs = header
        .strip_prefix("alphabet:")
        .map(str::trim)
        .ok_or_else(|| Error::Format("missing `alphabet:` header line".into()))?;
    let body: String = lines.flat_map(|l| l.chars()).filter(|c| !c.is_whitespace()).collect();
    Sequence::from_glyphs(glyphs, &body)
}

pub fn write_text_file(seq: &Sequence, path: &Path) -> Result<()> {
    std::fs::write(path, write_text(seq)?)?;
    Ok(())
}

pub fn read_text_file(path: &Path) -> Result<Sequence> {
    read_text(&std::fs::read_to_string(path)?)
}

/// Binary format: one byte per symbol index, with a JSON alphabet descriptor
/// in a sidecar file.
pub fn write_binary_file(seq: &Sequence, path: &Path, sidecar: &Path) -> Result<()> {
    if seq.alphabet_size() > 256 {
        return Err(Error::InvalidParameter(
            "binary format supports alphabets of size <= 256".into(),
        ));
    }
    let bytes: Vec<u8> = seq.symbols.iter().map(|&s| s as u8).collect();
    std::fs::write(path, bytes)?;
    let desc = AlphabetDescriptor {
        size: seq.alphabet_size(),
        glyphs: seq.alphabet.glyphs().map(|g| g.iter().collect()),
    };
    std::fs::write(sidecar, serde_json::to_string_pretty(&desc)?)?;
    Ok(())
}

pub fn read_binary_file(path: &Path, sidecar: &Path) -> Result<Sequence> {
    let desc: AlphabetDescriptor = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
    let alphabet = match desc.glyphs {
        Some(g) => {
            let a = Alphabet::with_glyphs(&g)?;
            if a.size() != desc.size {
                return Err(Error::Format(
                    "sidecar glyph count disagrees with declared size".into(),
                ));
            }
            a
        }
        None => Alphabet::new(desc.size)?,
    };
    let bytes = std::fs::read(path)?;
    Sequence::new(alphabet, bytes.into_iter().map(u32::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pair_encodes_product_indices() {
        let x = Sequence::new(Alphabet::new(2).unwrap(), vec![0, 1, 0]).unwrap();
        let y = Sequence::new(Alphabet::new(2).unwrap(), vec![1, 1, 0]).unwrap();
        let p = pair(x, y).unwrap();
        let prod: Vec<u32> = (0..3).map(|i| p.product_symbol(i)).collect();
        assert_eq!(prod, vec![1, 3, 0]);
    }

    #[test]
    fn pair_of_paper_example_has_six_pairs() {
        let x = Sequence::from_glyphs("01", "010101").unwrap();
        let y = Sequence::from_glyphs("01", "010001").unwrap();
        let p = pair(x, y).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.product_alphabet_size(), 4);
    }

    #[test]
    fn pair_of_empty_sequences_is_empty() {
        let x = Sequence::new(Alphabet::new(2).unwrap(), vec![]).unwrap();
        let y = Sequence::new(Alphabet::new(3).unwrap(), vec![]).unwrap();
        let p = pair(x, y).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn pair_rejects_length_mismatch() {
        let x = Sequence::new(Alphabet::new(2).unwrap(), vec![0]).unwrap();
        let y = Sequence::new(Alphabet::new(2).unwrap(), vec![0, 1]).unwrap();
        assert!(matches!(pair(x, y), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn partition_basic() {
        let p = partition(6, 2).unwrap();
        assert_eq!(p.blocks(), &[(0, 2), (2, 4), (4, 6)]);
        let whole = partition(6, 6).unwrap();
        assert_eq!(whole.blocks(), &[(0, 6)]);
        assert!(matches!(partition(6, 4), Err(Error::Divisibility { .. })));
    }

    #[test]
    fn sequence_rejects_out_of_range_symbols() {
        let err = Sequence::new(Alphabet::new(2).unwrap(), vec![0, 2]);
        assert!(matches!(err, Err(Error::SymbolOutOfRange { .. })));
    }

    #[test]
    fn alphabet_rejects_duplicate_glyphs() {
        assert!(Alphabet::with_glyphs("aba").is_err());
        assert!(Alphabet::with_glyphs("").is_err());
    }

    #[test]
    fn text_round_trip() {
        let s = Sequence::from_glyphs("ab", "abbabaabbaaabaa").unwrap();
        let encoded = write_text(&s).unwrap();
        let back = read_text(&encoded).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn binary_round_trip() {
        let dir = std::env::temp_dir().join("lzchain-seq-test");
        std::fs::create_dir_all(&dir).unwrap();
        let data = dir.join("seq.bin");
        let sidecar = dir.join("seq.alphabet.json");
        let s = Sequence::from_glyphs("abc", "cabbacab").unwrap();
        write_binary_file(&s, &data, &sidecar).unwrap();
        let back = read_binary_file(&data, &sidecar).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #[test]
        fn unpair_round_trips(xs in prop::collection::vec(0u32..3, 0..64),
                              ys in prop::collection::vec(0u32..2, 0..64)) {
            let n = xs.len().min(ys.len());
            let x = Sequence::new(Alphabet::new(3).unwrap(), xs[..n].to_vec()).unwrap();
            let y = Sequence::new(Alphabet::new(2).unwrap(), ys[..n].to_vec()).unwrap();
            let p = pair(x.clone(), y.clone()).unwrap();
            let (rx, ry) = p.unpair();
            prop_assert_eq!(rx, x);
            prop_assert_eq!(ry, y);
            // Product coding is invertible symbol by symbol.
            let prod = p.product_sequence();
            for i in 0..n {
                prop_assert_eq!(prod.symbols()[i] / 2, p.x().symbols()[i]);
                prop_assert_eq!(prod.symbols()[i] % 2, p.y().symbols()[i]);
            }
        }

        #[test]
        fn partition_blocks_cover_range(k in 1usize..8, m in 1usize..8) {
            let n = k * m;
            let part = partition(n, k).unwrap();
            let mut covered = Vec::new();
            for &(s, e) in part.blocks() {
                prop_assert_eq!(e - s, k);
                covered.extend(s..e);
            }
            prop_assert_eq!(covered, (0..n).collect::<Vec<_>>());
        }
    }
}
