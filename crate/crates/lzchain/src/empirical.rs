//! Empirical distributions of d-blocks and their induced information
//! measures.
//!
//! Four window conventions are supported, all normalized to total weight 1:
//!
//! - `Nob`: non-overlapping blocks, weight `d/n` per block, requires `d | n`;
//! - `Sw`: sliding window, weight `1/(n-d+1)` per window;
//! - `Csw`: cyclic sliding window starting at every position, wrapping
//!   modulo `n`, weight `1/n`;
//! - `TildeSw`: cyclic windows *ending* at every position, weight `1/n`.
//!   Positions before the start wrap around, so this enumerates the same
//!   window multiset as `Csw` in a different order.
//!
//! Tables are sparse maps keyed by blocks packed as base-alpha integers;
//! `alpha^d` must fit in 62 bits. A table can carry an optional first
//! component (a state at the window start, or a parallel block from a paired
//! sequence), enabling conditional entropies and mutual information.

use std::collections::BTreeMap;

use crate::seq::{Alphabet, PairedSequence, Sequence};
use crate::{xlog2, Error, Result};

const PACK_BITS: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistKind {
    Nob,
    Sw,
    Csw,
    TildeSw,
}

impl DistKind {
    pub fn name(self) -> &'static str {
        match self {
            DistKind::Nob => "nob",
            DistKind::Sw => "sw",
            DistKind::Csw => "csw",
            DistKind::TildeSw => "tilde_sw",
        }
    }
}

/// What the first key component of a two-component table holds.
#[derive(Debug, Clone, PartialEq, Eq)]
enum FirstComponent {
    /// A state drawn from a parallel state sequence.
    State { count: u32 },
    /// A d-block from the first member of a sequence pair.
    Block { alphabet: u32, d: usize },
}

/// A normalized empirical distribution over (optional first component,
/// d-block) keys.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    kind: DistKind,
    d: usize,
    n: usize,
    block_alphabet: Alphabet,
    first: Option<FirstComponent>,
    table: BTreeMap<(u64, u64), f64>,
}

fn check_pack(alpha: u32, d: usize) -> Result<()> {
    let bits = (alpha.max(2) as f64).log2() * d as f64;
    if bits > PACK_BITS as f64 {
        return Err(Error::CapExceeded {
            what: "alpha^d block packing",
            value: bits.ceil() as u128,
            cap: PACK_BITS as u128,
        });
    }
    Ok(())
}

fn pack_window(symbols: &[u32], alpha: u64, start: usize, d: usize, cyclic: bool) -> u64 {
    let n = symbols.len();
    let mut key = 0u64;
    for i in 0..d {
        let idx = if cyclic { (start + i) % n } else { start + i };
        key = key * alpha + symbols[idx] as u64;
    }
    key
}

/// Window start positions and per-window weight for each kind.
fn windows(kind: DistKind, n: usize, d: usize) -> Result<(Vec<usize>, f64, bool)> {
    match kind {
        DistKind::Nob => {
            if n % d != 0 {
                return Err(Error::Divisibility { n, k: d });
            }
            let starts = (0..n / d).map(|i| i * d).collect();
            Ok((starts, d as f64 / n as f64, false))
        }
        DistKind::Sw => {
            let starts = (0..=n - d).collect();
            Ok((starts, 1.0 / (n - d + 1) as f64, false))
        }
        DistKind::Csw => {
            let starts = (0..n).collect();
            Ok((starts, 1.0 / n as f64, true))
        }
        DistKind::TildeSw => {
            // Window ending at position e starts at (e - d + 1) mod n.
            let starts = (0..n).map(|e| (e + n - (d - 1)) % n).collect();
            Ok((starts, 1.0 / n as f64, true))
        }
    }
}

fn validate(n: usize, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if d == 0 || d > n {
        return Err(Error::InvalidParameter(format!(
            "window length d = {d} must satisfy 1 <= d <= n = {n}"
        )));
    }
    Ok(())
}

/// Empirical distribution of d-blocks of `x` under the given window kind.
pub fn dist(x: &Sequence, d: usize, kind: DistKind) -> Result<EmpiricalDist> {
    validate(x.len(), d)?;
    check_pack(x.alphabet_size(), d)?;
    let (starts, weight, cyclic) = windows(kind, x.len(), d)?;
    let alpha = x.alphabet_size() as u64;
    let mut table = BTreeMap::new();
    for s in starts {
        let key = (0u64, pack_window(x.symbols(), alpha, s, d, cyclic));
        *table.entry(key).or_insert(0.0) += weight;
    }
    Ok(EmpiricalDist {
        kind,
        d,
        n: x.len(),
        block_alphabet: x.alphabet().clone(),
        first: None,
        table,
    })
}

/// Joint empirical distribution of (state at window start, d-block).
pub fn dist_with_state(
    x: &Sequence,
    z: &Sequence,
    d: usize,
    kind: DistKind,
) -> Result<EmpiricalDist> {
    if x.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: z.len(),
        });
    }
    validate(x.len(), d)?;
    check_pack(x.alphabet_size(), d)?;
    let (starts, weight, cyclic) = windows(kind, x.len(), d)?;
    let alpha = x.alphabet_size() as u64;
    let mut table = BTreeMap::new();
    for s in starts {
        let key = (
            z.symbols()[s] as u64,
            pack_window(x.symbols(), alpha, s, d, cyclic),
        );
        *table.entry(key).or_insert(0.0) += weight;
    }
    Ok(EmpiricalDist {
        kind,
        d,
        n: x.len(),
        block_alphabet: x.alphabet().clone(),
        first: Some(FirstComponent::State {
            count: z.alphabet_size(),
        }),
        table,
    })
}

/// Joint empirical distribution of `(X^d, Y^d)` blocks of a pair.
pub fn pair_dist(p: &PairedSequence, d: usize, kind: DistKind) -> Result<EmpiricalDist> {
    validate(p.len(), d)?;
    check_pack(p.alpha(), d)?;
    check_pack(p.beta(), d)?;
    let (starts, weight, cyclic) = windows(kind, p.len(), d)?;
    let alpha = p.alpha() as u64;
    let beta = p.beta() as u64;
    let mut table = BTreeMap::new();
    for s in starts {
        let key = (
            pack_window(p.x().symbols(), alpha, s, d, cyclic),
            pack_window(p.y().symbols(), beta, s, d, cyclic),
        );
        *table.entry(key).or_insert(0.0) += weight;
    }
    Ok(EmpiricalDist {
        kind,
        d,
        n: p.len(),
        block_alphabet: p.y().alphabet().clone(),
        first: Some(FirstComponent::Block {
            alphabet: p.alpha(),
            d,
        }),
        table,
    })
}

impl EmpiricalDist {
    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_state(&self) -> bool {
        self.first.is_some()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Probability of a packed (first, block) key; zero when absent.
    pub fn probability(&self, first: u64, block: u64) -> f64 {
        self.table.get(&(first, block)).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.table.values().sum()
    }

    /// Joint entropy of the table, `-sum p log2 p`.
    pub fn entropy(&self) -> f64 {
        -self.table.values().map(|&p| xlog2(p)).sum::<f64>()
    }

    fn marginal_first(&self) -> BTreeMap<u64, f64> {
        let mut m = BTreeMap::new();
        for (&(f, _), &p) in &self.table {
            *m.entry(f).or_insert(0.0) += p;
        }
        m
    }

    fn marginal_block(&self) -> BTreeMap<u64, f64> {
        let mut m = BTreeMap::new();
        for (&(_, b), &p) in &self.table {
            *m.entry(b).or_insert(0.0) += p;
        }
        m
    }

    /// Conditional entropy of the block given the first component,
    /// `H(B|A) = H(A,B) - H(A)`. Requires a two-component table.
    pub fn cond_entropy(&self) -> Result<f64> {
        if self.first.is_none() {
            return Err(Error::InvalidParameter(
                "conditional entropy needs a two-component table".into(),
            ));
        }
        let ha = -self.marginal_first().values().map(|&p| xlog2(p)).sum::<f64>();
        let h = self.entropy() - ha;
        Ok(if h < 0.0 && h > -1e-12 { 0.0 } else { h })
    }

    /// Mutual information `I(A;B) = H(A) + H(B) - H(A,B)`, with tiny
    /// negatives clamped to zero.
    pub fn mutual_information(&self) -> Result<f64> {
        if self.first.is_none() {
            return Err(Error::InvalidParameter(
                "mutual information needs a two-component table".into(),
            ));
        }
        let ha = -self.marginal_first().values().map(|&p| xlog2(p)).sum::<f64>();
        let hb = -self.marginal_block().values().map(|&p| xlog2(p)).sum::<f64>();
        let i = ha + hb - self.entropy();
        Ok(if i < 0.0 && i > -1e-12 { 0.0 } else { i })
    }

    /// Reinterpret a plain d-block table as a two-component table over
    /// (first `d1` symbols, remaining `d - d1` symbols).
    pub fn split_block(&self, d1: usize) -> Result<EmpiricalDist> {
        if self.first.is_some() {
            return Err(Error::InvalidParameter(
                "split_block applies to single-component tables".into(),
            ));
        }
        if d1 == 0 || d1 >= self.d {
            return Err(Error::InvalidParameter(format!(
                "split point {d1} must satisfy 1 <= d1 < d = {}",
                self.d
            )));
        }
        let alpha = self.block_alphabet.size() as u64;
        let tail = alpha.pow((self.d - d1) as u32);
        let mut table = BTreeMap::new();
        for (&(_, b), &p) in &self.table {
            *table.entry((b / tail, b % tail)).or_insert(0.0) += p;
        }
        Ok(EmpiricalDist {
            kind: self.kind,
            d: self.d - d1,
            n: self.n,
            block_alphabet: self.block_alphabet.clone(),
            first: Some(FirstComponent::Block {
                alphabet: self.block_alphabet.size(),
                d: d1,
            }),
            table,
        })
    }

    fn render_block(&self, alphabet: &Alphabet, d: usize, mut key: u64) -> String {
        let alpha = alphabet.size() as u64;
        let mut symbols = vec![0u32; d];
        for i in (0..d).rev() {
            symbols[i] = (key % alpha) as u32;
            key /= alpha;
        }
        symbols.iter().map(|&s| alphabet.render(s)).collect()
    }

    /// CSV rows `key,probability` (or `first,block,probability`).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.first {
            None => {
                out.push_str("block,probability\n");
                for (&(_, b), &p) in &self.table {
                    out.push_str(&format!(
                        "{},{p:.12e}\n",
                        self.render_block(&self.block_alphabet, self.d, b)
                    ));
                }
            }
            Some(FirstComponent::State { .. }) => {
                out.push_str("state,block,probability\n");
                for (&(f, b), &p) in &self.table {
                    out.push_str(&format!(
                        "{f},{},{p:.12e}\n",
                        self.render_block(&self.block_alphabet, self.d, b)
                    ));
                }
            }
            Some(FirstComponent::Block { alphabet, d }) => {
                out.push_str("x_block,y_block,probability\n");
                let first_alpha = Alphabet::new(*alphabet).unwrap();
                for (&(f, b), &p) in &self.table {
                    out.push_str(&format!(
                        "{},{},{p:.12e}\n",
                        self.render_block(&first_alpha, *d, f),
                        self.render_block(&self.block_alphabet, self.d, b)
                    ));
                }
            }
        }
        out
    }
}

/// Guaranteed bound `(d alpha^d / n) log2(n/d)` on the entropy gap between
/// the sliding-window and cyclic sliding-window estimates at order `d`.
pub fn entropy_continuity_bound(n: usize, d: usize, alpha: u32) -> f64 {
    debug_assert!(d <= n);
    let theta = d as f64 * (alpha as f64).powi(d as i32) / n as f64;
    theta * (n as f64 / d as f64).log2()
}
