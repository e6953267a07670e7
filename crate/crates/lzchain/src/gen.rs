//! Deterministic, seedable sequence generators for test corpora.
//!
//! Randomness comes from SplitMix64 (Steele, Lea & Flood's public mixing
//! function with 64-bit state), implemented inline so generated corpora are
//! bit-identical across platforms and dependency versions. Draws happen in
//! sequence order, one draw per random symbol.

use crate::seq::{pair, Alphabet, PairedSequence, Sequence};
use crate::{Error, Result};

/// Default dominance factor for [`oscillating_pair`]: each segment must be
/// at least this many times the total length of all earlier segments.
pub const DEFAULT_DOMINANCE_FACTOR: u32 = 4;

/// SplitMix64 generator: 64-bit state, fixed public constants.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }
}

fn check_distribution(probs: &[f64], len: usize, what: &str) -> Result<()> {
    if probs.len() != len {
        return Err(Error::InvalidParameter(format!(
            "{what} needs {len} probabilities, got {}",
            probs.len()
        )));
    }
    if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidParameter(format!(
            "{what} probabilities must lie in [0, 1]"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "{what} probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

fn sample(probs: &[f64], u: f64) -> u32 {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u32;
        }
    }
    (probs.len() - 1) as u32
}

/// I.i.d. sample of length `n` from the given symbol distribution.
pub fn iid(alphabet: Alphabet, n: usize, probs: &[f64], seed: u64) -> Result<Sequence> {
    check_distribution(probs, alphabet.size() as usize, "iid")?;
    let mut rng = SplitMix64::new(seed);
    let symbols = (0..n).map(|_| sample(probs, rng.next_f64())).collect();
    Sequence::new(alphabet, symbols)
}

/// Stationary distribution of a row-stochastic matrix by power iteration.
fn stationary(transition: &[Vec<f64>]) -> Vec<f64> {
    let m = transition.len();
    let mut pi = vec![1.0 / m as f64; m];
    for _ in 0..100_000 {
        let mut next = vec![0.0; m];
        for (i, row) in transition.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                next[j] += pi[i] * p;
            }
        }
        let delta: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if delta < 1e-13 {
            break;
        }
    }
    pi
}

/// Markov chain sample of length `n`. The initial state is drawn from the
/// stationary distribution obtained by power iteration.
pub fn markov(
    alphabet: Alphabet,
    n: usize,
    transition: &[Vec<f64>],
    seed: u64,
) -> Result<Sequence> {
    let m = alphabet.size() as usize;
    if transition.len() != m {
        return Err(Error::InvalidParameter(format!(
            "transition matrix needs {m} rows, got {}",
            transition.len()
        )));
    }
    for (i, row) in transition.iter().enumerate() {
        check_distribution(row, m, &format!("transition row {i}"))?;
    }
    let mut rng = SplitMix64::new(seed);
    let pi = stationary(transition);
    let mut symbols = Vec::with_capacity(n);
    if n > 0 {
        let mut state = sample(&pi, rng.next_f64());
        symbols.push(state);
        for _ in 1..n {
            state = sample(&transition[state as usize], rng.next_f64());
            symbols.push(state);
        }
    }
    Sequence::new(alphabet, symbols)
}

/// The pattern repeated (and truncated) to length `n`.
pub fn periodic(alphabet: Alphabet, pattern: &[u32], n: usize) -> Result<Sequence> {
    if pattern.is_empty() {
        return Err(Error::InvalidParameter("pattern must be nonempty".into()));
    }
    let symbols = (0..n).map(|i| pattern[i % pattern.len()]).collect();
    Sequence::new(alphabet, symbols)
}

/// An oscillating pair with its segment layout. Even-indexed segments have
/// `x` all-zero and `y` drawn by coin flips; odd-indexed segments have `x`
/// drawn by coin flips and `y` copying `x`.
#[derive(Debug, Clone)]
pub struct OscillatingPair {
    pub pair: PairedSequence,
    /// Half-open `(start, end)` ranges of the segments.
    pub segments: Vec<(usize, usize)>,
}

impl OscillatingPair {
    /// Range of the last even-indexed segment (x constant, y random).
    pub fn last_even_segment(&self) -> (usize, usize) {
        let last = self.segments.len() - 1;
        self.segments[last - last % 2]
    }

    /// Range of the last odd-indexed segment (x random, y = x), if any.
    pub fn last_odd_segment(&self) -> Option<(usize, usize)> {
        let last = self.segments.len().checked_sub(1)?;
        let idx = if last % 2 == 1 { last } else { last.checked_sub(1)? };
        Some(self.segments[idx])
    }
}

/// Build the binary oscillating pair over the given segment lengths. Every
/// segment after the first must be at least `dominance_factor` times the
/// total length of all earlier segments (so lengths grow strictly).
pub fn oscillating_pair(
    segment_lengths: &[usize],
    dominance_factor: u32,
    seed: u64,
) -> Result<OscillatingPair> {
    if segment_lengths.is_empty() || segment_lengths.contains(&0) {
        return Err(Error::InvalidParameter(
            "segment lengths must be nonempty and positive".into(),
        ));
    }
    let mut running = 0usize;
    for (i, &len) in segment_lengths.iter().enumerate() {
        if i > 0 && (len as u128) < dominance_factor as u128 * running as u128 {
            return Err(Error::DominanceViolated(format!(
                "segment {i} has length {len} < {dominance_factor} x {running}"
            )));
        }
        running += len;
    }

    let mut rng = SplitMix64::new(seed);
    let mut xs = Vec::with_capacity(running);
    let mut ys = Vec::with_capacity(running);
    let mut segments = Vec::with_capacity(segment_lengths.len());
    let mut start = 0usize;
    for (i, &len) in segment_lengths.iter().enumerate() {
        for _ in 0..len {
            if i % 2 == 0 {
                xs.push(0);
                ys.push((rng.next_u64() & 1) as u32);
            } else {
                let b = (rng.next_u64() & 1) as u32;
                xs.push(b);
                ys.push(b);
            }
        }
        segments.push((start, start + len));
        start += len;
    }
    let x = Sequence::new(Alphabet::new(2)?, xs)?;
    let y = Sequence::new(Alphabet::new(2)?, ys)?;
    Ok(OscillatingPair {
        pair: pair(x, y)?,
        segments,
    })
}

/// Transition matrix of the built-in 2-state chain.
pub fn builtin_markov_transition() -> Vec<Vec<f64>> {
    vec![vec![0.9, 0.1], vec![0.3, 0.7]]
}

/// Analytic entropy rate of a 2-state chain with flip probabilities `p` and
/// `q`, in bits per symbol.
pub fn two_state_entropy_rate(p: f64, q: f64) -> f64 {
    let h2 = |t: f64| -> f64 {
        if t <= 0.0 || t >= 1.0 {
            0.0
        } else {
            -t * t.log2() - (1.0 - t) * (1.0 - t).log2()
        }
    };
    (q * h2(p) + p * h2(q)) / (p + q)
}

/// The built-in single-sequence corpus at length `n`: constant, periodic
/// patterns of periods 2, 3 and 6, fair and biased i.i.d. samples, a 2-state
/// Markov sample, and the oscillating pair viewed over its product alphabet.
pub fn builtin_sequences(n: usize) -> Result<Vec<(String, Sequence)>> {
    let bin = || Alphabet::new(2).map_err(Error::from);
    let mut out: Vec<(String, Sequence)> = vec![
        ("constant".into(), periodic(bin()?, &[0], n)?),
        ("periodic2".into(), periodic(bin()?, &[0, 1], n)?),
        ("periodic3".into(), periodic(bin()?, &[0, 0, 1], n)?),
        ("periodic6".into(), periodic(bin()?, &[0, 1, 1, 0, 1, 0], n)?),
        ("iid_fair".into(), iid(bin()?, n, &[0.5, 0.5], 0x5eed_0001)?),
        ("iid_biased".into(), iid(bin()?, n, &[0.8, 0.2], 0x5eed_0002)?),
        (
            "markov2".into(),
            markov(bin()?, n, &builtin_markov_transition(), 0x5eed_0003)?,
        ),
    ];
    let osc = builtin_oscillating(n)?;
    out.push(("oscillating".into(), osc.pair.product_sequence()));
    Ok(out)
}

/// The built-in oscillating pair at total length `n`: two segments of
/// lengths `(floor(n/5), n - floor(n/5))`, which meets the default
/// dominance factor.
pub fn builtin_oscillating(n: usize) -> Result<OscillatingPair> {
    let first = (n / 5).max(1);
    oscillating_pair(&[first, n - first], DEFAULT_DOMINANCE_FACTOR, 0x5eed_0004)
}

/// The built-in pair corpus at length `n`: an identical pair, an independent
/// pair, a noisy copy, and the oscillating pair.
pub fn builtin_pairs(n: usize) -> Result<Vec<(String, PairedSequence)>> {
    let bin = || Alphabet::new(2).map_err(Error::from);
    let x = iid(bin()?, n, &[0.5, 0.5], 0x5eed_0010)?;
    let identical = pair(x.clone(), x.clone())?;
    let independent = pair(x.clone(), iid(bin()?, n, &[0.5, 0.5], 0x5eed_0011)?)?;
    let mut rng = SplitMix64::new(0x5eed_0012);
    let noisy_syms: Vec<u32> = x
        .symbols()
        .iter()
        .map(|&s| if rng.next_f64() < 0.1 { 1 - s } else { s })
        .collect();
    let noisy = pair(x, Sequence::new(bin()?, noisy_syms)?)?;
    Ok(vec![
        ("identical".into(), identical),
        ("independent".into(), independent),
        ("noisy_copy".into(), noisy),
        ("oscillating".into(), builtin_oscillating(n)?.pair),
    ])
}
