//! Finite alphabets and index-addressed symbolic sequences.
//!
//! A sequence is a pure function `n -> x_n` over 0-based indices. Letters are
//! handled internally as positions in the alphabet (`u8`), which keeps window
//! codes dense; the symbol labels themselves are small signed integers so the
//! same machinery covers `{0,1}`, `{0,1,2}` and the Möbius alphabet `{-1,0,1}`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{self, ArithmeticKind};
use crate::error::{invalid, Error, Result};

pub type Symbol = i8;

/// Ordered set of distinct symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Symbol>", into = "Vec<Symbol>")]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return invalid("alphabet must be nonempty");
        }
        if symbols.len() > u8::MAX as usize {
            return invalid("alphabet too large");
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return invalid(format!("duplicate symbol {s} in alphabet"));
            }
        }
        Ok(Self { symbols })
    }

    /// `{0, 1, ..., size-1}`.
    pub fn digits(size: u8) -> Self {
        Self {
            symbols: (0..size as Symbol).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, letter: u8) -> Symbol {
        self.symbols[letter as usize]
    }

    pub fn letter_of(&self, symbol: Symbol) -> Option<u8> {
        self.symbols.iter().position(|&s| s == symbol).map(|p| p as u8)
    }

    fn compact(&self) -> bool {
        self.symbols.iter().all(|s| (0..=9).contains(s))
    }

    /// Serialized form of a word over this alphabet: digits concatenated
    /// when every symbol is a single digit, comma-separated otherwise.
    pub fn format_word(&self, letters: &[u8]) -> String {
        let syms = letters.iter().map(|&l| self.symbol(l).to_string());
        if self.compact() {
            syms.collect()
        } else {
            syms.collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<Vec<u8>> {
        let tokens: Vec<String> = if self.compact() && !s.contains(',') {
            s.chars().map(|c| c.to_string()).collect()
        } else {
            s.split(',').map(|t| t.trim().to_string()).collect()
        };
        tokens
            .iter()
            .map(|t| {
                let sym: Symbol = t
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad symbol {t:?} in word {s:?}")))?;
                self.letter_of(sym)
                    .ok_or_else(|| Error::InvalidInput(format!("symbol {sym} not in alphabet")))
            })
            .collect()
    }
}

impl TryFrom<Vec<Symbol>> for Alphabet {
    type Error = Error;

    fn try_from(v: Vec<Symbol>) -> Result<Self> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<Symbol> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.symbols)
    }
}

/// A finite word, stored as symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Symbol>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|s| (0..=9).contains(s)) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// A total, deterministic map from index `n >= 0` to a letter of a fixed
/// alphabet. Implementations must be safe to evaluate concurrently.
pub trait SymbolicSequence: Send + Sync {
    fn alphabet(&self) -> &Alphabet;

    fn name(&self) -> &str;

    /// Alphabet position of `x_n`.
    fn letter(&self, n: u64) -> u8;

    /// Writes `x_start, x_{start+1}, ...` into `out`.
    fn fill(&self, start: u64, out: &mut [u8]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.letter(start + i as u64);
        }
    }

    fn symbol(&self, n: u64) -> Symbol {
        self.alphabet().symbol(self.letter(n))
    }
}

/// `x_start ... x_{start+length-1}`.
pub fn window(x: &dyn SymbolicSequence, start: u64, length: usize) -> Result<Word> {
    if length == 0 {
        return invalid("window length must be positive");
    }
    let mut letters = vec![0u8; length];
    x.fill(start, &mut letters);
    Ok(Word(letters.iter().map(|&l| x.alphabet().symbol(l)).collect()))
}

/// Piecewise-constant sequence given by a sorted table of block starts.
///
/// Block `i` covers indices `starts[i] .. starts[i+1]` and carries
/// `letters[i]`; the last block extends to infinity. Lookup is a binary
/// search, bulk fills walk the blocks.
#[derive(Debug, Clone)]
pub struct BlockSequence {
    name: String,
    alphabet: Alphabet,
    starts: Vec<u64>,
    letters: Vec<u8>,
}

impl BlockSequence {
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        starts: Vec<u64>,
        letters: Vec<u8>,
    ) -> Result<Self> {
        if starts.is_empty() || starts[0] != 0 || starts.len() != letters.len() {
            return invalid("block table must start at 0 and pair every start with a letter");
        }
        if starts.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("block starts must be strictly increasing");
        }
        if letters.iter().any(|&l| l as usize >= alphabet.len()) {
            return invalid("block letter outside alphabet");
        }
        Ok(Self {
            name: name.into(),
            alphabet,
            starts,
            letters,
        })
    }

    fn block_of(&self, n: u64) -> usize {
        self.starts.partition_point(|&s| s <= n) - 1
    }

    /// Block starts (0-based indices) of the table.
    pub fn block_starts(&self) -> &[u64] {
        &self.starts
    }
}

impl SymbolicSequence for BlockSequence {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn letter(&self, n: u64) -> u8 {
        self.letters[self.block_of(n)]
    }

    fn fill(&self, start: u64, out: &mut [u8]) {
        let mut b = self.block_of(start);
        let mut pos = 0usize;
        let mut n = start;
        while pos < out.len() {
            let end = self.starts.get(b + 1).copied().unwrap_or(u64::MAX);
            let take = ((end - n) as usize).min(out.len() - pos);
            out[pos..pos + take].fill(self.letters[b]);
            pos += take;
            n += take as u64;
            b += 1;
        }
    }
}

/// The three constructed points of the full shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleName {
    /// `x_n = 0` iff `2^{2k} <= n+1 < 2^{2k+1}`, else 1.
    Example1,
    /// `x_n = 1` iff `2^{k^2-1} <= n+1 < 2^{k^2}` for some `k >= 1`, else 0.
    Example2,
    /// `x_n = r` iff `3^{3k+r} <= n+1 < 3^{3k+r+1}`.
    Example3,
}

impl ExampleName {
    pub const ALL: [ExampleName; 3] = [Self::Example1, Self::Example2, Self::Example3];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Example1 => "example1",
            Self::Example2 => "example2",
            Self::Example3 => "example3",
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(Self::Example1),
            "example2" => Ok(Self::Example2),
            "example3" => Ok(Self::Example3),
            other => invalid(format!("unknown example sequence {other:?}")),
        }
    }
}

/// Builds the block table for one of the three example sequences.
///
/// Every block boundary sits at `n + 1 = b^m`, i.e. 0-based index `b^m - 1`.
pub fn example_sequence(name: ExampleName) -> BlockSequence {
    let (alphabet, base, letter_for): (Alphabet, u64, fn(u32) -> u8) = match name {
        // [2^m, 2^{m+1}) carries 0 for even m, 1 for odd m
        ExampleName::Example1 => (Alphabet::digits(2), 2, |m| (m % 2) as u8),
        // ones exactly when m + 1 is a perfect square
        ExampleName::Example2 => (Alphabet::digits(2), 2, |m| {
            let k = ((m + 1) as f64).sqrt().round() as u32;
            u8::from(k * k == m + 1)
        }),
        ExampleName::Example3 => (Alphabet::digits(3), 3, |m| (m % 3) as u8),
    };
    let mut starts = Vec::new();
    let mut letters: Vec<u8> = Vec::new();
    let mut power: u64 = 1;
    let mut m: u32 = 0;
    loop {
        let letter = letter_for(m);
        if letters.last() != Some(&letter) {
            starts.push(power - 1);
            letters.push(letter);
        }
        match power.checked_mul(base) {
            Some(p) => power = p,
            None => break,
        }
        m += 1;
    }
    BlockSequence::new(name.as_str(), alphabet, starts, letters)
        .expect("example block tables are well formed")
}

/// Looks up a sequence by name: the three examples, `mobius`, `liouville`,
/// `squarefree` (value at index n is f(n+1)), and `const:<digit>`.
pub fn sequence_by_name(name: &str) -> Result<Arc<dyn SymbolicSequence>> {
    if let Ok(ex) = name.parse::<ExampleName>() {
        return Ok(Arc::new(example_sequence(ex)));
    }
    if let Ok(kind) = name.parse::<ArithmeticKind>() {
        return Ok(Arc::new(ArithmeticSequence::new(kind)));
    }
    if let Some(rest) = name.strip_prefix("const:") {
        let sym: u8 = rest
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad constant symbol {rest:?}")))?;
        if sym > 9 {
            return invalid("constant symbol must be a digit");
        }
        return Ok(Arc::new(ConstantSequence::new(Alphabet::digits(sym + 1), sym)));
    }
    invalid(format!("unknown sequence {name:?}"))
}

/// `x_n = c` for every n.
#[derive(Debug, Clone)]
pub struct ConstantSequence {
    name: String,
    alphabet: Alphabet,
    letter: u8,
}

impl ConstantSequence {
    pub fn new(alphabet: Alphabet, letter: u8) -> Self {
        assert!((letter as usize) < alphabet.len(), "letter outside alphabet");
        let name = format!("const:{}", alphabet.symbol(letter));
        Self {
            name,
            alphabet,
            letter,
        }
    }
}

impl SymbolicSequence for ConstantSequence {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn letter(&self, _n: u64) -> u8 {
        self.letter
    }

    fn fill(&self, _start: u64, out: &mut [u8]) {
        out.fill(self.letter);
    }
}

/// Infinite repetition of a finite word.
#[derive(Debug, Clone)]
pub struct PeriodicSequence {
    name: String,
    alphabet: Alphabet,
    period: Vec<u8>,
}

impl PeriodicSequence {
    pub fn new(name: impl Into<String>, alphabet: Alphabet, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return invalid("period must be nonempty");
        }
        if period.iter().any(|&l| l as usize >= alphabet.len()) {
            return invalid("period letter outside alphabet");
        }
        Ok(Self {
            name: name.into(),
            alphabet,
            period,
        })
    }
}

impl SymbolicSequence for PeriodicSequence {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn letter(&self, n: u64) -> u8 {
        self.period[(n % self.period.len() as u64) as usize]
    }
}

/// An arithmetic function read as a point of the shift: `x_n = f(n + 1)`.
#[derive(Debug, Clone)]
pub struct ArithmeticSequence {
    kind: ArithmeticKind,
    alphabet: Alphabet,
}

impl ArithmeticSequence {
    pub fn new(kind: ArithmeticKind) -> Self {
        Self {
            kind,
            alphabet: kind.alphabet(),
        }
    }

    pub fn kind(&self) -> ArithmeticKind {
        self.kind
    }
}

impl SymbolicSequence for ArithmeticSequence {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn name(&self) -> &str {
        self.kind.as_str()
    }

    fn letter(&self, n: u64) -> u8 {
        let v = arith::value_by_factorization(self.kind, n + 1);
        self.alphabet.letter_of(v).expect("value in alphabet")
    }

    fn fill(&self, start: u64, out: &mut [u8]) {
        if out.is_empty() {
            return;
        }
        let values = arith::sieve_values(self.kind, start + 1, start + 1 + out.len() as u64);
        for (slot, v) in out.iter_mut().zip(values) {
            *slot = self.alphabet.letter_of(v).expect("value in alphabet");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(x: &dyn SymbolicSequence, count: usize) -> Vec<Symbol> {
        (0..count as u64).map(|n| x.symbol(n)).collect()
    }

    #[test]
    fn example_prefixes() {
        let ex1 = example_sequence(ExampleName::Example1);
        assert_eq!(letters(&ex1, 7), vec![0, 1, 1, 0, 0, 0, 0]);
        let ex3 = example_sequence(ExampleName::Example3);
        assert_eq!(letters(&ex3, 8), vec![0, 0, 1, 1, 1, 1, 1, 1]);
        let ex2 = example_sequence(ExampleName::Example2);
        // n+1 = 1 lies in [2^0, 2^1); the next ones-block is [8, 16)
        assert_eq!(letters(&ex2, 4), vec![1, 0, 0, 0]);
        assert_eq!(ex2.symbol(6), 0);
        assert_eq!(ex2.symbol(7), 1);
        assert_eq!(ex2.symbol(14), 1);
        assert_eq!(ex2.symbol(15), 0);
    }

    #[test]
    fn windows() {
        let ex1 = example_sequence(ExampleName::Example1);
        assert_eq!(window(&ex1, 0, 3).unwrap().to_string(), "011");
        let ex3 = example_sequence(ExampleName::Example3);
        assert_eq!(window(&ex3, 2, 6).unwrap().to_string(), "111111");
        for n in 0..50 {
            assert_eq!(window(&ex3, n, 1).unwrap().0, vec![ex3.symbol(n)]);
        }
        assert!(window(&ex1, 0, 0).is_err());
    }

    #[test]
    fn example1_zero_blocks_are_constant() {
        let ex1 = example_sequence(ExampleName::Example1);
        for k in 0..=12u32 {
            let lo = 1u64 << (2 * k);
            let hi = 1u64 << (2 * k + 1);
            let mut buf = vec![9u8; (hi - lo) as usize];
            ex1.fill(lo - 1, &mut buf);
            assert!(buf.iter().all(|&l| l == 0), "block k={k}");
            for n in (lo - 1)..(hi - 1) {
                assert_eq!(ex1.letter(n), 0);
            }
        }
    }

    #[test]
    fn example3_changes_only_at_powers_of_three() {
        let ex3 = example_sequence(ExampleName::Example3);
        let limit = 3u64.pow(9);
        let mut prev = ex3.letter(0);
        for n in 1..limit {
            let cur = ex3.letter(n);
            let is_power = {
                let mut p = 1u64;
                while p < n + 1 {
                    p *= 3;
                }
                p == n + 1
            };
            assert_eq!(cur != prev, is_power, "n = {n}");
            prev = cur;
        }
    }

    #[test]
    fn example2_matches_defining_inequality() {
        let ex2 = example_sequence(ExampleName::Example2);
        let limit = 1u64 << 17;
        let mut buf = vec![0u8; limit as usize];
        ex2.fill(0, &mut buf);
        for n in 0..limit {
            let m = n + 1;
            let one = (1..=4u32).any(|k| (1u64 << (k * k - 1)) <= m && m < (1u64 << (k * k)));
            assert_eq!(buf[n as usize], u8::from(one), "n = {n}");
            assert_eq!(ex2.letter(n), u8::from(one));
        }
    }

    #[test]
    fn fill_agrees_with_pointwise_lookup_across_blocks() {
        for name in ExampleName::ALL {
            let x = example_sequence(name);
            for start in [0u64, 5, 62, 255, 1000, 6560] {
                let mut buf = vec![0u8; 700];
                x.fill(start, &mut buf);
                for (i, &l) in buf.iter().enumerate() {
                    assert_eq!(l, x.letter(start + i as u64));
                }
            }
        }
    }

    #[test]
    fn concurrent_evaluation_is_deterministic() {
        let x: Arc<dyn SymbolicSequence> = Arc::new(example_sequence(ExampleName::Example3));
        let reference: Vec<u8> = (0..20_000).map(|n| x.letter(n * 7919)).collect();
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let x = Arc::clone(&x);
                std::thread::spawn(move || (0..20_000).map(|n| x.letter(n * 7919)).collect::<Vec<u8>>())
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), reference);
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!("example4".parse::<ExampleName>().is_err());
        assert!(sequence_by_name("fibonacci").is_err());
        assert!(sequence_by_name("const:x").is_err());
        assert_eq!(sequence_by_name("const:1").unwrap().symbol(123), 1);
    }

    #[test]
    fn alphabet_validation_and_word_format() {
        assert!(Alphabet::new(vec![]).is_err());
        assert!(Alphabet::new(vec![0, 1, 0]).is_err());
        let pm = Alphabet::new(vec![-1, 0, 1]).unwrap();
        assert_eq!(pm.format_word(&[0, 2, 1]), "-1,1,0");
        assert_eq!(pm.parse_word("-1,1,0").unwrap(), vec![0, 2, 1]);
        let bin = Alphabet::digits(2);
        assert_eq!(bin.format_word(&[0, 1, 1]), "011");
        assert_eq!(bin.parse_word("011").unwrap(), vec![0, 1, 1]);
        assert!(bin.parse_word("012").is_err());
    }

    #[test]
    fn arithmetic_sequence_reads_f_of_n_plus_one() {
        let mu = ArithmeticSequence::new(ArithmeticKind::Mobius);
        let vals: Vec<Symbol> = (0..10).map(|n| mu.symbol(n)).collect();
        assert_eq!(vals, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
        let mut buf = vec![0u8; 10];
        mu.fill(0, &mut buf);
        let filled: Vec<Symbol> = buf.iter().map(|&l| mu.alphabet().symbol(l)).collect();
        assert_eq!(filled, vals);
    }
}
