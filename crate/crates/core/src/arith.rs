//! Segmented sieves for the Möbius function, the Liouville function and the
//! squarefree indicator.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symbolic::{Alphabet, Symbol};

/// Segment length for the sieve; also the unit of parallel work.
pub const SEGMENT_LEN: u64 = 1 << 20;

/// Default upper bound (exclusive) for sieve requests.
pub const DEFAULT_MAX_N: u64 = 100_000_000;

/// Environment variable overriding [`DEFAULT_MAX_N`].
pub const MAX_N_ENV: &str = "GENLAB_MAX_N";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticKind {
    Mobius,
    Liouville,
    Squarefree,
}

impl ArithmeticKind {
    pub const ALL: [ArithmeticKind; 3] = [Self::Mobius, Self::Liouville, Self::Squarefree];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Mobius => "mobius",
            Self::Liouville => "liouville",
            Self::Squarefree => "squarefree",
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        let symbols = match self {
            Self::Mobius => vec![-1, 0, 1],
            Self::Liouville => vec![-1, 1],
            Self::Squarefree => vec![0, 1],
        };
        Alphabet::new(symbols).expect("static alphabet")
    }
}

impl fmt::Display for ArithmeticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArithmeticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mobius" | "moebius" | "mu" => Ok(Self::Mobius),
            "liouville" | "lambda" => Ok(Self::Liouville),
            "squarefree" | "mu2" => Ok(Self::Squarefree),
            other => invalid(format!("unknown arithmetic kind {other:?}")),
        }
    }
}

/// Values of one arithmetic function on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveSegment {
    pub kind: ArithmeticKind,
    pub lo: u64,
    pub hi: u64,
    pub values: Vec<Symbol>,
}

impl SieveSegment {
    pub fn get(&self, n: u64) -> Symbol {
        self.values[(n - self.lo) as usize]
    }
}

/// Sieve front end carrying the capacity limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sieve {
    max_n: u64,
}

impl Default for Sieve {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_MAX_N,
        }
    }
}

impl Sieve {
    pub fn with_limit(max_n: u64) -> Self {
        Self { max_n }
    }

    /// Reads the capacity from `GENLAB_MAX_N`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_N_ENV) {
            Ok(v) => {
                let max_n = v
                    .trim()
                    .replace('_', "")
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidInput(format!("{MAX_N_ENV}={v:?} is not an integer")))?;
                Ok(Self { max_n })
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn max_n(&self) -> u64 {
        self.max_n
    }

    pub fn check(&self, hi: u64) -> Result<()> {
        if hi > self.max_n {
            return Err(Error::CapacityExceeded {
                requested: hi,
                limit: self.max_n,
            });
        }
        Ok(())
    }

    /// `f(n)` for `lo <= n < hi`.
    pub fn range(&self, kind: ArithmeticKind, lo: u64, hi: u64) -> Result<SieveSegment> {
        if lo < 1 || lo >= hi {
            return invalid(format!("sieve range needs 1 <= lo < hi, got [{lo}, {hi})"));
        }
        self.check(hi)?;
        Ok(SieveSegment {
            kind,
            lo,
            hi,
            values: sieve_values(kind, lo, hi),
        })
    }

    /// `sum_{n <= n_max} f(n)` as an exact integer.
    pub fn summatory(&self, kind: ArithmeticKind, n_max: u64) -> Result<i64> {
        if n_max < 1 {
            return invalid("summatory needs N >= 1");
        }
        self.check(n_max + 1)?;
        let primes = primes_up_to(isqrt(n_max));
        let total = segment_bounds(1, n_max + 1)
            .into_par_iter()
            .map(|(a, b)| {
                sieve_segment(kind, a, b, &primes)
                    .iter()
                    .map(|&v| v as i64)
                    .sum::<i64>()
            })
            .sum();
        Ok(total)
    }
}

/// Convenience wrapper over [`Sieve::default`].
pub fn sieve_range(kind: ArithmeticKind, lo: u64, hi: u64) -> Result<SieveSegment> {
    Sieve::default().range(kind, lo, hi)
}

/// Convenience wrapper over [`Sieve::default`].
pub fn summatory(kind: ArithmeticKind, n_max: u64) -> Result<i64> {
    Sieve::default().summatory(kind, n_max)
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn segment_bounds(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = (a + SEGMENT_LEN).min(hi);
        out.push((a, b));
        a = b;
    }
    out
}

/// Unchecked sieve of `[lo, hi)`, parallel over fixed segments and
/// concatenated in order.
pub(crate) fn sieve_values(kind: ArithmeticKind, lo: u64, hi: u64) -> Vec<Symbol> {
    debug_assert!(lo >= 1 && lo <= hi);
    if lo == hi {
        return Vec::new();
    }
    let primes = primes_up_to(isqrt(hi - 1));
    let parts: Vec<Vec<Symbol>> = segment_bounds(lo, hi)
        .into_par_iter()
        .map(|(a, b)| sieve_segment(kind, a, b, &primes))
        .collect();
    parts.concat()
}

fn first_multiple(p: u64, lo: u64) -> u64 {
    lo.div_ceil(p) * p
}

/// One segment `[lo, hi)`; `primes` must cover `sqrt(hi - 1)`.
fn sieve_segment(kind: ArithmeticKind, lo: u64, hi: u64, primes: &[u64]) -> Vec<Symbol> {
    let len = (hi - lo) as usize;
    let top = hi - 1;
    match kind {
        ArithmeticKind::Squarefree => {
            let mut vals = vec![1 as Symbol; len];
            for &p in primes {
                let sq = p * p;
                if sq > top {
                    break;
                }
                let mut m = first_multiple(sq, lo);
                while m < hi {
                    vals[(m - lo) as usize] = 0;
                    m += sq;
                }
            }
            vals
        }
        ArithmeticKind::Mobius => {
            // product of the small prime factors found so far
            let mut prod = vec![1u64; len];
            let mut vals = vec![1 as Symbol; len];
            for &p in primes {
                if p * p > top {
                    break;
                }
                let mut m = first_multiple(p, lo);
                while m < hi {
                    let i = (m - lo) as usize;
                    prod[i] *= p;
                    vals[i] = -vals[i];
                    m += p;
                }
                let sq = p * p;
                let mut m = first_multiple(sq, lo);
                while m < hi {
                    vals[(m - lo) as usize] = 0;
                    m += sq;
                }
            }
            for (i, v) in vals.iter_mut().enumerate() {
                // a cofactor above sqrt(hi) is a single prime
                if *v != 0 && prod[i] < lo + i as u64 {
                    *v = -*v;
                }
            }
            vals
        }
        ArithmeticKind::Liouville => {
            let mut prod = vec![1u64; len];
            let mut vals = vec![1 as Symbol; len];
            for &p in primes {
                if p * p > top {
                    break;
                }
                let mut pk = p;
                loop {
                    let mut m = first_multiple(pk, lo);
                    while m < hi {
                        let i = (m - lo) as usize;
                        prod[i] *= p;
                        vals[i] = -vals[i];
                        m += pk;
                    }
                    match pk.checked_mul(p) {
                        Some(next) if next <= top => pk = next,
                        _ => break,
                    }
                }
            }
            for (i, v) in vals.iter_mut().enumerate() {
                if prod[i] < lo + i as u64 {
                    *v = -*v;
                }
            }
            vals
        }
    }
}

/// Reference evaluation by trial division. Used for per-index sequence
/// lookups and as the test oracle for the sieve.
pub fn value_by_factorization(kind: ArithmeticKind, n: u64) -> Symbol {
    assert!(n >= 1, "arithmetic functions are defined on n >= 1");
    let mut rest = n;
    let mut omega_total = 0u32;
    let mut squarefree = true;
    let mut distinct = 0u32;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            distinct += 1;
            omega_total += e;
            if e > 1 {
                squarefree = false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        distinct += 1;
        omega_total += 1;
    }
    match kind {
        ArithmeticKind::Squarefree => Symbol::from(squarefree),
        ArithmeticKind::Mobius if !squarefree => 0,
        ArithmeticKind::Mobius => {
            if distinct.is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
        ArithmeticKind::Liouville => {
            if omega_total.is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
    }
}
