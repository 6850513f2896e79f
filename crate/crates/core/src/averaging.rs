//! Counting, empirical and logarithmic empirical measures of a sequence, and
//! density estimates for occurrence sets of a word.
//!
//! Position `j` (0-based) carries the window `x_j ... x_{j+k-1}`. The Cesàro
//! average over the first `N` positions weights each by `1/N`; the harmonic
//! average weights position `j` by `1/(j+1)` and divides by `log N` or by the
//! harmonic number `H_N`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measures::{encode, word_count, CylinderMeasure};
use crate::numeric::{KahanSum, Rational, Scalar};
use crate::symbolic::{Alphabet, SymbolicSequence};

/// Positions handled per parallel work item.
pub const CHUNK_LEN: u64 = 1 << 18;

const FILL_LEN: usize = 1 << 16;

/// Largest number of words a depth/alphabet pair may produce.
pub const MAX_WORDS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AveragingMode {
    Cesaro,
    Logarithmic,
}

impl AveragingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Cesaro => "cesaro",
            Self::Logarithmic => "logarithmic",
        }
    }
}

impl fmt::Display for AveragingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AveragingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cesaro" => Ok(Self::Cesaro),
            "log" | "logarithmic" | "harmonic" => Ok(Self::Logarithmic),
            other => invalid(format!("unknown averaging mode {other:?}")),
        }
    }
}

/// How the harmonic sum is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogNormalization {
    /// Divide by `log N`; total mass `H_N / log N`.
    Log,
    /// Divide by `H_N`; a probability measure.
    Harmonic,
}

fn check_depth(alphabet: &Alphabet, k: usize) -> Result<()> {
    if k == 0 {
        return invalid("depth must be positive");
    }
    let words = alphabet
        .len()
        .checked_pow(k as u32)
        .filter(|&w| w <= MAX_WORDS);
    if words.is_none() {
        return invalid(format!(
            "depth {k} over {} letters exceeds {MAX_WORDS} words",
            alphabet.len()
        ));
    }
    Ok(())
}

/// Calls `f(j, code)` for every position `start <= j < end`, where `code`
/// encodes the window `x_j ... x_{j+k-1}`.
pub(crate) fn for_each_window(
    x: &dyn SymbolicSequence,
    k: usize,
    start: u64,
    end: u64,
    mut f: impl FnMut(u64, usize),
) {
    let a = x.alphabet().len();
    let high = a.pow((k - 1) as u32);
    let mut buf = vec![0u8; FILL_LEN + k - 1];
    let mut pos = start;
    while pos < end {
        let n = ((end - pos) as usize).min(FILL_LEN);
        let slice = &mut buf[..n + k - 1];
        x.fill(pos, slice);
        let mut code = slice[..k - 1]
            .iter()
            .fold(0usize, |c, &l| c * a + l as usize);
        for i in 0..n {
            code = (code % high) * a + slice[i + k - 1] as usize;
            f(pos + i as u64, code);
        }
        pos += n as u64;
    }
}

/// Occurrence counts and harmonic weights of every length-`k` word.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowStats {
    pub counts: Vec<u64>,
    /// `sum 1/(j+1)` over positions `j` carrying each word.
    pub log_sums: Vec<KahanSum>,
}

impl WindowStats {
    fn new(words: usize) -> Self {
        Self {
            counts: vec![0; words],
            log_sums: vec![KahanSum::new(); words],
        }
    }

    fn absorb(&mut self, other: &WindowStats) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        for (a, b) in self.log_sums.iter_mut().zip(&other.log_sums) {
            a.merge(b);
        }
    }

    /// `H_N` as the sum of the per-word harmonic weights.
    pub fn harmonic_total(&self) -> f64 {
        let mut acc = KahanSum::new();
        for s in &self.log_sums {
            acc.merge(s);
        }
        acc.value()
    }
}

fn range_stats(x: &dyn SymbolicSequence, k: usize, start: u64, end: u64, with_log: bool) -> WindowStats {
    let mut st = WindowStats::new(word_count(x.alphabet(), k));
    if with_log {
        for_each_window(x, k, start, end, |j, c| {
            st.counts[c] += 1;
            st.log_sums[c].add(1.0 / (j + 1) as f64);
        });
    } else {
        for_each_window(x, k, start, end, |_, c| st.counts[c] += 1);
    }
    st
}

/// Cumulative window statistics over `[0, N)` for every `N` in `grid`
/// (strictly increasing). Work is split at the grid points and at multiples
/// of [`CHUNK_LEN`] and reduced in order, so the result does not depend on
/// the number of worker threads.
pub fn window_stats_on_grid(
    x: &dyn SymbolicSequence,
    k: usize,
    grid: &[u64],
    with_log: bool,
) -> Result<Vec<WindowStats>> {
    check_depth(x.alphabet(), k)?;
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("grid must be strictly increasing");
    }
    let Some(&last) = grid.last() else {
        return Ok(Vec::new());
    };
    if grid[0] == 0 {
        return invalid("grid points must be positive");
    }
    let mut cuts: Vec<u64> = grid.to_vec();
    cuts.extend((1..=last / CHUNK_LEN).map(|i| i * CHUNK_LEN));
    cuts.push(0);
    cuts.sort_unstable();
    cuts.dedup();
    let pieces: Vec<(u64, u64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let stats: Vec<WindowStats> = pieces
        .par_iter()
        .map(|&(a, b)| range_stats(x, k, a, b, with_log))
        .collect();

    let mut acc = WindowStats::new(word_count(x.alphabet(), k));
    let mut out = Vec::with_capacity(grid.len());
    let mut next = 0;
    for ((_, end), st) in pieces.iter().zip(&stats) {
        acc.absorb(st);
        if next < grid.len() && *end == grid[next] {
            out.push(acc.clone());
            next += 1;
        }
    }
    debug_assert_eq!(out.len(), grid.len());
    Ok(out)
}

/// Occurrence counts of length-`k` words over positions `[0, n)`.
pub fn window_counts(x: &dyn SymbolicSequence, n: u64, k: usize) -> Result<Vec<u64>> {
    if n == 0 {
        return invalid("N must be positive");
    }
    Ok(window_stats_on_grid(x, k, &[n], false)?.remove(0).counts)
}

/// `Delta(x, N)`: the unnormalized counting measure, total mass exactly `N`.
///
/// Unlike the other constructors this one is not bounded by total mass 2.
pub fn counting_measure<S: Scalar>(x: &dyn SymbolicSequence, n: u64, k: usize) -> Result<CylinderMeasure<S>> {
    let counts = window_counts(x, n, k)?;
    Ok(CylinderMeasure::from_raw(
        x.alphabet().clone(),
        k,
        counts.into_iter().map(S::from_u64).collect(),
    ))
}

fn empirical_from_counts<S: Scalar>(alphabet: &Alphabet, k: usize, counts: &[u64], n: u64) -> CylinderMeasure<S> {
    let den = S::from_u64(n);
    CylinderMeasure::from_raw(
        alphabet.clone(),
        k,
        counts.iter().map(|&c| S::from_u64(c) / den.clone()).collect(),
    )
}

/// `E(x, N) = Delta(x, N) / N`.
pub fn empirical<S: Scalar>(x: &dyn SymbolicSequence, n: u64, k: usize) -> Result<CylinderMeasure<S>> {
    let counts = window_counts(x, n, k)?;
    Ok(empirical_from_counts(x.alphabet(), k, &counts, n))
}

fn log_from_stats(alphabet: &Alphabet, k: usize, st: &WindowStats, n: u64, norm: LogNormalization) -> CylinderMeasure<f64> {
    let den = match norm {
        LogNormalization::Log => (n as f64).ln(),
        LogNormalization::Harmonic => st.harmonic_total(),
    };
    CylinderMeasure::from_raw(
        alphabet.clone(),
        k,
        st.log_sums.iter().map(|s| s.value() / den).collect(),
    )
}

/// Harmonic empirical measure `(1/D) sum_{n <= N} (1/n) delta_{T^{n-1} x}`
/// with `D = log N` or `D = H_N`.
pub fn log_empirical(
    x: &dyn SymbolicSequence,
    n: u64,
    k: usize,
    norm: LogNormalization,
) -> Result<CylinderMeasure<f64>> {
    match norm {
        // H_2 / log 2 > 2 would leave the space of measures of mass <= 2
        LogNormalization::Log if n < 3 => {
            return invalid(format!("log-normalized harmonic measure needs N >= 3, got {n}"))
        }
        _ if n == 0 => return invalid("N must be positive"),
        _ => {}
    }
    let st = window_stats_on_grid(x, k, &[n], true)?.remove(0);
    Ok(log_from_stats(x.alphabet(), k, &st, n, norm))
}

/// Exact `H_N`-normalized harmonic empirical measure. Intended for small `N`.
pub fn log_empirical_exact(x: &dyn SymbolicSequence, n: u64, k: usize) -> Result<CylinderMeasure<Rational>> {
    if n == 0 {
        return invalid("N must be positive");
    }
    check_depth(x.alphabet(), k)?;
    let mut sums = vec![Rational::from_u64(0); word_count(x.alphabet(), k)];
    let mut total = Rational::from_u64(0);
    for_each_window(x, k, 0, n, |j, c| {
        let w = Rational::from_ratio(1, j + 1);
        sums[c] += &w;
        total += w;
    });
    Ok(CylinderMeasure::from_raw(
        x.alphabet().clone(),
        k,
        sums.into_iter().map(|s| s / &total).collect(),
    ))
}

/// Signed table of exact values indexed like a cylinder measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedTable {
    pub alphabet: Alphabet,
    pub depth: usize,
    pub values: Vec<Rational>,
}

impl SignedTable {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(num_traits::Zero::is_zero)
    }
}

/// `sum_{n <= N} (1/n) delta_{T^{n-1} x} - [E(x, N) + sum_{n < N} E(x, n)/(n+1)]`
/// in exact arithmetic. Summation by parts makes this identically zero.
pub fn sbp_residual(x: &dyn SymbolicSequence, n: u64, k: usize) -> Result<SignedTable> {
    if n < 2 {
        return invalid("summation-by-parts check needs N >= 2");
    }
    check_depth(x.alphabet(), k)?;
    let words = word_count(x.alphabet(), k);
    let mut codes = Vec::with_capacity(n as usize);
    for_each_window(x, k, 0, n, |_, c| codes.push(c));

    let zero = Rational::from_u64(0);
    let mut lhs = vec![zero.clone(); words];
    let mut rhs = vec![zero; words];
    let mut counts = vec![0u64; words];
    for (i, &c) in codes.iter().enumerate() {
        let step = i as u64 + 1;
        counts[c] += 1;
        lhs[c] += Rational::from_ratio(1, step);
        // E(x, step) / (step + 1) = Delta(x, step) / (step (step + 1))
        if step < n {
            let den = step * (step + 1);
            for (r, &cnt) in rhs.iter_mut().zip(&counts) {
                if cnt > 0 {
                    *r += Rational::from_ratio(cnt as i64, den);
                }
            }
        }
    }
    for (r, &cnt) in rhs.iter_mut().zip(&counts) {
        *r += Rational::from_ratio(cnt as i64, n);
    }
    Ok(SignedTable {
        alphabet: x.alphabet().clone(),
        depth: k,
        values: lhs.into_iter().zip(rhs).map(|(a, b)| a - b).collect(),
    })
}

/// Incremental counting measure: each [`push`](Self::push) moves `N` to `N+1`.
pub struct EmpiricalStream<'a> {
    x: &'a dyn SymbolicSequence,
    k: usize,
    n: u64,
    counts: Vec<u64>,
}

impl<'a> EmpiricalStream<'a> {
    pub fn new(x: &'a dyn SymbolicSequence, k: usize) -> Result<Self> {
        check_depth(x.alphabet(), k)?;
        Ok(Self {
            x,
            k,
            n: 0,
            counts: vec![0; word_count(x.alphabet(), k)],
        })
    }

    pub fn push(&mut self) {
        let mut w = vec![0u8; self.k];
        self.x.fill(self.n, &mut w);
        self.counts[encode(self.x.alphabet(), &w)] += 1;
        self.n += 1;
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn empirical<S: Scalar>(&self) -> Result<CylinderMeasure<S>> {
        if self.n == 0 {
            return invalid("empty stream");
        }
        Ok(empirical_from_counts(self.x.alphabet(), self.k, &self.counts, self.n))
    }
}

/// Finite-N estimates of the lower/upper asymptotic and logarithmic densities
/// of the occurrence set `J_w = { j : x_j ... x_{j+k-1} = w }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub word: String,
    pub grid: Vec<u64>,
    /// `|J_w ∩ [0, N)| / N` at each grid point.
    pub asymptotic: Vec<f64>,
    /// `(1/H_N) sum_{j in J_w, j < N} 1/(j+1)` at each grid point.
    pub logarithmic: Vec<f64>,
    pub lower_asymptotic: f64,
    pub upper_asymptotic: f64,
    pub lower_logarithmic: f64,
    pub upper_logarithmic: f64,
    pub tail_start: usize,
}

impl DensityEstimate {
    /// Links of `lower_asym <= lower_log <= upper_log <= upper_asym` that fail
    /// by more than `tol`. At finite N this is a report, not an error.
    pub fn chain_violations(&self, tol: f64) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.lower_asymptotic > self.lower_logarithmic + tol {
            out.push("lower_asymptotic > lower_logarithmic");
        }
        if self.lower_logarithmic > self.upper_logarithmic + tol {
            out.push("lower_logarithmic > upper_logarithmic");
        }
        if self.upper_logarithmic > self.upper_asymptotic + tol {
            out.push("upper_logarithmic > upper_asymptotic");
        }
        out
    }
}

fn extrema(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Density estimates of the word `word` (serialized form) along `grid`.
/// Lower/upper values are extrema over the last `ceil(tail_fraction * |grid|)`
/// grid points.
pub fn density_estimate(
    x: &dyn SymbolicSequence,
    word: &str,
    grid: &[u64],
    tail_fraction: f64,
) -> Result<DensityEstimate> {
    if grid.len() < 4 {
        return invalid(format!("density grid needs at least 4 points, got {}", grid.len()));
    }
    let letters = x.alphabet().parse_word(word)?;
    if letters.is_empty() {
        return invalid("empty word");
    }
    let tail_start = crate::grid::tail_start(grid.len(), tail_fraction)?;
    let code = encode(x.alphabet(), &letters);
    let stats = window_stats_on_grid(x, letters.len(), grid, true)?;
    let mut asymptotic = Vec::with_capacity(grid.len());
    let mut logarithmic = Vec::with_capacity(grid.len());
    for (st, &n) in stats.iter().zip(grid) {
        asymptotic.push(st.counts[code] as f64 / n as f64);
        logarithmic.push((st.log_sums[code].value() / st.harmonic_total()).clamp(0.0, 1.0));
    }
    let (lower_asymptotic, upper_asymptotic) = extrema(&asymptotic[tail_start..]);
    let (lower_logarithmic, upper_logarithmic) = extrema(&logarithmic[tail_start..]);
    Ok(DensityEstimate {
        word: x.alphabet().format_word(&letters),
        grid: grid.to_vec(),
        asymptotic,
        logarithmic,
        lower_asymptotic,
        upper_asymptotic,
        lower_logarithmic,
        upper_logarithmic,
        tail_start,
    })
}

/// Normalized Cesàro and harmonic measures at every grid point, from a single
/// pass over the sequence.
pub(crate) fn measures_on_grid(
    x: &dyn SymbolicSequence,
    k: usize,
    grid: &[u64],
    modes: &[AveragingMode],
) -> Result<Vec<Vec<CylinderMeasure<f64>>>> {
    let with_log = modes.contains(&AveragingMode::Logarithmic);
    let stats = window_stats_on_grid(x, k, grid, with_log)?;
    Ok(modes
        .iter()
        .map(|mode| {
            stats
                .iter()
                .zip(grid)
                .map(|(st, &n)| match mode {
                    AveragingMode::Cesaro => empirical_from_counts(x.alphabet(), k, &st.counts, n),
                    AveragingMode::Logarithmic => {
                        log_from_stats(x.alphabet(), k, st, n, LogNormalization::Harmonic)
                    }
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{example_sequence, ConstantSequence, ExampleName, PeriodicSequence};
    use num_traits::One;

    fn q(n: i64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    /// Direct enumeration of windows, independent of the chunked engine.
    fn brute_counts(x: &dyn SymbolicSequence, n: u64, k: usize) -> Vec<u64> {
        let mut counts = vec![0u64; word_count(x.alphabet(), k)];
        for j in 0..n {
            let w: Vec<u8> = (0..k as u64).map(|i| x.letter(j + i)).collect();
            counts[encode(x.alphabet(), &w)] += 1;
        }
        counts
    }

    #[test]
    fn counting_examples() {
        let ex1 = example_sequence(ExampleName::Example1);
        let c: CylinderMeasure<Rational> = counting_measure(&ex1, 4, 1).unwrap();
        assert_eq!(c.masses(), &[q(2, 1), q(2, 1)]);
        let ex3 = example_sequence(ExampleName::Example3);
        let c: CylinderMeasure<Rational> = counting_measure(&ex3, 8, 1).unwrap();
        assert_eq!(c.masses(), &[q(2, 1), q(6, 1), q(0, 1)]);
        let c: CylinderMeasure<Rational> = counting_measure(&ex3, 1, 1).unwrap();
        assert_eq!(c.masses(), &[q(1, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn empirical_examples() {
        let ex1 = example_sequence(ExampleName::Example1);
        let e: CylinderMeasure<Rational> = empirical(&ex1, 4, 1).unwrap();
        assert_eq!(e.masses(), &[q(1, 2), q(1, 2)]);
        let zero = ConstantSequence::new(Alphabet::digits(2), 0);
        for n in [1, 7, 1000] {
            let e: CylinderMeasure<Rational> = empirical(&zero, n, 3).unwrap();
            assert_eq!(e.mass(&[0, 0, 0]).unwrap(), Rational::one());
        }
        // block sums at 3^9: symbol 0 gets 2(1+27+729)+1 (the point n+1 = 3^9
        // opens a 0-block), symbol 1 gets 2(3+81+2187), symbol 2 gets 2(9+243+6561)
        let ex3 = example_sequence(ExampleName::Example3);
        let n = 3u64.pow(9);
        let e: CylinderMeasure<Rational> = empirical(&ex3, n, 1).unwrap();
        assert_eq!(e.masses(), &[q(1515, n), q(4542, n), q(13626, n)]);
        assert_eq!(brute_counts(&ex3, n, 1), vec![1515, 4542, 13626]);
    }

    #[test]
    fn log_empirical_examples() {
        let zero = ConstantSequence::new(Alphabet::digits(2), 0);
        let m = log_empirical(&zero, 50, 1, LogNormalization::Harmonic).unwrap();
        assert_eq!(m.masses(), &[1.0, 0.0]);
        let m = log_empirical(&zero, 3, 1, LogNormalization::Log).unwrap();
        assert!((m.total_mass() - (11.0 / 6.0) / 3f64.ln()).abs() < 1e-12);
        assert!((m.total_mass() - 1.6687).abs() < 1e-4);
        assert!(log_empirical(&zero, 2, 1, LogNormalization::Log).is_err());
        assert!(log_empirical(&zero, 2, 1, LogNormalization::Harmonic).is_ok());
        let exact = log_empirical_exact(&example_sequence(ExampleName::Example3), 30, 2).unwrap();
        assert_eq!(exact.total_mass(), Rational::one());
    }

    #[test]
    fn chunked_engine_matches_enumeration() {
        let ex2 = example_sequence(ExampleName::Example2);
        let grid = [1, 2, 3, 100, CHUNK_LEN - 1, CHUNK_LEN, CHUNK_LEN + 17, 3 * CHUNK_LEN + 5];
        for k in 1..=3 {
            let stats = window_stats_on_grid(&ex2, k, &grid, false).unwrap();
            for (st, &n) in stats.iter().zip(&grid) {
                assert_eq!(st.counts, brute_counts(&ex2, n, k), "k={k} N={n}");
            }
        }
    }

    #[test]
    fn sbp_identity_small_cases() {
        let ex1 = example_sequence(ExampleName::Example1);
        assert!(sbp_residual(&ex1, 8, 1).unwrap().is_zero());
        let ex3 = example_sequence(ExampleName::Example3);
        assert!(sbp_residual(&ex3, 27, 2).unwrap().is_zero());
        let mu = crate::symbolic::ArithmeticSequence::new(crate::arith::ArithmeticKind::Mobius);
        assert!(sbp_residual(&mu, 64, 1).unwrap().is_zero());
        assert!(sbp_residual(&ex1, 1, 1).is_err());
    }

    #[test]
    fn restrict_matches_lower_depth() {
        let ex1 = example_sequence(ExampleName::Example1);
        for n in [10, 100, 1000] {
            let e2: CylinderMeasure<Rational> = empirical(&ex1, n, 2).unwrap();
            let e1: CylinderMeasure<Rational> = empirical(&ex1, n, 1).unwrap();
            assert_eq!(e2.restrict(1).unwrap(), e1);
        }
    }

    #[test]
    fn streaming_agrees_with_recomputation() {
        let ex3 = example_sequence(ExampleName::Example3);
        let mut s = EmpiricalStream::new(&ex3, 2).unwrap();
        for n in 1..=10_000u64 {
            s.push();
            if n % 97 == 0 || n <= 30 || n == 10_000 {
                let direct: CylinderMeasure<Rational> = empirical(&ex3, n, 2).unwrap();
                assert_eq!(s.empirical::<Rational>().unwrap(), direct, "N = {n}");
            }
        }
        assert_eq!(s.len(), 10_000);
    }

    #[test]
    fn near_shift_invariance_on_periodic_sequences() {
        let p = PeriodicSequence::new("p", Alphabet::digits(3), vec![0, 2, 1, 1, 0, 2, 2, 2, 0, 1, 0]).unwrap();
        for k in 2..=4usize {
            for n in [5u64, 50, 500] {
                let e: CylinderMeasure<f64> = empirical(&p, n, k).unwrap();
                let lower: CylinderMeasure<f64> = empirical(&p, n, k - 1).unwrap();
                let shifted = e.drop_first().unwrap();
                let l1: f64 = shifted
                    .masses()
                    .iter()
                    .zip(lower.masses())
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                assert!(l1 <= 2.0 * k as f64 / n as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn density_estimates() {
        let one = ConstantSequence::new(Alphabet::digits(2), 1);
        let d = density_estimate(&one, "1", &[10, 20, 40, 80], 0.5).unwrap();
        assert_eq!(
            [d.lower_asymptotic, d.upper_asymptotic, d.lower_logarithmic, d.upper_logarithmic],
            [1.0; 4]
        );
        assert!(d.chain_violations(1e-9).is_empty());
        assert!(density_estimate(&one, "1", &[10, 20, 40], 0.5).is_err());
        assert!(density_estimate(&one, "1", &[10, 20, 40, 30], 0.5).is_err());
        assert!(density_estimate(&one, "2", &[10, 20, 40, 80], 0.5).is_err());

        let p = PeriodicSequence::new("p", Alphabet::digits(2), vec![0, 1, 1]).unwrap();
        let grid: Vec<u64> = (0..8).map(|i| 3000 * (1 << i)).collect();
        let d = density_estimate(&p, "11", &grid, 0.5).unwrap();
        // harmonic averages of a periodic pattern converge like 1/log N
        assert!(d.chain_violations(0.05).is_empty());
        assert!((d.lower_asymptotic - 1.0 / 3.0).abs() < 1e-4);
        assert!((d.upper_logarithmic - 1.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn example1_density_of_ones() {
        let ex1 = example_sequence(ExampleName::Example1);
        let grid: Vec<u64> = (10..=24).map(|m| 1u64 << m).collect();
        let d = density_estimate(&ex1, "1", &grid, 0.5).unwrap();
        assert!((d.lower_asymptotic - 1.0 / 3.0).abs() <= 0.02, "{d:?}");
        assert!((d.upper_asymptotic - 2.0 / 3.0).abs() <= 0.02, "{d:?}");
        assert!((d.logarithmic.last().unwrap() - 0.5).abs() <= 0.02);
    }

    #[test]
    fn example2_density_of_ones() {
        let ex2 = example_sequence(ExampleName::Example2);
        let grid = crate::grid::default_grid(ExampleName::Example2, 16, 1 << 25).unwrap();
        let d = density_estimate(&ex2, "1", grid.points(), 0.5).unwrap();
        assert!((d.upper_asymptotic - 0.5).abs() <= 0.01, "{}", d.upper_asymptotic);
        // the upper logarithmic density is 0 only in the limit; along
        // N = 2^{k^2} the harmonic frequency decays like 1/k
        let at = |n: u64| d.logarithmic[d.grid.iter().position(|&g| g == n).unwrap()];
        let (f3, f4, f5) = (at(1 << 9), at(1 << 16), at(1 << 25));
        assert!(f3 > f4 && f4 > f5, "{f3} {f4} {f5}");
        assert!(f5 < 0.25 && f5 > 0.15);
    }
}
