//! Chowla-type correlation sums of μ, λ and μ² under Cesàro and logarithmic
//! averaging, and the squarefree (Mirsky) densities that predict the
//! all-squares correlations.
//!
//! A spec with shifts `0 < a_1 < ... < a_k` and exponents `j_0, ..., j_k`
//! denotes the integrand `f(n)^{j_0} f(n + a_1)^{j_1} ... f(n + a_k)^{j_k}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, sieve_values, ArithmeticKind, Sieve, SEGMENT_LEN};
use crate::averaging::AveragingMode;
use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::numeric::KahanSum;
use crate::symbolic::Symbol;

/// Default prime bound for [`mirsky_prediction`] in reports.
pub const DEFAULT_PRIME_BOUND: u64 = 10_000;

pub const DEFAULT_MAX_SHIFT: u64 = 10_000;

pub const DEFAULT_MAX_ORDER: usize = 5;

/// Upper bound on the number of specs a scan may enumerate.
pub const MAX_SCAN_SPECS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub shifts: Vec<u64>,
    /// `j_0, j_1, ..., j_k`, each 1 or 2.
    pub exponents: Vec<u8>,
    pub mode: AveragingMode,
}

impl CorrelationSpec {
    pub fn new(shifts: Vec<u64>, exponents: Vec<u8>, mode: AveragingMode) -> Result<Self> {
        if shifts.first() == Some(&0) {
            return invalid("shifts must be positive (offset 0 is implicit)");
        }
        if shifts.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("shifts must be strictly increasing");
        }
        if exponents.len() != shifts.len() + 1 {
            return invalid(format!(
                "{} shifts need {} exponents, got {}",
                shifts.len(),
                shifts.len() + 1,
                exponents.len()
            ));
        }
        if exponents.iter().any(|&e| e != 1 && e != 2) {
            return invalid("exponents must be 1 or 2");
        }
        Ok(Self {
            shifts,
            exponents,
            mode,
        })
    }

    pub fn order(&self) -> usize {
        self.shifts.len()
    }

    pub fn max_shift(&self) -> u64 {
        self.shifts.last().copied().unwrap_or(0)
    }

    pub fn all_squares(&self) -> bool {
        self.exponents.iter().all(|&e| e == 2)
    }

    /// `(offset, exponent)` pairs, offset 0 first.
    pub fn factors(&self) -> Vec<(u64, u8)> {
        std::iter::once(0)
            .chain(self.shifts.iter().copied())
            .zip(self.exponents.iter().copied())
            .collect()
    }

    /// Factors after the identities of `kind`: `λ² = 1` drops squared
    /// Liouville factors, `(μ²)² = μ²` lowers squarefree exponents to 1.
    pub fn canonical_factors(&self, kind: ArithmeticKind) -> Vec<(u64, u8)> {
        match kind {
            ArithmeticKind::Mobius => self.factors(),
            ArithmeticKind::Liouville => self.factors().into_iter().filter(|f| f.1 == 1).collect(),
            ArithmeticKind::Squarefree => self.factors().into_iter().map(|(o, _)| (o, 1)).collect(),
        }
    }
}

#[inline]
fn product(values: &[Symbol], at: usize, factors: &[(u64, u8)]) -> i64 {
    let mut p = 1i64;
    for &(off, e) in factors {
        let v = values[at + off as usize] as i64;
        p *= if e == 2 { v * v } else { v };
        if p == 0 {
            break;
        }
    }
    p
}

/// Partial sums over `n` in `[a, b)`: exact integer sum and harmonic sum.
fn piece_sums(kind: ArithmeticKind, a: u64, b: u64, factor_sets: &[Vec<(u64, u8)>], reach: u64, with_log: bool) -> Vec<(i64, KahanSum)> {
    let values = sieve_values(kind, a, b + reach);
    factor_sets
        .iter()
        .map(|factors| {
            let mut int = 0i64;
            let mut log = KahanSum::new();
            for n in a..b {
                let t = product(&values, (n - a) as usize, factors);
                int += t;
                if with_log && t != 0 {
                    log.add(t as f64 / n as f64);
                }
            }
            (int, log)
        })
        .collect()
}

/// Cumulative sums `sum_{n <= N}` for each factor set and each grid point,
/// computed over fixed pieces in parallel and reduced in order.
fn sums_on_grid(
    sieve: &Sieve,
    kind: ArithmeticKind,
    factor_sets: &[Vec<(u64, u8)>],
    grid: &[u64],
    with_log: bool,
) -> Result<Vec<Vec<(i64, KahanSum)>>> {
    let Some(&last) = grid.last() else {
        return Ok(vec![Vec::new(); factor_sets.len()]);
    };
    let reach = factor_sets
        .iter()
        .flat_map(|f| f.iter().map(|x| x.0))
        .max()
        .unwrap_or(0);
    sieve.check(last + reach + 1)?;
    // pieces of [1, last] split at grid points
    let mut cuts: Vec<u64> = grid.iter().map(|&n| n + 1).collect();
    cuts.extend((1..=last / SEGMENT_LEN).map(|i| i * SEGMENT_LEN + 1));
    cuts.push(1);
    cuts.sort_unstable();
    cuts.dedup();
    let pieces: Vec<(u64, u64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let partial: Vec<Vec<(i64, KahanSum)>> = pieces
        .par_iter()
        .map(|&(a, b)| piece_sums(kind, a, b, factor_sets, reach, with_log))
        .collect();

    let mut acc = vec![(0i64, KahanSum::new()); factor_sets.len()];
    let mut out: Vec<Vec<(i64, KahanSum)>> = vec![Vec::with_capacity(grid.len()); factor_sets.len()];
    let mut next = 0;
    for ((_, b), part) in pieces.iter().zip(&partial) {
        for (a, p) in acc.iter_mut().zip(part) {
            a.0 += p.0;
            a.1.merge(&p.1);
        }
        if next < grid.len() && b - 1 == grid[next] {
            for (o, a) in out.iter_mut().zip(&acc) {
                o.push(*a);
            }
            next += 1;
        }
    }
    Ok(out)
}

fn check_n(n: u64) -> Result<()> {
    if n < 3 {
        return invalid(format!("correlation needs N >= 3, got {n}"));
    }
    Ok(())
}

/// Exact Cesàro numerator `sum_{n <= N} prod f^{j}(n + a)`, evaluated over
/// independently sieved segments in parallel.
pub fn correlation_numerator(sieve: &Sieve, kind: ArithmeticKind, factors: &[(u64, u8)], n: u64) -> Result<i64> {
    if n < 1 {
        return invalid("N must be positive");
    }
    Ok(sums_on_grid(sieve, kind, &[factors.to_vec()], &[n], false)?[0][0].0)
}

/// Single-pass reference for [`correlation_numerator`]: one sieve of the
/// whole range and a plain loop.
pub fn correlation_numerator_naive(sieve: &Sieve, kind: ArithmeticKind, factors: &[(u64, u8)], n: u64) -> Result<i64> {
    let reach = factors.iter().map(|f| f.0).max().unwrap_or(0);
    let seg = sieve.range(kind, 1, n + reach + 1)?;
    let mut total = 0i64;
    for m in 1..=n {
        total += product(&seg.values, (m - 1) as usize, factors);
    }
    Ok(total)
}

fn finish(mode: AveragingMode, n: u64, sums: &(i64, KahanSum)) -> f64 {
    match mode {
        AveragingMode::Cesaro => sums.0 as f64 / n as f64,
        AveragingMode::Logarithmic => sums.1.value() / (n as f64).ln(),
    }
}

/// Correlation of `kind` under `spec` at `N`, with the default sieve capacity.
pub fn correlation(kind: ArithmeticKind, spec: &CorrelationSpec, n: u64) -> Result<f64> {
    correlation_with(&Sieve::default(), kind, spec, n)
}

/// Cesàro: `(1/N) sum_{n<=N} f^{j_0}(n) prod_i f^{j_i}(n + a_i)`.
/// Logarithmic: `(1/log N) sum_{n<=N} (1/n) (same integrand)`.
pub fn correlation_with(sieve: &Sieve, kind: ArithmeticKind, spec: &CorrelationSpec, n: u64) -> Result<f64> {
    check_n(n)?;
    let with_log = spec.mode == AveragingMode::Logarithmic;
    let sums = sums_on_grid(sieve, kind, &[spec.factors()], &[n], with_log)?;
    Ok(finish(spec.mode, n, &sums[0][0]))
}

/// Density of `n` with `n + a` squarefree for every `a` in `{0} ∪ shifts`,
/// as the product over `p <= prime_bound` of `(1 - ω_p / p²)`, where `ω_p`
/// counts the distinct residues of `-a mod p²`.
pub fn mirsky_prediction(shifts: &[u64], prime_bound: u64) -> Result<f64> {
    if prime_bound < 100 {
        return invalid("prime bound must be at least 100");
    }
    let mut offsets: Vec<u64> = std::iter::once(0).chain(shifts.iter().copied()).collect();
    offsets.sort_unstable();
    offsets.dedup();
    let mut prod = 1.0f64;
    for p in primes_up_to(prime_bound) {
        let sq = p * p;
        let mut residues: Vec<u64> = offsets.iter().map(|&a| (sq - a % sq) % sq).collect();
        residues.sort_unstable();
        residues.dedup();
        let factor = 1.0 - residues.len() as f64 / sq as f64;
        prod *= factor.max(0.0);
        if prod == 0.0 {
            break;
        }
    }
    Ok(prod)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: f64,
    /// True when the value is what the Chowla conjecture predicts rather
    /// than a proven limit. Such values are reported, never asserted.
    pub conjectural: bool,
    pub basis: String,
}

/// Expected limit of a correlation, if one is known or conjectured.
pub fn prediction(kind: ArithmeticKind, spec: &CorrelationSpec) -> Result<Option<Prediction>> {
    let canonical = spec.canonical_factors(kind);
    let odd: Vec<&(u64, u8)> = canonical.iter().filter(|f| f.1 == 1).collect();
    let squares_only = |k| -> Result<Option<Prediction>> {
        let offsets: Vec<u64> = canonical.iter().map(|f| f.0).collect();
        let base = offsets.first().copied().unwrap_or(0);
        let rel: Vec<u64> = offsets.iter().skip(1).map(|o| o - base).collect();
        let value = mirsky_prediction(&rel, DEFAULT_PRIME_BOUND)?;
        Ok(Some(Prediction {
            value,
            conjectural: false,
            basis: format!("squarefree density, primes <= {DEFAULT_PRIME_BOUND} ({k})"),
        }))
    };
    match kind {
        ArithmeticKind::Squarefree => squares_only("mu^2"),
        ArithmeticKind::Mobius if odd.is_empty() => squares_only("mu^2"),
        ArithmeticKind::Liouville if canonical.is_empty() => Ok(Some(Prediction {
            value: 1.0,
            conjectural: false,
            basis: "lambda^2 = 1".into(),
        })),
        _ if canonical.len() == 1 => Ok(Some(Prediction {
            value: 0.0,
            conjectural: false,
            basis: "prime number theorem".into(),
        })),
        _ => Ok(Some(Prediction {
            value: 0.0,
            conjectural: true,
            basis: "Chowla conjecture".into(),
        })),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub kind: ArithmeticKind,
    pub mode: AveragingMode,
    pub grid: Vec<u64>,
    pub specs: Vec<CorrelationSpec>,
    /// `values[s][g]`: spec `s` at grid point `g`.
    pub values: Vec<Vec<f64>>,
    /// Exact Cesàro numerators, `numerators[s][g]`.
    pub numerators: Vec<Vec<i64>>,
    pub predictions: Vec<Option<Prediction>>,
}

/// Evaluates every spec at every grid point. All specs must share `mode`.
pub fn correlation_report(
    sieve: &Sieve,
    kind: ArithmeticKind,
    specs: Vec<CorrelationSpec>,
    grid: &Grid,
    mode: AveragingMode,
) -> Result<CorrelationReport> {
    if grid.first() < 3 {
        return invalid("correlation grids need N >= 3");
    }
    if specs.iter().any(|s| s.mode != mode) {
        return invalid("all specs in a report must use the report's averaging mode");
    }
    let factor_sets: Vec<Vec<(u64, u8)>> = specs.iter().map(|s| s.factors()).collect();
    let sums = sums_on_grid(sieve, kind, &factor_sets, grid.points(), mode == AveragingMode::Logarithmic)?;
    let values = sums
        .iter()
        .map(|row| {
            row.iter()
                .zip(grid.points())
                .map(|(s, &n)| finish(mode, n, s))
                .collect()
        })
        .collect();
    let numerators = sums.iter().map(|row| row.iter().map(|s| s.0).collect()).collect();
    let predictions = specs
        .iter()
        .map(|s| prediction(kind, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationReport {
        kind,
        mode,
        grid: grid.points().to_vec(),
        specs,
        values,
        numerators,
        predictions,
    })
}

fn combinations(pool: u64, size: usize) -> Vec<Vec<u64>> {
    fn rec(start: u64, pool: u64, size: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..=pool {
            if pool - v + 1 < (size - cur.len()) as u64 {
                break;
            }
            cur.push(v);
            rec(v + 1, pool, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, pool, size, &mut Vec::new(), &mut out);
    out
}

/// Every spec with order `<= max_order` and shifts `<= max_shift`. For λ and
/// μ² only exponent-1 specs are enumerated, since squared factors reduce to
/// them.
pub fn enumerate_specs(kind: ArithmeticKind, max_shift: u64, max_order: usize, mode: AveragingMode) -> Result<Vec<CorrelationSpec>> {
    if max_shift > DEFAULT_MAX_SHIFT {
        return invalid(format!("max shift {max_shift} exceeds {DEFAULT_MAX_SHIFT}"));
    }
    if max_order > DEFAULT_MAX_ORDER {
        return invalid(format!("max order {max_order} exceeds {DEFAULT_MAX_ORDER}"));
    }
    let mut specs = Vec::new();
    for order in 0..=max_order.min(max_shift as usize) {
        for shifts in combinations(max_shift, order) {
            let exponent_sets: Vec<Vec<u8>> = match kind {
                ArithmeticKind::Mobius => (0..1u32 << (order + 1))
                    .map(|bits| (0..=order).map(|i| 1 + ((bits >> i) & 1) as u8).collect())
                    .collect(),
                _ => vec![vec![1; order + 1]],
            };
            for exps in exponent_sets {
                specs.push(CorrelationSpec::new(shifts.clone(), exps, mode)?);
                if specs.len() > MAX_SCAN_SPECS {
                    return invalid(format!("scan would enumerate more than {MAX_SCAN_SPECS} specs"));
                }
            }
        }
    }
    Ok(specs)
}

/// Evaluates all enumerated specs along `grid`, attaching predictions.
pub fn chowla_scan(
    sieve: &Sieve,
    kind: ArithmeticKind,
    max_shift: u64,
    max_order: usize,
    grid: &Grid,
    mode: AveragingMode,
) -> Result<CorrelationReport> {
    let specs = enumerate_specs(kind, max_shift, max_order, mode)?;
    correlation_report(sieve, kind, specs, grid, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::value_by_factorization;

    fn cesaro(shifts: Vec<u64>, exps: Vec<u8>) -> CorrelationSpec {
        CorrelationSpec::new(shifts, exps, AveragingMode::Cesaro).unwrap()
    }

    #[test]
    fn hand_computed_correlations() {
        let mean = cesaro(vec![], vec![1]);
        assert_eq!(correlation(ArithmeticKind::Liouville, &mean, 4).unwrap(), 0.0);
        assert_eq!(correlation(ArithmeticKind::Mobius, &mean, 10).unwrap(), -0.1);
        let pair = cesaro(vec![1], vec![2, 2]);
        assert_eq!(correlation(ArithmeticKind::Mobius, &pair, 10).unwrap(), 0.5);
    }

    #[test]
    fn spec_validation() {
        let m = AveragingMode::Cesaro;
        assert!(CorrelationSpec::new(vec![0, 1], vec![1, 1, 1], m).is_err());
        assert!(CorrelationSpec::new(vec![2, 1], vec![1, 1, 1], m).is_err());
        assert!(CorrelationSpec::new(vec![1], vec![1], m).is_err());
        assert!(CorrelationSpec::new(vec![1], vec![1, 3], m).is_err());
        assert!(correlation(ArithmeticKind::Mobius, &cesaro(vec![], vec![1]), 2).is_err());
    }

    #[test]
    fn capacity_is_enforced() {
        let s = Sieve::with_limit(1000);
        let spec = cesaro(vec![5], vec![1, 1]);
        assert!(correlation_with(&s, ArithmeticKind::Mobius, &spec, 994).is_ok());
        assert!(correlation_with(&s, ArithmeticKind::Mobius, &spec, 995).is_err());
    }

    #[test]
    fn logarithmic_matches_direct_sum() {
        let spec = CorrelationSpec::new(vec![2], vec![1, 2], AveragingMode::Logarithmic).unwrap();
        let n = 5000u64;
        let mut direct = 0.0;
        for m in 1..=n {
            let a = value_by_factorization(ArithmeticKind::Mobius, m) as f64;
            let b = value_by_factorization(ArithmeticKind::Mobius, m + 2) as f64;
            direct += a * b * b / m as f64;
        }
        direct /= (n as f64).ln();
        let v = correlation(ArithmeticKind::Mobius, &spec, n).unwrap();
        assert!((v - direct).abs() < 1e-12);
    }

    #[test]
    fn mirsky_examples() {
        let six_over_pi2 = 6.0 / std::f64::consts::PI.powi(2);
        assert!((mirsky_prediction(&[], 10_000).unwrap() - six_over_pi2).abs() < 1e-4);
        let p1 = mirsky_prediction(&[1], 10_000).unwrap();
        assert!((p1 - 0.3226).abs() < 1e-4, "{p1}");
        let direct: f64 = primes_up_to(10_000)
            .iter()
            .map(|&p| 1.0 - 2.0 / (p * p) as f64)
            .product();
        assert_eq!(p1, direct);
        let p4 = mirsky_prediction(&[4], 10_000).unwrap();
        let expect: f64 = 0.75
            * primes_up_to(10_000)
                .iter()
                .skip(1)
                .map(|&p| 1.0 - 2.0 / (p * p) as f64)
                .product::<f64>();
        assert!((p4 - expect).abs() < 1e-15);
        // four consecutive integers always include a multiple of 4
        assert_eq!(mirsky_prediction(&[1, 2, 3], 100).unwrap(), 0.0);
        assert!(mirsky_prediction(&[], 99).is_err());
    }

    #[test]
    fn mirsky_agrees_with_sieve_counts() {
        let n = 1_000_000u64;
        for shifts in [vec![], vec![1], vec![2], vec![4], vec![1, 2], vec![2, 6]] {
            let exps = vec![2u8; shifts.len() + 1];
            let spec = cesaro(shifts.clone(), exps);
            let observed = correlation(ArithmeticKind::Mobius, &spec, n).unwrap();
            let predicted = mirsky_prediction(&shifts, 10_000).unwrap();
            assert!((observed - predicted).abs() < 2e-3, "{shifts:?}: {observed} vs {predicted}");
        }
    }

    #[test]
    fn mirsky_refinement() {
        for mask in 0u32..32 {
            let shifts: Vec<u64> = (1..=5).filter(|s| mask & (1 << (s - 1)) != 0).collect();
            let a = mirsky_prediction(&shifts, 10_000).unwrap();
            let b = mirsky_prediction(&shifts, 100_000).unwrap();
            assert!(b <= a, "{shifts:?}");
            assert!(a - b <= 1e-5, "{shifts:?}: {a} vs {b}");
        }
    }

    #[test]
    fn scan_enumeration() {
        let m = AveragingMode::Cesaro;
        let specs = enumerate_specs(ArithmeticKind::Mobius, 3, 2, m).unwrap();
        // order 0: 2 exponent choices; order 1: 3 shifts * 4; order 2: 3 pairs * 8
        assert_eq!(specs.len(), 2 + 12 + 24);
        let lam = enumerate_specs(ArithmeticKind::Liouville, 3, 2, m).unwrap();
        assert_eq!(lam.len(), 1 + 3 + 3);
        assert!(lam.iter().all(|s| s.exponents.iter().all(|&e| e == 1)));
        assert!(enumerate_specs(ArithmeticKind::Mobius, 20_000, 1, m).is_err());
        assert!(enumerate_specs(ArithmeticKind::Mobius, 10, 6, m).is_err());
        let none = enumerate_specs(ArithmeticKind::Liouville, 0, 0, m).unwrap();
        assert_eq!(none, vec![cesaro(vec![], vec![1])]);
    }

    #[test]
    fn scan_report_shape_and_predictions() {
        let grid: Grid = "pow10:3:5".parse().unwrap();
        let r = chowla_scan(&Sieve::default(), ArithmeticKind::Mobius, 2, 1, &grid, AveragingMode::Cesaro).unwrap();
        assert_eq!(r.values.len(), r.specs.len());
        assert!(r.values.iter().all(|row| row.len() == grid.len()));
        for (spec, pred) in r.specs.iter().zip(&r.predictions) {
            let pred = pred.as_ref().unwrap();
            if spec.all_squares() {
                assert!(!pred.conjectural);
            } else if spec.order() > 0 {
                assert!(pred.conjectural);
                assert_eq!(pred.value, 0.0);
            }
        }
        for row in &r.values {
            assert!(row.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn squarefree_order_zero_is_the_count() {
        let grid: Grid = "pow10:3:6".parse().unwrap();
        let r = chowla_scan(&Sieve::default(), ArithmeticKind::Squarefree, 0, 0, &grid, AveragingMode::Cesaro).unwrap();
        for (g, &n) in grid.points().iter().enumerate() {
            let count = crate::arith::summatory(ArithmeticKind::Squarefree, n).unwrap();
            assert_eq!(r.numerators[0][g], count);
            assert!((0.0..=1.0).contains(&r.values[0][g]));
        }
    }

    #[test]
    fn parallel_and_naive_agree() {
        let s = Sieve::default();
        let spec = cesaro(vec![1, 3, 7], vec![1, 2, 1, 1]);
        for n in [3u64, 1000, SEGMENT_LEN, SEGMENT_LEN + 1, 2 * SEGMENT_LEN + 13] {
            for kind in ArithmeticKind::ALL {
                assert_eq!(
                    correlation_numerator(&s, kind, &spec.factors(), n).unwrap(),
                    correlation_numerator_naive(&s, kind, &spec.factors(), n).unwrap()
                );
            }
        }
    }
}
