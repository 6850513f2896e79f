//! Finite estimates of the Cesàro and harmonic limit sets of a point.
//!
//! A [`FrequencyTrace`] samples normalized empirical (or harmonic empirical)
//! measures along a grid of `N`. Its tail is clustered into an ε-net whose
//! representatives stand in for the accumulation points.

use serde::{Deserialize, Serialize};

use crate::averaging::{measures_on_grid, AveragingMode};
use crate::error::{invalid, Error, Result};
use crate::grid::{tail_start, Grid};
use crate::measures::{hull_distance, metric, CylinderMeasure, HullDistance};
use crate::symbolic::SymbolicSequence;

/// Default TV tolerance for the approximate shift-invariance flag.
pub const DEFAULT_SHIFT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub n: u64,
    pub measure: CylinderMeasure<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrace {
    pub sequence: String,
    pub depth: usize,
    pub mode: AveragingMode,
    pub entries: Vec<TraceEntry>,
}

fn check_grid(grid: &Grid, modes: &[AveragingMode]) -> Result<()> {
    if modes.contains(&AveragingMode::Logarithmic) && grid.first() < 3 {
        return invalid("logarithmic traces need every grid point >= 3");
    }
    Ok(())
}

fn build(x: &dyn SymbolicSequence, k: usize, grid: &Grid, mode: AveragingMode, measures: Vec<CylinderMeasure<f64>>) -> FrequencyTrace {
    FrequencyTrace {
        sequence: x.name().to_string(),
        depth: k,
        mode,
        entries: grid
            .points()
            .iter()
            .zip(measures)
            .map(|(&n, measure)| TraceEntry { n, measure })
            .collect(),
    }
}

/// Normalized measures of `x` at depth `k` for each `N` in `grid`.
pub fn frequency_trace(x: &dyn SymbolicSequence, k: usize, grid: &Grid, mode: AveragingMode) -> Result<FrequencyTrace> {
    check_grid(grid, &[mode])?;
    let measures = measures_on_grid(x, k, grid.points(), &[mode])?.remove(0);
    Ok(build(x, k, grid, mode, measures))
}

/// Cesàro and logarithmic traces from one pass over the sequence.
pub fn frequency_traces(x: &dyn SymbolicSequence, k: usize, grid: &Grid) -> Result<(FrequencyTrace, FrequencyTrace)> {
    let modes = [AveragingMode::Cesaro, AveragingMode::Logarithmic];
    check_grid(grid, &modes)?;
    let mut both = measures_on_grid(x, k, grid.points(), &modes)?;
    let log = both.pop().expect("two modes");
    let ces = both.pop().expect("two modes");
    Ok((
        build(x, k, grid, AveragingMode::Cesaro, ces),
        build(x, k, grid, AveragingMode::Logarithmic, log),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representative {
    pub measure: CylinderMeasure<f64>,
    /// Grid points whose measure was assigned to this representative.
    pub witnesses: Vec<u64>,
    /// TV distance between first- and last-coordinate marginals.
    pub shift_defect: f64,
    /// Set when `shift_defect` exceeds the tolerance.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSetEstimate {
    pub sequence: String,
    pub depth: usize,
    pub mode: AveragingMode,
    pub representatives: Vec<Representative>,
    pub epsilon: f64,
    /// Number of metric terms `J` used for clustering.
    pub metric_terms: usize,
    pub tail_start: usize,
    /// Largest metric step between consecutive tail measures; a rough
    /// connectedness diagnostic, never asserted.
    pub max_tail_gap: f64,
    pub shift_tolerance: f64,
}

impl LimitSetEstimate {
    pub fn measures(&self) -> Vec<CylinderMeasure<f64>> {
        self.representatives.iter().map(|r| r.measure.clone()).collect()
    }
}

/// Greedy ε-net over the trace tail: each measure joins the first
/// representative within `epsilon`, or founds a new one.
pub fn estimate_limit_set(
    trace: &FrequencyTrace,
    tail_fraction: f64,
    epsilon: f64,
    metric_terms: usize,
) -> Result<LimitSetEstimate> {
    estimate_limit_set_with(trace, tail_fraction, epsilon, metric_terms, DEFAULT_SHIFT_TOLERANCE)
}

pub fn estimate_limit_set_with(
    trace: &FrequencyTrace,
    tail_fraction: f64,
    epsilon: f64,
    metric_terms: usize,
    shift_tolerance: f64,
) -> Result<LimitSetEstimate> {
    if trace.entries.is_empty() {
        return invalid("trace has no entries");
    }
    if !(epsilon > 0.0) {
        return invalid("epsilon must be positive");
    }
    let start = tail_start(trace.entries.len(), tail_fraction)?;
    let tail = &trace.entries[start..];

    let mut reps: Vec<Representative> = Vec::new();
    for entry in tail {
        let mut home = None;
        for (i, r) in reps.iter().enumerate() {
            if metric(&entry.measure, &r.measure, metric_terms)?.distance < epsilon {
                home = Some(i);
                break;
            }
        }
        match home {
            Some(i) => reps[i].witnesses.push(entry.n),
            None => {
                let shift_defect = entry.measure.shift_defect();
                reps.push(Representative {
                    measure: entry.measure.clone(),
                    witnesses: vec![entry.n],
                    shift_defect,
                    flagged: shift_defect > shift_tolerance,
                });
            }
        }
    }

    let mut max_tail_gap: f64 = 0.0;
    for w in tail.windows(2) {
        max_tail_gap = max_tail_gap.max(metric(&w[0].measure, &w[1].measure, metric_terms)?.distance);
    }

    Ok(LimitSetEstimate {
        sequence: trace.sequence.clone(),
        depth: trace.depth,
        mode: trace.mode,
        representatives: reps,
        epsilon,
        metric_terms,
        tail_start: start,
        max_tail_gap,
        shift_tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullInclusionReport {
    pub metric_terms: usize,
    /// One entry per representative of the harmonic estimate.
    pub per_representative: Vec<HullDistance>,
    pub max_distance: f64,
}

/// Distance from each representative of `vlog` to the convex hull of the
/// representatives of `v`.
pub fn hull_inclusion_report(
    vlog: &LimitSetEstimate,
    v: &LimitSetEstimate,
    metric_terms: usize,
) -> Result<HullInclusionReport> {
    if vlog.depth != v.depth {
        return Err(Error::Shape(format!(
            "limit-set depths differ: {} vs {}",
            vlog.depth, v.depth
        )));
    }
    let candidates = v.measures();
    if candidates.is_empty() {
        return invalid("Cesàro estimate has no representatives");
    }
    let per_representative = vlog
        .representatives
        .iter()
        .map(|r| hull_distance(&r.measure, &candidates, metric_terms))
        .collect::<Result<Vec<_>>>()?;
    let max_distance = per_representative
        .iter()
        .map(|h| h.distance)
        .fold(0.0, f64::max);
    Ok(HullInclusionReport {
        metric_terms,
        per_representative,
        max_distance,
    })
}
