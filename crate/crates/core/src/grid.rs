//! Increasing lists of sample sizes `N` and their textual descriptors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symbolic::ExampleName;

/// Strictly increasing list of positive sample sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Grid(Vec<u64>);

impl Grid {
    pub fn new(mut points: Vec<u64>) -> Result<Self> {
        if points.is_empty() {
            return invalid("grid must be nonempty");
        }
        if points.contains(&0) {
            return invalid("grid points must be positive");
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            points.sort_unstable();
            points.dedup();
            return invalid(format!(
                "grid must be strictly increasing (sorted form would be {points:?})"
            ));
        }
        Ok(Self(points))
    }

    /// Sorted, deduplicated union of arbitrary points.
    pub fn from_unsorted(mut points: Vec<u64>) -> Result<Self> {
        points.sort_unstable();
        points.dedup();
        Self::new(points)
    }

    /// `base^a, ..., base^b`.
    pub fn powers(base: u64, a: u32, b: u32) -> Result<Self> {
        if a > b {
            return invalid(format!("empty exponent range {a}..={b}"));
        }
        let pts = (a..=b)
            .map(|e| {
                base.checked_pow(e)
                    .ok_or_else(|| Error::InvalidInput(format!("{base}^{e} overflows")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }

    /// Points `round(min * ratio^i)` up to `max`, always including `max`.
    pub fn geometric(ratio: f64, min: u64, max: u64) -> Result<Self> {
        if !(ratio > 1.0) || min == 0 || min > max {
            return invalid("geometric grid needs ratio > 1 and 0 < min <= max");
        }
        let mut pts = Vec::new();
        let mut x = min as f64;
        while x < max as f64 {
            pts.push(x.round() as u64);
            x *= ratio;
        }
        pts.push(max);
        Self::from_unsorted(pts)
    }

    pub fn merge(&self, other: &Grid) -> Grid {
        let mut pts = self.0.clone();
        pts.extend_from_slice(&other.0);
        Grid::from_unsorted(pts).expect("union of grids is a grid")
    }

    /// Keeps the points inside `[lo, hi]`.
    pub fn clamp(&self, lo: u64, hi: u64) -> Result<Grid> {
        Grid::new(self.0.iter().copied().filter(|&n| n >= lo && n <= hi).collect())
    }

    pub fn points(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> u64 {
        self.0[0]
    }

    pub fn last(&self) -> u64 {
        *self.0.last().expect("nonempty")
    }

    /// Index of the first entry of the last `ceil(fraction * len)` points.
    pub fn tail_start(&self, fraction: f64) -> Result<usize> {
        tail_start(self.len(), fraction)
    }
}

pub(crate) fn tail_start(len: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return invalid(format!("tail fraction {fraction} outside (0, 1]"));
    }
    let keep = ((fraction * len as f64).ceil() as usize).clamp(1, len.max(1));
    Ok(len.saturating_sub(keep))
}

impl TryFrom<Vec<u64>> for Grid {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Grid::new(v)
    }
}

impl From<Grid> for Vec<u64> {
    fn from(g: Grid) -> Self {
        g.0
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Textual grid descriptors:
/// `pow2:a:b`, `pow3:a:b`, `pow10:a:b`, `geometric:ratio:min:max`, or an
/// explicit comma-separated list. Several descriptors joined with `+` are
/// merged.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut acc: Option<Grid> = None;
        for part in s.split('+') {
            let g = parse_one(part.trim())?;
            acc = Some(match acc {
                Some(a) => a.merge(&g),
                None => g,
            });
        }
        acc.ok_or_else(|| Error::InvalidInput("empty grid descriptor".into()))
    }
}

fn parse_num<T: FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .trim()
        .replace('_', "")
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad {what} {field:?} in grid descriptor")))
}

fn parse_one(s: &str) -> Result<Grid> {
    let fields: Vec<&str> = s.split(':').collect();
    match fields.as_slice() {
        [kind, a, b] if kind.starts_with("pow") => {
            let base: u64 = parse_num(&kind[3..], "base")?;
            if base < 2 {
                return invalid("power grid base must be at least 2");
            }
            Grid::powers(base, parse_num(a, "exponent")?, parse_num(b, "exponent")?)
        }
        ["geometric", ratio, min, max] => Grid::geometric(
            parse_num(ratio, "ratio")?,
            parse_num(min, "minimum")?,
            parse_num(max, "maximum")?,
        ),
        [list] => {
            let pts = list
                .split(',')
                .map(|t| parse_num(t, "grid point"))
                .collect::<Result<Vec<u64>>>()?;
            Grid::new(pts)
        }
        _ => invalid(format!("unrecognized grid descriptor {s:?}")),
    }
}

/// Block boundaries `n + 1 = b^m` of an example sequence, expressed as
/// sample sizes `N = b^m - 1` (end of a block) and `N = b^m` (first point of
/// the next block), intersected with `[min, max]`.
pub fn structure_points(example: ExampleName, min: u64, max: u64) -> Vec<u64> {
    let mut pts = Vec::new();
    let mut push = |p: u64| {
        for n in [p - 1, p] {
            if n >= min && n <= max {
                pts.push(n);
            }
        }
    };
    match example {
        ExampleName::Example1 => {
            let mut p = 2u64;
            while p <= max {
                push(p);
                p *= 2;
            }
        }
        ExampleName::Example2 => {
            for k in 1u32..=8 {
                for e in [k * k - 1, k * k] {
                    if e < 64 {
                        let p = 1u64 << e;
                        if p <= max && p >= 2 {
                            push(p);
                        }
                    }
                }
            }
        }
        ExampleName::Example3 => {
            let mut p = 3u64;
            while p <= max {
                push(p);
                p *= 3;
            }
        }
    }
    pts
}

/// Geometric fill with ratio 1.1 merged with the example's block boundaries.
pub fn default_grid(example: ExampleName, min: u64, max: u64) -> Result<Grid> {
    let geo = Grid::geometric(1.1, min, max)?;
    let mut pts: Vec<u64> = geo.points().to_vec();
    pts.extend(structure_points(example, min, max));
    Grid::from_unsorted(pts)
}
