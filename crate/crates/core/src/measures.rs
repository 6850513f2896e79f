//! Finite-depth cylinder measures on a full shift and the weak-star metric
//! built from cylinder indicators.
//!
//! A depth-`k` measure stores one mass per word of length `k`. Words are
//! encoded big-endian in base `|A|` (first letter most significant), so the
//! mass vector is in lexicographic order and restriction to a shorter prefix
//! is integer division of the code.
//!
//! The metric is
//!
//! ```text
//! d(mu, nu) = sum_{j >= 1} 2^{-j} | mu(C_j) - nu(C_j) |
//! ```
//!
//! where `C_1, C_2, ...` enumerates cylinders length-lexicographically (all
//! length-1 words in alphabet order, then length 2, ...). Cylinder indicators
//! are continuous with sup norm 1 and span a dense subspace of `C(X)`, so the
//! truncated sum at `J` terms is within `2^{1-J} * max(mass)` of the full one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{Rational, Scalar};
use crate::symbolic::Alphabet;

/// Upper bound on total mass of the stored (possibly unnormalized) measures.
pub const MAX_TOTAL_MASS: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderMeasure<S> {
    alphabet: Alphabet,
    depth: usize,
    mass: Vec<S>,
}

pub(crate) fn word_count(alphabet: &Alphabet, depth: usize) -> usize {
    alphabet.len().pow(depth as u32)
}

pub(crate) fn encode(alphabet: &Alphabet, letters: &[u8]) -> usize {
    letters
        .iter()
        .fold(0usize, |c, &l| c * alphabet.len() + l as usize)
}

pub(crate) fn decode(alphabet: &Alphabet, depth: usize, mut code: usize) -> Vec<u8> {
    let a = alphabet.len();
    let mut out = vec![0u8; depth];
    for slot in out.iter_mut().rev() {
        *slot = (code % a) as u8;
        code /= a;
    }
    out
}

impl<S: Scalar> CylinderMeasure<S> {
    /// Validates nonnegativity and the total-mass bound.
    pub fn new(alphabet: Alphabet, depth: usize, mass: Vec<S>) -> Result<Self> {
        if depth == 0 {
            return invalid("measure depth must be positive");
        }
        let expected = word_count(&alphabet, depth);
        if mass.len() != expected {
            return Err(Error::Shape(format!(
                "depth {depth} over {} letters needs {expected} masses, got {}",
                alphabet.len(),
                mass.len()
            )));
        }
        if mass.iter().any(|m| m.is_negative()) {
            return invalid("cylinder masses must be nonnegative");
        }
        let m = Self {
            alphabet,
            depth,
            mass,
        };
        if m.total_mass().to_f64() > MAX_TOTAL_MASS as f64 + 1e-12 {
            return invalid(format!(
                "total mass {} exceeds {MAX_TOTAL_MASS}",
                m.total_mass().to_f64()
            ));
        }
        Ok(m)
    }

    pub fn zero(alphabet: Alphabet, depth: usize) -> Result<Self> {
        let n = word_count(&alphabet, depth);
        Self::new(alphabet, depth, vec![S::zero(); n])
    }

    /// Unit mass on a single word.
    pub fn dirac_word(alphabet: Alphabet, letters: &[u8]) -> Result<Self> {
        let mut m = Self::zero(alphabet, letters.len())?;
        if letters.iter().any(|&l| l as usize >= m.alphabet.len()) {
            return invalid("word letter outside alphabet");
        }
        let c = encode(&m.alphabet, letters);
        m.mass[c] = S::one();
        Ok(m)
    }

    /// Dirac measure at the fixed point `lll...`, seen at depth `depth`.
    pub fn fixed_point(alphabet: Alphabet, letter: u8, depth: usize) -> Result<Self> {
        Self::dirac_word(alphabet, &vec![letter; depth])
    }

    pub(crate) fn from_raw(alphabet: Alphabet, depth: usize, mass: Vec<S>) -> Self {
        debug_assert_eq!(mass.len(), word_count(&alphabet, depth));
        Self {
            alphabet,
            depth,
            mass,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn masses(&self) -> &[S] {
        &self.mass
    }

    pub fn mass(&self, letters: &[u8]) -> Result<S> {
        if letters.len() > self.depth || letters.is_empty() {
            return invalid("word length must be between 1 and the measure depth");
        }
        if letters.len() == self.depth {
            return Ok(self.mass[encode(&self.alphabet, letters)].clone());
        }
        let r = self.restrict(letters.len())?;
        Ok(r.mass[encode(&self.alphabet, letters)].clone())
    }

    /// Mass of a word given in serialized form.
    pub fn mass_of_word(&self, word: &str) -> Result<S> {
        let letters = self.alphabet.parse_word(word)?;
        self.mass(&letters)
    }

    pub fn total_mass(&self) -> S {
        self.mass.iter().fold(S::zero(), |acc, m| acc + m.clone())
    }

    /// `(word, mass)` pairs in lexicographic order.
    pub fn iter_words(&self) -> impl Iterator<Item = (Vec<u8>, &S)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .map(move |(c, m)| (decode(&self.alphabet, self.depth, c), m))
    }

    pub fn scale(&self, alpha: &S) -> Result<Self> {
        if alpha.is_negative() {
            return invalid("scaling factor must be nonnegative");
        }
        Self::new(
            self.alphabet.clone(),
            self.depth,
            self.mass.iter().map(|m| m.clone() * alpha.clone()).collect(),
        )
    }

    /// Marginal on the first `k2` coordinates.
    pub fn restrict(&self, k2: usize) -> Result<Self> {
        if k2 == 0 || k2 > self.depth {
            return invalid(format!(
                "cannot restrict depth-{} measure to depth {k2}",
                self.depth
            ));
        }
        if k2 == self.depth {
            return Ok(self.clone());
        }
        let block = self.alphabet.len().pow((self.depth - k2) as u32);
        let mass = self
            .mass
            .chunks(block)
            .map(|c| c.iter().fold(S::zero(), |acc, m| acc + m.clone()))
            .collect();
        Ok(Self::from_raw(self.alphabet.clone(), k2, mass))
    }

    /// Marginal on coordinates `1..depth` (the image under the shift).
    pub fn drop_first(&self) -> Result<Self> {
        if self.depth < 2 {
            return invalid("dropping a coordinate needs depth >= 2");
        }
        let sub = self.alphabet.len().pow((self.depth - 1) as u32);
        let mut mass = vec![S::zero(); sub];
        for (c, m) in self.mass.iter().enumerate() {
            mass[c % sub] = mass[c % sub].clone() + m.clone();
        }
        Ok(Self::from_raw(self.alphabet.clone(), self.depth - 1, mass))
    }

    /// Total variation (half the l1 distance) between the first-coordinate
    /// and last-coordinate depth-(k-1) marginals. Zero for shift-invariant
    /// measures; defined as 0 at depth 1.
    pub fn shift_defect(&self) -> f64 {
        if self.depth < 2 {
            return 0.0;
        }
        let head = self.restrict(self.depth - 1).expect("depth >= 2");
        let tail = self.drop_first().expect("depth >= 2");
        0.5 * head
            .mass
            .iter()
            .zip(&tail.mass)
            .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
            .sum::<f64>()
    }

    pub fn to_f64(&self) -> CylinderMeasure<f64> {
        CylinderMeasure::from_raw(
            self.alphabet.clone(),
            self.depth,
            self.mass.iter().map(Scalar::to_f64).collect(),
        )
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(
                self.alphabet.to_string(),
                other.alphabet.to_string(),
            ));
        }
        Ok(())
    }
}

impl CylinderMeasure<Rational> {
    /// `counts / denominator`, exactly.
    pub fn from_counts(alphabet: Alphabet, depth: usize, counts: &[u64], denominator: u64) -> Result<Self> {
        Self::new(
            alphabet,
            depth,
            counts
                .iter()
                .map(|&c| Rational::from_ratio(c as i64, denominator))
                .collect(),
        )
    }
}

/// The cylinder-indicator family `f_1, ..., f_J` in length-lex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricBasis {
    alphabet: Alphabet,
    /// `(word length, word code)` for each `j = 1..=J`.
    terms: Vec<(usize, usize)>,
}

impl MetricBasis {
    pub fn new(alphabet: &Alphabet, max_index: usize) -> Result<Self> {
        if max_index == 0 {
            return invalid("metric needs J >= 1");
        }
        let mut terms = Vec::with_capacity(max_index);
        let mut len = 1;
        'outer: loop {
            for code in 0..word_count(alphabet, len) {
                if terms.len() == max_index {
                    break 'outer;
                }
                terms.push((len, code));
            }
            len += 1;
        }
        Ok(Self {
            alphabet: alphabet.clone(),
            terms,
        })
    }

    /// Number of basis functions whose cylinders have length `<= depth`.
    pub fn terms_within_depth(alphabet: &Alphabet, depth: usize) -> usize {
        (1..=depth).map(|l| word_count(alphabet, l)).sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest cylinder used.
    pub fn required_depth(&self) -> usize {
        self.terms.last().map_or(0, |t| t.0)
    }

    /// The word `f_j` indicates (1-based `j`).
    pub fn word(&self, j: usize) -> Vec<u8> {
        let (len, code) = self.terms[j - 1];
        decode(&self.alphabet, len, code)
    }

    fn check<S: Scalar>(&self, mu: &CylinderMeasure<S>) -> Result<()> {
        if mu.alphabet != self.alphabet {
            return Err(Error::AlphabetMismatch(
                mu.alphabet.to_string(),
                self.alphabet.to_string(),
            ));
        }
        let needed = self.required_depth();
        if needed > mu.depth {
            let index = self
                .terms
                .iter()
                .position(|t| t.0 > mu.depth)
                .map_or(self.len(), |p| p + 1);
            return Err(Error::DepthExceeded {
                index,
                needed,
                depth: mu.depth,
            });
        }
        Ok(())
    }

    /// `(integral of f_j d mu)_{j=1..J}`.
    pub fn integrals<S: Scalar>(&self, mu: &CylinderMeasure<S>) -> Result<Vec<S>> {
        self.check(mu)?;
        let tables: Vec<CylinderMeasure<S>> = (1..=self.required_depth())
            .map(|l| mu.restrict(l))
            .collect::<Result<_>>()?;
        Ok(self
            .terms
            .iter()
            .map(|&(len, code)| tables[len - 1].mass[code].clone())
            .collect())
    }

    pub fn weight<S: Scalar>(j: usize) -> S {
        S::pow2_inv(j as u32)
    }
}

/// Truncated distance together with a bound on the omitted tail.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue<S> {
    pub distance: S,
    pub truncation_bound: S,
}

/// `sum_{j <= J} 2^{-j} |mu(C_j) - nu(C_j)|`.
pub fn metric<S: Scalar>(
    mu: &CylinderMeasure<S>,
    nu: &CylinderMeasure<S>,
    max_index: usize,
) -> Result<MetricValue<S>> {
    mu.check_compatible(nu)?;
    let basis = MetricBasis::new(&mu.alphabet, max_index)?;
    let a = basis.integrals(mu)?;
    let b = basis.integrals(nu)?;
    let distance = a
        .into_iter()
        .zip(b)
        .enumerate()
        .fold(S::zero(), |acc, (i, (x, y))| {
            acc + MetricBasis::weight::<S>(i + 1) * (x - y).abs()
        });
    let mu_mass = mu.total_mass();
    let nu_mass = nu.total_mass();
    let max_mass = if mu_mass > nu_mass { mu_mass } else { nu_mass };
    let truncation_bound = S::pow2_inv(max_index as u32) * S::from_u64(2) * max_mass;
    Ok(MetricValue {
        distance,
        truncation_bound,
    })
}

/// Pointwise weighted sum `sum_i w_i mu_i`.
pub fn combine<S: Scalar>(weights: &[S], measures: &[CylinderMeasure<S>]) -> Result<CylinderMeasure<S>> {
    if weights.len() != measures.len() {
        return Err(Error::Shape(format!(
            "{} weights for {} measures",
            weights.len(),
            measures.len()
        )));
    }
    let Some(first) = measures.first() else {
        return Err(Error::Shape("combine needs at least one measure".into()));
    };
    if weights.iter().any(|w| w.is_negative()) {
        return invalid("combination weights must be nonnegative");
    }
    for m in measures {
        first.check_compatible(m)?;
        if m.depth != first.depth {
            return Err(Error::Shape(format!(
                "depth {} vs {}",
                first.depth, m.depth
            )));
        }
    }
    let total_weight = weights.iter().fold(S::zero(), |acc, w| acc + w.clone());
    if total_weight.to_f64() > MAX_TOTAL_MASS as f64 + 1e-12 {
        return invalid("combination weights must sum to at most 2");
    }
    let mut mass = vec![S::zero(); first.mass.len()];
    for (w, m) in weights.iter().zip(measures) {
        for (acc, x) in mass.iter_mut().zip(&m.mass) {
            *acc = acc.clone() + w.clone() * x.clone();
        }
    }
    CylinderMeasure::new(first.alphabet.clone(), first.depth, mass)
}

/// Tuning for [`hull_distance_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullOptions {
    /// Candidates and target must agree in total mass to this tolerance.
    pub mass_tolerance: f64,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self { mass_tolerance: 1e-9 }
    }
}

/// Result of a hull-distance solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullDistance {
    /// Metric distance to the convex combination `weights`; an upper bound
    /// on the true hull distance.
    pub distance: f64,
    /// Lower bound certified by a feasible dual solution.
    pub lower_bound: f64,
    /// `distance - lower_bound`.
    pub gap: f64,
    pub weights: Vec<f64>,
}

/// Distance from `mu` to the convex hull of `candidates` with default options.
pub fn hull_distance<S: Scalar>(
    mu: &CylinderMeasure<S>,
    candidates: &[CylinderMeasure<S>],
    max_index: usize,
) -> Result<HullDistance> {
    hull_distance_with(mu, candidates, max_index, &HullOptions::default())
}

fn solve_lp(problem: &microlp::Problem) -> Result<microlp::Solution> {
    let outcome = problem
        .solve()
        .map_err(|e| Error::InvalidInput(format!("hull LP failed: {e}")))?;
    outcome
        .into_solution()
        .map_err(|_| Error::InvalidInput("hull LP was interrupted".into()))
}

/// Minimizes `lambda -> d(mu, sum_i lambda_i nu_i)` over the simplex.
///
/// With `r = b - sum_i lambda_i a_i` (`a_i`, `b` the basis integrals) the
/// objective `sum_j c_j |r_j|` is piecewise linear, so the primal is solved
/// as a linear program. The dual program
/// `max z  s.t.  z <= y . (b - a_i),  |y_j| <= c_j`
/// is solved separately; any feasible `y` gives the lower bound
/// `min_i y . (b - a_i)`, which is recomputed here from `y` alone.
pub fn hull_distance_with<S: Scalar>(
    mu: &CylinderMeasure<S>,
    candidates: &[CylinderMeasure<S>],
    max_index: usize,
    opts: &HullOptions,
) -> Result<HullDistance> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};

    if candidates.is_empty() {
        return invalid("hull distance needs at least one candidate");
    }
    let target_mass = mu.total_mass().to_f64();
    for c in candidates {
        mu.check_compatible(c)?;
        if c.depth != mu.depth {
            return Err(Error::Shape(format!(
                "candidate depth {} vs target depth {}",
                c.depth, mu.depth
            )));
        }
        let m = c.total_mass().to_f64();
        if (m - target_mass).abs() > opts.mass_tolerance {
            return invalid(format!(
                "candidate mass {m} differs from target mass {target_mass}; normalize first"
            ));
        }
    }
    let basis = MetricBasis::new(&mu.alphabet, max_index)?;
    let to_f64 = |v: Vec<S>| v.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
    let b = to_f64(basis.integrals(mu)?);
    let points: Vec<Vec<f64>> = candidates
        .iter()
        .map(|c| basis.integrals(c).map(to_f64))
        .collect::<Result<_>>()?;
    let c: Vec<f64> = (1..=basis.len()).map(MetricBasis::weight::<f64>).collect();

    let mut primal = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<_> = points.iter().map(|_| primal.add_var(0.0, (0.0, 1.0))).collect();
    let t: Vec<_> = c.iter().map(|&cj| primal.add_var(cj, (0.0, f64::INFINITY))).collect();
    let all_w: Vec<_> = w.iter().map(|&v| (v, 1.0)).collect();
    primal.add_constraint(all_w.as_slice(), ComparisonOp::Eq, 1.0);
    for (j, &tj) in t.iter().enumerate() {
        let mut above = vec![(tj, 1.0)];
        let mut below = vec![(tj, 1.0)];
        for (&wi, p) in w.iter().zip(&points) {
            above.push((wi, p[j]));
            below.push((wi, -p[j]));
        }
        primal.add_constraint(above.as_slice(), ComparisonOp::Ge, b[j]);
        primal.add_constraint(below.as_slice(), ComparisonOp::Ge, -b[j]);
    }
    let sol = solve_lp(&primal)?;
    let mut weights: Vec<f64> = w.iter().map(|&v| sol.var_value(v).max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|x| *x /= total);

    let value = |lambda: &[f64]| -> f64 {
        (0..b.len())
            .map(|j| {
                let mixed: f64 = lambda.iter().zip(&points).map(|(x, p)| x * p[j]).sum();
                c[j] * (b[j] - mixed).abs()
            })
            .sum()
    };
    let mut distance = value(&weights);
    // a vertex can beat the LP point by rounding error, e.g. when mu is a candidate
    for i in 0..points.len() {
        let mut e = vec![0.0; points.len()];
        e[i] = 1.0;
        let v = value(&e);
        if v < distance {
            distance = v;
            weights = e;
        }
    }

    let mut dual = Problem::new(OptimizationDirection::Maximize);
    let y: Vec<_> = c.iter().map(|&cj| dual.add_var(0.0, (-cj, cj))).collect();
    let z = dual.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for p in &points {
        let mut row = vec![(z, 1.0)];
        for (j, &yj) in y.iter().enumerate() {
            row.push((yj, -(b[j] - p[j])));
        }
        dual.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
    }
    let dsol = solve_lp(&dual)?;
    let yv: Vec<f64> = y
        .iter()
        .zip(&c)
        .map(|(&v, &cj)| dsol.var_value(v).clamp(-cj, cj))
        .collect();
    let certified = points
        .iter()
        .map(|p| (0..b.len()).map(|j| yv[j] * (b[j] - p[j])).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let lower_bound = certified.max(0.0).min(distance);
    Ok(HullDistance {
        distance,
        lower_bound,
        gap: distance - lower_bound,
        weights,
    })
}

/// JSON layout of a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub alphabet: Alphabet,
    pub depth: usize,
    pub cylinders: BTreeMap<String, f64>,
    pub total_mass: f64,
}

impl CylinderMeasure<f64> {
    pub fn to_json(&self) -> MeasureJson {
        MeasureJson {
            alphabet: self.alphabet.clone(),
            depth: self.depth,
            cylinders: self
                .iter_words()
                .map(|(w, m)| (self.alphabet.format_word(&w), *m))
                .collect(),
            total_mass: self.total_mass(),
        }
    }

    pub fn from_json(json: &MeasureJson) -> Result<Self> {
        let mut m = Self::zero(json.alphabet.clone(), json.depth)?;
        for (word, mass) in &json.cylinders {
            let letters = m.alphabet.parse_word(word)?;
            if letters.len() != json.depth {
                return invalid(format!("word {word:?} does not have length {}", json.depth));
            }
            m.mass[encode(&m.alphabet, &letters)] = *mass;
        }
        Self::new(m.alphabet, m.depth, m.mass)
    }
}

impl Serialize for CylinderMeasure<f64> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CylinderMeasure<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = MeasureJson::deserialize(deserializer)?;
        Self::from_json(&json).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn q(n: i64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn bin() -> Alphabet {
        Alphabet::digits(2)
    }

    #[test]
    fn metric_between_fixed_points() {
        let d0 = CylinderMeasure::<Rational>::fixed_point(bin(), 0, 1).unwrap();
        let d1 = CylinderMeasure::<Rational>::fixed_point(bin(), 1, 1).unwrap();
        let v = metric(&d0, &d1, 2).unwrap();
        assert_eq!(v.distance, q(3, 4));
        assert_eq!(v.truncation_bound, q(1, 2));
        assert!(metric(&d0, &d0, 2).unwrap().distance.is_zero());
    }

    #[test]
    fn metric_depth_and_alphabet_errors() {
        let d0 = CylinderMeasure::<f64>::fixed_point(bin(), 0, 1).unwrap();
        let e0 = CylinderMeasure::<f64>::fixed_point(Alphabet::digits(3), 0, 1).unwrap();
        assert!(matches!(metric(&d0, &e0, 1), Err(Error::AlphabetMismatch(..))));
        assert_eq!(
            metric(&d0, &d0, 3).unwrap_err(),
            Error::DepthExceeded {
                index: 3,
                needed: 2,
                depth: 1
            }
        );
        assert!(metric(&d0, &d0, 0).is_err());
    }

    #[test]
    fn basis_order_is_length_lex() {
        let b = MetricBasis::new(&bin(), 6).unwrap();
        let words: Vec<Vec<u8>> = (1..=6).map(|j| b.word(j)).collect();
        assert_eq!(
            words,
            vec![vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(b.required_depth(), 2);
        assert_eq!(MetricBasis::terms_within_depth(&Alphabet::digits(3), 2), 12);
    }

    #[test]
    fn homogeneity_example() {
        let d0 = CylinderMeasure::<Rational>::fixed_point(bin(), 0, 2).unwrap();
        let mu = combine(&[q(1, 3), q(2, 3)], &[d0.clone(), CylinderMeasure::fixed_point(bin(), 1, 2).unwrap()]).unwrap();
        let alpha = q(2, 7);
        let lhs = metric(&d0.scale(&alpha).unwrap(), &mu.scale(&alpha).unwrap(), 6).unwrap();
        let rhs = metric(&d0, &mu, 6).unwrap();
        assert_eq!(lhs.distance, alpha * rhs.distance);
    }

    #[test]
    fn combine_examples() {
        let d0 = CylinderMeasure::<Rational>::fixed_point(bin(), 0, 1).unwrap();
        let d1 = CylinderMeasure::<Rational>::fixed_point(bin(), 1, 1).unwrap();
        let mid = combine(&[q(1, 2), q(1, 2)], &[d0.clone(), d1.clone()]).unwrap();
        assert_eq!(mid.masses(), &[q(1, 2), q(1, 2)]);
        assert_eq!(combine(&[Rational::one()], &[d0.clone()]).unwrap(), d0);

        let tri = Alphabet::digits(3);
        let fixed: Vec<_> = (0..3)
            .map(|l| CylinderMeasure::<Rational>::fixed_point(tri.clone(), l, 1).unwrap())
            .collect();
        let third = q(1, 3);
        let c = combine(&[third.clone(), third.clone(), third.clone()], &fixed).unwrap();
        assert_eq!(c.masses(), &[third.clone(), third.clone(), third]);

        assert!(combine(&[q(1, 2)], &[d0.clone(), d1.clone()]).is_err());
        assert!(combine(&[q(-1, 2), q(3, 2)], &[d0.clone(), d1.clone()]).is_err());
        assert!(combine(&[q(2, 1), q(1, 1)], &[d0, d1]).is_err());
    }

    #[test]
    fn restrict_examples() {
        let w = CylinderMeasure::<Rational>::dirac_word(bin(), &[0, 1]).unwrap();
        let r = w.restrict(1).unwrap();
        assert_eq!(r.masses(), &[Rational::one(), Rational::zero()]);
        assert_eq!(w.restrict(2).unwrap(), w);
        assert!(w.restrict(3).is_err());
        assert!(w.restrict(0).is_err());
        let tail = w.drop_first().unwrap();
        assert_eq!(tail.masses(), &[Rational::zero(), Rational::one()]);
        assert_eq!(w.shift_defect(), 1.0);
    }

    #[test]
    fn measure_validation() {
        assert!(CylinderMeasure::<f64>::new(bin(), 1, vec![0.5]).is_err());
        assert!(CylinderMeasure::<f64>::new(bin(), 1, vec![-0.1, 1.1]).is_err());
        assert!(CylinderMeasure::<f64>::new(bin(), 1, vec![1.5, 1.0]).is_err());
        assert!(CylinderMeasure::<f64>::new(bin(), 1, vec![1.0, 1.0]).is_ok());
        assert!(CylinderMeasure::<f64>::new(bin(), 0, vec![1.0]).is_err());
    }

    #[test]
    fn hull_examples() {
        let tri = Alphabet::digits(3);
        let nu1 = CylinderMeasure::<f64>::new(tri.clone(), 1, vec![0.2, 0.3, 0.5]).unwrap();
        let nu2 = CylinderMeasure::<f64>::new(tri.clone(), 1, vec![0.6, 0.1, 0.3]).unwrap();
        let inside = hull_distance(&nu1, &[nu2.clone(), nu1.clone()], 3).unwrap();
        assert!(inside.distance <= 1e-9, "{inside:?}");

        let mid = combine(&[0.5, 0.5], &[nu1.clone(), nu2.clone()]).unwrap();
        let h = hull_distance(&mid, &[nu1.clone(), nu2.clone()], 3).unwrap();
        assert!(h.distance <= 1e-6, "{h:?}");
        assert!((h.weights[0] - 0.5).abs() < 1e-6);

        let d0 = CylinderMeasure::<f64>::fixed_point(bin(), 0, 1).unwrap();
        let d1 = CylinderMeasure::<f64>::fixed_point(bin(), 1, 1).unwrap();
        let single = hull_distance(&d0, &[d1.clone()], 2).unwrap();
        assert_eq!(single.distance, metric(&d0, &d1, 2).unwrap().distance);
        assert!(single.lower_bound <= single.distance);

        assert!(hull_distance(&d0, &[], 2).is_err());
        let heavy = d1.scale(&1.5).unwrap();
        assert!(hull_distance(&d0, &[heavy], 2).is_err());
    }

    #[test]
    fn hull_distance_outside_a_segment() {
        // segment between (0.3, 0.7) and (0.6, 0.4) in the simplex over {0,1};
        // the target (0.1, 0.9) is nearest to the first endpoint
        let a = CylinderMeasure::<f64>::new(bin(), 1, vec![0.3, 0.7]).unwrap();
        let b = CylinderMeasure::<f64>::new(bin(), 1, vec![0.6, 0.4]).unwrap();
        let t = CylinderMeasure::<f64>::new(bin(), 1, vec![0.1, 0.9]).unwrap();
        let h = hull_distance(&t, &[a.clone(), b], 2).unwrap();
        let expect = metric(&t, &a, 2).unwrap().distance;
        assert!((h.distance - expect).abs() < 1e-12);
        assert!(h.lower_bound <= h.distance && h.lower_bound > expect - 1e-6, "{h:?}");
    }

    #[test]
    fn centroid_inside_a_ring_of_candidates() {
        let tri = Alphabet::digits(3);
        let ring: Vec<CylinderMeasure<f64>> = [[0.1, 0.2, 0.7], [0.2, 0.1, 0.7], [0.7, 0.1, 0.2], [0.7, 0.2, 0.1], [0.1, 0.7, 0.2], [0.2, 0.7, 0.1]]
            .iter()
            .map(|v| CylinderMeasure::new(tri.clone(), 1, v.to_vec()).unwrap())
            .collect();
        let centre = CylinderMeasure::new(tri.clone(), 1, vec![1.0 / 3.0; 3]).unwrap();
        let h = hull_distance(&centre, &ring, 3).unwrap();
        assert!(h.distance < 1e-9, "{h:?}");
        let corner = CylinderMeasure::new(tri, 1, vec![1.0, 0.0, 0.0]).unwrap();
        let h = hull_distance(&corner, &ring, 3).unwrap();
        // every ring coordinate is >= 0.1, so (0.7, 0.1, 0.2) is nearest: 0.3/2 + 0.1/4 + 0.2/8
        assert!((h.distance - 0.2).abs() < 1e-9, "{h:?}");
        assert!(h.gap < 1e-9, "{h:?}");
    }

    #[test]
    fn json_round_trip() {
        let m = CylinderMeasure::<f64>::new(bin(), 2, vec![0.25, 0.25, 0.125, 0.375]).unwrap();
        let j = m.to_json();
        assert_eq!(j.cylinders["10"], 0.125);
        let text = serde_json::to_string(&j).unwrap();
        let back: MeasureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(CylinderMeasure::from_json(&back).unwrap(), m);
        assert!(text.contains("\"total_mass\":1.0"));
    }

    #[test]
    fn mass_lookup_by_word() {
        let m = CylinderMeasure::<f64>::new(bin(), 2, vec![0.25, 0.25, 0.125, 0.375]).unwrap();
        assert_eq!(m.mass_of_word("1").unwrap(), 0.5);
        assert_eq!(m.mass_of_word("01").unwrap(), 0.25);
        assert!(m.mass_of_word("011").is_err());
    }
}
