use genlab_core::arith::{sieve_range, value_by_factorization, ArithmeticKind};
use genlab_core::averaging::{counting_measure, empirical, sbp_residual};
use genlab_core::chowla::{correlation_numerator, correlation_numerator_naive, mirsky_prediction, CorrelationSpec};
use genlab_core::measures::{combine, hull_distance, metric, CylinderMeasure};
use genlab_core::numeric::Rational;
use genlab_core::symbolic::{Alphabet, PeriodicSequence, SymbolicSequence};
use genlab_core::{AveragingMode, Sieve};
use proptest::prelude::*;

fn measure(alphabet_size: u8, depth: usize) -> impl Strategy<Value = CylinderMeasure<f64>> {
    let cells = (alphabet_size as usize).pow(depth as u32);
    prop::collection::vec(0u32..100, cells).prop_filter_map("zero total", move |raw| {
        let total: u32 = raw.iter().sum();
        (total > 0).then(|| {
            let mass = raw.iter().map(|&r| r as f64 / total as f64).collect();
            CylinderMeasure::new(Alphabet::digits(alphabet_size), depth, mass).unwrap()
        })
    })
}

fn periodic() -> impl Strategy<Value = PeriodicSequence> {
    (2u8..=3).prop_flat_map(|a| {
        prop::collection::vec(0u8..a, 1..7)
            .prop_map(move |p| PeriodicSequence::new("p", Alphabet::digits(a), p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_is_a_pseudometric(a in measure(2, 3), b in measure(2, 3), c in measure(2, 3), j in 1usize..=14) {
        let d = |x: &CylinderMeasure<f64>, y: &CylinderMeasure<f64>| metric(x, y, j).unwrap().distance;
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        prop_assert!(d(&a, &b) <= 2.0);
    }

    #[test]
    fn metric_is_convex(a in measure(3, 2), b in measure(3, 2), c in measure(3, 2), e in measure(3, 2), t in 0.0f64..=1.0) {
        let d = |x: &CylinderMeasure<f64>, y: &CylinderMeasure<f64>| metric(x, y, 12).unwrap().distance;
        let left = combine(&[t, 1.0 - t], &[a.clone(), b.clone()]).unwrap();
        let right = combine(&[t, 1.0 - t], &[c.clone(), e.clone()]).unwrap();
        prop_assert!(d(&left, &right) <= t * d(&a, &c) + (1.0 - t) * d(&b, &e) + 1e-12);
    }

    #[test]
    fn truncation_bound_covers_deeper_terms(a in measure(2, 4), b in measure(2, 4), j in 1usize..=20) {
        let short = metric(&a, &b, j).unwrap();
        let long = metric(&a, &b, 30).unwrap();
        prop_assert!(long.distance - short.distance <= short.truncation_bound + 1e-12);
    }

    #[test]
    fn hull_distance_shrinks_as_candidates_are_added(
        target in measure(2, 2),
        cands in prop::collection::vec(measure(2, 2), 1..6),
        extra in measure(2, 2),
    ) {
        let before = hull_distance(&target, &cands, 6).unwrap();
        let mut more = cands.clone();
        more.push(extra);
        let after = hull_distance(&target, &more, 6).unwrap();
        prop_assert!(after.distance <= before.distance + 1e-9);
        prop_assert!(before.lower_bound <= before.distance);
        let nearest = cands.iter().map(|c| metric(&target, c, 6).unwrap().distance).fold(f64::INFINITY, f64::min);
        prop_assert!(before.distance <= nearest + 1e-12);
    }

    #[test]
    fn candidates_are_inside_their_hull(cands in prop::collection::vec(measure(3, 1), 1..6), pick in 0usize..6) {
        let target = cands[pick % cands.len()].clone();
        prop_assert!(hull_distance(&target, &cands, 3).unwrap().distance <= 1e-9);
    }

    #[test]
    fn summation_by_parts_on_periodic_points(x in periodic(), n in 2u64..60, k in 1usize..=3) {
        prop_assert!(sbp_residual(&x, n, k).unwrap().is_zero());
    }

    #[test]
    fn empirical_measures_are_normalized_and_restrict(x in periodic(), n in 1u64..300, k in 2usize..=3) {
        let e: CylinderMeasure<Rational> = empirical(&x, n, k).unwrap();
        prop_assert_eq!(e.total_mass(), Rational::from_integer(1.into()));
        let lower: CylinderMeasure<Rational> = empirical(&x, n, k - 1).unwrap();
        prop_assert_eq!(e.restrict(k - 1).unwrap(), lower);
        let c: CylinderMeasure<Rational> = counting_measure(&x, n, k).unwrap();
        prop_assert_eq!(c.total_mass(), Rational::from_integer(n.into()));
    }

    #[test]
    fn sieve_matches_factorization(lo in 1u64..5_000_000, len in 1u64..300) {
        for kind in ArithmeticKind::ALL {
            let seg = sieve_range(kind, lo, lo + len).unwrap();
            for n in lo..lo + len {
                prop_assert_eq!(seg.get(n), value_by_factorization(kind, n));
            }
        }
    }

    #[test]
    fn correlation_numerators_agree(
        shifts in prop::collection::btree_set(1u64..30, 0..4),
        exps in prop::collection::vec(1u8..=2, 4),
        kind in prop::sample::select(ArithmeticKind::ALL.to_vec()),
        n in 3u64..20_000,
    ) {
        let shifts: Vec<u64> = shifts.into_iter().collect();
        let exps = exps[..=shifts.len()].to_vec();
        let spec = CorrelationSpec::new(shifts, exps, AveragingMode::Cesaro).unwrap();
        let s = Sieve::default();
        prop_assert_eq!(
            correlation_numerator(&s, kind, &spec.factors(), n).unwrap(),
            correlation_numerator_naive(&s, kind, &spec.factors(), n).unwrap()
        );
        prop_assert_eq!(
            correlation_numerator_naive(&s, kind, &spec.factors(), n).unwrap(),
            correlation_numerator_naive(&s, kind, &spec.canonical_factors(kind), n).unwrap()
        );
    }

    #[test]
    fn mirsky_is_monotone_in_the_prime_bound(shifts in prop::collection::btree_set(1u64..50, 0..4), p in 100u64..3000) {
        let shifts: Vec<u64> = shifts.into_iter().collect();
        let a = mirsky_prediction(&shifts, p).unwrap();
        let b = mirsky_prediction(&shifts, 2 * p).unwrap();
        prop_assert!(b <= a && b >= 0.0);
    }
}

#[test]
fn periodic_points_have_no_shift_defect_at_full_periods() {
    let x = PeriodicSequence::new("p", Alphabet::digits(3), vec![0, 2, 1, 1]).unwrap();
    let e: CylinderMeasure<f64> = empirical(&x, 400, 3).unwrap();
    assert!(e.shift_defect() < 1e-12);
    assert_eq!(x.letter(5), 2);
}
