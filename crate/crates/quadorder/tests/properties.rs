//! Property-based invariants for rules, measures, and the ordering logic.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadorder::convexity::sample_test_functions;
use quadorder::measure::{Interval, Measure};
use quadorder::oracle;
use quadorder::ordering::{
    certify_s_convex_order, crossing_scan, Direction, Sign, Verdict, DEFAULT_MOMENT_TOL,
};
use quadorder::rules::{self, QuadratureRule};
use quadorder::sandwich::random_moment_matched_measure;

fn interval_strategy() -> impl Strategy<Value = Interval> {
    (-3.0f64..3.0, 0.5f64..4.0).prop_map(|(a, len)| Interval::new(a, a + len).unwrap())
}

fn build_rule(family: usize, m: usize, interval: Interval) -> QuadratureRule {
    match family {
        0 => rules::gauss(m, interval).unwrap(),
        1 => rules::lobatto(m.max(2), interval).unwrap(),
        2 => rules::radau_left(m, interval).unwrap(),
        3 => rules::radau_right(m, interval).unwrap(),
        _ => rules::chebyshev3(interval),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn affine_covariance(interval in interval_strategy(), m in 1usize..=8, family in 0usize..5) {
        let reference = build_rule(family, m, Interval::new(0.0, 1.0).unwrap());
        let mapped = build_rule(family, m, interval);
        let (a, len) = (interval.a(), interval.length());
        for (got, t) in mapped.nodes().iter().zip(reference.nodes()) {
            prop_assert!((got - (a + len * t)).abs() <= 1e-12 * len.max(1.0));
        }
        for (got, want) in mapped.weights().iter().zip(reference.weights()) {
            prop_assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn node_symmetry(interval in interval_strategy(), m in 2usize..=8) {
        let mid = interval.midpoint();
        let tol = 1e-12 * interval.length().max(1.0);
        for rule in [
            rules::gauss(m, interval).unwrap(),
            rules::lobatto(m, interval).unwrap(),
        ] {
            let nodes = rule.nodes();
            for (x, y) in nodes.iter().zip(nodes.iter().rev()) {
                prop_assert!((x - mid + (y - mid)).abs() <= tol);
            }
        }
        let left = rules::radau_left(m, interval).unwrap();
        let right = rules::radau_right(m, interval).unwrap();
        for (x, y) in left.nodes().iter().zip(right.nodes().iter().rev()) {
            prop_assert!((x - mid + (y - mid)).abs() <= tol);
        }
        for (w, v) in left.weights().iter().zip(right.weights().iter().rev()) {
            prop_assert!((w - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn apply_agrees_with_rule_measure_moments(
        interval in interval_strategy(),
        m in 1usize..=8,
        family in 0usize..5,
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..=11),
    ) {
        let rule = build_rule(family, m, interval);
        let mu = Measure::from_rule(&rule);
        let horner = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let direct = rules::apply(&rule, horner);
        let via_moments: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * mu.moment(k))
            .sum();
        let scale = 1.0f64.max(direct.abs());
        prop_assert!((direct - via_moments).abs() <= 1e-12 * scale);
    }

    #[test]
    fn moments_match_exact_rational_oracle(
        interval in interval_strategy(),
        n in 1usize..=5,
        seed in any::<u64>(),
        k in 0usize..=20,
    ) {
        let mu = random_moment_matched_measure(n, interval, seed).unwrap();
        let fast = mu.moment(k);
        let exact = oracle::to_f64(&oracle::moment(&mu, k));
        prop_assert!(
            (fast - exact).abs() <= 1e-10 * exact.abs().max(1.0),
            "k = {k}: {fast} vs {exact}"
        );
    }

    #[test]
    fn mix_moments_are_linear(
        interval in interval_strategy(),
        w in 0.05f64..0.95,
        position in 0.1f64..0.9,
        k in 0usize..=20,
    ) {
        let x = interval.a() + interval.length() * position;
        let parts = [
            (w, Measure::uniform(interval)),
            (1.0 - w, Measure::dirac(interval, x).unwrap()),
        ];
        let mixed = Measure::mix(&parts).unwrap();
        let expected: f64 = parts.iter().map(|(wi, mi)| wi * mi.moment(k)).sum();
        let scale = expected.abs().max(1.0);
        prop_assert!((mixed.moment(k) - expected).abs() <= 1e-12 * scale);
    }

    #[test]
    fn crossing_scan_is_antisymmetric(
        interval in interval_strategy(),
        n in 1usize..=5,
        seed_a in 0u64..1000,
        seed_b in 0u64..1000,
    ) {
        let mu = random_moment_matched_measure(n, interval, seed_a).unwrap();
        let nu = random_moment_matched_measure(n, interval, seed_b).unwrap();
        let fwd = crossing_scan(&mu, &nu).unwrap();
        let rev = crossing_scan(&nu, &mu).unwrap();
        prop_assert_eq!(fwd.count, rev.count);
        for (x, y) in fwd.crossings.iter().zip(&rev.crossings) {
            prop_assert!((x - y).abs() <= 1e-12 * interval.length());
        }
        prop_assert_eq!(fwd.initial_sign, rev.initial_sign.flip());
        for (s, t) in fwd.sign_sequence.iter().zip(&rev.sign_sequence) {
            prop_assert_eq!(*s, t.flip());
        }
    }
}

/// Sign changes of F_second - F_first on 10^5 equispaced points plus all
/// atom positions.
fn dense_grid_crossing_count(first: &Measure, second: &Measure) -> usize {
    let interval = first.interval();
    let mut xs: Vec<f64> = (0..=100_000)
        .map(|i| interval.a() + interval.length() * i as f64 / 100_000.0)
        .collect();
    for a in first.atoms().iter().chain(second.atoms()) {
        xs.push(a.position);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut count = 0;
    let mut last = 0i8;
    for &x in &xs {
        let d = second.cdf_eval(x) - first.cdf_eval(x);
        let sign = if d > 1e-12 {
            1
        } else if d < -1e-12 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last != 0 && sign != last {
                count += 1;
            }
            last = sign;
        }
    }
    count
}

#[test]
fn crossing_scan_agrees_with_dense_grid() {
    let interval = Interval::new(0.0, 1.0).unwrap();
    let uniform = Measure::uniform(interval);
    let mut pool: Vec<Measure> = vec![uniform.clone()];
    for m in 1..=4 {
        pool.push(Measure::from_rule(&rules::gauss(m, interval).unwrap()));
        pool.push(Measure::from_rule(&rules::radau_left(m, interval).unwrap()));
        if m >= 2 {
            pool.push(Measure::from_rule(&rules::lobatto(m, interval).unwrap()));
        }
    }
    pool.push(Measure::from_rule(&rules::chebyshev3(interval)));
    for seed in 0..10 {
        pool.push(random_moment_matched_measure(2, interval, seed).unwrap());
    }
    for (i, a) in pool.iter().enumerate() {
        for b in &pool[i + 1..] {
            let report = crossing_scan(a, b).unwrap();
            assert_eq!(
                report.count,
                dense_grid_crossing_count(a, b),
                "scan vs dense grid: {:?}",
                report.crossings
            );
        }
    }
}

#[test]
fn certified_orderings_are_sound() {
    let interval = Interval::new(0.0, 1.0).unwrap();
    let mut certified = 0;
    for n in 1..=4usize {
        let (lower_rule, upper_rule) = quadorder::sandwich_rules(n, interval).unwrap();
        let lower = Measure::from_rule(&lower_rule);
        let upper = Measure::from_rule(&upper_rule);
        for seed in 0..10u64 {
            let mu = random_moment_matched_measure(n, interval, seed).unwrap();
            for (first, second) in [(&lower, &mu), (&mu, &upper)] {
                let cert =
                    certify_s_convex_order(first, second, n, DEFAULT_MOMENT_TOL).unwrap();
                if cert.verdict != Verdict::Certified
                    || cert.direction != Direction::FirstBelowSecond
                {
                    continue;
                }
                certified += 1;
                for f in sample_test_functions(n, 100, seed ^ 0xabcd, interval) {
                    let lhs = f.integral_against(first);
                    let rhs = f.integral_against(second);
                    let slack = 1e-9 * f.max_abs_on(interval).max(1.0);
                    assert!(
                        lhs <= rhs + slack,
                        "n={n} seed={seed}: {f:?} gives {lhs} > {rhs}"
                    );
                }
            }
        }
    }
    // The corpus must actually exercise the soundness claim.
    assert!(certified >= 20, "only {certified} certified pairs");
}

#[test]
fn one_crossing_equal_means_certifies_convex_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..50 {
        let a = rng.gen_range(-2.0..1.0);
        let interval = Interval::new(a, a + rng.gen_range(0.5..3.0)).unwrap();
        let w = rng.gen_range(0.1..1.0);
        let contraction = Measure::mix(&[
            (w, Measure::dirac(interval, interval.midpoint()).unwrap()),
            (1.0 - w, Measure::uniform(interval)),
        ])
        .unwrap();
        let uniform = Measure::uniform(interval);

        let report = crossing_scan(&contraction, &uniform).unwrap();
        assert_eq!(report.count, 1, "case {case}");

        let cert =
            certify_s_convex_order(&contraction, &uniform, 1, DEFAULT_MOMENT_TOL).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified, "case {case}: {cert:?}");
        assert_eq!(cert.direction, Direction::FirstBelowSecond, "case {case}");
        assert_eq!(cert.crossing_report.initial_sign, Sign::Plus, "case {case}");
    }
}

#[test]
fn moment_mismatch_breaks_both_directions() {
    // The midpoint mass and the uniform measure share the mean but not the
    // second moment, so x^2 and -x^2 each violate one direction at s = 2.
    let interval = Interval::new(0.0, 1.0).unwrap();
    let delta = Measure::dirac(interval, 0.5).unwrap();
    let uniform = Measure::uniform(interval);

    let fwd = delta.moment(2) - uniform.moment(2);
    assert!(fwd < -1e-3, "x^2 witnesses the forward failure: {fwd}");
    let rev = -delta.moment(2) - (-uniform.moment(2));
    assert!(rev > 1e-3, "-x^2 witnesses the reverse failure: {rev}");

    let cert = certify_s_convex_order(&delta, &uniform, 2, DEFAULT_MOMENT_TOL).unwrap();
    assert_eq!(cert.verdict, Verdict::Refuted);
    assert!(cert.notes.contains("moment 2"));
}
