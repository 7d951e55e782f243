//! Divided differences, n-convexity checks on grids, and analytically
//! n-convex test function families.
//!
//! A function is convex of order n (n-convex) when every divided difference
//! over n+2 points is nonnegative; 0-convex means nondecreasing and
//! 1-convex is ordinary convexity. On a fixed grid it suffices to check
//! consecutive windows of n+2 points — nonnegativity there is equivalent to
//! n-convexity of the grid restriction (the test suite verifies this against
//! brute-force enumeration of all subsets on small grids).
//!
//! Numerical caveat: divided differences amplify rounding by O(1/h^{n+1}),
//! so grids with spacing below ~1e-3 are unreliable and callers should keep
//! spacing >= 1e-2 where possible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{Interval, Measure};
use crate::poly::Poly;
use crate::rules;

#[derive(Debug, Error)]
pub enum ConvexityError {
    #[error("divided difference needs at least one point")]
    Empty,
    #[error("points and values have different lengths")]
    LengthMismatch,
    #[error("duplicate point {0} in divided difference")]
    DuplicatePoint(f64),
    #[error("grid of {got} points is too small for order {order} (need {need})")]
    GridTooSmall {
        got: usize,
        order: usize,
        need: usize,
    },
}

/// Function families with known convexity order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum TestFunctionKind {
    /// x ↦ ±x^degree. The positive branch is n-convex for every
    /// n <= degree-1 on intervals with a >= 0, and when degree-n-1 is even
    /// on general intervals. The negated branch is the matching n-concave
    /// witness used by the necessity arguments.
    Monomial { degree: u32, negated: bool },
    /// x ↦ max(x - threshold, 0)^order; order-convex on any interval.
    TruncatedPower { order: u32, threshold: f64 },
    /// x ↦ exp(rate·x) with rate > 0; n-convex for every n.
    Exponential { rate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub kind: TestFunctionKind,
    /// The order n for which this instance is n-convex.
    pub convexity_order: u32,
}

impl TestFunction {
    pub fn monomial(degree: u32, convexity_order: u32) -> TestFunction {
        TestFunction {
            kind: TestFunctionKind::Monomial {
                degree,
                negated: false,
            },
            convexity_order,
        }
    }

    pub fn negated_monomial(degree: u32, convexity_order: u32) -> TestFunction {
        TestFunction {
            kind: TestFunctionKind::Monomial {
                degree,
                negated: true,
            },
            convexity_order,
        }
    }

    pub fn truncated_power(order: u32, threshold: f64) -> TestFunction {
        TestFunction {
            kind: TestFunctionKind::TruncatedPower { order, threshold },
            convexity_order: order,
        }
    }

    pub fn exponential(rate: f64, convexity_order: u32) -> TestFunction {
        TestFunction {
            kind: TestFunctionKind::Exponential { rate },
            convexity_order,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            TestFunctionKind::Monomial { degree, negated } => {
                let v = x.powi(degree as i32);
                if negated {
                    -v
                } else {
                    v
                }
            }
            TestFunctionKind::TruncatedPower { order, threshold } => {
                (x - threshold).max(0.0).powi(order as i32)
            }
            TestFunctionKind::Exponential { rate } => (rate * x).exp(),
        }
    }

    /// max |f| sampled on a 257-point grid; used for tolerance scaling.
    pub fn max_abs_on(&self, interval: Interval) -> f64 {
        let mut m = 0.0f64;
        for i in 0..=256 {
            let x = interval.a() + interval.length() * i as f64 / 256.0;
            m = m.max(self.eval(x).abs());
        }
        m
    }

    /// ∫ f dμ, in closed form for monomials and truncated powers; density
    /// pieces of exponentials are integrated with a 64-point Gauss rule
    /// (far below 1e-12 error at the rates in scope).
    pub fn integral_against(&self, mu: &Measure) -> f64 {
        match self.kind {
            TestFunctionKind::Monomial { degree, negated } => {
                let v = mu.moment(degree as usize);
                if negated {
                    -v
                } else {
                    v
                }
            }
            TestFunctionKind::TruncatedPower { order, threshold } => {
                let atom_part: f64 = mu
                    .atoms()
                    .iter()
                    .map(|a| a.weight * (a.position - threshold).max(0.0).powi(order as i32))
                    .sum();
                let shifted = binomial_power(-threshold, order);
                let density_part: f64 = mu
                    .pieces()
                    .iter()
                    .filter(|p| p.support.b() > threshold)
                    .map(|p| {
                        let lo = p.support.a().max(threshold);
                        Poly::new(p.coeffs.clone())
                            .mul(&shifted)
                            .integral(lo, p.support.b())
                    })
                    .sum();
                atom_part + density_part
            }
            TestFunctionKind::Exponential { rate } => {
                let atom_part: f64 = mu
                    .atoms()
                    .iter()
                    .map(|a| a.weight * (rate * a.position).exp())
                    .sum();
                let (nodes, weights) = gauss64_reference();
                let density_part: f64 = mu
                    .pieces()
                    .iter()
                    .map(|p| {
                        let poly = Poly::new(p.coeffs.clone());
                        let (a, len) = (p.support.a(), p.support.length());
                        // Rules are normalized, so scale back by the length.
                        let avg: f64 = nodes
                            .iter()
                            .zip(weights)
                            .map(|(&t, &w)| {
                                let x = a + len * t;
                                w * poly.eval(x) * (rate * x).exp()
                            })
                            .sum();
                        len * avg
                    })
                    .sum();
                atom_part + density_part
            }
        }
    }
}

/// Cached 64-point Gauss nodes/weights on [0,1]; pieces map onto it affinely.
fn gauss64_reference() -> &'static (Vec<f64>, Vec<f64>) {
    static CELL: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    CELL.get_or_init(|| {
        let unit = Interval::new(0.0, 1.0).expect("unit interval");
        let rule = rules::gauss(64, unit).expect("64-point Gauss rule");
        (rule.nodes().to_vec(), rule.weights().to_vec())
    })
}

/// Expansion of (x + c)^n as a dense polynomial.
fn binomial_power(c: f64, n: u32) -> Poly {
    let mut poly = Poly::constant(1.0);
    let factor = Poly::new(vec![c, 1.0]);
    for _ in 0..n {
        poly = poly.mul(&factor);
    }
    poly
}

/// Classical divided difference f[x_1, ..., x_k] from point/value pairs.
///
/// For a degree-d polynomial sampled at d+1 points this returns the leading
/// coefficient; over d+2 or more points it vanishes.
pub fn divided_difference(points: &[f64], values: &[f64]) -> Result<f64, ConvexityError> {
    if points.is_empty() {
        return Err(ConvexityError::Empty);
    }
    if points.len() != values.len() {
        return Err(ConvexityError::LengthMismatch);
    }
    for (i, &x) in points.iter().enumerate() {
        if points[i + 1..].contains(&x) {
            return Err(ConvexityError::DuplicatePoint(x));
        }
    }
    let mut table = values.to_vec();
    let n = table.len();
    for level in 1..n {
        for i in 0..n - level {
            table[i] = (table[i + 1] - table[i]) / (points[i + level] - points[i]);
        }
    }
    Ok(table[0])
}

/// True iff every consecutive window of n+2 grid points has a nonnegative
/// divided difference (within `tol`, scaled by max |f| on the grid).
pub fn is_n_convex_on_grid<F: Fn(f64) -> f64>(
    f: F,
    n: usize,
    grid: &[f64],
    tol: f64,
) -> Result<bool, ConvexityError> {
    let window = n + 2;
    if grid.len() < window {
        return Err(ConvexityError::GridTooSmall {
            got: grid.len(),
            order: n,
            need: window,
        });
    }
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..=grid.len() - window {
        let dd = divided_difference(&grid[i..i + window], &values[i..i + window])?;
        // A divided difference over a window of mean spacing h amplifies
        // the rounding of the function values by ~1/h^{n+1}; the tolerance
        // must absorb that or fine grids reject genuinely convex functions.
        let h_mean = (grid[i + window - 1] - grid[i]) / (window - 1) as f64;
        let amplification = h_mean.recip().powi(window as i32 - 1).max(1.0);
        if dd < -tol * scale * amplification {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Deterministic-under-seed corpus of n-convex test functions: monomials of
/// degree n+1..n+5 (degree parity restricted on intervals reaching below
/// zero), truncated powers with thresholds inside the interval, and
/// exponentials with rate in (0, 3].
pub fn sample_test_functions(
    n: usize,
    count: usize,
    seed: u64,
    interval: Interval,
) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = n as u32;
    let monomial_degrees: Vec<u32> = (order + 1..=order + 5)
        .filter(|&k| interval.a() >= 0.0 || (k - order - 1).is_multiple_of(2))
        .collect();
    (0..count)
        .map(|_| match rng.gen_range(0..3u8) {
            0 => {
                let k = monomial_degrees[rng.gen_range(0..monomial_degrees.len())];
                TestFunction::monomial(k, order)
            }
            1 => {
                // Threshold strictly inside the interval.
                let t = interval.a()
                    + interval.length() * rng.gen_range(0.05..0.95);
                TestFunction::truncated_power(order, t)
            }
            _ => {
                let rate = rng.gen_range(f64::EPSILON..=3.0);
                TestFunction::exponential(rate, order)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn single_point_is_value() {
        assert_eq!(divided_difference(&[2.0], &[5.0]).unwrap(), 5.0);
    }

    #[test]
    fn quadratic_leading_coefficient() {
        let pts = [0.0, 1.0, 2.0];
        let vals: Vec<f64> = pts.iter().map(|x| x * x).collect();
        assert!((divided_difference(&pts, &vals).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_third_difference_vanishes() {
        let pts = [0.0, 1.0, 2.0, 3.0];
        let vals: Vec<f64> = pts.iter().map(|x| x * x).collect();
        assert!(divided_difference(&pts, &vals).unwrap().abs() < 1e-14);
    }

    #[test]
    fn duplicate_points_rejected() {
        assert!(matches!(
            divided_difference(&[0.0, 1.0, 0.0], &[1.0, 2.0, 1.0]),
            Err(ConvexityError::DuplicatePoint(_))
        ));
    }

    #[test]
    fn quartic_is_3_convex() {
        let g = grid(50, 0.0, 1.0);
        assert!(is_n_convex_on_grid(|x| x.powi(4), 3, &g, 1e-10).unwrap());
    }

    #[test]
    fn concave_is_not_convex() {
        let g = grid(30, 0.0, 1.0);
        assert!(!is_n_convex_on_grid(|x| -x * x, 1, &g, 1e-10).unwrap());
    }

    #[test]
    fn truncated_cube_is_3_convex() {
        let g = grid(100, 0.0, 1.0);
        let f = TestFunction::truncated_power(3, 0.3);
        assert!(is_n_convex_on_grid(|x| f.eval(x), 3, &g, 1e-9).unwrap());
    }

    #[test]
    fn grid_too_small() {
        assert!(is_n_convex_on_grid(|x| x, 3, &[0.0, 1.0], 1e-9).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_convex() {
        let i = Interval::new(0.0, 1.0).unwrap();
        let a = sample_test_functions(3, 50, 7, i);
        let b = sample_test_functions(3, 50, 7, i);
        assert_eq!(a, b);
        let g = grid(100, 0.0, 1.0);
        for f in &a {
            assert!(
                is_n_convex_on_grid(|x| f.eval(x), 3, &g, 1e-9).unwrap(),
                "not 3-convex: {f:?}"
            );
        }
        let single = sample_test_functions(1, 1, 0, i);
        assert_eq!(single.len(), 1);
        assert!(is_n_convex_on_grid(|x| single[0].eval(x), 1, &g, 1e-9).unwrap());
    }

    #[test]
    fn truncated_power_closed_form_integral() {
        // ∫_0^1 max(x-0.3, 0)^3 dx = 0.7^4 / 4.
        let u = Measure::uniform(Interval::new(0.0, 1.0).unwrap());
        let f = TestFunction::truncated_power(3, 0.3);
        assert!((f.integral_against(&u) - 0.7f64.powi(4) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_integral_matches_closed_form() {
        // ∫_0^1 e^{2x} dx = (e^2 - 1)/2.
        let u = Measure::uniform(Interval::new(0.0, 1.0).unwrap());
        let f = TestFunction::exponential(2.0, 1);
        let exact = (2f64.exp() - 1.0) / 2.0;
        assert!((f.integral_against(&u) - exact).abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let f = TestFunction::truncated_power(3, 0.25);
        let v: serde_json::Value = serde_json::to_value(&f.kind).unwrap();
        assert_eq!(v["kind"], "TruncatedPower");
        assert!(v["params"].is_object());
    }
}
