//! End-to-end sandwich bounds: for a probability measure whose first n
//! moments match the uniform measure's, the integral of every n-convex
//! function lies between a pair of quadrature rules — Gauss below and
//! Lobatto above for odd n, left and right Radau for even n.
//!
//! Randomness is deterministic under seed (ChaCha8), and the seed travels
//! with every result, so corpora are reproducible within this
//! implementation.

use num::rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexity::{sample_test_functions, TestFunction, TestFunctionKind};
use crate::measure::{Interval, Measure};
use crate::oracle;
use crate::ordering::{certify_s_convex_order, OrderCertificate, OrderError};
use crate::rules::{self, QuadratureRule, RuleError};

#[derive(Debug, Error)]
pub enum SandwichError {
    #[error("moment hypothesis fails at k = {k} (residual {residual:.3e})")]
    HypothesisFailed { k: usize, residual: f64 },
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Measure(#[from] crate::measure::MeasureError),
    #[error("oracle integration supports polynomials and truncated powers only")]
    UnsupportedOracleKind,
}

/// Outcome of checking moments 1..n against the uniform measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub satisfied: bool,
    /// Smallest failing moment index and its residual, when not satisfied.
    pub first_failing: Option<(usize, f64)>,
}

/// One spot check: a test function with the three values that must be
/// ordered lower <= middle <= upper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub function: TestFunction,
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    /// max |f| over the interval; tolerances scale with this.
    pub scale: f64,
}

impl SpotCheck {
    /// Worst bound violation relative to the function's scale; <= 0 when
    /// the sandwich holds.
    pub fn relative_violation(&self) -> f64 {
        let abs = (self.lower - self.middle).max(self.middle - self.upper);
        abs / self.scale.max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichResult {
    pub n: usize,
    pub seed: u64,
    pub lower_rule: QuadratureRule,
    pub upper_rule: QuadratureRule,
    pub lower_certificate: OrderCertificate,
    pub upper_certificate: OrderCertificate,
    pub spot_checks: Vec<SpotCheck>,
}

impl SandwichResult {
    pub fn max_relative_violation(&self) -> f64 {
        self.spot_checks
            .iter()
            .map(SpotCheck::relative_violation)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The extremal rule pair for order n: (Gauss, Lobatto) when n is odd,
/// (left Radau, right Radau) when n is even.
pub fn sandwich_rules(
    n: usize,
    interval: Interval,
) -> Result<(QuadratureRule, QuadratureRule), RuleError> {
    if n % 2 == 1 {
        Ok((
            rules::gauss(n.div_ceil(2), interval)?,
            rules::lobatto((n + 3) / 2, interval)?,
        ))
    } else {
        Ok((
            rules::radau_left((n + 2) / 2, interval)?,
            rules::radau_right((n + 2) / 2, interval)?,
        ))
    }
}

/// Do moments 1..n of μ match the uniform measure's within `tol` (relative)?
pub fn check_moment_hypothesis(mu: &Measure, n: usize, tol: f64) -> MomentCheck {
    for k in 1..=n {
        let exact = rules::uniform_moment(mu.interval(), k);
        let residual = mu.moment(k) - exact;
        if residual.abs() > tol * exact.abs().max(1.0) {
            return MomentCheck {
                satisfied: false,
                first_failing: Some((k, residual)),
            };
        }
    }
    MomentCheck {
        satisfied: true,
        first_failing: None,
    }
}

/// Certify both sandwich sides for μ at order n and attach 50 seeded
/// n-convex spot checks.
///
/// The moment hypothesis is fatal when violated: the monomial pair ±x^k at
/// the failing index breaks one side each, so no recovery is possible.
pub fn certify_sandwich(
    mu: &Measure,
    n: usize,
    tol: f64,
    seed: u64,
) -> Result<SandwichResult, SandwichError> {
    let check = check_moment_hypothesis(mu, n, tol);
    if let Some((k, residual)) = check.first_failing {
        return Err(SandwichError::HypothesisFailed { k, residual });
    }

    let interval = mu.interval();
    let (lower_rule, upper_rule) = sandwich_rules(n, interval)?;
    let lower_measure = Measure::from_rule(&lower_rule);
    let upper_measure = Measure::from_rule(&upper_rule);
    let lower_certificate = certify_s_convex_order(&lower_measure, mu, n, tol)?;
    let upper_certificate = certify_s_convex_order(mu, &upper_measure, n, tol)?;

    let spot_checks = sample_test_functions(n, 50, seed, interval)
        .into_iter()
        .map(|f| {
            let lower = rules::apply(&lower_rule, |x| f.eval(x));
            let upper = rules::apply(&upper_rule, |x| f.eval(x));
            let middle = f.integral_against(mu);
            let scale = f.max_abs_on(interval);
            SpotCheck {
                function: f,
                lower,
                middle,
                upper,
                scale,
            }
        })
        .collect();

    Ok(SandwichResult {
        n,
        seed,
        lower_rule,
        upper_rule,
        lower_certificate,
        upper_certificate,
        spot_checks,
    })
}

/// A seeded convex mixture of measures that each reproduce the uniform
/// moments to degree >= n: the uniform measure itself, Gauss rules with
/// 2m-1 >= n, Lobatto rules with 2m-3 >= n, both Radau rules with
/// 2m-2 >= n, and the 3-point Chebyshev rule when n <= 3. The mixture then
/// satisfies the moment hypothesis by construction.
pub fn random_moment_matched_measure(
    n: usize,
    interval: Interval,
    seed: u64,
) -> Result<Measure, SandwichError> {
    let mut components: Vec<Measure> = vec![Measure::uniform(interval)];
    let gauss_min = (n + 1).div_ceil(2).max(1); // 2m-1 >= n
    let lobatto_min = (n + 3).div_ceil(2).max(2); // 2m-3 >= n
    let radau_min = (n + 2).div_ceil(2).max(1); // 2m-2 >= n
    for m in gauss_min..gauss_min + 2 {
        components.push(Measure::from_rule(&rules::gauss(m, interval)?));
    }
    for m in lobatto_min..lobatto_min + 2 {
        components.push(Measure::from_rule(&rules::lobatto(m, interval)?));
    }
    components.push(Measure::from_rule(&rules::radau_left(radau_min, interval)?));
    components.push(Measure::from_rule(&rules::radau_right(radau_min, interval)?));
    if n <= 3 {
        components.push(Measure::from_rule(&rules::chebyshev3(interval)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..components.len())
        .map(|_| rng.gen_range(0.1..1.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // Kill the normalization rounding on the last weight.
    let partial: f64 = weights[..weights.len() - 1].iter().sum();
    *weights.last_mut().unwrap() = 1.0 - partial;

    let mix: Vec<(f64, Measure)> = weights.into_iter().zip(components).collect();
    Ok(Measure::mix(&mix)?)
}

/// Exact-rational integral of a polynomial-type test function against a
/// measure; the independent verification path for double-precision results.
pub fn oracle_integral(mu: &Measure, f: &TestFunction) -> Result<BigRational, SandwichError> {
    match f.kind {
        TestFunctionKind::Monomial { degree, negated } => {
            let v = oracle::moment(mu, degree as usize);
            Ok(if negated { -v } else { v })
        }
        TestFunctionKind::TruncatedPower { order, threshold } => {
            Ok(oracle::integral_truncated_power(mu, order, threshold))
        }
        TestFunctionKind::Exponential { .. } => Err(SandwichError::UnsupportedOracleKind),
    }
}
