//! Quadrature rules, interval measures, and convex stochastic orders.
//!
//! The crate builds classical quadrature rules (Gauss, Lobatto, left/right
//! Radau, the equal-weight 3-point Chebyshev rule), models probability
//! measures on a closed interval as finite mixtures of point atoms and
//! piecewise-polynomial densities, and certifies or refutes n-convex
//! ordering between such measures.
//!
//! The certification machinery combines two ingredients:
//!
//! * moment matching — the first `s` moments of the two measures must agree;
//! * crossing-point analysis — the difference of the two cumulative
//!   distribution functions must change sign exactly `s` times, with the
//!   initial sign fixed by the parity of `s`.
//!
//! Together these yield sandwich bounds of the form
//! `G(f) <= ∫ f dμ <= L(f)` valid for every n-convex `f`, with Gauss/Lobatto
//! rules for odd `n` and the two Radau rules for even `n`.
//!
//! A note on the sign convention: the crossing criterion is implemented so
//! that the case `s = 1` coincides with the classical one-crossing lemma for
//! convex ordering (equal means, distribution functions crossing once, the
//! lower measure's CDF below before the crossing). All worked inequalities
//! reproduced in the test suite are consistent with this convention.

pub mod convexity;
pub mod measure;
pub mod oracle;
pub mod ordering;
pub mod rules;
pub mod sandwich;

mod eigen;
mod poly;

pub use convexity::{divided_difference, is_n_convex_on_grid, sample_test_functions, TestFunction};
pub use measure::{Atom, DensityPiece, Interval, Measure, MeasureError};
pub use ordering::{
    certify_s_convex_order, crossing_scan, incomparability_check, shared_moment_degree,
    ComparabilityVerdict, CrossingReport, Direction, OrderCertificate, OrderError, Sign, Verdict,
};
pub use rules::{Family, QuadratureRule, RuleError};
pub use sandwich::{
    certify_sandwich, check_moment_hypothesis, oracle_integral, random_moment_matched_measure,
    sandwich_rules, MomentCheck, SandwichError, SandwichResult, SpotCheck,
};
