//! Classical quadrature rules on an arbitrary interval.
//!
//! Nodes and weights come from the Golub-Welsch construction: the symmetric
//! tridiagonal Jacobi matrix of the (monic) Legendre recurrence is
//! diagonalized, eigenvalues are the nodes and squared first eigenvector
//! components are the normalized weights. Radau and Lobatto rules pin one or
//! both endpoints by the standard last-row / corner modifications of the
//! Jacobi matrix.
//!
//! All rules here are normalized: weights sum to 1, so applying a rule to
//! `f` approximates the *average* of `f` over the interval, i.e.
//! `1/(b-a) ∫ f`, and the associated discrete measure is a probability
//! measure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::tridiagonal_eigen;
use crate::measure::Interval;

/// Endpoint snap tolerance, relative to interval length.
const SNAP_TOL: f64 = 1e-14;

/// Largest supported node count; exactness checks in double precision
/// degrade past this.
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("point count {0} out of range {1}..={2}")]
    PointCountOutOfRange(usize, usize, usize),
    #[error("eigenvalue iteration failed: {0}")]
    EigenFailure(&'static str),
    #[error("rule has a nonpositive weight")]
    NonpositiveWeight,
    #[error("rule nodes are not strictly increasing")]
    NodesNotIncreasing,
    #[error(transparent)]
    Measure(#[from] crate::measure::MeasureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gauss,
    Lobatto,
    RadauLeft,
    RadauRight,
    Chebyshev3,
    Custom,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Gauss => "gauss",
            Family::Lobatto => "lobatto",
            Family::RadauLeft => "radau-left",
            Family::RadauRight => "radau-right",
            Family::Chebyshev3 => "chebyshev3",
            Family::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// A normalized quadrature rule: strictly increasing nodes in `[a,b]`,
/// positive weights summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RuleRepr", into = "RuleRepr")]
pub struct QuadratureRule {
    family: Family,
    interval: Interval,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exactness_degree: usize,
}

/// Wire format: shares the measure's atom schema plus family/exactness.
#[derive(Serialize, Deserialize, Clone)]
struct RuleRepr {
    family: Family,
    interval: Interval,
    atoms: Vec<AtomRepr>,
    exactness_degree: usize,
}

#[derive(Serialize, Deserialize, Clone)]
struct AtomRepr {
    x: f64,
    w: f64,
}

impl From<QuadratureRule> for RuleRepr {
    fn from(r: QuadratureRule) -> Self {
        RuleRepr {
            family: r.family,
            interval: r.interval,
            atoms: r
                .nodes
                .iter()
                .zip(&r.weights)
                .map(|(&x, &w)| AtomRepr { x, w })
                .collect(),
            exactness_degree: r.exactness_degree,
        }
    }
}

impl TryFrom<RuleRepr> for QuadratureRule {
    type Error = RuleError;

    fn try_from(repr: RuleRepr) -> Result<Self, RuleError> {
        let nodes: Vec<f64> = repr.atoms.iter().map(|a| a.x).collect();
        let weights: Vec<f64> = repr.atoms.iter().map(|a| a.w).collect();
        QuadratureRule::custom_with_family(
            repr.family,
            repr.interval,
            nodes,
            weights,
            repr.exactness_degree,
        )
    }
}

impl QuadratureRule {
    fn custom_with_family(
        family: Family,
        interval: Interval,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        exactness_degree: usize,
    ) -> Result<Self, RuleError> {
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(RuleError::NodesNotIncreasing);
        }
        if weights.iter().any(|&w| w <= 0.0) || weights.len() != nodes.len() {
            return Err(RuleError::NonpositiveWeight);
        }
        Ok(QuadratureRule {
            family,
            interval,
            nodes,
            weights,
            exactness_degree,
        })
    }

    /// A user-supplied rule; exactness degree is measured, not assumed.
    pub fn custom(
        interval: Interval,
        nodes: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self, RuleError> {
        let mut rule =
            QuadratureRule::custom_with_family(Family::Custom, interval, nodes, weights, 0)?;
        rule.exactness_degree = verify_exactness(&rule);
        Ok(rule)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Monic Legendre recurrence coefficient β_k = k² / (4k² - 1).
fn beta(k: usize) -> f64 {
    let k = k as f64;
    k * k / (4.0 * k * k - 1.0)
}

/// Evaluate monic Legendre polynomials π_{m-1} and π_{m-2} at `x`.
fn monic_legendre_pair(m: usize, x: f64) -> (f64, f64) {
    // (π_{m-1}(x), π_{m-2}(x)); π_{-1} = 0, π_0 = 1.
    let mut prev = 0.0; // π_{-1}
    let mut cur = 1.0; // π_0
    for k in 0..m.saturating_sub(1) {
        let next = x * cur - beta(k) * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Diagonalize a (possibly modified) Jacobi matrix and map the reference
/// rule on [-1,1] to the target interval.
fn rule_from_jacobi(
    family: Family,
    interval: Interval,
    diag: &[f64],
    sub: &[f64],
    exactness_degree: usize,
) -> Result<QuadratureRule, RuleError> {
    let (ref_nodes, z) = tridiagonal_eigen(diag, sub).map_err(RuleError::EigenFailure)?;
    let mut weights: Vec<f64> = z.iter().map(|&zi| zi * zi).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }

    let (a, b) = (interval.a(), interval.b());
    let len = b - a;
    let mut nodes: Vec<f64> = ref_nodes
        .iter()
        .map(|&t| a + len * (t + 1.0) / 2.0)
        .collect();

    // Prescribed endpoints must be hit exactly.
    let snaps_left = matches!(family, Family::Lobatto | Family::RadauLeft);
    let snaps_right = matches!(family, Family::Lobatto | Family::RadauRight);
    for node in &mut nodes {
        if snaps_left && (*node - a).abs() <= SNAP_TOL * len {
            *node = a;
        }
        if snaps_right && (*node - b).abs() <= SNAP_TOL * len {
            *node = b;
        }
    }

    QuadratureRule::custom_with_family(family, interval, nodes, weights, exactness_degree)
}

/// m-point Gauss rule: no endpoint nodes, exact to degree 2m-1.
pub fn gauss(m: usize, interval: Interval) -> Result<QuadratureRule, RuleError> {
    if !(1..=MAX_POINTS).contains(&m) {
        return Err(RuleError::PointCountOutOfRange(m, 1, MAX_POINTS));
    }
    let diag = vec![0.0; m];
    let sub: Vec<f64> = (1..m).map(|k| beta(k).sqrt()).collect();
    rule_from_jacobi(Family::Gauss, interval, &diag, &sub, 2 * m - 1)
}

/// m-point Lobatto rule: both endpoints are nodes, exact to degree 2m-3.
pub fn lobatto(m: usize, interval: Interval) -> Result<QuadratureRule, RuleError> {
    if !(2..=MAX_POINTS).contains(&m) {
        return Err(RuleError::PointCountOutOfRange(m, 2, MAX_POINTS));
    }
    let mut diag = vec![0.0; m];
    let mut sub: Vec<f64> = (1..m).map(|k| beta(k).sqrt()).collect();

    // Corner modification: choose the last diagonal entry and the last
    // subdiagonal so that both ±1 become eigenvalues.
    let (p1_l, p2_l) = monic_legendre_pair(m, -1.0);
    let (p1_r, p2_r) = monic_legendre_pair(m, 1.0);
    // Solve [p1_l p2_l; p1_r p2_r] [alpha; beta] = [-p1_l; p1_r].
    let det = p1_l * p2_r - p1_r * p2_l;
    let alpha = (-p1_l * p2_r - p1_r * p2_l) / det;
    let beta_mod = (p1_l * p1_r + p1_l * p1_r) / det;
    diag[m - 1] = alpha;
    sub[m - 2] = beta_mod.sqrt();
    rule_from_jacobi(Family::Lobatto, interval, &diag, &sub, 2 * m - 3)
}

fn radau(m: usize, interval: Interval, left: bool) -> Result<QuadratureRule, RuleError> {
    if !(1..=MAX_POINTS).contains(&m) {
        return Err(RuleError::PointCountOutOfRange(m, 1, MAX_POINTS));
    }
    let family = if left {
        Family::RadauLeft
    } else {
        Family::RadauRight
    };
    if m == 1 {
        // The single node is forced to the prescribed endpoint.
        let node = if left { interval.a() } else { interval.b() };
        return QuadratureRule::custom_with_family(family, interval, vec![node], vec![1.0], 0);
    }
    let endpoint = if left { -1.0 } else { 1.0 };
    let mut diag = vec![0.0; m];
    let sub: Vec<f64> = (1..m).map(|k| beta(k).sqrt()).collect();
    let (p1, p2) = monic_legendre_pair(m, endpoint);
    diag[m - 1] = endpoint - beta(m - 1) * p2 / p1;
    rule_from_jacobi(family, interval, &diag, &sub, 2 * m - 2)
}

/// m-point left Radau rule: the left endpoint is a node, exact to 2m-2.
pub fn radau_left(m: usize, interval: Interval) -> Result<QuadratureRule, RuleError> {
    radau(m, interval, true)
}

/// m-point right Radau rule: the right endpoint is a node, exact to 2m-2.
pub fn radau_right(m: usize, interval: Interval) -> Result<QuadratureRule, RuleError> {
    radau(m, interval, false)
}

/// Equal-weight 3-point Chebyshev rule: nodes at the midpoint and at
/// midpoint ± (b-a)/(2√2), weights 1/3 each, exact to degree 3.
pub fn chebyshev3(interval: Interval) -> QuadratureRule {
    let mid = interval.midpoint();
    let h = interval.length() / (2.0 * std::f64::consts::SQRT_2);
    QuadratureRule {
        family: Family::Chebyshev3,
        interval,
        nodes: vec![mid - h, mid, mid + h],
        weights: vec![1.0 / 3.0; 3],
        exactness_degree: 3,
    }
}

/// Σ w_i f(x_i).
pub fn apply<F: Fn(f64) -> f64>(rule: &QuadratureRule, f: F) -> f64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * f(x))
        .sum()
}

/// k-th moment of the normalized Lebesgue measure on `[a,b]`:
/// (b^{k+1} - a^{k+1}) / ((k+1)(b-a)).
pub fn uniform_moment(interval: Interval, k: usize) -> f64 {
    let (a, b) = (interval.a(), interval.b());
    (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / ((k as f64 + 1.0) * (b - a))
}

/// Largest degree d (capped at 2·points+2) such that the rule reproduces
/// every uniform monomial moment of degree <= d to relative 1e-10.
pub fn verify_exactness(rule: &QuadratureRule) -> usize {
    let cap = 2 * rule.len() + 2;
    let mut degree = 0;
    for j in 0..=cap {
        let exact = uniform_moment(rule.interval, j);
        let approx = apply(rule, |x| x.powi(j as i32));
        if (approx - exact).abs() > 1e-10 * exact.abs().max(1.0) {
            return degree;
        }
        degree = j;
    }
    degree
}
