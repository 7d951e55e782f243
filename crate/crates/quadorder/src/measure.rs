//! Measures on a closed interval: finite mixtures of point atoms and
//! piecewise-polynomial density pieces.
//!
//! This carrier is closed under mixing and covers everything the ordering
//! machinery needs: quadrature measures (purely atomic), the normalized
//! Lebesgue measure, and convex mixtures of both. Moments and CDF values
//! are computed in closed form; no numerical quadrature is involved.
//!
//! Measures are immutable after construction and canonical: atoms sorted
//! with duplicates merged, density pieces sorted with pairwise disjoint
//! interiors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Poly;
use crate::rules::QuadratureRule;

/// Grid size used for the density nonnegativity check at construction.
const NONNEG_GRID: usize = 512;
/// A density sample this far below zero fails construction.
const NONNEG_TOL: f64 = -1e-12;
/// Mixture weights must sum to 1 within this.
const MIX_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid interval [{0}, {1}]: endpoints must be finite with a < b")]
    InvalidInterval(f64, f64),
    #[error("atom weight {0} is not positive")]
    NonpositiveAtomWeight(f64),
    #[error("atom position {0} outside the measure's interval")]
    AtomOutOfRange(f64),
    #[error("density piece support outside the measure's interval")]
    PieceOutOfRange,
    #[error("density pieces have overlapping interiors")]
    OverlappingPieces,
    #[error("density is negative ({value}) at x = {x}")]
    NegativeDensity { x: f64, value: f64 },
    #[error("mixture components live on different intervals")]
    MismatchedIntervals,
    #[error("mixture weights sum to {0}, expected 1")]
    WeightsNotNormalized(f64),
    #[error("mixture weight {0} is not positive")]
    NonpositiveMixWeight(f64),
    #[error("mixture has no components")]
    EmptyMixture,
}

/// A closed interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, MeasureError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(MeasureError::InvalidInterval(a, b));
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

impl TryFrom<(f64, f64)> for Interval {
    type Error = MeasureError;
    fn try_from((a, b): (f64, f64)) -> Result<Self, MeasureError> {
        Interval::new(a, b)
    }
}

impl From<Interval> for (f64, f64) {
    fn from(i: Interval) -> (f64, f64) {
        (i.a, i.b)
    }
}

/// A point mass: positive weight at a fixed position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "x")]
    pub position: f64,
    #[serde(rename = "w")]
    pub weight: f64,
}

/// A polynomial density restricted to a subinterval, nonnegative there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    pub support: Interval,
    /// Polynomial coefficients in x, ascending degree.
    pub coeffs: Vec<f64>,
}

impl DensityPiece {
    fn poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    fn mass(&self) -> f64 {
        self.poly().integral(self.support.a, self.support.b)
    }
}

/// A nonnegative measure on `[a, b]`: atoms plus piecewise-polynomial
/// density. Probability measures additionally have total mass 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct Measure {
    interval: Interval,
    atoms: Vec<Atom>,
    pieces: Vec<DensityPiece>,
}

#[derive(Serialize, Deserialize, Clone)]
struct MeasureRepr {
    interval: Interval,
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    pieces: Vec<DensityPiece>,
}

impl From<Measure> for MeasureRepr {
    fn from(m: Measure) -> Self {
        MeasureRepr {
            interval: m.interval,
            atoms: m.atoms,
            pieces: m.pieces,
        }
    }
}

impl TryFrom<MeasureRepr> for Measure {
    type Error = MeasureError;
    fn try_from(r: MeasureRepr) -> Result<Self, MeasureError> {
        Measure::new(r.interval, r.atoms, r.pieces)
    }
}

impl Measure {
    /// Validates, sorts and canonicalizes. Atoms at identical positions are
    /// merged; densities are sampled on a 512-point grid per piece (plus
    /// endpoints) to check nonnegativity.
    pub fn new(
        interval: Interval,
        atoms: Vec<Atom>,
        pieces: Vec<DensityPiece>,
    ) -> Result<Self, MeasureError> {
        for atom in &atoms {
            if atom.weight <= 0.0 {
                return Err(MeasureError::NonpositiveAtomWeight(atom.weight));
            }
            if !interval.contains(atom.position) {
                return Err(MeasureError::AtomOutOfRange(atom.position));
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|x, y| x.position.partial_cmp(&y.position).unwrap());
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if last.position == atom.position => last.weight += atom.weight,
                _ => merged.push(atom),
            }
        }

        let mut pieces = pieces;
        pieces.sort_by(|x, y| x.support.a.partial_cmp(&y.support.a).unwrap());
        for pair in pieces.windows(2) {
            if pair[1].support.a < pair[0].support.b {
                return Err(MeasureError::OverlappingPieces);
            }
        }
        for piece in &pieces {
            if !(interval.contains(piece.support.a) && interval.contains(piece.support.b)) {
                return Err(MeasureError::PieceOutOfRange);
            }
            let p = piece.poly();
            for i in 0..=NONNEG_GRID {
                let t = i as f64 / NONNEG_GRID as f64;
                let x = piece.support.a + t * piece.support.length();
                let v = p.eval(x);
                if v < NONNEG_TOL {
                    return Err(MeasureError::NegativeDensity { x, value: v });
                }
            }
        }

        Ok(Measure {
            interval,
            atoms: merged,
            pieces,
        })
    }

    /// The normalized Lebesgue measure: constant density 1/(b-a).
    pub fn uniform(interval: Interval) -> Measure {
        Measure {
            interval,
            atoms: vec![],
            pieces: vec![DensityPiece {
                support: interval,
                coeffs: vec![1.0 / interval.length()],
            }],
        }
    }

    /// A unit point mass at `position`.
    pub fn dirac(interval: Interval, position: f64) -> Result<Measure, MeasureError> {
        Measure::new(
            interval,
            vec![Atom {
                position,
                weight: 1.0,
            }],
            vec![],
        )
    }

    /// The discrete probability measure sitting at a rule's nodes.
    pub fn from_rule(rule: &QuadratureRule) -> Measure {
        // Rule weights are positive by the rule type's invariant.
        Measure {
            interval: rule.interval(),
            atoms: rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&x, &w)| Atom {
                    position: x,
                    weight: w,
                })
                .collect(),
            pieces: vec![],
        }
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn total_mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let density_mass: f64 = self.pieces.iter().map(|p| p.mass()).sum();
        atom_mass + density_mass
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-12
    }

    /// ∫ x^k dμ(x), each density piece integrated in closed form.
    pub fn moment(&self, k: usize) -> f64 {
        let atom_part: f64 = self
            .atoms
            .iter()
            .map(|a| a.weight * a.position.powi(k as i32))
            .sum();
        let density_part: f64 = self
            .pieces
            .iter()
            .map(|p| {
                p.poly()
                    .shift_up(k)
                    .integral(p.support.a, p.support.b)
            })
            .sum();
        atom_part + density_part
    }

    /// Right-continuous CDF; 0 left of the interval, total mass right of it.
    pub fn cdf_eval(&self, x: f64) -> f64 {
        if x < self.interval.a {
            return 0.0;
        }
        if x >= self.interval.b {
            return self.total_mass();
        }
        let atom_part: f64 = self
            .atoms
            .iter()
            .take_while(|a| a.position <= x)
            .map(|a| a.weight)
            .sum();
        let density_part: f64 = self
            .pieces
            .iter()
            .filter(|p| p.support.a < x)
            .map(|p| p.poly().integral(p.support.a, p.support.b.min(x)))
            .sum();
        atom_part + density_part
    }

    /// Convex mixture. All components must share the interval and the
    /// weights must be positive and sum to 1 (within 1e-12). Overlapping
    /// density pieces are re-split on the union of all boundaries so the
    /// result is canonical.
    pub fn mix(components: &[(f64, Measure)]) -> Result<Measure, MeasureError> {
        let Some((_, first)) = components.first() else {
            return Err(MeasureError::EmptyMixture);
        };
        let interval = first.interval;
        let mut weight_sum = 0.0;
        for (w, m) in components {
            if *w <= 0.0 {
                return Err(MeasureError::NonpositiveMixWeight(*w));
            }
            if m.interval != interval {
                return Err(MeasureError::MismatchedIntervals);
            }
            weight_sum += *w;
        }
        if (weight_sum - 1.0).abs() > MIX_TOL {
            return Err(MeasureError::WeightsNotNormalized(weight_sum));
        }

        let atoms: Vec<Atom> = components
            .iter()
            .flat_map(|(w, m)| {
                m.atoms.iter().map(move |a| Atom {
                    position: a.position,
                    weight: w * a.weight,
                })
            })
            .collect();

        // Re-split densities on the union of all piece boundaries.
        let mut cuts: Vec<f64> = components
            .iter()
            .flat_map(|(_, m)| m.pieces.iter().flat_map(|p| [p.support.a, p.support.b]))
            .collect();
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut pieces = Vec::new();
        for seg in cuts.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let mid = 0.5 * (lo + hi);
            let mut sum = Poly::zero();
            for (w, m) in components {
                for p in &m.pieces {
                    if p.support.a <= mid && mid < p.support.b {
                        sum = sum.add(&p.poly().scale(*w));
                    }
                }
            }
            if sum.max_abs_coeff() > 0.0 {
                pieces.push(DensityPiece {
                    support: Interval::new(lo, hi)?,
                    coeffs: sum.coeffs,
                });
            }
        }

        Measure::new(interval, atoms, pieces)
    }

    /// Density polynomial on the (open) segment containing `x`, if any.
    pub(crate) fn density_poly_at(&self, x: f64) -> Option<Poly> {
        self.pieces
            .iter()
            .find(|p| p.support.a <= x && x < p.support.b)
            .map(|p| p.poly())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn uniform_moments() {
        let u = Measure::uniform(unit());
        assert!((u.total_mass() - 1.0).abs() < 1e-15);
        assert!((u.moment(1) - 0.5).abs() < 1e-15);
        assert!((u.moment(4) - 0.2).abs() < 1e-15);
        let sym = Measure::uniform(Interval::new(-1.0, 1.0).unwrap());
        assert!((sym.moment(2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gauss2_measure_moment4() {
        let g2 = Measure::from_rule(&rules::gauss(2, unit()).unwrap());
        assert!((g2.moment(4) - 7.0 / 36.0).abs() < 1e-14);
        assert!((g2.moment(0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cdf_values() {
        let g2 = Measure::from_rule(&rules::gauss(2, unit()).unwrap());
        assert!((g2.cdf_eval(0.5) - 0.5).abs() < 1e-14);
        let u = Measure::uniform(unit());
        assert!((u.cdf_eval(0.25) - 0.25).abs() < 1e-15);
        let d = Measure::dirac(unit(), 0.5).unwrap();
        assert_eq!(d.cdf_eval(0.4), 0.0);
        assert_eq!(d.cdf_eval(0.5), 1.0);
        assert_eq!(d.cdf_eval(-0.1), 0.0);
        assert_eq!(d.cdf_eval(2.0), 1.0);
    }

    #[test]
    fn dirac_moment_zero() {
        let d = Measure::dirac(unit(), 0.5).unwrap();
        assert_eq!(d.moment(0), 1.0);
    }

    #[test]
    fn atoms_merge_at_identical_positions() {
        let m = Measure::new(
            unit(),
            vec![
                Atom {
                    position: 0.5,
                    weight: 0.25,
                },
                Atom {
                    position: 0.5,
                    weight: 0.75,
                },
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert_eq!(m.atoms()[0].weight, 1.0);
    }

    #[test]
    fn negative_density_rejected() {
        let err = Measure::new(
            unit(),
            vec![],
            vec![DensityPiece {
                support: unit(),
                coeffs: vec![0.5, -1.0], // 0.5 - x < 0 on (0.5, 1]
            }],
        );
        assert!(matches!(err, Err(MeasureError::NegativeDensity { .. })));
    }

    #[test]
    fn mix_identity_and_two_atoms() {
        let u = Measure::uniform(unit());
        let same = Measure::mix(&[(1.0, u.clone())]).unwrap();
        for k in 0..=8 {
            assert!((same.moment(k) - u.moment(k)).abs() < 1e-14);
        }

        let d0 = Measure::dirac(unit(), 0.0).unwrap();
        let d1 = Measure::dirac(unit(), 1.0).unwrap();
        let m = Measure::mix(&[(0.5, d0), (0.5, d1)]).unwrap();
        assert!((m.moment(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mix_matches_uniform_moments_to_degree_3() {
        let g2 = Measure::from_rule(&rules::gauss(2, unit()).unwrap());
        let u = Measure::uniform(unit());
        let m = Measure::mix(&[(0.5, g2), (0.5, u)]).unwrap();
        for k in 0..=3 {
            assert!((m.moment(k) - 1.0 / (k as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn mix_errors() {
        let u = Measure::uniform(unit());
        let other = Measure::uniform(Interval::new(0.0, 2.0).unwrap());
        assert!(matches!(
            Measure::mix(&[(0.5, u.clone()), (0.5, other)]),
            Err(MeasureError::MismatchedIntervals)
        ));
        assert!(matches!(
            Measure::mix(&[(0.7, u.clone()), (0.7, u.clone())]),
            Err(MeasureError::WeightsNotNormalized(_))
        ));
        assert!(Measure::mix(&[]).is_err());
    }

    #[test]
    fn json_roundtrip_bit_exact() {
        let g2 = Measure::from_rule(&rules::gauss(2, unit()).unwrap());
        let m = Measure::mix(&[(0.5, g2), (0.5, Measure::uniform(unit()))]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: Measure = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
        assert_eq!(s, serde_json::to_string(&back).unwrap());
    }
}
