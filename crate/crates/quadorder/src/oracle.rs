//! Exact-rational verification oracle.
//!
//! Double-precision inputs (atom positions, weights, density coefficients)
//! convert to rationals exactly, so moments and polynomial integrals of a
//! measure can be computed with no rounding at all. Irrational node
//! positions of the small closed-form rules are carried as 50-digit
//! fixed-point rationals. This path is independent of the f64 arithmetic in
//! the main modules and exists to validate it.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::measure::Measure;

/// Decimal digits carried by fixed-point square roots.
pub const SQRT_DIGITS: u32 = 50;

/// Exact conversion; panics on non-finite input.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite f64")
}

pub fn rational_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Fixed-point square root: floor(sqrt(x) · 10^digits) / 10^digits.
pub fn sqrt_fixed(x: &BigRational, digits: u32) -> BigRational {
    assert!(!x.is_negative(), "sqrt of negative rational");
    let scale = BigInt::from(10u32).pow(digits);
    // sqrt(p/q) = sqrt(p·q)/q; scale before the integer square root.
    let scaled = x.numer() * x.denom() * &scale * &scale;
    BigRational::new(scaled.sqrt(), x.denom() * scale)
}

/// Conversion that stays accurate for very large numerators/denominators.
pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    // Align so the integer quotient keeps ~80 significant bits.
    let shift: i64 = 80 - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let v = q.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-shift as i32);
    if negative {
        -v
    } else {
        v
    }
}

fn pow(base: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= base;
    }
    acc
}

/// ∫ x^k dμ(x) in exact rational arithmetic.
pub fn moment(mu: &Measure, k: usize) -> BigRational {
    integral_poly_shifted(mu, &[1.0], k)
}

/// ∫ p(x)·x^shift dμ(x) exactly, with p given by f64 coefficients.
fn integral_poly_shifted(mu: &Measure, coeffs: &[f64], shift: usize) -> BigRational {
    let mut total = BigRational::zero();
    for atom in mu.atoms() {
        let x = rational(atom.position);
        let mut poly_val = BigRational::zero();
        for (j, &c) in coeffs.iter().enumerate() {
            poly_val += rational(c) * pow(&x, j + shift);
        }
        total += rational(atom.weight) * poly_val;
    }
    for piece in mu.pieces() {
        let lo = rational(piece.support.a());
        let hi = rational(piece.support.b());
        for (j, &c) in piece.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (i, &pc) in coeffs.iter().enumerate() {
                if pc == 0.0 {
                    continue;
                }
                let deg = j + i + shift;
                let term = (pow(&hi, deg + 1) - pow(&lo, deg + 1))
                    / rational_int((deg + 1) as i64);
                total += rational(c) * rational(pc) * term;
            }
        }
    }
    total
}

/// ∫ p(x) dμ(x) for a polynomial given by ascending f64 coefficients.
pub fn integral_poly(mu: &Measure, coeffs: &[f64]) -> BigRational {
    integral_poly_shifted(mu, coeffs, 0)
}

/// ∫ max(x - t, 0)^order dμ(x), exactly.
pub fn integral_truncated_power(mu: &Measure, order: u32, threshold: f64) -> BigRational {
    let t = rational(threshold);
    let mut total = BigRational::zero();
    for atom in mu.atoms() {
        let x = rational(atom.position);
        if x > t {
            total += rational(atom.weight) * pow(&(x - t.clone()), order as usize);
        }
    }
    // Binomial expansion of (x - t)^order, integrated over [max(a,t), b].
    let mut binom: Vec<BigRational> = vec![BigRational::one()];
    for _ in 0..order {
        let mut next = vec![BigRational::zero(); binom.len() + 1];
        for (j, c) in binom.iter().enumerate() {
            next[j + 1] += c.clone();
            next[j] -= c * t.clone();
        }
        binom = next;
    }
    for piece in mu.pieces() {
        if piece.support.b() <= threshold {
            continue;
        }
        let lo = rational(piece.support.a().max(threshold));
        let hi = rational(piece.support.b());
        for (j, &c) in piece.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (i, bc) in binom.iter().enumerate() {
                let deg = i + j;
                let term = (pow(&hi, deg + 1) - pow(&lo, deg + 1))
                    / rational_int((deg + 1) as i64);
                total += rational(c) * bc * term;
            }
        }
    }
    total
}

/// Σ w_i x_i^k over high-precision node/weight pairs.
pub fn monomial_sum(nodes: &[BigRational], weights: &[BigRational], k: usize) -> BigRational {
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * pow(x, k))
        .sum()
}

/// 2-point Gauss rule on [0,1] with 50-digit nodes: ((3∓√3)/6, 1/2 each).
pub fn gauss2_unit() -> (Vec<BigRational>, Vec<BigRational>) {
    let s3 = sqrt_fixed(&rational_int(3), SQRT_DIGITS);
    let six = rational_int(6);
    let nodes = vec![
        (rational_int(3) - s3.clone()) / six.clone(),
        (rational_int(3) + s3) / six,
    ];
    (nodes, vec![ratio(1, 2), ratio(1, 2)])
}

/// 3-point Lobatto rule on [0,1]: exact rational nodes and weights.
pub fn lobatto3_unit() -> (Vec<BigRational>, Vec<BigRational>) {
    (
        vec![rational_int(0), ratio(1, 2), rational_int(1)],
        vec![ratio(1, 6), ratio(2, 3), ratio(1, 6)],
    )
}

/// 2-point left Radau rule on [0,1]: exact rational nodes and weights.
pub fn radau2_left_unit() -> (Vec<BigRational>, Vec<BigRational>) {
    (
        vec![rational_int(0), ratio(2, 3)],
        vec![ratio(1, 4), ratio(3, 4)],
    )
}

/// 2-point right Radau rule on [0,1]: reflection of the left rule.
pub fn radau2_right_unit() -> (Vec<BigRational>, Vec<BigRational>) {
    (
        vec![ratio(1, 3), rational_int(1)],
        vec![ratio(3, 4), ratio(1, 4)],
    )
}
