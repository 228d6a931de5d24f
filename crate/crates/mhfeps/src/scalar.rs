//! Exact scalar arithmetic: arbitrary-precision rationals, linear forms in the
//! expansion parameter, and truncated Laurent series over the rationals.
//!
//! Every value here is immutable after construction and freely shareable
//! across threads. There is no global truncation setting: series carry their
//! own (exclusive) truncation order and all arithmetic propagates the
//! pessimistic minimum of the operands' reaches.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar used everywhere in the symbolic layer.
pub type Rational = BigRational;

/// Truncation sentinel for series that are exact polynomials.
pub const EXACT: i64 = i64::MAX;

/// Shorthand rational constructor from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"` (the wire format for rationals).
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| ScalarError::BadRational(s.to_string()))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| ScalarError::BadRational(s.to_string()))?;
    if d.is_zero() {
        return Err(ScalarError::BadRational(s.to_string()));
    }
    Ok(Rational::new(n, d))
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn rational_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a decimal literal (optionally with exponent, e.g. `-1.5e-7`) into an
/// exact rational. Used for reference values in fixtures.
pub fn parse_decimal(s: &str) -> Result<Rational, ScalarError> {
    let s = s.trim();
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let e: i64 = e
                .parse()
                .map_err(|_| ScalarError::BadRational(s.to_string()))?;
            (m, e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits
        .parse()
        .map_err(|_| ScalarError::BadRational(s.to_string()))?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Rational::from(n * num::pow::pow(ten, shift as usize))
    } else {
        Rational::new(n, num::pow::pow(ten, (-shift) as usize))
    })
}

/// Rounds a rational to `digits` places after the decimal point and renders it
/// in plain decimal notation. Exact-mode results are reported this way.
pub fn decimal_string(r: &Rational, digits: usize) -> String {
    let scale = num::pow::pow(BigInt::from(10), digits);
    let scaled = r * Rational::from(scale.clone());
    // round half away from zero
    let half = rat(1, 2);
    let rounded = if scaled.is_negative() {
        (scaled - half).ceil()
    } else {
        (scaled + half).floor()
    };
    let v = rounded.numer().clone();
    let neg = v.is_negative();
    let abs = v.abs().to_string();
    let abs = if abs.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - abs.len()), abs)
    } else {
        abs
    };
    let (int, frac) = abs.split_at(abs.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("cannot invert an identically zero series")]
    IdenticallyZero,
    #[error("malformed rational literal `{0}`")]
    BadRational(String),
    #[error("series has a pole at the expansion point (min order {0})")]
    PoleAtOrigin(i64),
    #[error("inverse of a non-monomial series needs a finite truncation target")]
    UnboundedInverse,
}

// ---------------------------------------------------------------------------
// EpsLinear
// ---------------------------------------------------------------------------

/// A parameter of the form `b0 + b1·eps` with exact rational coefficients.
/// These are the atoms of all Pochhammer parameters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EpsLinear {
    pub b0: Rational,
    pub b1: Rational,
}

impl EpsLinear {
    pub fn new(b0: Rational, b1: Rational) -> Self {
        EpsLinear { b0, b1 }
    }

    pub fn constant(b0: Rational) -> Self {
        EpsLinear {
            b0,
            b1: Rational::zero(),
        }
    }

    /// The bare expansion parameter `eps`.
    pub fn eps() -> Self {
        EpsLinear {
            b0: Rational::zero(),
            b1: Rational::one(),
        }
    }

    pub fn from_ints(b0: i64, b1: i64) -> Self {
        EpsLinear {
            b0: rat(b0, 1),
            b1: rat(b1, 1),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.b1.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.b0.is_zero() && self.b1.is_zero()
    }

    /// True when the value at `eps = 0` is an integer `<= 0`; such lower
    /// parameters flag a possibly-Laurent expansion.
    pub fn is_singular_at_origin(&self) -> bool {
        self.b0.is_integer() && !self.b0.is_positive()
    }

    /// Shift by an integer constant.
    pub fn shifted(&self, c: i64) -> Self {
        EpsLinear {
            b0: &self.b0 + rat(c, 1),
            b1: self.b1.clone(),
        }
    }

    /// Value at a concrete rational `eps`.
    pub fn at(&self, eps: &Rational) -> Rational {
        &self.b0 + &self.b1 * eps
    }

    pub fn as_series(&self) -> EpsSeries {
        EpsSeries::new(0, vec![self.b0.clone(), self.b1.clone()], EXACT)
    }
}

impl fmt::Display for EpsLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b1.is_zero() {
            return write!(f, "{}", rational_string(&self.b0));
        }
        if self.b0.is_zero() {
            if self.b1.is_one() {
                return write!(f, "eps");
            }
            return write!(f, "{}*eps", rational_string(&self.b1));
        }
        if self.b1.is_one() {
            write!(f, "{} + eps", rational_string(&self.b0))
        } else {
            write!(
                f,
                "{} + {}*eps",
                rational_string(&self.b0),
                rational_string(&self.b1)
            )
        }
    }
}

// ---------------------------------------------------------------------------
// EpsSeries
// ---------------------------------------------------------------------------

/// A truncated Laurent series in `eps` over the rationals, dense over a
/// contiguous order window.
///
/// `coeffs[i]` holds the coefficient of `eps^(min_order + i)`. Orders at and
/// beyond `truncation` are unknown; `truncation == EXACT` marks an exact
/// polynomial. The leading stored coefficient is nonzero unless the series is
/// identically zero (empty coefficient list).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EpsSeries {
    min_order: i64,
    coeffs: Vec<Rational>,
    truncation: i64,
}

fn sat_add(a: i64, b: i64) -> i64 {
    a.saturating_add(b)
}

/// Truncation of a product contribution: an exact operand never limits.
fn shift_trunc(t: i64, k: i64) -> i64 {
    if t == EXACT {
        EXACT
    } else {
        sat_add(t, k)
    }
}

impl EpsSeries {
    /// Builds a series, normalizing: leading/trailing zeros trimmed and any
    /// coefficient at or beyond the truncation dropped.
    pub fn new(min_order: i64, coeffs: Vec<Rational>, truncation: i64) -> Self {
        let mut s = EpsSeries {
            min_order,
            coeffs,
            truncation,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        // drop coefficients past the truncation
        if self.truncation != EXACT {
            let keep = (self.truncation - self.min_order).max(0) as usize;
            self.coeffs.truncate(keep.min(self.coeffs.len()));
        }
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_order += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min_order = 0;
        }
    }

    pub fn zero(truncation: i64) -> Self {
        EpsSeries {
            min_order: 0,
            coeffs: vec![],
            truncation,
        }
    }

    pub fn one() -> Self {
        EpsSeries::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        EpsSeries::new(0, vec![c], EXACT)
    }

    /// `c · eps^k` as an exact monomial.
    pub fn monomial(c: Rational, k: i64) -> Self {
        EpsSeries::new(k, vec![c], EXACT)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_order(&self) -> i64 {
        self.min_order
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    /// True when the series is a plain constant (no eps dependence stored).
    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty() || (self.min_order == 0 && self.coeffs.len() == 1)
    }

    /// Coefficient of `eps^k`; zero for orders inside the known window but not
    /// stored. Asking beyond the truncation is a logic error upstream, so it
    /// is only debug-asserted.
    pub fn coeff_at(&self, k: i64) -> Rational {
        debug_assert!(self.truncation == EXACT || k < self.truncation);
        if k < self.min_order {
            return Rational::zero();
        }
        let idx = (k - self.min_order) as usize;
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Iterates `(order, coefficient)` over stored nonzero coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        let m = self.min_order;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (m + i as i64, c))
    }

    pub fn add(&self, other: &EpsSeries) -> EpsSeries {
        let truncation = self.truncation.min(other.truncation);
        if self.is_zero() {
            return EpsSeries::new(other.min_order, other.coeffs.clone(), truncation);
        }
        if other.is_zero() {
            return EpsSeries::new(self.min_order, self.coeffs.clone(), truncation);
        }
        let min = self.min_order.min(other.min_order);
        let max = (self.min_order + self.coeffs.len() as i64)
            .max(other.min_order + other.coeffs.len() as i64);
        let mut coeffs = vec![Rational::zero(); (max - min) as usize];
        for (k, c) in self.iter() {
            coeffs[(k - min) as usize] += c;
        }
        for (k, c) in other.iter() {
            coeffs[(k - min) as usize] += c;
        }
        EpsSeries::new(min, coeffs, truncation)
    }

    pub fn sub(&self, other: &EpsSeries) -> EpsSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> EpsSeries {
        EpsSeries {
            min_order: self.min_order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            truncation: self.truncation,
        }
    }

    pub fn mul(&self, other: &EpsSeries) -> EpsSeries {
        if self.is_zero() || other.is_zero() {
            let t = if self.is_zero() {
                shift_trunc(self.truncation, other.min_order)
            } else {
                shift_trunc(other.truncation, self.min_order)
            };
            return EpsSeries::zero(t);
        }
        let truncation = shift_trunc(self.truncation, other.min_order)
            .min(shift_trunc(other.truncation, self.min_order));
        let min = self.min_order + other.min_order;
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        EpsSeries::new(min, coeffs, truncation)
    }

    pub fn scale(&self, c: &Rational) -> EpsSeries {
        if c.is_zero() {
            return EpsSeries::zero(self.truncation);
        }
        EpsSeries {
            min_order: self.min_order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            truncation: self.truncation,
        }
    }

    /// Multiplies by `eps^k`.
    pub fn shifted(&self, k: i64) -> EpsSeries {
        if self.is_zero() {
            return EpsSeries::zero(shift_trunc(self.truncation, k));
        }
        EpsSeries {
            min_order: self.min_order + k,
            coeffs: self.coeffs.clone(),
            truncation: shift_trunc(self.truncation, k),
        }
    }

    pub fn truncated(&self, t: i64) -> EpsSeries {
        EpsSeries::new(self.min_order, self.coeffs.clone(), self.truncation.min(t))
    }

    /// Multiplicative inverse as a Laurent series, valid through order
    /// `target - 1`. The result's leading order is the negated leading order
    /// of `self`. A single stored coefficient inverts exactly.
    pub fn recip(&self, target: i64) -> Result<EpsSeries, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::IdenticallyZero);
        }
        let m = self.min_order;
        if self.coeffs.len() == 1 && self.truncation == EXACT {
            return Ok(EpsSeries::monomial(Rational::one() / &self.coeffs[0], -m));
        }
        if target == EXACT {
            return Err(ScalarError::UnboundedInverse);
        }
        let truncation = if self.truncation == EXACT {
            target
        } else {
            target.min(self.truncation - 2 * m)
        };
        let len = ((truncation - (-m)).max(0) as usize).max(1);
        let c0 = &self.coeffs[0];
        let inv0 = Rational::one() / c0;
        let mut out = Vec::with_capacity(len);
        out.push(inv0.clone());
        for n in 1..len {
            // coefficient n of the inverse of the shifted (regular) series
            let mut acc = Rational::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                acc += &self.coeffs[k] * &out[n - k];
            }
            out.push(-(acc * &inv0));
        }
        Ok(EpsSeries::new(-m, out, truncation))
    }

    /// Derivative with respect to eps.
    pub fn derivative(&self) -> EpsSeries {
        let truncation = if self.truncation == EXACT {
            EXACT
        } else {
            self.truncation - 1
        };
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * rat(self.min_order + i as i64, 1))
            .collect();
        EpsSeries::new(self.min_order - 1, coeffs, truncation)
    }

    /// Exact evaluation at a nonzero rational eps (finite window sum).
    pub fn eval_at(&self, eps: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (k, c) in self.iter() {
            let p = if k >= 0 {
                num::pow::pow(eps.clone(), k as usize)
            } else {
                num::pow::pow(Rational::one() / eps, (-k) as usize)
            };
            acc += c * p;
        }
        acc
    }

    /// The value at eps = 0. Errors when a genuine pole is present.
    pub fn at_origin(&self) -> Result<Rational, ScalarError> {
        if self.min_order < 0 && !self.is_zero() {
            return Err(ScalarError::PoleAtOrigin(self.min_order));
        }
        Ok(self.coeff_at(0))
    }

}

/// Lossy conversion used at numeric boundaries.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back through a quotient of truncated parts for huge operands
        let digits = 30usize;
        let scaled = decimal_string(r, digits);
        scaled.parse().unwrap_or(f64::NAN)
    })
}

impl fmt::Display for EpsSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (k, c) in self.iter() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                match k {
                    0 => write!(f, "{}", rational_string(c))?,
                    1 => write!(f, "{}*eps", rational_string(c))?,
                    _ => write!(f, "{}*eps^{}", rational_string(c), k)?,
                }
            }
        }
        if self.truncation != EXACT {
            write!(f, " + O(eps^{})", self.truncation)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(min: i64, cs: &[(i64, i64)], t: i64) -> EpsSeries {
        EpsSeries::new(min, cs.iter().map(|&(n, d)| rat(n, d)).collect(), t)
    }

    #[test]
    fn invert_monomial() {
        let eps = EpsSeries::monomial(Rational::one(), 1);
        let inv = eps.recip(4).unwrap();
        assert_eq!(inv, EpsSeries::monomial(Rational::one(), -1));
    }

    #[test]
    fn invert_geometric() {
        // 1/(1+eps) = 1 - eps + eps^2 - eps^3 ...
        let s = series(0, &[(1, 1), (1, 1)], EXACT);
        let inv = s.recip(4).unwrap();
        assert_eq!(
            inv,
            series(0, &[(1, 1), (-1, 1), (1, 1), (-1, 1)], 4)
        );
    }

    #[test]
    fn invert_shifted_pole() {
        // 1/((eps-1)*eps^2) = -eps^-2 - eps^-1 - 1 - eps - ...
        // expected values frozen from the multiply-back oracle below
        let s = series(2, &[(-1, 1), (1, 1)], EXACT);
        let inv = s.recip(2).unwrap();
        assert_eq!(inv.min_order(), -2);
        for k in -2..2 {
            assert_eq!(inv.coeff_at(k), rat(-1, 1), "order {k}");
        }
        let product = s.mul(&inv);
        assert_eq!(product.coeff_at(0), rat(1, 1));
        for k in 1..2 {
            assert_eq!(product.coeff_at(k), rat(0, 1));
        }
    }

    #[test]
    fn cauchy_products() {
        let a = series(-1, &[(1, 1)], EXACT); // 1/eps
        let b = series(1, &[(1, 1)], EXACT); // eps
        assert_eq!(a.mul(&b), EpsSeries::one());
        let c = series(0, &[(1, 1), (1, 1)], EXACT);
        let d = series(0, &[(1, 1), (-1, 1)], EXACT);
        assert_eq!(c.mul(&d), series(0, &[(1, 1), (0, 1), (-1, 1)], EXACT));
    }

    #[test]
    fn derivative_and_eval() {
        let s = series(-1, &[(2, 1), (0, 1), (3, 1)], 4); // 2/eps + 3*eps
        let d = s.derivative();
        assert_eq!(d, series(-2, &[(-2, 1), (0, 1), (3, 1)], 3));
        let v = s.eval_at(&rat(1, 2));
        assert_eq!(v, rat(4, 1) + rat(3, 2));
    }

    #[test]
    fn decimal_roundtrip() {
        let r = parse_decimal("-1.795147633233522925e-5").unwrap();
        assert_eq!(decimal_string(&r, 24), "-0.000017951476332335229250");
        assert_eq!(parse_decimal("13.25").unwrap(), rat(53, 4));
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(rational_string(&rat(-3, 2)), "-3/2");
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-20i64..20, 1i64..12).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_series() -> impl Strategy<Value = EpsSeries> {
        (
            -3i64..3,
            proptest::collection::vec(arb_rational(), 1..5),
        )
            .prop_map(|(m, cs)| EpsSeries::new(m, cs, m + 8))
    }

    proptest! {
        #[test]
        fn invert_is_right_inverse(s in arb_series()) {
            prop_assume!(!s.is_zero());
            let target = -s.min_order() + 4;
            let inv = s.recip(target).unwrap();
            let prod = s.mul(&inv);
            let t = prod.truncation();
            prop_assert!(t > 0, "product window should include order 0");
            prop_assert_eq!(prod.coeff_at(0), rat(1, 1));
            for k in prod.min_order()..t {
                if k != 0 {
                    prop_assert_eq!(prod.coeff_at(k), rat(0, 1));
                }
            }
        }

        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            let left = a.mul(&b).mul(&c);
            let right = a.mul(&b.mul(&c));
            let t = left.truncation().min(right.truncation());
            prop_assert_eq!(left.truncated(t), right.truncated(t));
            let dl = a.mul(&b.add(&c));
            let dr = a.mul(&b).add(&a.mul(&c));
            let t = dl.truncation().min(dr.truncation());
            prop_assert_eq!(dl.truncated(t), dr.truncated(t));
        }

        #[test]
        fn add_then_subtract(a in arb_series(), b in arb_series()) {
            let back = a.add(&b).sub(&a);
            let t = back.truncation();
            prop_assert_eq!(back, b.truncated(t));
        }

        #[test]
        fn rational_addition_is_exact(an in -50i64..50, ad in 1i64..30, bn in -50i64..50, bd in 1i64..30) {
            // independent big-integer cross-multiplication
            let a = rat(an, ad);
            let b = rat(bn, bd);
            let s = &a + &b;
            let num = BigInt::from(an) * BigInt::from(bd) + BigInt::from(bn) * BigInt::from(ad);
            let den = BigInt::from(ad) * BigInt::from(bd);
            prop_assert_eq!(s, Rational::new(num, den));
        }
    }
}
