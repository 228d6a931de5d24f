//! Exact linear algebra over transcendental constants.
//!
//! Prefactor expansions produce coefficients like `-2*gamma - ln 2 + ...`.
//! Representing them as polynomials over formal constant symbols with
//! rational coefficients lets structural cancellations (the vanishing pole
//! coefficients of a finite combination) happen exactly, with numbers
//! substituted only at the very end. The symbols are treated as algebraically
//! independent; no relations between them are assumed or used.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::numeval::consts;
use crate::numeval::EvalError;
use crate::scalar::{rat, rational_string, rational_to_f64, Rational};

/// A formal transcendental constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstSym {
    /// Euler-Mascheroni constant.
    EulerGamma,
    /// `sqrt(pi)` (from half-integer gamma values).
    SqrtPi,
    /// `ln(pi)`.
    LnPi,
    /// `ln(p)` for a prime `p`; logs of rationals decompose over these.
    LnPrime(u64),
    /// `zeta(k)`, `k >= 2`.
    Zeta(u32),
}

impl ConstSym {
    pub fn to_f64(&self) -> f64 {
        match self {
            ConstSym::EulerGamma => consts::EULER_GAMMA,
            ConstSym::SqrtPi => std::f64::consts::PI.sqrt(),
            ConstSym::LnPi => std::f64::consts::PI.ln(),
            ConstSym::LnPrime(p) => (*p as f64).ln(),
            ConstSym::Zeta(k) => consts::zeta(*k),
        }
    }
}

impl fmt::Display for ConstSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstSym::EulerGamma => write!(f, "gamma_E"),
            ConstSym::SqrtPi => write!(f, "sqrt(pi)"),
            ConstSym::LnPi => write!(f, "ln(pi)"),
            ConstSym::LnPrime(p) => write!(f, "ln({p})"),
            ConstSym::Zeta(k) => write!(f, "zeta({k})"),
        }
    }
}

/// A monomial in constant symbols; exponents may be negative (only `SqrtPi`
/// uses that, for `pi^{-1/2}` power factors).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct ConstMono(pub BTreeMap<ConstSym, i32>);

impl ConstMono {
    fn mul(&self, other: &ConstMono) -> ConstMono {
        let mut out = self.0.clone();
        for (s, e) in &other.0 {
            let v = out.entry(s.clone()).or_insert(0);
            *v += e;
            if *v == 0 {
                out.remove(s);
            }
        }
        ConstMono(out)
    }

    fn inverse(&self) -> ConstMono {
        ConstMono(self.0.iter().map(|(s, e)| (s.clone(), -e)).collect())
    }

    fn to_f64(&self) -> f64 {
        self.0
            .iter()
            .map(|(s, e)| s.to_f64().powi(*e))
            .product()
    }
}

/// A polynomial in constant symbols with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstPoly(pub BTreeMap<ConstMono, Rational>);

impl ConstPoly {
    pub fn zero() -> Self {
        ConstPoly(BTreeMap::new())
    }

    pub fn one() -> Self {
        ConstPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(ConstMono::default(), c);
        }
        ConstPoly(m)
    }

    pub fn symbol(s: ConstSym) -> Self {
        let mut mono = BTreeMap::new();
        mono.insert(s, 1);
        let mut m = BTreeMap::new();
        m.insert(ConstMono(mono), Rational::one());
        ConstPoly(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The purely rational part (coefficient of the empty monomial).
    pub fn rational_part(&self) -> Rational {
        self.0
            .get(&ConstMono::default())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// True when no constant symbol appears.
    pub fn is_rational(&self) -> bool {
        self.0.keys().all(|m| m.0.is_empty())
    }

    pub fn add(&self, other: &ConstPoly) -> ConstPoly {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            let v = out.entry(m.clone()).or_insert_with(Rational::zero);
            *v += c;
            if v.is_zero() {
                out.remove(m);
            }
        }
        ConstPoly(out)
    }

    pub fn neg(&self) -> ConstPoly {
        ConstPoly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn sub(&self, other: &ConstPoly) -> ConstPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ConstPoly) -> ConstPoly {
        let mut out: BTreeMap<ConstMono, Rational> = BTreeMap::new();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let m = ma.mul(mb);
                let v = out.entry(m.clone()).or_insert_with(Rational::zero);
                *v += ca * cb;
                if v.is_zero() {
                    out.remove(&m);
                }
            }
        }
        ConstPoly(out)
    }

    pub fn scale(&self, c: &Rational) -> ConstPoly {
        if c.is_zero() {
            return ConstPoly::zero();
        }
        ConstPoly(self.0.iter().map(|(m, v)| (m.clone(), v * c)).collect())
    }

    /// Multiplicative inverse, available only for single-monomial values.
    pub fn try_recip(&self) -> Option<ConstPoly> {
        if self.0.len() != 1 {
            return None;
        }
        let (m, c) = self.0.iter().next().unwrap();
        let mut out = BTreeMap::new();
        out.insert(m.inverse(), Rational::one() / c);
        Some(ConstPoly(out))
    }

    pub fn to_f64(&self) -> f64 {
        self.0
            .iter()
            .map(|(m, c)| rational_to_f64(c) * m.to_f64())
            .sum()
    }
}

impl fmt::Display for ConstPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.0 {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", rational_string(c))?;
            for (s, e) in &m.0 {
                if *e == 1 {
                    write!(f, "*{s}")?;
                } else {
                    write!(f, "*{s}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// `ln` of a positive rational as an exact combination of prime logs.
pub fn ln_rational(r: &Rational) -> Result<ConstPoly, EvalError> {
    if !r.is_positive() {
        return Err(EvalError::SymbolicUnsupported(format!(
            "ln of nonpositive rational {}",
            rational_string(r)
        )));
    }
    let mut out = ConstPoly::zero();
    for (value, sign) in [(r.numer().clone(), 1i64), (r.denom().clone(), -1i64)] {
        let mut v = value
            .to_u64()
            .ok_or_else(|| EvalError::SymbolicUnsupported("ln of huge rational".into()))?;
        let mut p = 2u64;
        while p * p <= v {
            while v % p == 0 {
                out = out.add(&ConstPoly::symbol(ConstSym::LnPrime(p)).scale(&rat(sign, 1)));
                v /= p;
            }
            p += 1;
        }
        if v > 1 {
            out = out.add(&ConstPoly::symbol(ConstSym::LnPrime(v)).scale(&rat(sign, 1)));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Generic truncated Laurent series over a coefficient ring
// ---------------------------------------------------------------------------

/// Coefficient ring for prefactor series: exact symbolic, double, or complex.
pub trait CoeffRing: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn scale_rat(&self, r: &Rational) -> Self;
    fn try_recip(&self) -> Option<Self>;
}

impl CoeffRing for ConstPoly {
    fn zero() -> Self {
        ConstPoly::zero()
    }
    fn one() -> Self {
        ConstPoly::one()
    }
    fn add(&self, o: &Self) -> Self {
        ConstPoly::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ConstPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        ConstPoly::neg(self)
    }
    fn is_zero(&self) -> bool {
        ConstPoly::is_zero(self)
    }
    fn scale_rat(&self, r: &Rational) -> Self {
        self.scale(r)
    }
    fn try_recip(&self) -> Option<Self> {
        ConstPoly::try_recip(self)
    }
}

impl CoeffRing for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn scale_rat(&self, r: &Rational) -> Self {
        self * rational_to_f64(r)
    }
    fn try_recip(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}

impl CoeffRing for num::complex::Complex64 {
    fn zero() -> Self {
        num::complex::Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        num::complex::Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn scale_rat(&self, r: &Rational) -> Self {
        self * rational_to_f64(r)
    }
    fn try_recip(&self) -> Option<Self> {
        (!CoeffRing::is_zero(self)).then(|| 1.0 / self)
    }
}

/// Truncated Laurent series with coefficients in `C` (the numeric analogue of
/// the exact scalar series, used for prefactor expansions).
#[derive(Debug, Clone, PartialEq)]
pub struct NumSeries<C: CoeffRing> {
    pub min_order: i64,
    pub coeffs: Vec<C>,
    /// Exclusive truncation order.
    pub truncation: i64,
}

impl<C: CoeffRing> NumSeries<C> {
    pub fn new(min_order: i64, coeffs: Vec<C>, truncation: i64) -> Self {
        let mut s = NumSeries {
            min_order,
            coeffs,
            truncation,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let keep = (self.truncation - self.min_order).max(0) as usize;
        self.coeffs.truncate(keep.min(self.coeffs.len()));
        while self.coeffs.last().map(C::is_zero).unwrap_or(false) {
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
        NumSeries {
            min_order: 0,
            coeffs: vec![],
            truncation,
        }
    }

    pub fn constant(c: C, truncation: i64) -> Self {
        NumSeries::new(0, vec![c], truncation)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff_at(&self, k: i64) -> C {
        if k < self.min_order {
            return C::zero();
        }
        self.coeffs
            .get((k - self.min_order) as usize)
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn add(&self, o: &NumSeries<C>) -> NumSeries<C> {
        let truncation = self.truncation.min(o.truncation);
        if self.is_zero() {
            return NumSeries::new(o.min_order, o.coeffs.clone(), truncation);
        }
        if o.is_zero() {
            return NumSeries::new(self.min_order, self.coeffs.clone(), truncation);
        }
        let min = self.min_order.min(o.min_order);
        let len = ((self.min_order + self.coeffs.len() as i64)
            .max(o.min_order + o.coeffs.len() as i64)
            - min) as usize;
        let mut coeffs = vec![C::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = (self.min_order - min) as usize + i;
            coeffs[k] = coeffs[k].add(c);
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            let k = (o.min_order - min) as usize + i;
            coeffs[k] = coeffs[k].add(c);
        }
        NumSeries::new(min, coeffs, truncation)
    }

    pub fn mul(&self, o: &NumSeries<C>) -> NumSeries<C> {
        if self.is_zero() || o.is_zero() {
            return NumSeries::zero(self.truncation.min(o.truncation));
        }
        let truncation = (self.truncation.saturating_add(o.min_order))
            .min(o.truncation.saturating_add(self.min_order));
        let min = self.min_order + o.min_order;
        let mut coeffs = vec![C::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        NumSeries::new(min, coeffs, truncation)
    }

    pub fn scale(&self, c: &C) -> NumSeries<C> {
        NumSeries::new(
            self.min_order,
            self.coeffs.iter().map(|x| x.mul(c)).collect(),
            self.truncation,
        )
    }

    pub fn recip(&self, target: i64) -> Result<NumSeries<C>, EvalError> {
        if self.is_zero() {
            return Err(EvalError::SymbolicUnsupported(
                "inverse of zero series".into(),
            ));
        }
        let m = self.min_order;
        let truncation = target.min(self.truncation - 2 * m);
        let len = ((truncation + m).max(0) as usize).max(1);
        let inv0 = self.coeffs[0].try_recip().ok_or_else(|| {
            EvalError::SymbolicUnsupported("leading coefficient not invertible".into())
        })?;
        let mut out: Vec<C> = Vec::with_capacity(len);
        out.push(inv0.clone());
        for n in 1..len {
            let mut acc = C::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                acc = acc.add(&self.coeffs[k].mul(&out[n - k]));
            }
            out.push(acc.mul(&inv0).neg());
        }
        Ok(NumSeries::new(-m, out, truncation))
    }

    /// `exp` of a series with no constant or pole part.
    pub fn exp(&self, target: i64) -> NumSeries<C> {
        debug_assert!(self.is_zero() || self.min_order >= 1);
        let mut acc = NumSeries::constant(C::one(), target);
        let mut power = NumSeries::constant(C::one(), target);
        let mut factorial = Rational::one();
        let max_k = (target.max(1)) as usize;
        for k in 1..=max_k {
            power = power.mul(self);
            if power.is_zero() {
                break;
            }
            factorial *= rat(k as i64, 1);
            let inv = Rational::one() / &factorial;
            acc = acc.add(&power_scaled(&power, &inv));
        }
        NumSeries::new(acc.min_order, acc.coeffs, target)
    }
}

fn power_scaled<C: CoeffRing>(s: &NumSeries<C>, r: &Rational) -> NumSeries<C> {
    NumSeries::new(
        s.min_order,
        s.coeffs.iter().map(|c| c.scale_rat(r)).collect(),
        s.truncation,
    )
}

impl NumSeries<ConstPoly> {
    pub fn to_f64_series(&self) -> NumSeries<f64> {
        NumSeries::new(
            self.min_order,
            self.coeffs.iter().map(ConstPoly::to_f64).collect(),
            self.truncation,
        )
    }

    pub fn to_c64_series(&self) -> NumSeries<num::complex::Complex64> {
        NumSeries::new(
            self.min_order,
            self.coeffs
                .iter()
                .map(|c| num::complex::Complex64::new(c.to_f64(), 0.0))
                .collect(),
            self.truncation,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_rational_decomposes_over_primes() {
        // ln(16) = 4 ln 2, ln(9/10) = 2 ln 3 - ln 2 - ln 5
        let l16 = ln_rational(&rat(16, 1)).unwrap();
        assert_eq!(
            l16,
            ConstPoly::symbol(ConstSym::LnPrime(2)).scale(&rat(4, 1))
        );
        let l = ln_rational(&rat(9, 10)).unwrap();
        let expect = ConstPoly::symbol(ConstSym::LnPrime(3))
            .scale(&rat(2, 1))
            .add(&ConstPoly::symbol(ConstSym::LnPrime(2)).neg())
            .add(&ConstPoly::symbol(ConstSym::LnPrime(5)).neg());
        assert_eq!(l, expect);
        assert!((l.to_f64() - (0.9f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn symbol_cancellation_is_exact() {
        let g = ConstPoly::symbol(ConstSym::EulerGamma);
        let combo = g.scale(&rat(2, 1)).add(&g.scale(&rat(-2, 1)));
        assert!(combo.is_zero());
    }

    #[test]
    fn sqrt_pi_inverse_cancels() {
        let s = ConstPoly::symbol(ConstSym::SqrtPi);
        let inv = s.try_recip().unwrap();
        assert_eq!(s.mul(&inv), ConstPoly::one());
    }

    #[test]
    fn series_exp_matches_known() {
        // exp(a eps) coefficients a^k/k!
        let a = ConstPoly::symbol(ConstSym::EulerGamma);
        let s = NumSeries::new(1, vec![a.clone()], 5);
        let e = s.exp(5);
        assert_eq!(e.coeff_at(0), ConstPoly::one());
        assert_eq!(e.coeff_at(1), a.clone());
        assert_eq!(e.coeff_at(2), a.mul(&a).scale(&rat(1, 2)));
    }

    #[test]
    fn series_recip_roundtrip() {
        let s = NumSeries::new(0, vec![2.0f64, 1.0, -0.5], 6);
        let inv = s.recip(6).unwrap();
        let prod = s.mul(&inv);
        assert!((prod.coeff_at(0) - 1.0).abs() < 1e-15);
        for k in 1..5 {
            assert!(prod.coeff_at(k).abs() < 1e-14);
        }
    }
}
