//! Expansion of gamma-function/power prefactors in eps.
//!
//! A prefactor is `constant * prod base^(b0 + b1 eps) * prod Gamma(arg)^{+-1}`.
//! Gamma factors expand along the ln-route: integer shifts by the recurrence
//! `Gamma(z+1) = z Gamma(z)` (poles appear as explicit eps-order offsets when
//! a shift factor vanishes at eps = 0), then `ln Gamma` around `1` or `1/2`
//! with Euler-Mascheroni and zeta constants, exponentiated as a truncated
//! series. The symbolic mode keeps those constants formal so pole-order
//! cancellations in assembled combinations are exact; real/complex modes
//! produce floating coefficients.

use num::complex::Complex64;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::numeval::constpoly::{ln_rational, CoeffRing, ConstPoly, ConstSym, NumSeries};
use crate::numeval::{consts, EvalError, EvalPoint};
use crate::scalar::{rat, rational_to_f64, EpsLinear, Rational};

/// Base of a power factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerBase {
    /// Named input resolved through the evaluation point.
    Variable(String),
    /// Literal rational base (serialized as `"p/q"`).
    Literal(#[serde(with = "crate::schema::rational_string_serde")] Rational),
    /// The circle constant (for `pi^{-1/2}`-style normalizations).
    Pi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFactor {
    pub base: PowerBase,
    pub exponent: EpsLinearDef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub argument: EpsLinearDef,
    /// `+1` or `-1`.
    pub power: i32,
}

/// Serde mirror of [`EpsLinear`] (`{b0, b1}` rational strings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsLinearDef {
    #[serde(with = "crate::schema::rational_string_serde")]
    pub b0: Rational,
    #[serde(with = "crate::schema::rational_string_serde")]
    pub b1: Rational,
}

impl From<&EpsLinear> for EpsLinearDef {
    fn from(e: &EpsLinear) -> Self {
        EpsLinearDef {
            b0: e.b0.clone(),
            b1: e.b1.clone(),
        }
    }
}

impl From<&EpsLinearDef> for EpsLinear {
    fn from(e: &EpsLinearDef) -> Self {
        EpsLinear::new(e.b0.clone(), e.b1.clone())
    }
}

/// An eps-dependent product of gamma functions and powers multiplying an MHF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefactorSpec {
    /// Complex rational constant `(re, im)`.
    #[serde(with = "crate::schema::rational_pair_serde")]
    pub constant: (Rational, Rational),
    #[serde(default)]
    pub powers: Vec<PowerFactor>,
    #[serde(default)]
    pub gammas: Vec<GammaFactor>,
}

impl PrefactorSpec {
    pub fn constant_one() -> Self {
        PrefactorSpec {
            constant: (Rational::one(), Rational::zero()),
            powers: vec![],
            gammas: vec![],
        }
    }

    /// Worst-case pole order of the expansion (one per gamma factor whose
    /// argument can reach a nonpositive integer at eps = 0).
    pub fn pole_bound(&self) -> i64 {
        self.gammas
            .iter()
            .filter(|g| {
                g.power > 0 && g.argument.b0.is_integer() && !g.argument.b0.is_positive()
            })
            .count() as i64
    }
}

// ---------------------------------------------------------------------------
// Gamma series
// ---------------------------------------------------------------------------

fn gamma_pole_check(arg: &EpsLinear) -> Result<(), EvalError> {
    if arg.b1.is_zero() && arg.b0.is_integer() && !arg.b0.is_positive() {
        return Err(EvalError::GammaPoleUnhandled(arg.to_string()));
    }
    Ok(())
}

/// `ln Gamma` Taylor coefficient `c_k` of `w^k` around 1 (`k >= 1`):
/// `c_1 = -gamma`, `c_k = (-1)^k zeta(k)/k`.
fn ln_gamma_coeff_at_one(k: i64) -> ConstPoly {
    if k == 1 {
        ConstPoly::symbol(ConstSym::EulerGamma).neg()
    } else {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        ConstPoly::symbol(ConstSym::Zeta(k as u32)).scale(&rat(sign, k))
    }
}

/// Around 1/2: `c_1 = -gamma - 2 ln 2`, `c_k = (-1)^k (2^k - 1) zeta(k)/k`.
fn ln_gamma_coeff_at_half(k: i64) -> ConstPoly {
    if k == 1 {
        ConstPoly::symbol(ConstSym::EulerGamma)
            .neg()
            .add(&ConstPoly::symbol(ConstSym::LnPrime(2)).scale(&rat(-2, 1)))
    } else {
        let sign: i64 = if k % 2 == 0 { 1 } else { -1 };
        let two_k = 2i64.pow(k as u32) - 1;
        ConstPoly::symbol(ConstSym::Zeta(k as u32)).scale(&rat(sign * two_k, k))
    }
}

/// Symbolic expansion of `Gamma(b0 + b1 eps)` valid through order
/// `trunc - 1`. Supports integer and half-integer `b0`.
pub fn gamma_series_symbolic(
    arg: &EpsLinear,
    trunc: i64,
) -> Result<NumSeries<ConstPoly>, EvalError> {
    gamma_pole_check(arg)?;
    if arg.b1.is_zero() {
        // constant gamma value
        let b0 = &arg.b0;
        if b0.is_integer() {
            let n = b0.to_integer().to_i64().ok_or(EvalError::HugeParameter)?;
            let mut v = Rational::one();
            for t in 1..n {
                v *= rat(t, 1);
            }
            return Ok(NumSeries::constant(ConstPoly::constant(v), trunc));
        }
        let half_steps = (b0 - rat(1, 2)).clone();
        if half_steps.is_integer() {
            // Gamma(1/2 + n) = sqrt(pi) * (1/2)_n (or descending recurrence)
            let n = half_steps.to_integer().to_i64().ok_or(EvalError::HugeParameter)?;
            let mut v = Rational::one();
            if n >= 0 {
                for t in 0..n {
                    v *= rat(1, 2) + rat(t, 1);
                }
            } else {
                for t in 1..=(-n) {
                    v /= rat(1, 2) - rat(t, 1);
                }
            }
            return Ok(NumSeries::constant(
                ConstPoly::symbol(ConstSym::SqrtPi).scale(&v),
                trunc,
            ));
        }
        return Err(EvalError::SymbolicUnsupported(format!(
            "gamma of eps-free non-(half-)integer argument {arg}"
        )));
    }

    // pick the ln-expansion base point
    let (target, at_half) = if arg.b0.is_integer() {
        (Rational::one(), false)
    } else if (&arg.b0 - rat(1, 2)).is_integer() {
        (rat(1, 2), true)
    } else {
        return Err(EvalError::SymbolicUnsupported(format!(
            "gamma argument {arg} is neither integer nor half-integer in eps-free part"
        )));
    };

    // recurrence shifts: Gamma(b0+b1 eps) = Gamma(target+b1 eps) * prod/quot
    let mut shift = NumSeries::constant(ConstPoly::one(), trunc);
    let mut b0 = arg.b0.clone();
    while b0 > target {
        b0 -= Rational::one();
        let factor = eps_linear_series(&EpsLinear::new(b0.clone(), arg.b1.clone()), trunc);
        shift = shift.mul(&factor);
    }
    while b0 < target {
        let factor = eps_linear_series(&EpsLinear::new(b0.clone(), arg.b1.clone()), trunc);
        shift = shift.mul(&factor.recip(trunc)?);
        b0 += Rational::one();
    }

    // ln Gamma(target + w), w = b1 eps, exponentiated
    let need = (trunc + 2 - shift.min_order.min(0)).max(2);
    let mut lng = NumSeries::zero(need);
    let mut b1_pow = Rational::one();
    for k in 1..need {
        b1_pow *= &arg.b1;
        let c = if at_half {
            ln_gamma_coeff_at_half(k)
        } else {
            ln_gamma_coeff_at_one(k)
        };
        lng = lng.add(&NumSeries::new(k, vec![c.scale(&b1_pow)], need));
    }
    let mut core = lng.exp(need);
    if at_half {
        core = core.scale(&ConstPoly::symbol(ConstSym::SqrtPi));
    }
    Ok(core.mul(&shift))
}

fn eps_linear_series<C: CoeffRing>(e: &EpsLinear, trunc: i64) -> NumSeries<C>
where
    C: FromRational,
{
    NumSeries::new(
        0,
        vec![C::from_rational(&e.b0), C::from_rational(&e.b1)],
        trunc,
    )
}

/// Conversion hook from exact rationals into a coefficient ring.
pub trait FromRational {
    fn from_rational(r: &Rational) -> Self;
}

impl FromRational for ConstPoly {
    fn from_rational(r: &Rational) -> Self {
        ConstPoly::constant(r.clone())
    }
}

impl FromRational for f64 {
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
}

impl FromRational for Complex64 {
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }
}

/// Double-precision gamma series for arbitrary rational `b0` (polygamma
/// route); used when the symbolic base points do not apply.
pub fn gamma_series_f64(arg: &EpsLinear, trunc: i64) -> Result<NumSeries<f64>, EvalError> {
    gamma_pole_check(arg)?;
    if arg.b1.is_zero() {
        let b0 = rational_to_f64(&arg.b0);
        let v = if b0 > 0.0 {
            consts::ln_gamma(b0).exp()
        } else {
            // reflection through the recurrence for negative non-integers
            let mut x = b0;
            let mut scale = 1.0;
            while x < 1.0 {
                scale /= x;
                x += 1.0;
            }
            scale * consts::ln_gamma(x).exp()
        };
        return Ok(NumSeries::constant(v, trunc));
    }
    // shift into [1, 2)
    let mut shift = NumSeries::constant(1.0f64, trunc);
    let mut b0 = arg.b0.clone();
    while b0 >= rat(2, 1) {
        b0 -= Rational::one();
        let factor = eps_linear_series::<f64>(&EpsLinear::new(b0.clone(), arg.b1.clone()), trunc);
        shift = shift.mul(&factor);
    }
    while b0 < Rational::one() {
        let factor = eps_linear_series::<f64>(&EpsLinear::new(b0.clone(), arg.b1.clone()), trunc);
        shift = shift.mul(&factor.recip(trunc)?);
        b0 += Rational::one();
    }
    let t = rational_to_f64(&b0);
    let b1 = rational_to_f64(&arg.b1);
    let need = (trunc + 2 - shift.min_order.min(0)).max(2);
    let mut lng = NumSeries::zero(need);
    let mut b1_pow = 1.0;
    let mut factorial = 1.0;
    for k in 1..need {
        b1_pow *= b1;
        factorial *= k as f64;
        let psi_k = if k == 1 {
            consts::digamma(t)
        } else {
            consts::polygamma(k as u32 - 1, t)
        };
        lng = lng.add(&NumSeries::new(k, vec![psi_k / factorial * b1_pow], need));
    }
    let core = lng.exp(need).scale(&consts::ln_gamma(t).exp());
    Ok(core.mul(&shift))
}

// ---------------------------------------------------------------------------
// Full prefactor expansion
// ---------------------------------------------------------------------------

fn resolve_base_exact(base: &PowerBase, point: &EvalPoint) -> Result<Option<Rational>, EvalError> {
    match base {
        PowerBase::Variable(name) => Ok(Some(point.exact(name)?.clone())),
        PowerBase::Literal(r) => Ok(Some(r.clone())),
        PowerBase::Pi => Ok(None),
    }
}

/// Symbolic expansion: exact rational coefficients over formal constants.
/// Requires an exact point, integer power exponents at eps^0 (half-integers
/// allowed for pi), and (half-)integer gamma arguments.
pub fn prefactor_expand_symbolic(
    spec: &PrefactorSpec,
    point: &EvalPoint,
    orders_through: i64,
) -> Result<NumSeries<ConstPoly>, EvalError> {
    let trunc = orders_through + 1 + spec.pole_bound();
    if !spec.constant.1.is_zero() {
        return Err(EvalError::SymbolicUnsupported(
            "complex constant in symbolic mode".into(),
        ));
    }
    let mut acc = NumSeries::constant(ConstPoly::constant(spec.constant.0.clone()), trunc);
    for p in &spec.powers {
        let exponent: EpsLinear = (&p.exponent).into();
        match resolve_base_exact(&p.base, point)? {
            Some(value) => {
                if !exponent.b0.is_integer() {
                    return Err(EvalError::SymbolicUnsupported(format!(
                        "non-integer eps-free exponent {} on a rational base",
                        exponent
                    )));
                }
                let n = exponent.b0.to_integer().to_i64().ok_or(EvalError::HugeParameter)?;
                let base_pow = if n >= 0 {
                    num::pow::pow(value.clone(), n as usize)
                } else {
                    Rational::one() / num::pow::pow(value.clone(), (-n) as usize)
                };
                acc = acc.scale(&ConstPoly::constant(base_pow));
                if !exponent.b1.is_zero() {
                    let ln = ln_rational(&value)?;
                    let lin = NumSeries::new(1, vec![ln.scale(&exponent.b1)], trunc);
                    acc = acc.mul(&lin.exp(trunc));
                }
            }
            None => {
                // pi^(b0 + b1 eps) = sqrt(pi)^(2 b0) * exp(b1 ln(pi) eps)
                let twice = &exponent.b0 * rat(2, 1);
                if !twice.is_integer() {
                    return Err(EvalError::SymbolicUnsupported(
                        "pi power with non-half-integer exponent".into(),
                    ));
                }
                let e2 = twice.to_integer().to_i64().ok_or(EvalError::HugeParameter)?;
                let mono = ConstPoly::symbol(ConstSym::SqrtPi);
                let mut value = ConstPoly::one();
                let base = if e2 >= 0 { mono.clone() } else { mono.try_recip().unwrap() };
                for _ in 0..e2.abs() {
                    value = value.mul(&base);
                }
                acc = acc.scale(&value);
                if !exponent.b1.is_zero() {
                    let ln = ConstPoly::symbol(ConstSym::LnPi);
                    let lin = NumSeries::new(1, vec![ln.scale(&exponent.b1)], trunc);
                    acc = acc.mul(&lin.exp(trunc));
                }
            }
        }
    }
    for g in &spec.gammas {
        let arg: EpsLinear = (&g.argument).into();
        let series = gamma_series_symbolic(&arg, trunc)?;
        match g.power {
            1 => acc = acc.mul(&series),
            -1 => acc = acc.mul(&series.recip(trunc)?),
            _ => {
                return Err(EvalError::SymbolicUnsupported(
                    "gamma powers other than +-1; repeat the factor instead".into(),
                ))
            }
        }
    }
    Ok(acc)
}

/// Double-precision expansion; falls back to the polygamma route for gamma
/// arguments the symbolic mode cannot express.
pub fn prefactor_expand_f64(
    spec: &PrefactorSpec,
    point: &EvalPoint,
    orders_through: i64,
) -> Result<NumSeries<f64>, EvalError> {
    let trunc = orders_through + 1 + spec.pole_bound();
    if !spec.constant.1.is_zero() {
        return Err(EvalError::SymbolicUnsupported(
            "complex constant in real mode".into(),
        ));
    }
    let mut acc = NumSeries::constant(rational_to_f64(&spec.constant.0), trunc);
    for p in &spec.powers {
        let exponent: EpsLinear = (&p.exponent).into();
        let value = match &p.base {
            PowerBase::Variable(name) => point.get(name)?.to_f64(),
            PowerBase::Literal(r) => rational_to_f64(r),
            PowerBase::Pi => std::f64::consts::PI,
        };
        if value <= 0.0 && !exponent.b1.is_zero() {
            return Err(EvalError::SymbolicUnsupported(
                "real-mode power of a nonpositive base with eps-dependent exponent".into(),
            ));
        }
        let b0 = rational_to_f64(&exponent.b0);
        acc = acc.scale(&value.powf(b0));
        if !exponent.b1.is_zero() {
            let lin = NumSeries::new(1, vec![value.ln() * rational_to_f64(&exponent.b1)], trunc);
            acc = acc.mul(&lin.exp(trunc));
        }
    }
    for g in &spec.gammas {
        let arg: EpsLinear = (&g.argument).into();
        let series = match gamma_series_symbolic(&arg, trunc) {
            Ok(s) => s.to_f64_series(),
            Err(EvalError::SymbolicUnsupported(_)) => gamma_series_f64(&arg, trunc)?,
            Err(e) => return Err(e),
        };
        match g.power {
            1 => acc = acc.mul(&series),
            -1 => acc = acc.mul(&series.recip(trunc)?),
            _ => {
                return Err(EvalError::SymbolicUnsupported(
                    "gamma powers other than +-1; repeat the factor instead".into(),
                ))
            }
        }
    }
    Ok(acc)
}

/// Complex-double expansion (principal branches for powers and logs).
pub fn prefactor_expand_c64(
    spec: &PrefactorSpec,
    point: &EvalPoint,
    orders_through: i64,
) -> Result<NumSeries<Complex64>, EvalError> {
    let trunc = orders_through + 1 + spec.pole_bound();
    let constant = Complex64::new(
        rational_to_f64(&spec.constant.0),
        rational_to_f64(&spec.constant.1),
    );
    let mut acc = NumSeries::constant(constant, trunc);
    for p in &spec.powers {
        let exponent: EpsLinear = (&p.exponent).into();
        let value = match &p.base {
            PowerBase::Variable(name) => point.get(name)?.to_c64(),
            PowerBase::Literal(r) => Complex64::new(rational_to_f64(r), 0.0),
            PowerBase::Pi => Complex64::new(std::f64::consts::PI, 0.0),
        };
        if CoeffRing::is_zero(&value) {
            return Err(EvalError::SymbolicUnsupported(
                "power of a zero base".into(),
            ));
        }
        let b0 = rational_to_f64(&exponent.b0);
        acc = acc.scale(&value.powf(b0));
        if !exponent.b1.is_zero() {
            let lin = NumSeries::new(
                1,
                vec![value.ln() * rational_to_f64(&exponent.b1)],
                trunc,
            );
            acc = acc.mul(&lin.exp(trunc));
        }
    }
    for g in &spec.gammas {
        let arg: EpsLinear = (&g.argument).into();
        let series = match gamma_series_symbolic(&arg, trunc) {
            Ok(s) => s.to_c64_series(),
            Err(EvalError::SymbolicUnsupported(_)) => {
                let s = gamma_series_f64(&arg, trunc)?;
                NumSeries::new(
                    s.min_order,
                    s.coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                    s.truncation,
                )
            }
            Err(e) => return Err(e),
        };
        match g.power {
            1 => acc = acc.mul(&series),
            -1 => acc = acc.mul(&series.recip(trunc)?),
            _ => {
                return Err(EvalError::SymbolicUnsupported(
                    "gamma powers other than +-1; repeat the factor instead".into(),
                ))
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeval::EvalPoint;

    fn eld(b0: Rational, b1: Rational) -> EpsLinearDef {
        EpsLinearDef { b0, b1 }
    }

    #[test]
    fn gamma_eps_squared_leading_orders() {
        // Gamma(eps)^2 -> eps^-2 (1 - 2 gamma eps + ...)
        let spec = PrefactorSpec {
            constant: (Rational::one(), Rational::zero()),
            powers: vec![],
            gammas: vec![
                GammaFactor {
                    argument: eld(rat(0, 1), rat(1, 1)),
                    power: 1,
                },
                GammaFactor {
                    argument: eld(rat(0, 1), rat(1, 1)),
                    power: 1,
                },
            ],
        };
        let s = prefactor_expand_symbolic(&spec, &EvalPoint::new(), 0).unwrap();
        assert_eq!(s.min_order, -2);
        assert_eq!(s.coeff_at(-2), ConstPoly::one());
        assert_eq!(
            s.coeff_at(-1),
            ConstPoly::symbol(ConstSym::EulerGamma).scale(&rat(-2, 1))
        );
    }

    #[test]
    fn constant_prefactor_is_itself() {
        let spec = PrefactorSpec {
            constant: (rat(7, 3), Rational::zero()),
            powers: vec![],
            gammas: vec![],
        };
        let s = prefactor_expand_symbolic(&spec, &EvalPoint::new(), 2).unwrap();
        assert_eq!(s.coeff_at(0), ConstPoly::constant(rat(7, 3)));
        assert!(s.coeff_at(1).is_zero());
    }

    #[test]
    fn half_integer_prefactor_checkpoint() {
        // g = 2 (1-x)^(eps-1) Gamma(2-eps) Gamma(eps+1/2) / sqrt(pi) at x=1/2:
        // order 0 is -2/(x-1) = 4; order 1 is (-2 ln(1-x) + 2 + ln 16)/(x-1)
        // = -4 - 12 ln 2 at x = 1/2.
        let spec = PrefactorSpec {
            constant: (rat(2, 1), Rational::zero()),
            powers: vec![
                PowerFactor {
                    base: PowerBase::Literal(rat(1, 2)),
                    exponent: eld(rat(-1, 1), rat(1, 1)),
                },
                PowerFactor {
                    base: PowerBase::Pi,
                    exponent: eld(rat(-1, 2), rat(0, 1)),
                },
            ],
            gammas: vec![
                GammaFactor {
                    argument: eld(rat(2, 1), rat(-1, 1)),
                    power: 1,
                },
                GammaFactor {
                    argument: eld(rat(1, 2), rat(1, 1)),
                    power: 1,
                },
            ],
        };
        let s = prefactor_expand_symbolic(&spec, &EvalPoint::new(), 1).unwrap();
        assert_eq!(s.coeff_at(0), ConstPoly::constant(rat(4, 1)));
        let expect = ConstPoly::constant(rat(-4, 1))
            .add(&ConstPoly::symbol(ConstSym::LnPrime(2)).scale(&rat(-12, 1)));
        assert_eq!(s.coeff_at(1), expect);
        // numeric cross-check
        let f = s.to_f64_series();
        assert!((f.coeff_at(1) - (-4.0 - 12.0 * 2f64.ln())).abs() < 1e-13);
    }

    #[test]
    fn product_identity() {
        // expansion of s1*s2 equals the series product of the expansions
        let p = EvalPoint::new();
        let s1 = PrefactorSpec {
            constant: (rat(3, 2), Rational::zero()),
            powers: vec![],
            gammas: vec![GammaFactor {
                argument: eld(rat(0, 1), rat(1, 1)),
                power: 1,
            }],
        };
        let s2 = PrefactorSpec {
            constant: (rat(1, 1), Rational::zero()),
            powers: vec![],
            gammas: vec![GammaFactor {
                argument: eld(rat(1, 1), rat(2, 1)),
                power: -1,
            }],
        };
        let merged = PrefactorSpec {
            constant: (rat(3, 2), Rational::zero()),
            powers: vec![],
            gammas: vec![s1.gammas[0].clone(), s2.gammas[0].clone()],
        };
        let a = prefactor_expand_f64(&s1, &p, 3).unwrap();
        let b = prefactor_expand_f64(&s2, &p, 3).unwrap();
        let m = prefactor_expand_f64(&merged, &p, 3).unwrap();
        let prod = a.mul(&b);
        for k in -1..=3 {
            assert!(
                (prod.coeff_at(k) - m.coeff_at(k)).abs() <= 1e-12 * m.coeff_at(k).abs().max(1.0),
                "order {k}"
            );
        }
    }

    #[test]
    fn eps_free_pole_is_rejected() {
        let spec = PrefactorSpec {
            constant: (Rational::one(), Rational::zero()),
            powers: vec![],
            gammas: vec![GammaFactor {
                argument: eld(rat(-2, 1), rat(0, 1)),
                power: 1,
            }],
        };
        assert!(matches!(
            prefactor_expand_symbolic(&spec, &EvalPoint::new(), 1),
            Err(EvalError::GammaPoleUnhandled(_))
        ));
    }

    #[test]
    fn general_rational_argument_numeric_route() {
        // Gamma(1/3 + eps): order-0 coefficient is Gamma(1/3)
        let arg = EpsLinear::new(rat(1, 3), rat(1, 1));
        let s = gamma_series_f64(&arg, 3).unwrap();
        let g13 = 2.678938534707747633; // Gamma(1/3)
        assert!((s.coeff_at(0) - g13).abs() < 1e-12);
        // order-1 coefficient is Gamma(1/3) * psi(1/3)
        let psi13 = consts::digamma(1.0 / 3.0);
        assert!((s.coeff_at(1) - g13 * psi13).abs() < 1e-11);
    }
}
