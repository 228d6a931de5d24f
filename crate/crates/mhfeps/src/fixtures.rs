//! Executable worked examples with published reference values.
//!
//! Every case pins its input file, evaluation points, truncation levels,
//! reference values with a provenance tag, and tolerances, then recomputes
//! everything through the expansion pipeline and reports pass/fail per check.
//! Reference provenance tags: `hypexp`/`numexp` (one-variable cross-check
//! packages), `polylogtools` (nested-sum evaluation), `fiesta5` (sector
//! decomposition), `xspace-integral` (one-dimensional Bessel-moment
//! quadrature of the sunset), `external-table` (published complex-point
//! table), `series-vs-direct` (internal consistency of a truncated series
//! against direct evaluation at small eps), `reference` (converged
//! high-precision series values).

use std::collections::BTreeMap;
use std::time::Instant;

use num::complex::Complex64;
use num::traits::{One, Signed, Zero};

use crate::calculus::{taylor_expand, EpsExpansion};
use crate::laurent::{build_annihilator, laurent_expand, StepDownOperator};
use crate::mhf::{Term, MHF};
use crate::numeval::constpoly::ConstPoly;
use crate::numeval::oracle::fd_oracle;
use crate::numeval::prefactor::{prefactor_expand_c64, prefactor_expand_symbolic, PrefactorSpec};
use crate::numeval::{
    eval_mhf_c64, eval_mhf_exact, eval_mhf_f64, eval_mhf_prec, eval_term, EvalPoint,
    Truncation, Value,
};
use crate::scalar::{
    decimal_string, parse_decimal, parse_rational, rat, rational_to_f64, EpsLinear, EpsSeries,
    Rational,
};
use crate::schema::{parse_spec, CaseReport, CheckReport, ParsedInput, VerifyReport};

const GAUSS_HALF_INTEGER: &str = include_str!("../fixtures/gauss-half-integer.json");
const GAUSS_INTEGER: &str = include_str!("../fixtures/gauss-integer.json");
const APPELL_F2_GENERIC: &str = include_str!("../fixtures/appell-f2-generic.json");
const APPELL_F2_INTEGER: &str = include_str!("../fixtures/appell-f2-integer.json");
const APPELL_F2_HALF_INTEGER: &str = include_str!("../fixtures/appell-f2-half-integer.json");
const APPELL_F2_RATIONAL: &str = include_str!("../fixtures/appell-f2-rational.json");
const APPELL_F1_LAURENT: &str = include_str!("../fixtures/appell-f1-laurent.json");
const APPELL_F1_CONTINUED: &str = include_str!("../fixtures/appell-f1-continued.json");
const TWO_F_TWO: &str = include_str!("../fixtures/2f2-laurent.json");
const SUNSET: &str = include_str!("../fixtures/sunset.json");

/// Fixture input text by case name (also the CLI's bundled inputs).
pub fn fixture_source(case: &str) -> Option<&'static str> {
    Some(match case {
        "gauss-half-integer" => GAUSS_HALF_INTEGER,
        "gauss-integer" | "operator-equivalence" => GAUSS_INTEGER,
        "appell-f2-generic" => APPELL_F2_GENERIC,
        "appell-f2-integer" => APPELL_F2_INTEGER,
        "appell-f2-half-integer" => APPELL_F2_HALF_INTEGER,
        "appell-f2-rational" => APPELL_F2_RATIONAL,
        "appell-f1-laurent" => APPELL_F1_LAURENT,
        "appell-f1-taylor-complex" => APPELL_F1_CONTINUED,
        "2f2-laurent" => TWO_F_TWO,
        "sunset" => SUNSET,
        _ => return None,
    })
}

pub fn case_names() -> Vec<&'static str> {
    vec![
        "gauss-half-integer",
        "gauss-integer",
        "appell-f2-generic",
        "appell-f2-integer",
        "appell-f2-half-integer",
        "appell-f2-rational",
        "appell-f1-laurent",
        "sunset",
        "2f2-laurent",
        "appell-f1-taylor-complex",
        "oracle-random",
        "operator-equivalence",
    ]
}

/// Runs one named case, or every case.
pub fn run_verify(case: Option<&str>) -> Result<VerifyReport, String> {
    let names = match case {
        Some(c) => {
            if !case_names().contains(&c) {
                return Err(format!(
                    "unknown case `{c}`; known cases: {}",
                    case_names().join(", ")
                ));
            }
            vec![c]
        }
        None => case_names(),
    };
    let mut report = VerifyReport::default();
    for name in names {
        report.cases.push(run_case(name));
    }
    Ok(report)
}

fn run_case(name: &str) -> CaseReport {
    let started = Instant::now();
    let result = std::panic::catch_unwind(|| match name {
        "gauss-half-integer" => case_gauss_half_integer(),
        "gauss-integer" => case_gauss_integer(),
        "appell-f2-generic" => case_f2_generic(),
        "appell-f2-integer" => case_f2_set(APPELL_F2_INTEGER, F2_INTEGER_REFS),
        "appell-f2-half-integer" => case_f2_set(APPELL_F2_HALF_INTEGER, F2_HALF_REFS),
        "appell-f2-rational" => case_f2_set(APPELL_F2_RATIONAL, F2_RATIONAL_REFS),
        "appell-f1-laurent" => case_f1_laurent(),
        "sunset" => case_sunset(),
        "2f2-laurent" => case_2f2(),
        "appell-f1-taylor-complex" => case_f1_complex(),
        "oracle-random" => case_oracle_random(),
        "operator-equivalence" => case_operator_equivalence(),
        other => (format!("internal: unmapped case {other}"), vec![]),
    });
    let (truncation, checks) = match result {
        Ok(v) => v,
        Err(_) => (
            "panicked".to_string(),
            vec![CheckReport {
                label: "case execution".into(),
                computed: "panic".into(),
                reference: "completion".into(),
                tolerance: "-".into(),
                source: "internal".into(),
                passed: false,
            }],
        ),
    };
    CaseReport {
        case: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        truncation,
        wall_seconds: started.elapsed().as_secs_f64(),
        checks,
    }
}

// ---------------------------------------------------------------------------
// Check helpers
// ---------------------------------------------------------------------------

fn check_rel(label: &str, computed: f64, reference: &str, rel: f64, source: &str) -> CheckReport {
    let r: f64 = reference.parse().unwrap();
    let passed = (computed - r).abs() <= rel * r.abs().max(f64::MIN_POSITIVE);
    CheckReport {
        label: label.to_string(),
        computed: format!("{computed:.12e}"),
        reference: reference.to_string(),
        tolerance: format!("rel {rel:.1e}"),
        source: source.to_string(),
        passed,
    }
}

fn check_abs(label: &str, computed: f64, reference: &str, abs: f64, source: &str) -> CheckReport {
    let r: f64 = reference.parse().unwrap();
    CheckReport {
        label: label.to_string(),
        computed: format!("{computed:.12e}"),
        reference: reference.to_string(),
        tolerance: format!("abs {abs:.1e}"),
        source: source.to_string(),
        passed: (computed - r).abs() <= abs,
    }
}

/// One-unit-in-the-last-printed-digit comparison on exact values.
fn check_printed(label: &str, computed: &Rational, reference: &str, source: &str) -> CheckReport {
    let r = parse_decimal(reference).unwrap();
    let ulp = printed_ulp(reference);
    let passed = (computed - &r).abs() <= ulp;
    let decimals = reference
        .split(['e', 'E'])
        .next()
        .and_then(|m| m.split('.').nth(1))
        .map(|f| f.len())
        .unwrap_or(0)
        + 4;
    CheckReport {
        label: label.to_string(),
        computed: decimal_string(computed, decimals.min(40)),
        reference: reference.to_string(),
        tolerance: "1 ulp of printed digits".to_string(),
        source: source.to_string(),
        passed,
    }
}

fn printed_ulp(reference: &str) -> Rational {
    let (mantissa, exp) = match reference.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().unwrap()),
        None => (reference, 0),
    };
    let frac = mantissa.split('.').nth(1).map(|f| f.len() as i64).unwrap_or(0);
    let place = exp - frac;
    let ten = rat(10, 1);
    if place >= 0 {
        num::pow::pow(ten, place as usize)
    } else {
        Rational::one() / num::pow::pow(ten, (-place) as usize)
    }
}

/// Relative comparison against a published decimal whose trailing digits may
/// carry the source's own truncation noise.
fn check_rel_rational(
    label: &str,
    computed: &Rational,
    reference: &str,
    rel: f64,
    source: &str,
) -> CheckReport {
    let r = parse_decimal(reference).unwrap();
    let diff = rational_to_f64(&(computed - &r)).abs();
    let passed = diff <= rel * rational_to_f64(&r).abs().max(f64::MIN_POSITIVE);
    CheckReport {
        label: label.to_string(),
        computed: decimal_string(computed, 24),
        reference: reference.to_string(),
        tolerance: format!("rel {rel:.0e}"),
        source: source.to_string(),
        passed,
    }
}

fn check_bool(label: &str, passed: bool, computed: String, reference: &str) -> CheckReport {
    CheckReport {
        label: label.to_string(),
        computed,
        reference: reference.to_string(),
        tolerance: "exact".to_string(),
        source: "structural".to_string(),
        passed,
    }
}

fn single_mhf(text: &str) -> MHF {
    match parse_spec(text).expect("fixture input parses") {
        ParsedInput::Single(m) => m,
        ParsedInput::Sum(_) => panic!("fixture should be a single series"),
    }
}

fn sum_input(text: &str) -> Vec<(PrefactorSpec, MHF)> {
    match parse_spec(text).expect("fixture input parses") {
        ParsedInput::Sum(s) => s,
        ParsedInput::Single(_) => panic!("fixture should be a prefactor sum"),
    }
}

/// Exact rational equal to the IEEE double of a decimal literal. The
/// published tables were evaluated at these binary points (their 20-digit
/// rows reproduce exactly there and differ at the 1e-17 scale at the exact
/// rationals), so fixtures pin them.
fn dbl(x: f64) -> Rational {
    Rational::from_float(x).unwrap()
}

fn dbl_point(pairs: &[(&str, f64)]) -> EvalPoint {
    let mut p = EvalPoint::new();
    for (name, value) in pairs {
        p = p.set_exact(name, dbl(*value));
    }
    p
}

fn exact_point(pairs: &[(&str, &str)]) -> EvalPoint {
    let mut p = EvalPoint::new();
    for (name, value) in pairs {
        p = p.set_exact(name, parse_rational(value).unwrap());
    }
    p
}

/// Per-order evaluation with fold-graded truncation in a chosen engine.
enum Engine {
    Exact,
    Float,
}

fn eval_orders(
    e: &EpsExpansion,
    point: &EvalPoint,
    cap_for_fold: &(dyn Fn(usize) -> u32 + Sync),
    engine: &Engine,
) -> BTreeMap<i64, f64> {
    let mut out = BTreeMap::new();
    for (&order, terms) in &e.orders {
        out.insert(order, eval_terms_graded(terms, point, cap_for_fold, engine));
    }
    out
}

fn eval_terms_graded(
    terms: &[Term],
    point: &EvalPoint,
    cap_for_fold: &(dyn Fn(usize) -> u32 + Sync),
    engine: &Engine,
) -> f64 {
    use rayon::prelude::*;
    let vals: Vec<f64> = terms
        .par_iter()
        .map(|t| {
            let trunc = Truncation::Uniform(cap_for_fold(t.mhf.fold()));
            eval_term_scalar(t, point, &trunc, engine)
        })
        .collect();
    vals.iter().sum()
}

fn eval_term_scalar(t: &Term, point: &EvalPoint, trunc: &Truncation, engine: &Engine) -> f64 {
    let coeff = t.coeff.coeff_at(0);
    let mono: f64 = t
        .monomial
        .iter()
        .map(|(v, e)| point.get(v).unwrap().to_f64().powi(*e as i32))
        .product();
    let base = match engine {
        Engine::Exact => rational_to_f64(&eval_mhf_exact(&t.mhf, point, trunc).unwrap()),
        Engine::Float => {
            let fp = float_point(point);
            eval_mhf_f64(&t.mhf, &fp, trunc).unwrap().0
        }
    };
    rational_to_f64(&coeff) * mono * base
}

fn float_point(p: &EvalPoint) -> EvalPoint {
    let mut out = EvalPoint::new();
    for (k, v) in &p.assignments {
        out = out.set(k, Value::Real(v.to_f64()));
    }
    out
}

/// Exact per-order evaluation at a fixed uniform truncation.
fn eval_orders_exact(
    e: &EpsExpansion,
    point: &EvalPoint,
    n: u32,
) -> BTreeMap<i64, Rational> {
    use rayon::prelude::*;
    let mut out = BTreeMap::new();
    for (&order, terms) in &e.orders {
        let vals: Vec<Rational> = terms
            .par_iter()
            .map(|t| exact_term_value(t, point, n))
            .collect();
        let mut acc = Rational::zero();
        for v in vals {
            acc += v;
        }
        out.insert(order, acc);
    }
    out
}

fn exact_term_value(t: &Term, point: &EvalPoint, n: u32) -> Rational {
    let mut v = eval_mhf_exact(&t.mhf, point, &Truncation::Uniform(n)).unwrap();
    v *= t.coeff.coeff_at(0);
    for (var, e) in &t.monomial {
        v *= num::pow::pow(point.exact(var).unwrap().clone(), *e as usize);
    }
    v
}

fn fixed_term_value(t: &Term, point: &EvalPoint, n: u32, bits: u32) -> Rational {
    let mut v = eval_mhf_prec(&t.mhf, point, &Truncation::Uniform(n), bits).unwrap();
    v *= t.coeff.coeff_at(0);
    for (var, e) in &t.monomial {
        v *= num::pow::pow(point.exact(var).unwrap().clone(), *e as usize);
    }
    v
}

fn fixed_orders(
    e: &EpsExpansion,
    point: &EvalPoint,
    n: u32,
    bits: u32,
) -> BTreeMap<i64, Rational> {
    use rayon::prelude::*;
    let mut out = BTreeMap::new();
    for (&order, terms) in &e.orders {
        let vals: Vec<Rational> = terms
            .par_iter()
            .map(|t| fixed_term_value(t, point, n, bits))
            .collect();
        let mut acc = Rational::zero();
        for v in vals {
            acc += v;
        }
        out.insert(order, acc);
    }
    out
}

// ---------------------------------------------------------------------------
// One-variable Gauss cases
// ---------------------------------------------------------------------------

fn case_gauss_half_integer() -> (String, Vec<CheckReport>) {
    let m = single_mhf(GAUSS_HALF_INTEGER);
    let e = laurent_expand(&m, 3).unwrap();
    let point = exact_point(&[("x", "3/10")]);
    // N = 200 on the low folds; the tails of the derivative-raised folds are
    // below 0.3^32 ~ 2e-17, far under the displayed-digit tolerance
    let caps = |fold: usize| -> u32 {
        match fold {
            0..=2 => 200,
            3 => 56,
            _ => 28,
        }
    };
    let values = eval_orders(&e, &point, &caps, &Engine::Exact);
    let refs = ["127.514", "-38.7907", "610.309", "-189.456"];
    let mut checks = Vec::new();
    for (k, r) in refs.iter().enumerate() {
        checks.push(check_rel(
            &format!("eps^{k} at x=3/10"),
            values.get(&(k as i64)).copied().unwrap_or(0.0),
            r,
            5e-4,
            "hypexp",
        ));
    }
    ("N=200 (fold-graded 56/28 on raised folds)".into(), checks)
}

fn case_gauss_integer() -> (String, Vec<CheckReport>) {
    let m = single_mhf(GAUSS_INTEGER);
    let e = laurent_expand(&m, 3).unwrap();
    let point = exact_point(&[("x", "1/10")]);
    let caps = |fold: usize| -> u32 {
        match fold {
            0..=2 => 200,
            3 => 64,
            4 => 40,
            _ => 24,
        }
    };
    let values = eval_orders(&e, &point, &caps, &Engine::Float);
    let refs = ["1", "0.0057506", "0.104955", "0.0998262"];
    let mut checks = Vec::new();
    for (k, r) in refs.iter().enumerate() {
        checks.push(check_abs(
            &format!("eps^{k} at x=1/10"),
            values.get(&(k as i64)).copied().unwrap_or(0.0),
            r,
            1e-6,
            "hypexp",
        ));
    }
    ("N=200 (fold-graded on raised folds)".into(), checks)
}

// ---------------------------------------------------------------------------
// Appell F2 cases
// ---------------------------------------------------------------------------

const F2_GENERIC_ROWS: &[(u32, &[(i64, &str)])] = &[
    (25, &[
        (0, "2.4999957354567953718"),
        (1, "-1.571552060080885826"),
        (2, "2.608431603015495386"),
        (3, "-2.154453137514624822"),
    ]),
    (50, &[
        (0, "2.4999999999878756421"),
        (1, "-1.571521649284227887"),
        (2, "2.608484297358779548"),
        (3, "-2.154366138151998583"),
    ]),
    (75, &[
        (0, "2.4999999999999998268"),
        (1, "-1.571521648555953585"),
        (2, "2.608484299442436849"),
        (3, "-2.154366134071422536"),
    ]),
    (100, &[
        (0, "2.4999999999999998612"),
        (1, "-1.571521648555935119"),
        (2, "2.608484299442508257"),
    ]),
];

fn case_f2_generic() -> (String, Vec<CheckReport>) {
    let m = single_mhf(APPELL_F2_GENERIC);
    let e = taylor_expand(&m, 3).unwrap();
    let point = dbl_point(&[("x", 0.6), ("y", 0.1)]);
    let mut checks = Vec::new();
    for (n, rows) in F2_GENERIC_ROWS {
        let values = fixed_orders(&e, &point, *n, 192);
        for (order, reference) in rows.iter() {
            checks.push(check_printed(
                &format!("eps^{order} at (3/5, 1/10), N={n}"),
                values.get(order).unwrap_or(&Rational::zero()),
                reference,
                "polylogtools",
            ));
        }
    }
    ("N in {25, 50, 75, 100}, 192-bit fixed point".into(), checks)
}

const F2_INTEGER_REFS: &[(i64, &str)] = &[
    (0, "1.15717756571048779862"),
    (1, "0.04946518465764881791"),
    (2, "0.04760586648282076074"),
    (3, "0.00446404842749895002"),
];
const F2_HALF_REFS: &[(i64, &str)] = &[
    (0, "1.06740285248347457546"),
    (1, "0.02629391741162192976"),
    (2, "0.02793237719337559810"),
    (3, "0.00201506616133570612"),
];
const F2_RATIONAL_REFS: &[(i64, &str)] = &[
    (0, "1.0213175368701836808"),
    (1, "0.052073040691456863666"),
    (2, "0.28243204129337121899"),
    (3, "0.10874010942131012250"),
];

fn case_f2_set(input: &str, refs: &[(i64, &str)]) -> (String, Vec<CheckReport>) {
    let m = single_mhf(input);
    let e = taylor_expand(&m, 3).unwrap();
    let point = dbl_point(&[("x", 0.2), ("y", 0.3)]);
    let values = fixed_orders(&e, &point, 60, 192);
    let mut checks = Vec::new();
    for (order, reference) in refs {
        checks.push(check_printed(
            &format!("eps^{order} at (1/5, 3/10), N=60"),
            values.get(order).unwrap_or(&Rational::zero()),
            reference,
            "reference",
        ));
    }
    ("N=60, 192-bit fixed point".into(), checks)
}

// ---------------------------------------------------------------------------
// Appell F1 Laurent case
// ---------------------------------------------------------------------------

fn case_f1_laurent() -> (String, Vec<CheckReport>) {
    let m = single_mhf(APPELL_F1_LAURENT);
    let e = laurent_expand(&m, 1).unwrap();
    // exact rational point: the published digits carry the binary-double
    // point and summation noise of the source, covered by the relative
    // tolerance below
    let point = exact_point(&[("x", "1/10"), ("y", "1/5")]);
    let values = fixed_orders(&e, &point, 40, 192);
    let zero = Rational::zero();
    let c0 = values.get(&-1).unwrap_or(&zero).clone();
    let c1 = values.get(&0).unwrap_or(&zero).clone();
    let c2 = values.get(&1).unwrap_or(&zero).clone();
    let eps = rat(1, 1000);
    // the published decimals carry their own summation noise past ~15
    // digits (checked against an independent 60-digit evaluation), so these
    // compare relatively rather than per printed digit
    let mut checks = vec![
        check_rel_rational("C0 (coefficient of eps^-1)", &c0, "8.511583950834586989", 2e-15, "reference"),
        check_rel_rational(
            "C1*eps at eps=1e-3",
            &(&c1 * &eps),
            "0.00180071895404555128",
            2e-15,
            "reference",
        ),
        check_rel_rational(
            "C2*eps^2 at eps=1e-3",
            &(&c2 * &eps * &eps),
            "0.00001320237872566561435",
            2e-15,
            "reference",
        ),
    ];
    let series_sum = &c0 + &c1 * &eps + &c2 * &eps * &eps;
    checks.push(check_rel_rational(
        "series through eps^2 at eps=1e-3",
        &series_sum,
        "8.51339787216735821",
        2e-15,
        "reference",
    ));
    // direct evaluation of eps*F1 at eps = 1e-3
    let direct = {
        let sub = m.at_eps(&eps);
        let v = eval_mhf_exact(&sub, &point, &Truncation::Uniform(60)).unwrap();
        v * &eps
    };
    checks.push(check_rel_rational(
        "direct eps*F1 at eps=1e-3",
        &direct,
        "8.513397873773039908",
        2e-15,
        "series-vs-direct",
    ));
    let gap = rational_to_f64(&(&series_sum - &direct)).abs();
    checks.push(check_abs(
        "series vs direct (8 decimal places)",
        gap,
        "0",
        5e-9,
        "series-vs-direct",
    ));
    ("N=40 for coefficients, N=60 direct; 192-bit fixed point".into(), checks)
}

// ---------------------------------------------------------------------------
// Sunset case
// ---------------------------------------------------------------------------

struct SunsetOrders {
    /// Symbolic Laurent coefficients of the assembled combination, exact
    /// through the pole orders.
    minus2: ConstPoly,
    minus1: ConstPoly,
    zero_f64: f64,
}

fn sunset_assemble(point: &EvalPoint, n: u32) -> SunsetOrders {
    let pairs = sum_input(SUNSET);
    let mut minus2 = ConstPoly::zero();
    let mut minus1 = ConstPoly::zero();
    let mut zero = 0.0f64;
    let fp = float_point(point);
    for (prefactor, mhf) in &pairs {
        let g = prefactor_expand_symbolic(prefactor, point, 0).unwrap();
        let taylor = taylor_expand(mhf, 2).unwrap();
        // exact low orders
        let s0: Rational = {
            use rayon::prelude::*;
            let vals: Vec<Rational> = taylor
                .terms_at(0)
                .par_iter()
                .map(|t| exact_term_value(t, point, n))
                .collect();
            vals.into_iter().sum()
        };
        let s1: Rational = {
            use rayon::prelude::*;
            let vals: Vec<Rational> = taylor
                .terms_at(1)
                .par_iter()
                .map(|t| exact_term_value(t, point, n))
                .collect();
            vals.into_iter().sum()
        };
        // order-2 coefficient in doubles (enters only the finite part)
        let s2: f64 = {
            use rayon::prelude::*;
            let vals: Vec<f64> = taylor
                .terms_at(2)
                .par_iter()
                .map(|t| {
                    let base = eval_mhf_f64(&t.mhf, &fp, &Truncation::Uniform(n)).unwrap().0;
                    let mono: f64 = t
                        .monomial
                        .iter()
                        .map(|(v, e)| fp.get(v).unwrap().to_f64().powi(*e as i32))
                        .product();
                    rational_to_f64(&t.coeff.coeff_at(0)) * mono * base
                })
                .collect();
            vals.iter().sum()
        };
        minus2 = minus2.add(&g.coeff_at(-2).scale(&s0));
        minus1 = minus1.add(&g.coeff_at(-1).scale(&s0));
        minus1 = minus1.add(&g.coeff_at(-2).scale(&s1));
        zero += g.coeff_at(0).to_f64() * rational_to_f64(&s0)
            + g.coeff_at(-1).to_f64() * rational_to_f64(&s1)
            + g.coeff_at(-2).to_f64() * s2;
    }
    SunsetOrders {
        minus2,
        minus1,
        zero_f64: zero,
    }
}

fn sunset_point(p2: i64, m1: i64, m2: i64, m3: i64) -> EvalPoint {
    EvalPoint::new()
        .set_exact("z1", rat(m1, m3))
        .set_exact("z2", rat(m2, m3))
        .set_exact("z3", rat(p2, m3))
}

fn case_sunset() -> (String, Vec<CheckReport>) {
    let mut checks = Vec::new();

    // kinematic point (p2, m1^2, m2^2, m3^2) = (3, 10, 2, 100)
    let point1 = sunset_point(3, 10, 2, 100);
    let at10 = sunset_assemble(&point1, 10);
    checks.push(check_bool(
        "S^(-2) vanishes exactly after assembly",
        at10.minus2.is_zero(),
        format!("{}", at10.minus2),
        "0",
    ));
    checks.push(check_bool(
        "S^(-1) transcendental parts cancel exactly",
        at10.minus1.is_rational(),
        format!("{}", at10.minus1),
        "rational",
    ));
    let m1_mag = rational_to_f64(&at10.minus1.rational_part()).abs();
    checks.push(check_abs(
        "|S^(-1)| at N=10",
        m1_mag,
        "0",
        1.1e-9,
        "xspace-integral",
    ));
    let at20 = sunset_assemble(&point1, 20);
    let m1_mag20 = rational_to_f64(&at20.minus1.rational_part()).abs();
    checks.push(check_abs(
        "|S^(-1)| at N=20",
        m1_mag20,
        "0",
        1.2e-16,
        "xspace-integral",
    ));
    checks.push(check_abs(
        "S^(0) at N=20, point (3,10,2,100)",
        at20.zero_f64,
        "13.0801528947195",
        1e-10,
        "xspace-integral",
    ));

    // second and third kinematic points
    let at15 = sunset_assemble(&sunset_point(3, 1, 2, 100), 15);
    checks.push(check_abs(
        "S^(0) at N=15, point (3,1,2,100)",
        at15.zero_f64,
        "21.8600302323744",
        1e-10,
        "fiesta5",
    ));
    let at10b = sunset_assemble(&sunset_point(3, 1, 2, 1000), 10);
    checks.push(check_abs(
        "S^(0) at N=10, point (3,1,2,1000)",
        at10b.zero_f64,
        "46.3800201955786",
        1e-10,
        "fiesta5",
    ));

    ("N in {10, 15, 20} per check".into(), checks)
}

// ---------------------------------------------------------------------------
// 2F2 case
// ---------------------------------------------------------------------------

fn case_2f2() -> (String, Vec<CheckReport>) {
    let m = single_mhf(TWO_F_TWO);
    let e = laurent_expand(&m, 1).unwrap();
    let point = dbl_point(&[("x", 0.1)]);
    let values = fixed_orders(&e, &point, 32, 192);
    let eps = dbl(1e-4);
    let zero = Rational::zero();
    let refs: [(i64, &str); 4] = [
        (-2, "-0.07305179768480031690"),
        (-1, "-1.795147633233522925e-5"),
        (0, "7.021511837197325735e-9"),
        (1, "-1.52211510291782210e-13"),
    ];
    let mut checks = Vec::new();
    let mut series_sum = Rational::zero();
    for (order, reference) in refs {
        // C_i eps^i with C_i the coefficient at order i-2 of the function
        let c = values.get(&order).unwrap_or(&zero).clone();
        let scaled = c * num::pow::pow(eps.clone(), (order + 2) as usize);
        series_sum += &scaled;
        // published decimals are accurate to ~16 digits (independent
        // 60-digit check); compare relatively at that scale
        checks.push(check_rel_rational(
            &format!("C{} * eps^{} at eps=1e-4", order + 2, order + 2),
            &scaled,
            reference,
            5e-16,
            "reference",
        ));
    }
    // direct eps^2 2F2 at eps = 1e-4
    let direct = {
        let sub = m.at_eps(&eps);
        let v = eval_mhf_exact(&sub, &point, &Truncation::Uniform(60)).unwrap();
        v * &eps * &eps
    };
    checks.push(check_rel_rational(
        "direct eps^2 2F2 at eps=1e-4",
        &direct,
        "-0.07306974213977305910",
        5e-16,
        "series-vs-direct",
    ));
    // agreement in the 17th decimal place: the residual is the eps^4 tail
    let gap = (&series_sum - &direct).abs();
    checks.push(check_bool(
        "series sum vs direct to 17 decimal places",
        gap <= Rational::new(5.into(), num::pow::pow(num::BigInt::from(10), 17)),
        decimal_string(&gap, 20),
        "<= 5e-17 (half-unit in the 17th place)",
    ));
    ("N=32 coefficients (192-bit fixed point), N=60 direct (exact)".into(), checks)
}

// ---------------------------------------------------------------------------
// Complex-point F1 Taylor case
// ---------------------------------------------------------------------------

const F1_COMPLEX_REFS: &[(f64, f64)] = &[
    (-0.17504424807351878429, -0.05422812947330403050),
    (-0.00861885859121239314, -0.39051763820460791405),
    (0.37518853545322500566, -0.34047477405513330909),
    (0.49765461883465610385, -0.00717399489426463939),
    (0.32835724868568101641, 0.23005850008096157264),
];

fn case_f1_complex() -> (String, Vec<CheckReport>) {
    let pairs = sum_input(APPELL_F1_CONTINUED);
    // the continuation's pre-transformed variables at the published point
    let xc = Complex64::new(11.1, -1e-12);
    let yc = Complex64::new(12.1, -1e-12);
    let one = Complex64::new(1.0, 0.0);
    let u = one / (one - xc);
    let v = (xc - yc) / (xc - one);
    let point = EvalPoint::new()
        .set("u", Value::Complex(u))
        .set("v", Value::Complex(v));
    let caps = [40u32, 40, 40, 20, 10];

    // per-pair prefactor series and Taylor expansions, assembled per order
    let mut orders: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); 5];
    for (prefactor, mhf) in &pairs {
        let g = prefactor_expand_c64(prefactor, &point, 4).unwrap();
        let taylor = taylor_expand(mhf, 4).unwrap();
        // numeric S coefficients per order at the order-specific truncation
        for out_order in 0..5i64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..=out_order {
                let p = out_order - q;
                let gp = g.coeff_at(p);
                if gp.re == 0.0 && gp.im == 0.0 {
                    continue;
                }
                let n = caps[out_order as usize];
                let mut sq = Complex64::new(0.0, 0.0);
                for t in taylor.terms_at(q) {
                    let base = eval_mhf_c64(&t.mhf, &point, &Truncation::Uniform(n))
                        .unwrap()
                        .0;
                    let mono: Complex64 = t
                        .monomial
                        .iter()
                        .map(|(var, e)| point.get(var).unwrap().to_c64().powi(*e as i32))
                        .product();
                    sq += base * mono * rational_to_f64(&t.coeff.coeff_at(0));
                }
                acc += gp * sq;
            }
            orders[out_order as usize] += acc;
        }
    }

    let mut checks = Vec::new();
    for (k, (re, im)) in F1_COMPLEX_REFS.iter().enumerate() {
        let tol = if k <= 2 { 1e-8 } else { 1e-6 };
        let got = orders[k];
        checks.push(CheckReport {
            label: format!("eps^{k} at the continued complex point"),
            computed: format!("{:.12e} + {:.12e} i", got.re, got.im),
            reference: format!("{re:.20} + {im:.20} i"),
            tolerance: format!("abs {tol:.0e} per component"),
            source: "external-table".to_string(),
            passed: (got.re - re).abs() <= tol && (got.im - im).abs() <= tol,
        });
    }
    ("N=40/40/40/20/10 per order, complex doubles".into(), checks)
}

// ---------------------------------------------------------------------------
// Random-oracle and operator-equivalence cases
// ---------------------------------------------------------------------------

/// Minimal deterministic generator (splitmix64) so the random suite needs no
/// external dependency and reruns identically.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn random_taylor_mhf(rng: &mut Rng) -> MHF {
    use crate::mhf::{IndexForm, PochFactor};
    loop {
        let r = 1 + rng.below(2) as usize;
        let den_count = 1 + rng.below(2) as usize;
        let num_count = den_count + rng.below(2) as usize;
        let form = |rng: &mut Rng| loop {
            let f: Vec<i32> = (0..r).map(|_| rng.below(2) as i32).collect();
            if f.iter().any(|&e| e != 0) {
                return IndexForm(f);
            }
        };
        let mut denominator = Vec::new();
        for _ in 0..den_count {
            // keep lower parameters regular at eps = 0
            let b0 = rat(1 + rng.below(3) as i64, 1 + rng.below(2) as i64);
            let b1 = rat(rng.below(5) as i64 - 2, 1);
            denominator.push(PochFactor::new(EpsLinear::new(b0, b1), form(rng)));
        }
        let mut numerator = Vec::new();
        for _ in 0..num_count {
            let b0 = rat(1 + rng.below(4) as i64, 1 + rng.below(2) as i64);
            let b1 = rat(rng.below(5) as i64 - 2, 1);
            numerator.push(PochFactor::new(EpsLinear::new(b0, b1), form(rng)));
        }
        let vars: Vec<String> = (0..r).map(|i| format!("x{i}")).collect();
        let m = MHF::new(vars, numerator, denominator).canonical();
        // per-index balance: numerator entries must not outweigh denominator
        // entries + the implicit factorial, so the series converges at small
        // points and one parameter must actually depend on eps
        let balanced = (0..r).all(|i| {
            let nsum: i32 = m.numerator.iter().map(|f| f.form.entry(i)).sum();
            let dsum: i32 = m.denominator.iter().map(|f| f.form.entry(i)).sum();
            nsum <= dsum + 1
        });
        let eps_dep = m
            .numerator
            .iter()
            .chain(&m.denominator)
            .any(|f| !f.param.b1.is_zero());
        if balanced && eps_dep && m.fold() == r {
            return m;
        }
    }
}

fn case_oracle_random() -> (String, Vec<CheckReport>) {
    let mut rng = Rng(0x5eed_cafe_f00d_0001);
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    let mut failures = 0u32;
    for i in 0..50 {
        let m = random_taylor_mhf(&mut rng);
        let mut point = EvalPoint::new();
        for v in m.variable_names() {
            let num = 1 + rng.below(3) as i64;
            let den = 8 + rng.below(8) as i64;
            point = point.set_exact(&v, rat(num, den));
        }
        let e = taylor_expand(&m, 1).unwrap();
        let n = Truncation::Uniform(28);
        let sym: f64 = e
            .terms_at(1)
            .iter()
            .map(|t| eval_term(t, &point, &n, None).unwrap().value.to_f64())
            .sum();
        let rep = fd_oracle(&m, &point, &n, 1, 0, 1e-6).unwrap();
        let ora = rep.coefficients.get(&1).copied().unwrap_or(0.0);
        let rel = (sym - ora).abs() / ora.abs().max(1e-9);
        worst = worst.max(rel);
        if rel > 1e-6 {
            failures += 1;
            checks.push(check_rel(
                &format!("random case {i}: eps^1 symbolic vs stencil"),
                sym,
                &format!("{ora:.15e}"),
                1e-6,
                "series-vs-direct",
            ));
        }
    }
    checks.push(check_bool(
        "50 random series: first-order coefficient vs stencil oracle",
        failures == 0,
        format!("worst relative deviation {worst:.3e}"),
        "rel <= 1e-6 on all 50",
    ));

    // annihilator residual on the one-variable fixture at x = 1/4
    let f = crate::mhf::pfq(
        &[EpsLinear::from_ints(1, 0), EpsLinear::from_ints(2, 0)],
        &[EpsLinear::from_ints(4, 0)],
        "x",
    );
    let residual = annihilator_residual(&f, 0, &exact_point(&[("x", "1/4")]), 60);
    checks.push(check_abs(
        "annihilator residual at N=60, x=1/4",
        residual,
        "0",
        1e-8,
        "series-vs-direct",
    ));
    ("N=28 random suite; N=60 annihilator".into(), checks)
}

/// `|h(theta) . F / x - g(theta) . F|` on the truncated series.
pub fn annihilator_residual(m: &MHF, var_index: usize, point: &EvalPoint, n: u32) -> f64 {
    let ann = build_annihilator(m, var_index);
    let term = Term::from_mhf(m.clone());
    let shift = apply_theta_poly(&ann.shift_part, &term);
    let direct = apply_theta_poly(&ann.direct_part, &term);
    let trunc = Truncation::Uniform(n);
    let eval = |terms: &[Term]| -> f64 {
        terms
            .iter()
            .map(|t| eval_term(t, point, &trunc, None).unwrap().value.to_f64())
            .sum()
    };
    let x = point
        .get(&m.variables[var_index])
        .unwrap()
        .to_f64();
    (eval(&shift) / x - eval(&direct)).abs()
}

fn apply_theta_poly(op: &StepDownOperator, t: &Term) -> Vec<Term> {
    use crate::calculus::theta_apply;
    use crate::mhf::merge_terms;
    let mut out = Vec::new();
    for (exps, coeff) in &op.terms {
        let mut current = vec![t.clone()];
        for (slot, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                let mut next = Vec::new();
                for c in &current {
                    next.extend(theta_apply(c, &op.variables[slot], 8).unwrap());
                }
                current = next;
            }
        }
        let scale = coeff.clone();
        out.extend(current.into_iter().map(|c| c.scaled(&scale)));
    }
    merge_terms(out)
}

fn case_operator_equivalence() -> (String, Vec<CheckReport>) {
    // unreduced composed operator route
    let m = single_mhf(GAUSS_INTEGER);
    let unreduced = laurent_expand(&m, 2).unwrap();

    // the reduced operator for this function (coefficient of d/dx and the
    // multiplication part) as rational functions of x expanded in eps
    let secondary_taylor = {
        let (secondary, _) = crate::laurent::build_secondary(&m);
        taylor_expand(&secondary, 3).unwrap()
    };

    let mut checks = Vec::new();
    for x_str in ["1/10", "3/10"] {
        let point = exact_point(&[("x", x_str)]);
        let x = parse_rational(x_str).unwrap();
        let n = 60u32;

        // A(eps) = x (eps (2x-1) - x + 1) / ((eps-1) eps (x-1))
        // B(eps) = (eps (2x-1) - x + 1) / ((eps-1) (x-1))
        let lin = EpsSeries::new(
            0,
            vec![Rational::one() - &x, rat(2, 1) * &x - Rational::one()],
            crate::scalar::EXACT,
        );
        let xm1 = &x - Rational::one();
        let da = EpsSeries::new(1, vec![-xm1.clone(), xm1.clone()], crate::scalar::EXACT);
        let db = EpsSeries::new(0, vec![-xm1.clone(), xm1.clone()], crate::scalar::EXACT);
        let a = lin.scale(&x).mul(&da.recip(4).unwrap());
        let b = lin.mul(&db.recip(4).unwrap());

        // reduced route: order n = sum_{i+j=n} A_i (dG_j/dx) + B_i G_j
        let mut reduced: BTreeMap<i64, Rational> = BTreeMap::new();
        for j in 0..=3i64 {
            let terms = secondary_taylor.terms_at(j);
            if terms.is_empty() {
                continue;
            }
            let gj: Rational = terms
                .iter()
                .map(|t| exact_term_value(t, &point, n))
                .sum();
            let dgj: Rational = terms
                .iter()
                .flat_map(|t| {
                    crate::calculus::arg_derivative(t, "x", crate::scalar::EXACT).unwrap()
                })
                .map(|t| exact_term_value(&t, &point, n))
                .sum();
            for i in -1..=2i64 {
                let order = i + j;
                if !(0..=2).contains(&order) {
                    continue;
                }
                let contrib = a.coeff_at(i) * &dgj + b.coeff_at(i) * &gj;
                *reduced.entry(order).or_insert_with(Rational::zero) += contrib;
            }
        }

        let unreduced_values = eval_orders_exact(&unreduced, &point, n);
        for order in 0..=2i64 {
            let zero = Rational::zero();
            let u = unreduced_values.get(&order).unwrap_or(&zero);
            let r = reduced.get(&order).unwrap_or(&zero);
            let diff = rational_to_f64(&(u - r)).abs();
            checks.push(check_abs(
                &format!("order {order} at x={x_str}: unreduced vs reduced operator"),
                diff,
                "0",
                1e-12,
                "series-vs-direct",
            ));
        }
    }
    ("N=60, exact mode".into(), checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_inputs_parse() {
        for name in case_names() {
            if let Some(src) = fixture_source(name) {
                parse_spec(src).unwrap();
            }
        }
    }

    #[test]
    fn unknown_case_is_rejected() {
        assert!(run_verify(Some("no-such-case")).is_err());
    }

    #[test]
    fn printed_ulp_places() {
        assert_eq!(printed_ulp("1.25"), rat(1, 100));
        assert_eq!(
            printed_ulp("-1.7951e-5"),
            Rational::new(1.into(), num::pow::pow(num::BigInt::from(10), 9))
        );
    }
}
