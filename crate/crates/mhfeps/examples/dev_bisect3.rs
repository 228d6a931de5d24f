// Temporary: term-by-term comparison of the eps->0 snapshot vs the limit.

use mhfeps::calculus::eps_derivative;
use mhfeps::mhf::{merge_terms, set_eps_zero, Term};
use mhfeps::numeval::{eval_mhf_exact, EvalPoint, Truncation};
use mhfeps::scalar::{rat, rational_to_f64, EpsLinear, Rational};
use mhfeps::mhf;

fn eval_term_at_eps(t: &Term, point: &EvalPoint, eps: &Rational, n: u32) -> Rational {
    let c = t.coeff.eval_at(eps);
    let mut v = eval_mhf_exact(&t.mhf.at_eps(eps), point, &Truncation::Uniform(n)).unwrap();
    v *= c;
    for (var, e) in &t.monomial {
        let x = point.exact(var).unwrap();
        v *= num::pow::pow(x.clone(), *e as usize);
    }
    v
}

fn main() {
    let el = EpsLinear::from_ints;
    let point = EvalPoint::new().set_exact("x", rat(1, 4));
    let n = 30u32;
    let trunc = 4i64; // as taylor_expand(k=3) uses

    let m = mhf::pfq(&[el(1, 1), el(2, 0)], &[el(3, 0)], "x");
    let mut state = vec![Term::from_mhf(m.canonical())];
    for _ in 1..=3 {
        let mut next = Vec::new();
        for t in &state {
            next.extend(eps_derivative(t, trunc).unwrap());
        }
        state = merge_terms(next);
    }
    println!("{} terms at state 3", state.len());
    let mut total_snapshot = 0.0;
    let mut total_limit = 0.0;
    for (i, t) in state.iter().enumerate() {
        let snap = match set_eps_zero(t).unwrap() {
            Some(s) => rational_to_f64(&eval_term_at_eps(&s, &point, &rat(0, 1), n)),
            None => 0.0,
        };
        // Richardson limit from eps = 1/256 and 1/512
        let v1 = rational_to_f64(&eval_term_at_eps(t, &point, &rat(1, 256), n));
        let v2 = rational_to_f64(&eval_term_at_eps(t, &point, &rat(1, 512), n));
        let limit = 2.0 * v2 - v1;
        total_snapshot += snap;
        total_limit += limit;
        if (snap - limit).abs() > 5e-5 * limit.abs().max(1e-2) {
            println!("term {i}: snapshot {snap:.9} limit {limit:.9}   <-- SUSPECT");
            println!("   {t}");
        }
    }
    println!("total snapshot {total_snapshot:.9} vs limit {total_limit:.9} (want 6*0.001869336839 = 0.011216021)");
}
