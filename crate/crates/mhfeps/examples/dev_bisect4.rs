// Temporary: does seed coefficient truncation change the snapshot?

use mhfeps::calculus::eps_derivative;
use mhfeps::mhf::{merge_terms, set_eps_zero, Term};
use mhfeps::numeval::{eval_mhf_exact, EvalPoint, Truncation};
use mhfeps::scalar::{rat, rational_to_f64, EpsLinear, EpsSeries, Rational};
use mhfeps::mhf;
use std::collections::BTreeMap;

fn eval_term0(t: &Term, point: &EvalPoint, n: u32) -> f64 {
    let c = t.coeff.coeff_at(0);
    let mut v = eval_mhf_exact(&t.mhf, point, &Truncation::Uniform(n)).unwrap();
    v *= c;
    for (var, e) in &t.monomial {
        let x = point.exact(var).unwrap();
        v *= num::pow::pow(x.clone(), *e as usize);
    }
    rational_to_f64(&v)
}

fn run(seed_trunc: Option<i64>) -> f64 {
    let el = EpsLinear::from_ints;
    let point = EvalPoint::new().set_exact("x", rat(1, 4));
    let m = mhf::pfq(&[el(1, 1), el(2, 0)], &[el(3, 0)], "x");
    let coeff = match seed_trunc {
        Some(t) => EpsSeries::one().truncated(t),
        None => EpsSeries::one(),
    };
    let mut state = vec![Term::new(coeff, BTreeMap::new(), m.canonical())];
    for _ in 1..=3 {
        let mut next = Vec::new();
        for t in &state {
            next.extend(eps_derivative(t, 4).unwrap());
        }
        state = merge_terms(next);
    }
    let mut total = 0.0;
    for t in &state {
        if let Some(s) = set_eps_zero(t).unwrap() {
            total += eval_term0(&s, &point, 30);
        }
    }
    total / 6.0
}

fn main() {
    println!("exact seed    : {:.12}", run(None));
    println!("truncated seed: {:.12}", run(Some(4)));
    println!("want          : 0.001869336839");
}
