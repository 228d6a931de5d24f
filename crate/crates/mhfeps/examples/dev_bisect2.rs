// Temporary: per-term derivative validation via exact stencils.

use mhfeps::calculus::eps_derivative;
use mhfeps::mhf::{merge_terms, Term};
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

fn eval_terms_at_eps(ts: &[Term], point: &EvalPoint, eps: &Rational, n: u32) -> f64 {
    ts.iter()
        .map(|t| rational_to_f64(&eval_term_at_eps(t, point, eps, n)))
        .sum()
}

/// d/deps of a term list at eps0 via a central stencil (exact samples).
fn stencil_derivative(ts: &[Term], point: &EvalPoint, eps0: &Rational, n: u32) -> f64 {
    let h = rat(1, 512);
    let mut acc = 0.0;
    // 4th-order central difference
    let coefs = [(-2i64, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];
    for (k, w) in coefs {
        let e = eps0 + &h * rat(k, 1);
        acc -= w * eval_terms_at_eps(ts, point, &e, n); // note: sign fix below
    }
    -acc / rational_to_f64(&h)
}

fn main() {
    let el = EpsLinear::from_ints;
    let point = EvalPoint::new().set_exact("x", rat(1, 4));
    let eps0 = rat(1, 16);
    let n = 30u32;

    let m = mhf::pfq(&[el(1, 1), el(2, 0)], &[el(3, 0)], "x");
    let mut state = vec![Term::from_mhf(m.canonical())];
    for level in 1..=3 {
        let mut next = Vec::new();
        for t in &state {
            next.extend(eps_derivative(t, 8).unwrap());
        }
        let next = merge_terms(next);
        let direct = eval_terms_at_eps(&next, &point, &eps0, n);
        let stencil = stencil_derivative(&state, &point, &eps0, n);
        println!(
            "state {level}: {} terms, direct {direct:.12}, stencil {stencil:.12}{}",
            next.len(),
            if (direct - stencil).abs() > 1e-7 * stencil.abs().max(1.0) {
                "  <-- MISMATCH"
            } else {
                ""
            }
        );
        if (direct - stencil).abs() > 1e-7 * stencil.abs().max(1.0) {
            // bisect individual terms of the previous state
            for (i, t) in state.iter().enumerate() {
                let d = merge_terms(eps_derivative(t, 8).unwrap());
                let dv = eval_terms_at_eps(&d, &point, &eps0, n);
                let sv = stencil_derivative(std::slice::from_ref(t), &point, &eps0, n);
                if (dv - sv).abs() > 1e-7 * sv.abs().max(1e-3) {
                    println!("  term {i} WRONG: direct {dv:.12} stencil {sv:.12}");
                    println!("    {t}");
                }
            }
            break;
        }
        state = next;
    }
}
