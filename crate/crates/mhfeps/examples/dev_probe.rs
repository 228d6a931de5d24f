// Temporary development probe; replaced by the real examples later.

use std::time::Instant;

use mhfeps::numeval::{eval_expansion, EvalPoint, Truncation};
use mhfeps::scalar::{rat, EpsLinear};
use mhfeps::{laurent_expand, mhf, taylor_expand};

fn main() {
    let el = EpsLinear::from_ints;

    // ---- Gauss half-integer: 2F1(3,2; eps-3/2; x) at x = 3/10
    let t0 = Instant::now();
    let m = mhf::pfq(
        &[el(2, 0), el(3, 0)],
        &[EpsLinear::new(rat(-3, 2), rat(1, 1))],
        "x",
    );
    let e = laurent_expand(&m, 3).unwrap();
    println!("half-integer expansion: {:?} terms, {:.2?}", e.term_count(), t0.elapsed());
    for (k, terms) in &e.orders {
        let folds: Vec<usize> = terms.iter().map(|t| t.mhf.fold()).collect();
        println!("  order {k}: {} terms, folds {:?}", terms.len(), folds);
    }
    let p = EvalPoint::new().set_exact("x", rat(3, 10));
    for n in [40u32, 64] {
        let t1 = Instant::now();
        let vals = eval_expansion(&e, &p, &Truncation::Uniform(n)).unwrap();
        print!("  N={n}: ");
        for (k, v) in &vals {
            print!("eps^{k}: {:.6}  ", v.value.to_f64());
        }
        println!("({:.2?})", t1.elapsed());
    }
    println!("  want: 127.514, -38.7907, 610.309, -189.456");

    // ---- Gauss integer Laurent: 2F1(eps,-eps; eps-1; x) at x = 1/10
    let t0 = Instant::now();
    let m = mhf::pfq(
        &[EpsLinear::eps(), EpsLinear::new(rat(0, 1), rat(-1, 1))],
        &[el(-1, 1)],
        "x",
    );
    let e = laurent_expand(&m, 3).unwrap();
    println!("gauss laurent: {} terms, {:.2?}", e.term_count(), t0.elapsed());
    for (k, terms) in &e.orders {
        let folds: Vec<usize> = terms.iter().map(|t| t.mhf.fold()).collect();
        println!("  order {k}: {} terms, max fold {:?}", terms.len(), folds.iter().max());
    }
    let p = EvalPoint::new().set_exact("x", rat(1, 10));
    let t1 = Instant::now();
    let vals = eval_expansion(&e, &p, &Truncation::Uniform(32)).unwrap();
    for (k, v) in &vals {
        println!("  order {k}: {:.7}", v.value.to_f64());
    }
    println!("  want: 1, 0.0057506, 0.104955, 0.0998262  ({:.2?})", t1.elapsed());

    // ---- F2(1,1,eps; 1+eps, 1-eps; 0.6, 0.1) orders 0..1
    let t0 = Instant::now();
    let m = mhf::appell_f2(el(1, 0), el(1, 0), el(0, 1), el(1, 1), el(1, -1), "x", "y");
    let e = taylor_expand(&m, 3).unwrap();
    println!("appell f2 a_i=1: {} terms, {:.2?}", e.term_count(), t0.elapsed());
    for (k, terms) in &e.orders {
        let folds: Vec<usize> = terms.iter().map(|t| t.mhf.fold()).collect();
        println!("  order {k}: {} terms, folds {:?}", terms.len(), folds);
    }
    let p = EvalPoint::new()
        .set_exact("x", rat(3, 5))
        .set_exact("y", rat(1, 10));
    for n in [25u32, 50] {
        let t1 = Instant::now();
        let vals = eval_expansion(&e, &p, &Truncation::Uniform(n)).unwrap();
        print!("  N={n}: ");
        for (k, v) in &vals {
            print!("eps^{k}: {:.12}  ", v.value.to_f64());
        }
        println!("({:.2?})", t1.elapsed());
    }
    println!("  want N=50: 2.4999999999878756421, -1.571521649284227887, 2.608484297358779548, -2.154366138151998583");
}
