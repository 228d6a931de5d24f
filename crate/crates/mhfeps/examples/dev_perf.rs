// Temporary perf probe: one fold-4 term evaluation.

use std::time::Instant;
use mhfeps::numeval::{eval_mhf_exact, eval_mhf_prec, EvalPoint, Truncation};
use mhfeps::scalar::{rat, EpsLinear};
use mhfeps::{laurent_expand, mhf};

fn main() {
    let el = EpsLinear::from_ints;
    let m = mhf::pfq(
        &[el(2, 0), el(3, 0)],
        &[EpsLinear::new(rat(-3, 2), rat(1, 1))],
        "x",
    );
    let e = laurent_expand(&m, 3).unwrap();
    let p = EvalPoint::new().set_exact("x", rat(3, 10));
    // pick the largest fold-4 term
    let t = e.terms_at(3).iter().find(|t| t.mhf.fold() == 4).unwrap();
    println!("term: {t}");
    for n in [20u32, 30, 40] {
        let t0 = Instant::now();
        let v = eval_mhf_exact(&t.mhf, &p, &Truncation::Uniform(n)).unwrap();
        let dt = t0.elapsed();
        let pts = ((n + 1) as f64).powi(4);
        println!(
            "exact N={n}: {:.3?} ({:.0} ns/pt), value ~ {:.6e}",
            dt,
            dt.as_secs_f64() * 1e9 / pts,
            mhfeps::scalar::rational_to_f64(&v)
        );
    }
    for (n, bits) in [(40u32, 192u32), (64, 192), (100, 192)] {
        let t0 = Instant::now();
        let v = eval_mhf_prec(&t.mhf, &p, &Truncation::Uniform(n), bits).unwrap();
        let dt = t0.elapsed();
        let pts = ((n + 1) as f64).powi(4);
        println!(
            "fixed N={n} bits={bits}: {:.3?} ({:.0} ns/pt), value ~ {:.15e}",
            dt,
            dt.as_secs_f64() * 1e9 / pts,
            mhfeps::scalar::rational_to_f64(&v)
        );
    }
}
