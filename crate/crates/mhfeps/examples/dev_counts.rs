// Temporary: expansion term counts per order/fold for the heavy fixtures.

use std::time::Instant;
use mhfeps::scalar::{rat, EpsLinear};
use mhfeps::{mhf, taylor_expand};

fn summary(label: &str, e: &mhfeps::EpsExpansion) {
    println!("{label}:");
    for (k, terms) in &e.orders {
        let mut by_fold = std::collections::BTreeMap::new();
        for t in terms {
            *by_fold.entry(t.mhf.fold()).or_insert(0) += 1;
        }
        println!("  order {k}: {} terms, by fold {:?}", terms.len(), by_fold);
    }
}

fn main() {
    let el = EpsLinear::from_ints;

    let t0 = Instant::now();
    let f2 = mhf::appell_f2(el(1, 0), el(1, 0), el(0, 1), el(1, 1), el(1, -1), "x", "y");
    let e = taylor_expand(&f2, 3).unwrap();
    summary(&format!("F2 a_i=1 ({:.2?})", t0.elapsed()), &e);

    let t0 = Instant::now();
    let f2i = mhf::appell_f2(el(1, 0), el(2, 0), el(0, 1), el(3, 1), el(4, -1), "x", "y");
    let e = taylor_expand(&f2i, 3).unwrap();
    summary(&format!("F2 integer params ({:.2?})", t0.elapsed()), &e);

    // sunset S_1 and S_4
    let half = |a: i64, b: i64| EpsLinear::new(rat(a, 1), rat(b, 1));
    let t0 = Instant::now();
    let s1 = mhf::lauricella_fc3(
        el(1, 0),
        half(1, -1),
        [half(1, -1), half(1, -1), half(1, -1)],
        ["z1", "z2", "z3"],
    );
    let e = taylor_expand(&s1, 2).unwrap();
    summary(&format!("sunset S1 ({:.2?})", t0.elapsed()), &e);

    let t0 = Instant::now();
    let s4 = mhf::lauricella_fc3(
        el(1, 2),
        half(1, 1),
        [half(1, 1), half(1, 1), half(1, -1)],
        ["z1", "z2", "z3"],
    );
    let e = taylor_expand(&s4, 2).unwrap();
    summary(&format!("sunset S4 ({:.2?})", t0.elapsed()), &e);
}
