// Temporary bug-hunt probe: oracle vs symbolic per order on small cases.

use mhfeps::numeval::oracle::fd_oracle;
use mhfeps::numeval::{eval_expansion, EvalPoint, Truncation};
use mhfeps::scalar::{rat, EpsLinear};
use mhfeps::{mhf, taylor_expand};

fn check(label: &str, m: &mhfeps::MHF, k: i64) {
    let p = EvalPoint::new().set_exact("x", rat(1, 4));
    let e = taylor_expand(m, k).unwrap();
    let vals = eval_expansion(&e, &p, &Truncation::Uniform(40)).unwrap();
    let rep = fd_oracle(m, &p, &Truncation::Uniform(40), k, 0, 1e-6).unwrap();
    println!("{label}:");
    for order in 0..=k {
        let sym = vals.get(&order).map(|v| v.value.to_f64()).unwrap_or(0.0);
        let ora = rep.coefficients.get(&order).copied().unwrap_or(0.0);
        let flag = if (sym - ora).abs() > 1e-7 * ora.abs().max(1.0) {
            "  <-- MISMATCH"
        } else {
            ""
        };
        println!("  eps^{order}: symbolic {sym:.12}  oracle {ora:.12}{flag}");
    }
}

fn main() {
    let el = EpsLinear::from_ints;

    // lower-parameter chain only
    check(
        "2F1(1,1; eps+2; x)",
        &mhf::pfq(&[el(1, 0), el(1, 0)], &[el(2, 1)], "x"),
        3,
    );
    // upper-parameter chain only
    check(
        "2F1(eps+1, 2; 3; x)",
        &mhf::pfq(&[el(1, 1), el(2, 0)], &[el(3, 0)], "x"),
        3,
    );
    // the failing case
    check(
        "2F1(2,3; eps-3/2; x)",
        &mhf::pfq(
            &[el(2, 0), el(3, 0)],
            &[EpsLinear::new(rat(-3, 2), rat(1, 1))],
            "x",
        ),
        3,
    );
}
