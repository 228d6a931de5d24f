//! Independent series-coefficient oracle: direct evaluation at a stencil of
//! small rational eps values plus exact polynomial fitting.
//!
//! `eps^d F(eps)` is sampled at distinct rational stencil points and
//! interpolated by exact Newton divided differences; monomial coefficients of
//! the interpolant estimate the Laurent coefficients of `F` from order `-d`
//! up. Everything down to the fit runs in exact arithmetic, so the only error
//! is truncation of the genuine series -- which shrinks with the stencil
//! spread. This path shares nothing with the symbolic expansion engine except
//! direct summation, which is what makes it a useful cross-check.

use std::collections::BTreeMap;

use num::traits::{One, Zero};

use crate::mhf::MHF;
use crate::numeval::{eval_mhf_exact, EvalError, EvalPoint, Truncation};
use crate::scalar::{rat, rational_to_f64, Rational};

/// Result of a stencil fit.
#[derive(Debug, Clone)]
pub struct OracleReport {
    /// Fitted coefficient per eps order, from `-pole_depth` through `orders`.
    pub coefficients: BTreeMap<i64, f64>,
    /// Magnitude of the highest-order divided difference relative to the
    /// largest fitted coefficient: a proxy for fit instability.
    pub residual: f64,
    /// Set when `residual` exceeds the tolerance passed to the fit.
    pub ill_conditioned: bool,
}

/// Fits the eps-series coefficients of an MHF by direct evaluation at small
/// rational eps values. `orders` is the highest order wanted; `pole_depth`
/// bounds the pole (the fit runs on `eps^pole_depth * F`).
pub fn fd_oracle(
    m: &MHF,
    point: &EvalPoint,
    trunc: &Truncation,
    orders: i64,
    pole_depth: i64,
    tolerance: f64,
) -> Result<OracleReport, EvalError> {
    let degree = (orders + pole_depth).max(0) as usize;
    // symmetric stencil with extra points: exact samples have no noise floor,
    // so more points only sharpen the fit
    let n_points = degree + 6;
    let h = rat(1, 64);
    let mut stencil: Vec<Rational> = Vec::with_capacity(n_points);
    for j in 0.. {
        if stencil.len() >= n_points {
            break;
        }
        let s = &h * rat(j + 1, 1) / rat((n_points as i64 + 1) / 2 + 1, 1);
        stencil.push(s.clone());
        if stencil.len() < n_points {
            stencil.push(-s);
        }
    }

    // samples of eps^d F(eps)
    let mut samples: Vec<(Rational, Rational)> = Vec::with_capacity(n_points);
    for e in &stencil {
        let sub = m.at_eps(e);
        let v = eval_mhf_exact(&sub, point, trunc)?;
        let scale = if pole_depth >= 0 {
            num::pow::pow(e.clone(), pole_depth as usize)
        } else {
            Rational::one() / num::pow::pow(e.clone(), (-pole_depth) as usize)
        };
        samples.push((e.clone(), v * scale));
    }

    let coeffs = newton_fit(&samples);
    let mut out = BTreeMap::new();
    let mut max_mag = 0.0f64;
    for k in 0..=degree {
        let order = k as i64 - pole_depth;
        if order > orders {
            break;
        }
        let c = rational_to_f64(&coeffs[k]);
        max_mag = max_mag.max(c.abs());
        out.insert(order, c);
    }
    // instability proxy: top coefficient scaled by the stencil spread
    let top = rational_to_f64(coeffs.last().unwrap_or(&Rational::zero()));
    let spread = rational_to_f64(&h);
    let residual = (top * spread.powi(degree as i32 + 1)).abs() / max_mag.max(f64::MIN_POSITIVE);
    Ok(OracleReport {
        coefficients: out,
        residual,
        ill_conditioned: residual > tolerance,
    })
}

/// Exact Newton interpolation through the samples, expanded to monomial
/// coefficients (constant term first).
fn newton_fit(samples: &[(Rational, Rational)]) -> Vec<Rational> {
    let n = samples.len();
    // divided-difference table
    let mut dd: Vec<Rational> = samples.iter().map(|(_, v)| v.clone()).collect();
    let xs: Vec<Rational> = samples.iter().map(|(x, _)| x.clone()).collect();
    let mut coeffs: Vec<Rational> = Vec::with_capacity(n);
    coeffs.push(dd[0].clone());
    for level in 1..n {
        for i in 0..(n - level) {
            let num = &dd[i + 1] - &dd[i];
            let den = &xs[i + level] - &xs[i];
            dd[i] = num / den;
        }
        dd.truncate(n - level);
        coeffs.push(dd[0].clone());
    }
    // expand the Newton form into monomial coefficients
    let mut monomial = vec![Rational::zero(); n];
    let mut basis = vec![Rational::zero(); n]; // prod (x - x_i), coefficients
    basis[0] = Rational::one();
    let mut basis_len = 1;
    for (k, c) in coeffs.iter().enumerate() {
        for (i, b) in basis.iter().take(basis_len).enumerate() {
            monomial[i] += c * b;
        }
        if k + 1 < n {
            // basis *= (x - x_k)
            let xk = xs[k].clone();
            let mut next = vec![Rational::zero(); basis_len + 1];
            for i in 0..basis_len {
                next[i + 1] += &basis[i];
                next[i] -= &basis[i] * &xk;
            }
            basis_len += 1;
            basis[..basis_len].clone_from_slice(&next);
        }
    }
    monomial
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mhf::pfq;
    use crate::scalar::EpsLinear;

    #[test]
    fn newton_fit_recovers_polynomial() {
        // p(x) = 3 - 2x + x^3 sampled exactly
        let p = |x: &Rational| rat(3, 1) - rat(2, 1) * x + x * x * x;
        let xs = [rat(1, 10), rat(-1, 10), rat(1, 5), rat(-1, 5), rat(3, 10)];
        let samples: Vec<(Rational, Rational)> =
            xs.iter().map(|x| (x.clone(), p(x))).collect();
        let c = newton_fit(&samples);
        assert_eq!(c[0], rat(3, 1));
        assert_eq!(c[1], rat(-2, 1));
        assert_eq!(c[2], rat(0, 1));
        assert_eq!(c[3], rat(1, 1));
    }

    #[test]
    fn oracle_on_eps_free_function() {
        // eps-independent MHF: order 0 equals the direct value, others ~ 0
        let m = pfq(
            &[EpsLinear::from_ints(1, 0), EpsLinear::from_ints(2, 0)],
            &[EpsLinear::from_ints(3, 0)],
            "x",
        );
        let p = EvalPoint::new().set_exact("x", rat(1, 5));
        let rep = fd_oracle(&m, &p, &Truncation::Uniform(40), 2, 0, 1e-6).unwrap();
        let direct = eval_mhf_exact(&m, &p, &Truncation::Uniform(40)).unwrap();
        assert!((rep.coefficients[&0] - rational_to_f64(&direct)).abs() < 1e-12);
        assert!(rep.coefficients[&1].abs() < 1e-12);
        assert!(rep.coefficients[&2].abs() < 1e-12);
    }

    #[test]
    fn oracle_dilogarithm_coefficient() {
        // 2F1(eps, -eps; eps+1; x): the eps^2 coefficient at x = 1/10 is
        // -Li2(1/10), with Li2(x) = sum x^k / k^2 as the stated oracle
        let m = pfq(
            &[EpsLinear::eps(), EpsLinear::new(rat(0, 1), rat(-1, 1))],
            &[EpsLinear::from_ints(1, 1)],
            "x",
        );
        let p = EvalPoint::new().set_exact("x", rat(1, 10));
        let rep = fd_oracle(&m, &p, &Truncation::Uniform(60), 2, 0, 1e-6).unwrap();
        let li2: f64 = (1..60).map(|k| 0.1f64.powi(k) / (k * k) as f64).sum();
        assert!(
            (rep.coefficients[&2] + li2).abs() < 1e-9,
            "got {} want {}",
            rep.coefficients[&2],
            -li2
        );
        assert!((rep.coefficients[&0] - 1.0).abs() < 1e-12);
        assert!(rep.coefficients[&1].abs() < 1e-10);
    }
}
