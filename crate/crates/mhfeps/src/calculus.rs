//! The Taylor-expansion engine: Pochhammer parameter derivatives, the
//! fold-raising index reshuffle, eps-derivatives by the chain rule, argument
//! derivatives, and Euler-operator action.
//!
//! The central rewrite turns the parameter derivative of an `r`-fold series
//! into `(r+1)`-fold series over the same variables. For a numerator factor
//! `(a)_n` with a single summation index `n`, differentiating with respect to
//! `a` inserts the finite sum `sum_{k<n} 1/(a+k)`, and shifting `n -> n+k+1`
//! frees the new index `k`:
//!
//! ```text
//!   sum_n B(n) x^n/n! d/da (a)_n
//!     = x sum_{n,k} B(n+k+1) (1)_k (1)_n (a)_k (a+1)_{k+n}
//!                   / ((a+1)_k (2)_{k+n}) x^n x^k / (k! n!)
//! ```
//!
//! Multi-index forms `(a)_{m_1+...+m_s}` split the finite sum at each index
//! boundary; the piece shifting `m_j` carries a prefix form `P` (the indices
//! before `j`) through the auxiliary ratio `(a)_{P+k} / (a+1)_{P+k}`.
//! Denominator parameters go through the quotient rule and the same
//! reshuffle, picking up `-1/a^2` and swapping the auxiliary ratio's sides.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Zero};
use thiserror::Error;

use crate::laurent::{classify_singular, Classification};
use crate::mhf::{
    merge_terms, set_eps_zero, shift_split, IndexForm, MHF, PochFactor, RewriteError, Side, Term,
};
use crate::scalar::{rat, EpsSeries, Rational, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("a lower parameter is singular at the expansion point; route through the Laurent pipeline")]
    SingularLower,
}

// ---------------------------------------------------------------------------
// EpsExpansion
// ---------------------------------------------------------------------------

/// Map from eps order (possibly negative) to the canonical term list of that
/// coefficient. Absent orders are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsExpansion {
    pub orders: BTreeMap<i64, Vec<Term>>,
    /// Exclusive upper bound on the computed orders.
    pub truncation: i64,
}

impl EpsExpansion {
    pub fn new(truncation: i64) -> Self {
        EpsExpansion {
            orders: BTreeMap::new(),
            truncation,
        }
    }

    pub fn insert(&mut self, order: i64, terms: Vec<Term>) {
        let merged = merge_terms(terms);
        if !merged.is_empty() {
            self.orders.insert(order, merged);
        }
    }

    pub fn terms_at(&self, order: i64) -> &[Term] {
        self.orders.get(&order).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Lowest order carrying a nonzero coefficient, if any.
    pub fn leading_order(&self) -> Option<i64> {
        self.orders.keys().next().copied()
    }

    /// Total number of terms across all orders.
    pub fn term_count(&self) -> usize {
        self.orders.values().map(Vec::len).sum()
    }
}

impl fmt::Display for EpsExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (order, terms) in &self.orders {
            writeln!(f, "eps^{order}:")?;
            for t in terms {
                writeln!(f, "  {t}")?;
            }
        }
        write!(f, "O(eps^{})", self.truncation)
    }
}

// ---------------------------------------------------------------------------
// Parameter derivative
// ---------------------------------------------------------------------------

/// Inner-sum description of `d(a)_n / da`: the factor `(a)_n / a` together
/// with the auxiliary ratio `(a)_k / (a+1)_k` running over a fresh index `k`.
/// This is the pre-reshuffle shape; [`mhf_param_derivative`] consumes it.
#[derive(Debug, Clone)]
pub struct PochDerivative {
    /// The differentiated factor, untouched.
    pub factor: PochFactor,
    /// Numerator of the auxiliary ratio over the fresh index.
    pub ratio_numerator: PochFactor,
    /// Denominator of the auxiliary ratio over the fresh index.
    pub ratio_denominator: PochFactor,
}

/// Derivative description for a factor `(a)_n` with `n` a single nonnegative
/// index: `d(a)_n/da = (a)_n (1/a) sum_{k<n} (a)_k/(a+1)_k`. The `1/a` is
/// left symbolic; it cancels against `(a)_{n+k+1} = a (a+1)_{n+k}` during the
/// reshuffle, so vanishing upper parameters pose no hazard.
pub fn poch_derivative_series(f: &PochFactor) -> PochDerivative {
    let fresh = IndexForm(vec![1]); // single-entry stand-in for the new index
    PochDerivative {
        factor: f.clone(),
        ratio_numerator: PochFactor::new(f.param.clone(), fresh.clone()),
        ratio_denominator: PochFactor::new(f.param.shifted(1), fresh),
    }
}

/// A specific Pochhammer occurrence inside an MHF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub side: Side,
    pub index: usize,
}

/// Differentiates one parameter occurrence of a term's MHF with respect to
/// that parameter, returning terms whose MHFs have one extra summation fold
/// (the reshuffled representation). `trunc` bounds auxiliary scalar series.
pub fn mhf_param_derivative(
    t: &Term,
    which: Occurrence,
    trunc: i64,
) -> Result<Vec<Term>, CalculusError> {
    let mhf = &t.mhf;
    let r = mhf.fold();
    let target = mhf.factor(which.side, which.index);
    if !target.form.is_unit_like() || target.form.0.iter().all(|&e| e == 0) {
        return Err(RewriteError::NotNormalized(format!("{target}")).into());
    }
    let support = target.form.support();
    let mut out = Vec::new();

    // one piece per support index, carrying the prefix of earlier ones
    for (piece, &j) in support.iter().enumerate() {
        let prefix: Vec<usize> = support[..piece].to_vec();
        let new_var = mhf.variables[j].clone();
        let mut variables = mhf.variables.clone();
        variables.push(new_var.clone());

        let mut coeff = t.coeff.clone();
        let mut numerator: Vec<PochFactor> = Vec::new();
        let mut denominator: Vec<PochFactor> = Vec::new();

        // helper: extend a form with the new index entry
        let ext = |form: &IndexForm, new_entry: i32| form.extended(&[new_entry]);

        // carry every other factor through the shift m_j -> m_j + k + 1
        let mut shift_err: Option<CalculusError> = None;
        let mut carry = |side: Side,
                         f: &PochFactor,
                         coeff: &mut EpsSeries,
                         numerator: &mut Vec<PochFactor>,
                         denominator: &mut Vec<PochFactor>| {
            let w = f.form.entry(j);
            if w == 0 {
                let g = PochFactor::new(f.param.clone(), ext(&f.form, 0));
                match side {
                    Side::Numerator => numerator.push(g),
                    Side::Denominator => denominator.push(g),
                }
                return;
            }
            // form gains w at the new slot plus the constant shift w
            let extended = PochFactor::new(f.param.clone(), ext(&f.form, w));
            match shift_split(&extended, w as i64, trunc) {
                Ok((scalar, residual)) => match side {
                    Side::Numerator => {
                        *coeff = coeff.mul(&scalar);
                        numerator.push(residual);
                    }
                    Side::Denominator => match scalar.recip(trunc) {
                        Ok(inv) => {
                            *coeff = coeff.mul(&inv);
                            denominator.push(residual);
                        }
                        Err(e) => shift_err = Some(e.into()),
                    },
                },
                Err(e) => shift_err = Some(e.into()),
            }
        };

        for (side, idx) in mhf.occurrences() {
            if side == which.side && idx == which.index {
                continue;
            }
            carry(side, mhf.factor(side, idx), &mut coeff, &mut numerator, &mut denominator);
        }
        if let Some(e) = shift_err {
            return Err(e);
        }

        // the differentiated factor itself: (a)_{L + k + 1} with the 1/a of the
        // harmonic rewrite cancelled against the constant split
        let a = &target.param;
        let shifted_form = ext(&target.form, 1);
        let prefix_form = {
            let mut v = vec![0i32; r];
            for &p in &prefix {
                v[p] = 1;
            }
            IndexForm(v).extended(&[1])
        };
        match which.side {
            Side::Numerator => {
                // net: (a+1)_{L+k} in the numerator, ratio (a)_{P+k}/(a+1)_{P+k}
                numerator.push(PochFactor::new(a.shifted(1), shifted_form));
                numerator.push(PochFactor::new(a.clone(), prefix_form.clone()));
                denominator.push(PochFactor::new(a.shifted(1), prefix_form));
            }
            Side::Denominator => {
                // quotient rule: -1/a^2, 1/(a+1)_{L+k}, ratio (a)_{P+k}/(a+1)_{P+k}
                let inv = a.as_series().recip(trunc)?;
                coeff = coeff.mul(&inv).mul(&inv).neg();
                denominator.push(PochFactor::new(a.shifted(1), shifted_form));
                numerator.push(PochFactor::new(a.clone(), prefix_form.clone()));
                denominator.push(PochFactor::new(a.shifted(1), prefix_form));
            }
        }

        // factorial bookkeeping of the shift: x * (1)_j (1)_k / (2)_{j+k}
        let mut unit_j = vec![0i32; r];
        unit_j[j] = 1;
        let ones = Rational::one();
        numerator.push(PochFactor::new(
            crate::scalar::EpsLinear::constant(ones.clone()),
            IndexForm(unit_j.clone()).extended(&[0]),
        ));
        numerator.push(PochFactor::new(
            crate::scalar::EpsLinear::constant(ones),
            IndexForm(vec![0; r]).extended(&[1]),
        ));
        denominator.push(PochFactor::new(
            crate::scalar::EpsLinear::constant(rat(2, 1)),
            IndexForm(unit_j).extended(&[1]),
        ));

        let mut monomial = t.monomial.clone();
        *monomial.entry(new_var).or_insert(0) += 1;

        out.push(Term::new(
            coeff,
            monomial,
            MHF {
                variables,
                numerator,
                denominator,
            },
        ));
    }
    Ok(out)
}

/// Full eps-derivative of a term: the chain rule over every eps-dependent
/// parameter occurrence (`B1` times the parameter derivative) plus the
/// derivative of the term's own coefficient series.
pub fn eps_derivative(t: &Term, trunc: i64) -> Result<Vec<Term>, CalculusError> {
    let mut out = Vec::new();
    let dc = t.coeff.derivative();
    if !dc.is_zero() {
        out.push(Term::new(dc, t.monomial.clone(), t.mhf.clone()));
    }
    for (side, idx) in t.mhf.occurrences() {
        let f = t.mhf.factor(side, idx);
        if f.param.b1.is_zero() || f.form.is_zero() {
            continue;
        }
        let b1 = f.param.b1.clone();
        for d in mhf_param_derivative(t, Occurrence { side, index: idx }, trunc)? {
            out.push(d.scaled(&EpsSeries::constant(b1.clone())));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Taylor expansion
// ---------------------------------------------------------------------------

/// Taylor-expands an MHF around `eps = 0` through order `k` inclusive.
/// Every lower parameter must be regular at the origin.
pub fn taylor_expand(m: &MHF, k: i64) -> Result<EpsExpansion, CalculusError> {
    if let Classification::PossiblyLaurent(_) = classify_singular(m) {
        return Err(CalculusError::SingularLower);
    }
    taylor_expand_terms(&[Term::from_mhf(m.canonical())], k)
}

/// Taylor-expands a linear combination of terms (shared machinery for the
/// secondary-function route and prefactor-carrying inputs).
pub fn taylor_expand_terms(seed: &[Term], k: i64) -> Result<EpsExpansion, CalculusError> {
    let trunc = k + 1;
    let mut expansion = EpsExpansion::new(trunc);
    let mut state: Vec<Term> = seed
        .iter()
        .map(|t| Term::new(t.coeff.truncated(trunc), t.monomial.clone(), t.mhf.canonical()))
        .collect();
    let mut factorial = Rational::one();
    for order in 0..=k {
        if order > 0 {
            let mut next = Vec::new();
            for t in &state {
                next.extend(eps_derivative(t, trunc)?);
            }
            state = merge_terms(next);
            factorial *= rat(order, 1);
        }
        let mut snapshot = Vec::new();
        for t in &state {
            if let Some(s) = set_eps_zero(t)? {
                snapshot.push(s);
            }
        }
        if !snapshot.is_empty() {
            let inv = Rational::one() / &factorial;
            let scaled = snapshot
                .into_iter()
                .map(|t| t.scaled(&EpsSeries::constant(inv.clone())))
                .collect();
            expansion.insert(order, scaled);
        }
    }
    Ok(expansion)
}

// ---------------------------------------------------------------------------
// Argument derivatives and the Euler operator
// ---------------------------------------------------------------------------

/// Derivative of a term with respect to a variable's value: product rule over
/// the monomial prefactor plus the index shift `n -> n+1` on every summation
/// index bound to that variable.
pub fn arg_derivative(t: &Term, var: &str, trunc: i64) -> Result<Vec<Term>, CalculusError> {
    let mut out = Vec::new();
    let e = t.exponent(var);
    if e > 0 {
        out.push(
            t.with_monomial_delta(var, -1)
                .scaled(&EpsSeries::constant(rat(e as i64, 1))),
        );
    }
    for j in 0..t.mhf.fold() {
        if t.mhf.variables[j] != var {
            continue;
        }
        out.push(shifted_at_index(t, j, trunc)?);
    }
    Ok(out)
}

/// The series with index `j` shifted by one (`sum B(m+1) x^m/m!`); the
/// implicit per-index factorial absorbs the shift.
fn shifted_at_index(t: &Term, j: usize, trunc: i64) -> Result<Term, CalculusError> {
    let mut coeff = t.coeff.clone();
    let mut numerator = Vec::with_capacity(t.mhf.numerator.len());
    let mut denominator = Vec::with_capacity(t.mhf.denominator.len());
    for (side, idx) in t.mhf.occurrences() {
        let f = t.mhf.factor(side, idx);
        let w = f.form.entry(j);
        if w == 0 {
            match side {
                Side::Numerator => numerator.push(f.clone()),
                Side::Denominator => denominator.push(f.clone()),
            }
            continue;
        }
        let (scalar, residual) = shift_split(f, w as i64, trunc)?;
        match side {
            Side::Numerator => {
                coeff = coeff.mul(&scalar);
                numerator.push(residual);
            }
            Side::Denominator => {
                coeff = coeff.mul(&scalar.recip(trunc)?);
                denominator.push(residual);
            }
        }
    }
    Ok(Term::new(
        coeff,
        t.monomial.clone(),
        MHF {
            variables: t.mhf.variables.clone(),
            numerator,
            denominator,
        },
    ))
}

/// Euler operator `theta = x d/dx` on a term: the monomial exponent times the
/// term, plus `x` times the argument derivative. Fold count is unchanged.
pub fn theta_apply(t: &Term, var: &str, trunc: i64) -> Result<Vec<Term>, CalculusError> {
    let mut out = Vec::new();
    let e = t.exponent(var);
    if e > 0 {
        out.push(t.scaled(&EpsSeries::constant(rat(e as i64, 1))));
    }
    for j in 0..t.mhf.fold() {
        if t.mhf.variables[j] != var {
            continue;
        }
        out.push(shifted_at_index(t, j, trunc)?.with_monomial_delta(var, 1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mhf::pfq;
    use crate::scalar::{EpsLinear, EXACT};

    fn el(b0: i64, b1: i64) -> EpsLinear {
        EpsLinear::from_ints(b0, b1)
    }

    #[test]
    fn poch_derivative_harmonic_sum() {
        // d(2eps+1)_m/deps at eps=0, m=3: 2 * (1)_3 * (1 + 1/2 + 1/3) = 22,
        // evaluated through the inner-sum representation
        let f = PochFactor::new(EpsLinear::from_ints(1, 2), IndexForm(vec![1]));
        let d = poch_derivative_series(&f);
        // (a)_m * (1/a) * sum_{k<m} (a)_k/(a+1)_k at a=1, m=3
        let a = rat(1, 1);
        let mut inner = Rational::zero();
        for k in 0..3i64 {
            let num = crate::mhf::constant_pochhammer(&EpsLinear::constant(a.clone()), k, 4)
                .unwrap()
                .coeff_at(0);
            let den = crate::mhf::constant_pochhammer(&d.ratio_denominator.param, k, 4)
                .unwrap()
                .coeff_at(0);
            inner += num / den;
        }
        let poch3 = crate::mhf::constant_pochhammer(&EpsLinear::constant(a.clone()), 3, 4)
            .unwrap()
            .coeff_at(0);
        let value = rat(2, 1) * poch3 * (Rational::one() / a) * inner;
        assert_eq!(value, rat(22, 1));
    }

    #[test]
    fn derivative_of_eps_free_term_is_empty() {
        let m = pfq(&[el(1, 0), el(2, 0)], &[el(3, 0)], "x");
        let d = eps_derivative(&Term::from_mhf(m), 4).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn coefficient_product_rule() {
        // d/deps (eps * F) = F + eps * dF/deps; with F eps-free only the first
        // survives
        let m = pfq(&[el(1, 0)], &[el(2, 0)], "x");
        let t = Term::new(
            EpsSeries::monomial(Rational::one(), 1),
            BTreeMap::new(),
            m.clone(),
        );
        let d = eps_derivative(&t, 4).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].coeff, EpsSeries::one());
        assert_eq!(d[0].mhf, m);
    }

    #[test]
    fn fold_grows_by_one() {
        let m = pfq(&[EpsLinear::eps(), el(2, 0)], &[el(3, 0)], "x");
        let t = Term::from_mhf(m);
        let d = mhf_param_derivative(
            &t,
            Occurrence {
                side: Side::Numerator,
                index: 0,
            },
            4,
        )
        .unwrap();
        assert!(!d.is_empty());
        for term in &d {
            assert_eq!(term.mhf.fold(), 2);
            // variable closure: only original names
            for v in &term.mhf.variables {
                assert_eq!(v, "x");
            }
        }
    }

    #[test]
    fn taylor_of_eps_free_is_itself() {
        let m = pfq(&[el(1, 0), el(2, 0)], &[el(3, 0)], "x");
        let e = taylor_expand(&m, 3).unwrap();
        assert_eq!(e.terms_at(0).len(), 1);
        assert_eq!(e.terms_at(0)[0].mhf, m.canonical());
        for k in 1..=3 {
            assert!(e.terms_at(k).is_empty());
        }
    }

    #[test]
    fn gauss_taylor_structural() {
        // 2F1(eps, -eps; eps+1; x): orders 0..2 are {1, 0, -x 3F2(1,1,1;2,2;x)}
        let m = pfq(
            &[EpsLinear::eps(), EpsLinear::new(rat(0, 1), rat(-1, 1))],
            &[el(1, 1)],
            "x",
        );
        let e = taylor_expand(&m, 2).unwrap();

        let o0 = e.terms_at(0);
        assert_eq!(o0.len(), 1);
        assert_eq!(o0[0].mhf, MHF::constant());
        assert_eq!(o0[0].coeff, EpsSeries::one());

        assert!(e.terms_at(1).is_empty());

        let o2 = e.terms_at(2);
        assert_eq!(o2.len(), 1, "order 2 should merge into a single term: {o2:?}");
        let expected = pfq(&[el(1, 0), el(1, 0), el(1, 0)], &[el(2, 0), el(2, 0)], "x").canonical();
        assert_eq!(o2[0].mhf, expected);
        assert_eq!(o2[0].coeff, EpsSeries::constant(rat(-1, 1)));
        assert_eq!(o2[0].exponent("x"), 1);
    }

    #[test]
    fn taylor_linearity_is_exact() {
        // taylor(c1 F1 + c2 F2) = c1 taylor(F1) + c2 taylor(F2)
        let f1 = pfq(&[EpsLinear::eps(), el(2, 0)], &[el(1, 1)], "x");
        let f2 = pfq(&[el(1, -1), el(3, 0)], &[el(2, 1)], "x");
        let c1 = EpsSeries::constant(rat(3, 7));
        let c2 = EpsSeries::constant(rat(-2, 5));
        let combined = taylor_expand_terms(
            &[
                Term::from_mhf(f1.clone()).scaled(&c1),
                Term::from_mhf(f2.clone()).scaled(&c2),
            ],
            2,
        )
        .unwrap();
        let e1 = taylor_expand(&f1, 2).unwrap();
        let e2 = taylor_expand(&f2, 2).unwrap();
        for k in 0..=2 {
            let mut expect: Vec<Term> = e1.terms_at(k).iter().map(|t| t.scaled(&c1)).collect();
            expect.extend(e2.terms_at(k).iter().map(|t| t.scaled(&c2)));
            assert_eq!(combined.terms_at(k), merge_terms(expect).as_slice());
        }
    }

    #[test]
    fn permuted_factor_order_gives_same_expansion() {
        let m = pfq(&[EpsLinear::eps(), el(2, -1)], &[el(1, 2)], "x");
        let mut permuted = m.clone();
        permuted.numerator.reverse();
        let a = taylor_expand(&m, 2).unwrap();
        let b = taylor_expand(&permuted, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn theta_on_constant_is_empty() {
        let t = Term::from_mhf(MHF::constant());
        assert!(theta_apply(&t, "x", 4).unwrap().is_empty());
    }

    #[test]
    fn arg_derivative_product_rule_on_monomial() {
        // d/dx (x^2 F) = 2x F + x^2 dF/dx
        let m = pfq(&[el(1, 0)], &[el(2, 0)], "x");
        let mut mono = BTreeMap::new();
        mono.insert("x".to_string(), 2);
        let t = Term::new(EpsSeries::one(), mono, m.clone());
        let d = arg_derivative(&t, "x", EXACT).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].exponent("x"), 1);
        assert_eq!(d[0].coeff, EpsSeries::constant(rat(2, 1)));
        assert_eq!(d[1].exponent("x"), 2);
    }

    #[test]
    fn arg_derivative_of_constant_term_is_empty() {
        let t = Term::from_mhf(MHF::constant());
        assert!(arg_derivative(&t, "x", 4).unwrap().is_empty());
    }
}
