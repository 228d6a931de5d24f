//! The multivariable hypergeometric series data model and the Pochhammer
//! identity toolkit.
//!
//! An [`MHF`] is an `r`-fold formal power series
//!
//! ```text
//!   sum_{m in N_0^r}  prod_i (a_i)_{mu_i . m}  /  prod_j (b_j)_{nu_j . m}
//!                     * x^m / m!
//! ```
//!
//! with one implicit `1/m_i!` per summation index. Parameters are exact
//! [`EpsLinear`] forms, index forms are integer vectors, and variables are
//! named (the same name may ride on several indices). Convergence is never
//! asserted by the type; the series is formal.
//!
//! [`Term`] is the unit of symbolic output: an [`EpsSeries`] coefficient, a
//! monomial prefactor over the variable names, and an `MHF`.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{rat, EpsLinear, EpsSeries, Rational, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("constant Pochhammer factor requires division by a parameter that vanishes identically in eps")]
    ConstantPole,
    #[error("negation identity needs a parameter that is not an eps-free integer")]
    IntegerParameter,
    #[error("index form is not a pure positive multiple of a single index")]
    UnsupportedForm,
    #[error("zero parameter with mixed-sign index form: cannot pin indices")]
    MixedSignForm,
    #[error("occurrence is not normalized (entries outside {{0,1}}): {0}")]
    NotNormalized(String),
    #[error("sign flip of `{0}` would touch indices outside the rewritten factor")]
    IllegalFlip(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

// ---------------------------------------------------------------------------
// Index forms and factors
// ---------------------------------------------------------------------------

/// An integer linear form over the summation indices: one row of the `mu`/`nu`
/// matrices of the series definition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexForm(pub Vec<i32>);

impl IndexForm {
    pub fn zeros(r: usize) -> Self {
        IndexForm(vec![0; r])
    }

    /// Unit form on index `i`.
    pub fn unit(r: usize, i: usize) -> Self {
        let mut v = vec![0; r];
        v[i] = 1;
        IndexForm(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn entry(&self, i: usize) -> i32 {
        self.0[i]
    }

    /// Indices with nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_unit_like(&self) -> bool {
        self.0.iter().all(|&e| e == 0 || e == 1)
    }

    /// Appends entries (for newly introduced indices).
    pub fn extended(&self, extra: &[i32]) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(extra);
        IndexForm(v)
    }

    /// Removes the given (sorted) index positions.
    pub fn without(&self, drop: &[usize]) -> Self {
        IndexForm(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, &e)| e)
                .collect(),
        )
    }

    /// Dot product with a lattice point.
    pub fn dot(&self, m: &[u32]) -> i64 {
        self.0
            .iter()
            .zip(m)
            .map(|(&w, &mi)| w as i64 * mi as i64)
            .sum()
    }
}

/// One Pochhammer factor `(param)_{form}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PochFactor {
    pub param: EpsLinear,
    pub form: IndexForm,
}

impl PochFactor {
    pub fn new(param: EpsLinear, form: IndexForm) -> Self {
        PochFactor { param, form }
    }
}

impl fmt::Display for PochFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {:?}}}", self.param, self.form.0)
    }
}

/// Which side of the coefficient ratio a factor occurrence sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Numerator,
    Denominator,
}

// ---------------------------------------------------------------------------
// MHF
// ---------------------------------------------------------------------------

/// A multivariable hypergeometric series; see the module docs for the
/// summand convention.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MHF {
    /// Variable name carried by each summation index (names may repeat).
    pub variables: Vec<String>,
    pub numerator: Vec<PochFactor>,
    pub denominator: Vec<PochFactor>,
}

impl MHF {
    pub fn new(variables: Vec<String>, numerator: Vec<PochFactor>, denominator: Vec<PochFactor>) -> Self {
        MHF {
            variables,
            numerator,
            denominator,
        }
    }

    /// The constant series `1` (zero summation folds).
    pub fn constant() -> Self {
        MHF {
            variables: vec![],
            numerator: vec![],
            denominator: vec![],
        }
    }

    /// Number of summation folds.
    pub fn fold(&self) -> usize {
        self.variables.len()
    }

    pub fn factors(&self, side: Side) -> &[PochFactor] {
        match side {
            Side::Numerator => &self.numerator,
            Side::Denominator => &self.denominator,
        }
    }

    /// Every factor as `(side, position)` pairs, numerator first.
    pub fn occurrences(&self) -> impl Iterator<Item = (Side, usize)> + '_ {
        (0..self.numerator.len())
            .map(|i| (Side::Numerator, i))
            .chain((0..self.denominator.len()).map(|i| (Side::Denominator, i)))
    }

    pub fn factor(&self, side: Side, idx: usize) -> &PochFactor {
        &self.factors(side)[idx]
    }

    /// The distinct variable names, sorted.
    pub fn variable_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.variables.clone();
        names.sort();
        names.dedup();
        names
    }

    /// Substitutes a concrete rational value for eps in every parameter.
    pub fn at_eps(&self, eps: &Rational) -> MHF {
        let subst = |fs: &[PochFactor]| {
            fs.iter()
                .map(|f| PochFactor::new(EpsLinear::constant(f.param.at(eps)), f.form.clone()))
                .collect()
        };
        MHF {
            variables: self.variables.clone(),
            numerator: subst(&self.numerator),
            denominator: subst(&self.denominator),
        }
    }

    /// Sorted factor lists, identical numerator/denominator factors cancelled,
    /// constant (zero-form) factors removed, and summation indices relabeled
    /// into a least representative (indices are bound variables, so any
    /// permutation denotes the same series). Structural equality of canonical
    /// forms is the engine's notion of equality; it deliberately does not try
    /// to decide mathematical equality beyond relabeling.
    pub fn canonical(&self) -> MHF {
        let sorted = self.sorted_cancelled();
        let r = sorted.fold();
        if r < 2 || r > 6 {
            return sorted;
        }
        // minimize over index permutations
        let mut best = sorted.clone();
        let mut perm: Vec<usize> = (0..r).collect();
        permute_all(&mut perm, 0, &mut |p| {
            let candidate = sorted.permuted(p).sorted_cancelled();
            if (&candidate.variables, &candidate.numerator, &candidate.denominator)
                < (&best.variables, &best.numerator, &best.denominator)
            {
                best = candidate;
            }
        });
        best
    }

    fn sorted_cancelled(&self) -> MHF {
        let mut num: Vec<PochFactor> = self
            .numerator
            .iter()
            .filter(|f| !f.form.is_zero())
            .cloned()
            .collect();
        let mut den: Vec<PochFactor> = self
            .denominator
            .iter()
            .filter(|f| !f.form.is_zero())
            .cloned()
            .collect();
        num.sort();
        den.sort();
        // cancel identical factors pairwise
        let mut keep_num = Vec::with_capacity(num.len());
        for f in num {
            if let Some(pos) = den.iter().position(|g| *g == f) {
                den.remove(pos);
            } else {
                keep_num.push(f);
            }
        }
        MHF {
            variables: self.variables.clone(),
            numerator: keep_num,
            denominator: den,
        }
    }

    /// True when every index form has entries in `{0, 1}`; the derivative
    /// engine requires this shape.
    pub fn is_unit_normalized(&self) -> bool {
        self.numerator
            .iter()
            .chain(&self.denominator)
            .all(|f| f.form.is_unit_like())
    }

    /// Reorders the summation indices: slot `i` of the result is slot
    /// `perm[i]` of `self`. The series value is unchanged.
    pub fn permuted(&self, perm: &[usize]) -> MHF {
        debug_assert_eq!(perm.len(), self.fold());
        let map_form = |f: &PochFactor| {
            PochFactor::new(
                f.param.clone(),
                IndexForm(perm.iter().map(|&p| f.form.entry(p)).collect()),
            )
        };
        MHF {
            variables: perm.iter().map(|&p| self.variables[p].clone()).collect(),
            numerator: self.numerator.iter().map(map_form).collect(),
            denominator: self.denominator.iter().map(map_form).collect(),
        }
    }
}

impl fmt::Display for MHF {
    /// Bracket notation: `F[{a, {..}}, ... / {b, {..}}, ... | {x, y}]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fold() == 0 && self.numerator.is_empty() && self.denominator.is_empty() {
            return write!(f, "1");
        }
        write!(f, "F[")?;
        for (i, p) in self.numerator.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, " / ")?;
        for (i, p) in self.denominator.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, " | {{{}}}]", self.variables.join(", "))
    }
}

// ---------------------------------------------------------------------------
// Term
// ---------------------------------------------------------------------------

/// Exact coefficient x variable monomial x MHF: the unit of symbolic output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Term {
    pub coeff: EpsSeries,
    /// Exponent per variable name (zero entries are not stored).
    pub monomial: BTreeMap<String, u32>,
    pub mhf: MHF,
}

impl Term {
    pub fn new(coeff: EpsSeries, monomial: BTreeMap<String, u32>, mhf: MHF) -> Self {
        let mut t = Term {
            coeff,
            monomial,
            mhf,
        };
        t.monomial.retain(|_, &mut e| e > 0);
        t
    }

    /// A bare MHF with unit coefficient and empty monomial.
    pub fn from_mhf(mhf: MHF) -> Self {
        Term::new(EpsSeries::one(), BTreeMap::new(), mhf)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn scaled(&self, c: &EpsSeries) -> Term {
        Term::new(self.coeff.mul(c), self.monomial.clone(), self.mhf.clone())
    }

    pub fn canonical(&self) -> Term {
        Term::new(self.coeff.clone(), self.monomial.clone(), self.mhf.canonical())
    }

    /// Exponent of a variable in the monomial prefactor.
    pub fn exponent(&self, var: &str) -> u32 {
        self.monomial.get(var).copied().unwrap_or(0)
    }

    pub fn with_monomial_delta(&self, var: &str, delta: i64) -> Term {
        let mut mono = self.monomial.clone();
        let e = mono.get(var).copied().unwrap_or(0) as i64 + delta;
        debug_assert!(e >= 0, "monomial exponent went negative");
        if e <= 0 {
            mono.remove(var);
        } else {
            mono.insert(var.to_string(), e as u32);
        }
        Term::new(self.coeff.clone(), mono, self.mhf.clone())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coeff)?;
        for (v, e) in &self.monomial {
            if *e == 1 {
                write!(f, " * {v}")?;
            } else {
                write!(f, " * {v}^{e}")?;
            }
        }
        write!(f, " * {}", self.mhf)
    }
}

/// Visits every permutation of `perm[start..]` (Heap-style recursion).
fn permute_all(perm: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == perm.len() {
        visit(perm);
        return;
    }
    for i in start..perm.len() {
        perm.swap(start, i);
        permute_all(perm, start + 1, visit);
        perm.swap(start, i);
    }
}

/// Sorts terms canonically and merges those with identical monomial and MHF;
/// terms whose coefficient cancels are dropped.
pub fn merge_terms(terms: Vec<Term>) -> Vec<Term> {
    let mut canon: Vec<Term> = terms
        .into_iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.canonical())
        .collect();
    canon.sort_by(|a, b| (&a.monomial, &a.mhf).cmp(&(&b.monomial, &b.mhf)));
    let mut out: Vec<Term> = Vec::with_capacity(canon.len());
    for t in canon {
        match out.last_mut() {
            Some(last) if last.monomial == t.monomial && last.mhf == t.mhf => {
                last.coeff = last.coeff.add(&t.coeff);
            }
            _ => out.push(t),
        }
    }
    out.retain(|t| !t.is_zero());
    out
}

// ---------------------------------------------------------------------------
// Pochhammer rewrites
// ---------------------------------------------------------------------------

/// Exact value of a constant Pochhammer `(a)_c` as a series in eps
/// (polynomial for `c >= 0`, inverted polynomial for `c < 0`).
pub fn constant_pochhammer(a: &EpsLinear, c: i64, trunc: i64) -> Result<EpsSeries, RewriteError> {
    if c >= 0 {
        let mut acc = EpsSeries::one();
        for t in 0..c {
            acc = acc.mul(&a.shifted(t).as_series());
        }
        Ok(acc)
    } else {
        // (a)_{-n} = 1 / ((a-n)(a-n+1)...(a-1))
        let mut acc = EpsSeries::one();
        for t in 1..=(-c) {
            let factor = a.shifted(-t);
            if factor.is_zero() {
                return Err(RewriteError::ConstantPole);
            }
            acc = acc.mul(&factor.as_series());
        }
        if acc.is_zero() {
            return Err(RewriteError::ConstantPole);
        }
        Ok(acc.recip(trunc)?)
    }
}

/// Splits a constant shift out of a Pochhammer factor:
/// `(a)_{L + c} = (a)_c * (a + c)_L` for integer `c`.
///
/// Returns the scalar `(a)_c` (exact in eps where possible) and the residual
/// factor `(a + c)_L`. Splitting at a summation index rather than a constant
/// is not expressible here by construction: the shift argument is an integer.
pub fn shift_split(
    f: &PochFactor,
    c: i64,
    trunc: i64,
) -> Result<(EpsSeries, PochFactor), RewriteError> {
    let scalar = constant_pochhammer(&f.param, c, trunc)?;
    Ok((
        scalar,
        PochFactor::new(f.param.shifted(c), f.form.clone()),
    ))
}

/// Result of eliminating a negative index form: the rewritten factor moves to
/// the opposite side as `(1 - a)_{|form|}`, and each variable listed in
/// `flipped` must be negated at evaluation time to absorb the `(-1)^n` sign.
#[derive(Debug, Clone)]
pub struct NegationRewrite {
    pub term: Term,
    pub flipped: Vec<String>,
}

/// Rewrites a numerator factor with a strictly negative form via
/// `(a)_{-n} -> (-1)^n / (1 - a)_n` (and symmetrically for denominators).
///
/// The sign `(-1)^n` is absorbed by flipping the sign of the variables riding
/// on the form's odd-entry indices; the flip is legal only when those
/// variables do not also ride on unflipped indices.
pub fn poch_negate(t: &Term, side: Side, idx: usize) -> Result<NegationRewrite, RewriteError> {
    let f = t.mhf.factor(side, idx).clone();
    if f.form.is_zero() {
        // (a)_0 = 1: drop the factor entirely
        let mut mhf = t.mhf.clone();
        match side {
            Side::Numerator => {
                mhf.numerator.remove(idx);
            }
            Side::Denominator => {
                mhf.denominator.remove(idx);
            }
        }
        return Ok(NegationRewrite {
            term: Term::new(t.coeff.clone(), t.monomial.clone(), mhf),
            flipped: vec![],
        });
    }
    if f.form.0.iter().any(|&e| e > 0) {
        return Err(RewriteError::MixedSignForm);
    }
    if f.param.is_constant() && f.param.b0.is_integer() {
        return Err(RewriteError::IntegerParameter);
    }
    let abs_form = IndexForm(f.form.0.iter().map(|&e| -e).collect());
    // indices whose sign flips: odd |entry|
    let mut flip_indices: Vec<usize> = vec![];
    for (i, &e) in abs_form.0.iter().enumerate() {
        if e % 2 == 1 {
            flip_indices.push(i);
        }
    }
    let mut flipped: Vec<String> = flip_indices
        .iter()
        .map(|&i| t.mhf.variables[i].clone())
        .collect();
    flipped.sort();
    flipped.dedup();
    for name in &flipped {
        for (i, v) in t.mhf.variables.iter().enumerate() {
            if v == name && !flip_indices.contains(&i) {
                return Err(RewriteError::IllegalFlip(name.clone()));
            }
        }
    }
    let negated = EpsLinear::new(
        Rational::one() - &f.param.b0,
        -f.param.b1.clone(),
    );
    let new_factor = PochFactor::new(negated, abs_form);
    let mut mhf = t.mhf.clone();
    match side {
        Side::Numerator => {
            mhf.numerator.remove(idx);
            mhf.denominator.push(new_factor);
        }
        Side::Denominator => {
            mhf.denominator.remove(idx);
            mhf.numerator.push(new_factor);
        }
    }
    Ok(NegationRewrite {
        term: Term::new(t.coeff.clone(), t.monomial.clone(), mhf),
        flipped,
    })
}

/// Result of the multiplication theorem: replacement factors plus a variable
/// rescaling `x -> k^k * x` on the affected index's variable.
#[derive(Debug, Clone)]
pub struct GaussRewrite {
    pub factors: Vec<PochFactor>,
    pub rescaled_variable: Option<(String, Rational)>,
}

/// Applies the multiplication theorem to a factor whose form is `k * m_i`:
/// `(a)_{k m} = k^{k m} (a/k)_m ((a+1)/k)_m ... ((a+k-1)/k)_m`.
pub fn gauss_multiply(mhf: &MHF, side: Side, idx: usize, k: u32) -> Result<GaussRewrite, RewriteError> {
    let f = mhf.factor(side, idx);
    if k == 0 {
        return Err(RewriteError::UnsupportedForm);
    }
    if k == 1 {
        return Ok(GaussRewrite {
            factors: vec![f.clone()],
            rescaled_variable: None,
        });
    }
    let supp = f.form.support();
    if supp.len() != 1 || f.form.entry(supp[0]) != k as i32 {
        return Err(RewriteError::UnsupportedForm);
    }
    let i = supp[0];
    let unit = IndexForm::unit(f.form.len(), i);
    let kk = rat(k as i64, 1);
    let factors = (0..k)
        .map(|j| {
            PochFactor::new(
                EpsLinear::new(
                    (&f.param.b0 + rat(j as i64, 1)) / &kk,
                    &f.param.b1 / &kk,
                ),
                unit.clone(),
            )
        })
        .collect();
    let scale = num::pow::pow(kk, k as usize);
    Ok(GaussRewrite {
        factors,
        rescaled_variable: Some((mhf.variables[i].clone(), scale)),
    })
}

/// Pins to zero every index appearing in a vanished numerator parameter's
/// form, dropping those summation folds. Applies repeatedly until no
/// identically-zero numerator parameter remains.
///
/// Intended to run after eps has been substituted away: `(0)_L` kills every
/// lattice point with `L > 0`, so all indices in an all-nonnegative form `L`
/// are pinned to zero.
pub fn collapse_zero(t: &Term) -> Result<Term, RewriteError> {
    let mut term = t.clone();
    loop {
        let target = term.mhf.numerator.iter().position(|f| {
            f.param.is_zero() && !f.form.is_zero()
        });
        let Some(pos) = target else {
            // an identically-zero *denominator* parameter is a genuine pole
            if term
                .mhf
                .denominator
                .iter()
                .any(|f| f.param.is_zero() && !f.form.is_zero())
            {
                return Err(RewriteError::ConstantPole);
            }
            return Ok(term);
        };
        let form = &term.mhf.numerator[pos].form;
        if form.0.iter().any(|&e| e < 0) {
            if form.0.iter().all(|&e| e <= 0) {
                // strictly negative forms never vanish; not a pinning factor
                // ((0)_{-n} = (-1)^n / n!), leave for poch_negate
                return Err(RewriteError::MixedSignForm);
            }
            return Err(RewriteError::MixedSignForm);
        }
        let pinned: Vec<usize> = form.support();
        debug_assert!(!pinned.is_empty());
        let variables: Vec<String> = term
            .mhf
            .variables
            .iter()
            .enumerate()
            .filter(|(i, _)| !pinned.contains(i))
            .map(|(_, v)| v.clone())
            .collect();
        let strip = |fs: &[PochFactor]| -> Vec<PochFactor> {
            fs.iter()
                .map(|f| PochFactor::new(f.param.clone(), f.form.without(&pinned)))
                .filter(|f| !f.form.is_zero())
                .collect()
        };
        let numerator = strip(
            &term
                .mhf
                .numerator
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pos)
                .map(|(_, f)| f.clone())
                .collect::<Vec<_>>(),
        );
        let denominator = strip(&term.mhf.denominator);
        term = Term::new(
            term.coeff.clone(),
            term.monomial.clone(),
            MHF {
                variables,
                numerator,
                denominator,
            },
        );
    }
}

/// Substitutes `eps = 0` into a term: the coefficient collapses to its
/// constant part, parameters to their eps-free part, and vanished upper
/// parameters pin their indices. Returns `None` when the term vanishes.
pub fn set_eps_zero(t: &Term) -> Result<Option<Term>, RewriteError> {
    let c0 = t.coeff.at_origin()?;
    if c0.is_zero() {
        return Ok(None);
    }
    let freeze = |fs: &[PochFactor]| -> Vec<PochFactor> {
        fs.iter()
            .map(|f| PochFactor::new(EpsLinear::constant(f.param.b0.clone()), f.form.clone()))
            .collect()
    };
    let frozen = Term::new(
        EpsSeries::constant(c0),
        t.monomial.clone(),
        MHF {
            variables: t.mhf.variables.clone(),
            numerator: freeze(&t.mhf.numerator),
            denominator: freeze(&t.mhf.denominator),
        },
    );
    Ok(Some(collapse_zero(&frozen)?.canonical()))
}

// ---------------------------------------------------------------------------
// Convenience constructors for classical families (used by fixtures/tests)
// ---------------------------------------------------------------------------

/// `pFq(a1..ap; b1..bq; x)` as a one-fold MHF (the `1/m!` is implicit).
pub fn pfq(upper: &[EpsLinear], lower: &[EpsLinear], var: &str) -> MHF {
    let unit = IndexForm(vec![1]);
    MHF::new(
        vec![var.to_string()],
        upper
            .iter()
            .map(|a| PochFactor::new(a.clone(), unit.clone()))
            .collect(),
        lower
            .iter()
            .map(|b| PochFactor::new(b.clone(), unit.clone()))
            .collect(),
    )
}

/// The two-variable series `F1(a, b1, b2, c; x, y)` with `(a)_{m+n} (b1)_m
/// (b2)_n / (c)_{m+n}`.
pub fn appell_f1(a: EpsLinear, b1: EpsLinear, b2: EpsLinear, c: EpsLinear, x: &str, y: &str) -> MHF {
    let both = IndexForm(vec![1, 1]);
    let em = IndexForm(vec![1, 0]);
    let en = IndexForm(vec![0, 1]);
    MHF::new(
        vec![x.to_string(), y.to_string()],
        vec![
            PochFactor::new(a, both.clone()),
            PochFactor::new(b1, em),
            PochFactor::new(b2, en),
        ],
        vec![PochFactor::new(c, both)],
    )
}

/// The two-variable series `F2(a, b1, b2, c1, c2; x, y)` with `(a)_{m+n} (b1)_m
/// (b2)_n / ((c1)_m (c2)_n)`.
pub fn appell_f2(
    a: EpsLinear,
    b1: EpsLinear,
    b2: EpsLinear,
    c1: EpsLinear,
    c2: EpsLinear,
    x: &str,
    y: &str,
) -> MHF {
    let both = IndexForm(vec![1, 1]);
    let em = IndexForm(vec![1, 0]);
    let en = IndexForm(vec![0, 1]);
    MHF::new(
        vec![x.to_string(), y.to_string()],
        vec![
            PochFactor::new(a, both),
            PochFactor::new(b1, em.clone()),
            PochFactor::new(b2, en.clone()),
        ],
        vec![PochFactor::new(c1, em), PochFactor::new(c2, en)],
    )
}

/// The three-variable series `FC(a, b, c1, c2, c3; z1, z2, z3)` with
/// `(a)_{m+n+p} (b)_{m+n+p} / ((c1)_m (c2)_n (c3)_p)`.
pub fn lauricella_fc3(
    a: EpsLinear,
    b: EpsLinear,
    c: [EpsLinear; 3],
    vars: [&str; 3],
) -> MHF {
    let total = IndexForm(vec![1, 1, 1]);
    let [c1, c2, c3] = c;
    MHF::new(
        vars.iter().map(|v| v.to_string()).collect(),
        vec![
            PochFactor::new(a, total.clone()),
            PochFactor::new(b, total),
        ],
        vec![
            PochFactor::new(c1, IndexForm(vec![1, 0, 0])),
            PochFactor::new(c2, IndexForm(vec![0, 1, 0])),
            PochFactor::new(c3, IndexForm(vec![0, 0, 1])),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn el(b0: i64, b1: i64) -> EpsLinear {
        EpsLinear::from_ints(b0, b1)
    }

    #[test]
    fn shift_split_constant_product() {
        // (a)_{m+2} -> (a)(a+1) * (a+2)_m for a = 3: constant 12, residual (5)_m
        let f = PochFactor::new(el(3, 0), IndexForm(vec![1]));
        let (scalar, residual) = shift_split(&f, 2, 8).unwrap();
        assert_eq!(scalar, EpsSeries::constant(rat(12, 1)));
        assert_eq!(residual.param, el(5, 0));
    }

    #[test]
    fn shift_split_eps_parameter() {
        // (eps)_{m+1} -> eps * (eps+1)_m
        let f = PochFactor::new(EpsLinear::eps(), IndexForm(vec![1]));
        let (scalar, residual) = shift_split(&f, 1, 8).unwrap();
        assert_eq!(scalar, EpsSeries::monomial(rat(1, 1), 1));
        assert_eq!(residual.param, el(1, 1));
    }

    #[test]
    fn constant_pochhammer_negative_shift() {
        // (1/3)_{-2} = 1/((1/3 - 2)(1/3 - 1)) -- direct gamma-ratio style oracle
        let a = EpsLinear::new(rat(1, 3), rat(0, 1));
        let v = constant_pochhammer(&a, -2, 8).unwrap();
        let oracle = Rational::from(rat(1, 1)) / ((rat(1, 3) - rat(2, 1)) * (rat(1, 3) - rat(1, 1)));
        assert_eq!(v, EpsSeries::constant(oracle));
    }

    #[test]
    fn negate_single_index() {
        // (a)_{-m} with a = 1/2 -> (-1)^m / (1/2)_m as a denominator factor
        let f = PochFactor::new(
            EpsLinear::new(rat(1, 2), rat(0, 1)),
            IndexForm(vec![-1]),
        );
        let term = Term::from_mhf(MHF::new(vec!["x".into()], vec![f], vec![]));
        let rw = poch_negate(&term, Side::Numerator, 0).unwrap();
        assert_eq!(rw.flipped, vec!["x".to_string()]);
        assert!(rw.term.mhf.numerator.is_empty());
        assert_eq!(rw.term.mhf.denominator.len(), 1);
        assert_eq!(rw.term.mhf.denominator[0].param, EpsLinear::new(rat(1, 2), rat(0, 1)));
        assert_eq!(rw.term.mhf.denominator[0].form, IndexForm(vec![1]));
    }

    #[test]
    fn negate_rejects_integer_parameter() {
        let f = PochFactor::new(el(2, 0), IndexForm(vec![-1]));
        let term = Term::from_mhf(MHF::new(vec!["x".into()], vec![f], vec![]));
        assert_eq!(
            poch_negate(&term, Side::Numerator, 0).unwrap_err(),
            RewriteError::IntegerParameter
        );
    }

    #[test]
    fn negate_zero_form_removes_factor() {
        let f = PochFactor::new(el(7, 0), IndexForm(vec![0]));
        let term = Term::from_mhf(MHF::new(vec!["x".into()], vec![f], vec![]));
        let rw = poch_negate(&term, Side::Numerator, 0).unwrap();
        assert!(rw.term.mhf.numerator.is_empty());
        assert!(rw.flipped.is_empty());
    }

    #[test]
    fn gauss_doubling() {
        // (a)_{2m} -> 2^{2m} (a/2)_m ((a+1)/2)_m, x -> 4x
        let mhf = MHF::new(
            vec!["x".into()],
            vec![PochFactor::new(el(3, 0), IndexForm(vec![2]))],
            vec![],
        );
        let rw = gauss_multiply(&mhf, Side::Numerator, 0, 2).unwrap();
        assert_eq!(rw.factors.len(), 2);
        assert_eq!(rw.factors[0].param, EpsLinear::new(rat(3, 2), rat(0, 1)));
        assert_eq!(rw.factors[1].param, EpsLinear::new(rat(2, 1), rat(0, 1)));
        assert_eq!(rw.rescaled_variable, Some(("x".to_string(), rat(4, 1))));

        // numeric: (3)_{2*4} == 2^8 (3/2)_4 (2)_4 as exact rationals
        let direct = constant_pochhammer(&el(3, 0), 8, 4).unwrap();
        let lhs = constant_pochhammer(&EpsLinear::new(rat(3, 2), rat(0, 1)), 4, 4).unwrap();
        let rhs = constant_pochhammer(&el(2, 0), 4, 4).unwrap();
        assert_eq!(direct, lhs.mul(&rhs).scale(&rat(256, 1)));
    }

    #[test]
    fn gauss_identity_k1() {
        let mhf = MHF::new(
            vec!["x".into()],
            vec![PochFactor::new(el(3, 0), IndexForm(vec![1]))],
            vec![],
        );
        let rw = gauss_multiply(&mhf, Side::Numerator, 0, 1).unwrap();
        assert_eq!(rw.factors, vec![mhf.numerator[0].clone()]);
        assert!(rw.rescaled_variable.is_none());
    }

    #[test]
    fn collapse_pins_y_fold() {
        // F2 with upper (0)_n: y-fold drops, leaving a one-variable 2F1 shape
        let m = appell_f2(el(1, 0), el(2, 0), el(0, 0), el(3, 0), el(4, 0), "x", "y");
        let collapsed = collapse_zero(&Term::from_mhf(m)).unwrap();
        let expect = pfq(&[el(1, 0), el(2, 0)], &[el(3, 0)], "x").canonical();
        assert_eq!(collapsed.mhf.canonical(), expect);
    }

    #[test]
    fn collapse_both_indices() {
        let m = MHF::new(
            vec!["x".into(), "y".into()],
            vec![PochFactor::new(el(0, 0), IndexForm(vec![1, 1]))],
            vec![],
        );
        let collapsed = collapse_zero(&Term::from_mhf(m)).unwrap();
        assert_eq!(collapsed.mhf, MHF::constant());
    }

    #[test]
    fn collapse_mixed_sign_is_rejected() {
        let m = MHF::new(
            vec!["x".into(), "y".into()],
            vec![PochFactor::new(el(0, 0), IndexForm(vec![1, -1]))],
            vec![],
        );
        assert_eq!(
            collapse_zero(&Term::from_mhf(m)).unwrap_err(),
            RewriteError::MixedSignForm
        );
    }

    #[test]
    fn canonical_cancels_and_sorts() {
        let a = PochFactor::new(el(2, 1), IndexForm(vec![1]));
        let b = PochFactor::new(el(5, 0), IndexForm(vec![1]));
        let m1 = MHF::new(
            vec!["x".into()],
            vec![a.clone(), b.clone()],
            vec![a.clone()],
        );
        let c1 = m1.canonical();
        assert_eq!(c1.numerator, vec![b.clone()]);
        assert!(c1.denominator.is_empty());

        let m2 = MHF::new(vec!["x".into()], vec![b.clone(), a.clone()], vec![a]);
        assert_eq!(c1, m2.canonical());
        assert_eq!(c1, c1.canonical()); // idempotent
    }

    #[test]
    fn merge_combines_like_terms() {
        let m = pfq(&[el(1, 0)], &[], "x");
        let t1 = Term::new(EpsSeries::constant(rat(2, 1)), BTreeMap::new(), m.clone());
        let t2 = Term::new(EpsSeries::constant(rat(3, 1)), BTreeMap::new(), m.clone());
        let t3 = Term::new(EpsSeries::constant(rat(-5, 1)), BTreeMap::new(), m);
        let merged = merge_terms(vec![t1, t2, t3]);
        assert!(merged.is_empty());
    }
}
