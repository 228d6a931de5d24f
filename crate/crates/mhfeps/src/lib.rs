//! Symbolic-numeric epsilon expansion of multivariable hypergeometric series.
//!
//! The crate expands series whose Pochhammer parameters depend linearly on a
//! parameter `eps` into Taylor or Laurent series in `eps`, expressing every
//! expansion coefficient as a linear combination of hypergeometric series
//! over the same variables, and evaluates those coefficients numerically by
//! truncated multi-fold summation (exact rational, double, or complex-double
//! arithmetic).
//!
//! The pipeline:
//!
//! 1. [`laurent::classify_singular`] inspects lower Pochhammer parameters.
//! 2. Taylor-type series go through [`calculus::taylor_expand`]: repeated
//!    eps-derivatives, each parameter derivative raising the summation fold
//!    by one via an index reshuffle.
//! 3. Possibly-Laurent series get a secondary function
//!    ([`laurent::build_secondary`]) and a composed step-down operator
//!    ([`laurent::compose_chain`]) applied to its Taylor expansion
//!    ([`laurent::apply_operator`]).
//! 4. [`numeval`] evaluates coefficients at a point with per-index truncation,
//!    expands gamma/power prefactors, and cross-checks with an independent
//!    stencil-fit oracle ([`numeval::oracle::fd_oracle`]).
//!
//! See the `examples/` directory for one runnable example per capability and
//! `fixtures/` for ready-made input files with reference values.

pub mod calculus;
pub mod fixtures;
pub mod laurent;
pub mod mhf;
pub mod numeval;
pub mod scalar;
pub mod schema;

pub use calculus::{
    arg_derivative, eps_derivative, mhf_param_derivative, taylor_expand, taylor_expand_terms,
    theta_apply, EpsExpansion, Occurrence,
};
pub use laurent::{
    apply_operator, build_annihilator, build_secondary, classify_singular, compose_chain,
    laurent_expand, unit_step_down, Annihilator, Classification, StepChain, StepDownOperator,
};
pub use mhf::{
    collapse_zero, gauss_multiply, merge_terms, poch_negate, shift_split, IndexForm, MHF,
    PochFactor, Side, Term,
};
pub use numeval::{
    eval_expansion, eval_mhf, eval_term, eval_terms, EvalError, EvalOutput, EvalPoint, Mode,
    Truncation, Value,
};
pub use scalar::{rat, EpsLinear, EpsSeries, Rational};
