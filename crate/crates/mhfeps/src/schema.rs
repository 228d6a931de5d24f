//! Wire formats: JSON schemas for series descriptions, expansions, operators,
//! and verification reports, plus the input-file parser.
//!
//! Rationals serialize as `"p/q"` strings (`"p"` when the denominator is 1).
//! An input file holds either a single series (`{"mhf": ...}`) or a sum of
//! prefactor-carrying series (`{"sum": [{"prefactor": ..., "mhf": ...}]}`).
//! See `docs/schema.md` for the documented schema.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::EpsExpansion;
use crate::laurent::StepDownOperator;
use crate::mhf::{IndexForm, MHF, PochFactor, Term};
use crate::numeval::prefactor::{EpsLinearDef, PrefactorSpec};
use crate::scalar::{parse_rational, rational_string, EpsSeries, Rational, EXACT};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("normalization error at {location}: {message}")]
    NormalizationError { location: String, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Serde helper: rationals as `"p/q"` strings.
pub mod rational_string_serde {
    use super::*;
    use serde::de::Error;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Serde helper: complex rational constants as `{re, im}` strings.
pub mod rational_pair_serde {
    use super::*;
    use serde::de::Error;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Pair {
        re: String,
        #[serde(default)]
        im: Option<String>,
    }

    pub fn serialize<S: Serializer>(v: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
        Pair {
            re: rational_string(&v.0),
            im: Some(rational_string(&v.1)),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Rational, Rational), D::Error> {
        let p = Pair::deserialize(d)?;
        let re = parse_rational(&p.re).map_err(|e| D::Error::custom(e.to_string()))?;
        let im = match p.im {
            Some(s) => parse_rational(&s).map_err(|e| D::Error::custom(e.to_string()))?,
            None => Rational::from_integer(0.into()),
        };
        Ok((re, im))
    }
}

// ---------------------------------------------------------------------------
// Series description
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorDef {
    pub param: EpsLinearDef,
    pub form: Vec<i32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MhfDef {
    pub variables: Vec<String>,
    #[serde(default)]
    pub numerator: Vec<FactorDef>,
    #[serde(default)]
    pub denominator: Vec<FactorDef>,
}

impl MhfDef {
    pub fn into_mhf(self, location: &str) -> Result<MHF, ParseError> {
        let fold = self.variables.len();
        let conv = |defs: Vec<FactorDef>, side: &str| -> Result<Vec<PochFactor>, ParseError> {
            defs.into_iter()
                .enumerate()
                .map(|(i, f)| {
                    if f.form.len() != fold {
                        return Err(ParseError::NormalizationError {
                            location: format!("{location}.{side}[{i}]"),
                            message: format!(
                                "index form has {} entries but the series has {} variables",
                                f.form.len(),
                                fold
                            ),
                        });
                    }
                    Ok(PochFactor::new((&f.param).into(), IndexForm(f.form)))
                })
                .collect()
        };
        let numerator = conv(self.numerator, "numerator")?;
        let denominator = conv(self.denominator, "denominator")?;
        Ok(MHF::new(self.variables, numerator, denominator).canonical())
    }

    pub fn from_mhf(m: &MHF) -> Self {
        let conv = |fs: &[PochFactor]| {
            fs.iter()
                .map(|f| FactorDef {
                    param: (&f.param).into(),
                    form: f.form.0.clone(),
                })
                .collect()
        };
        MhfDef {
            variables: m.variables.clone(),
            numerator: conv(&m.numerator),
            denominator: conv(&m.denominator),
        }
    }
}

/// Top-level input: one series or a prefactor-weighted sum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mhf: Option<MhfDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<Vec<SumEntryDef>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SumEntryDef {
    pub prefactor: PrefactorSpec,
    pub mhf: MhfDef,
}

/// A parsed input file.
#[derive(Debug, Clone)]
pub enum ParsedInput {
    Single(MHF),
    Sum(Vec<(PrefactorSpec, MHF)>),
}

/// Parses and normalizes an input description.
pub fn parse_spec(text: &str) -> Result<ParsedInput, ParseError> {
    let def: InputDef = serde_json::from_str(text)
        .map_err(|e| ParseError::SchemaError(format!("{e} (line {}, column {})", e.line(), e.column())))?;
    match (def.mhf, def.sum) {
        (Some(m), None) => Ok(ParsedInput::Single(m.into_mhf("mhf")?)),
        (None, Some(entries)) => {
            let mut out = Vec::with_capacity(entries.len());
            for (i, e) in entries.into_iter().enumerate() {
                out.push((e.prefactor, e.mhf.into_mhf(&format!("sum[{i}].mhf"))?));
            }
            Ok(ParsedInput::Sum(out))
        }
        (None, None) => Err(ParseError::SchemaError(
            "input must contain either `mhf` or `sum`".into(),
        )),
        (Some(_), Some(_)) => Err(ParseError::SchemaError(
            "input must contain `mhf` or `sum`, not both".into(),
        )),
    }
}

pub fn parse_spec_file(path: &std::path::Path) -> Result<ParsedInput, ParseError> {
    let text = std::fs::read_to_string(path)?;
    parse_spec(&text)
}

// ---------------------------------------------------------------------------
// Series / expansion / operator serialization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsSeriesDef {
    pub min_order: i64,
    pub coeffs: Vec<String>,
    /// Absent means the series is an exact polynomial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<i64>,
}

impl EpsSeriesDef {
    pub fn from_series(s: &EpsSeries) -> Self {
        EpsSeriesDef {
            min_order: s.min_order(),
            coeffs: (s.min_order()..)
                .take_while(|k| {
                    !s.is_zero()
                        && *k < s.min_order() + (series_len(s) as i64)
                })
                .map(|k| rational_string(&s.coeff_at(k)))
                .collect(),
            truncation: (s.truncation() != EXACT).then_some(s.truncation()),
        }
    }

    pub fn into_series(self) -> Result<EpsSeries, ParseError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ParseError::SchemaError(e.to_string()))?;
        Ok(EpsSeries::new(
            self.min_order,
            coeffs,
            self.truncation.unwrap_or(EXACT),
        ))
    }
}

fn series_len(s: &EpsSeries) -> usize {
    s.iter().last().map(|(k, _)| (k - s.min_order()) as usize + 1).unwrap_or(0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDef {
    pub coeff: EpsSeriesDef,
    #[serde(default)]
    pub monomial: BTreeMap<String, u32>,
    pub mhf: MhfDef,
}

impl TermDef {
    pub fn from_term(t: &Term) -> Self {
        TermDef {
            coeff: EpsSeriesDef::from_series(&t.coeff),
            monomial: t.monomial.clone(),
            mhf: MhfDef::from_mhf(&t.mhf),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionDef {
    pub truncation: i64,
    pub orders: Vec<OrderDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderDef {
    pub order: i64,
    pub terms: Vec<TermDef>,
}

impl ExpansionDef {
    pub fn from_expansion(e: &EpsExpansion) -> Self {
        ExpansionDef {
            truncation: e.truncation,
            orders: e
                .orders
                .iter()
                .map(|(order, terms)| OrderDef {
                    order: *order,
                    terms: terms.iter().map(TermDef::from_term).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorDef {
    pub variables: Vec<String>,
    pub terms: Vec<OperatorTermDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorTermDef {
    pub theta: Vec<u32>,
    pub coeff: EpsSeriesDef,
}

impl OperatorDef {
    pub fn from_operator(op: &StepDownOperator) -> Self {
        OperatorDef {
            variables: op.variables.clone(),
            terms: op
                .terms
                .iter()
                .map(|(theta, coeff)| OperatorTermDef {
                    theta: theta.clone(),
                    coeff: EpsSeriesDef::from_series(coeff),
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Verification report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub label: String,
    pub computed: String,
    pub reference: String,
    pub tolerance: String,
    /// Where the reference number comes from.
    pub source: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: String,
    pub passed: bool,
    pub truncation: String,
    pub wall_seconds: f64,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct VerifyReport {
    pub cases: Vec<CaseReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, EpsLinear};

    #[test]
    fn parse_single_mhf() {
        let text = r#"{
            "mhf": {
                "variables": ["x"],
                "numerator": [
                    {"param": {"b0": "3", "b1": "0"}, "form": [1]},
                    {"param": {"b0": "2", "b1": "0"}, "form": [1]}
                ],
                "denominator": [
                    {"param": {"b0": "-3/2", "b1": "1"}, "form": [1]}
                ]
            }
        }"#;
        let parsed = parse_spec(text).unwrap();
        let ParsedInput::Single(m) = parsed else {
            panic!("expected a single series")
        };
        assert_eq!(m.fold(), 1);
        assert_eq!(m.denominator[0].param, EpsLinear::new(rat(-3, 2), rat(1, 1)));
    }

    #[test]
    fn empty_lists_give_constant() {
        let text = r#"{"mhf": {"variables": [], "numerator": [], "denominator": []}}"#;
        let ParsedInput::Single(m) = parse_spec(text).unwrap() else {
            panic!()
        };
        assert_eq!(m, MHF::constant());
    }

    #[test]
    fn form_length_mismatch_is_located() {
        let text = r#"{
            "mhf": {
                "variables": ["x", "y"],
                "numerator": [{"param": {"b0": "1", "b1": "0"}, "form": [1]}],
                "denominator": []
            }
        }"#;
        let err = parse_spec(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("numerator[0]"), "{msg}");
    }

    #[test]
    fn roundtrip_canonical_mhf() {
        let m = crate::mhf::pfq(
            &[EpsLinear::from_ints(1, 2), EpsLinear::from_ints(-2, 0)],
            &[EpsLinear::new(rat(5, 2), rat(-1, 1))],
            "x",
        )
        .canonical();
        let def = MhfDef::from_mhf(&m);
        let text = serde_json::to_string(&InputDef {
            mhf: Some(def),
            sum: None,
        })
        .unwrap();
        let ParsedInput::Single(back) = parse_spec(&text).unwrap() else {
            panic!()
        };
        assert_eq!(back, m);
    }

    #[test]
    fn series_def_roundtrip() {
        let s = EpsSeries::new(-2, vec![rat(1, 2), rat(0, 1), rat(-3, 7)], 4);
        let back = EpsSeriesDef::from_series(&s).into_series().unwrap();
        assert_eq!(back, s);
    }
}
