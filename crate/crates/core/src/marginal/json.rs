//! JSON forms of marginal problems and their solutions.
//!
//! Input:
//!
//! ```json
//! { "n": 3, "pairs": { "0,1": "1", "0,2": "-1", "1,2": "-1/2" }, "singles": { "0": "0" } }
//! ```
//!
//! Values may be fraction strings, exact decimal strings, or JSON numbers
//! (taken at their exact binary value). Output keeps every rational as a
//! `"p/q"` string.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{atom_label, InfeasibilityCertificate, Inequality, MarginalProblem, Solution};
use crate::error::{Error, Result};
use crate::rational::{format_rational, from_f64, parse_rational, Rational};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RationalValue {
    Text(String),
    Number(f64),
}

impl RationalValue {
    fn value(&self) -> Result<Rational> {
        match self {
            RationalValue::Text(s) => parse_rational(s),
            RationalValue::Number(x) => from_f64(*x),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    n: usize,
    pairs: BTreeMap<String, RationalValue>,
    #[serde(default)]
    singles: BTreeMap<String, RationalValue>,
}

fn index(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidProblem(format!("variable index {s:?} is not an integer")))
}

pub fn problem_from_json(text: &str) -> Result<MarginalProblem> {
    let doc: ProblemDoc = serde_json::from_str(text)?;
    let pairs = doc
        .pairs
        .iter()
        .map(|(k, v)| {
            let (i, j) = k
                .split_once(',')
                .ok_or_else(|| Error::InvalidProblem(format!("pair key {k:?} is not \"i,j\"")))?;
            Ok(((index(i)?, index(j)?), v.value()?))
        })
        .collect::<Result<Vec<_>>>()?;
    let singles = doc
        .singles
        .iter()
        .map(|(k, v)| Ok((index(k)?, v.value()?)))
        .collect::<Result<Vec<_>>>()?;
    MarginalProblem::new(doc.n, pairs, singles)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityDoc {
    pub constant: String,
    pub pairs: BTreeMap<String, String>,
    pub singles: BTreeMap<String, String>,
    pub text: String,
}

impl From<&Inequality> for InequalityDoc {
    fn from(ineq: &Inequality) -> Self {
        Self {
            constant: format_rational(&ineq.constant),
            pairs: ineq
                .pair_coefficients
                .iter()
                .map(|((i, j), c)| (format!("{i},{j}"), format_rational(c)))
                .collect(),
            singles: ineq
                .single_coefficients
                .iter()
                .map(|(i, c)| (i.to_string(), format_rational(c)))
                .collect(),
            text: ineq.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub inequality: InequalityDoc,
    pub value_at_input: String,
}

impl From<&InfeasibilityCertificate> for CertificateDoc {
    fn from(c: &InfeasibilityCertificate) -> Self {
        Self {
            inequality: (&c.inequality).into(),
            value_at_input: format_rational(&c.value_at_input),
        }
    }
}

/// `{"status": "feasible", "witness": {...}}` or
/// `{"status": "infeasible", "certificate": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SolutionDoc {
    Feasible {
        /// Atom label (`"+-+"`) to probability, positive atoms only.
        witness: BTreeMap<String, String>,
    },
    Infeasible {
        certificate: CertificateDoc,
    },
}

impl From<&Solution> for SolutionDoc {
    fn from(s: &Solution) -> Self {
        match s {
            Solution::Feasible(w) => SolutionDoc::Feasible {
                witness: w
                    .support()
                    .into_iter()
                    .map(|(signs, p)| (atom_label(&signs), format_rational(&p)))
                    .collect(),
            },
            Solution::Infeasible(c) => SolutionDoc::Infeasible {
                certificate: c.into(),
            },
        }
    }
}
