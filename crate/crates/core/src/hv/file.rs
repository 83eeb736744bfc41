//! JSON model documents.
//!
//! Non-contextual:
//!
//! ```json
//! {
//!   "kind": "noncontextual",
//!   "lambdas": ["l0", "l1"],
//!   "weights": ["1/2", 0.5],
//!   "response_a": { "0": { "l0": 1, "l1": 0 } },
//!   "response_b": { "1": { "l0": 0, "l1": 1 } }
//! }
//! ```
//!
//! Contextual, one atom list per `"x,y"` setting pair:
//!
//! ```json
//! {
//!   "kind": "contextual",
//!   "contexts": {
//!     "0,1": [
//!       { "pair": 0, "instrument": 0, "weight": "1/2", "outcome": [1, -1] },
//!       { "pair": 0, "instrument": 1, "weight": "1/2", "outcome": [-1, 1] }
//!     ]
//!   }
//! }
//! ```
//!
//! Numbers may be JSON numbers or strings holding a fraction or exact
//! decimal. `kind` may be omitted: a document with `contexts` is contextual.
//! In a contextual atom `pair` defaults to the atom's index and `instrument`
//! to 0, which makes every atom its own source state.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{Context, ContextAtom, ContextualModel, FiniteNoncontextualModel, HiddenVariableModel};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, to_f64};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    fn value(&self) -> Result<f64> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Text(s) => Ok(to_f64(&parse_rational(s)?)),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoncontextualDoc {
    #[serde(default)]
    #[allow(dead_code)]
    kind: Option<String>,
    lambdas: Vec<String>,
    weights: Vec<Number>,
    response_a: BTreeMap<String, BTreeMap<String, Number>>,
    response_b: BTreeMap<String, BTreeMap<String, Number>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    #[serde(default)]
    pair: Option<u32>,
    #[serde(default)]
    instrument: Option<u32>,
    weight: Number,
    outcome: [i8; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextualDoc {
    #[serde(default)]
    #[allow(dead_code)]
    kind: Option<String>,
    contexts: BTreeMap<String, Vec<AtomDoc>>,
}

fn setting_id(key: &str) -> Result<u32> {
    key.trim()
        .parse()
        .map_err(|_| Error::InvalidModel(format!("setting id {key:?} is not a non-negative integer")))
}

fn setting_pair(key: &str) -> Result<(u32, u32)> {
    let (x, y) = key
        .split_once(',')
        .ok_or_else(|| Error::InvalidModel(format!("context key {key:?} is not \"x,y\"")))?;
    Ok((setting_id(x)?, setting_id(y)?))
}

fn responses(
    lambdas: &[String],
    doc: BTreeMap<String, BTreeMap<String, Number>>,
    wing: &str,
) -> Result<BTreeMap<u32, Vec<f64>>> {
    let mut out = BTreeMap::new();
    for (key, per_lambda) in doc {
        let setting = setting_id(&key)?;
        if let Some(extra) = per_lambda.keys().find(|k| !lambdas.contains(k)) {
            return Err(Error::InvalidModel(format!(
                "{wing}[{key}] names unknown hidden state {extra:?}"
            )));
        }
        let probs = lambdas
            .iter()
            .map(|l| {
                per_lambda
                    .get(l)
                    .ok_or_else(|| Error::InvalidModel(format!("{wing}[{key}] lacks {l:?}")))?
                    .value()
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(setting, probs);
    }
    Ok(out)
}

pub fn noncontextual_from_json(text: &str) -> Result<FiniteNoncontextualModel> {
    let doc: NoncontextualDoc = serde_json::from_str(text)?;
    let weights = doc.weights.iter().map(Number::value).collect::<Result<Vec<_>>>()?;
    let ra = responses(&doc.lambdas, doc.response_a, "response_a")?;
    let rb = responses(&doc.lambdas, doc.response_b, "response_b")?;
    FiniteNoncontextualModel::new(doc.lambdas, weights, ra, rb)
}

pub fn contextual_from_json(text: &str) -> Result<ContextualModel> {
    let doc: ContextualDoc = serde_json::from_str(text)?;
    let mut contexts = BTreeMap::new();
    for (key, atoms) in doc.contexts {
        let atoms = atoms
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                Ok(ContextAtom::new(
                    a.pair.unwrap_or(i as u32),
                    a.instrument.unwrap_or(0),
                    a.weight.value()?,
                    a.outcome[0],
                    a.outcome[1],
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        contexts.insert(setting_pair(&key)?, Context::new(atoms)?);
    }
    ContextualModel::new(contexts)
}

/// Parses either model family, dispatching on `kind` or on the presence of
/// `contexts`.
pub fn model_from_json(text: &str) -> Result<HiddenVariableModel> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let kind = value.get("kind").and_then(|k| k.as_str());
    match kind {
        Some("noncontextual") => Ok(noncontextual_from_json(text)?.into()),
        Some("contextual") => Ok(contextual_from_json(text)?.into()),
        Some(other) => Err(Error::InvalidModel(format!("unknown model kind {other:?}"))),
        None if value.get("contexts").is_some() => Ok(contextual_from_json(text)?.into()),
        None => Ok(noncontextual_from_json(text)?.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::joint_from_noncontextual;

    #[test]
    fn noncontextual_document() {
        let m = noncontextual_from_json(
            r#"{"lambdas":["l0","l1"],"weights":["0.75","1/4"],
                "response_a":{"0":{"l0":1,"l1":0}},
                "response_b":{"1":{"l0":0,"l1":"1"}}}"#,
        )
        .unwrap();
        let j = joint_from_noncontextual(&m, 0, 1).unwrap();
        assert_eq!((j.pm, j.mp), (0.75, 0.25));
    }

    #[test]
    fn contextual_document() {
        let m = model_from_json(
            r#"{"contexts":{"0,1":[
                {"pair":0,"instrument":0,"weight":"1/2","outcome":[1,-1]},
                {"pair":0,"instrument":1,"weight":0.5,"outcome":[-1,1]}]}}"#,
        )
        .unwrap();
        assert_eq!(m.exact_correlation(0, 1).unwrap(), -1.0);
        assert_eq!(m.exact_factorized_correlation(0, 1).unwrap(), 0.0);
    }

    #[test]
    fn malformed_documents() {
        assert!(model_from_json("{").is_err());
        assert!(model_from_json(r#"{"kind":"other"}"#).is_err());
        assert!(noncontextual_from_json(
            r#"{"lambdas":["l0"],"weights":[1],"response_a":{"0":{"lx":1}},"response_b":{}}"#
        )
        .is_err());
        assert!(contextual_from_json(r#"{"contexts":{"01":[]}}"#).is_err());
        assert!(contextual_from_json(
            r#"{"contexts":{"0,1":[{"weight":"2/3","outcome":[1,1]}]}}"#
        )
        .is_err());
        assert!(noncontextual_from_json(
            r#"{"lambdas":["l0"],"weights":[1],"response_a":{},"response_b":{},"extra":1}"#
        )
        .is_err());
    }
}
