use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_normalized, check_probability, JointDistribution, SettingLabel};
use crate::error::{Error, Result};

/// Finite hidden-state model with a single setting-independent `P(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteNoncontextualModel {
    lambdas: Vec<String>,
    weights: Vec<f64>,
    /// setting id -> `P(a = +1 | x, λ)` indexed like `lambdas`.
    response_a: BTreeMap<u32, Vec<f64>>,
    /// setting id -> `P(b = +1 | y, λ)` indexed like `lambdas`.
    response_b: BTreeMap<u32, Vec<f64>>,
}

impl FiniteNoncontextualModel {
    pub fn new(
        lambdas: Vec<String>,
        weights: Vec<f64>,
        response_a: BTreeMap<u32, Vec<f64>>,
        response_b: BTreeMap<u32, Vec<f64>>,
    ) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidModel("no hidden states".into()));
        }
        if weights.len() != lambdas.len() {
            return Err(Error::InvalidModel(format!(
                "{} weights for {} hidden states",
                weights.len(),
                lambdas.len()
            )));
        }
        check_normalized(&weights, "weights")?;
        for (wing, responses) in [("response_a", &response_a), ("response_b", &response_b)] {
            for (setting, probs) in responses {
                if probs.len() != lambdas.len() {
                    return Err(Error::InvalidModel(format!(
                        "{wing}[{setting}] has {} entries for {} hidden states",
                        probs.len(),
                        lambdas.len()
                    )));
                }
                for (lambda, &p) in lambdas.iter().zip(probs) {
                    check_probability(p, &format!("{wing}[{setting}][{lambda}]"))?;
                }
            }
        }
        Ok(Self {
            lambdas,
            weights,
            response_a,
            response_b,
        })
    }

    /// Deterministic model from ±1 outcome functions `A(x, λ)`, `B(y, λ)`.
    pub fn deterministic(
        weights: Vec<f64>,
        outcomes_a: BTreeMap<u32, Vec<i8>>,
        outcomes_b: BTreeMap<u32, Vec<i8>>,
    ) -> Result<Self> {
        let lambdas = (0..weights.len()).map(|i| format!("l{i}")).collect();
        let to_prob = |m: BTreeMap<u32, Vec<i8>>| -> BTreeMap<u32, Vec<f64>> {
            m.into_iter()
                .map(|(k, v)| (k, v.into_iter().map(|o| if o >= 0 { 1.0 } else { 0.0 }).collect()))
                .collect()
        };
        Self::new(lambdas, weights, to_prob(outcomes_a), to_prob(outcomes_b))
    }

    /// Independent fair coins on both wings for the given settings.
    pub fn fair_coins(settings_a: &[u32], settings_b: &[u32]) -> Self {
        let half = |ids: &[u32]| ids.iter().map(|&s| (s, vec![0.5])).collect();
        Self::new(vec!["l0".into()], vec![1.0], half(settings_a), half(settings_b))
            .expect("fair coin model is valid")
    }

    /// Random model: weights are normalised uniform draws, responses are
    /// uniform on `[0, 1]`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n_lambdas: usize,
        settings_a: &[u32],
        settings_b: &[u32],
    ) -> Self {
        let n = n_lambdas.max(1);
        let mut weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + f64::MIN_POSITIVE).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut responses = |ids: &[u32]| -> BTreeMap<u32, Vec<f64>> {
            ids.iter()
                .map(|&s| (s, (0..n).map(|_| rng.random::<f64>()).collect()))
                .collect()
        };
        let response_a = responses(settings_a);
        let response_b = responses(settings_b);
        Self {
            lambdas: (0..n).map(|i| format!("l{i}")).collect(),
            weights,
            response_a,
            response_b,
        }
    }

    pub fn lambdas(&self) -> &[String] {
        &self.lambdas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn settings_a(&self) -> impl Iterator<Item = u32> + '_ {
        self.response_a.keys().copied()
    }

    pub fn settings_b(&self) -> impl Iterator<Item = u32> + '_ {
        self.response_b.keys().copied()
    }

    pub fn response_a(&self, x: u32) -> Result<&[f64]> {
        self.response_a
            .get(&x)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownSetting(x))
    }

    pub fn response_b(&self, y: u32) -> Result<&[f64]> {
        self.response_b
            .get(&y)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownSetting(y))
    }

    /// Every response probability is 0 or 1.
    pub fn is_deterministic(&self) -> bool {
        self.response_a
            .values()
            .chain(self.response_b.values())
            .flatten()
            .all(|&p| p == 0.0 || p == 1.0)
    }

    /// `Σ_λ P(λ) A(λ) B(λ)` for deterministic models; `None` otherwise.
    pub fn deterministic_correlation(&self, x: u32, y: u32) -> Result<Option<f64>> {
        if !self.is_deterministic() {
            return Ok(None);
        }
        let ra = self.response_a(x)?;
        let rb = self.response_b(y)?;
        let sign = |p: f64| if p == 1.0 { 1.0 } else { -1.0 };
        Ok(Some(
            self.weights
                .iter()
                .zip(ra.iter().zip(rb))
                .map(|(w, (&pa, &pb))| w * sign(pa) * sign(pb))
                .sum(),
        ))
    }
}

/// Exact mixture-of-products joint `Σ_λ P(λ) P(a|x,λ) P(b|y,λ)`.
pub fn joint_from_noncontextual(
    model: &FiniteNoncontextualModel,
    x: impl Into<SettingLabel>,
    y: impl Into<SettingLabel>,
) -> Result<JointDistribution> {
    let ra = model.response_a(x.into().id)?;
    let rb = model.response_b(y.into().id)?;
    let mut joint = JointDistribution::default();
    for (w, (&pa, &pb)) in model.weights.iter().zip(ra.iter().zip(rb)) {
        joint.pp += w * pa * pb;
        joint.pm += w * pa * (1.0 - pb);
        joint.mp += w * (1.0 - pa) * pb;
        joint.mm += w * (1.0 - pa) * (1.0 - pb);
    }
    Ok(joint)
}
