//! Hidden-variable models of two-wing ±1 coincidence experiments.
//!
//! Two families live here:
//!
//! * [`FiniteNoncontextualModel`]: one hidden-state space `Λ` with one
//!   distribution `P(λ)` shared by every setting pair, and single-wing
//!   response probabilities `P(a | x, λ)`, `P(b | y, λ)`. The joint is the
//!   mixture of products `Σ_λ P(λ) P(a|x,λ) P(b|y,λ)`. Responses in `{0, 1}`
//!   give the deterministic realistic model `E(AB) = Σ_λ P(λ) A(λ) B(λ)`.
//! * [`ContextualModel`]: each setting pair `(x, y)` has its own space
//!   `Λ_xy` and distribution. A hidden state is the pair of a source
//!   component (shared by both particles) and an instrument component
//!   (describing the two analysers at measurement time), and fixes the
//!   outcome pair deterministically.
//!
//! [`simulate_coincidence`] runs the actual coincidence protocol (one outcome
//! pair per emitted pair). [`simulate_bell_protocol`] runs the repeated
//! single-wing re-measurement procedure that the factorised model implicitly
//! assumes, holding the source component fixed while the instrument
//! component is redrawn.

mod chsh;
mod contextual;
pub mod file;
mod noncontextual;
mod protocol;
mod scaled_pair;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chsh::{chsh_value, deterministic_strategy_chsh, max_chsh_over_deterministic};
pub use contextual::{
    anticorrelated_coin, contextual_singlet, singlet_correlation, Context, ContextAtom,
    ContextualModel,
};
pub use noncontextual::{joint_from_noncontextual, FiniteNoncontextualModel};
pub use protocol::{simulate_bell_protocol, simulate_coincidence, HiddenVariableModel};
pub use scaled_pair::{
    scaled_pair_moments, scaled_pair_simulate, ScaledPairModel, ScaledPairMoments,
    ScaledPairSample,
};

/// Tolerance on probability normalisation.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// A measurement setting: an id unique within a scenario and an optional
/// analyser angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingLabel {
    pub id: u32,
    pub angle: Option<f64>,
}

impl SettingLabel {
    pub fn new(id: u32) -> Self {
        Self { id, angle: None }
    }

    pub fn with_angle(id: u32, angle: f64) -> Self {
        Self {
            id,
            angle: Some(angle),
        }
    }
}

impl From<u32> for SettingLabel {
    fn from(id: u32) -> Self {
        Self::new(id)
    }
}

/// A distribution over the four outcome pairs `{-1, +1}²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointDistribution {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl JointDistribution {
    pub fn get(&self, a: i8, b: i8) -> f64 {
        match (a >= 0, b >= 0) {
            (true, true) => self.pp,
            (true, false) => self.pm,
            (false, true) => self.mp,
            (false, false) => self.mm,
        }
    }

    pub fn total(&self) -> f64 {
        self.pp + self.pm + self.mp + self.mm
    }

    pub fn correlation(&self) -> f64 {
        self.pp + self.mm - self.pm - self.mp
    }

    /// `P(a)` on the first wing.
    pub fn marginal_a(&self, a: i8) -> f64 {
        if a >= 0 {
            self.pp + self.pm
        } else {
            self.mp + self.mm
        }
    }

    /// `P(b)` on the second wing.
    pub fn marginal_b(&self, b: i8) -> f64 {
        if b >= 0 {
            self.pp + self.mp
        } else {
            self.pm + self.mm
        }
    }

    /// True when `P(a,b) = P(a) P(b)` for every outcome pair.
    pub fn factorizes(&self, tol: f64) -> bool {
        [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            .iter()
            .all(|&(a, b)| (self.get(a, b) - self.marginal_a(a) * self.marginal_b(b)).abs() <= tol)
    }
}

/// Correlations `E(x, y)` keyed by setting pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    entries: BTreeMap<(u32, u32), f64>,
}

impl CorrelationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: u32, y: u32, e: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&e) {
            return Err(Error::OutOfRange(e.to_string()));
        }
        self.entries.insert((x, y), e);
        Ok(())
    }

    pub fn with(mut self, x: u32, y: u32, e: f64) -> Result<Self> {
        self.insert(x, y, e)?;
        Ok(self)
    }

    pub fn get(&self, x: u32, y: u32) -> Result<f64> {
        self.entries
            .get(&(x, y))
            .copied()
            .ok_or(Error::MissingEntry(x, y))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub(crate) fn check_probability(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidModel(format!("{what} = {p} is not a probability")));
    }
    Ok(())
}

pub(crate) fn check_normalized(weights: &[f64], what: &str) -> Result<()> {
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidModel(format!("{what}[{i}] = {w} is negative")));
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::InvalidModel(format!(
            "{what} sum to {total}, expected 1"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rejects_out_of_range() {
        let mut t = CorrelationTable::new();
        assert!(t.insert(0, 1, 1.5).is_err());
        assert!(t.insert(0, 1, -1.0).is_ok());
        assert_eq!(t.get(0, 2), Err(Error::MissingEntry(0, 2)));
    }

    #[test]
    fn normalisation_check() {
        assert!(check_normalized(&[0.25, 0.75], "w").is_ok());
        assert!(check_normalized(&[0.25, 0.7], "w").is_err());
        assert!(check_normalized(&[-0.25, 1.25], "w").is_err());
    }
}
