use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_normalized, CorrelationTable, JointDistribution};
use crate::error::{Error, Result};

/// One hidden state of a context: a source component shared by both
/// particles, an instrument component, its probability and the outcome pair
/// it determines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextAtom {
    pub pair: u32,
    pub instrument: u32,
    pub weight: f64,
    pub a: i8,
    pub b: i8,
}

impl ContextAtom {
    pub fn new(pair: u32, instrument: u32, weight: f64, a: i8, b: i8) -> Self {
        Self {
            pair,
            instrument,
            weight,
            a,
            b,
        }
    }
}

/// The probability space `Λ_xy` of one setting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Context {
    atoms: Vec<ContextAtom>,
}

impl Context {
    pub fn new(atoms: Vec<ContextAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidModel("context has no hidden states".into()));
        }
        for atom in &atoms {
            if atom.a.abs() != 1 || atom.b.abs() != 1 {
                return Err(Error::InvalidModel(format!(
                    "outcome ({}, {}) is not in {{-1, +1}}²",
                    atom.a, atom.b
                )));
            }
        }
        let weights: Vec<f64> = atoms.iter().map(|a| a.weight).collect();
        check_normalized(&weights, "context weights")?;
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[ContextAtom] {
        &self.atoms
    }

    pub fn joint(&self) -> JointDistribution {
        let mut j = JointDistribution::default();
        for atom in &self.atoms {
            match (atom.a > 0, atom.b > 0) {
                (true, true) => j.pp += atom.weight,
                (true, false) => j.pm += atom.weight,
                (false, true) => j.mp += atom.weight,
                (false, false) => j.mm += atom.weight,
            }
        }
        j
    }

    pub fn correlation(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * f64::from(a.a) * f64::from(a.b))
            .sum()
    }

    /// Source components with positive total weight, each with its weight and
    /// its single-wing marginals `(P(a = +1 | pair), P(b = +1 | pair))`
    /// obtained by averaging over the instrument component.
    pub fn wing_marginals(&self) -> Vec<(u32, f64, f64, f64)> {
        let mut groups: BTreeMap<u32, (f64, f64, f64)> = BTreeMap::new();
        for atom in &self.atoms {
            let g = groups.entry(atom.pair).or_default();
            g.0 += atom.weight;
            if atom.a > 0 {
                g.1 += atom.weight;
            }
            if atom.b > 0 {
                g.2 += atom.weight;
            }
        }
        groups
            .into_iter()
            .filter(|(_, (w, _, _))| *w > 0.0)
            .map(|(pair, (w, pa, pb))| (pair, w, pa / w, pb / w))
            .collect()
    }

    /// Expected correlation under the repeated single-wing protocol:
    /// `Σ_pair P(pair) (2 P(a+|pair) - 1)(2 P(b+|pair) - 1)`.
    pub fn factorized_correlation(&self) -> f64 {
        self.wing_marginals()
            .into_iter()
            .map(|(_, w, pa, pb)| w * (2.0 * pa - 1.0) * (2.0 * pb - 1.0))
            .sum()
    }
}

/// Contexts keyed by setting pair `(x, y)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContextualModel {
    contexts: BTreeMap<(u32, u32), Context>,
}

impl ContextualModel {
    pub fn new(contexts: BTreeMap<(u32, u32), Context>) -> Result<Self> {
        if contexts.is_empty() {
            return Err(Error::InvalidModel("contextual model has no contexts".into()));
        }
        Ok(Self { contexts })
    }

    /// Singlet contexts for every combination of the given `(id, angle)`
    /// settings.
    pub fn singlet(settings_a: &[(u32, f64)], settings_b: &[(u32, f64)]) -> Self {
        let contexts = settings_a
            .iter()
            .flat_map(|&(x, ax)| {
                settings_b
                    .iter()
                    .map(move |&(y, by)| ((x, y), contextual_singlet(ax, by)))
            })
            .collect();
        Self { contexts }
    }

    pub fn context(&self, x: u32, y: u32) -> Result<&Context> {
        self.contexts.get(&(x, y)).ok_or(Error::UnknownContext(x, y))
    }

    pub fn contexts(&self) -> impl Iterator<Item = ((u32, u32), &Context)> {
        self.contexts.iter().map(|(&k, v)| (k, v))
    }

    pub fn settings_a(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.contexts.keys().map(|k| k.0).collect();
        v.dedup();
        v
    }

    pub fn settings_b(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.contexts.keys().map(|k| k.1).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn correlation_table(&self) -> CorrelationTable {
        let mut t = CorrelationTable::new();
        for (&(x, y), ctx) in &self.contexts {
            t.insert(x, y, ctx.correlation().clamp(-1.0, 1.0))
                .expect("clamped correlation is in range");
        }
        t
    }
}

/// Quantum singlet correlation `-cos(x - y)`.
pub fn singlet_correlation(x_angle: f64, y_angle: f64) -> f64 {
    -(x_angle - y_angle).cos()
}

/// Context whose four deterministic atoms carry the singlet probabilities
/// `P(a, b) = (1 - a b cos(x - y)) / 4`.
pub fn contextual_singlet(x_angle: f64, y_angle: f64) -> Context {
    let c = (x_angle - y_angle).cos();
    let atoms = [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)]
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let w = (1.0 - f64::from(a * b) * c) / 4.0;
            ContextAtom::new(i as u32, 0, w.max(0.0), a, b)
        })
        .collect();
    Context { atoms }
}

/// A single context `(x, y)` in which every emitted pair gives opposite
/// outcomes, but which of the two wings reads `+1` is decided by the
/// instrument component. With the source component held fixed each wing is a
/// fair coin.
pub fn anticorrelated_coin(x: u32, y: u32) -> ContextualModel {
    let ctx = Context::new(vec![
        ContextAtom::new(0, 0, 0.5, 1, -1),
        ContextAtom::new(0, 1, 0.5, -1, 1),
    ])
    .expect("anticorrelated coin context is valid");
    ContextualModel {
        contexts: BTreeMap::from([((x, y), ctx)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn singlet_at_equal_angles() {
        let j = contextual_singlet(0.0, 0.0).joint();
        assert_eq!((j.pm, j.mp, j.pp, j.mm), (0.5, 0.5, 0.0, 0.0));
        assert_eq!(j.correlation(), -1.0);
        // outcome pairs do not factorize: 1/2 != 1/4
        assert_eq!(j.marginal_a(1) * j.marginal_b(-1), 0.25);
        assert!(!j.factorizes(1e-9));
    }

    #[test]
    fn singlet_at_orthogonal_angles() {
        let j = contextual_singlet(0.0, FRAC_PI_2).joint();
        for p in [j.pp, j.pm, j.mp, j.mm] {
            assert!((p - 0.25).abs() < 1e-15);
        }
        assert!(j.correlation().abs() < 1e-15);
    }

    #[test]
    fn singlet_at_sixty_degrees() {
        let j = contextual_singlet(0.0, FRAC_PI_3).joint();
        assert!((j.pp - 0.125).abs() < 1e-15);
        assert!((j.mm - 0.125).abs() < 1e-15);
        assert!((j.pm - 0.375).abs() < 1e-15);
        assert!((j.mp - 0.375).abs() < 1e-15);
        assert!((j.correlation() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn anticorrelated_coin_marginals() {
        let m = anticorrelated_coin(0, 1);
        let ctx = m.context(0, 1).unwrap();
        assert_eq!(ctx.correlation(), -1.0);
        assert_eq!(ctx.wing_marginals(), vec![(0, 1.0, 0.5, 0.5)]);
        assert_eq!(ctx.factorized_correlation(), 0.0);
        assert_eq!(m.context(1, 0).unwrap_err(), Error::UnknownContext(1, 0));
    }

    #[test]
    fn deterministic_context_factorizes() {
        let ctx = contextual_singlet(0.3, 1.1);
        assert!((ctx.factorized_correlation() - ctx.correlation()).abs() < 1e-15);
    }

    #[test]
    fn invalid_outcome_rejected() {
        assert!(Context::new(vec![ContextAtom::new(0, 0, 1.0, 0, 1)]).is_err());
        assert!(Context::new(vec![ContextAtom::new(0, 0, 0.5, 1, 1)]).is_err());
    }
}
