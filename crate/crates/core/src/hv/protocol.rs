use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{Context, ContextAtom, ContextualModel, FiniteNoncontextualModel, SettingLabel};
use crate::error::{Error, Result};
use crate::stats::{run_chunked, Estimate, PairSampleSummary, RunningSums, SeededStream};

/// Either model family, as accepted by the protocol simulators.
#[derive(Debug, Clone, PartialEq)]
pub enum HiddenVariableModel {
    Noncontextual(FiniteNoncontextualModel),
    Contextual(ContextualModel),
}

impl From<FiniteNoncontextualModel> for HiddenVariableModel {
    fn from(m: FiniteNoncontextualModel) -> Self {
        HiddenVariableModel::Noncontextual(m)
    }
}

impl From<ContextualModel> for HiddenVariableModel {
    fn from(m: ContextualModel) -> Self {
        HiddenVariableModel::Contextual(m)
    }
}

impl HiddenVariableModel {
    pub fn settings_a(&self) -> Vec<u32> {
        match self {
            HiddenVariableModel::Noncontextual(m) => m.settings_a().collect(),
            HiddenVariableModel::Contextual(m) => m.settings_a(),
        }
    }

    pub fn settings_b(&self) -> Vec<u32> {
        match self {
            HiddenVariableModel::Noncontextual(m) => m.settings_b().collect(),
            HiddenVariableModel::Contextual(m) => m.settings_b(),
        }
    }

    /// Exact `E(x, y)` under the coincidence protocol.
    pub fn exact_correlation(&self, x: u32, y: u32) -> Result<f64> {
        match self {
            HiddenVariableModel::Noncontextual(m) => {
                Ok(super::joint_from_noncontextual(m, x, y)?.correlation())
            }
            HiddenVariableModel::Contextual(m) => Ok(m.context(x, y)?.correlation()),
        }
    }

    /// Exact expectation of the repeated single-wing protocol estimate in the
    /// limit of many repeats.
    pub fn exact_factorized_correlation(&self, x: u32, y: u32) -> Result<f64> {
        match self {
            HiddenVariableModel::Noncontextual(m) => {
                Ok(super::joint_from_noncontextual(m, x, y)?.correlation())
            }
            HiddenVariableModel::Contextual(m) => Ok(m.context(x, y)?.factorized_correlation()),
        }
    }
}

fn weighted(weights: impl IntoIterator<Item = f64>) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| Error::InvalidModel(e.to_string()))
}

#[inline]
fn bernoulli_sign<R: Rng + ?Sized>(rng: &mut R, p_plus: f64) -> i8 {
    if rng.random::<f64>() < p_plus {
        1
    } else {
        -1
    }
}

/// Per-trial sampler for a single setting pair.
enum PairSampler<'a> {
    Noncontextual {
        lambdas: WeightedIndex<f64>,
        ra: &'a [f64],
        rb: &'a [f64],
    },
    Contextual {
        atoms: &'a [ContextAtom],
        index: WeightedIndex<f64>,
    },
}

impl<'a> PairSampler<'a> {
    fn new(model: &'a HiddenVariableModel, x: u32, y: u32) -> Result<Self> {
        match model {
            HiddenVariableModel::Noncontextual(m) => Ok(PairSampler::Noncontextual {
                lambdas: weighted(m.weights().iter().copied())?,
                ra: m.response_a(x)?,
                rb: m.response_b(y)?,
            }),
            HiddenVariableModel::Contextual(m) => {
                let ctx = m.context(x, y)?;
                Ok(PairSampler::Contextual {
                    atoms: ctx.atoms(),
                    index: weighted(ctx.atoms().iter().map(|a| a.weight))?,
                })
            }
        }
    }

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (i8, i8) {
        match self {
            PairSampler::Noncontextual { lambdas, ra, rb } => {
                let l = lambdas.sample(rng);
                (bernoulli_sign(rng, ra[l]), bernoulli_sign(rng, rb[l]))
            }
            PairSampler::Contextual { atoms, index } => {
                let atom = &atoms[index.sample(rng)];
                (atom.a, atom.b)
            }
        }
    }
}

/// Coincidence protocol: one hidden state and one outcome pair per trial.
pub fn simulate_coincidence(
    model: &HiddenVariableModel,
    x: impl Into<SettingLabel>,
    y: impl Into<SettingLabel>,
    n: u64,
    stream: &SeededStream,
) -> Result<PairSampleSummary> {
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    let sampler = PairSampler::new(model, x.into().id, y.into().id)?;
    Ok(run_chunked(n, stream, |rng, count| {
        let mut acc = PairSampleSummary::default();
        for _ in 0..count {
            let (a, b) = sampler.draw(rng);
            acc.record(a, b);
        }
        acc
    })
    .into_iter()
    .sum())
}

/// Source-component groups of a context: the group distribution and, per
/// group, the conditional distribution over its atoms.
struct GroupedContext<'a> {
    groups: WeightedIndex<f64>,
    members: Vec<(Vec<&'a ContextAtom>, WeightedIndex<f64>)>,
}

impl<'a> GroupedContext<'a> {
    fn new(ctx: &'a Context) -> Result<Self> {
        let mut by_pair: BTreeMap<u32, Vec<&ContextAtom>> = BTreeMap::new();
        for atom in ctx.atoms() {
            by_pair.entry(atom.pair).or_default().push(atom);
        }
        let mut group_weights = Vec::new();
        let mut members = Vec::new();
        for atoms in by_pair.into_values() {
            let w: f64 = atoms.iter().map(|a| a.weight).sum();
            if w <= 0.0 {
                continue;
            }
            let index = weighted(atoms.iter().map(|a| a.weight))?;
            group_weights.push(w);
            members.push((atoms, index));
        }
        Ok(Self {
            groups: weighted(group_weights)?,
            members,
        })
    }
}

/// The repeated single-wing protocol: for each emitted pair draw the hidden
/// state once and hold it, estimate `P(a | x, λ)` and `P(b | y, λ)` from
/// `n_repeats` separate measurements on each wing, and average the
/// factorised product `(2 P̂(a+) - 1)(2 P̂(b+) - 1)` over pairs.
///
/// For contextual models the held part of the hidden state is the source
/// component; every repeated measurement redraws the instrument component
/// from its conditional distribution.
///
/// The returned stderr is the sample standard deviation of the per-pair
/// products over `sqrt(n_pairs)`.
pub fn simulate_bell_protocol(
    model: &HiddenVariableModel,
    x: impl Into<SettingLabel>,
    y: impl Into<SettingLabel>,
    n_pairs: u64,
    n_repeats: u32,
    stream: &SeededStream,
) -> Result<Estimate> {
    if n_pairs == 0 || n_repeats == 0 {
        return Err(Error::ZeroTrials);
    }
    let (x, y) = (x.into().id, y.into().id);
    let repeats = f64::from(n_repeats);
    let product = |plus_a: u32, plus_b: u32| {
        (2.0 * f64::from(plus_a) / repeats - 1.0) * (2.0 * f64::from(plus_b) / repeats - 1.0)
    };
    let sums: Vec<RunningSums> = match model {
        HiddenVariableModel::Noncontextual(m) => {
            let lambdas = weighted(m.weights().iter().copied())?;
            let (ra, rb) = (m.response_a(x)?, m.response_b(y)?);
            run_chunked(n_pairs, stream, |rng, count| {
                let mut acc = RunningSums::default();
                for _ in 0..count {
                    let l = lambdas.sample(rng);
                    let plus_a = (0..n_repeats).filter(|_| rng.random::<f64>() < ra[l]).count();
                    let plus_b = (0..n_repeats).filter(|_| rng.random::<f64>() < rb[l]).count();
                    acc.push(product(plus_a as u32, plus_b as u32));
                }
                acc
            })
        }
        HiddenVariableModel::Contextual(m) => {
            let grouped = GroupedContext::new(m.context(x, y)?)?;
            run_chunked(n_pairs, stream, |rng, count| {
                let mut acc = RunningSums::default();
                for _ in 0..count {
                    let (atoms, index) = &grouped.members[grouped.groups.sample(rng)];
                    let plus_a = (0..n_repeats).filter(|_| atoms[index.sample(rng)].a > 0).count();
                    let plus_b = (0..n_repeats).filter(|_| atoms[index.sample(rng)].b > 0).count();
                    acc.push(product(plus_a as u32, plus_b as u32));
                }
                acc
            })
        }
    };
    sums.into_iter()
        .fold(RunningSums::default(), |a, b| a + b)
        .estimate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::{anticorrelated_coin, contextual_singlet};
    use std::f64::consts::FRAC_PI_3;

    const N: u64 = 200_000;

    #[test]
    fn deterministic_context_is_exact() {
        let ctx = Context::new(vec![
            ContextAtom::new(0, 0, 0.5, 1, -1),
            ContextAtom::new(1, 0, 0.5, -1, 1),
        ])
        .unwrap();
        let model: HiddenVariableModel =
            ContextualModel::new(BTreeMap::from([((0, 1), ctx)])).unwrap().into();
        let s = simulate_coincidence(&model, 0, 1, N, &SeededStream::new(1)).unwrap();
        let e = s.correlation().unwrap();
        assert_eq!(e.value, -1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn fair_coins_uncorrelated() {
        let model: HiddenVariableModel = FiniteNoncontextualModel::fair_coins(&[0], &[1]).into();
        let e = simulate_coincidence(&model, 0, 1, N, &SeededStream::new(2))
            .unwrap()
            .correlation()
            .unwrap();
        assert!(e.within(0.0, 5.0), "{e:?}");
        let b = simulate_bell_protocol(&model, 0, 1, N, 8, &SeededStream::new(3)).unwrap();
        assert!(b.within(0.0, 5.0), "{b:?}");
    }

    #[test]
    fn singlet_sixty_degrees() {
        let model: HiddenVariableModel =
            ContextualModel::singlet(&[(0, 0.0)], &[(1, FRAC_PI_3)]).into();
        let e = simulate_coincidence(&model, 0, 1, N, &SeededStream::new(4))
            .unwrap()
            .correlation()
            .unwrap();
        assert!(e.within(-0.5, 5.0), "{e:?}");
        assert_eq!(
            model.exact_correlation(0, 1).unwrap(),
            contextual_singlet(0.0, FRAC_PI_3).correlation()
        );
    }

    #[test]
    fn anticorrelated_coin_diverges() {
        let model: HiddenVariableModel = anticorrelated_coin(0, 1).into();
        let coincidence = simulate_coincidence(&model, 0, 1, N, &SeededStream::new(5))
            .unwrap()
            .correlation()
            .unwrap();
        assert_eq!(coincidence.value, -1.0);
        let bell = simulate_bell_protocol(&model, 0, 1, N, 16, &SeededStream::new(6)).unwrap();
        assert!(bell.within(0.0, 5.0), "{bell:?}");
        assert_eq!(model.exact_factorized_correlation(0, 1).unwrap(), 0.0);
    }

    #[test]
    fn deterministic_noncontextual_protocols_agree() {
        let model: HiddenVariableModel = FiniteNoncontextualModel::deterministic(
            vec![0.3, 0.7],
            BTreeMap::from([(0, vec![1, -1])]),
            BTreeMap::from([(1, vec![1, 1])]),
        )
        .unwrap()
        .into();
        // E = 0.3 - 0.7, and with 0/1 responses each wing estimate is exact
        let bell = simulate_bell_protocol(&model, 0, 1, N, 4, &SeededStream::new(7)).unwrap();
        let coinc = simulate_coincidence(&model, 0, 1, N, &SeededStream::new(8))
            .unwrap()
            .correlation()
            .unwrap();
        let combined = (bell.stderr.powi(2) + coinc.stderr.powi(2)).sqrt();
        assert!((bell.value - coinc.value).abs() <= 5.0 * combined);
        assert!(bell.within(-0.4, 5.0));
    }

    #[test]
    fn errors() {
        let model: HiddenVariableModel = anticorrelated_coin(0, 1).into();
        let s = SeededStream::new(0);
        assert_eq!(simulate_coincidence(&model, 0, 1, 0, &s), Err(Error::ZeroTrials));
        assert_eq!(
            simulate_coincidence(&model, 1, 1, 10, &s),
            Err(Error::UnknownContext(1, 1))
        );
        assert_eq!(simulate_bell_protocol(&model, 0, 1, 10, 0, &s), Err(Error::ZeroTrials));
    }
}
