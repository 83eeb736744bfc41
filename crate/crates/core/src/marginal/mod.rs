//! Joint-distribution existence for pairwise-measured ±1 variables.
//!
//! Given prescribed pair moments `E_ij = E[S_i S_j]` (and optionally single
//! means `E_i`) for `n ∈ {3, 4}` dichotomous variables, [`solve`] decides
//! exactly whether some distribution over the `2ⁿ` joint outcomes reproduces
//! them. A feasible problem yields a [`JointWitness`]; an infeasible one
//! yields an [`InfeasibilityCertificate`]: a linear inequality that holds at
//! every deterministic joint outcome and fails at the prescribed moments.
//!
//! The witness comes from a phase-1 simplex over the atom probabilities. The
//! certificate comes from a second LP over the polar of the correlation
//! polytope, whose vertices are exactly the polytope's facets, so the
//! returned inequality is always a facet (for three variables, one of the four
//! Boole triangle inequalities; for the four-cycle, a CHSH inequality).

mod boole;
mod facets;
pub mod json;
pub mod simplex;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, in_unit_interval, Rational};
use simplex::{solve_standard, LpOutcome};

pub use boole::{boole_check, boole_check_separate, pair_average, BooleReport, TripleDataset};
pub use facets::{chsh_facets, chsh_problem, min_slack, triple_facets, triple_problem};

/// Atom `k` of an `n`-variable problem: variable `i` is `-1` when bit
/// `n - 1 - i` of `k` is set, so atom 0 is all `+1`.
pub fn atom_signs(n: usize, k: usize) -> Vec<i8> {
    (0..n)
        .map(|i| if (k >> (n - 1 - i)) & 1 == 0 { 1 } else { -1 })
        .collect()
}

/// `"+-+"` style label of an atom.
pub fn atom_label(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalProblem {
    n: usize,
    pairs: BTreeMap<(usize, usize), Rational>,
    singles: BTreeMap<usize, Rational>,
}

impl MarginalProblem {
    pub fn new(
        n: usize,
        pairs: impl IntoIterator<Item = ((usize, usize), Rational)>,
        singles: impl IntoIterator<Item = (usize, Rational)>,
    ) -> Result<Self> {
        if !(3..=4).contains(&n) {
            return Err(Error::UnsupportedSize(n));
        }
        let mut pair_map = BTreeMap::new();
        for ((i, j), e) in pairs {
            if i == j || i >= n || j >= n {
                return Err(Error::InvalidProblem(format!("bad pair ({i}, {j}) for n = {n}")));
            }
            if !in_unit_interval(&e) {
                return Err(Error::OutOfRange(format_rational(&e)));
            }
            let key = (i.min(j), i.max(j));
            if pair_map.insert(key, e).is_some() {
                return Err(Error::InvalidProblem(format!("pair {key:?} given twice")));
            }
        }
        let mut single_map = BTreeMap::new();
        for (i, e) in singles {
            if i >= n {
                return Err(Error::InvalidProblem(format!("bad variable {i} for n = {n}")));
            }
            if !in_unit_interval(&e) {
                return Err(Error::OutOfRange(format_rational(&e)));
            }
            if single_map.insert(i, e).is_some() {
                return Err(Error::InvalidProblem(format!("variable {i} given twice")));
            }
        }
        Ok(Self {
            n,
            pairs: pair_map,
            singles: single_map,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.pairs
    }

    pub fn singles(&self) -> &BTreeMap<usize, Rational> {
        &self.singles
    }

    pub fn atom_count(&self) -> usize {
        1 << self.n
    }

    /// Values of the constrained moments at atom `k`, pairs first.
    fn atom_moments(&self, k: usize) -> Vec<i64> {
        let s = atom_signs(self.n, k);
        self.pairs
            .keys()
            .map(|&(i, j)| i64::from(s[i] * s[j]))
            .chain(self.singles.keys().map(|&i| i64::from(s[i])))
            .collect()
    }

    /// Prescribed moment values, in the same order as `atom_moments`.
    fn targets(&self) -> Vec<Rational> {
        self.pairs.values().chain(self.singles.values()).cloned().collect()
    }
}

/// A linear inequality `constant + Σ c_ij E_ij + Σ c_i E_i >= 0` over moments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub constant: Rational,
    pub pair_coefficients: BTreeMap<(usize, usize), Rational>,
    pub single_coefficients: BTreeMap<usize, Rational>,
}

impl Inequality {
    /// Left-hand side evaluated at the given moments; missing moments count
    /// as zero.
    pub fn evaluate(
        &self,
        pairs: &BTreeMap<(usize, usize), Rational>,
        singles: &BTreeMap<usize, Rational>,
    ) -> Rational {
        let mut v = self.constant.clone();
        for (k, c) in &self.pair_coefficients {
            if let Some(e) = pairs.get(k) {
                v += c * e;
            }
        }
        for (k, c) in &self.single_coefficients {
            if let Some(e) = singles.get(k) {
                v += c * e;
            }
        }
        v
    }

    /// Left-hand side at a deterministic joint outcome.
    pub fn evaluate_at_atom(&self, signs: &[i8]) -> Rational {
        let mut v = self.constant.clone();
        for (&(i, j), c) in &self.pair_coefficients {
            if signs[i] * signs[j] > 0 {
                v += c;
            } else {
                v -= c;
            }
        }
        for (&i, c) in &self.single_coefficients {
            if signs[i] > 0 {
                v += c;
            } else {
                v -= c;
            }
        }
        v
    }

    /// Holds at every deterministic outcome of `n` variables.
    pub fn is_valid_for(&self, n: usize) -> bool {
        (0..1usize << n).all(|k| !self.evaluate_at_atom(&atom_signs(n, k)).is_negative())
    }

    /// Rescales so that all coefficients are integers with no common factor
    /// larger than needed: multiplies by the lcm of the denominators.
    fn normalized(mut self) -> Self {
        let lcm = self
            .pair_coefficients
            .values()
            .chain(self.single_coefficients.values())
            .chain(std::iter::once(&self.constant))
            .fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = Rational::from_integer(lcm);
        self.constant *= &scale;
        self.pair_coefficients.values_mut().for_each(|c| *c *= &scale);
        self.single_coefficients.values_mut().for_each(|c| *c *= &scale);
        self.pair_coefficients.retain(|_, c| !c.is_zero());
        self.single_coefficients.retain(|_, c| !c.is_zero());
        self
    }
}

impl fmt::Display for Inequality {
    /// `1 - E01 + E02 - E12 >= 0`, variables numbered from 0.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.constant))?;
        let terms = self
            .pair_coefficients
            .iter()
            .map(|(&(i, j), c)| (format!("E{i}{j}"), c))
            .chain(self.single_coefficients.iter().map(|(&i, c)| (format!("E{i}"), c)));
        for (name, c) in terms {
            let sign = if c.is_negative() { '-' } else { '+' };
            let mag = c.abs();
            if mag.is_one() {
                write!(f, " {sign} {name}")?;
            } else {
                write!(f, " {sign} {}·{name}", format_rational(&mag))?;
            }
        }
        write!(f, " >= 0")
    }
}

/// A distribution over the `2ⁿ` joint outcomes reproducing every
/// constrained moment exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct JointWitness {
    n: usize,
    atom_probabilities: Vec<Rational>,
}

impl JointWitness {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.atom_probabilities
    }

    /// Atoms with positive probability as `(signs, probability)`.
    pub fn support(&self) -> Vec<(Vec<i8>, Rational)> {
        self.atom_probabilities
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_positive())
            .map(|(k, p)| (atom_signs(self.n, k), p.clone()))
            .collect()
    }

    pub fn pair_moment(&self, i: usize, j: usize) -> Rational {
        self.atom_probabilities
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (k, p)| {
                let s = atom_signs(self.n, k);
                if s[i] * s[j] > 0 {
                    acc + p
                } else {
                    acc - p
                }
            })
    }

    pub fn single_moment(&self, i: usize) -> Rational {
        self.atom_probabilities
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (k, p)| {
                if atom_signs(self.n, k)[i] > 0 {
                    acc + p
                } else {
                    acc - p
                }
            })
    }

    /// Non-negative, sums to one, and reproduces every constrained moment.
    pub fn verifies(&self, problem: &MarginalProblem) -> bool {
        self.n == problem.n
            && self.atom_probabilities.iter().all(|p| !p.is_negative())
            && self.atom_probabilities.iter().sum::<Rational>().is_one()
            && problem.pairs.iter().all(|(&(i, j), e)| self.pair_moment(i, j) == *e)
            && problem.singles.iter().all(|(&i, e)| self.single_moment(i) == *e)
    }
}

/// A facet inequality violated by the prescribed moments.
#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibilityCertificate {
    pub inequality: Inequality,
    /// Left-hand side at the prescribed moments; strictly negative.
    pub value_at_input: Rational,
}

impl InfeasibilityCertificate {
    /// Separating-hyperplane check over all `2ⁿ` atoms plus strict violation
    /// at the input.
    pub fn verifies(&self, problem: &MarginalProblem) -> bool {
        self.inequality.is_valid_for(problem.n)
            && self.value_at_input.is_negative()
            && self.inequality.evaluate(&problem.pairs, &problem.singles) == self.value_at_input
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Feasible(JointWitness),
    Infeasible(InfeasibilityCertificate),
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Solution::Feasible(_))
    }
}

pub fn solve(problem: &MarginalProblem) -> Result<Solution> {
    match find_witness(problem) {
        Some(witness) => {
            if !witness.verifies(problem) {
                return Err(Error::InvalidProblem("witness failed exact verification".into()));
            }
            Ok(Solution::Feasible(witness))
        }
        None => {
            let certificate = find_certificate(problem)?;
            if !certificate.verifies(problem) {
                return Err(Error::InvalidProblem("certificate failed exact verification".into()));
            }
            Ok(Solution::Infeasible(certificate))
        }
    }
}

/// Phase-1 feasibility over atom probabilities. Without single-variable
/// constraints the result is symmetrised under the global flip `s -> -s`,
/// which leaves every pair moment unchanged and sets all means to zero.
fn find_witness(problem: &MarginalProblem) -> Option<JointWitness> {
    let atoms = problem.atom_count();
    let moments: Vec<Vec<i64>> = (0..atoms).map(|k| problem.atom_moments(k)).collect();
    let targets = problem.targets();

    let mut a = vec![vec![Rational::one(); atoms]];
    let mut b = vec![Rational::one()];
    for (r, target) in targets.iter().enumerate() {
        a.push((0..atoms).map(|k| Rational::from_integer(moments[k][r].into())).collect());
        b.push(target.clone());
    }
    let c = vec![Rational::zero(); atoms];
    let LpOutcome::Optimal { x, .. } = solve_standard(&a, &b, &c) else {
        return None;
    };
    let probs = if problem.singles.is_empty() {
        let half = Rational::new(1.into(), 2.into());
        (0..atoms)
            .map(|k| (&x[k] + &x[k ^ (atoms - 1)]) * &half)
            .collect()
    } else {
        x
    };
    Some(JointWitness {
        n: problem.n,
        atom_probabilities: probs,
    })
}

/// Most violated facet via the polar LP
/// `min Σ y_r E_r  s.t.  1 + Σ y_r m_r(s) >= 0 for every atom s`,
/// with free `y` split as `u - v` and one slack per atom.
fn find_certificate(problem: &MarginalProblem) -> Result<InfeasibilityCertificate> {
    let atoms = problem.atom_count();
    let targets = problem.targets();
    let dim = targets.len();
    let cols = 2 * dim + atoms;
    let mut a = Vec::with_capacity(atoms);
    for k in 0..atoms {
        let m = problem.atom_moments(k);
        let mut row = vec![Rational::zero(); cols];
        for r in 0..dim {
            row[r] = Rational::from_integer((-m[r]).into());
            row[dim + r] = Rational::from_integer(m[r].into());
        }
        row[2 * dim + k] = Rational::one();
        a.push(row);
    }
    let b = vec![Rational::one(); atoms];
    let mut c = vec![Rational::zero(); cols];
    for r in 0..dim {
        c[r] = targets[r].clone();
        c[dim + r] = -targets[r].clone();
    }
    let LpOutcome::Optimal { x, .. } = solve_standard(&a, &b, &c) else {
        return Err(Error::InvalidProblem("separation LP did not reach an optimum".into()));
    };
    let y: Vec<Rational> = (0..dim).map(|r| &x[r] - &x[dim + r]).collect();
    let mut coeffs = y.into_iter();
    let inequality = Inequality {
        constant: Rational::one(),
        pair_coefficients: problem
            .pairs
            .keys()
            .map(|&k| (k, coeffs.next().expect("one coefficient per pair")))
            .collect(),
        single_coefficients: problem
            .singles
            .keys()
            .map(|&k| (k, coeffs.next().expect("one coefficient per single")))
            .collect(),
    }
    .normalized();
    let value_at_input = inequality.evaluate(&problem.pairs, &problem.singles);
    Ok(InfeasibilityCertificate {
        inequality,
        value_at_input,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn triple(e12: Rational, e13: Rational, e23: Rational) -> MarginalProblem {
        MarginalProblem::new(3, [((0, 1), e12), ((0, 2), e13), ((1, 2), e23)], []).unwrap()
    }

    #[test]
    fn atom_ordering() {
        assert_eq!(atom_signs(3, 0), vec![1, 1, 1]);
        assert_eq!(atom_signs(3, 1), vec![1, 1, -1]);
        assert_eq!(atom_signs(3, 7), vec![-1, -1, -1]);
        assert_eq!(atom_label(&atom_signs(3, 5)), "-+-");
    }

    #[test]
    fn perfect_correlation_witness() {
        let p = triple(int(1), int(1), int(1));
        let Solution::Feasible(w) = solve(&p).unwrap() else {
            panic!("expected feasible")
        };
        assert_eq!(
            w.support(),
            vec![(vec![1, 1, 1], rat(1, 2)), (vec![-1, -1, -1], rat(1, 2))]
        );
        assert!(w.verifies(&p));
    }

    #[test]
    fn parity_obstruction() {
        let p = triple(int(-1), int(-1), int(-1));
        let Solution::Infeasible(cert) = solve(&p).unwrap() else {
            panic!("expected infeasible")
        };
        assert_eq!(cert.inequality.constant, int(1));
        assert!(cert.inequality.pair_coefficients.values().all(|c| *c == int(1)));
        assert_eq!(cert.value_at_input, int(-2));
        assert_eq!(cert.inequality.to_string(), "1 + E01 + E02 + E12 >= 0");
    }

    #[test]
    fn collision_triple_certificate() {
        let p = triple(int(1), int(-1), rat(-1, 2));
        let Solution::Infeasible(cert) = solve(&p).unwrap() else {
            panic!("expected infeasible")
        };
        // E01 - E02 <= 1 - E12
        assert_eq!(cert.inequality.to_string(), "1 - E01 + E02 - E12 >= 0");
        assert_eq!(cert.value_at_input, rat(-1, 2));
        assert!(cert.verifies(&p));
    }

    #[test]
    fn singles_constrain_further() {
        // all pair moments zero is feasible, but forcing E0 = E1 = 1 makes E01 = 1
        let p = MarginalProblem::new(
            3,
            [((0, 1), int(0))],
            [(0, int(1)), (1, int(1))],
        )
        .unwrap();
        let Solution::Infeasible(cert) = solve(&p).unwrap() else {
            panic!("expected infeasible")
        };
        assert!(cert.verifies(&p));

        let p = MarginalProblem::new(3, [((0, 1), int(0))], [(0, rat(1, 2))]).unwrap();
        let Solution::Feasible(w) = solve(&p).unwrap() else {
            panic!("expected feasible")
        };
        assert_eq!(w.single_moment(0), rat(1, 2));
    }

    #[test]
    fn validation() {
        assert_eq!(
            MarginalProblem::new(5, [], []).unwrap_err(),
            Error::UnsupportedSize(5)
        );
        assert!(MarginalProblem::new(3, [((0, 0), int(1))], []).is_err());
        assert!(MarginalProblem::new(3, [((0, 3), int(1))], []).is_err());
        assert!(MarginalProblem::new(3, [((0, 1), rat(3, 2))], []).is_err());
        assert!(MarginalProblem::new(3, [((0, 1), int(1)), ((1, 0), int(1))], []).is_err());
    }

    #[test]
    fn display_fractional_coefficients() {
        let ineq = Inequality {
            constant: int(2),
            pair_coefficients: BTreeMap::from([((0, 2), rat(1, 2)), ((1, 3), int(-1))]),
            single_coefficients: BTreeMap::new(),
        };
        assert_eq!(ineq.to_string(), "2 + 1/2·E02 - E13 >= 0");
    }
}
