//! Hardcoded facet lists for the two scenarios used throughout: the
//! three-variable triangle and the bipartite four-cycle.

use std::collections::BTreeMap;

use num_traits::One;

use super::{Inequality, MarginalProblem};
use crate::error::Result;
use crate::rational::{int, Rational};

/// Pair-moment problem `E01 = e12, E02 = e13, E12 = e23` on three variables.
pub fn triple_problem(e12: Rational, e13: Rational, e23: Rational) -> Result<MarginalProblem> {
    MarginalProblem::new(3, [((0, 1), e12), ((0, 2), e13), ((1, 2), e23)], [])
}

/// The four triangle facets `1 + σ₁E01 + σ₂E02 + σ₁σ₂E12 >= 0`, each with its
/// slack at `(e12, e13, e23)`, ordered by `(σ₁, σ₂)` = `(+,+), (+,-), (-,+), (-,-)`.
pub fn triple_facets(e12: &Rational, e13: &Rational, e23: &Rational) -> Vec<(Inequality, Rational)> {
    let pairs = BTreeMap::from([((0, 1), e12.clone()), ((0, 2), e13.clone()), ((1, 2), e23.clone())]);
    [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        .into_iter()
        .map(|(s1, s2)| {
            let ineq = Inequality {
                constant: Rational::one(),
                pair_coefficients: BTreeMap::from([
                    ((0, 1), int(s1)),
                    ((0, 2), int(s2)),
                    ((1, 2), int(s1 * s2)),
                ]),
                single_coefficients: BTreeMap::new(),
            };
            let slack = ineq.evaluate(&pairs, &BTreeMap::new());
            (ineq, slack)
        })
        .collect()
}

/// Four-cycle problem on `A1 = 0, A2 = 1, B1 = 2, B2 = 3` with the cross
/// moments `[E(A1,B1), E(A1,B2), E(A2,B1), E(A2,B2)]`; `A1A2` and `B1B2`
/// are left free.
pub fn chsh_problem(table: &[Rational; 4]) -> Result<MarginalProblem> {
    MarginalProblem::new(
        4,
        [
            ((0, 2), table[0].clone()),
            ((0, 3), table[1].clone()),
            ((1, 2), table[2].clone()),
            ((1, 3), table[3].clone()),
        ],
        [],
    )
}

/// The eight CHSH facets `2 + Σ σ_k E_k >= 0` with an odd number of negative
/// signs among the `σ_k`, with slacks. Entries follow [`chsh_problem`].
pub fn chsh_facets(table: &[Rational; 4]) -> Vec<(Inequality, Rational)> {
    let keys = [(0, 2), (0, 3), (1, 2), (1, 3)];
    let pairs: BTreeMap<_, _> = keys.iter().copied().zip(table.iter().cloned()).collect();
    (0u32..16)
        .filter(|mask| mask.count_ones() % 2 == 1)
        .map(|mask| {
            let coeffs = keys
                .iter()
                .enumerate()
                .map(|(k, &key)| (key, int(if (mask >> k) & 1 == 1 { -1 } else { 1 })))
                .collect();
            let ineq = Inequality {
                constant: int(2),
                pair_coefficients: coeffs,
                single_coefficients: BTreeMap::new(),
            };
            let slack = ineq.evaluate(&pairs, &BTreeMap::new());
            (ineq, slack)
        })
        .collect()
}

/// Facet with the smallest slack; the first one on ties.
pub fn min_slack(facets: &[(Inequality, Rational)]) -> Option<&(Inequality, Rational)> {
    facets.iter().min_by(|a, b| a.1.cmp(&b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::marginal::{atom_signs, solve, Solution};
    use crate::rational::{from_f64, rat};
    use proptest::prelude::*;

    #[test]
    fn zero_triple() {
        let z = int(0);
        assert!(triple_facets(&z, &z, &z).iter().all(|(_, s)| *s == int(1)));
    }

    #[test]
    fn collision_triple_minimum() {
        let f = triple_facets(&int(1), &int(-1), &rat(-1, 2));
        let (ineq, slack) = min_slack(&f).unwrap();
        assert_eq!(*slack, rat(-1, 2));
        assert_eq!(ineq.to_string(), "1 - E01 + E02 - E12 >= 0");
        // exactly one facet is violated
        let negatives = f.iter().filter(|(_, s)| s.is_negative()).count();
        assert_eq!(negatives, 1);
    }

    #[test]
    fn anti_triple_minimum() {
        let f = triple_facets(&int(-1), &int(-1), &int(-1));
        let (ineq, slack) = min_slack(&f).unwrap();
        assert_eq!(*slack, int(-2));
        assert_eq!(ineq.to_string(), "1 + E01 + E02 + E12 >= 0");
    }

    #[test]
    fn chsh_examples() {
        let z = int(0);
        let f = chsh_facets(&[z.clone(), z.clone(), z.clone(), z]);
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|(_, s)| *s == int(2)));

        // local vertex A1 = A2 = B1 = +1, B2 = -1
        let f = chsh_facets(&[int(1), int(-1), int(1), int(-1)]);
        assert_eq!(min_slack(&f).unwrap().1, int(0));

        // A1=B1, A1=B2, A2=B1 but A2=-B2: no local model
        let f = chsh_facets(&[int(1), int(1), int(1), int(-1)]);
        assert_eq!(min_slack(&f).unwrap().1, int(-2));

        let h = from_f64(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let f = chsh_facets(&[-h.clone(), h.clone(), -h.clone(), -h]);
        let min = crate::rational::to_f64(&min_slack(&f).unwrap().1);
        assert!((min - (2.0 - 2.0 * std::f64::consts::SQRT_2)).abs() < 1e-12);
    }

    // Brute force: every facet holds at every deterministic outcome; each
    // triangle facet is tight on the six atoms that are not constant.
    #[test]
    fn facets_are_valid_at_all_atoms() {
        for (ineq, _) in triple_facets(&int(0), &int(0), &int(0)) {
            assert!(ineq.is_valid_for(3));
            let tight = (0..8).filter(|&k| ineq.evaluate_at_atom(&atom_signs(3, k)) == int(0)).count();
            assert_eq!(tight, 6);
        }
        let z = int(0);
        for (ineq, _) in chsh_facets(&[z.clone(), z.clone(), z.clone(), z]) {
            assert!(ineq.is_valid_for(4));
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-12i64..=12).prop_map(|n| rat(n, 12))
    }

    proptest! {
        #[test]
        fn lp_agrees_with_triangle_facets(
            a in small_rational(), b in small_rational(), c in small_rational()
        ) {
            let facets = triple_facets(&a, &b, &c);
            let feasible = facets.iter().all(|(_, s)| !s.is_negative());
            let solution = solve(&triple_problem(a, b, c).unwrap()).unwrap();
            prop_assert_eq!(solution.is_feasible(), feasible);
            if let Solution::Infeasible(cert) = solution {
                let min = &min_slack(&facets).unwrap().1;
                prop_assert_eq!(&cert.value_at_input, min);
            }
        }
    }
}
