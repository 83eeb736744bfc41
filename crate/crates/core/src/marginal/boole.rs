//! Boole's condition on data: pair averages taken from one data set of
//! triples always satisfy the triangle facets; averages taken from three
//! separate data sets of pairs need not.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::facets::{min_slack, triple_facets};
use super::Inequality;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::stats::PairSampleSummary;

/// Rows `(S1, S2, S3)` of ±1 values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleDataset {
    rows: Vec<[i8; 3]>,
}

impl TripleDataset {
    pub fn new(rows: Vec<[i8; 3]>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptySample);
        }
        if rows.iter().flatten().any(|v| v.abs() != 1) {
            return Err(Error::InvalidProblem("dataset values must be ±1".into()));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[[i8; 3]] {
        &self.rows
    }

    /// The pair columns `(S_i, S_j)` summarised as outcome counts.
    pub fn pair_summary(&self, i: usize, j: usize) -> PairSampleSummary {
        let mut s = PairSampleSummary::default();
        for row in &self.rows {
            s.record(row[i], row[j]);
        }
        s
    }
}

/// Exact average of the products in a pair sample.
pub fn pair_average(summary: &PairSampleSummary) -> Result<Rational> {
    let n = summary.total();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let concordant = BigInt::from(summary.n_pp) + BigInt::from(summary.n_mm);
    let discordant = BigInt::from(summary.n_pm) + BigInt::from(summary.n_mp);
    Ok(Rational::new(concordant - discordant, BigInt::from(n)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BooleReport {
    /// `[avg S1S2, avg S1S3, avg S2S3]`.
    pub averages: [Rational; 3],
    pub facets: Vec<(Inequality, Rational)>,
    pub min_slack: Rational,
    /// True when all three averages were taken from the same rows.
    pub single_dataset: bool,
}

impl BooleReport {
    fn from_averages(averages: [Rational; 3], single_dataset: bool) -> Self {
        let facets = triple_facets(&averages[0], &averages[1], &averages[2]);
        let min_slack = min_slack(&facets).expect("four facets").1.clone();
        Self {
            averages,
            facets,
            min_slack,
            single_dataset,
        }
    }

    pub fn violated(&self) -> bool {
        self.min_slack.is_negative()
    }
}

pub fn boole_check(dataset: &TripleDataset) -> Result<BooleReport> {
    let averages = [
        pair_average(&dataset.pair_summary(0, 1))?,
        pair_average(&dataset.pair_summary(0, 2))?,
        pair_average(&dataset.pair_summary(1, 2))?,
    ];
    Ok(BooleReport::from_averages(averages, true))
}

/// Three separately collected pair samples for `(S1,S2)`, `(S1,S3)` and
/// `(S2,S3)`. Nothing ties them to a common set of triples, so the report may
/// show negative slacks.
pub fn boole_check_separate(
    s12: &PairSampleSummary,
    s13: &PairSampleSummary,
    s23: &PairSampleSummary,
) -> Result<BooleReport> {
    let averages = [pair_average(s12)?, pair_average(s13)?, pair_average(s23)?];
    Ok(BooleReport::from_averages(averages, false))
}
