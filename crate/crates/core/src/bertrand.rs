//! Bertrand's chord question under three sampling protocols.
//!
//! Two concentric circles with radii `R = 1` and `R/2`: what is the
//! probability that a random chord of the outer circle meets the inner one?
//! Each protocol below is a different random experiment and has a different
//! answer.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{run_chunked, Estimate, SeededStream};

/// Radius of the inner circle relative to the outer radius `R = 1`.
pub const INNER_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BertrandProtocol {
    /// Parallel chords at a uniformly distributed signed offset.
    RandomOffset,
    /// Chords sharing one endpoint, the other endpoint uniform on the circle.
    RandomEndpoints,
    /// Chords whose midpoint is uniform over the disk.
    RandomMidpoint,
}

impl BertrandProtocol {
    pub const ALL: [BertrandProtocol; 3] = [
        BertrandProtocol::RandomOffset,
        BertrandProtocol::RandomEndpoints,
        BertrandProtocol::RandomMidpoint,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BertrandProtocol::RandomOffset => "offset",
            BertrandProtocol::RandomEndpoints => "endpoints",
            BertrandProtocol::RandomMidpoint => "midpoint",
        }
    }
}

impl fmt::Display for BertrandProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BertrandProtocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "offset" => Ok(BertrandProtocol::RandomOffset),
            "endpoints" => Ok(BertrandProtocol::RandomEndpoints),
            "midpoint" => Ok(BertrandProtocol::RandomMidpoint),
            other => Err(format!(
                "unknown protocol {other:?} (expected offset, endpoints or midpoint)"
            )),
        }
    }
}

/// A chord of the unit circle, described by its distance from the centre
/// and its direction in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub center_distance: f64,
    pub direction_angle: f64,
}

impl Chord {
    /// Chord of the parallel family at signed offset `d ∈ (-1, 1)`.
    pub fn from_offset(d: f64) -> Self {
        Self {
            center_distance: d.abs(),
            direction_angle: 0.0,
        }
    }

    /// Chord from the point at angle 0 to the point at angle `phi`.
    pub fn from_endpoint_angle(phi: f64) -> Self {
        let direction = (0.5 * (phi + PI)).rem_euclid(PI);
        Self {
            center_distance: (0.5 * phi).cos().abs(),
            direction_angle: direction,
        }
    }

    /// Chord with midpoint at polar coordinates `(r, theta)`.
    pub fn from_midpoint(r: f64, theta: f64) -> Self {
        let direction = if r == 0.0 {
            0.0
        } else {
            (theta + 0.5 * PI).rem_euclid(PI)
        };
        Self {
            center_distance: r,
            direction_angle: direction,
        }
    }

    /// True iff the chord meets the inner circle; tangency counts.
    pub fn cuts_inner(&self) -> bool {
        self.center_distance <= INNER_RADIUS
    }
}

pub fn chord_cuts_inner(chord: &Chord) -> bool {
    chord.cuts_inner()
}

pub fn sample_chord<R: Rng + ?Sized>(protocol: BertrandProtocol, rng: &mut R) -> Chord {
    let u: f64 = rng.sample(Open01);
    match protocol {
        BertrandProtocol::RandomOffset => Chord::from_offset(2.0 * u - 1.0),
        BertrandProtocol::RandomEndpoints => Chord::from_endpoint_angle(TAU * u),
        BertrandProtocol::RandomMidpoint => {
            let theta: f64 = TAU * rng.sample::<f64, _>(Open01);
            Chord::from_midpoint(u.sqrt(), theta)
        }
    }
}

pub fn analytic_probability(protocol: BertrandProtocol) -> Rational64 {
    match protocol {
        BertrandProtocol::RandomOffset => Rational64::new(1, 2),
        BertrandProtocol::RandomEndpoints => Rational64::new(1, 3),
        BertrandProtocol::RandomMidpoint => Rational64::new(1, 4),
    }
}

/// Monte Carlo fraction of chords that cut the inner circle.
pub fn estimate_probability(
    protocol: BertrandProtocol,
    n: u64,
    stream: &SeededStream,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    let hits: u64 = run_chunked(n, stream, |rng, count| {
        (0..count)
            .filter(|_| sample_chord(protocol, rng).cuts_inner())
            .count() as u64
    })
    .into_iter()
    .sum();
    Estimate::from_proportion(hits, n)
}

/// Mean chord distance from the centre, for checking the sampled law.
pub fn mean_center_distance(
    protocol: BertrandProtocol,
    n: u64,
    stream: &SeededStream,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    run_chunked(n, stream, |rng, count| {
        let mut acc = crate::stats::RunningSums::default();
        for _ in 0..count {
            acc.push(sample_chord(protocol, rng).center_distance);
        }
        acc
    })
    .into_iter()
    .fold(crate::stats::RunningSums::default(), |a, b| a + b)
    .estimate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameters() {
        assert_eq!(Chord::from_offset(0.0).center_distance, 0.0);
        assert!(Chord::from_endpoint_angle(PI).center_distance.abs() < 1e-15);
        assert!(Chord::from_offset(0.0).cuts_inner());
    }

    #[test]
    fn endpoint_at_two_thirds_pi() {
        let c = Chord::from_endpoint_angle(2.0 * PI / 3.0);
        assert!((c.center_distance - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tangency_counts() {
        assert!(chord_cuts_inner(&Chord::from_offset(0.5)));
        assert!(!chord_cuts_inner(&Chord::from_offset(1.0)));
    }

    #[test]
    fn degenerate_midpoint_direction() {
        assert_eq!(Chord::from_midpoint(0.0, 1.3).direction_angle, 0.0);
    }

    #[test]
    fn analytic_values_distinct() {
        let v: Vec<_> = BertrandProtocol::ALL.iter().map(|&p| analytic_probability(p)).collect();
        assert_eq!(v, vec![Rational64::new(1, 2), Rational64::new(1, 3), Rational64::new(1, 4)]);
        assert!(v[0] != v[1] && v[1] != v[2] && v[0] != v[2]);
    }

    #[test]
    fn single_trial_is_zero_or_one() {
        for seed in 0..20 {
            let e = estimate_probability(BertrandProtocol::RandomEndpoints, 1, &SeededStream::new(seed))
                .unwrap();
            assert!(e.value == 0.0 || e.value == 1.0);
        }
    }

    #[test]
    fn zero_trials_rejected() {
        assert_eq!(
            estimate_probability(BertrandProtocol::RandomOffset, 0, &SeededStream::new(1)),
            Err(Error::ZeroTrials)
        );
    }

    #[test]
    fn sampled_directions_in_range() {
        let mut rng = SeededStream::new(2).rng();
        for p in BertrandProtocol::ALL {
            for _ in 0..10_000 {
                let c = sample_chord(p, &mut rng);
                assert!((0.0..PI).contains(&c.direction_angle));
                assert!((0.0..=1.0).contains(&c.center_distance));
            }
        }
    }

    #[test]
    fn protocol_names_round_trip() {
        for p in BertrandProtocol::ALL {
            assert_eq!(p.name().parse::<BertrandProtocol>().unwrap(), p);
        }
        assert!("nope".parse::<BertrandProtocol>().is_err());
    }
}
