//! Macroscopic two-ball analogue of a correlated pair.
//!
//! A light ball of mass `m` is launched with random speed `V` at a heavy ball
//! of mass `M` at rest. After the head-on collision the heavy ball leaves with
//! speed `V₁` towards device D₁ and the light ball rebounds with speed `V₂`
//! towards device D₂. Each device feeds its speed to one of three threshold
//! detectors:
//!
//! | detector | `x < threshold` | `x >= threshold` |
//! |----------|-----------------|------------------|
//! | A        | -1 (x < 2)      | +1               |
//! | B        | -1 (x < 3)      | +1               |
//! | C        | +1 (x < 3)      | -1               |
//!
//! With `M = 4m` and a perfectly elastic collision, `V₁ = 2V/5` and
//! `V₂ = 3V/5`, so A on D₁ and B on D₂ always agree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::stats::{run_chunked, Estimate, PairSampleSummary, SeededStream};

/// Upper end of the admissible launch-speed range `(0, 10)`.
pub const MAX_SPEED: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionConfig {
    light_mass: f64,
    heavy_mass: f64,
    speed_density: Density,
    restitution: f64,
}

impl Default for CollisionConfig {
    /// `m = 1`, `M = 4`, `V ~ uniform(0, 10)`, elastic.
    fn default() -> Self {
        Self {
            light_mass: 1.0,
            heavy_mass: 4.0,
            speed_density: Density::Uniform { lo: 0.0, hi: MAX_SPEED },
            restitution: 1.0,
        }
    }
}

impl CollisionConfig {
    pub fn new(light_mass: f64, heavy_mass: f64, speed_density: Density, restitution: f64) -> Result<Self> {
        if !(light_mass > 0.0 && heavy_mass > light_mass && heavy_mass.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "masses must satisfy M > m > 0, got m = {light_mass}, M = {heavy_mass}"
            )));
        }
        if !(restitution > 0.0 && restitution <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "restitution must lie in (0, 1], got {restitution}"
            )));
        }
        if restitution * heavy_mass <= light_mass {
            return Err(Error::InvalidConfig(format!(
                "light ball does not rebound: e·M = {} <= m = {light_mass}",
                restitution * heavy_mass
            )));
        }
        let (lo, hi) = speed_density.support();
        if lo < 0.0 || hi > MAX_SPEED || hi <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "speed density {speed_density} must be supported within (0, {MAX_SPEED})"
            )));
        }
        Ok(Self {
            light_mass,
            heavy_mass,
            speed_density,
            restitution,
        })
    }

    pub fn with_density(self, density: Density) -> Result<Self> {
        Self::new(self.light_mass, self.heavy_mass, density, self.restitution)
    }

    pub fn with_restitution(self, restitution: f64) -> Result<Self> {
        Self::new(self.light_mass, self.heavy_mass, self.speed_density, restitution)
    }

    pub fn light_mass(&self) -> f64 {
        self.light_mass
    }

    pub fn heavy_mass(&self) -> f64 {
        self.heavy_mass
    }

    pub fn speed_density(&self) -> &Density {
        &self.speed_density
    }

    pub fn restitution(&self) -> f64 {
        self.restitution
    }

    pub fn is_elastic(&self) -> bool {
        self.restitution == 1.0
    }

    /// `(num, den)` with `V₁ = num₁·V/den` and `V₂ = num₂·V/den`.
    fn speed_factors(&self) -> (f64, f64, f64) {
        let (m, big, e) = (self.light_mass, self.heavy_mass, self.restitution);
        (m * (1.0 + e), e * big - m, m + big)
    }

    /// Launch speed at which the speed seen by `device` reaches `threshold`.
    fn launch_threshold(&self, device: Device, threshold: f64) -> f64 {
        let (n1, n2, den) = self.speed_factors();
        match device {
            Device::D1 => threshold * den / n1,
            Device::D2 => threshold * den / n2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Device {
    D1,
    D2,
}

/// Post-collision speeds `(V₁, V₂)` of the heavy and light ball.
pub fn collide(config: &CollisionConfig, v: f64) -> Result<(f64, f64)> {
    if v.is_nan() || v <= 0.0 {
        return Err(Error::NonPositiveSpeed(v));
    }
    let (n1, n2, den) = config.speed_factors();
    Ok((n1 * v / den, n2 * v / den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectorLabel {
    A,
    B,
    C,
}

impl FromStr for DetectorLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "A" | "a" => Ok(DetectorLabel::A),
            "B" | "b" => Ok(DetectorLabel::B),
            "C" | "c" => Ok(DetectorLabel::C),
            other => Err(format!("unknown detector {other:?} (expected A, B or C)")),
        }
    }
}

impl fmt::Display for DetectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Step detector: `sign_below` strictly below the threshold, `-sign_below` at
/// or above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDetector {
    pub label: DetectorLabel,
    pub threshold: f64,
    pub sign_below: i8,
}

impl ThresholdDetector {
    pub const A: ThresholdDetector = ThresholdDetector {
        label: DetectorLabel::A,
        threshold: 2.0,
        sign_below: -1,
    };
    pub const B: ThresholdDetector = ThresholdDetector {
        label: DetectorLabel::B,
        threshold: 3.0,
        sign_below: -1,
    };
    pub const C: ThresholdDetector = ThresholdDetector {
        label: DetectorLabel::C,
        threshold: 3.0,
        sign_below: 1,
    };

    pub fn of(label: DetectorLabel) -> Self {
        match label {
            DetectorLabel::A => Self::A,
            DetectorLabel::B => Self::B,
            DetectorLabel::C => Self::C,
        }
    }

    #[inline]
    fn fire(&self, speed: f64) -> i8 {
        if speed < self.threshold {
            self.sign_below
        } else {
            -self.sign_below
        }
    }
}

pub fn detect(detector: &ThresholdDetector, speed: f64) -> Result<i8> {
    if speed.is_nan() || speed <= 0.0 {
        return Err(Error::NonPositiveSpeed(speed));
    }
    Ok(detector.fire(speed))
}

/// Which detector reads the heavy ball (D₁) and which the light ball (D₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorAssignment {
    pub at_d1: ThresholdDetector,
    pub at_d2: ThresholdDetector,
}

impl DetectorAssignment {
    pub fn new(at_d1: DetectorLabel, at_d2: DetectorLabel) -> Self {
        Self {
            at_d1: ThresholdDetector::of(at_d1),
            at_d2: ThresholdDetector::of(at_d2),
        }
    }
}

impl fmt::Display for DetectorAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.at_d1.label, self.at_d2.label)
    }
}

impl FromStr for DetectorAssignment {
    type Err = String;

    /// `"A:B"` puts A on D₁ and B on D₂.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (d1, d2) = s
            .split_once(':')
            .ok_or_else(|| format!("expected D1:D2 detector pair such as A:B, got {s:?}"))?;
        Ok(Self::new(d1.parse()?, d2.parse()?))
    }
}

/// Launches `n` balls and records the detector outcome pair of each trial.
pub fn run_experiment(
    config: &CollisionConfig,
    assignment: &DetectorAssignment,
    n: u64,
    stream: &SeededStream,
) -> Result<PairSampleSummary> {
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    let (n1, n2, den) = config.speed_factors();
    let density = config.speed_density;
    let (d1, d2) = (assignment.at_d1, assignment.at_d2);
    Ok(run_chunked(n, stream, |rng, count| {
        let mut acc = PairSampleSummary::default();
        for _ in 0..count {
            let v = density.sample(rng);
            let (v1, v2) = (n1 * v / den, n2 * v / den);
            acc.record(d1.fire(v1), d2.fire(v2));
        }
        acc
    })
    .into_iter()
    .sum())
}

/// `E(BC)` with B on D₁ and C on D₂, from the speed law of `V₁`:
/// `P(2 <= V₁ < 3) - P(V₁ < 2) - P(3 <= V₁)`.
///
/// Requires the elastic `M = 4m` configuration, where C on D₂ switches
/// exactly when `V₁` crosses 2.
pub fn analytic_e_bc(config: &CollisionConfig) -> Result<f64> {
    let ratio = config.heavy_mass / config.light_mass;
    if !config.is_elastic() || (ratio - 4.0).abs() > 1e-12 {
        return Err(Error::InvalidConfig(
            "closed form needs an elastic collision with M = 4m".into(),
        ));
    }
    // V₁ = 2V/5
    let v1_interval = |a: f64, b: f64| config.speed_density.prob_interval(a * 2.5, b * 2.5);
    let mid = v1_interval(2.0, 3.0);
    let low = v1_interval(f64::NEG_INFINITY, 2.0);
    let high = v1_interval(3.0, f64::INFINITY);
    Ok(mid - low - high)
}

/// Exact `E(X Y)` for any assignment, by splitting the launch-speed axis at
/// the two speeds where the detectors switch.
pub fn analytic_correlation(config: &CollisionConfig, assignment: &DetectorAssignment) -> f64 {
    let t1 = config.launch_threshold(Device::D1, assignment.at_d1.threshold);
    let t2 = config.launch_threshold(Device::D2, assignment.at_d2.threshold);
    let cuts = [f64::NEG_INFINITY, t1.min(t2), t1.max(t2), f64::INFINITY];
    let sign = |det: &ThresholdDetector, t: f64, hi: f64| {
        f64::from(if hi <= t { det.sign_below } else { -det.sign_below })
    };
    cuts.windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            sign(&assignment.at_d1, t1, hi)
                * sign(&assignment.at_d2, t2, hi)
                * config.speed_density.prob_interval(lo, hi)
        })
        .sum()
}

/// `|E(AB) - E(AC)|` against `1 + E(BC)` and `1 - E(BC)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellTripleReport {
    pub lhs: f64,
    pub rhs_plus: f64,
    pub rhs_minus: f64,
    pub violated_plus: bool,
    pub violated_minus: bool,
    /// `lhs - min(rhs_plus, rhs_minus)`; positive means at least one form is
    /// violated.
    pub margin: f64,
}

pub fn check_bell_triple(e_ab: f64, e_ac: f64, e_bc: f64) -> Result<BellTripleReport> {
    for e in [e_ab, e_ac, e_bc] {
        if !(-1.0..=1.0).contains(&e) {
            return Err(Error::OutOfRange(e.to_string()));
        }
    }
    let lhs = (e_ab - e_ac).abs();
    let rhs_plus = 1.0 + e_bc;
    let rhs_minus = 1.0 - e_bc;
    Ok(BellTripleReport {
        lhs,
        rhs_plus,
        rhs_minus,
        violated_plus: lhs > rhs_plus,
        violated_minus: lhs > rhs_minus,
        margin: lhs - rhs_plus.min(rhs_minus),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderAsymmetry {
    pub e_ab: Estimate,
    pub e_ba: Estimate,
}

/// Runs A:B and B:A on substreams 0 and 1.
pub fn order_asymmetry(config: &CollisionConfig, n: u64, stream: &SeededStream) -> Result<OrderAsymmetry> {
    use DetectorLabel::{A, B};
    let ab = run_experiment(config, &DetectorAssignment::new(A, B), n, &stream.derive(0))?;
    let ba = run_experiment(config, &DetectorAssignment::new(B, A), n, &stream.derive(1))?;
    Ok(OrderAsymmetry {
        e_ab: ab.correlation()?,
        e_ba: ba.correlation()?,
    })
}

/// The three runs A:B, A:C and B:C with their Bell report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleRun {
    pub ab: PairSampleSummary,
    pub ac: PairSampleSummary,
    pub bc: PairSampleSummary,
    pub report: BellTripleReport,
}

/// Runs A:B, A:C and B:C on substreams 0, 1 and 2.
pub fn run_triple(config: &CollisionConfig, n: u64, stream: &SeededStream) -> Result<TripleRun> {
    use DetectorLabel::{A, B, C};
    let ab = run_experiment(config, &DetectorAssignment::new(A, B), n, &stream.derive(0))?;
    let ac = run_experiment(config, &DetectorAssignment::new(A, C), n, &stream.derive(1))?;
    let bc = run_experiment(config, &DetectorAssignment::new(B, C), n, &stream.derive(2))?;
    let report = check_bell_triple(
        ab.correlation()?.value,
        ac.correlation()?.value,
        bc.correlation()?.value,
    )?;
    Ok(TripleRun { ab, ac, bc, report })
}
