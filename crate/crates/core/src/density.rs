//! Closed-form one-dimensional densities used for the collision speed `V`
//! and the scaled-pair source variable `C`.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A density family with support `[lo, hi]`.
///
/// `lo == hi` is accepted and denotes a point mass.
/// `Triangular` is the symmetric triangle with its mode at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Density {
    Uniform { lo: f64, hi: f64 },
    Triangular { lo: f64, hi: f64 },
}

impl Density {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::Uniform { lo, hi }.validated()
    }

    pub fn triangular(lo: f64, hi: f64) -> Result<Self> {
        Self::Triangular { lo, hi }.validated()
    }

    fn validated(self) -> Result<Self> {
        let (lo, hi) = self.support();
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidDensity(format!(
                "support [{lo}, {hi}] must be a finite interval with lo <= hi"
            )));
        }
        Ok(self)
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Density::Uniform { lo, hi } | Density::Triangular { lo, hi } => (lo, hi),
        }
    }

    pub fn is_point_mass(&self) -> bool {
        let (lo, hi) = self.support();
        lo == hi
    }

    pub fn mean(&self) -> f64 {
        let (lo, hi) = self.support();
        0.5 * (lo + hi)
    }

    pub fn variance(&self) -> f64 {
        let (lo, hi) = self.support();
        let w = hi - lo;
        match self {
            Density::Uniform { .. } => w * w / 12.0,
            Density::Triangular { .. } => w * w / 24.0,
        }
    }

    pub fn second_moment(&self) -> f64 {
        let m = self.mean();
        self.variance() + m * m
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let w = hi - lo;
        match self {
            Density::Uniform { .. } => (x - lo) / w,
            Density::Triangular { .. } => {
                let mid = 0.5 * (lo + hi);
                if x < mid {
                    2.0 * (x - lo) * (x - lo) / (w * w)
                } else {
                    1.0 - 2.0 * (hi - x) * (hi - x) / (w * w)
                }
            }
        }
    }

    /// `P(a <= X < b)`, exact for point masses as well.
    pub fn prob_interval(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if self.is_point_mass() {
            let c = self.support().0;
            return if a <= c && c < b { 1.0 } else { 0.0 };
        }
        (self.cdf(b) - self.cdf(a)).max(0.0)
    }

    /// Density value; zero for point masses.
    pub fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if self.is_point_mass() || x < lo || x > hi {
            return 0.0;
        }
        let w = hi - lo;
        match self {
            Density::Uniform { .. } => 1.0 / w,
            Density::Triangular { .. } => {
                let mid = 0.5 * (lo + hi);
                let d = (x - mid).abs();
                (2.0 / w) * (1.0 - 2.0 * d / w)
            }
        }
    }

    /// Inverse-CDF draw from an open-interval uniform, so samples never land
    /// on the support endpoints.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (lo, hi) = self.support();
        let w = hi - lo;
        let u: f64 = rng.sample(Open01);
        match self {
            Density::Uniform { .. } => lo + w * u,
            Density::Triangular { .. } => {
                if u < 0.5 {
                    lo + w * (0.5 * u).sqrt()
                } else {
                    hi - w * (0.5 * (1.0 - u)).sqrt()
                }
            }
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            Density::Triangular { lo, hi } => write!(f, "triangular:{lo}:{hi}"),
        }
    }
}

impl FromStr for Density {
    type Err = Error;

    /// Parses `uniform:LO:HI` or `triangular:LO:HI`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDensity(format!("expected FAMILY:LO:HI, got {s:?}"));
        let mut parts = s.split(':');
        let family = parts.next().ok_or_else(bad)?;
        let lo: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        match family.trim() {
            "uniform" => Density::uniform(lo, hi),
            "triangular" => Density::triangular(lo, hi),
            other => Err(Error::InvalidDensity(format!("unknown family {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::SeededStream;

    #[test]
    fn parse_and_display() {
        let d: Density = "uniform:0:10".parse().unwrap();
        assert_eq!(d, Density::Uniform { lo: 0.0, hi: 10.0 });
        assert_eq!(d.to_string(), "uniform:0:10");
        assert!("triangular:0:10".parse::<Density>().is_ok());
        assert!("gauss:0:1".parse::<Density>().is_err());
        assert!("uniform:3:1".parse::<Density>().is_err());
        assert!("uniform:0".parse::<Density>().is_err());
    }

    #[test]
    fn triangular_tail() {
        let d = Density::triangular(0.0, 10.0).unwrap();
        assert!((d.prob_interval(7.5, 10.0) - 0.125).abs() < 1e-15);
        assert!((d.prob_interval(5.0, 7.5) - 0.375).abs() < 1e-15);
        assert!((d.cdf(5.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn point_mass_interval() {
        let d = Density::uniform(9.0, 9.0).unwrap();
        assert_eq!(d.prob_interval(7.5, 10.0), 1.0);
        assert_eq!(d.prob_interval(9.0, 9.5), 1.0);
        assert_eq!(d.prob_interval(5.0, 9.0), 0.0);
        assert_eq!(d.variance(), 0.0);
    }

    // Trapezoid quadrature of the pdf reproduces cdf, mean and variance.
    #[test]
    fn moments_match_quadrature() {
        for d in [
            Density::uniform(0.0, 1.0).unwrap(),
            Density::triangular(0.0, 10.0).unwrap(),
            Density::triangular(-2.0, 3.0).unwrap(),
        ] {
            let (lo, hi) = d.support();
            let steps = 200_000;
            let h = (hi - lo) / steps as f64;
            let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
            for i in 0..=steps {
                let x = lo + i as f64 * h;
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                let p = d.pdf(x) * w * h;
                m0 += p;
                m1 += p * x;
                m2 += p * x * x;
            }
            assert!((m0 - 1.0).abs() < 1e-6, "{d}");
            assert!((m1 - d.mean()).abs() < 1e-6, "{d}");
            assert!((m2 - d.second_moment()).abs() < 1e-5, "{d}");
        }
    }

    #[test]
    fn samples_stay_inside_open_support() {
        let mut rng = SeededStream::new(3).rng();
        for d in [Density::uniform(0.0, 10.0).unwrap(), Density::triangular(0.0, 10.0).unwrap()] {
            for _ in 0..100_000 {
                let x = d.sample(&mut rng);
                assert!(x > 0.0 && x < 10.0);
            }
        }
    }
}
