use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::stats::{run_chunked, SeededStream};

/// `A = s·C`, `B = t·C` for a single source variable `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPairModel {
    s: f64,
    t: f64,
    c: Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPairMoments {
    pub e_a: f64,
    pub e_b: f64,
    pub e_ab: f64,
    pub cov: f64,
}

/// Sample moments of a simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPairSample {
    pub n: u64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_ab: f64,
    pub cov: f64,
    /// Standard error of the sample covariance, from the fourth-moment
    /// plug-in formula.
    pub cov_stderr: f64,
    /// Largest `|s·B - t·A|` over all trials.
    pub max_line_residual: f64,
}

impl ScaledPairModel {
    pub fn new(s: f64, t: f64, c: Density) -> Result<Self> {
        if !(s > 0.0 && t > 0.0 && s.is_finite() && t.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "scale factors must be positive, got s = {s}, t = {t}"
            )));
        }
        Ok(Self { s, t, c })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn source(&self) -> &Density {
        &self.c
    }

    /// Density of `A` at `x`: `f_C(x / s) / s`.
    pub fn density_a(&self, x: f64) -> f64 {
        self.c.pdf(x / self.s) / self.s
    }

    /// Density of `B` at `x`: `f_C(x / t) / t`.
    pub fn density_b(&self, x: f64) -> f64 {
        self.c.pdf(x / self.t) / self.t
    }

    /// Draws `n` pairs `(A, B)`, all on the line `B = (t / s) A`.
    pub fn sample_pairs(&self, n: u64, stream: &SeededStream) -> Vec<(f64, f64)> {
        run_chunked(n, stream, |rng, count| {
            (0..count)
                .map(|_| {
                    let c = self.c.sample(rng);
                    (self.s * c, self.t * c)
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()
    }
}

pub fn scaled_pair_moments(model: &ScaledPairModel) -> ScaledPairMoments {
    let (s, t, c) = (model.s, model.t, &model.c);
    ScaledPairMoments {
        e_a: s * c.mean(),
        e_b: t * c.mean(),
        e_ab: s * t * c.second_moment(),
        cov: s * t * c.variance(),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    n: u64,
    a: f64,
    b: f64,
    ab: f64,
    ab2: f64,
    residual: f64,
}

pub fn scaled_pair_simulate(
    model: &ScaledPairModel,
    n: u64,
    stream: &SeededStream,
) -> Result<ScaledPairSample> {
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    let (s, t) = (model.s, model.t);
    let total = run_chunked(n, stream, |rng, count| {
        let mut acc = Sums::default();
        for _ in 0..count {
            let c = model.c.sample(rng);
            let (a, b) = (s * c, t * c);
            acc.n += 1;
            acc.a += a;
            acc.b += b;
            acc.ab += a * b;
            acc.ab2 += (a * b) * (a * b);
            acc.residual = acc.residual.max((s * b - t * a).abs());
        }
        acc
    })
    .into_iter()
    .fold(Sums::default(), |x, y| Sums {
        n: x.n + y.n,
        a: x.a + y.a,
        b: x.b + y.b,
        ab: x.ab + y.ab,
        ab2: x.ab2 + y.ab2,
        residual: x.residual.max(y.residual),
    });
    let nf = total.n as f64;
    let (mean_a, mean_b, mean_ab) = (total.a / nf, total.b / nf, total.ab / nf);
    let cov = mean_ab - mean_a * mean_b;
    // Var(AB)/n dominates the sampling error of the covariance.
    let var_ab = (total.ab2 / nf - mean_ab * mean_ab).max(0.0);
    Ok(ScaledPairSample {
        n: total.n,
        mean_a,
        mean_b,
        mean_ab,
        cov,
        cov_stderr: (var_ab / nf).sqrt(),
        max_line_residual: total.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform01() -> Density {
        Density::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_moments() {
        let m = scaled_pair_moments(&ScaledPairModel::new(2.0, 3.0, uniform01()).unwrap());
        assert!((m.e_a - 1.0).abs() < 1e-15);
        assert!((m.e_b - 1.5).abs() < 1e-15);
        assert!((m.e_ab - 2.0).abs() < 1e-15);
        assert!((m.cov - 0.5).abs() < 1e-15);

        let m = scaled_pair_moments(&ScaledPairModel::new(1.0, 1.0, uniform01()).unwrap());
        assert!((m.cov - 1.0 / 12.0).abs() < 1e-15);

        let point = Density::uniform(0.7, 0.7).unwrap();
        let m = scaled_pair_moments(&ScaledPairModel::new(1.0, 1.0, point).unwrap());
        assert_eq!(m.cov, 0.0);
    }

    #[test]
    fn pairs_lie_on_support_line() {
        let model = ScaledPairModel::new(2.0, 3.0, uniform01()).unwrap();
        for (a, b) in model.sample_pairs(10_000, &SeededStream::new(1)) {
            assert_eq!(b * 2.0 - a * 3.0, 0.0);
        }
        let sample = scaled_pair_simulate(&model, 10_000, &SeededStream::new(1)).unwrap();
        assert_eq!(sample.max_line_residual, 0.0);
    }

    #[test]
    fn rejects_non_positive_scale() {
        assert!(ScaledPairModel::new(0.0, 1.0, uniform01()).is_err());
        assert!(ScaledPairModel::new(1.0, -1.0, uniform01()).is_err());
    }

    #[test]
    fn simulated_covariance() {
        let model = ScaledPairModel::new(2.0, 3.0, uniform01()).unwrap();
        let s = scaled_pair_simulate(&model, 1_000_000, &SeededStream::new(11)).unwrap();
        assert!((s.cov - 0.5).abs() <= 5.0 * s.cov_stderr, "{s:?}");
        assert!(s.mean_ab > s.mean_a * s.mean_b);
    }

    // Histogram of A = 2C against f_C(x / 2) / 2.
    #[test]
    fn histogram_of_scaled_variable() {
        let model = ScaledPairModel::new(2.0, 3.0, Density::triangular(0.0, 1.0).unwrap()).unwrap();
        let n = 400_000u64;
        let bins = 20usize;
        let width = 2.0 / bins as f64;
        let mut counts = vec![0u64; bins];
        for (a, _) in model.sample_pairs(n, &SeededStream::new(12)) {
            counts[((a / width) as usize).min(bins - 1)] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let mid = (i as f64 + 0.5) * width;
            let p = c as f64 / n as f64;
            let stderr = (p * (1.0 - p) / n as f64).sqrt() / width;
            let empirical = p / width;
            // midpoint rule error for a piecewise-linear density is zero away from the kink
            let expected = model.density_a(mid);
            assert!(
                (empirical - expected).abs() <= 5.0 * stderr + 1e-3,
                "bin {i}: {empirical} vs {expected}"
            );
        }
    }
}
