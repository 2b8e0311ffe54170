//! Laplace and Gaussian mechanisms.
//!
//! Both samplers use inverse-transform style draws with a fixed number of
//! uniform variates (one for Laplace, two for Gaussian), so the noise stream
//! of a run is a deterministic function of its seed and of the order of the
//! draws.

use core::f64::consts::PI;

use crate::num::{cos, ln, sqrt};
use crate::rng::UniformStream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mechanism {
    Laplace,
    Gaussian,
    /// No noise. Not private; exists so the auditor has a known violator.
    Disabled,
}

/// Parameters of one noise draw on a statistic with the given sensitivity,
/// averaged over `pull_count` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub delta: f64,
    pub pull_count: usize,
    pub sensitivity: f64,
}

impl NoiseSpec {
    /// `Lap(1/(ε·n))` on an empirical mean of `n` rewards.
    pub fn laplace(epsilon: f64, pull_count: usize) -> Result<Self> {
        Self::new(Mechanism::Laplace, epsilon, 0.0, pull_count, 1.0)
    }

    /// `N(0, 2·ln(1.25/δ)/(ε·n)²)` on an empirical mean of `n` rewards.
    pub fn gaussian(epsilon: f64, delta: f64, pull_count: usize) -> Result<Self> {
        Self::new(Mechanism::Gaussian, epsilon, delta, pull_count, 1.0)
    }

    pub fn disabled(pull_count: usize) -> Self {
        Self { mechanism: Mechanism::Disabled, epsilon: f64::INFINITY, delta: 0.0, pull_count, sensitivity: 0.0 }
    }

    pub fn new(mechanism: Mechanism, epsilon: f64, delta: f64, pull_count: usize, sensitivity: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if pull_count == 0 {
            return Err(Error::ZeroPulls);
        }
        if mechanism == Mechanism::Gaussian && !(delta > 0.0 && delta < 1.0) {
            return Err(Error::GaussianDelta(delta));
        }
        Ok(Self { mechanism, epsilon, delta, pull_count, sensitivity })
    }

    fn denominator(&self) -> f64 {
        self.epsilon * self.pull_count as f64
    }

    /// Laplace scale `b`, or Gaussian standard deviation `σ`.
    pub fn scale(&self) -> f64 {
        match self.mechanism {
            Mechanism::Laplace => self.sensitivity / self.denominator(),
            Mechanism::Gaussian => sqrt(self.variance()),
            Mechanism::Disabled => 0.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.mechanism {
            Mechanism::Laplace => {
                let b = self.scale();
                2.0 * b * b
            }
            Mechanism::Gaussian => {
                let d = self.denominator();
                2.0 * ln(1.25 / self.delta) * self.sensitivity * self.sensitivity / (d * d)
            }
            Mechanism::Disabled => 0.0,
        }
    }

    /// One noise draw.
    pub fn sample(&self, stream: &mut UniformStream) -> f64 {
        match self.mechanism {
            Mechanism::Laplace => laplace_from_uniform(self.scale(), stream.next_uniform()),
            Mechanism::Gaussian => {
                let u1 = stream.next_uniform();
                let u2 = stream.next_uniform();
                self.scale() * standard_normal_from_uniforms(u1, u2)
            }
            Mechanism::Disabled => {
                let _ = stream.next_uniform();
                0.0
            }
        }
    }

    /// Analytic CDF of the noise.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.mechanism {
            Mechanism::Laplace => laplace_cdf(self.scale(), x),
            Mechanism::Gaussian => normal_cdf(self.scale(), x),
            Mechanism::Disabled => {
                if x < 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

pub fn laplace_noise(spec: &NoiseSpec, stream: &mut UniformStream) -> Result<f64> {
    if spec.mechanism != Mechanism::Laplace {
        return Err(Error::MechanismMismatch("Laplace"));
    }
    Ok(spec.sample(stream))
}

pub fn gaussian_noise(spec: &NoiseSpec, stream: &mut UniformStream) -> Result<f64> {
    if spec.mechanism != Mechanism::Gaussian {
        return Err(Error::MechanismMismatch("Gaussian"));
    }
    Ok(spec.sample(stream))
}

/// Inverse CDF of `Lap(b)` at `u ∈ (0, 1)`.
#[inline]
pub fn laplace_from_uniform(scale: f64, u: f64) -> f64 {
    if u < 0.5 {
        scale * ln(2.0 * u)
    } else {
        -scale * ln(2.0 * (1.0 - u))
    }
}

/// Box–Muller, cosine branch only.
#[inline]
pub fn standard_normal_from_uniforms(u1: f64, u2: f64) -> f64 {
    sqrt(-2.0 * ln(u1)) * cos(2.0 * PI * u2)
}

pub fn laplace_cdf(scale: f64, x: f64) -> f64 {
    if scale == 0.0 {
        return if x < 0.0 { 0.0 } else { 1.0 };
    }
    if x < 0.0 {
        0.5 * libm::exp(x / scale)
    } else {
        1.0 - 0.5 * libm::exp(-x / scale)
    }
}

pub fn normal_cdf(sigma: f64, x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / (sigma * core::f64::consts::SQRT_2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn gaussian_variance_formula() {
        let s = NoiseSpec::gaussian(1.0, 0.05, 100).unwrap();
        let want = 2.0 * libm::log(25.0) / 1e4;
        assert!((s.variance() - want).abs() < 1e-18);
        assert!((s.variance() - 6.438e-4).abs() < 1e-6);
    }

    #[test]
    fn gaussian_rejects_bad_delta() {
        assert_eq!(NoiseSpec::gaussian(1.0, 1.25, 10), Err(Error::GaussianDelta(1.25)));
        assert_eq!(NoiseSpec::gaussian(1.0, 0.0, 10), Err(Error::GaussianDelta(0.0)));
        assert_eq!(NoiseSpec::laplace(0.0, 10), Err(Error::InvalidEpsilon(0.0)));
        assert_eq!(NoiseSpec::laplace(1.0, 0), Err(Error::ZeroPulls));
    }

    #[test]
    fn laplace_scale_and_quantile() {
        let s = NoiseSpec::laplace(1.0, 1000).unwrap();
        assert!((s.scale() - 0.001).abs() < 1e-18);
        // P(|X| > t) = exp(-t/b) = 0.001 at t = b·ln(1000) ≈ 0.0069.
        let t = 0.001 * libm::log(1000.0);
        assert!((t - 0.0069).abs() < 1e-4);
        let mut st = UniformStream::from_seed_u64(3);
        let n = 100_000;
        let inside = (0..n).filter(|_| s.sample(&mut st).abs() <= t).count();
        let p = inside as f64 / n as f64;
        let sigma = libm::sqrt(0.999 * 0.001 / n as f64);
        assert!((p - 0.999).abs() < 4.0 * sigma, "{p}");
    }

    #[test]
    fn laplace_median_and_tail() {
        let s = NoiseSpec::laplace(2.0, 5).unwrap();
        let b = s.scale();
        let mut st = UniformStream::from_seed_u64(11);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| s.sample(&mut st)).collect();
        xs.sort_by(f64::total_cmp);
        let median = xs[n / 2];
        assert!(median.abs() < 4.0 * b / libm::sqrt(n as f64));
        let t = 3.0 * b;
        let tail = xs.iter().filter(|x| x.abs() > t).count() as f64 / n as f64;
        let p = libm::exp(-3.0);
        assert!((tail - p).abs() < 3.0 * libm::sqrt(p * (1.0 - p) / n as f64));
    }

    #[test]
    fn inverse_cdf_roundtrip() {
        for &u in &[1e-9, 0.1, 0.5, 0.77, 1.0 - 1e-9] {
            let x = laplace_from_uniform(0.3, u);
            assert!((laplace_cdf(0.3, x) - u).abs() < 1e-9);
        }
    }

    #[test]
    fn fixed_consumption() {
        let lap = NoiseSpec::laplace(1.0, 1).unwrap();
        let gau = NoiseSpec::gaussian(1.0, 0.1, 1).unwrap();
        let mut a = UniformStream::from_seed_u64(1);
        let mut b = UniformStream::from_seed_u64(1);
        lap.sample(&mut a);
        gau.sample(&mut a);
        for _ in 0..3 {
            b.next_uniform();
        }
        assert_eq!(a.next_uniform(), b.next_uniform());
    }
}
