//! Streaming sample moments and binomial intervals.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// One-pass mean, variance and fourth central moment.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments<F = f64> {
    count: u64,
    mean: F,
    m2: F,
    m3: F,
    m4: F,
}

impl<F: Real> Moments<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: F) {
        let n1 = F::from_count(self.count);
        self.count += 1;
        let n = F::from_count(self.count);
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        let three = F::from_count(3);
        let six = F::from_count(6);
        let four = F::from_count(4);
        self.mean = self.mean + delta_n;
        self.m4 =
            self.m4 + term1 * delta_n2 * (n * n - three * n + three) + six * delta_n2 * self.m2
                - four * delta_n * self.m3;
        self.m3 = self.m3 + term1 * delta_n * (n - F::from_count(2)) - three * delta_n * self.m2;
        self.m2 = self.m2 + term1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> F {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> F {
        if self.count < 2 {
            F::zero()
        } else {
            self.m2 / F::from_count(self.count - 1)
        }
    }

    pub fn std_error(&self) -> F {
        if self.count == 0 {
            return F::zero();
        }
        (self.variance() / F::from_count(self.count)).sqrt()
    }

    /// Delta-method standard error of the sample variance:
    /// `sqrt((mu4 - sigma^4) / n)`.
    pub fn variance_std_error(&self) -> F {
        if self.count < 2 {
            return F::zero();
        }
        let n = F::from_count(self.count);
        let mu2 = self.m2 / n;
        let mu4 = self.m4 / n;
        ((mu4 - mu2 * mu2).max(F::zero()) / n).sqrt()
    }
}

impl<F: Real> Extend<F> for Moments<F> {
    fn extend<I: IntoIterator<Item = F>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl<F: Real> FromIterator<F> for Moments<F> {
    fn from_iter<I: IntoIterator<Item = F>>(iter: I) -> Self {
        let mut m = Self::new();
        m.extend(iter);
        m
    }
}

/// `sqrt(p (1 - p) / n)`.
pub fn proportion_std_error<F: Real>(p: F, trials: u64) -> F {
    if trials == 0 {
        return F::zero();
    }
    (p * (F::one() - p) / F::from_count(trials)).sqrt()
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval<F: Real>(successes: u64, trials: u64, z: F) -> (F, F) {
    if trials == 0 {
        return (F::zero(), F::one());
    }
    let n = F::from_count(trials);
    let p = F::from_count(successes) / n;
    let z2 = z * z;
    let two = F::from_count(2);
    let four = F::from_count(4);
    let denom = F::one() + z2 / n;
    let centre = (p + z2 / (two * n)) / denom;
    let half = z * (p * (F::one() - p) / n + z2 / (four * n * n)).sqrt() / denom;
    (
        (centre - half).max(F::zero()),
        (centre + half).min(F::one()),
    )
}

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Mean, standard error and Wilson interval of a 0/1 metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionSummary {
    pub successes: u64,
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl ProportionSummary {
    pub fn new(successes: u64, trials: u64) -> Self {
        let mean = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        let (wilson_low, wilson_high) = wilson_interval(successes, trials, Z95);
        Self {
            successes,
            trials,
            mean,
            std_error: proportion_std_error(mean, trials),
            wilson_low,
            wilson_high,
        }
    }
}
