//! Small statistics helpers for Monte Carlo reporting.

use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided standard normal quantile `z` with `Pr(|Z| <= z) = confidence`.
pub fn z_two_sided(confidence: f64) -> f64 {
    let normal = Normal::standard();
    normal.inverse_cdf(0.5 + 0.5 * confidence)
}

/// Wilson score interval for a binomial proportion.
///
/// ```
/// let (lo, hi) = domlab::stats::wilson_interval(50, 100, 0.95);
/// assert!((lo - 0.404).abs() < 1e-3 && (hi - 0.596).abs() < 1e-3);
/// ```
///
/// # Panics
/// If `successes > trials`, `trials == 0`, or `confidence` is not in `(0, 1)`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(
        trials > 0 && successes <= trials,
        "need 0 <= successes <= trials, trials > 0"
    );
    assert!(
        confidence > 0.0 && confidence < 1.0,
        "confidence must lie in (0, 1)"
    );
    let z = z_two_sided(confidence);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Running mean and variance with integer-exact accumulation, so the
/// result does not depend on the order in which samples are merged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntMoments {
    pub count: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl IntMoments {
    pub fn push(&mut self, x: u64) {
        self.count += 1;
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as u128;
        // n Σx² - (Σx)² is an exact integer.
        let num = n * self.sum_sq - self.sum * self.sum;
        num as f64 / (n as f64 * (n - 1) as f64)
    }
}
