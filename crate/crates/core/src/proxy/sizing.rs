//! Batch retransmission sizing.
//!
//! When a duplicate Ack reveals a loss, every packet that entered the
//! pipe during the HARQ feedback gap is presumed lost with it. With packets
//! arriving at `alpha` per slot over a gap of `beta` slots, the expected
//! loss is `alpha * beta`; `gamma` adds the safety margin needed so that the
//! batch covers the real loss count with confidence `1 - epsilon`, assuming
//! the per-gap arrival count is normal with standard deviation `sigma`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf_inv;

/// Inputs to the batch-size calculation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BatchSizingParams {
    /// Packets per slot while the channel serves.
    pub alpha: f64,
    /// HARQ feedback delay in slots.
    pub beta_slots: u64,
    /// Standard deviation of the per-gap arrived packet count.
    pub sigma: f64,
    /// Confidence complement; the batch covers losses with prob. 1 - epsilon.
    pub epsilon: f64,
}

impl BatchSizingParams {
    pub fn gamma(&self) -> f64 {
        compute_gamma(self.alpha, self.beta_slots, self.sigma, self.epsilon)
    }

    pub fn batch_size(&self) -> u64 {
        batch_size(self.alpha, self.beta_slots, self.gamma())
    }
}

/// Smallest margin fraction `w >= 0` such that
/// `(1/2) * (1 + erf(alpha*beta*w / (beta*sigma*sqrt(2)))) >= 1 - epsilon`.
///
/// Beta cancels, leaving the closed form
/// `w = sigma * sqrt(2) / alpha * erf_inv(1 - 2*epsilon)`.
/// For `epsilon >= 0.5` the threshold already holds at `w = 0`.
pub fn compute_gamma(alpha: f64, beta_slots: u64, sigma: f64, epsilon: f64) -> f64 {
    assert!(alpha > 0.0, "alpha must be positive");
    assert!(beta_slots > 0, "beta must be positive");
    assert!(sigma >= 0.0, "sigma must be non-negative");
    assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    if epsilon >= 0.5 || sigma == 0.0 {
        return 0.0;
    }
    sigma * std::f64::consts::SQRT_2 / alpha * erf_inv(1.0 - 2.0 * epsilon)
}

/// Number of packets retransmitted per batch: `ceil(alpha * beta * (1 + gamma))`.
///
/// Rounding up keeps the batch covering at least the expected loss.
pub fn batch_size(alpha: f64, beta_slots: u64, gamma: f64) -> u64 {
    let raw = alpha * beta_slots as f64 * (1.0 + gamma);
    let n = raw.ceil() as u64;
    n.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erf;

    /// Independent route to gamma: bisect the monotone threshold predicate
    /// directly instead of inverting the error function.
    fn gamma_by_bisection(alpha: f64, beta_slots: u64, sigma: f64, epsilon: f64) -> f64 {
        let beta = beta_slots as f64;
        let meets = |w: f64| {
            0.5 * (1.0 + erf(alpha * beta * w / (beta * sigma * 2f64.sqrt()))) >= 1.0 - epsilon
        };
        if meets(0.0) {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while !meets(hi) {
            hi *= 2.0;
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if meets(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn table_parameters_give_gamma_near_point_two() {
        let g = compute_gamma(1.12, 10, 0.1, 0.01);
        assert!(g > 0.2070 && g < 0.2085, "gamma = {g}");
        let oracle = gamma_by_bisection(1.12, 10, 0.1, 0.01);
        assert!((g - oracle).abs() < 1e-9, "closed form {g} vs bisection {oracle}");
    }

    #[test]
    fn zero_sigma_means_zero_margin() {
        assert_eq!(compute_gamma(1.12, 10, 0.0, 0.01), 0.0);
    }

    #[test]
    fn quarter_epsilon_case() {
        // erf_inv(0.5) ~ 0.4769; gamma = 0.1*sqrt(2)/1.12 * erf_inv(0.5) ~ 0.0602.
        let g = compute_gamma(1.12, 10, 0.1, 0.25);
        let oracle = gamma_by_bisection(1.12, 10, 0.1, 0.25);
        assert!((g - oracle).abs() < 1e-9);
        assert!((g - 0.0602).abs() < 5e-4, "gamma = {g}");
    }

    #[test]
    fn epsilon_at_or_above_half_needs_no_margin() {
        assert_eq!(compute_gamma(1.12, 10, 0.1, 0.5), 0.0);
        assert_eq!(compute_gamma(1.12, 10, 0.1, 0.7), 0.0);
    }

    #[test]
    fn batch_size_rounds_up() {
        // 1.12 * 10 * 1.2 = 13.44 -> 14.
        assert_eq!(batch_size(1.12, 10, 0.2), 14);
        assert_eq!(batch_size(1.0, 1, 0.0), 1);
    }

    #[test]
    fn rounded_and_unrounded_gamma_agree_through_ceiling() {
        // 13.44 and 13.526 both land on 14.
        let exact = compute_gamma(1.12, 10, 0.1, 0.01);
        assert!((1.12 * 10.0 * (1.0 + exact) - 13.526).abs() < 5e-3);
        assert_eq!(batch_size(1.12, 10, exact), batch_size(1.12, 10, 0.2));
    }

    #[test]
    fn bisection_oracle_agrees_over_a_parameter_grid() {
        for &alpha in &[0.5, 1.12, 2.0, 8.96] {
            for &sigma in &[0.01, 0.1, 0.5] {
                for &eps in &[0.001, 0.01, 0.1, 0.25, 0.49] {
                    let closed = compute_gamma(alpha, 10, sigma, eps);
                    let oracle = gamma_by_bisection(alpha, 10, sigma, eps);
                    assert!(
                        (closed - oracle).abs() < 1e-9,
                        "alpha={alpha} sigma={sigma} eps={eps}: {closed} vs {oracle}"
                    );
                }
            }
        }
    }
}
