//! Closed-form upper bounds on the bottom of the (essential) spectrum in
//! terms of an exponential growth rate `μ` and a jump size `δ`.
//!
//! | bound        | value                                   |
//! |--------------|-----------------------------------------|
//! | Brooks-type  | `μ² / 4`                                |
//! | jump-refined | `2 (e^{μ/2} − 1)² / (δ² e^{μ} + 1)`     |
//! | normalized   | `1 − 2 e^{μ/2} / (1 + e^{μ})`           |
//!
//! When the metric satisfies the full adaptedness convention the first two
//! may be divided by 2. Infinite growth gives infinite (vacuous) bounds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("growth rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("jump size δ = {0} lies outside [0, 1]; rescale the metric first")]
    DeltaOutOfRange(f64),
}

fn check_rate(mu: f64) -> Result<(), BoundError> {
    if mu >= 0.0 {
        Ok(())
    } else {
        Err(BoundError::NegativeRate(mu))
    }
}

fn halve(v: f64, halved: bool) -> f64 {
    if halved {
        v / 2.0
    } else {
        v
    }
}

/// `μ² / 4`, halved under the full convention.
pub fn brooks_bound(mu: f64, halved: bool) -> Result<f64, BoundError> {
    check_rate(mu)?;
    Ok(halve(mu * mu / 4.0, halved))
}

/// `2 (e^{μ/2} − 1)² / (δ² e^{μ} + 1)`, halved under the full convention.
pub fn jump_bound(mu: f64, delta: f64, halved: bool) -> Result<f64, BoundError> {
    check_rate(mu)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(BoundError::DeltaOutOfRange(delta));
    }
    if mu.is_infinite() {
        return Ok(f64::INFINITY);
    }
    // numerator and denominator divided by e^{μ}
    let em = (-mu).exp();
    let v = 2.0 * (-(-mu / 2.0).exp_m1()).powi(2) / (delta * delta + em);
    Ok(halve(v, halved))
}

/// `1 − 2 e^{μ/2} / (1 + e^{μ}) = 1 − sech(μ/2)`.
pub fn normalized_bound(mu: f64) -> Result<f64, BoundError> {
    check_rate(mu)?;
    // (1 − e^{−μ/2})² / (1 + e^{−μ}), free of cancellation near μ = 0
    Ok((-mu / 2.0).exp_m1().powi(2) / (1.0 + (-mu).exp()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateLabel {
    /// Exponential growth from a fixed root; paired with the essential spectrum.
    Mu,
    /// Minimal exponential growth over centers; paired with the spectrum bottom.
    MuTilde,
}

impl RateLabel {
    pub fn target(self) -> &'static str {
        match self {
            RateLabel::Mu => "lambda0_ess",
            RateLabel::MuTilde => "lambda0",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub rate: RateLabel,
    /// Spectral quantity these bounds apply to.
    pub target: String,
    pub mu: f64,
    pub delta: Option<f64>,
    pub halved: bool,
    pub brooks: f64,
    pub jump_refined: Option<f64>,
    pub normalized: f64,
}

impl BoundSet {
    /// `delta` must already lie in `[0, 1]` and `mu` be measured in the
    /// same (possibly rescaled) metric.
    pub fn compute(
        rate: RateLabel,
        mu: f64,
        delta: Option<f64>,
        halved: bool,
    ) -> Result<Self, BoundError> {
        Ok(BoundSet {
            rate,
            target: rate.target().to_string(),
            mu,
            delta,
            halved,
            brooks: brooks_bound(mu, halved)?,
            jump_refined: delta.map(|d| jump_bound(mu, d, halved)).transpose()?,
            normalized: normalized_bound(mu)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn brooks_examples() {
        assert_eq!(brooks_bound(0.0, false).unwrap(), 0.0);
        assert_eq!(brooks_bound(2.0, false).unwrap(), 1.0);
        assert_eq!(brooks_bound(2.0, true).unwrap(), 0.5);
        assert_eq!(brooks_bound(f64::INFINITY, false).unwrap(), f64::INFINITY);
        assert_eq!(brooks_bound(-1.0, false), Err(BoundError::NegativeRate(-1.0)));
    }

    #[test]
    fn jump_examples() {
        for d in [0.0, 0.3, 1.0] {
            assert_eq!(jump_bound(0.0, d, false).unwrap(), 0.0);
        }
        let mu = 1.7f64;
        assert_relative_eq!(
            jump_bound(mu, 0.0, false).unwrap(),
            2.0 * ((mu / 2.0).exp() - 1.0).powi(2),
            max_relative = 1e-14
        );
        let v = jump_bound(9f64.ln(), 1.0, false).unwrap();
        assert_relative_eq!(v, 0.8, max_relative = 1e-14);
        assert!(v < brooks_bound(9f64.ln(), false).unwrap());
        assert_relative_eq!(brooks_bound(9f64.ln(), false).unwrap(), 1.2069, epsilon = 1e-4);
        assert_eq!(jump_bound(1.0, 1.5, false), Err(BoundError::DeltaOutOfRange(1.5)));
        assert_eq!(jump_bound(f64::INFINITY, 0.5, false).unwrap(), f64::INFINITY);
    }

    #[test]
    fn normalized_examples() {
        assert_eq!(normalized_bound(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            normalized_bound(3f64.ln()).unwrap(),
            1.0 - 3f64.sqrt() / 2.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(normalized_bound(3f64.ln()).unwrap(), 0.13397, epsilon = 1e-5);
        assert_eq!(normalized_bound(f64::INFINITY).unwrap(), 1.0);
        assert!(normalized_bound(60.0).unwrap() < 1.0);
    }

    #[test]
    fn direct_formula_agrees_for_moderate_rates() {
        for i in 0..=200 {
            let mu = i as f64 * 0.05;
            for delta in [0.0, 0.25, 0.8, 1.0] {
                let direct = 2.0 * ((mu / 2.0).exp() - 1.0).powi(2) / (delta * delta * mu.exp() + 1.0);
                assert_relative_eq!(
                    jump_bound(mu, delta, false).unwrap(),
                    direct,
                    max_relative = 1e-12,
                    epsilon = 1e-300
                );
            }
            let direct = 1.0 - 2.0 * (mu / 2.0).exp() / (1.0 + mu.exp());
            assert_relative_eq!(normalized_bound(mu).unwrap(), direct, epsilon = 1e-14);
        }
    }

    #[test]
    fn bound_set_labels() {
        let b = BoundSet::compute(RateLabel::MuTilde, 2.0, Some(1.0), true).unwrap();
        assert_eq!(b.target, "lambda0");
        assert_eq!(b.brooks, 0.5);
        assert!(b.jump_refined.unwrap() > 0.0);
    }
}
