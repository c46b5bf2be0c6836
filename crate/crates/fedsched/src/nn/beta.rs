//! Beta-distribution head for bounded continuous actions.
//!
//! Raw network outputs map to concentration parameters through
//! `softplus(x) + 1`, which keeps both above 1 so the density is unimodal and
//! samples stay interior to (0, 1).

use rand_distr::Distribution;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Result, SimError};
use crate::rng::Stream;

/// Numerically stable ln(1 + e^x).
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Maps a raw network output to a concentration parameter in (1, inf).
/// The floor keeps the parameter strictly above 1 even when softplus
/// underflows for very negative inputs.
pub fn concentration(raw: f64) -> f64 {
    (softplus(raw) + 1.0).max(1.0 + 1e-6)
}

/// d(concentration)/d(raw).
pub fn concentration_grad(raw: f64) -> f64 {
    sigmoid(raw)
}

/// Log-density of Beta(alpha, beta) at x in (0, 1).
pub fn beta_logpdf(x: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(SimError::Domain(format!("beta_logpdf: x={x} outside (0,1)")));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(SimError::Domain(format!(
            "beta_logpdf: concentrations must be positive, got ({alpha}, {beta})"
        )));
    }
    let ln_b = ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta);
    Ok((alpha - 1.0) * x.ln() + (beta - 1.0) * (1.0 - x).ln() - ln_b)
}

/// Gradient of the log-density w.r.t. (alpha, beta).
pub fn beta_logpdf_grad(x: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let d_ab = digamma(alpha + beta);
    (
        x.ln() - digamma(alpha) + d_ab,
        (1.0 - x).ln() - digamma(beta) + d_ab,
    )
}

/// Draws from Beta(alpha, beta), nudged strictly inside (0, 1).
pub fn sample_beta(alpha: f64, beta: f64, rng: &mut Stream) -> f64 {
    let dist = rand_distr::Beta::new(alpha, beta).expect("positive concentrations");
    let x: f64 = dist.sample(rng);
    x.clamp(1e-12, 1.0 - 1e-12)
}
