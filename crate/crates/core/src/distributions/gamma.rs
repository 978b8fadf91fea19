use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::pmf::DiscretePmf;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special_math::{regularized_gamma_p, regularized_gamma_q};

/// Draw from `Gam(1/2, 2g)`, i.e. `g·N²` for a standard normal `N`.
pub fn gamma_half_sample(g: f64, rng: &mut RngStream) -> Result<f64> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::domain("gamma_half_sample", format!("g must be positive, got {g}")));
    }
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let x = g * z * z;
        if x > 0.0 {
            return Ok(x);
        }
    }
}

/// CDF of `Gam(1/2, 2g)` at `x`.
pub fn gamma_half_cdf(g: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    regularized_gamma_p(0.5, x / (2.0 * g)).unwrap_or(f64::NAN)
}

/// Survival function of `Gam(1/2, 2g)` at `x`.
pub fn gamma_half_sf(g: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(0.5, x / (2.0 * g)).unwrap_or(f64::NAN)
}

/// Certified bounds `(P[X ≤ g^η] bound, P[X ≥ g^{1+ρ}] bound)` for
/// `X ~ Gam(1/2, 2g)`.
pub fn gamma_half_tail_bounds(g: f64, eta: f64, rho: f64) -> Result<(f64, f64)> {
    if !(g > 0.0) {
        return Err(Error::domain("gamma_half_tail_bounds", "g must be positive"));
    }
    if !(eta < 1.0) {
        return Err(Error::domain("gamma_half_tail_bounds", format!("eta must be below 1, got {eta}")));
    }
    if !(rho > 0.0) {
        return Err(Error::domain("gamma_half_tail_bounds", format!("rho must be positive, got {rho}")));
    }
    let lower = g.powf(-(1.0 - eta) / 2.0);
    let upper = 2.0 * (-g.powf(rho) / 2.0).exp();
    Ok((lower, upper))
}

/// Right-tail bound for `X ~ Gam(k, θ)`: `P[X ≥ kθ + t] ≤ e^{-t/2θ} + e^{-t²/4kθ²}`.
pub fn sub_gamma_right_tail(shape: f64, scale: f64, t: f64) -> Result<f64> {
    if !(shape > 0.0 && scale > 0.0 && t > 0.0) {
        return Err(Error::domain("sub_gamma_right_tail", "shape, scale and t must be positive"));
    }
    Ok((-t / (2.0 * scale)).exp() + (-t * t / (4.0 * shape * scale * scale)).exp())
}

/// Support window `[g^{-(1+3ρ)}, g^{1+ρ}]` of the truncated gamma input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationInterval {
    pub s_min: f64,
    pub s_max: f64,
}

impl TruncationInterval {
    pub fn new(s_min: f64, s_max: f64) -> Result<Self> {
        if !(s_min > 0.0 && s_min < 1.0 && 1.0 < s_max && s_max.is_finite()) {
            return Err(Error::domain(
                "TruncationInterval",
                format!("need 0 < s_min < 1 < s_max, got [{s_min}, {s_max}]"),
            ));
        }
        Ok(TruncationInterval { s_min, s_max })
    }

    pub fn for_budget(g: f64, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::domain("TruncationInterval", format!("rho must lie in (0, 1), got {rho}")));
        }
        if !(g > 1.0) {
            return Err(Error::domain("TruncationInterval", format!("g must exceed 1, got {g}")));
        }
        Self::new(g.powf(-(1.0 + 3.0 * rho)), g.powf(1.0 + rho))
    }
}

const MAX_INPUT_SUPPORT: f64 = 1e7;

/// Law of `⌈X̃⌉` where `X̃ ~ Gam(1/2, 2g)` is conditioned on the truncation
/// interval for `(g, ρ)`. Support is `{1, …, ⌈g^{1+ρ}⌉}`.
pub fn truncated_rounded_input_pmf(g: f64, rho: f64) -> Result<DiscretePmf> {
    let op = "truncated_rounded_input_pmf";
    let s = TruncationInterval::for_budget(g, rho)?;
    let top = s.s_max.ceil();
    if top > MAX_INPUT_SUPPORT {
        return Err(Error::domain(op, format!("support size {top} is too large")));
    }
    let top = top as u64;
    let theta = 2.0 * g;
    // Interval mass F(hi) - F(lo), taken from whichever tail keeps precision.
    let mass = |lo: f64, hi: f64| -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let m = if lo / theta < 0.5 {
            regularized_gamma_p(0.5, hi / theta)? - regularized_gamma_p(0.5, lo / theta)?
        } else {
            regularized_gamma_q(0.5, lo / theta)? - regularized_gamma_q(0.5, hi / theta)?
        };
        Ok(m.max(0.0))
    };
    let total = mass(s.s_min, s.s_max)?;
    if !(total > 0.0) {
        return Err(Error::numeric(op, "truncation interval carries no mass"));
    }
    let mut weights = Vec::with_capacity(top as usize);
    for k in 1..=top {
        let lo = ((k - 1) as f64).max(s.s_min);
        let hi = (k as f64).min(s.s_max);
        weights.push(mass(lo, hi)? / total);
    }
    DiscretePmf::from_weights(1, &weights)
}

/// Geometric law on `{0, 1, 2, …}` with mean `mu`, cut where the remaining
/// tail mass drops below `tail_tol`.
pub fn geometric_max_entropy_pmf(mu: f64, tail_tol: f64) -> Result<DiscretePmf> {
    let op = "geometric_max_entropy_pmf";
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::domain(op, format!("mean must be non-negative, got {mu}")));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::domain(op, "tail tolerance must lie in (0, 1)"));
    }
    if mu == 0.0 {
        return Ok(DiscretePmf::point_mass(0));
    }
    let ln_theta = -(mu.ln_1p());
    let ln_q = (mu / (mu + 1.0)).ln();
    // P[A ≥ len] = q^len
    let len = (tail_tol.ln() / ln_q).ceil().max(1.0);
    if len > MAX_INPUT_SUPPORT {
        return Err(Error::domain(op, format!("support size {len} is too large")));
    }
    let lw = (0..len as u64).map(|k| ln_theta + k as f64 * ln_q).collect();
    DiscretePmf::from_log_weights(0, lw)
}
