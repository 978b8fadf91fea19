use serde::Serialize;

use crate::distributions::{gamma_half_cdf, TruncationInterval};
use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

/// The three truncation-loss terms for `X̃ ~ Gam(1/2, 2g)` and the bounds
/// they are certified against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationLoss {
    pub g: f64,
    pub rho: f64,
    /// `s_max · P[X̃ < s_min]`
    pub t1: f64,
    /// `E[X̃ ln X̃ · 1{X̃ > s_max}]`
    pub t2: f64,
    /// `ln(1/s_min) · E[X̃ · 1{X̃ > s_max}]`
    pub t3: f64,
    /// `g^{-ρ/2}`
    pub bound_t1: f64,
    /// `e^{-g^ρ/4}`, shared by `t2` and `t3`
    pub bound_t23: f64,
}

impl TruncationLoss {
    pub fn t1_within_bound(&self) -> bool {
        self.t1 <= self.bound_t1
    }

    pub fn t2_within_bound(&self) -> bool {
        self.t2 <= self.bound_t23
    }

    pub fn t3_within_bound(&self) -> bool {
        self.t3 <= self.bound_t23
    }
}

// Upper end of the shifted integration range; e^{-80} kills any polynomial factor.
const SHIFT_RANGE: f64 = 80.0;

/// `E[h(X̃)·1{X̃ > s}]` for `X̃ ~ Gam(1/2, θ)` with `θ = 2g`. With
/// `u = x/θ = u₀ + t` this is `e^{-u₀}/√π · ∫₀^∞ h(θ(u₀+t)) (u₀+t)^{-1/2} e^{-t} dt`.
fn upper_partial_expectation(g: f64, s: f64, h: impl Fn(f64) -> f64) -> Result<f64> {
    let theta = 2.0 * g;
    let u0 = s / theta;
    let integrand = |t: f64| {
        let u = u0 + t;
        h(theta * u) * (-t).exp() / u.sqrt()
    };
    let body = integrate_adaptive("truncation_loss_terms", integrand, 0.0, SHIFT_RANGE, 16, 32, 1e-14)?;
    Ok((-u0).exp() / std::f64::consts::PI.sqrt() * body.value)
}

pub fn truncation_loss_terms(g: f64, rho: f64) -> Result<TruncationLoss> {
    if !(g >= 2.0) || !g.is_finite() {
        return Err(Error::domain("truncation_loss_terms", format!("g must be at least 2, got {g}")));
    }
    let s = TruncationInterval::for_budget(g, rho)?;
    let t1 = s.s_max * gamma_half_cdf(g, s.s_min);
    let t2 = upper_partial_expectation(g, s.s_max, |x| x * x.ln())?;
    let t3 = (1.0 / s.s_min).ln() * upper_partial_expectation(g, s.s_max, |x| x)?;
    Ok(TruncationLoss {
        g,
        rho,
        t1,
        t2,
        t3,
        bound_t1: g.powf(-rho / 2.0),
        bound_t23: (-g.powf(rho) / 4.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_math::regularized_gamma_q;

    #[test]
    fn partial_mean_closed_form() {
        // E[X̃·1{X̃ > s}] = g·Q(3/2, s/(2g))
        for (g, s) in [(100.0, 158.0), (1e3, 1995.0), (7.0, 0.3)] {
            let q = upper_partial_expectation(g, s, |x| x).unwrap();
            let exact = g * regularized_gamma_q(1.5, s / (2.0 * g)).unwrap();
            assert!((q - exact).abs() <= 1e-10 * exact, "g={g}: {q} vs {exact}");
        }
    }

    #[test]
    fn first_term_bounded_and_decreasing() {
        let mut prev = f64::INFINITY;
        for g in [1e2, 1e3, 1e4] {
            let t = truncation_loss_terms(g, 0.1).unwrap();
            assert!(t.t1_within_bound(), "g={g}: {} > {}", t.t1, t.bound_t1);
            assert!(t.t1 < prev);
            prev = t.t1;
        }
    }

    #[test]
    fn rejects_small_g() {
        assert!(truncation_loss_terms(1.5, 0.1).is_err());
        assert!(truncation_loss_terms(10.0, 1.0).is_err());
    }
}
