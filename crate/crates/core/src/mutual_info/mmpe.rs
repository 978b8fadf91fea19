use crate::distributions::DiscretePmf;
use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::special_math::{ln_factorial, log_sum_exp, xlnx, Nats};

/// Poisson Bregman loss `ℓ(u, v) = v − u + u·ln(u/v)`.
pub fn poisson_loss(u: f64, v: f64) -> f64 {
    if u == 0.0 {
        return v;
    }
    v - u + u * (u / v).ln()
}

/// Below this gain the integrand of the I-MMPE integral is replaced by its
/// small-gain limit.
pub const SMALL_GAIN: f64 = 1e-6;

const MASS_TOL: f64 = 1e-14;

struct Posterior {
    /// (u, ln P(u), ln u)
    atoms: Vec<(f64, f64, f64)>,
}

impl Posterior {
    fn new(input: &DiscretePmf) -> Self {
        Posterior {
            atoms: input
                .iter_log()
                .map(|(u, lp)| (u as f64, lp, (u as f64).ln()))
                .collect(),
        }
    }

    /// Calls `visit(v, weights, conditional_mean)` for every output `v` until
    /// the output mass is exhausted; `weights[k] = P(u_k)·Poi(v; a·u_k)`.
    fn for_each_output(&self, a: f64, mut visit: impl FnMut(&[f64], f64)) {
        let top = self.atoms.iter().map(|t| t.0).fold(0.0, f64::max) * a;
        let v_cap = (top + 40.0 * top.sqrt() + 60.0).ceil() as u64;
        let ln_a = a.ln();
        let mut joint = vec![0.0; self.atoms.len()];
        let mut num = vec![0.0; self.atoms.len()];
        let mut weights = vec![0.0; self.atoms.len()];
        let mut seen = 0.0;
        for v in 0..=v_cap {
            let vf = v as f64;
            let lf = ln_factorial(v);
            for (k, &(u, lp, lu)) in self.atoms.iter().enumerate() {
                joint[k] = if u == 0.0 {
                    if v == 0 {
                        lp
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    lp - a * u + vf * (ln_a + lu) - lf
                };
                num[k] = joint[k] + lu;
            }
            let den = log_sum_exp(&joint);
            if den == f64::NEG_INFINITY {
                continue;
            }
            let mean = (log_sum_exp(&num) - den).exp();
            for (w, &j) in weights.iter_mut().zip(&joint) {
                *w = j.exp();
            }
            seen += den.exp();
            visit(&weights, mean);
            if vf > top && 1.0 - seen < MASS_TOL {
                break;
            }
        }
    }
}

/// Minimum mean Poisson error of estimating `a·U` from `V ~ Poi(a·U)`:
/// `E[ℓ(aU, a·E[U|V])]`, with the conditional mean taken from the exact
/// mixture posterior.
pub fn mmpe(input: &DiscretePmf, a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("mmpe", format!("gain must be positive, got {a}")));
    }
    let post = Posterior::new(input);
    let mut acc = 0.0;
    post.for_each_output(a, |weights, mean| {
        for (w, &(u, _, _)) in weights.iter().zip(&post.atoms) {
            if *w > 0.0 {
                acc += w * poisson_loss(u, mean);
            }
        }
    });
    // ℓ(a·u, a·m) = a·ℓ(u, m)
    Ok(a * acc)
}

/// Same quantity as [`mmpe`] evaluated with the scaled arguments
/// `ℓ(a·u, a·m)` instead of the factored form.
pub fn mmpe_unfactored(input: &DiscretePmf, a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("mmpe", format!("gain must be positive, got {a}")));
    }
    let post = Posterior::new(input);
    let mut acc = 0.0;
    post.for_each_output(a, |weights, mean| {
        for (w, &(u, _, _)) in weights.iter().zip(&post.atoms) {
            if *w > 0.0 {
                acc += w * poisson_loss(a * u, a * mean);
            }
        }
    });
    Ok(acc)
}

/// `lim_{a→0} mmpe(a)/a = E[U ln U] − E[U]·ln E[U]`.
pub fn mmpe_small_gain_limit(input: &DiscretePmf) -> f64 {
    let mean = input.mean();
    let e_ulnu: f64 = input.iter().map(|(u, p)| p * xlnx(u as f64)).sum();
    (e_ulnu - xlnx(mean)).max(0.0)
}

/// `∫₀^γ mmpe(a)/a da`, integrated in `t = ln a` on
/// Gauss–Legendre panels, with the small-gain limit used below `1e-6`.
pub fn i_mmpe_integral(input: &DiscretePmf, gamma: f64, quad_points: usize) -> Result<Nats> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain("i_mmpe_integral", format!("gamma must be positive, got {gamma}")));
    }
    if quad_points == 0 {
        return Err(Error::domain("i_mmpe_integral", "need at least one quadrature point"));
    }
    let limit = mmpe_small_gain_limit(input);
    if gamma <= SMALL_GAIN {
        return Ok(Nats(limit * gamma));
    }
    let head = limit * SMALL_GAIN;
    let (t0, t1) = (SMALL_GAIN.ln(), gamma.ln());
    let panels = ((t1 - t0) / 2.0).ceil() as usize;
    let post = Posterior::new(input);
    let integrand = |t: f64| {
        let a = t.exp();
        let mut acc = 0.0;
        post.for_each_output(a, |weights, mean| {
            for (w, &(u, _, _)) in weights.iter().zip(&post.atoms) {
                if *w > 0.0 {
                    acc += w * poisson_loss(u, mean);
                }
            }
        });
        // mmpe(a)/a · da = mmpe(a)/a · a · dt
        a * acc
    };
    let body = integrate_adaptive("i_mmpe_integral", integrand, t0, t1, panels, quad_points, 1e-9)?;
    Ok(Nats(head + body.value))
}
