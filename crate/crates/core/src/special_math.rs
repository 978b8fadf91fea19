//! Scalar special functions and a unimodal maximizer.
//!
//! Every entropic quantity in the crate is measured in nats. The [`Nats`]
//! newtype marks those values at API boundaries; conversion to bits happens
//! only when results are presented.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An information quantity in natural-log units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nats(pub f64);

impl Nats {
    pub const ZERO: Nats = Nats(0.0);
    /// Sentinel for impossible events.
    pub const NEG_INFINITY: Nats = Nats(f64::NEG_INFINITY);

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn to_bits(self) -> f64 {
        self.0 / LN_2
    }

    pub fn from_bits(bits: f64) -> Self {
        Nats(bits * LN_2)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for Nats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

impl Add for Nats {
    type Output = Nats;
    fn add(self, rhs: Nats) -> Nats {
        Nats(self.0 + rhs.0)
    }
}

impl AddAssign for Nats {
    fn add_assign(&mut self, rhs: Nats) {
        self.0 += rhs.0;
    }
}

impl Sub for Nats {
    type Output = Nats;
    fn sub(self, rhs: Nats) -> Nats {
        Nats(self.0 - rhs.0)
    }
}

impl Neg for Nats {
    type Output = Nats;
    fn neg(self) -> Nats {
        Nats(-self.0)
    }
}

impl Mul<f64> for Nats {
    type Output = Nats;
    fn mul(self, rhs: f64) -> Nats {
        Nats(self.0 * rhs)
    }
}

/// `x ln x` with the convention `0 ln 0 = 0`.
#[inline]
pub fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn binary_entropy(p: f64) -> Result<Nats> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("binary_entropy", format!("p = {p} is not in [0, 1]")));
    }
    Ok(Nats(-xlnx(p) - xlnx(1.0 - p)))
}

/// Maximum entropy of a non-negative integer random variable whose mean is at
/// most `mu`, i.e. the entropy of the geometric law with mean `mu`.
pub fn psi_max_entropy(mu: f64) -> Result<Nats> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::domain("psi_max_entropy", format!("mu = {mu} must be finite and >= 0")));
    }
    if mu == 0.0 {
        return Ok(Nats::ZERO);
    }
    // (mu+1) h(1/(mu+1)) = ln(1+mu) + mu ln(1 + 1/mu)
    Ok(Nats(mu.ln_1p() + mu * (1.0 / mu).ln_1p()))
}

/// Derivative of [`psi_max_entropy`], `ln(1 + 1/mu)`.
pub fn psi_derivative(mu: f64) -> f64 {
    (1.0 / mu).ln_1p()
}

/// Principal branch of the Lambert W function.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch {
        return Err(Error::domain("lambert_w0", format!("x = {x} is below -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let mut w = if x < -0.25 {
        // series about the branch point
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        x.ln_1p() * 0.85
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    if x == branch {
        return Ok(-1.0);
    }
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    if x > 1024.0 {
        return stirling_ln_gamma(x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

const FACTORIAL_TABLE_LEN: usize = 1025;

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(FACTORIAL_TABLE_LEN);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..FACTORIAL_TABLE_LEN {
            acc += (k as f64).ln();
            table.push(acc);
        }
        table
    })
}

/// `ln k!`: exact cumulative sums up to 1024, Stirling series beyond.
#[inline]
pub fn log_factorial(k: u64) -> Nats {
    Nats(ln_factorial(k))
}

#[inline]
pub(crate) fn ln_factorial(k: u64) -> f64 {
    if (k as usize) < FACTORIAL_TABLE_LEN {
        factorial_table()[k as usize]
    } else {
        stirling_ln_gamma(k as f64 + 1.0)
    }
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 100_000;

fn check_gamma_args(op: &'static str, k: f64, x: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::domain(op, format!("shape k = {k} must be positive")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(op, format!("x = {x} must be non-negative")));
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(k, x) = γ(k, x) / Γ(k)`.
pub fn regularized_gamma_p(k: f64, x: f64) -> Result<f64> {
    check_gamma_args("regularized_gamma_p", k, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    if x < k + 1.0 {
        gamma_series(k, x)
    } else {
        Ok(1.0 - gamma_continued_fraction(k, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(k, x) = 1 - P(k, x)`, accurate in the
/// far right tail.
pub fn regularized_gamma_q(k: f64, x: f64) -> Result<f64> {
    check_gamma_args("regularized_gamma_q", k, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < k + 1.0 {
        Ok(1.0 - gamma_series(k, x)?)
    } else {
        gamma_continued_fraction(k, x)
    }
}

fn gamma_prefactor(k: f64, x: f64) -> f64 {
    (k * x.ln() - x - ln_gamma(k)).exp()
}

fn gamma_series(k: f64, x: f64) -> Result<f64> {
    let mut ap = k;
    let mut term = 1.0 / k;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            return Ok((sum * gamma_prefactor(k, x)).min(1.0));
        }
    }
    Err(Error::numeric("regularized_gamma_p", "series did not converge"))
}

// Modified Lentz evaluation of the continued fraction for Q(k, x).
fn gamma_continued_fraction(k: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - k;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - k);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            return Ok((gamma_prefactor(k, x) * h).clamp(0.0, 1.0));
        }
    }
    Err(Error::numeric("regularized_gamma_q", "continued fraction did not converge"))
}

/// Numerically stable `ln Σ exp(v)`; returns `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)`. The endpoints are compared with the interior
/// optimum so that boundary maximizers come back exactly.
pub fn maximize_unimodal<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::domain(
            "maximize_unimodal",
            format!("invalid interval [{lo}, {hi}]"),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("maximize_unimodal", format!("tol = {tol} must be positive")));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    Ok(best)
}
