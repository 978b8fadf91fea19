use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special_math::{ln_factorial, regularized_gamma_q, Nats};

/// `ln Poi(k; λ)`.
pub fn poisson_log_pmf(k: u64, lambda: f64) -> Result<Nats> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain("poisson_log_pmf", format!("lambda must be positive, got {lambda}")));
    }
    Ok(Nats(ln_poisson(k, lambda)))
}

/// Unchecked log-pmf that also accepts `λ = 0` (a point mass at zero).
#[inline]
pub(crate) fn ln_poisson(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -lambda + k as f64 * lambda.ln() - ln_factorial(k)
}

/// `P[Z ≤ k]` for `Z ~ Poi(λ)`.
pub fn poisson_cdf(k: u64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(1.0);
    }
    regularized_gamma_q(k as f64 + 1.0, lambda)
}

const INVERSION_LIMIT: f64 = 30.0;

/// One Poisson draw: sequential inversion below λ = 30, Hörmann's PTRS
/// transformed rejection above.
pub fn poisson_sample(lambda: f64, rng: &mut RngStream) -> u64 {
    if !(lambda > 0.0) {
        return 0;
    }
    if lambda < INVERSION_LIMIT {
        sample_inversion(lambda, rng)
    } else {
        sample_ptrs(lambda, rng)
    }
}

fn sample_inversion(lambda: f64, rng: &mut RngStream) -> u64 {
    let p0 = (-lambda).exp();
    loop {
        let u = rng.open01();
        let mut k = 0u64;
        let mut p = p0;
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            // The cumulative sum can stall just below 1 through rounding.
            if p < 1e-300 && k as f64 > lambda {
                break;
            }
        }
        if u <= cdf {
            return k;
        }
    }
}

fn sample_ptrs(lambda: f64, rng: &mut RngStream) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let invalpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.open01() - 0.5;
        let v = rng.open01();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + invalpha.ln() - (a / (us * us) + b).ln();
        let rhs = -lambda + k * loglam - ln_factorial(k as u64);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// Entropy of `Poi(λ)` by direct summation, stopped once the remaining
/// tail mass is certified below `tail_tol`.
pub fn poisson_entropy(lambda: f64, tail_tol: f64) -> Result<Nats> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain("poisson_entropy", format!("lambda must be positive, got {lambda}")));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::domain("poisson_entropy", "tail tolerance must be positive"));
    }
    Ok(Nats(poisson_entropy_unchecked(lambda, tail_tol)))
}

pub(crate) fn poisson_entropy_unchecked(lambda: f64, tail_tol: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    // Below λ - 40√λ the lower tail is far under any double-precision tolerance.
    let start = if lambda > 100.0 {
        (lambda - 40.0 * lambda.sqrt()).floor() as u64
    } else {
        0
    };
    let mut h = 0.0;
    let mut k = start;
    loop {
        let lp = ln_poisson(k, lambda);
        let p = lp.exp();
        if p > 0.0 {
            h -= p * lp;
        }
        // For k + 1 > λ the tail beyond k is dominated by a geometric series.
        let kf = k as f64 + 1.0;
        if kf > lambda {
            let ratio = lambda / (kf + 1.0);
            let tail = p * ratio / (1.0 - ratio);
            if tail < tail_tol {
                break;
            }
        }
        k += 1;
    }
    h
}

/// Chernoff bound on the Poisson lower tail `P[Z ≤ αλ]`.
pub fn poisson_chernoff_lower_tail(lambda: f64, alpha: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain("poisson_chernoff_lower_tail", "lambda must be positive"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("poisson_chernoff_lower_tail", format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let tight = (-lambda * (1.0 - alpha * (1.0 - alpha.ln()))).exp();
    let loose = (-0.5 * lambda * (1.0 - alpha).powi(2)).exp();
    Ok(tight.min(loose).min(1.0))
}

/// Exact `E[V ln V]` for `V ~ Poi(λ)`.
pub fn expected_v_log_v(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain("expected_v_log_v", "lambda must be positive"));
    }
    let mut acc = 0.0;
    let kmax = (lambda + 40.0 * lambda.sqrt() + 40.0).ceil() as u64;
    for k in 2..=kmax {
        let kf = k as f64;
        acc += ln_poisson(k, lambda).exp() * kf * kf.ln();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_pmf_anchors() {
        assert_eq!(poisson_log_pmf(0, 2.5).unwrap().get(), -2.5);
        assert!((poisson_log_pmf(1, 1.0).unwrap().get() + 1.0).abs() < 1e-15);
        let total: f64 = (0..=60).map(|k| poisson_log_pmf(k, 3.0).unwrap().get().exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(poisson_log_pmf(0, 0.0).is_err());
    }

    fn moments(lambda: f64, draws: usize, seed: u64) -> (f64, f64) {
        let mut rng = RngStream::new(seed, 0);
        let xs: Vec<f64> = (0..draws).map(|_| poisson_sample(lambda, &mut rng) as f64).collect();
        let m = xs.iter().sum::<f64>() / draws as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws - 1) as f64;
        (m, v)
    }

    #[test]
    fn sampler_moments_both_branches() {
        let n = 1_000_000;
        for (lambda, seed) in [(10.0, 1), (250.0, 2)] {
            let (m, v) = moments(lambda, n, seed);
            assert!((m - lambda).abs() < 4.0 * (lambda / n as f64).sqrt(), "λ={lambda} mean {m}");
            assert!((v / lambda - 1.0).abs() < 0.05, "λ={lambda} var {v}");
        }
        let mut rng = RngStream::new(0, 0);
        assert!((0..100).all(|_| poisson_sample(0.0, &mut rng) == 0));
    }

    #[test]
    fn ptrs_matches_pmf() {
        // chi-square against the exact pmf on λ = 45, bins pooled at the tails
        let lambda = 45.0;
        let n = 200_000;
        let mut rng = RngStream::new(3, 0);
        let (lo, hi) = (25u64, 68u64);
        let mut counts = vec![0f64; (hi - lo + 1) as usize];
        for _ in 0..n {
            let k = poisson_sample(lambda, &mut rng).clamp(lo, hi);
            counts[(k - lo) as usize] += 1.0;
        }
        let mut chi2 = 0.0;
        for (i, c) in counts.iter().enumerate() {
            let k = lo + i as u64;
            let p = if k == lo {
                poisson_cdf(lo, lambda).unwrap()
            } else if k == hi {
                1.0 - poisson_cdf(hi - 1, lambda).unwrap()
            } else {
                ln_poisson(k, lambda).exp()
            };
            let e = p * n as f64;
            chi2 += (c - e).powi(2) / e;
        }
        // 43 degrees of freedom; 99.9% quantile is about 77
        assert!(chi2 < 77.0, "chi2 = {chi2}");
    }

    #[test]
    fn entropy_limits() {
        assert!(poisson_entropy(1e-9, 1e-14).unwrap().get() < 1e-7);
        let h100 = poisson_entropy(100.0, 1e-14).unwrap().get();
        let gauss = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 100.0).ln();
        assert!((h100 - gauss).abs() < 2.0 / 100.0);
    }

    #[test]
    fn entropy_at_one_matches_plain_sum() {
        let plain: f64 = (0..200u64)
            .map(|k| {
                let lp = -1.0 - ln_factorial(k);
                -lp.exp() * lp
            })
            .sum();
        let h = poisson_entropy(1.0, 1e-15).unwrap().get();
        assert!((h - plain).abs() < 1e-14);
        // frozen reference value
        assert!((h - 1.304_842_242_256_251).abs() < 1e-12, "{h}");
    }

    #[test]
    fn entropy_monotone_and_bounded() {
        let mut prev = 0.0;
        let mut lambda = 0.01;
        while lambda < 2000.0 {
            let h = poisson_entropy(lambda, 1e-14).unwrap().get();
            assert!(h + 1e-10 >= prev, "λ={lambda}");
            let ub = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * (lambda + 1.0 / 12.0)).ln();
            assert!(h <= ub + 1e-12, "λ={lambda}: {h} > {ub}");
            prev = h;
            lambda *= 1.3;
        }
    }

    #[test]
    fn chernoff_lower_tail() {
        assert!((poisson_chernoff_lower_tail(7.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let exact = poisson_cdf(10, 20.0).unwrap();
        assert!(exact <= poisson_chernoff_lower_tail(20.0, 0.5).unwrap());
        assert!(poisson_chernoff_lower_tail(50.0, 0.2).unwrap() <= (-16.0f64).exp());
        assert!(poisson_chernoff_lower_tail(5.0, 0.0).is_err());
    }

    #[test]
    fn v_log_v_bound() {
        for lambda in [0.1, 1.0, 5.0, 20.0] {
            let e = expected_v_log_v(lambda).unwrap();
            assert!(e <= lambda * (1.0 + lambda).ln(), "λ={lambda}");
        }
    }
}
