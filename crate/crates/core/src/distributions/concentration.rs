//! Closed-form tail bounds for sums of independent variables.

use crate::error::{Error, Result};

/// One-sided Hoeffding bound `P[Σ(Xᵢ − EXᵢ) ≥ t] ≤ exp(−2t²/Σ(bᵢ−aᵢ)²)`
/// for `n` variables sharing the range width `width`.
pub fn hoeffding_bound(n: u64, width: f64, t: f64) -> Result<f64> {
    if n == 0 || !(width > 0.0) || !(t >= 0.0) {
        return Err(Error::domain("hoeffding_bound", "need n ≥ 1, width > 0 and t ≥ 0"));
    }
    Ok((-2.0 * t * t / (n as f64 * width * width)).exp())
}

/// Relative Chernoff bound for the Bernoulli empirical mean,
/// `P[p̂ − p ≥ ξp] ≤ exp(−nξ²p/(2+ξ))`.
pub fn relative_chernoff_bound(n: u64, p: f64, xi: f64) -> Result<f64> {
    if n == 0 || !(p > 0.0 && p <= 1.0) || !(xi > 0.0) {
        return Err(Error::domain("relative_chernoff_bound", "need n ≥ 1, p ∈ (0, 1] and ξ > 0"));
    }
    Ok((-(n as f64) * xi * xi * p / (2.0 + xi)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn bernoulli_means(p: f64, n: usize, reps: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        (0..reps)
            .map(|_| (0..n).filter(|_| rng.open01() < p).count() as f64 / n as f64)
            .collect()
    }

    #[test]
    fn hoeffding_holds_empirically() {
        let (p, n, reps) = (0.3, 200, 20_000);
        let means = bernoulli_means(p, n, reps, 1);
        for t in [2.0, 6.0, 10.0] {
            let freq = means.iter().filter(|&&m| (m - p) * n as f64 >= t).count() as f64 / reps as f64;
            let b = hoeffding_bound(n as u64, 1.0, t).unwrap();
            assert!(freq <= b + 3.0 * (b.min(1.0) * (1.0 - b.min(1.0)) / reps as f64).sqrt(), "t={t}");
        }
    }

    #[test]
    fn relative_chernoff_holds_empirically() {
        let (p, n, reps) = (0.05, 400, 20_000);
        let means = bernoulli_means(p, n, reps, 2);
        for xi in [0.25, 0.5, 1.0] {
            let freq = means.iter().filter(|&&m| m - p >= xi * p).count() as f64 / reps as f64;
            let b = relative_chernoff_bound(n as u64, p, xi).unwrap();
            assert!(freq <= b + 3.0 * (b * (1.0 - b) / reps as f64).sqrt(), "xi={xi}: {freq} > {b}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(hoeffding_bound(0, 1.0, 1.0).is_err());
        assert!(relative_chernoff_bound(10, 0.0, 0.5).is_err());
    }
}
