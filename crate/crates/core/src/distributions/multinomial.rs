use rand_distr::{Binomial, Distribution};

use crate::counts::CountVector;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// `Mul(trials, probs)` via conditional binomials, one pass over the slots.
pub fn multinomial_sample(trials: u64, probs: &[f64], rng: &mut RngStream) -> Result<CountVector> {
    let op = "multinomial_sample";
    if probs.is_empty() {
        return Err(Error::domain(op, "empty probability vector"));
    }
    if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::domain(op, "probabilities must be finite and non-negative"));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::domain(op, format!("probabilities sum to {s}, not 1")));
    }
    let mut out = vec![0u64; probs.len()];
    multinomial_fill(trials, probs, rng, &mut out);
    Ok(CountVector::new(out))
}

/// Unchecked core of [`multinomial_sample`]; `out` is overwritten.
pub(crate) fn multinomial_fill(trials: u64, probs: &[f64], rng: &mut RngStream, out: &mut [u64]) {
    out.fill(0);
    let Some(last) = probs.iter().rposition(|&p| p > 0.0) else {
        return;
    };
    let mut remaining = trials;
    let mut mass_left = 1.0f64;
    for (i, &p) in probs.iter().enumerate().take(last) {
        if remaining == 0 {
            return;
        }
        if p == 0.0 {
            continue;
        }
        let q = if mass_left > 0.0 { (p / mass_left).min(1.0) } else { 1.0 };
        let c = if q >= 1.0 {
            remaining
        } else {
            // q ∈ (0, 1) here, so construction cannot fail
            Binomial::new(remaining, q).map(|b| b.sample(rng)).unwrap_or(0)
        };
        out[i] = c;
        remaining -= c;
        mass_left -= p;
    }
    out[last] += remaining;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_cases() {
        let mut rng = RngStream::new(0, 0);
        let y = multinomial_sample(17, &[0.0, 1.0, 0.0], &mut rng).unwrap();
        assert_eq!(y.as_slice(), &[0, 17, 0]);
        let y = multinomial_sample(0, &[0.5, 0.5], &mut rng).unwrap();
        assert_eq!(y.as_slice(), &[0, 0]);
        assert!(multinomial_sample(3, &[-0.5, 1.5], &mut rng).is_err());
        assert!(multinomial_sample(3, &[0.5, 0.6], &mut rng).is_err());
    }

    #[test]
    fn uniform_four_slots() {
        let mut rng = RngStream::new(42, 0);
        let trials = 100_000u64;
        let y = multinomial_sample(trials, &[0.25; 4], &mut rng).unwrap();
        assert_eq!(y.total(), trials);
        let sd = (trials as f64 * 0.25 * 0.75).sqrt();
        for &c in y.as_slice() {
            assert!((c as f64 - 25_000.0).abs() < 4.0 * sd, "{c}");
        }
    }

    #[test]
    fn slot_means() {
        let p = [0.1, 0.0, 0.6, 0.3];
        let mut rng = RngStream::new(9, 0);
        let reps = 20_000;
        let trials = 30u64;
        let mut sums = [0f64; 4];
        for _ in 0..reps {
            let y = multinomial_sample(trials, &p, &mut rng).unwrap();
            assert_eq!(y.total(), trials);
            for (s, &c) in sums.iter_mut().zip(y.as_slice()) {
                *s += c as f64;
            }
        }
        for (i, &pi) in p.iter().enumerate() {
            let mean = sums[i] / reps as f64;
            let sd = (trials as f64 * pi * (1.0 - pi) / reps as f64).sqrt();
            assert!((mean - trials as f64 * pi).abs() <= 4.0 * sd + 1e-12, "slot {i}: {mean}");
        }
    }
}
