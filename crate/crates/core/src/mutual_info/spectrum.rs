use serde::Serialize;

use super::spec::PoissonChannelSpec;
use crate::distributions::poisson_sample;
use crate::error::{Error, Result};
use crate::parallel::map_blocks;
use crate::rng::RngStream;
use crate::special_math::ln_factorial;

const BLOCK: usize = 256;

/// Monte-Carlo estimate of the law of the normalized information density
/// `(1/n)·Σ i(Xᵢ; Zᵢ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    pub n: u64,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub thresholds: Vec<f64>,
    /// Empirical `P[(1/n)Σi ≤ threshold]` for each threshold.
    pub cdf: Vec<f64>,
}

/// Precomputed single-letter density evaluation.
pub(crate) struct DensityTable<'a> {
    spec: &'a PoissonChannelSpec,
    log_rate: Vec<f64>,
    offset: u64,
}

impl<'a> DensityTable<'a> {
    pub(crate) fn new(spec: &'a PoissonChannelSpec) -> Self {
        let input = spec.input();
        let offset = input.offset();
        let log_rate = (0..input.len() as u64)
            .map(|i| (spec.gain() * (offset + i) as f64).ln())
            .collect();
        DensityTable {
            spec,
            log_rate,
            offset,
        }
    }

    /// `i(x; z)`; `x` outside the tabulated range is evaluated directly.
    #[inline]
    pub(crate) fn density(&self, x: u64, z: u64) -> f64 {
        let rate = self.spec.gain() * x as f64;
        let ll = if x == 0 {
            if z == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            let log_rate = x
                .checked_sub(self.offset)
                .and_then(|i| self.log_rate.get(i as usize).copied())
                .unwrap_or_else(|| rate.ln());
            -rate + z as f64 * log_rate - ln_factorial(z)
        };
        ll - self.spec.log_output_prob(z)
    }
}

/// Draws of `(1/n)·Σ i(Xᵢ; Zᵢ)`; sample `k` uses substream `k / 256` of `rng`,
/// so the result does not depend on `threads`.
pub fn spectrum_samples(
    spec: &PoissonChannelSpec,
    n: u64,
    num_samples: usize,
    rng: &RngStream,
    threads: usize,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("spectrum_mc", "blocklength must be at least 1"));
    }
    let sampler = spec.input().sampler();
    let table = DensityTable::new(spec);
    let gain = spec.gain();
    Ok(map_blocks(num_samples, BLOCK, threads, |b, lo, hi| {
        let mut stream = rng.substream(b as u64);
        (lo..hi)
            .map(|_| {
                let mut acc = 0.0;
                for _ in 0..n {
                    let x = sampler.sample(&mut stream);
                    let z = poisson_sample(gain * x as f64, &mut stream);
                    acc += table.density(x, z);
                }
                acc / n as f64
            })
            .collect()
    }))
}

/// Summarizes [`spectrum_samples`] at the caller's thresholds.
pub fn spectrum_mc(
    spec: &PoissonChannelSpec,
    n: u64,
    num_samples: usize,
    thresholds: &[f64],
    rng: &RngStream,
    threads: usize,
) -> Result<SpectrumEstimate> {
    if num_samples == 0 {
        return Err(Error::domain("spectrum_mc", "need at least one sample"));
    }
    let draws = spectrum_samples(spec, n, num_samples, rng, threads)?;
    Ok(summarize(n, &draws, thresholds))
}

pub(crate) fn summarize(n: u64, draws: &[f64], thresholds: &[f64]) -> SpectrumEstimate {
    let k = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / k;
    let variance = if draws.len() > 1 {
        draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let cdf = thresholds
        .iter()
        .map(|&t| draws.iter().filter(|&&d| d <= t).count() as f64 / k)
        .collect();
    SpectrumEstimate {
        n,
        samples: draws.len() as u64,
        mean,
        variance,
        thresholds: thresholds.to_vec(),
        cdf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DiscretePmf;
    use crate::mutual_info::mutual_information;

    #[test]
    fn point_mass_spectrum_is_zero() {
        let spec = PoissonChannelSpec::new(DiscretePmf::point_mass(4), 1.0).unwrap();
        let est = spectrum_mc(&spec, 10, 500, &[0.0], &RngStream::new(1, 0), 2).unwrap();
        assert!(est.mean.abs() < 1e-12);
        assert!(est.variance < 1e-20);
    }

    #[test]
    fn mean_matches_mi() {
        let input = DiscretePmf::from_weights(1, &[0.3, 0.0, 0.2, 0.5]).unwrap();
        let spec = PoissonChannelSpec::new(input, 1.3).unwrap();
        let mi = mutual_information(&spec).unwrap().get();
        let est = spectrum_mc(&spec, 20, 20_000, &[], &RngStream::new(2, 0), 0).unwrap();
        let se = (est.variance / est.samples as f64).sqrt();
        assert!((est.mean - mi).abs() < 4.0 * se, "{} vs {mi}", est.mean);
    }

    #[test]
    fn thread_count_does_not_change_draws() {
        let input = DiscretePmf::from_weights(1, &[0.5, 0.5]).unwrap();
        let spec = PoissonChannelSpec::new(input, 2.0).unwrap();
        let rng = RngStream::new(3, 9);
        let a = spectrum_samples(&spec, 7, 1000, &rng, 1).unwrap();
        let b = spectrum_samples(&spec, 7, 1000, &rng, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cdf_is_monotone_in_threshold() {
        let input = DiscretePmf::from_weights(1, &[0.5, 0.5]).unwrap();
        let spec = PoissonChannelSpec::new(input, 2.0).unwrap();
        let est = spectrum_mc(&spec, 5, 2000, &[-0.5, 0.0, 0.1, 0.5], &RngStream::new(4, 0), 2).unwrap();
        assert!(est.cdf.windows(2).all(|w| w[0] <= w[1]));
    }
}
