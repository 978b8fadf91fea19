use std::collections::BTreeMap;

use serde::Serialize;

use crate::counts::CountVector;
use crate::distributions::DiscretePmf;
use crate::error::{Error, Result};
use crate::mutual_info::{DensityTable, PoissonChannelSpec};
use crate::parallel::map_blocks;
use crate::rng::RngStream;

/// Pilot estimate of the most likely codeword total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauSelection {
    pub tau: u64,
    /// Empirical `P[Σ Xᵢ = τ]` under i.i.d. draws.
    pub p_hat: f64,
    pub pilot_samples: usize,
}

/// Draws `pilot_samples` totals of `n` i.i.d. inputs and picks the empirical
/// mode (smallest on ties).
pub fn select_tau(
    input: &DiscretePmf,
    n: usize,
    pilot_samples: usize,
    rng: &RngStream,
) -> Result<TauSelection> {
    if pilot_samples < 1000 {
        return Err(Error::domain("select_tau", "need at least 1000 pilot samples"));
    }
    if n == 0 {
        return Err(Error::domain("select_tau", "blocklength must be at least 1"));
    }
    if input.is_point_mass() {
        return Ok(TauSelection {
            tau: n as u64 * input.support_bounds().0,
            p_hat: 1.0,
            pilot_samples,
        });
    }
    let sampler = input.sampler();
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut stream = rng.clone();
    for _ in 0..pilot_samples {
        let total: u64 = (0..n).map(|_| sampler.sample(&mut stream)).sum();
        *hist.entry(total).or_default() += 1;
    }
    let (tau, count) = hist
        .iter()
        .fold((0u64, 0u64), |best, (&t, &c)| if c > best.1 { (t, c) } else { best });
    Ok(TauSelection {
        tau,
        p_hat: count as f64 / pilot_samples as f64,
        pilot_samples,
    })
}

/// Fixed-sum random codebook: every codeword has total `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    tau: u64,
    words: Vec<CountVector>,
    /// `ln xᵢ` per codeword, used by the ML decoder.
    log_counts: Vec<Vec<f64>>,
    attempts: u64,
}

impl Codebook {
    pub fn from_words(words: Vec<CountVector>) -> Result<Self> {
        let first = words
            .first()
            .ok_or_else(|| Error::domain("Codebook::from_words", "codebook is empty"))?;
        let (tau, n) = (first.total(), first.dim());
        for w in &words {
            if w.total() != tau || w.dim() != n {
                return Err(Error::domain(
                    "Codebook::from_words",
                    "codewords must share dimension and total",
                ));
            }
        }
        let log_counts = words
            .iter()
            .map(|w| w.as_slice().iter().map(|&c| (c as f64).ln()).collect())
            .collect();
        let attempts = words.len() as u64;
        Ok(Codebook {
            tau,
            words,
            log_counts,
            attempts,
        })
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.words[0].dim()
    }

    pub fn word(&self, m: usize) -> &CountVector {
        &self.words[m]
    }

    pub fn words(&self) -> &[CountVector] {
        &self.words
    }

    /// Total i.i.d. draws of length-`n` vectors spent building the codebook.
    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.words.len() as f64 / self.attempts as f64
    }
}

const WORDS_PER_BLOCK: usize = 4;

/// Rejection-samples `messages` codewords of i.i.d. `input` letters
/// conditioned on `Σ xᵢ = tau`. Codeword `m` draws from `rng.substream(m)`.
pub fn generate_codebook(
    messages: usize,
    n: usize,
    input: &DiscretePmf,
    tau: u64,
    rng: &RngStream,
    max_attempts: u64,
    threads: usize,
) -> Result<Codebook> {
    if messages == 0 || n == 0 {
        return Err(Error::domain("generate_codebook", "need at least one message and one letter"));
    }
    let sampler = input.sampler();
    let results = map_blocks(messages, WORDS_PER_BLOCK, threads, |_, lo, hi| {
        (lo..hi)
            .map(|m| {
                let mut stream = rng.substream(m as u64);
                let mut word = vec![0u64; n];
                for attempt in 1..=max_attempts {
                    let mut total = 0u64;
                    for slot in word.iter_mut() {
                        *slot = sampler.sample(&mut stream);
                        total += *slot;
                    }
                    if total == tau {
                        return Ok((CountVector::new(word), attempt));
                    }
                }
                Err(Error::AttemptBudget {
                    attempts: max_attempts,
                    acceptance_rate: 0.0,
                })
            })
            .collect()
    });
    let mut words = Vec::with_capacity(messages);
    let mut attempts = 0u64;
    for r in results {
        match r {
            Ok((w, a)) => {
                attempts += a;
                words.push(w);
            }
            Err(Error::AttemptBudget { attempts: budget, .. }) => {
                let spent = attempts + budget;
                return Err(Error::AttemptBudget {
                    attempts: budget,
                    acceptance_rate: words.len() as f64 / spent as f64,
                });
            }
            Err(e) => return Err(e),
        }
    }
    let mut book = Codebook::from_words(words)?;
    book.attempts = attempts;
    Ok(book)
}

/// Maximum-likelihood decoding under the multinomial channel. All codewords
/// share a total, so the likelihood reduces to `Σ yᵢ ln xᵢ`. Returns `None`
/// when every codeword has zero likelihood. Ties go to the smallest index.
pub fn decode_ml(y: &CountVector, codebook: &Codebook) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (m, logs) in codebook.log_counts.iter().enumerate() {
        let mut score = 0.0;
        for (&yi, &lx) in y.as_slice().iter().zip(logs) {
            if yi > 0 {
                score += yi as f64 * lx;
            }
        }
        if score.is_finite() && best.is_none_or(|(_, s)| score > s) {
            best = Some((m, score));
        }
    }
    best.map(|(m, _)| m)
}

/// Surrogate information density `Σᵢ i(xᵢ; yᵢ) − ½ln(6π·total_samples)` of
/// one codeword against an output.
pub fn surrogate_density(
    x: &CountVector,
    y: &CountVector,
    spec: &PoissonChannelSpec,
    total_samples: u64,
) -> f64 {
    let table = DensityTable::new(spec);
    codeword_density(&table, x, y) - stirling_offset(total_samples)
}

pub(crate) fn stirling_offset(total_samples: u64) -> f64 {
    0.5 * (6.0 * std::f64::consts::PI * total_samples as f64).ln()
}

pub(crate) fn codeword_density(table: &DensityTable<'_>, x: &CountVector, y: &CountVector) -> f64 {
    x.as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(&xi, &yi)| table.density(xi, yi))
        .sum()
}

/// Outcome of threshold decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdDecision {
    Decoded(usize),
    Erasure,
}

/// Returns the first message whose surrogate density exceeds `log_gamma`.
pub fn decode_threshold(
    y: &CountVector,
    codebook: &Codebook,
    log_gamma: f64,
    spec: &PoissonChannelSpec,
    total_samples: u64,
) -> ThresholdDecision {
    let table = DensityTable::new(spec);
    threshold_scan(&table, y, codebook, log_gamma + stirling_offset(total_samples))
}

pub(crate) fn threshold_scan(
    table: &DensityTable<'_>,
    y: &CountVector,
    codebook: &Codebook,
    raw_threshold: f64,
) -> ThresholdDecision {
    for (m, x) in codebook.words.iter().enumerate() {
        if codeword_density(table, x, y) > raw_threshold {
            return ThresholdDecision::Decoded(m);
        }
    }
    ThresholdDecision::Erasure
}

/// Random-coding error bound `(P[i ≤ ln γ] + M/γ) / P[F]`, clamped to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeinsteinRhs {
    pub value: f64,
    /// True when the unclamped bound is at least 1.
    pub saturated: bool,
}

pub fn feinstein_rhs(
    spectrum_cdf_at_gamma: f64,
    messages: u64,
    log_gamma: f64,
    p_fixed_sum: f64,
) -> Result<FeinsteinRhs> {
    if !(p_fixed_sum > 0.0) {
        return Err(Error::domain("feinstein_rhs", "fixed-sum probability must be positive"));
    }
    if !(0.0..=1.0).contains(&spectrum_cdf_at_gamma) || messages == 0 {
        return Err(Error::domain("feinstein_rhs", "cdf must lie in [0, 1] and M ≥ 1"));
    }
    let collision = ((messages as f64).ln() - log_gamma).min(700.0).exp();
    let raw = (spectrum_cdf_at_gamma + collision) / p_fixed_sum;
    Ok(FeinsteinRhs {
        value: raw.min(1.0),
        saturated: raw >= 1.0,
    })
}
