use rand::Rng;
use serde::Serialize;

use super::codebook::{
    decode_ml, feinstein_rhs, generate_codebook, select_tau, stirling_offset, threshold_scan,
    codeword_density, FeinsteinRhs, ThresholdDecision,
};
use super::config::{Decoder, ExperimentConfig};
use crate::capacity_bounds::{achievability_bound, converse_bound};
use crate::channel::{transmit, ChannelParams};
use crate::distributions::truncated_rounded_input_pmf;
use crate::error::{Error, Result};
use crate::mutual_info::{mutual_information, spectrum_samples, DensityTable, PoissonChannelSpec};
use crate::parallel::map_blocks;
use crate::rng::RngStream;

const STREAM_PILOT: u64 = 1;
const STREAM_CODEBOOK: u64 = 2;
const STREAM_TRIALS: u64 = 3;
const STREAM_SPECTRUM: u64 = 4;
const TRIALS_PER_BLOCK: usize = 16;

/// Largest codebook the runner will build.
pub const MAX_MESSAGES: u64 = 1 << 16;

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // the limits are exact at the edges; the formula leaves rounding residue
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoderTally {
    /// Trials decoded to the transmitted message.
    pub correct: u64,
    /// Trials decoded to a different message.
    pub wrong: u64,
    /// Trials with no decision (threshold erasure or all-zero ML likelihood).
    pub erasures: u64,
    pub error_rate: f64,
    pub error_interval_95: (f64, f64),
}

impl DecoderTally {
    fn new(correct: u64, wrong: u64, erasures: u64) -> Self {
        let trials = correct + wrong + erasures;
        let errors = wrong + erasures;
        DecoderTally {
            correct,
            wrong,
            erasures,
            error_rate: errors as f64 / trials as f64,
            error_interval_95: wilson_interval(errors, trials, Z95),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub messages: u64,
    /// `ln M / n` in nats per letter.
    pub rate: f64,
    pub tau: u64,
    pub tau_per_letter: f64,
    /// Pilot estimate of `P[Σ Xᵢ = τ]`.
    pub p_hat: f64,
    pub codebook_acceptance_rate: f64,
    /// Gain of the scalar surrogate, `n·r/τ`.
    pub effective_gain: f64,
    /// Per-letter mutual information at the effective gain.
    pub mutual_information: f64,
    pub log_gamma: f64,
    /// Surrogate spectrum estimate of `P[density ≤ ln γ]`.
    pub spectrum_cdf_at_gamma: f64,
    pub feinstein: FeinsteinRhs,
    pub achievability: f64,
    pub converse: f64,
    pub decoder: Decoder,
    pub trials: u64,
    /// Error rate of `decoder`, with its 95% Wilson interval.
    pub error_rate: f64,
    pub error_interval_95: (f64, f64),
    pub threshold: DecoderTally,
    pub ml: DecoderTally,
    /// Mean surrogate density of the transmitted codeword, per letter.
    pub true_density_mean: f64,
    pub notes: Vec<String>,
}

/// One row of the optional per-trial trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub trial: u64,
    pub true_msg: usize,
    /// Decision of the configured decoder; `None` is an erasure.
    pub decoded: Option<usize>,
    /// Surrogate density of the transmitted codeword (after the offset).
    pub density_value: f64,
}

pub const TRACE_HEADER: &str = "trial,true_msg,decoded,density_value";

impl TraceRow {
    pub fn to_csv_line(&self) -> String {
        let decoded = self.decoded.map_or_else(|| "erasure".to_string(), |m| m.to_string());
        format!("{},{},{},{:e}", self.trial, self.true_msg, decoded, self.density_value)
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_traced(config).map(|(report, _)| report)
}

/// Runs the experiment and returns the per-trial trace alongside the report.
/// Output depends only on `config` (and not on `config.threads`).
pub fn run_experiment_traced(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<TraceRow>)> {
    config.validate()?;
    let mut notes = Vec::new();
    let params = stage("channel parameters", ChannelParams::new(config.n, config.g, config.r))?;
    let root = RngStream::new(config.seed, 0);
    let nr = params.total_samples();

    let input = stage("input law", truncated_rounded_input_pmf(config.g, config.rho))?;
    let tau = stage(
        "tau selection",
        select_tau(&input, config.n, config.pilot_samples, &root.substream(STREAM_PILOT)),
    )?;
    if tau.tau as f64 > params.budget() * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "selected total {} exceeds the budget n·g = {}",
            tau.tau,
            params.budget()
        )));
    }
    let floor = 1.0 / (3.0 * config.n as f64 * config.g);
    if tau.p_hat < floor {
        notes.push(format!("pilot P[sum = tau] = {:e} is below 1/(3ng) = {floor:e}", tau.p_hat));
    }

    let effective_gain = nr as f64 / tau.tau as f64;
    let spec = stage("surrogate channel", PoissonChannelSpec::new(input.clone(), effective_gain))?;
    let mi = stage("mutual information", mutual_information(&spec))?.get();
    let n = config.n as f64;
    let offset = stirling_offset(nr);

    let log_gamma = config
        .log_gamma
        .unwrap_or(n * mi - 2.0 * n * config.delta - offset);
    let messages = match config.messages {
        Some(m) => m,
        None => {
            let log_m = n * mi - 3.0 * n * config.delta - offset;
            let m = log_m.min(64.0).exp().round();
            if m < 2.0 {
                notes.push(format!("ln M from the rate formula is {log_m:.3}; M clamped to 2"));
                2
            } else {
                m as u64
            }
        }
    };
    if messages > MAX_MESSAGES {
        return Err(Error::Config(format!(
            "codebook of {messages} messages exceeds the limit of {MAX_MESSAGES}"
        )));
    }

    let codebook = stage(
        "codebook generation",
        generate_codebook(
            messages as usize,
            config.n,
            &input,
            tau.tau,
            &root.substream(STREAM_CODEBOOK),
            config.max_attempts_per_word,
            config.threads,
        ),
    )?;

    let table = DensityTable::new(&spec);
    let raw_threshold = log_gamma + offset;
    let trial_rng = root.substream(STREAM_TRIALS);
    let outcomes = map_blocks(config.trials as usize, TRIALS_PER_BLOCK, config.threads, |_, lo, hi| {
        (lo..hi)
            .map(|t| -> Result<(usize, ThresholdDecision, Option<usize>, f64)> {
                let mut stream = trial_rng.substream(t as u64);
                let msg = stream.random_range(0..codebook.len());
                let x = codebook.word(msg);
                if x.total() != tau.tau {
                    return Err(Error::numeric("run_experiment", "codeword total drifted from tau"));
                }
                let y = transmit(x, &params, &mut stream)?;
                let density = codeword_density(&table, x, &y);
                Ok((msg, threshold_scan(&table, &y, &codebook, raw_threshold), decode_ml(&y, &codebook), density))
            })
            .collect()
    });

    let (mut th, mut ml) = ([0u64; 3], [0u64; 3]);
    let mut density_sum = 0.0;
    let mut trace = Vec::with_capacity(outcomes.len());
    for (t, o) in outcomes.into_iter().enumerate() {
        let (msg, th_dec, ml_dec, density) = stage("trials", o)?;
        let th_m = match th_dec {
            ThresholdDecision::Decoded(m) => Some(m),
            ThresholdDecision::Erasure => None,
        };
        for (tally, dec) in [(&mut th, th_m), (&mut ml, ml_dec)] {
            match dec {
                Some(m) if m == msg => tally[0] += 1,
                Some(_) => tally[1] += 1,
                None => tally[2] += 1,
            }
        }
        density_sum += density;
        trace.push(TraceRow {
            trial: t as u64,
            true_msg: msg,
            decoded: if config.decoder == Decoder::Threshold { th_m } else { ml_dec },
            density_value: density - offset,
        });
    }
    let threshold = DecoderTally::new(th[0], th[1], th[2]);
    let ml = DecoderTally::new(ml[0], ml[1], ml[2]);

    let spectrum = stage(
        "spectrum estimate",
        spectrum_samples(&spec, config.n as u64, config.spectrum_samples, &root.substream(STREAM_SPECTRUM), config.threads),
    )?;
    let per_letter_threshold = raw_threshold / n;
    let cdf = spectrum.iter().filter(|&&d| d <= per_letter_threshold).count() as f64
        / spectrum.len() as f64;
    let feinstein = stage("feinstein bound", feinstein_rhs(cdf, messages, log_gamma, tau.p_hat))?;
    if feinstein.saturated {
        notes.push("Feinstein bound saturates at 1; the comparison is vacuous".into());
    }

    let headline = match config.decoder {
        Decoder::Threshold => &threshold,
        Decoder::Ml => &ml,
    };
    let report = ExperimentReport {
        config: config.clone(),
        messages,
        rate: (messages as f64).ln() / n,
        tau: tau.tau,
        tau_per_letter: tau.tau as f64 / n,
        p_hat: tau.p_hat,
        codebook_acceptance_rate: codebook.acceptance_rate(),
        effective_gain,
        mutual_information: mi,
        log_gamma,
        spectrum_cdf_at_gamma: cdf,
        feinstein,
        achievability: achievability_bound(config.g, config.r)?.get(),
        converse: converse_bound(config.g, config.r)?.get(),
        decoder: config.decoder,
        trials: config.trials,
        error_rate: headline.error_rate,
        error_interval_95: headline.error_interval_95,
        threshold: threshold.clone(),
        ml: ml.clone(),
        true_density_mean: density_sum / config.trials as f64 / n,
        notes,
    };
    Ok((report, trace))
}
