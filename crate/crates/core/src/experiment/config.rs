use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    Threshold,
    Ml,
}

impl FromStr for Decoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "threshold" => Ok(Decoder::Threshold),
            "ml" => Ok(Decoder::Ml),
            other => Err(Error::Config(format!("unknown decoder '{other}' (expected threshold or ml)"))),
        }
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decoder::Threshold => "threshold",
            Decoder::Ml => "ml",
        })
    }
}

/// Parameters of one random-coding experiment. Readable from a flat
/// `key = value` file; `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub g: f64,
    pub r: f64,
    pub rho: f64,
    pub delta: f64,
    /// Codebook size; derived from `ln M = n·I − 3nδ − ½ln(6πnr)` when absent.
    pub messages: Option<u64>,
    /// Decoding threshold `ln γ`; derived from `n·I − 2nδ − ½ln(6πnr)` when absent.
    pub log_gamma: Option<f64>,
    pub decoder: Decoder,
    pub trials: u64,
    pub seed: u64,
    pub pilot_samples: usize,
    pub spectrum_samples: usize,
    pub max_attempts_per_word: u64,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[serde(skip)]
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 500,
            g: 8.0,
            r: 3.2,
            rho: 0.1,
            delta: 0.3,
            messages: None,
            log_gamma: None,
            decoder: Decoder::Threshold,
            trials: 200,
            seed: 1,
            pilot_samples: 20_000,
            spectrum_samples: 2_000,
            max_attempts_per_word: 1_000_000,
            threads: 0,
        }
    }
}

pub const CONFIG_KEYS: &[&str] = &[
    "n",
    "g",
    "r",
    "rho",
    "delta",
    "messages",
    "log_gamma",
    "decoder",
    "trials",
    "seed",
    "pilot_samples",
    "spectrum_samples",
    "max_attempts_per_word",
    "threads",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse value '{value}' for key '{key}'")))
}

impl ExperimentConfig {
    /// Sets one field by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse(key, value)?,
            "g" => self.g = parse(key, value)?,
            "r" => self.r = parse(key, value)?,
            "rho" => self.rho = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "messages" | "M" => self.messages = Some(parse::<f64>(key, value)?.round() as u64),
            "log_gamma" => self.log_gamma = Some(parse(key, value)?),
            "decoder" => self.decoder = value.parse()?,
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "pilot_samples" => self.pilot_samples = parse(key, value)?,
            "spectrum_samples" => self.spectrum_samples = parse(key, value)?,
            "max_attempts_per_word" => self.max_attempts_per_word = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        c.apply_kv(text)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.g > 1.0) {
            return bad(format!("g must exceed 1, got {}", self.g));
        }
        if !(self.r > 0.0) {
            return bad(format!("r must be positive, got {}", self.r));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if !(self.delta > 0.0) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if matches!(self.messages, Some(m) if m < 2) {
            return bad("messages must be at least 2".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.pilot_samples < 1000 {
            return bad("pilot_samples must be at least 1000".into());
        }
        if self.spectrum_samples == 0 {
            return bad("spectrum_samples must be at least 1".into());
        }
        if self.max_attempts_per_word == 0 {
            return bad("max_attempts_per_word must be at least 1".into());
        }
        Ok(())
    }
}
