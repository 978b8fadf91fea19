//! Finite-blocklength random-coding experiment over the frequency channel.

mod codebook;
mod config;
mod run;

pub use codebook::{
    decode_ml, decode_threshold, feinstein_rhs, generate_codebook, select_tau, surrogate_density,
    Codebook, FeinsteinRhs, TauSelection, ThresholdDecision,
};
pub use config::{Decoder, ExperimentConfig, CONFIG_KEYS};
pub use run::{
    run_experiment, run_experiment_traced, wilson_interval, DecoderTally, ExperimentReport,
    TraceRow, MAX_MESSAGES, TRACE_HEADER,
};
