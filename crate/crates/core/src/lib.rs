//! Capacity bounds and simulation for the frequency-based channel.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod capacity_bounds;
pub mod cli;
pub mod channel;
pub mod counts;
pub mod distributions;
pub mod error;
pub mod experiment;
pub mod mutual_info;
pub mod parallel;
pub mod quadrature;
pub mod rng;
pub mod special_math;
pub mod verify;

pub use counts::{CountVector, FrequencyVector, Violation};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use special_math::Nats;
