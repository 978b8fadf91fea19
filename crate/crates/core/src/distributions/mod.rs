//! Samplers, PMFs, entropies and tail bounds.

mod concentration;
mod gamma;
mod multinomial;
mod pmf;
mod poisson;

pub use concentration::{hoeffding_bound, relative_chernoff_bound};
pub use gamma::{
    gamma_half_cdf, gamma_half_sample, gamma_half_sf, gamma_half_tail_bounds,
    geometric_max_entropy_pmf, sub_gamma_right_tail, truncated_rounded_input_pmf,
    TruncationInterval,
};
pub use multinomial::multinomial_sample;
pub(crate) use multinomial::multinomial_fill;
pub use pmf::{DiscretePmf, PmfSampler};
pub(crate) use poisson::{ln_poisson, poisson_entropy_unchecked};
pub use poisson::{
    expected_v_log_v, poisson_cdf, poisson_chernoff_lower_tail, poisson_entropy, poisson_log_pmf,
    poisson_sample,
};

/// Default residual tail mass for PMF truncation.
pub const PMF_TAIL_TOL: f64 = 1e-14;

/// Default ρ of the truncated gamma input law.
pub const DEFAULT_RHO: f64 = 0.1;
