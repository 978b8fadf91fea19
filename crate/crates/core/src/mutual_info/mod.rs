//! Information quantities of the scalar Poisson channel `Z | X=x ~ Poi(a·x)`.

mod concentration;
mod mmpe;
mod spec;
mod spectrum;
mod truncation;

pub use concentration::{bobkov_ledoux_bound, lipschitz_seminorm};
pub use mmpe::{
    i_mmpe_integral, mmpe, mmpe_small_gain_limit, mmpe_unfactored, poisson_loss, SMALL_GAIN,
};
pub use spec::{
    information_density, mi_average_divergence, mi_entropy_difference, mutual_information,
    output_pmf, PoissonChannelSpec, OUTPUT_TAIL_TOL, Z_MAX_CAP,
};
pub(crate) use spectrum::DensityTable;
pub use spectrum::{spectrum_mc, spectrum_samples, SpectrumEstimate};
pub use truncation::{truncation_loss_terms, TruncationLoss};

/// Default number of Gauss–Legendre nodes per panel for the I-MMPE integral.
pub const DEFAULT_QUAD_POINTS: usize = 64;
