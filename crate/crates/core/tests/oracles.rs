//! Cross-checks against independent references: statrs for distribution
//! functions, and values frozen from 40-digit mpmath evaluations.

use statrs::distribution::{ContinuousCDF, DiscreteCDF, Gamma, Poisson};

use freqcap::capacity_bounds::stars_and_bars_log_count;
use freqcap::distributions::{
    gamma_half_cdf, gamma_half_sf, poisson_cdf, poisson_entropy, poisson_log_pmf, DiscretePmf,
    PMF_TAIL_TOL,
};
use freqcap::mutual_info::{
    i_mmpe_integral, mi_average_divergence, mi_entropy_difference, mutual_information,
    PoissonChannelSpec, DEFAULT_QUAD_POINTS,
};
use freqcap::special_math::{
    binary_entropy, lambert_w0, ln_gamma, log_factorial, psi_max_entropy, regularized_gamma_p,
    regularized_gamma_q,
};

fn close(got: f64, want: f64, rel: f64) {
    let scale = want.abs().max(1.0);
    assert!((got - want).abs() <= rel * scale, "got {got:.17e}, want {want:.17e}");
}

#[test]
fn lambert_w_mpmath() {
    for (x, w) in [
        (-0.3, -0.489_402_227_180_214_9),
        (0.5, 0.351_733_711_249_195_8),
        (1.0, 0.567_143_290_409_784),
        (10.0, 1.745_528_002_740_699_4),
        (1e6, 11.383_358_086_140_053),
    ] {
        close(lambert_w0(x).unwrap(), w, 1e-13);
    }
}

#[test]
fn psi_mpmath() {
    for (mu, v) in [
        (0.1, 0.335_099_707_084_161_9),
        (0.398, 0.835_068_318_980_327),
        (2.5, 2.093_943_560_048_400_3),
        (100.0, 5.610_153_602_158_068),
    ] {
        close(psi_max_entropy(mu).unwrap().get(), v, 1e-13);
    }
    close(binary_entropy(0.5).unwrap().get(), std::f64::consts::LN_2, 1e-15);
}

#[test]
fn gamma_functions_match_statrs() {
    for x in [0.1, 0.5, 1.0, 2.5, 10.0, 171.3, 1e5] {
        close(ln_gamma(x), statrs::function::gamma::ln_gamma(x), 1e-13);
    }
    for k in [0u64, 1, 5, 20, 170, 10_000] {
        close(log_factorial(k).get(), statrs::function::gamma::ln_gamma(k as f64 + 1.0), 1e-13);
    }
    for (s, x) in [(0.5, 0.01), (0.5, 3.0), (3.5, 2.0), (20.0, 25.0), (200.0, 180.0)] {
        let p = regularized_gamma_p(s, x).unwrap();
        let q = regularized_gamma_q(s, x).unwrap();
        close(p, statrs::function::gamma::gamma_lr(s, x), 1e-11);
        close(q, statrs::function::gamma::gamma_ur(s, x), 1e-11);
    }
    close(regularized_gamma_q(3.5, 2.0).unwrap(), 0.779_777_408_475_715_9, 1e-13);
}

#[test]
fn poisson_matches_statrs() {
    for lambda in [0.3, 4.0, 37.5, 1000.0] {
        let d = Poisson::new(lambda).unwrap();
        for k in [0u64, 1, 3, 30, 40, 900, 1000, 1100] {
            close(poisson_cdf(k, lambda).unwrap(), d.cdf(k), 1e-11);
            let lp = poisson_log_pmf(k, lambda).unwrap().get();
            close(lp, statrs::distribution::Discrete::ln_pmf(&d, k), 1e-11);
        }
    }
}

#[test]
fn half_shape_gamma_matches_statrs() {
    for g in [1.0, 8.0, 100.0, 1e4] {
        // shape 1/2, mean g
        let d = Gamma::new(0.5, 1.0 / (2.0 * g)).unwrap();
        for x in [0.01 * g, 0.3 * g, g, 4.0 * g] {
            close(gamma_half_cdf(g, x), d.cdf(x), 1e-11);
            close(gamma_half_sf(g, x), d.sf(x), 1e-11);
        }
    }
}

#[test]
fn poisson_entropy_mpmath() {
    for (lambda, h) in [
        (0.5, 0.927_637_467_495_797_4),
        (10.0, 2.561_409_935_274_909),
        (250.0, 4.179_334_988_728_862),
    ] {
        close(poisson_entropy(lambda, PMF_TAIL_TOL).unwrap().get(), h, 1e-11);
    }
}

#[test]
fn mutual_information_mpmath() {
    let input = DiscretePmf::from_weights(1, &[1.0; 4]).unwrap();
    let spec = PoissonChannelSpec::new(input.clone(), 2.0).unwrap();
    let want = 0.365_349_419_406_892_6;
    close(mutual_information(&spec).unwrap().get(), want, 1e-10);
    close(mi_entropy_difference(&spec), want, 1e-10);
    close(mi_average_divergence(&spec), want, 1e-10);
    close(i_mmpe_integral(&input, 2.0, DEFAULT_QUAD_POINTS).unwrap().get(), want, 1e-8);
}

#[test]
fn stars_and_bars_mpmath() {
    close(stars_and_bars_log_count(1000, 10).unwrap().get() / 1000.0, 3.344_273_930_395_120_9, 1e-12);
    // C(4 + 2 - 1, 1) = 5
    close(stars_and_bars_log_count(2, 2).unwrap().get(), 5f64.ln(), 1e-15);
}
