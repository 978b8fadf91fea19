//! Self-checks of the auxiliary facts the bounds rely on, runnable from the CLI.

use serde::Serialize;

use crate::channel::{
    event_poissonization_factor, event_probabilities, multinomial_poisson_ratio_log,
    poissonization_identity_check, transmit, universal_event_factor, validate_codeword, ChannelParams,
};
use crate::counts::CountVector;
use crate::distributions::{
    gamma_half_cdf, gamma_half_sf, gamma_half_tail_bounds, poisson_cdf, poisson_chernoff_lower_tail,
    poisson_entropy, relative_chernoff_bound, truncated_rounded_input_pmf, PMF_TAIL_TOL,
};
use crate::error::Result;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Appendix,
    Channel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: Suite, name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        suite,
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Poissonization, Poisson and Gamma tails, entropy and concentration.
pub fn appendix_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let s = Suite::Appendix;
    let mut out = Vec::new();

    let gap = poissonization_identity_check(6.0, &[0.2, 0.3, 0.5])?;
    out.push(check(s, "poissonization_identity", gap <= 1e-12, format!("max pmf gap {gap:e}")));

    for m in [10u64, 1000, 100_000] {
        let ratio = multinomial_poisson_ratio_log(m)?.get();
        let factor = universal_event_factor(m)?;
        out.push(check(
            s,
            &format!("pointwise_ratio_m{m}"),
            ratio.exp() <= factor,
            format!("exp(ratio) = {:e} ≤ e·sqrt(M) = {factor:e}", ratio.exp()),
        ));
    }

    let (multi, pois) = event_probabilities(6, &[0.5, 0.5], |y| y[0] >= 5)?;
    let factor = event_poissonization_factor(6)?;
    out.push(check(
        s,
        "event_transfer_tail",
        multi <= factor * pois,
        format!("P_mult = {multi:e} ≤ sqrt(eM)·P_pois = {:e}", factor * pois),
    ));
    let (multi, pois) = event_probabilities(20, &[0.5, 0.5], |y| y[0] == y[1])?;
    let factor = event_poissonization_factor(20)?;
    out.push(check(
        s,
        "event_transfer_tie",
        multi <= factor * pois,
        format!("P_mult = {multi:e} ≤ sqrt(eM)·P_pois = {:e}", factor * pois),
    ));

    for (lambda, alpha) in [(20.0f64, 0.5f64), (200.0, 0.8)] {
        let exact = poisson_cdf((alpha * lambda).floor() as u64, lambda)?;
        let bound = poisson_chernoff_lower_tail(lambda, alpha)?;
        out.push(check(
            s,
            &format!("poisson_lower_tail_l{lambda}"),
            exact <= bound,
            format!("P = {exact:e} ≤ {bound:e}"),
        ));
    }

    for g in [100.0f64, 1000.0] {
        let rho = 0.1;
        let eta = 1.0 - rho;
        let (lo_b, hi_b) = gamma_half_tail_bounds(g, eta, rho)?;
        let lo = gamma_half_cdf(g, g.powf(eta));
        let hi = gamma_half_sf(g, g.powf(1.0 + rho));
        out.push(check(
            s,
            &format!("gamma_tails_g{g}"),
            lo <= lo_b && hi <= hi_b,
            format!("lower {lo:e} ≤ {lo_b:e}, upper {hi:e} ≤ {hi_b:e}"),
        ));
        let pmf = truncated_rounded_input_pmf(g, rho)?;
        let cut = g.powf(1.0 - rho).floor() as u64;
        let low_mass: f64 = pmf.iter().take_while(|&(k, _)| k <= cut).map(|(_, p)| p).sum();
        let bound = 2.0 / g.powf(rho / 2.0);
        out.push(check(
            s,
            &format!("input_low_mass_g{g}"),
            low_mass <= bound,
            format!("{low_mass:e} ≤ {bound:e}"),
        ));
    }

    for lambda in [1.0f64, 10.0, 100.0] {
        let h = poisson_entropy(lambda, PMF_TAIL_TOL)?.get();
        let cap = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * (lambda + 1.0 / 12.0)).ln();
        out.push(check(
            s,
            &format!("poisson_entropy_l{lambda}"),
            h <= cap,
            format!("H = {h:.12} ≤ {cap:.12}"),
        ));
    }

    // relative Chernoff against a seeded Bernoulli experiment
    let (n, p, xi, reps) = (400u64, 0.1, 0.3, 4000);
    let mut rng = RngStream::new(seed, 0x7e5);
    let mut hits = 0u32;
    for _ in 0..reps {
        let ones = (0..n).filter(|_| rng.open01() < p).count() as f64;
        if ones / n as f64 - p >= xi * p {
            hits += 1;
        }
    }
    let freq = hits as f64 / reps as f64;
    let bound = relative_chernoff_bound(n, p, xi)?;
    let slack = 3.0 * (bound.max(1.0 / reps as f64) / reps as f64).sqrt();
    out.push(check(
        s,
        "relative_chernoff_mc",
        freq <= bound + slack,
        format!("empirical {freq:e} ≤ {bound:e} (+{slack:.2e})"),
    ));
    Ok(out)
}

/// Budget enforcement, output totals and output means of the multinomial channel.
pub fn channel_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let s = Suite::Channel;
    let mut out = Vec::new();
    let params = ChannelParams::new(4, 3.0, 2.5)?;
    let over = CountVector::new(vec![4, 4, 4, 1]);
    out.push(check(
        s,
        "budget_rejected",
        validate_codeword(&over, &params).is_err(),
        "Σx = 13 > n·g = 12".into(),
    ));
    let empty = CountVector::zeros(4);
    out.push(check(s, "empty_pool_rejected", validate_codeword(&empty, &params).is_err(), String::new()));

    let x = CountVector::new(vec![1, 2, 3, 6]);
    let mut rng = RngStream::new(seed, 0xc4a);
    let reps = 20_000;
    let mut sums = [0u64; 4];
    let mut totals_ok = true;
    for _ in 0..reps {
        let y = transmit(&x, &params, &mut rng)?;
        totals_ok &= y.total() == params.total_samples();
        for (acc, &v) in sums.iter_mut().zip(y.as_slice()) {
            *acc += v;
        }
    }
    out.push(check(s, "output_total", totals_ok, format!("every output sums to {}", params.total_samples())));

    let m = params.total_samples() as f64;
    let mut worst = 0.0f64;
    for (i, &acc) in sums.iter().enumerate() {
        let p = x.as_slice()[i] as f64 / 12.0;
        let mean = acc as f64 / reps as f64;
        let se = (m * p * (1.0 - p) / reps as f64).sqrt();
        worst = worst.max((mean - m * p).abs() / se);
    }
    out.push(check(s, "output_means", worst < 4.5, format!("largest z-score {worst:.3}")));
    Ok(out)
}

pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    let mut all = appendix_suite(seed)?;
    all.extend(channel_suite(seed)?);
    Ok(all)
}
