//! The frequency-based channel: codeword checks, multinomial transmission
//! through an optional read-noise kernel, and the Poissonized surrogate.

use serde::{Deserialize, Serialize};

use crate::counts::{CountVector, Violation};
use crate::distributions::{ln_poisson, multinomial_fill, poisson_cdf, poisson_sample};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special_math::{ln_factorial, Nats};

/// Read-noise kernel. `prob(j, i)` is the probability that an object of type
/// `i` is read as type `j`, so every column sums to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    n: usize,
    /// Row-major in the read type: `entries[j * n + i] = W(j, i)`.
    entries: Vec<f64>,
}

impl Kernel {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                actual: entries.len(),
            });
        }
        if entries.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::domain("Kernel::new", "entries must be finite and non-negative"));
        }
        for i in 0..n {
            let col: f64 = (0..n).map(|j| entries[j * n + i]).sum();
            if (col - 1.0).abs() > 1e-9 {
                return Err(Error::domain(
                    "Kernel::new",
                    format!("column {i} sums to {col}, not 1"),
                ));
            }
        }
        Ok(Kernel { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Kernel { n, entries }
    }

    /// Each read is replaced by a uniformly chosen other type with
    /// probability `error_rate`.
    pub fn symmetric(n: usize, error_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&error_rate) {
            return Err(Error::domain("Kernel::symmetric", "error rate must lie in [0, 1]"));
        }
        if n == 1 {
            return Ok(Kernel::identity(1));
        }
        let off = error_rate / (n - 1) as f64;
        let mut entries = vec![off; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0 - error_rate;
        }
        Kernel::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn prob(&self, read: usize, true_type: usize) -> f64 {
        self.entries[read * self.n + true_type]
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|j| (0..self.n).all(|i| self.prob(j, i) == if i == j { 1.0 } else { 0.0 }))
    }

    /// Read-type distribution for pool frequencies `freqs`.
    pub fn apply(&self, freqs: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let row = &self.entries[j * self.n..(j + 1) * self.n];
            *o = row.iter().zip(freqs).map(|(w, f)| w * f).sum();
        }
    }
}

/// One channel instance: `n` types, budget `n·g` objects, `n·r` reads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelParams {
    n: usize,
    g: f64,
    r: f64,
    total_samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel: Option<Kernel>,
}

impl ChannelParams {
    /// Rejects `n·r` that is not (numerically) an integer.
    pub fn new(n: usize, g: f64, r: f64) -> Result<Self> {
        let op = "ChannelParams::new";
        if n == 0 {
            return Err(Error::domain(op, "n must be at least 1"));
        }
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::domain(op, format!("g must be positive, got {g}")));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::domain(op, format!("r must be positive, got {r}")));
        }
        let nr = n as f64 * r;
        let rounded = nr.round();
        if (nr - rounded).abs() > 1e-9 * rounded.max(1.0) || rounded < 1.0 {
            return Err(Error::domain(op, format!("n*r = {nr} is not a positive integer")));
        }
        Ok(ChannelParams {
            n,
            g,
            r,
            total_samples: rounded as u64,
            kernel: None,
        })
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> Result<Self> {
        if kernel.dim() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: kernel.dim(),
            });
        }
        self.kernel = if kernel.is_identity() { None } else { Some(kernel) };
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Number of reads `n·r`.
    pub fn total_samples(&self) -> u64 {
        self.total_samples
    }

    /// Object budget `n·g`.
    pub fn budget(&self) -> f64 {
        self.n as f64 * self.g
    }

    pub fn kernel(&self) -> Option<&Kernel> {
        self.kernel.as_ref()
    }
}

/// Checks the dimension, the empty-pool condition and the budget `Σx ≤ n·g`.
pub fn validate_codeword(x: &CountVector, params: &ChannelParams) -> Result<()> {
    if x.dim() != params.n {
        return Err(Error::Dimension {
            expected: params.n,
            actual: x.dim(),
        });
    }
    let total = x.total();
    if total == 0 {
        return Err(Error::Codeword(Violation::EmptyPool));
    }
    // tiny slack so that e.g. n·g = 12.000000000000002 admits 12
    if total as f64 > params.budget() * (1.0 + 1e-12) {
        return Err(Error::Codeword(Violation::BudgetExceeded {
            total,
            budget: params.budget(),
        }));
    }
    Ok(())
}

/// Read-type probabilities `x̂·W` for a validated codeword.
pub fn read_distribution(x: &CountVector, params: &ChannelParams) -> Vec<f64> {
    let t = x.total() as f64;
    let freqs: Vec<f64> = x.as_slice().iter().map(|&c| c as f64 / t).collect();
    match &params.kernel {
        None => freqs,
        Some(k) => {
            let mut out = vec![0.0; params.n];
            k.apply(&freqs, &mut out);
            out
        }
    }
}

/// Samples the channel output `y ~ Mul(n·r, x̂·W)`.
pub fn transmit(x: &CountVector, params: &ChannelParams, rng: &mut RngStream) -> Result<CountVector> {
    validate_codeword(x, params)?;
    let probs = read_distribution(x, params);
    let mut out = vec![0u64; params.n];
    multinomial_fill(params.total_samples, &probs, rng, &mut out);
    Ok(CountVector::new(out))
}

/// Samples the Poissonized surrogate `zᵢ ~ Poi((r/g)·xᵢ)` independently.
pub fn transmit_poissonized(
    x: &CountVector,
    params: &ChannelParams,
    rng: &mut RngStream,
) -> Result<CountVector> {
    validate_codeword(x, params)?;
    if params.kernel.is_some() {
        return Err(Error::Unsupported(
            "the Poissonized surrogate is only defined for the identity read kernel".into(),
        ));
    }
    let gain = params.r / params.g;
    Ok(CountVector::new(
        x.as_slice()
            .iter()
            .map(|&c| poisson_sample(gain * c as f64, rng))
            .collect(),
    ))
}

/// `ln[(nr)! / ((nr)^{nr} e^{-nr})]`, the log-ratio of the conditional
/// multinomial and Poisson likelihoods at any output with `Σy = nr`.
pub fn multinomial_poisson_ratio_log(total_samples: u64) -> Result<Nats> {
    if total_samples == 0 {
        return Err(Error::domain("multinomial_poisson_ratio_log", "need at least one sample"));
    }
    let m = total_samples as f64;
    Ok(Nats(ln_factorial(total_samples) - m * m.ln() + m))
}

/// `√(e·M)`, the event-transfer factor between a multinomial vector and its
/// Poissonized counterpart.
///
/// This factor is not universal: for events supported on `{Σy = M}` the ratio
/// is `M!/(M^M e^{-M}) ≈ √(2πM)`, which exceeds `√(eM)`. The universal factor is
/// `e·√M` (see [`universal_event_factor`]).
pub fn event_poissonization_factor(total_samples: u64) -> Result<f64> {
    if total_samples == 0 {
        return Err(Error::domain("event_poissonization_factor", "need at least one sample"));
    }
    Ok((std::f64::consts::E * total_samples as f64).sqrt())
}

/// `e·√M`, an event-transfer factor valid for every event since
/// `P[Poi(M) = M] ≥ 1/(e√M)`.
pub fn universal_event_factor(total_samples: u64) -> Result<f64> {
    if total_samples == 0 {
        return Err(Error::domain("universal_event_factor", "need at least one sample"));
    }
    Ok(std::f64::consts::E * (total_samples as f64).sqrt())
}

const ENUM_MAX_DIM: usize = 4;
const ENUM_MAX_MEAN: f64 = 30.0;

fn check_small_instance(op: &'static str, mean: f64, probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.len() > ENUM_MAX_DIM {
        return Err(Error::domain(op, format!("dimension must be 1..={ENUM_MAX_DIM}")));
    }
    if !(mean > 0.0 && mean <= ENUM_MAX_MEAN) {
        return Err(Error::domain(op, format!("mean must lie in (0, {ENUM_MAX_MEAN}]")));
    }
    if probs.iter().any(|p| !(*p >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::domain(op, "probabilities must be non-negative and sum to 1"));
    }
    Ok(())
}

fn ln_multinomial(y: &[u64], probs: &[f64]) -> f64 {
    let q: u64 = y.iter().sum();
    let mut acc = ln_factorial(q);
    for (&k, &p) in y.iter().zip(probs) {
        if k > 0 {
            if p == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += k as f64 * p.ln() - ln_factorial(k);
        }
    }
    acc
}

// Smallest k ≥ λ with P[Poi(λ) > k] < 1e-17.
fn poisson_cutoff(lambda: f64) -> u64 {
    if lambda == 0.0 {
        return 0;
    }
    let mut k = lambda.ceil() as u64;
    while 1.0 - poisson_cdf(k, lambda).unwrap_or(1.0) >= 1e-17 && ln_poisson(k, lambda) > -45.0 {
        k += 1;
    }
    k
}

fn for_each_in_box(limits: &[u64], mut f: impl FnMut(&[u64])) {
    let mut y = vec![0u64; limits.len()];
    loop {
        f(&y);
        let mut i = 0;
        loop {
            if i == y.len() {
                return;
            }
            if y[i] < limits[i] {
                y[i] += 1;
                break;
            }
            y[i] = 0;
            i += 1;
        }
    }
}

/// Exact check of the Poissonization fact: with a `Poi(M)` number of trials,
/// the multinomial counts are independent `Poi(M·pⱼ)`. Returns the largest
/// absolute PMF discrepancy over a box holding all but ~1e-16 of the mass.
pub fn poissonization_identity_check(total_mean: f64, probs: &[f64]) -> Result<f64> {
    check_small_instance("poissonization_identity_check", total_mean, probs)?;
    let limits: Vec<u64> = probs.iter().map(|&p| poisson_cutoff(total_mean * p)).collect();
    let mut worst = 0.0f64;
    for_each_in_box(&limits, |y| {
        let q: u64 = y.iter().sum();
        let mixed = (ln_poisson(q, total_mean) + ln_multinomial(y, probs)).exp();
        let product: f64 = y
            .iter()
            .zip(probs)
            .map(|(&k, &p)| ln_poisson(k, total_mean * p))
            .sum::<f64>()
            .exp();
        worst = worst.max((mixed - product).abs());
    });
    Ok(worst)
}

/// Exact `(P[G ∈ E], P[G̃ ∈ E])` for `G ~ Mul(M, p)` and the Poissonized
/// counts `G̃ⱼ ~ Poi(M·pⱼ)`. The Poissonized side is summed over a box and is
/// therefore a (tight) under-estimate.
pub fn event_probabilities(
    total_samples: u64,
    probs: &[f64],
    event: impl Fn(&[u64]) -> bool,
) -> Result<(f64, f64)> {
    let m = total_samples as f64;
    check_small_instance("event_probabilities", m, probs)?;
    let mut multinomial = 0.0;
    for_each_in_box(&vec![total_samples; probs.len()], |y| {
        if y.iter().sum::<u64>() == total_samples && event(y) {
            multinomial += ln_multinomial(y, probs).exp();
        }
    });
    let limits: Vec<u64> = probs.iter().map(|&p| poisson_cutoff(m * p)).collect();
    let mut poissonized = 0.0;
    for_each_in_box(&limits, |y| {
        if event(y) {
            poissonized += y
                .iter()
                .zip(probs)
                .map(|(&k, &p)| ln_poisson(k, m * p))
                .sum::<f64>()
                .exp();
        }
    });
    Ok((multinomial, poissonized))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fig1() -> ChannelParams {
        ChannelParams::new(6, 2.0, 3.0).unwrap()
    }

    #[test]
    fn fig1_codeword_is_admissible() {
        let x = CountVector::new(vec![3, 4, 1, 0, 2, 2]);
        validate_codeword(&x, &fig1()).unwrap();
        let mut rng = RngStream::new(1, 0);
        assert_eq!(transmit(&x, &fig1(), &mut rng).unwrap().total(), 18);
    }

    #[test]
    fn codeword_violations() {
        let p = fig1();
        assert!(matches!(
            validate_codeword(&CountVector::zeros(6), &p),
            Err(Error::Codeword(Violation::EmptyPool))
        ));
        assert!(matches!(
            validate_codeword(&CountVector::new(vec![3, 4, 1, 0, 2, 3]), &p),
            Err(Error::Codeword(Violation::BudgetExceeded { total: 13, .. }))
        ));
        assert!(matches!(
            validate_codeword(&CountVector::new(vec![1, 1]), &p),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn non_integer_read_count_is_rejected() {
        assert!(ChannelParams::new(6, 2.0, 3.1).is_err());
        assert!(ChannelParams::new(500, 8.0, 3.2).is_ok());
    }

    #[test]
    fn point_mass_codeword_is_deterministic() {
        let p = ChannelParams::new(4, 5.0, 2.5).unwrap();
        let x = CountVector::new(vec![0, 7, 0, 0]);
        let mut rng = RngStream::new(3, 0);
        for _ in 0..10 {
            assert_eq!(transmit(&x, &p, &mut rng).unwrap().as_slice(), &[0, 10, 0, 0]);
        }
    }

    #[test]
    fn slot_means_match_frequencies() {
        let p = fig1();
        let x = CountVector::new(vec![3, 4, 1, 0, 2, 2]);
        let mut rng = RngStream::new(4, 0);
        let reps = 100_000;
        let mut sums = [0f64; 6];
        for _ in 0..reps {
            let y = transmit(&x, &p, &mut rng).unwrap();
            for (s, &c) in sums.iter_mut().zip(y.as_slice()) {
                *s += c as f64;
            }
        }
        for (i, &xi) in x.as_slice().iter().enumerate() {
            let q = xi as f64 / 12.0;
            let sd = (18.0 * q * (1.0 - q) / reps as f64).sqrt();
            assert!((sums[i] / reps as f64 - 18.0 * q).abs() <= 4.0 * sd + 1e-12);
        }
    }

    #[test]
    fn kernel_validation_and_noise() {
        assert!(Kernel::new(2, vec![0.9, 0.2, 0.1, 0.7]).is_err());
        let k = Kernel::new(2, vec![0.9, 0.2, 0.1, 0.8]).unwrap();
        let p = ChannelParams::new(2, 10.0, 50.0).unwrap().with_kernel(k).unwrap();
        let x = CountVector::new(vec![10, 0]);
        assert_eq!(read_distribution(&x, &p), vec![0.9, 0.1]);
        assert!(transmit_poissonized(&x, &p, &mut RngStream::new(0, 0)).is_err());
        let same = ChannelParams::new(2, 10.0, 50.0).unwrap().with_kernel(Kernel::identity(2)).unwrap();
        assert!(same.kernel().is_none());
    }

    #[test]
    fn poissonized_outputs() {
        let p = ChannelParams::new(4, 5.0, 2.5).unwrap();
        let x = CountVector::new(vec![5, 0, 10, 5]);
        let mut rng = RngStream::new(5, 0);
        let reps = 50_000;
        let mut total = 0.0;
        let mut first = 0.0;
        for _ in 0..reps {
            let z = transmit_poissonized(&x, &p, &mut rng).unwrap();
            assert_eq!(z.as_slice()[1], 0);
            total += z.total() as f64;
            first += z.as_slice()[0] as f64;
        }
        let nr = 10.0;
        assert!((total / reps as f64 - nr).abs() < 4.0 * (nr / reps as f64).sqrt());
        assert!((first / reps as f64 - 2.5).abs() < 4.0 * (2.5 / reps as f64).sqrt());
    }

    #[test]
    fn ratio_log_anchors() {
        let one = multinomial_poisson_ratio_log(1).unwrap().get();
        assert!((one - 1.0).abs() < 1e-15);
        assert!((0.5 * (2.0 * PI).ln()..=0.5 * (6.0 * PI).ln()).contains(&one));
        let h = multinomial_poisson_ratio_log(100).unwrap().get();
        assert!((0.5 * (200.0 * PI).ln()..=0.5 * (600.0 * PI).ln()).contains(&h));
        let d = multinomial_poisson_ratio_log(10_000).unwrap().get() - h;
        assert!((d - 0.5 * 100f64.ln()).abs() < 0.01);
        assert!(multinomial_poisson_ratio_log(0).is_err());
    }

    #[test]
    fn poissonization_identity_small_instances() {
        assert!(poissonization_identity_check(5.0, &[0.5, 0.5]).unwrap() <= 1e-10);
        assert!(poissonization_identity_check(1.0, &[1.0]).unwrap() <= 1e-15);
        assert!(poissonization_identity_check(10.0, &[0.2, 0.3, 0.5]).unwrap() <= 1e-10);
        assert!(poissonization_identity_check(10.0, &[0.2, 0.3, 0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn event_factor_inequality() {
        assert!((event_poissonization_factor(1).unwrap() - 1.648_721_270_700_128).abs() < 1e-12);
        let (mul, poi) = event_probabilities(6, &[0.5, 0.5], |y| y[0] >= 5).unwrap();
        assert!((mul - 7.0 / 64.0).abs() < 1e-15);
        assert!(mul <= event_poissonization_factor(6).unwrap() * poi);
        let (mul, poi) = event_probabilities(20, &[0.5, 0.5], |y| y[0] == y[1]).unwrap();
        assert!(mul <= event_poissonization_factor(20).unwrap() * poi);
    }
}
