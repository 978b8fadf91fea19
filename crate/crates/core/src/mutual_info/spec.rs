use serde::Serialize;

use crate::distributions::{ln_poisson, poisson_entropy_unchecked, DiscretePmf};
use crate::error::{Error, Result};
use crate::special_math::{ln_factorial, log_sum_exp, regularized_gamma_p, Nats};

/// Residual output tail mass allowed when choosing the output cutoff.
pub const OUTPUT_TAIL_TOL: f64 = 1e-12;
/// Hard cap on the output cutoff.
pub const Z_MAX_CAP: u64 = 1_000_000;

const CONDITIONAL_ENTROPY_TOL: f64 = 1e-15;

/// Scalar Poisson channel `Z | X=x ~ Poi(gain·x)` with a finite-support input.
#[derive(Debug, Clone, Serialize)]
pub struct PoissonChannelSpec {
    input: DiscretePmf,
    gain: f64,
    z_max: u64,
    /// `ln P_Z(z)` for `z ∈ 0..=z_max+1`.
    #[serde(skip)]
    log_pz: Vec<f64>,
    /// `(x, ln P_X(x), ln(gain·x))` over the input support.
    #[serde(skip)]
    atoms: Vec<Atom>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Atom {
    pub x: u64,
    pub log_p: f64,
    pub log_rate: f64,
}

impl Atom {
    #[inline]
    pub(crate) fn log_lik(&self, z: u64, gain: f64) -> f64 {
        if self.x == 0 {
            return if z == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        -gain * self.x as f64 + z as f64 * self.log_rate - ln_factorial(z)
    }
}

impl PoissonChannelSpec {
    pub fn new(input: DiscretePmf, gain: f64) -> Result<Self> {
        let op = "PoissonChannelSpec::new";
        if !(gain > 0.0) || !gain.is_finite() {
            return Err(Error::domain(op, format!("gain must be positive, got {gain}")));
        }
        let atoms: Vec<Atom> = input
            .iter_log()
            .map(|(x, log_p)| Atom {
                x,
                log_p,
                log_rate: (gain * x as f64).ln(),
            })
            .collect();
        let z_max = output_cutoff(&atoms, gain)?;
        let mut scratch = Vec::with_capacity(atoms.len());
        let log_pz = (0..=z_max + 1)
            .map(|z| mixture_log_pmf(&atoms, gain, z, &mut scratch))
            .collect();
        Ok(PoissonChannelSpec {
            input,
            gain,
            z_max,
            log_pz,
            atoms,
        })
    }

    pub fn input(&self) -> &DiscretePmf {
        &self.input
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Smallest `z` with `P[Z > z] < 1e-12`.
    pub fn z_max(&self) -> u64 {
        self.z_max
    }

    pub(crate) fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `ln P_Z(z)`; computed on demand beyond the cached range.
    pub fn log_output_prob(&self, z: u64) -> f64 {
        match self.log_pz.get(z as usize) {
            Some(&v) => v,
            None => mixture_log_pmf(&self.atoms, self.gain, z, &mut Vec::new()),
        }
    }

    /// `ln P_Z(z)` for `z ∈ 0..=z_max`.
    pub fn log_output_table(&self) -> &[f64] {
        &self.log_pz[..=self.z_max as usize]
    }

    /// `H(Z | X = x)`, i.e. the entropy of `Poi(gain·x)`.
    pub fn conditional_entropy_at(&self, x: u64) -> f64 {
        poisson_entropy_unchecked(self.gain * x as f64, CONDITIONAL_ENTROPY_TOL)
    }

    /// `D(Poi(gain·x) ‖ P_Z)` summed over the output range.
    pub fn divergence_at(&self, x: u64) -> f64 {
        let atom = Atom {
            x,
            log_p: 0.0,
            log_rate: (self.gain * x as f64).ln(),
        };
        let mut acc = 0.0;
        for z in 0..=self.z_max {
            let ll = atom.log_lik(z, self.gain);
            if ll.is_finite() {
                acc += ll.exp() * (ll - self.log_pz[z as usize]);
            }
        }
        acc
    }
}

fn mixture_log_pmf(atoms: &[Atom], gain: f64, z: u64, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(atoms.iter().map(|a| a.log_p + a.log_lik(z, gain)));
    log_sum_exp(scratch)
}

fn mixture_tail(atoms: &[Atom], gain: f64, z: u64) -> Result<f64> {
    let mut tail = 0.0;
    for a in atoms {
        if a.x > 0 {
            // P[Poi(λ) > z] = P(z + 1, λ)
            tail += a.log_p.exp() * regularized_gamma_p(z as f64 + 1.0, gain * a.x as f64)?;
        }
    }
    Ok(tail)
}

fn output_cutoff(atoms: &[Atom], gain: f64) -> Result<u64> {
    let op = "PoissonChannelSpec::new";
    let top = atoms.iter().map(|a| a.x).max().unwrap_or(0) as f64 * gain;
    if top == 0.0 {
        return Ok(0);
    }
    let mut hi = (top + 10.0 * top.sqrt() + 30.0).ceil() as u64;
    while mixture_tail(atoms, gain, hi)? >= OUTPUT_TAIL_TOL {
        if hi >= Z_MAX_CAP {
            return Err(Error::numeric(
                op,
                format!("output cutoff would exceed the cap {Z_MAX_CAP}"),
            ));
        }
        hi = (hi * 2).min(Z_MAX_CAP);
    }
    let mut lo = 0u64;
    if mixture_tail(atoms, gain, 0)? < OUTPUT_TAIL_TOL {
        return Ok(0);
    }
    // invariant: tail(lo) ≥ tol > tail(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if mixture_tail(atoms, gain, mid)? < OUTPUT_TAIL_TOL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `P_Z` on `{0, …, z_max}`.
pub fn output_pmf(spec: &PoissonChannelSpec) -> Result<DiscretePmf> {
    DiscretePmf::from_log_weights(0, spec.log_output_table().to_vec())
}

/// `I(X;Z) = H(Z) − H(Z|X)`, cross-checked against `Σ P_X(x)·D(P_{Z|X=x} ‖ P_Z)`.
pub fn mutual_information(spec: &PoissonChannelSpec) -> Result<Nats> {
    let by_entropy = mi_entropy_difference(spec);
    let by_divergence = mi_average_divergence(spec);
    let scale = by_entropy.abs().max(1.0);
    if (by_entropy - by_divergence).abs() > 1e-9 * scale {
        return Err(Error::numeric(
            "mutual_information",
            format!("entropy path {by_entropy} and divergence path {by_divergence} disagree"),
        ));
    }
    Ok(Nats(by_entropy.max(0.0)))
}

/// Entropy-difference path of [`mutual_information`], without the cross-check.
pub fn mi_entropy_difference(spec: &PoissonChannelSpec) -> f64 {
    let h_z: f64 = -spec
        .log_output_table()
        .iter()
        .filter(|w| w.is_finite())
        .map(|&w| w.exp() * w)
        .sum::<f64>();
    let h_z_given_x: f64 = spec
        .atoms
        .iter()
        .map(|a| a.log_p.exp() * spec.conditional_entropy_at(a.x))
        .sum();
    h_z - h_z_given_x
}

/// Averaged-divergence path of [`mutual_information`].
pub fn mi_average_divergence(spec: &PoissonChannelSpec) -> f64 {
    spec.atoms
        .iter()
        .map(|a| a.log_p.exp() * spec.divergence_at(a.x))
        .sum()
}

/// `ln P_{Z|X}(z|x) − ln P_Z(z)`. Beyond the cached output range `P_Z(z)`
/// is evaluated directly rather than truncated.
pub fn information_density(x: u64, z: u64, spec: &PoissonChannelSpec) -> Result<Nats> {
    if !spec.input.log_prob(x).is_finite() {
        return Err(Error::domain(
            "information_density",
            format!("input point {x} has zero probability"),
        ));
    }
    let rate = spec.gain * x as f64;
    Ok(Nats(ln_poisson(z, rate) - spec.log_output_prob(z)))
}
