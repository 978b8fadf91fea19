use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special_math::{log_sum_exp, Nats};

/// A probability mass function on `{offset, offset+1, ..., offset+len-1}`,
/// stored as natural-log weights. Serializes as `{offset, log_weights[]}`;
/// zero-probability points are `null` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf")]
pub struct DiscretePmf {
    offset: u64,
    #[serde(serialize_with = "ser_log_weights")]
    log_weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPmf {
    offset: u64,
    log_weights: Vec<Option<f64>>,
}

impl TryFrom<RawPmf> for DiscretePmf {
    type Error = Error;

    fn try_from(raw: RawPmf) -> Result<Self> {
        let lw: Vec<f64> = raw
            .log_weights
            .into_iter()
            .map(|w| w.unwrap_or(f64::NEG_INFINITY))
            .collect();
        let total: f64 = lw.iter().map(|w: &f64| w.exp()).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(
                "DiscretePmf",
                format!("serialized weights sum to {total}, not 1"),
            ));
        }
        let pmf = DiscretePmf::from_log_weights(raw.offset, lw)?;
        Ok(pmf)
    }
}

fn ser_log_weights<S: serde::Serializer>(w: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(w.len()))?;
    for v in w {
        if v.is_finite() {
            seq.serialize_element(v)?;
        } else {
            seq.serialize_element(&Option::<f64>::None)?;
        }
    }
    seq.end()
}

impl DiscretePmf {
    /// Builds a PMF from unnormalized log weights (`-inf` marks zero mass).
    pub fn from_log_weights(offset: u64, mut log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::domain("DiscretePmf", "empty support"));
        }
        if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::domain("DiscretePmf", "log weights must be finite or -inf"));
        }
        let norm = log_sum_exp(&log_weights);
        if norm == f64::NEG_INFINITY {
            return Err(Error::domain("DiscretePmf", "all weights are zero"));
        }
        for w in &mut log_weights {
            *w -= norm;
        }
        Ok(DiscretePmf {
            offset,
            log_weights,
        })
    }

    /// Builds a PMF from non-negative (unnormalized) weights.
    pub fn from_weights(offset: u64, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::domain("DiscretePmf", "weights must be finite and non-negative"));
        }
        let lw = weights
            .iter()
            .map(|&w| if w > 0.0 { w.ln() } else { f64::NEG_INFINITY })
            .collect();
        Self::from_log_weights(offset, lw)
    }

    pub fn point_mass(x: u64) -> Self {
        DiscretePmf {
            offset: x,
            log_weights: vec![0.0],
        }
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    /// Largest point of the stored support.
    pub fn max_support(&self) -> u64 {
        self.offset + self.log_weights.len() as u64 - 1
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn log_prob(&self, k: u64) -> f64 {
        if k < self.offset {
            return f64::NEG_INFINITY;
        }
        self.log_weights
            .get((k - self.offset) as usize)
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }

    pub fn prob(&self, k: u64) -> f64 {
        self.log_prob(k).exp()
    }

    /// Points with positive mass, paired with their probabilities.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.log_weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_finite())
            .map(move |(i, w)| (self.offset + i as u64, w.exp()))
    }

    /// Points with positive mass, with log probabilities.
    pub fn iter_log(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.log_weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_finite())
            .map(move |(i, &w)| (self.offset + i as u64, w))
    }

    /// Smallest and largest points with positive mass.
    pub fn support_bounds(&self) -> (u64, u64) {
        let first = self.log_weights.iter().position(|w| w.is_finite()).unwrap_or(0);
        let last = self.log_weights.iter().rposition(|w| w.is_finite()).unwrap_or(0);
        (self.offset + first as u64, self.offset + last as u64)
    }

    pub fn is_point_mass(&self) -> bool {
        self.log_weights.iter().filter(|w| w.is_finite()).count() == 1
    }

    pub fn total_mass(&self) -> f64 {
        self.log_weights.iter().map(|w| w.exp()).sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(k, p)| (k as f64 - m).powi(2) * p).sum()
    }

    pub fn entropy(&self) -> Nats {
        Nats(-self.iter_log().map(|(_, w)| w.exp() * w).sum::<f64>())
    }

    pub fn sampler(&self) -> PmfSampler {
        let mut values = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (k, p) in self.iter() {
            acc += p;
            values.push(k);
            cdf.push(acc);
        }
        let total = acc;
        for c in &mut cdf {
            *c /= total;
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        PmfSampler { values, cdf }
    }
}

/// Inversion sampler over a cumulative table.
#[derive(Debug, Clone)]
pub struct PmfSampler {
    values: Vec<u64>,
    cdf: Vec<f64>,
}

impl PmfSampler {
    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        let u = rng.open01();
        let idx = self.cdf.partition_point(|&c| c < u);
        self.values[idx.min(self.values.len() - 1)]
    }

    pub fn min_value(&self) -> u64 {
        self.values[0]
    }

    pub fn max_value(&self) -> u64 {
        *self.values.last().expect("sampler has non-empty support")
    }
}
