//! Count and frequency vectors, plus the `FQCV` binary trace framing.
//!
//! `FQCV` layout (all little-endian): the 4 magic bytes `b"FQCV"`, the
//! dimension `n` as `u32`, then `n` entries as `u32`. A trace file is a plain
//! concatenation of such frames.

use std::fmt;
use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FQCV_MAGIC: [u8; 4] = *b"FQCV";

/// Per-type object counts (a codeword, or a channel output histogram).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountVector(Vec<u64>);

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Self {
        CountVector(counts)
    }

    pub fn zeros(n: usize) -> Self {
        CountVector(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [u64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.0
    }

    /// Normalizes to pool concentrations; `None` for an empty pool.
    pub fn frequencies(&self) -> Option<FrequencyVector> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let t = total as f64;
        Some(FrequencyVector(self.0.iter().map(|&c| c as f64 / t).collect()))
    }

    /// `(index, count)` pairs of the non-zero entries.
    pub fn to_sparse(&self) -> Vec<(usize, u64)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
            .collect()
    }

    /// Applies a permutation: entry `i` moves to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<CountVector> {
        if perm.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: perm.len(),
            });
        }
        let mut out = vec![0; self.dim()];
        for (i, &p) in perm.iter().enumerate() {
            out[p] = self.0[i];
        }
        Ok(CountVector(out))
    }

    pub fn write_fqcv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let n = u32::try_from(self.dim())
            .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "dimension exceeds u32"))?;
        w.write_all(&FQCV_MAGIC)?;
        w.write_all(&n.to_le_bytes())?;
        for &c in &self.0 {
            let c = u32::try_from(c)
                .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "count exceeds u32"))?;
            w.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads one frame; `Ok(None)` on a clean end of stream.
    pub fn read_fqcv<R: Read>(r: &mut R) -> Result<Option<CountVector>> {
        let mut magic = [0u8; 4];
        match read_exact_or_eof(r, &mut magic)? {
            false => return Ok(None),
            true if magic != FQCV_MAGIC => {
                return Err(Error::Framing(format!("bad magic {magic:?}")));
            }
            true => {}
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)
            .map_err(|e| Error::Framing(format!("truncated header: {e}")))?;
        let n = u32::from_le_bytes(word) as usize;
        let mut counts = Vec::with_capacity(n.min(1 << 20));
        for i in 0..n {
            r.read_exact(&mut word)
                .map_err(|e| Error::Framing(format!("truncated at entry {i} of {n}: {e}")))?;
            counts.push(u32::from_le_bytes(word) as u64);
        }
        Ok(Some(CountVector(counts)))
    }
}

fn read_exact_or_eof<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<bool> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) if filled == 0 => return Ok(false),
            Ok(0) => return Err(Error::Framing("truncated magic".into())),
            Ok(k) => filled += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(Error::Framing(e.to_string())),
        }
    }
    Ok(true)
}

impl From<Vec<u64>> for CountVector {
    fn from(v: Vec<u64>) -> Self {
        CountVector(v)
    }
}

/// Normalized concentrations `x_i / Σx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector(Vec<f64>);

impl FrequencyVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let s: f64 = p.iter().sum();
        if p.iter().any(|&v| !(v >= 0.0)) || (s - 1.0).abs() > 1e-12 {
            return Err(Error::domain(
                "FrequencyVector::new",
                format!("entries must be non-negative and sum to 1 (sum = {s})"),
            ));
        }
        Ok(FrequencyVector(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Why a count vector is not an admissible codeword.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyPool,
    BudgetExceeded { total: u64, budget: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPool => write!(f, "empty pool (all counts are zero)"),
            Violation::BudgetExceeded { total, budget } => {
                write!(f, "total {total} exceeds the object budget n*g = {budget}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frequencies_of_fig1_codeword() {
        let x = CountVector::new(vec![3, 4, 1, 0, 2, 2]);
        assert_eq!(x.total(), 12);
        let f = x.frequencies().unwrap();
        assert!((f.as_slice()[1] - 4.0 / 12.0).abs() < 1e-15);
        assert!(CountVector::zeros(3).frequencies().is_none());
    }

    #[test]
    fn fqcv_bytes_are_little_endian() {
        let mut buf = Vec::new();
        CountVector::new(vec![1, 258]).write_fqcv(&mut buf).unwrap();
        assert_eq!(
            buf,
            [b'F', b'Q', b'C', b'V', 2, 0, 0, 0, 1, 0, 0, 0, 2, 1, 0, 0]
        );
    }

    #[test]
    fn fqcv_rejects_garbage() {
        let mut bad: &[u8] = b"ABCD\x01\x00\x00\x00";
        assert!(CountVector::read_fqcv(&mut bad).is_err());
        let mut short: &[u8] = b"FQCV\x02\x00\x00\x00\x01\x00\x00\x00";
        assert!(CountVector::read_fqcv(&mut short).is_err());
        let mut empty: &[u8] = b"";
        assert!(CountVector::read_fqcv(&mut empty).unwrap().is_none());
    }

    #[test]
    fn count_above_u32_is_refused() {
        let mut buf = Vec::new();
        assert!(CountVector::new(vec![u32::MAX as u64 + 1]).write_fqcv(&mut buf).is_err());
    }

    proptest! {
        #[test]
        fn fqcv_stream_round_trip(frames in prop::collection::vec(prop::collection::vec(0u64..=u32::MAX as u64, 0..20), 0..5)) {
            let mut buf = Vec::new();
            for f in &frames {
                CountVector::new(f.clone()).write_fqcv(&mut buf).unwrap();
            }
            let mut r: &[u8] = &buf;
            let mut back = Vec::new();
            while let Some(cv) = CountVector::read_fqcv(&mut r).unwrap() {
                back.push(cv.into_inner());
            }
            prop_assert_eq!(back, frames);
        }
    }
}
