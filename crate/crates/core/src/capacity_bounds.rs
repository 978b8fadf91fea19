//! Closed-form capacity bounds, the optimal sampling ratio, the
//! stars-and-bars converse and the DNA-storage lower bound.
//!
//! Every bound here is the explicit finite part only; the vanishing
//! `o(1)` and `o(1/ln K)` corrections are not computable and are dropped.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_math::{lambert_w0, ln_factorial, maximize_unimodal, psi_max_entropy, Nats};

const NOTE_LITTLE_O: &str = "vanishing o(1) terms omitted";

fn check_positive(op: &'static str, name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(op, format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `½·ln(min(r, e·g))`.
pub fn converse_bound(g: f64, r: f64) -> Result<Nats> {
    check_positive("converse_bound", "g", g)?;
    check_positive("converse_bound", "r", r)?;
    Ok(Nats(0.5 * r.min(std::f64::consts::E * g).ln()))
}

/// `½·ln r − Ψ(r/g)`.
pub fn achievability_bound(g: f64, r: f64) -> Result<Nats> {
    check_positive("achievability_bound", "g", g)?;
    check_positive("achievability_bound", "r", r)?;
    Ok(Nats(0.5 * r.ln()) - psi_max_entropy(r / g)?)
}

/// Both bounds of the noiseless channel at one `(g, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub g: f64,
    pub r: f64,
    pub converse: Nats,
    pub achievability: Nats,
    /// `converse − achievability`
    pub gap: Nats,
    /// True when `r > e·g`, where the converse saturates at `½·ln(e·g)`.
    pub converse_clamped: bool,
    pub notes: Vec<String>,
}

pub fn bound_report(g: f64, r: f64) -> Result<BoundReport> {
    let converse = converse_bound(g, r)?;
    let achievability = achievability_bound(g, r)?;
    let converse_clamped = r > std::f64::consts::E * g;
    let mut notes = vec![NOTE_LITTLE_O.to_string()];
    if converse_clamped {
        notes.push("r exceeds e*g: converse clamped at 0.5*ln(e*g)".to_string());
    }
    Ok(BoundReport {
        g,
        r,
        converse,
        achievability,
        gap: converse - achievability,
        converse_clamped,
        notes,
    })
}

/// Maximizer of `μ ↦ ½·ln μ − Ψ(μ)` and the maximum value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalRatio {
    pub mu_star: f64,
    pub offset: Nats,
}

impl OptimalRatio {
    /// `|1/(2μ) − ln(1 + 1/μ)|` at the returned maximizer.
    pub fn stationarity_residual(&self) -> f64 {
        (0.5 / self.mu_star - (1.0 / self.mu_star).ln_1p()).abs()
    }
}

// The stationarity residual has slope ~1/(2μ²) ≈ 3 at the optimum, so the
// argmax has to be pinned well below the residual target.
const RATIO_TOL: f64 = 1e-9;

pub fn optimal_sampling_ratio() -> Result<OptimalRatio> {
    let f = |mu: f64| 0.5 * mu.ln() - psi_max_entropy(mu).map_or(f64::INFINITY, |p| p.get());
    let (mu_star, value) = maximize_unimodal(f, 0.01, std::f64::consts::E, RATIO_TOL)?;
    Ok(OptimalRatio {
        mu_star,
        offset: Nats(value),
    })
}

/// `ln C(n·g + n − 1, n − 1)`: the number of count vectors of dimension `n`
/// whose entries sum to `n·g`.
pub fn stars_and_bars_log_count(n: u64, g_int: u64) -> Result<Nats> {
    if n == 0 {
        return Err(Error::domain("stars_and_bars_log_count", "n must be at least 1"));
    }
    let top = n
        .checked_mul(g_int)
        .and_then(|v| v.checked_add(n - 1))
        .ok_or_else(|| Error::domain("stars_and_bars_log_count", "n*g overflows"))?;
    Ok(Nats(ln_factorial(top) - ln_factorial(n - 1) - ln_factorial(top - (n - 1))))
}

fn check_dna_regime(op: &'static str, beta: f64, alphabet_size: u32) -> Result<f64> {
    if alphabet_size < 2 {
        return Err(Error::domain(op, "alphabet size must be at least 2"));
    }
    let ln_a = (alphabet_size as f64).ln();
    let prod = beta * ln_a;
    if !(prod > 0.5 && prod < 1.0) {
        return Err(Error::domain(
            op,
            format!(
                "beta*ln|A| = {prod} is outside (1/2, 1); achievability requires beta > 1/(2 ln|A|) and a positive rate requires beta < 1/ln|A|"
            ),
        ));
    }
    Ok(prod)
}

/// `(1 − β·ln|A|)/(2β)`.
pub fn dna_pseudo_rate(beta: f64, alphabet_size: u32) -> Result<Nats> {
    let prod = check_dna_regime("dna_pseudo_rate", beta, alphabet_size)?;
    Ok(Nats((1.0 - prod) / (2.0 * beta)))
}

/// `1/ln K` coefficient `2Ψ(1)` of the corrected DNA bound with `N_K = K^{1−β ln|A|}`.
pub const DNA_CORRECTION_DEFAULT: f64 = 2.773;
/// The same coefficient with `N_K = 0.4·K^{1−β ln|A|}`.
pub const DNA_CORRECTION_OPTIMIZED: f64 = 2.59;

/// The DNA-storage operating point solved from the total nucleotide count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DnaScenario {
    pub alphabet_size: u32,
    pub beta: f64,
    /// `β·ln|A|`
    pub beta_log_a: f64,
    pub kl_total: f64,
    /// Molecule length `L = β·W(KL/β)`.
    pub molecule_length: f64,
    /// Whole nucleotides needed for that length, `⌈L⌉`.
    pub molecule_length_nt: u64,
    /// Number of molecules `K = KL/L`.
    pub molecules: f64,
    pub ln_molecules: f64,
    /// Number of distinct molecule types `K^{β ln|A|}`.
    pub unique_types: f64,
    pub pseudo_rate: Nats,
    pub optimized_ratio: bool,
    pub correction_coefficient: f64,
    /// `L·K^{β ln|A|}·pseudo_rate`, the bound without its `1/ln K` correction.
    pub log_m_leading: Nats,
    /// `L·K^{β ln|A|}·[pseudo_rate − c/(2β ln K)]`.
    pub log_m_lower: Nats,
    pub notes: Vec<String>,
}

pub fn dna_log_cardinality_lower_bound(
    kl_total: f64,
    beta: f64,
    alphabet_size: u32,
    use_optimized_ratio: bool,
) -> Result<DnaScenario> {
    let op = "dna_log_cardinality_lower_bound";
    check_positive(op, "KL", kl_total)?;
    let prod = check_dna_regime(op, beta, alphabet_size)?;
    let pseudo_rate = dna_pseudo_rate(beta, alphabet_size)?;
    // ln K = W(KL/β) because K·ln K = KL/β
    let ln_k = lambert_w0(kl_total / beta)?;
    let length = beta * ln_k;
    if !(length > 0.0) {
        return Err(Error::domain(op, "molecule length is not positive"));
    }
    let molecules = kl_total / length;
    let ln_types = prod * ln_k;
    let c = if use_optimized_ratio {
        DNA_CORRECTION_OPTIMIZED
    } else {
        DNA_CORRECTION_DEFAULT
    };
    let scale = length * ln_types.exp();
    let leading = scale * pseudo_rate.get();
    let lower = scale * (pseudo_rate.get() - c / (2.0 * beta * ln_k));
    let mut notes = vec!["vanishing o(1/ln K) term omitted".to_string()];
    if lower <= 0.0 {
        notes.push("the 1/ln K correction exceeds the pseudo-rate at this KL".to_string());
    }
    Ok(DnaScenario {
        alphabet_size,
        beta,
        beta_log_a: prod,
        kl_total,
        molecule_length: length,
        molecule_length_nt: length.ceil() as u64,
        molecules,
        ln_molecules: ln_k,
        unique_types: ln_types.exp(),
        pseudo_rate,
        optimized_ratio: use_optimized_ratio,
        correction_coefficient: c,
        log_m_leading: Nats(leading),
        log_m_lower: Nats(lower),
        notes,
    })
}

/// One point of the log-cardinality versus `KL` curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure2Row {
    pub beta: f64,
    pub kl: f64,
    pub bound_nats: f64,
    pub bound_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Figure2Table {
    pub rows: Vec<Figure2Row>,
    /// One entry per skipped β.
    pub warnings: Vec<String>,
}

pub const FIGURE2_HEADER: &str = "beta,KL,bound_nats,bound_bits";

impl Figure2Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(FIGURE2_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e}", r.beta, r.kl, r.bound_nats, r.bound_bits);
        }
        out
    }
}

/// Rows `(β, KL, bound)` of the DNA log-cardinality bound, plotted as the
/// leading term `L·K^{β ln|A|}·(1 − β ln|A|)/(2β)`. Invalid β values are
/// skipped with a warning.
pub fn figure2_rows(betas: &[f64], kl_grid: &[f64], alphabet_size: u32) -> Figure2Table {
    let mut table = Figure2Table::default();
    for &beta in betas {
        if let Err(e) = check_dna_regime("figure2_rows", beta, alphabet_size) {
            table.warnings.push(format!("skipping beta = {beta}: {e}"));
            continue;
        }
        for &kl in kl_grid {
            match dna_log_cardinality_lower_bound(kl, beta, alphabet_size, false) {
                Ok(s) => table.rows.push(Figure2Row {
                    beta,
                    kl,
                    bound_nats: s.log_m_leading.get(),
                    bound_bits: s.log_m_leading.get() / LN_2,
                }),
                Err(e) => table.warnings.push(format!("skipping beta = {beta}, KL = {kl}: {e}")),
            }
        }
    }
    table
}

/// The default β list, given as `β·ln|A|` products, and the `KL` grid.
pub fn figure2_default_grid(alphabet_size: u32) -> (Vec<f64>, Vec<f64>) {
    let ln_a = (alphabet_size as f64).ln();
    let betas = [0.55, 0.6, 0.65, 0.7, 0.76, 0.8, 0.85, 0.9]
        .iter()
        .map(|p| p / ln_a)
        .collect();
    let kls = (12..=24)
        .flat_map(|e| [1.0, 2.0, 4.0, 6.0, 8.0].map(|m| m * 10f64.powi(e)))
        .filter(|&kl| kl <= 1e24)
        .collect();
    (betas, kls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn converse_anchors() {
        assert!((converse_bound(100.0, 100.0).unwrap().get() - 0.5 * 100f64.ln()).abs() < 1e-15);
        let clamped = converse_bound(100.0, 10.0 * E * 100.0).unwrap().get();
        assert!((clamped - 0.5 * (E * 100.0).ln()).abs() < 1e-15);
        assert!(converse_bound(0.0, 1.0).is_err());
        assert!(bound_report(1.0, 10.0).unwrap().converse_clamped);
    }

    #[test]
    fn achievability_anchors() {
        let g = 1000.0;
        let at_g = achievability_bound(g, g).unwrap().get() - 0.5 * g.ln();
        assert!((at_g + 2.0 * LN_2).abs() < 1e-12);
        let near_opt = achievability_bound(g, 0.398 * g).unwrap().get() - 0.5 * g.ln();
        assert!((near_opt + 1.295).abs() < 1e-3);
    }

    #[test]
    fn optimal_ratio() {
        let opt = optimal_sampling_ratio().unwrap();
        assert!((opt.mu_star - 0.398).abs() < 0.002);
        assert!((opt.offset.get() + 1.295).abs() < 0.002);
        assert!(opt.stationarity_residual() <= 1e-6);
    }

    #[test]
    fn stars_and_bars() {
        assert!((stars_and_bars_log_count(2, 1).unwrap().get() - 3f64.ln()).abs() < 1e-14);
        assert_eq!(stars_and_bars_log_count(1, 17).unwrap().get(), 0.0);
        let per = stars_and_bars_log_count(1000, 10).unwrap().get() / 1000.0;
        assert!(per <= (E * 10.0).ln() + 0.05);
        assert!(stars_and_bars_log_count(0, 1).is_err());
    }

    #[test]
    fn pseudo_rate() {
        let beta = 0.76 / 4f64.ln();
        let r = dna_pseudo_rate(beta, 4).unwrap().get();
        assert!((r - 0.24 * 4f64.ln() / 1.52).abs() < 1e-15);
        assert!((r - 0.218_89).abs() < 1e-5);
        assert!(dna_pseudo_rate(0.999_999_9 / 4f64.ln(), 4).unwrap().get() < 1e-6);
        assert!(dna_pseudo_rate(0.4 / 4f64.ln(), 4).is_err());
        assert!(dna_pseudo_rate(1.1 / 4f64.ln(), 4).is_err());
    }

    #[test]
    fn dna_scenario_geometry() {
        let beta = 0.76 / 4f64.ln();
        let s = dna_log_cardinality_lower_bound(4e21, beta, 4, false).unwrap();
        assert!((s.molecule_length - 25.4936).abs() < 1e-3);
        assert_eq!(s.molecule_length_nt, 26);
        assert!((s.molecules * s.molecule_length / 4e21 - 1.0).abs() < 1e-12);
        assert!((s.molecules.ln() - s.ln_molecules).abs() < 1e-9);
        let opt = dna_log_cardinality_lower_bound(4e21, beta, 4, true).unwrap();
        assert!(opt.log_m_lower.get() > s.log_m_lower.get());
        assert_eq!(opt.log_m_leading, s.log_m_leading);
    }

    #[test]
    fn figure2_shape() {
        let beta = 0.76 / 4f64.ln();
        let t = figure2_rows(&[beta, 0.3], &[1e20, 4e21, 1e22], 4);
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.warnings.len(), 1);
        assert!(t.rows.windows(2).all(|w| w[0].bound_nats < w[1].bound_nats));
        assert!(figure2_rows(&[beta], &[], 4).rows.is_empty());
        let csv = figure2_rows(&[], &[1e20], 4).to_csv();
        assert_eq!(csv, "beta,KL,bound_nats,bound_bits\n");
    }
}
