//! Gauss–Legendre rules and a panel-adaptive integrator.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared cached rule.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    /// Sum of |coarse - refined| over accepted panels.
    pub residual: f64,
}

/// Integrates `f` over `[a, b]` split into `panels` equal pieces; each piece is
/// bisected until one rule and its two half-rules agree within
/// `abs_tol / panels` (or `max_depth` is reached).
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    op: &'static str,
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    rule_points: usize,
    abs_tol: f64,
) -> Result<Integral> {
    if !(b > a) {
        return Ok(Integral {
            value: 0.0,
            residual: 0.0,
        });
    }
    let rule = GaussLegendre::cached(rule_points);
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let per_panel = abs_tol / panels as f64;
    let mut total = Integral {
        value: 0.0,
        residual: 0.0,
    };
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        let coarse = rule.integrate(&mut f, lo, hi);
        let part = refine(&rule, &mut f, lo, hi, coarse, per_panel, 24);
        total.value += part.value;
        total.residual += part.residual;
    }
    if !total.value.is_finite() {
        return Err(Error::numeric(op, "integrand produced a non-finite value"));
    }
    if total.residual > abs_tol.max(1e-12 * total.value.abs()) {
        return Err(Error::Quadrature {
            op,
            residual: total.residual,
        });
    }
    Ok(total)
}

fn refine<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    f: &mut F,
    lo: f64,
    hi: f64,
    coarse: f64,
    tol: f64,
    depth: usize,
) -> Integral {
    let mid = 0.5 * (lo + hi);
    let left = rule.integrate(&mut *f, lo, mid);
    let right = rule.integrate(&mut *f, mid, hi);
    let fine = left + right;
    let diff = (fine - coarse).abs();
    if diff <= tol.max(1e-14 * fine.abs()) || depth == 0 {
        return Integral {
            value: fine,
            residual: diff,
        };
    }
    let l = refine(rule, f, lo, mid, left, 0.5 * tol, depth - 1);
    let r = refine(rule, f, mid, hi, right, 0.5 * tol, depth - 1);
    Integral {
        value: l.value + r.value,
        residual: l.residual + r.residual,
    }
}
