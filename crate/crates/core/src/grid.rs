//! Discretized wave-vector grids carrying the quadrature measure of the
//! ⋄-contraction.
//!
//! Every grid is symmetric about k = 0: for each node k there is a node −k.
//! This is what makes symmetric modes representable exactly and keeps the
//! determinants of translation kernels real positive on the grid.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Quadrature rule used to place nodes and weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Composite trapezoid on a uniform grid (default). Spectrally accurate
    /// for smooth, rapidly decaying integrands.
    Trapezoid,
    /// Gauss–Legendre on the same interval.
    GaussLegendre,
}

/// Symmetric wave-vector grid with per-node quadrature weights.
///
/// The ⋄-contraction integrates with measure dk/(2π); [`WaveGrid::measure`]
/// returns the per-node weight including that factor.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveGrid {
    k_lo: f64,
    k_hi: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: QuadratureRule,
}

/// Default half-width of the grid in units of 1/w0.
pub const DEFAULT_KMAX_FACTOR: f64 = 24.0;
/// Default node count.
pub const DEFAULT_GRID_POINTS: usize = 4097;

const SYM_TOL: f64 = 1e-12;

impl WaveGrid {
    /// Uniform symmetric grid on [−k_max, k_max] with trapezoid weights.
    pub fn symmetric(k_max: f64, n_points: usize) -> Result<Arc<Self>> {
        Self::new(-k_max, k_max, n_points, QuadratureRule::Trapezoid)
    }

    /// Grid on [k_min, k_max]; requires k_min = −k_max.
    pub fn new(
        k_min: f64,
        k_max: f64,
        n_points: usize,
        rule: QuadratureRule,
    ) -> Result<Arc<Self>> {
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes, got {n_points}"
            )));
        }
        if !k_min.is_finite() || !k_max.is_finite() || k_min >= k_max {
            return Err(Error::InvalidGrid(format!(
                "k_min = {k_min} must be below k_max = {k_max}"
            )));
        }
        if (k_min + k_max).abs() > SYM_TOL * k_max.abs().max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "grid must be symmetric about k = 0 (k_min = {k_min}, k_max = {k_max})"
            )));
        }
        let (nodes, weights) = match rule {
            QuadratureRule::Trapezoid => trapezoid_points(k_max, n_points),
            QuadratureRule::GaussLegendre => {
                let (x, w) = gauss_legendre_nodes(n_points);
                let half = k_max;
                let nodes: Vec<f64> = x.iter().map(|&t| half * t).collect();
                let weights: Vec<f64> = w.iter().map(|&t| half * t).collect();
                (nodes, weights)
            }
        };
        let grid = WaveGrid {
            k_lo: -k_max,
            k_hi: k_max,
            nodes,
            weights,
            rule,
        };
        grid.validate()?;
        Ok(Arc::new(grid))
    }

    /// Default grid for a mass distribution of width `w0`:
    /// k ∈ [−24/w0, 24/w0], 4097 nodes, trapezoid weights.
    pub fn default_for_width(w0: f64) -> Result<Arc<Self>> {
        if w0 <= 0.0 {
            return Err(Error::Domain(format!("w0 must be positive, got {w0}")));
        }
        Self::symmetric(DEFAULT_KMAX_FACTOR / w0, DEFAULT_GRID_POINTS)
    }

    fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        for i in 1..n {
            if self.nodes[i] <= self.nodes[i - 1] {
                return Err(Error::InvalidGrid("nodes not strictly increasing".into()));
            }
        }
        let scale = self.k_max().abs();
        for i in 0..n {
            let mirrored = -self.nodes[n - 1 - i];
            if (self.nodes[i] - mirrored).abs() > SYM_TOL * scale {
                return Err(Error::InvalidGrid(format!(
                    "node {} has no mirror partner within tolerance",
                    self.nodes[i]
                )));
            }
        }
        let span = self.k_hi - self.k_lo;
        let total: f64 = self.weights.iter().sum();
        if ((total - span) / span).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!(
                "weights sum to {total}, expected span {span}"
            )));
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    /// Lower bound of the integration interval.
    pub fn k_min(&self) -> f64 {
        self.k_lo
    }

    /// Upper bound of the integration interval.
    pub fn k_max(&self) -> f64 {
        self.k_hi
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    /// Quadrature weight of node `i` under the dk/(2π) measure.
    pub fn measure(&self, i: usize) -> f64 {
        self.weights[i] / std::f64::consts::TAU
    }

    /// Index of the node at −k for the node at index `i`.
    pub fn mirror_index(&self, i: usize) -> usize {
        self.nodes.len() - 1 - i
    }
}

/// True when both handles refer to the same grid (pointer or structural).
pub fn same_grid(a: &Arc<WaveGrid>, b: &Arc<WaveGrid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Uniform nodes with exact ±k pairing and trapezoid weights.
fn trapezoid_points(k_max: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let dk = 2.0 * k_max / (n - 1) as f64;
    let center = 0.5 * (n - 1) as f64;
    // i − center is exact in f64 (integers and half-integers), so the
    // products below negate exactly across the midpoint.
    let nodes: Vec<f64> = (0..n).map(|i| (i as f64 - center) * dk).collect();
    let mut weights = vec![dk; n];
    weights[0] = 0.5 * dk;
    weights[n - 1] = 0.5 * dk;
    (nodes, weights)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
///
/// Newton iteration on the Legendre recurrence; nodes are mirrored across
/// the midpoint so the ±x pairing is exact.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0_f64; n];
    let mut w = vec![0.0_f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // z from the cos guess descends from +1; store mirrored pairs
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
        let (_, d) = legendre_eval(n, 0.0);
        w[n / 2] = 2.0 / (d * d);
    }
    // ensure ascending order regardless of guess ordering
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let ws: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
    (xs, ws)
}

/// Legendre P_n(z) and its derivative.
fn legendre_eval(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0_f64;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
