//! Mode functions: complex spectra Θ(k) sampled on a wave grid.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{same_grid, WaveGrid};

const NORM_TOL: f64 = 1e-10;
const SYM_TOL: f64 = 1e-12;
const SUPPORT_TOL: f64 = 1e-8;

/// Normalized mode samples on a [`WaveGrid`].
///
/// The self-contraction Θ*⋄Θ equals 1 within 1e−10 for every constructed
/// value. The `symmetric` flag marks modes with Θ(−k) = Θ(k); it is verified
/// at construction and required wherever branch overlaps must be real.
#[derive(Debug, Clone)]
pub struct ModeFunction {
    grid: Arc<WaveGrid>,
    values: Vec<Complex64>,
    symmetric: bool,
}

impl ModeFunction {
    /// Builds a mode from raw samples, validating normalization and
    /// (when claimed) mirror symmetry.
    pub fn try_new(
        grid: Arc<WaveGrid>,
        values: Vec<Complex64>,
        symmetric: bool,
    ) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidGrid(format!(
                "{} samples on a {}-node grid",
                values.len(),
                grid.n_points()
            )));
        }
        let mode = ModeFunction {
            grid,
            values,
            symmetric,
        };
        let norm = mode.self_contraction();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        if symmetric {
            mode.check_symmetry()?;
        }
        Ok(mode)
    }

    /// Rescales raw samples to unit self-contraction; returns the mode and
    /// the norm that was divided out.
    pub fn normalized(
        grid: Arc<WaveGrid>,
        values: Vec<Complex64>,
        symmetric: bool,
    ) -> Result<(Self, f64)> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidGrid(format!(
                "{} samples on a {}-node grid",
                values.len(),
                grid.n_points()
            )));
        }
        let norm_sq: f64 = values
            .iter()
            .enumerate()
            .map(|(i, v)| grid.measure(i) * v.norm_sqr())
            .sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::Domain("cannot normalize a null mode".into()));
        }
        let norm = norm_sq.sqrt();
        let scaled: Vec<Complex64> = values.iter().map(|v| v / norm).collect();
        let mode = Self::try_new(grid, scaled, symmetric)?;
        Ok((mode, norm))
    }

    fn check_symmetry(&self) -> Result<()> {
        let peak = self
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max)
            .max(1.0);
        for i in 0..self.values.len() {
            let j = self.grid.mirror_index(i);
            let dev = (self.values[i] - self.values[j]).norm();
            if dev > SYM_TOL * peak {
                return Err(Error::SymmetryViolation(format!(
                    "values at ±k = {} differ by {dev:.3e}",
                    self.grid.nodes()[i]
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Arc<WaveGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Θ*⋄Θ on the grid.
    pub fn self_contraction(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.measure(i) * v.norm_sqr())
            .sum()
    }
}

/// Real symmetric Gaussian mode of width `w0`, normalized so that
/// Θ*⋄Φ(z)²⋄Θ = exp(−4z²/w0²) analytically.
///
/// The spectrum is exp(−k²w0²/8); the analytic normalization π^{1/4}√w0 is
/// refined by an exact on-grid rescale so the self-contraction is 1 to
/// machine precision.
pub fn gaussian_mode(w0: f64, grid: &Arc<WaveGrid>) -> Result<ModeFunction> {
    if w0 <= 0.0 {
        return Err(Error::Domain(format!("w0 must be positive, got {w0}")));
    }
    let edge = grid.k_max().abs().max(grid.k_min().abs());
    let ratio = (-edge * edge * w0 * w0 / 8.0).exp();
    if ratio > SUPPORT_TOL {
        return Err(Error::InsufficientGridSupport {
            ratio,
            tol: SUPPORT_TOL,
        });
    }
    let amp = std::f64::consts::PI.powf(0.25) * w0.sqrt();
    let values: Vec<Complex64> = grid
        .nodes()
        .iter()
        .map(|&k| Complex64::new(amp * (-k * k * w0 * w0 / 8.0).exp(), 0.0))
        .collect();
    let (mode, _) = ModeFunction::normalized(Arc::clone(grid), values, true)?;
    Ok(mode)
}

pub(crate) fn ensure_same_grid(a: &Arc<WaveGrid>, b: &Arc<WaveGrid>) -> Result<()> {
    if same_grid(a, b) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_mode_is_normalized_and_symmetric() {
        let grid = WaveGrid::default_for_width(1.0).unwrap();
        let th = gaussian_mode(1.0, &grid).unwrap();
        assert!((th.self_contraction() - 1.0).abs() < 1e-14);
        assert!(th.is_symmetric());
    }

    #[test]
    fn narrow_grid_reports_insufficient_support() {
        let grid = WaveGrid::symmetric(2.0, 64).unwrap();
        match gaussian_mode(1.0, &grid) {
            Err(Error::InsufficientGridSupport { ratio, .. }) => assert!(ratio > 1e-8),
            other => panic!("expected support error, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_values_rejected_when_claimed_symmetric() {
        let grid = WaveGrid::symmetric(4.0, 9).unwrap();
        let mut values: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&k| Complex64::new((-k * k).exp(), 0.0))
            .collect();
        values[0] += Complex64::new(0.5, 0.0);
        let res = ModeFunction::normalized(grid, values, true);
        assert!(matches!(res, Err(Error::SymmetryViolation(_))));
    }

    #[test]
    fn null_mode_rejected() {
        let grid = WaveGrid::symmetric(4.0, 9).unwrap();
        let values = vec![Complex64::new(0.0, 0.0); 9];
        assert!(ModeFunction::normalized(grid, values, false).is_err());
    }
}
