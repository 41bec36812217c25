//! Construction of the Schrödinger-cat characteristic functional from a
//! thermal fiducial mode and opposite spectral translations.

use std::sync::Arc;

use num_complex::Complex64;

use crate::charfunc::{CharacteristicFunctional, DiagPart, GaussianTerm, RankPart};
use crate::error::{Error, Result};
use crate::kernel::{diamond, phase_kernel};
use crate::mode::ModeFunction;

const IM_TOL: f64 = 1e-10;

/// Parameters of a translated-thermal cat state.
///
/// The two branches are the fiducial mode translated by ±z, so the branch
/// separation is 2z. Every normalized observable is even in z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatParameters {
    pub n_avg: f64,
    pub z: f64,
    pub w0: f64,
    pub mass: f64,
}

impl CatParameters {
    pub fn new(n_avg: f64, z: f64, w0: f64, mass: f64) -> Result<Self> {
        if n_avg < 0.0 {
            return Err(Error::Domain(format!(
                "mean particle number must be nonnegative, got {n_avg}"
            )));
        }
        if w0 <= 0.0 {
            return Err(Error::Domain(format!("width must be positive, got {w0}")));
        }
        if mass < 0.0 {
            return Err(Error::Domain(format!(
                "field mass must be nonnegative, got {mass}"
            )));
        }
        Ok(CatParameters { n_avg, z, w0, mass })
    }

    /// Normalized separation 2z/w0.
    pub fn sep_norm(&self) -> f64 {
        2.0 * self.z / self.w0
    }
}

/// Branch-overlap scalar μ = ⟨n⟩·(Θ*⋄Φ(z)²⋄Θ).
///
/// Requires a symmetric mode; the overlap is then real, and the forward and
/// conjugate phase overlaps coincide. For the Gaussian mode this equals
/// ⟨n⟩·exp(−4z²/w0²).
pub fn overlap_mu(theta: &ModeFunction, z: f64, n_avg: f64) -> Result<f64> {
    if n_avg < 0.0 {
        return Err(Error::Domain(format!(
            "mean particle number must be nonnegative, got {n_avg}"
        )));
    }
    if !theta.is_symmetric() {
        return Err(Error::SymmetryViolation(
            "branch overlap needs a symmetric mode".into(),
        ));
    }
    let phi2 = phase_kernel(z, theta.grid()).squared();
    let overlap = diamond(theta, &phi2, theta)?;
    if overlap.im.abs() > IM_TOL {
        return Err(Error::SymmetryViolation(format!(
            "phase overlap has imaginary part {:.3e}",
            overlap.im
        )));
    }
    Ok(n_avg * overlap.re)
}

/// Cross-term weight Λ = 1/(1 + ⟨n⟩ − μ); lies in (0, 1] for valid inputs.
pub fn lambda_param(n_avg: f64, mu: f64) -> Result<f64> {
    let denom = 1.0 + n_avg - mu;
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "1 + n − μ = {denom} must be positive (μ = {mu}, n = {n_avg})"
        )));
    }
    Ok(1.0 / denom)
}

/// Characteristic functional of the cat state: four Gaussian terms over the
/// translated modes ΦΘ and Φ*Θ.
///
/// Weights are [1, Λ, Λ, 1]/(2(1+Λ)); the direct terms carry rank parts
/// ⟨n⟩·(Φ^±Θ)(Φ^±Θ)† and the cross terms ⟨n⟩Λ·(Φ^±Θ)(Φ^∓Θ)†, each on top of
/// the common ½𝟏. χ\[0\] = 1 exactly after the final rescale.
pub fn cat_chi(p: &CatParameters, theta: &ModeFunction) -> Result<CharacteristicFunctional> {
    if !theta.is_symmetric() {
        return Err(Error::SymmetryViolation(
            "cat construction needs a symmetric fiducial mode".into(),
        ));
    }
    let grid = theta.grid();
    let mu = overlap_mu(theta, p.z, p.n_avg)?;
    let lam = lambda_param(p.n_avg, mu)?;

    let phi = phase_kernel(p.z, grid);
    let fwd_vals: Vec<Complex64> = theta
        .values()
        .iter()
        .zip(phi.diag())
        .map(|(t, ph)| t * ph)
        .collect();
    let bwd_vals: Vec<Complex64> = theta
        .values()
        .iter()
        .zip(phi.diag())
        .map(|(t, ph)| t * ph.conj())
        .collect();
    let (fwd, _) = ModeFunction::normalized(Arc::clone(grid), fwd_vals, false)?;
    let (bwd, _) = ModeFunction::normalized(Arc::clone(grid), bwd_vals, false)?;

    let w_direct = 1.0 / (2.0 * (1.0 + lam));
    let w_cross = lam * w_direct;
    // enforce χ[0] = 1 exactly against rounding in the weights
    let total = 2.0 * w_direct + 2.0 * w_cross;
    let w_direct = w_direct / total;
    let w_cross = w_cross / total;

    let n = p.n_avg;
    let layout: [(f64, f64, &ModeFunction, &ModeFunction); 4] = [
        (w_direct, n, &fwd, &fwd),
        (w_cross, n * lam, &fwd, &bwd),
        (w_cross, n * lam, &bwd, &fwd),
        (w_direct, n, &bwd, &bwd),
    ];
    let mut terms = Vec::with_capacity(4);
    for (weight, coeff, left, right) in layout {
        let parts = if coeff != 0.0 {
            vec![RankPart {
                coeff: Complex64::new(coeff, 0.0),
                left: (*left).clone(),
                right: (*right).clone(),
            }]
        } else {
            Vec::new()
        };
        terms.push(GaussianTerm::new(
            Arc::clone(grid),
            Complex64::new(weight, 0.0),
            DiagPart::Uniform(0.5),
            parts,
        )?);
    }
    CharacteristicFunctional::from_terms(terms)
}
