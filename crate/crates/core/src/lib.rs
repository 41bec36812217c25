//! Functional phase-space energetics of Schrödinger cat states built from
//! translated thermal mass distributions.
//!
//! The crate computes the total energy of a two-branch superposition whose
//! branches are opposite spectral translations of a single-mode thermal
//! state, as a generating-functional calculation over a discretized
//! wave-vector grid. The normalized energy develops a dip as a function of
//! branch separation; [`analytic`] carries the closed-form curve together
//! with dip location, depth, and scaling analysis, while [`charfunc`] and
//! [`observables`] provide the full characteristic-functional engine the
//! closed form is checked against.
//!
//! Layering:
//!
//! * [`grid`], [`mode`], [`kernel`] — quadrature grids, mode functions,
//!   diagonal kernels, and the ⋄-contraction.
//! * [`charfunc`] — Gaussian characteristic functionals and the star
//!   product.
//! * [`catstate`] — the cat construction and its scalar parameters.
//! * [`observables`] — quadratic and quartic moment extraction with
//!   symbolic zero-point subtraction.
//! * [`analytic`] — closed-form curves, dip reports, scaling fits, and the
//!   coherent-state variant.
//! * [`oracle`], [`verify`] — independent verification routes and the
//!   runtime check suite.
//!
//! All values are immutable after construction and safe to share across
//! threads; every computation is deterministic.

pub mod analytic;
pub mod catstate;
pub mod charfunc;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod mode;
pub mod observables;
pub mod oracle;
pub mod smallmat;
pub mod verify;

pub use analytic::{
    cat_energy_closed, cat_energy_slope, coherent_cat_energy, find_dip, g_h, scaling_sweep,
    DipReport, EnergyCurve, ScalingReport,
};
pub use catstate::{cat_chi, lambda_param, overlap_mu, CatParameters};
pub use charfunc::{
    star, thermal_chi, translation_chi, CharacteristicFunctional, DiagPart, GaussianTerm,
    RankPart,
};
pub use error::{Error, Result};
pub use grid::{QuadratureRule, WaveGrid};
pub use kernel::{diamond, energy_kernel, inner_product, phase_kernel, DiagonalKernel};
pub use mode::{gaussian_mode, ModeFunction};
pub use observables::{
    cat_energy_numeric, cat_energy_numeric_with_kernel, energy_moment, quartic_moment,
    NormalOrdering, QuarticKernel,
};
