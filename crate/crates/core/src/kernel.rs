//! Diagonal kernels and the ⋄-contraction.
//!
//! A diagonal kernel stores the multiplier f(k) of f(k)·𝟏(k,k′); the
//! identity kernel therefore has diag ≡ 1 and acts as the identity under
//! the dk/(2π) measure of the contraction.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::WaveGrid;
use crate::mode::{ensure_same_grid, ModeFunction};

const UNIMODULAR_TOL: f64 = 1e-12;

/// Diagonal kernel f(k)·𝟏 on a wave grid.
#[derive(Debug, Clone)]
pub struct DiagonalKernel {
    grid: Arc<WaveGrid>,
    diag: Vec<Complex64>,
}

impl DiagonalKernel {
    pub fn new(grid: Arc<WaveGrid>, diag: Vec<Complex64>) -> Result<Self> {
        if diag.len() != grid.n_points() {
            return Err(Error::InvalidGrid(format!(
                "{} diagonal entries on a {}-node grid",
                diag.len(),
                grid.n_points()
            )));
        }
        Ok(DiagonalKernel { grid, diag })
    }

    /// The identity kernel 𝟏.
    pub fn identity(grid: &Arc<WaveGrid>) -> Self {
        Self::constant(grid, 1.0)
    }

    /// Flat kernel c·𝟏; the flat-kernel mode of the energy observable.
    pub fn constant(grid: &Arc<WaveGrid>, c: f64) -> Self {
        DiagonalKernel {
            grid: Arc::clone(grid),
            diag: vec![Complex64::new(c, 0.0); grid.n_points()],
        }
    }

    /// Strictly positive kernel built from a real profile; rejects any
    /// nonpositive node value.
    pub fn positive(grid: &Arc<WaveGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let diag: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&k| Complex64::new(f(k), 0.0))
            .collect();
        if let Some(bad) = diag.iter().position(|d| d.re <= 0.0 || !d.re.is_finite()) {
            return Err(Error::Domain(format!(
                "kernel must be strictly positive; node k = {} maps to {}",
                grid.nodes()[bad],
                diag[bad].re
            )));
        }
        DiagonalKernel::new(Arc::clone(grid), diag)
    }

    pub fn grid(&self) -> &Arc<WaveGrid> {
        &self.grid
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    /// Pointwise product; diagonal kernels commute.
    pub fn compose(&self, other: &DiagonalKernel) -> Result<DiagonalKernel> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let diag = self
            .diag
            .iter()
            .zip(&other.diag)
            .map(|(a, b)| a * b)
            .collect();
        Ok(DiagonalKernel {
            grid: Arc::clone(&self.grid),
            diag,
        })
    }

    pub fn squared(&self) -> DiagonalKernel {
        DiagonalKernel {
            grid: Arc::clone(&self.grid),
            diag: self.diag.iter().map(|d| d * d).collect(),
        }
    }

    /// Elementwise conjugate (the adjoint of a diagonal kernel).
    pub fn adjoint(&self) -> DiagonalKernel {
        DiagonalKernel {
            grid: Arc::clone(&self.grid),
            diag: self.diag.iter().map(|d| d.conj()).collect(),
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.diag
            .iter()
            .all(|d| (d.norm() - 1.0).abs() <= UNIMODULAR_TOL)
    }

    pub fn is_real_nonnegative(&self) -> bool {
        self.diag.iter().all(|d| d.im == 0.0 && d.re >= 0.0)
    }
}

/// Translation kernel Φ(z) = exp(izk)·𝟏; unimodular at every node.
pub fn phase_kernel(z: f64, grid: &Arc<WaveGrid>) -> DiagonalKernel {
    let diag = grid
        .nodes()
        .iter()
        .map(|&k| Complex64::from_polar(1.0, z * k))
        .collect();
    DiagonalKernel {
        grid: Arc::clone(grid),
        diag,
    }
}

/// Free-field energy kernel ω(k)·𝟏 with ω(k) = √(k² + m²) in natural units.
pub fn energy_kernel(mass: f64, grid: &Arc<WaveGrid>) -> Result<DiagonalKernel> {
    if mass < 0.0 {
        return Err(Error::Domain(format!(
            "field mass must be nonnegative, got {mass}"
        )));
    }
    let diag = grid
        .nodes()
        .iter()
        .map(|&k| Complex64::new((k * k + mass * mass).sqrt(), 0.0))
        .collect();
    Ok(DiagonalKernel {
        grid: Arc::clone(grid),
        diag,
    })
}

/// The ⋄-contraction u*⋄K⋄v = Σ_i w_i·conj(u_i)·K_i·v_i/(2π).
pub fn diamond(
    u: &ModeFunction,
    kernel: &DiagonalKernel,
    v: &ModeFunction,
) -> Result<Complex64> {
    ensure_same_grid(u.grid(), kernel.grid())?;
    ensure_same_grid(u.grid(), v.grid())?;
    Ok(contract(
        u.grid(),
        u.values(),
        Some(kernel.diag()),
        v.values(),
    ))
}

/// Kernel-free contraction u*⋄v.
pub fn inner_product(u: &ModeFunction, v: &ModeFunction) -> Result<Complex64> {
    ensure_same_grid(u.grid(), v.grid())?;
    Ok(contract(u.grid(), u.values(), None, v.values()))
}

/// Raw-slice contraction used by the functional algebra; grids must already
/// be known to match.
pub(crate) fn contract(
    grid: &Arc<WaveGrid>,
    u: &[Complex64],
    kernel: Option<&[Complex64]>,
    v: &[Complex64],
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    match kernel {
        Some(k) => {
            for i in 0..u.len() {
                acc += grid.measure(i) * u[i].conj() * k[i] * v[i];
            }
        }
        None => {
            for i in 0..u.len() {
                acc += grid.measure(i) * u[i].conj() * v[i];
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::QuadratureRule;
    use crate::mode::gaussian_mode;

    fn setup() -> (Arc<WaveGrid>, ModeFunction) {
        let grid = WaveGrid::default_for_width(1.0).unwrap();
        let th = gaussian_mode(1.0, &grid).unwrap();
        (grid, th)
    }

    #[test]
    fn identity_kernel_acts_as_identity() {
        let (grid, th) = setup();
        let one = DiagonalKernel::identity(&grid);
        let a = diamond(&th, &one, &th).unwrap();
        let b = inner_product(&th, &th).unwrap();
        assert!((a - b).norm() < 1e-15);
        assert!((a.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_kernel_properties() {
        let (grid, th) = setup();
        let z = 0.37;
        let phi = phase_kernel(z, &grid);
        assert!(phi.is_unimodular());
        // z = 0 is the identity
        let phi0 = phase_kernel(0.0, &grid);
        assert!(phi0.diag().iter().all(|d| (d - 1.0).norm() < 1e-15));
        let g0 = diamond(&th, &phi0.squared(), &th).unwrap();
        assert!((g0.re - 1.0).abs() < 1e-14);
        // Φ(−z) is the elementwise conjugate of Φ(z)
        let phim = phase_kernel(-z, &grid);
        for (a, b) in phim.diag().iter().zip(phi.adjoint().diag()) {
            assert!((a - b).norm() < 1e-15);
        }
        // Φ(z)·Φ(z) = Φ(2z)
        let four = phase_kernel(2.0 * z, &grid);
        for (a, b) in phi.squared().diag().iter().zip(four.diag()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_overlap_matches_closed_form() {
        let (grid, th) = setup();
        // w0 = 1, z = 0.5 → e^{−1}
        let phi2 = phase_kernel(0.5, &grid).squared();
        let g = diamond(&th, &phi2, &th).unwrap();
        assert!((g.re - (-1.0_f64).exp()).abs() < 1e-8);
        assert!(g.im.abs() < 1e-12);
        // scale invariance: w0 = 2, z = 1 → e^{−1}
        let grid2 = WaveGrid::default_for_width(2.0).unwrap();
        let th2 = gaussian_mode(2.0, &grid2).unwrap();
        let g2 = diamond(&th2, &phase_kernel(1.0, &grid2).squared(), &th2).unwrap();
        assert!((g2.re - (-1.0_f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn gaussian_overlap_tracks_exponential_up_to_two_widths() {
        let (grid, th) = setup();
        for i in 0..=40 {
            let z = 2.0 * i as f64 / 40.0; // up to 2·w0
            let g = diamond(&th, &phase_kernel(z, &grid).squared(), &th).unwrap();
            let exact = (-4.0 * z * z).exp();
            assert!((g.re - exact).abs() < 1e-8, "z = {z}");
        }
    }

    #[test]
    fn energy_kernel_values() {
        let grid = WaveGrid::symmetric(8.0, 9).unwrap();
        let e = energy_kernel(0.0, &grid).unwrap();
        assert!(e.is_real_nonnegative());
        let idx = grid.nodes().iter().position(|&k| k == 2.0).unwrap();
        assert_eq!(e.diag()[idx].re, 2.0);
        let e3 = energy_kernel(3.0, &grid).unwrap();
        let idx4 = grid.nodes().iter().position(|&k| k == 4.0).unwrap();
        assert!((e3.diag()[idx4].re - 5.0).abs() < 1e-15);
        assert!(energy_kernel(-1.0, &grid).is_err());
    }

    #[test]
    fn zero_point_scale_for_unit_width() {
        // Θ*⋄ℰ⋄Θ = 2/√π for m = 0, w0 = 1. The integrand has a kink at
        // k = 0, so the trapezoid error is O(Δk²); a fine grid is needed
        // for 1e−8.
        let grid = WaveGrid::symmetric(24.0, 131_073).unwrap();
        let th = gaussian_mode(1.0, &grid).unwrap();
        let e = energy_kernel(0.0, &grid).unwrap();
        let e0 = diamond(&th, &e, &th).unwrap();
        let exact = 2.0 / std::f64::consts::PI.sqrt();
        assert!((e0.re - exact).abs() < 1e-8, "{} vs {exact}", e0.re);
        // grid-refinement cross-check: error shrinks by ~4 per doubling
        let coarse = WaveGrid::symmetric(24.0, 32_769).unwrap();
        let thc = gaussian_mode(1.0, &coarse).unwrap();
        let ec = energy_kernel(0.0, &coarse).unwrap();
        let e0c = diamond(&thc, &ec, &thc).unwrap();
        assert!((e0c.re - exact).abs() > (e0.re - exact).abs());
    }

    #[test]
    fn conjugate_symmetry_of_diamond() {
        let grid = WaveGrid::symmetric(6.0, 33).unwrap();
        // deterministic pseudo-random complex samples
        let mut s = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let raw_u: Vec<Complex64> = (0..33).map(|_| Complex64::new(next(), next())).collect();
        let raw_v: Vec<Complex64> = (0..33).map(|_| Complex64::new(next(), next())).collect();
        let kd: Vec<Complex64> = (0..33).map(|_| Complex64::new(next(), next())).collect();
        let (u, _) = ModeFunction::normalized(Arc::clone(&grid), raw_u, false).unwrap();
        let (v, _) = ModeFunction::normalized(Arc::clone(&grid), raw_v, false).unwrap();
        let k = DiagonalKernel::new(Arc::clone(&grid), kd).unwrap();
        let lhs = diamond(&u, &k, &v).unwrap();
        let rhs = diamond(&v, &k.adjoint(), &u).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn symmetric_mode_sees_equal_forward_and_conjugate_phases() {
        let (grid, th) = setup();
        let z = 0.8;
        let fwd = diamond(&th, &phase_kernel(z, &grid).squared(), &th).unwrap();
        let bwd = diamond(&th, &phase_kernel(-z, &grid).squared(), &th).unwrap();
        assert!((fwd - bwd).norm() < 1e-10);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let (g1, th1) = setup();
        let g2 = WaveGrid::symmetric(24.0, 129).unwrap();
        let th2 = gaussian_mode(1.0, &g2).unwrap();
        let k = DiagonalKernel::identity(&g1);
        assert!(matches!(
            diamond(&th1, &k, &th2),
            Err(Error::GridMismatch)
        ));
        let _ = g2;
    }

    #[test]
    fn refinement_changes_shrink_with_at_least_second_order() {
        // doubling the node count changes the contraction by strictly less
        // than the previous refinement step
        let z = 1.2;
        let mut vals = Vec::new();
        for n in [33, 65, 129] {
            let grid = WaveGrid::symmetric(24.0, n).unwrap();
            let th = gaussian_mode(1.0, &grid).unwrap();
            let g = diamond(&th, &phase_kernel(z, &grid).squared(), &th).unwrap();
            vals.push(g.re);
        }
        let d1 = (vals[1] - vals[0]).abs();
        let d2 = (vals[2] - vals[1]).abs();
        assert!(d2 < d1, "refinement steps {d1} then {d2}");
        assert!(d2 <= d1 / 4.0, "empirical order below 2: {d1} -> {d2}");
    }

    #[test]
    fn gauss_legendre_rule_reproduces_gaussian_overlap() {
        let grid = WaveGrid::new(-24.0, 24.0, 257, QuadratureRule::GaussLegendre).unwrap();
        let th = gaussian_mode(1.0, &grid).unwrap();
        let g = diamond(&th, &phase_kernel(0.5, &grid).squared(), &th).unwrap();
        assert!((g.re - (-1.0_f64).exp()).abs() < 1e-10);
    }
}
