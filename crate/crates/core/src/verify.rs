//! Runtime self-verification: the oracle suite behind the `verify`
//! subcommand. Each check recomputes a result through an independent route
//! and compares at a pinned tolerance.

use num_complex::Complex64;

use crate::analytic::{cat_energy_closed, coherent_cat_energy, scaling_sweep};
use crate::catstate::{cat_chi, CatParameters};
use crate::charfunc::{star, thermal_chi, translation_chi, CharacteristicFunctional};
use crate::grid::{QuadratureRule, WaveGrid, DEFAULT_GRID_POINTS, DEFAULT_KMAX_FACTOR};
use crate::kernel::DiagonalKernel;
use crate::mode::gaussian_mode;
use crate::observables::{
    cat_energy_numeric_with_kernel, quartic_moment_complex, NormalOrdering, QuarticKernel,
};
use crate::oracle::{
    brute_force_star_at, cat_chi_star_assembled, coherent_fock_energy, dense_term_distance,
    quartic_fd, random_state_term, symmetric_test_mode, translated_thermal_term, SplitMix64,
};

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult {
            name,
            passed,
            detail,
        }
    }

    fn failed(name: &'static str, detail: String) -> Self {
        CheckResult {
            name,
            passed: false,
            detail,
        }
    }
}

/// Grid and model configuration of a verification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub grid_points: usize,
    pub k_max: f64,
    pub w0: f64,
    pub mass: f64,
    pub rule: QuadratureRule,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            grid_points: DEFAULT_GRID_POINTS,
            k_max: DEFAULT_KMAX_FACTOR,
            w0: 1.0,
            mass: 0.0,
            rule: QuadratureRule::Trapezoid,
        }
    }
}

/// Runs the full oracle suite; one result per check.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckResult> {
    vec![
        numeric_vs_closed_form(cfg),
        star_product_small_grid(),
        quartic_wick_vs_finite_difference(),
        coherent_fock_check(),
        scaling_fit_check(),
    ]
}

/// Flat-kernel functional-engine energies against the closed form across
/// the sweep range.
pub fn numeric_vs_closed_form(cfg: &VerifyConfig) -> CheckResult {
    const NAME: &str = "numeric-vs-closed-form";
    const TOL: f64 = 1e-8;
    let grid = match WaveGrid::new(-cfg.k_max, cfg.k_max, cfg.grid_points, cfg.rule) {
        Ok(g) => g,
        Err(e) => return CheckResult::failed(NAME, e.to_string()),
    };
    let theta = match gaussian_mode(cfg.w0, &grid) {
        Ok(t) => t,
        Err(e) => return CheckResult::failed(NAME, e.to_string()),
    };
    let flat = DiagonalKernel::constant(&grid, 1.0);
    let mut worst = 0.0_f64;
    for n in [1.0, 100.0, 10_000.0] {
        for i in 0..=120 {
            let sep = 3.0 * i as f64 / 120.0;
            let z = 0.5 * sep * cfg.w0;
            let p = match CatParameters::new(n, z, cfg.w0, cfg.mass) {
                Ok(p) => p,
                Err(e) => return CheckResult::failed(NAME, e.to_string()),
            };
            let num = match cat_energy_numeric_with_kernel(&p, &theta, &flat) {
                Ok(v) => v / n,
                Err(e) => return CheckResult::failed(NAME, e.to_string()),
            };
            let closed = cat_energy_closed(n, z, cfg.w0);
            worst = worst.max(((num - closed) / closed).abs());
        }
    }
    CheckResult::new(
        NAME,
        worst <= TOL,
        format!("max relative residual {worst:.3e} (tolerance {TOL:.0e})"),
    )
}

/// Low-rank star algebra against dense and quadrature routes on tiny grids.
fn star_product_small_grid() -> CheckResult {
    const NAME: &str = "star-product-small-grid";
    let run = || -> Result<String, String> {
        // conjugated translations around a thermal state give the
        // translated-mode thermal functional
        let grid = WaveGrid::symmetric(3.0, 4).map_err(|e| e.to_string())?;
        let theta = symmetric_test_mode(&grid, 3.0).map_err(|e| e.to_string())?;
        let n_avg = 2.5;
        let z = 0.4;
        let rho = thermal_chi(n_avg, &theta).map_err(|e| e.to_string())?;
        let fwd = CharacteristicFunctional::from_term(
            translation_chi(z, &grid).map_err(|e| e.to_string())?,
        );
        let bwd = CharacteristicFunctional::from_term(
            translation_chi(-z, &grid).map_err(|e| e.to_string())?,
        );
        let conjugated = star(&fwd, &star(&rho, &bwd).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .normalize()
            .map_err(|e| e.to_string())?;
        let expected = translated_thermal_term(n_avg, &theta, z).map_err(|e| e.to_string())?;
        let dist = dense_term_distance(&conjugated.terms()[0], &expected);
        if dist > 1e-10 {
            return Err(format!("translated thermal residual {dist:.3e}"));
        }
        // star-assembled cat against the direct construction
        let p = CatParameters::new(n_avg, z, 1.8, 0.0).map_err(|e| e.to_string())?;
        let assembled = cat_chi_star_assembled(&p, &theta).map_err(|e| e.to_string())?;
        let direct = cat_chi(&p, &theta).map_err(|e| e.to_string())?;
        let mut rng = SplitMix64::new(0x5eed);
        let mut worst = 0.0_f64;
        for _ in 0..6 {
            let eta: Vec<Complex64> = (0..4).map(|_| rng.next_complex(1.6)).collect();
            worst = worst.max((assembled.chi_at(&eta) - direct.chi_at(&eta)).norm());
        }
        if worst > 1e-8 {
            return Err(format!("assembled cat residual {worst:.3e}"));
        }
        // brute-force quadrature of the star integral on a 2-node grid
        let grid2 = WaveGrid::symmetric(2.0, 2).map_err(|e| e.to_string())?;
        let mut rng2 = SplitMix64::new(0xfeed);
        let ta = random_state_term(&grid2, 1, &mut rng2).map_err(|e| e.to_string())?;
        let tb = random_state_term(&grid2, 1, &mut rng2).map_err(|e| e.to_string())?;
        let closed = crate::charfunc::star_terms(&ta, &tb).map_err(|e| e.to_string())?;
        let mut worst_bf = 0.0_f64;
        for _ in 0..2 {
            let eta: Vec<Complex64> = (0..2).map(|_| rng2.next_complex(0.8)).collect();
            let bf = brute_force_star_at(&ta, &tb, &eta, 48, 9.0).map_err(|e| e.to_string())?;
            worst_bf = worst_bf.max((closed.chi_at(&eta) - bf).norm());
        }
        if worst_bf > 1e-8 {
            return Err(format!("brute-force residual {worst_bf:.3e}"));
        }
        Ok(format!(
            "translated thermal {dist:.1e}, cat assembly {worst:.1e}, quadrature {worst_bf:.1e}"
        ))
    };
    match run() {
        Ok(detail) => CheckResult::new(NAME, true, detail),
        Err(detail) => CheckResult::failed(NAME, detail),
    }
}

/// Wick-paired quartic moments against finite differences of χ.
fn quartic_wick_vs_finite_difference() -> CheckResult {
    const NAME: &str = "quartic-wick-vs-finite-difference";
    const TOL: f64 = 1e-6;
    let run = || -> Result<String, String> {
        let grid = WaveGrid::symmetric(1.5, 3).map_err(|e| e.to_string())?;
        let mut rng = SplitMix64::new(0x9a77);
        let mut worst = 0.0_f64;
        for case in 0..6 {
            let term = random_state_term(&grid, 1 + case % 2, &mut rng)
                .map_err(|e| e.to_string())?;
            let chi = CharacteristicFunctional::from_term(term);
            let ka = DiagonalKernel::positive(&grid, |k| 1.0 + 0.5 * k * k)
                .map_err(|e| e.to_string())?;
            let kb = DiagonalKernel::positive(&grid, |k| 0.4 + (-k * k / 2.0).exp())
                .map_err(|e| e.to_string())?;
            let k4 = QuarticKernel::new(ka, kb, false).map_err(|e| e.to_string())?;
            let wick = quartic_moment_complex(&chi, &k4, NormalOrdering::Raw)
                .map_err(|e| e.to_string())?;
            let fd = quartic_fd(&chi, &k4, 0.05).map_err(|e| e.to_string())?;
            worst = worst.max((wick - fd).norm());
        }
        if worst > TOL {
            return Err(format!("max |Wick − FD| = {worst:.3e}"));
        }
        Ok(format!("max |Wick − FD| = {worst:.3e}"))
    };
    match run() {
        Ok(detail) => CheckResult::new(NAME, true, detail),
        Err(detail) => CheckResult::failed(NAME, detail),
    }
}

/// Coherent-branch closed form against the truncated Fock expansion.
fn coherent_fock_check() -> CheckResult {
    const NAME: &str = "coherent-fock-oracle";
    const TOL: f64 = 1e-6;
    let run = || -> Result<String, String> {
        let mut worst = 0.0_f64;
        for n in [1.0, 5.0, 20.0] {
            for sep in [0.1_f64, 0.3, 0.6, 1.2, 2.4] {
                let z = 0.5 * sep;
                let g = (-sep * sep).exp();
                let closed = coherent_cat_energy(n, z, 1.0).map_err(|e| e.to_string())?;
                let fock = coherent_fock_energy(n, g, 130).map_err(|e| e.to_string())?;
                worst = worst.max((closed - fock).abs());
            }
        }
        if worst > TOL {
            return Err(format!("max |closed − Fock| = {worst:.3e}"));
        }
        Ok(format!("max |closed − Fock| = {worst:.3e}"))
    };
    match run() {
        Ok(detail) => CheckResult::new(NAME, true, detail),
        Err(detail) => CheckResult::failed(NAME, detail),
    }
}

/// Dip-position scaling fit and opposing-slope monotonicity.
fn scaling_fit_check() -> CheckResult {
    const NAME: &str = "scaling-fit";
    let ns: Vec<f64> = (0..7)
        .map(|i| 100.0 * 10.0_f64.powf(i as f64 * 0.5))
        .collect();
    match scaling_sweep(&ns, 1.0) {
        Ok(report) => {
            let exp_ok = (report.position_exponent + 0.5).abs() <= 0.02;
            let mono_ok = report.opposing_slope_increasing;
            CheckResult::new(
                NAME,
                exp_ok && mono_ok,
                format!(
                    "position exponent {:.4} (want −0.50 ± 0.02), opposing slope increasing: {}",
                    report.position_exponent, mono_ok
                ),
            )
        }
        Err(e) => CheckResult::failed(NAME, e.to_string()),
    }
}
