//! Characteristic functionals as weighted sums of Gaussian terms, and the
//! star product that composes operator functionals.
//!
//! A term represents the functional η ↦ C·exp(−η*⋄M⋄η) with
//! M = diag + Σ_j c_j·u_j v_j†. States carry diag ≡ ½·𝟏; translation
//! operators carry a general diagonal τ. The auxiliary field η is never
//! sampled: every operation works on (C, M) directly.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::WaveGrid;
use crate::kernel::contract;
use crate::mode::{ensure_same_grid, ModeFunction};
use crate::smallmat::{hermitian_eigen, CMat, Lu};

const POLE_TOL: f64 = 1e-9;
const STATE_TOL: f64 = 1e-12;
const HALF: f64 = 0.5;

/// Diagonal part of a Gaussian exponent kernel.
#[derive(Debug, Clone)]
pub enum DiagPart {
    /// σ·𝟏 with real σ; states use σ = ½.
    Uniform(f64),
    /// General per-node diagonal (translation kernels τ).
    PerNode(Vec<Complex64>),
}

impl DiagPart {
    pub fn value_at(&self, i: usize) -> Complex64 {
        match self {
            DiagPart::Uniform(s) => Complex64::new(*s, 0.0),
            DiagPart::PerNode(d) => d[i],
        }
    }

    pub fn is_half_identity(&self) -> bool {
        matches!(self, DiagPart::Uniform(s) if *s == HALF)
    }

    /// Largest |d_i − ½| over the grid.
    pub fn half_identity_deviation(&self, n: usize) -> f64 {
        (0..n)
            .map(|i| (self.value_at(i) - HALF).norm())
            .fold(0.0, f64::max)
    }

    fn add(&self, other: &DiagPart, n: usize) -> DiagPart {
        match (self, other) {
            (DiagPart::Uniform(a), DiagPart::Uniform(b)) => DiagPart::Uniform(a + b),
            _ => DiagPart::PerNode(
                (0..n)
                    .map(|i| self.value_at(i) + other.value_at(i))
                    .collect(),
            ),
        }
    }
}

/// One low-rank contribution c·u v† to an exponent kernel.
#[derive(Debug, Clone)]
pub struct RankPart {
    pub coeff: Complex64,
    pub left: ModeFunction,
    pub right: ModeFunction,
}

/// Weighted Gaussian exponential C·exp(−η*⋄M⋄η).
#[derive(Debug, Clone)]
pub struct GaussianTerm {
    grid: Arc<WaveGrid>,
    weight: Complex64,
    diag: DiagPart,
    parts: Vec<RankPart>,
}

impl GaussianTerm {
    pub fn new(
        grid: Arc<WaveGrid>,
        weight: Complex64,
        diag: DiagPart,
        parts: Vec<RankPart>,
    ) -> Result<Self> {
        if let DiagPart::PerNode(d) = &diag {
            if d.len() != grid.n_points() {
                return Err(Error::InvalidGrid(format!(
                    "{} diagonal entries on a {}-node grid",
                    d.len(),
                    grid.n_points()
                )));
            }
        }
        for p in &parts {
            ensure_same_grid(&grid, p.left.grid())?;
            ensure_same_grid(&grid, p.right.grid())?;
        }
        Ok(GaussianTerm {
            grid,
            weight,
            diag,
            parts,
        })
    }

    pub fn grid(&self) -> &Arc<WaveGrid> {
        &self.grid
    }

    pub fn weight(&self) -> Complex64 {
        self.weight
    }

    pub fn diag(&self) -> &DiagPart {
        &self.diag
    }

    pub fn parts(&self) -> &[RankPart] {
        &self.parts
    }

    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    pub fn scaled(&self, factor: Complex64) -> GaussianTerm {
        GaussianTerm {
            grid: Arc::clone(&self.grid),
            weight: self.weight * factor,
            diag: self.diag.clone(),
            parts: self.parts.clone(),
        }
    }

    /// Evaluates the term at a sampled auxiliary field η.
    pub fn chi_at(&self, eta: &[Complex64]) -> Complex64 {
        assert_eq!(eta.len(), self.grid.n_points());
        let mut quad = Complex64::new(0.0, 0.0);
        for (i, e) in eta.iter().enumerate() {
            quad += self.grid.measure(i) * e.conj() * self.diag.value_at(i) * e;
        }
        for p in &self.parts {
            let lu = contract(&self.grid, eta, None, p.left.values());
            let rv = contract(&self.grid, p.right.values(), None, eta);
            quad += p.coeff * lu * rv;
        }
        self.weight * (-quad).exp()
    }
}

/// Weighted sum of Gaussian terms; χ\[η\] = Σ_t C_t·exp(−η*⋄M_t⋄η).
#[derive(Debug, Clone)]
pub struct CharacteristicFunctional {
    terms: Vec<GaussianTerm>,
}

impl CharacteristicFunctional {
    pub fn from_terms(terms: Vec<GaussianTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("functional needs at least one term".into()));
        }
        let grid = Arc::clone(terms[0].grid());
        for t in &terms {
            ensure_same_grid(&grid, t.grid())?;
        }
        Ok(CharacteristicFunctional { terms })
    }

    pub fn from_term(term: GaussianTerm) -> Self {
        CharacteristicFunctional { terms: vec![term] }
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    pub fn grid(&self) -> &Arc<WaveGrid> {
        self.terms[0].grid()
    }

    /// χ\[0\] = Σ_t C_t, the trace of the represented operator.
    pub fn chi_zero(&self) -> Complex64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// Rescales so that χ\[0\] = 1 exactly.
    pub fn normalize(&self) -> Result<CharacteristicFunctional> {
        let z = self.chi_zero();
        if z.norm() == 0.0 {
            return Err(Error::Domain("cannot normalize: chi[0] = 0".into()));
        }
        let inv = Complex64::new(1.0, 0.0) / z;
        Ok(CharacteristicFunctional {
            terms: self.terms.iter().map(|t| t.scaled(inv)).collect(),
        })
    }

    /// True when χ\[0\] = 1 within the state tolerance.
    pub fn is_normalized_state(&self) -> bool {
        (self.chi_zero() - 1.0).norm() <= STATE_TOL
    }

    pub fn chi_at(&self, eta: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|t| t.chi_at(eta)).sum()
    }
}

/// Characteristic functional of a single-mode thermal state:
/// one unit-weight term with M = ½𝟏 + ⟨n⟩·ΘΘ†.
pub fn thermal_chi(n_avg: f64, theta: &ModeFunction) -> Result<CharacteristicFunctional> {
    if n_avg < 0.0 {
        return Err(Error::Domain(format!(
            "mean particle number must be nonnegative, got {n_avg}"
        )));
    }
    let mut parts = Vec::new();
    if n_avg > 0.0 {
        parts.push(RankPart {
            coeff: Complex64::new(n_avg, 0.0),
            left: theta.clone(),
            right: theta.clone(),
        });
    }
    let term = GaussianTerm::new(
        Arc::clone(theta.grid()),
        Complex64::new(1.0, 0.0),
        DiagPart::Uniform(HALF),
        parts,
    )?;
    Ok(CharacteristicFunctional::from_term(term))
}

/// Characteristic-functional term of the translation operator:
/// exponent kernel τ = ½(𝟏+Φ)(𝟏−Φ)⁻¹, equal to (i/2)·cot(zk/2) per node.
///
/// The determinant-valued normalization of the operator functional diverges
/// in the continuum, so the weight is left at 1 and downstream results are
/// renormalized through χ\[0\] = 1.
pub fn translation_chi(z: f64, grid: &Arc<WaveGrid>) -> Result<GaussianTerm> {
    if z == 0.0 {
        return Err(Error::DegenerateTranslation);
    }
    let mut diag = Vec::with_capacity(grid.n_points());
    for &k in grid.nodes() {
        let phase = Complex64::from_polar(1.0, z * k);
        let denom = Complex64::new(1.0, 0.0) - phase;
        if denom.norm() < POLE_TOL {
            return Err(Error::PoleProximity {
                k,
                dist: denom.norm(),
            });
        }
        diag.push(HALF * (Complex64::new(1.0, 0.0) + phase) / denom);
    }
    GaussianTerm::new(
        Arc::clone(grid),
        Complex64::new(1.0, 0.0),
        DiagPart::PerNode(diag),
        Vec::new(),
    )
}

/// Star product of characteristic functionals, composing the represented
/// operators term by term.
///
/// For Gaussian terms the β-integral is a finite-dimensional complex
/// Gaussian integral evaluated in closed form: with S = M_a + M_b,
///
///   M_ab = ½𝟏 + (M_a − ½𝟏)⋄S⁻¹⋄(M_b − ½𝟏),   C_ab = C_a·C_b / Det S.
///
/// Identity-plus-low-rank structure is preserved through rank-aware inverse
/// and determinant identities, so the cost stays linear in the node count.
pub fn star(
    a: &CharacteristicFunctional,
    b: &CharacteristicFunctional,
) -> Result<CharacteristicFunctional> {
    ensure_same_grid(a.grid(), b.grid())?;
    let mut terms = Vec::with_capacity(a.terms().len() * b.terms().len());
    for ta in a.terms() {
        for tb in b.terms() {
            terms.push(star_terms(ta, tb)?);
        }
    }
    CharacteristicFunctional::from_terms(terms)
}

/// Star product of two Gaussian terms.
pub fn star_terms(a: &GaussianTerm, b: &GaussianTerm) -> Result<GaussianTerm> {
    ensure_same_grid(a.grid(), b.grid())?;
    let grid = Arc::clone(a.grid());
    let n = grid.n_points();

    let s_diag = a.diag.add(&b.diag, n);
    let mut s_parts: Vec<&RankPart> = Vec::with_capacity(a.parts.len() + b.parts.len());
    s_parts.extend(a.parts.iter());
    s_parts.extend(b.parts.iter());

    let solver = StarSolver::build(&grid, &s_diag, &s_parts)?;
    let weight = a.weight * b.weight / solver.det;

    // X = M_a − ½𝟏, Y = M_b − ½𝟏
    let dx = shifted_diag(&a.diag, n);
    let dy = shifted_diag(&b.diag, n);

    let new_diag = match (&dx, &dy) {
        (ShiftedDiag::Zero, _) | (_, ShiftedDiag::Zero) => DiagPart::Uniform(HALF),
        _ => DiagPart::PerNode(
            (0..n)
                .map(|i| {
                    Complex64::new(HALF, 0.0)
                        + dx.value_at(i) * solver.d_inv[i] * dy.value_at(i)
                })
                .collect(),
        ),
    };

    let mut parts: Vec<RankPart> = Vec::new();
    let dx_zero = matches!(dx, ShiftedDiag::Zero);
    let dy_zero = matches!(dy, ShiftedDiag::Zero);
    let group_left = dx_zero && (!dy_zero || a.parts.len() <= b.parts.len());

    if group_left {
        // X = L_a: group by left vectors; rank stays at rank(a)
        for p in &a.parts {
            let w = solver.apply_inv_adjoint(p.right.values());
            let right_raw = apply_y_adjoint(&grid, &dy, &b.parts, &w);
            push_part(&grid, &mut parts, p.coeff, p.left.clone(), right_raw)?;
        }
    } else if dy_zero {
        // Y = L_b: group by right vectors; rank stays at rank(b)
        for p in &b.parts {
            let s_inv_u = solver.apply_inv(p.left.values());
            let left_raw = apply_x(&grid, &dx, &a.parts, &s_inv_u);
            push_part_left(&grid, &mut parts, p.coeff, left_raw, p.right.clone())?;
        }
    } else {
        // general mixed case: D_x S⁻¹ D_y off-diagonal correction,
        // D_x S⁻¹ L_b, and L_a S⁻¹ Y
        general_star_parts(&grid, &solver, &dx, &dy, a, b, &mut parts)?;
    }

    GaussianTerm::new(grid, weight, new_diag, parts)
}

// ---- internals ------------------------------------------------------------

enum ShiftedDiag {
    Zero,
    Uniform(f64),
    PerNode(Vec<Complex64>),
}

impl ShiftedDiag {
    fn value_at(&self, i: usize) -> Complex64 {
        match self {
            ShiftedDiag::Zero => Complex64::new(0.0, 0.0),
            ShiftedDiag::Uniform(s) => Complex64::new(*s, 0.0),
            ShiftedDiag::PerNode(d) => d[i],
        }
    }
}

fn shifted_diag(d: &DiagPart, n: usize) -> ShiftedDiag {
    match d {
        DiagPart::Uniform(s) if *s == HALF => ShiftedDiag::Zero,
        DiagPart::Uniform(s) => ShiftedDiag::Uniform(s - HALF),
        DiagPart::PerNode(v) => {
            ShiftedDiag::PerNode((0..n).map(|i| v[i] - HALF).collect())
        }
    }
}

/// Applies Y = D_y + Σ c_l u_l v_l† as the adjoint: Y†x.
fn apply_y_adjoint(
    grid: &Arc<WaveGrid>,
    dy: &ShiftedDiag,
    parts: &[RankPart],
    x: &[Complex64],
) -> Vec<Complex64> {
    let n = x.len();
    let mut out: Vec<Complex64> = (0..n).map(|i| dy.value_at(i).conj() * x[i]).collect();
    for p in parts {
        let amp = contract(grid, p.left.values(), None, x); // u†⋄x
        let f = p.coeff.conj() * amp;
        for (o, r) in out.iter_mut().zip(p.right.values()) {
            *o += f * r;
        }
    }
    out
}

/// Applies X = D_x + Σ c_j u_j v_j† directly: Xx.
fn apply_x(
    grid: &Arc<WaveGrid>,
    dx: &ShiftedDiag,
    parts: &[RankPart],
    x: &[Complex64],
) -> Vec<Complex64> {
    let n = x.len();
    let mut out: Vec<Complex64> = (0..n).map(|i| dx.value_at(i) * x[i]).collect();
    for p in parts {
        let amp = contract(grid, p.right.values(), None, x); // v†⋄x
        let f = p.coeff * amp;
        for (o, l) in out.iter_mut().zip(p.left.values()) {
            *o += f * l;
        }
    }
    out
}

fn push_part(
    grid: &Arc<WaveGrid>,
    parts: &mut Vec<RankPart>,
    coeff: Complex64,
    left: ModeFunction,
    right_raw: Vec<Complex64>,
) -> Result<()> {
    let norm_sq: f64 = right_raw
        .iter()
        .enumerate()
        .map(|(i, v)| grid.measure(i) * v.norm_sqr())
        .sum();
    if norm_sq <= 0.0 || coeff.norm() == 0.0 {
        return Ok(()); // annihilated contribution
    }
    let (right, norm) = ModeFunction::normalized(Arc::clone(grid), right_raw, false)?;
    parts.push(RankPart {
        coeff: coeff * norm,
        left,
        right,
    });
    Ok(())
}

fn push_part_left(
    grid: &Arc<WaveGrid>,
    parts: &mut Vec<RankPart>,
    coeff: Complex64,
    left_raw: Vec<Complex64>,
    right: ModeFunction,
) -> Result<()> {
    let norm_sq: f64 = left_raw
        .iter()
        .enumerate()
        .map(|(i, v)| grid.measure(i) * v.norm_sqr())
        .sum();
    if norm_sq <= 0.0 || coeff.norm() == 0.0 {
        return Ok(());
    }
    let (left, norm) = ModeFunction::normalized(Arc::clone(grid), left_raw, false)?;
    parts.push(RankPart {
        coeff: coeff * norm,
        left,
        right,
    });
    Ok(())
}

fn general_star_parts(
    grid: &Arc<WaveGrid>,
    solver: &StarSolver,
    dx: &ShiftedDiag,
    dy: &ShiftedDiag,
    a: &GaussianTerm,
    b: &GaussianTerm,
    parts: &mut Vec<RankPart>,
) -> Result<()> {
    let n = grid.n_points();
    // D_x (S⁻¹ − D⁻¹) D_y = −D_x D⁻¹ U C A⁻¹ V† D⁻¹ D_y
    if !solver.cols.is_empty() {
        let r = solver.cols.len();
        // ρ_j = v_j ⊙ conj(d_inv · d_y)
        let rhos: Vec<Vec<Complex64>> = solver
            .rows
            .iter()
            .map(|v| {
                (0..n)
                    .map(|i| v[i] * (solver.d_inv[i] * dy.value_at(i)).conj())
                    .collect()
            })
            .collect();
        // CA⁻¹ columns: solve A x = e_j then scale rows by c
        for (l, u_l) in solver.cols.iter().enumerate() {
            let mut e = vec![Complex64::new(0.0, 0.0); r];
            e[l] = Complex64::new(1.0, 0.0);
            // row l of CA⁻¹ is c_l · (row l of A⁻¹); A⁻¹ row = solve with A† then conj
            let row = solver.core.solve_adjoint(&e);
            let left_raw: Vec<Complex64> = (0..n)
                .map(|i| dx.value_at(i) * solver.d_inv[i] * u_l[i])
                .collect();
            let mut right_raw = vec![Complex64::new(0.0, 0.0); n];
            for (j, rho) in rhos.iter().enumerate() {
                // entry (CA⁻¹)_{lj} = c_l · conj(row_j); combine with −1
                let m_lj = solver.coeffs[l] * row[j].conj();
                let f = (-m_lj).conj();
                for i in 0..n {
                    right_raw[i] += f * rho[i];
                }
            }
            let (left_ok, lnorm) = match normed(grid, left_raw) {
                Some(v) => v,
                None => continue,
            };
            push_part(
                grid,
                parts,
                Complex64::new(lnorm, 0.0),
                left_ok,
                right_raw,
            )?;
        }
    }
    // D_x S⁻¹ L_b
    for p in &b.parts {
        let s_inv_u = solver.apply_inv(p.left.values());
        let left_raw: Vec<Complex64> = (0..n).map(|i| dx.value_at(i) * s_inv_u[i]).collect();
        push_part_left(grid, parts, p.coeff, left_raw, p.right.clone())?;
    }
    // L_a S⁻¹ Y
    for p in &a.parts {
        let w = solver.apply_inv_adjoint(p.right.values());
        let right_raw = apply_y_adjoint(grid, dy, &b.parts, &w);
        push_part(grid, parts, p.coeff, p.left.clone(), right_raw)?;
    }
    Ok(())
}

fn normed(grid: &Arc<WaveGrid>, raw: Vec<Complex64>) -> Option<(ModeFunction, f64)> {
    let norm_sq: f64 = raw
        .iter()
        .enumerate()
        .map(|(i, v)| grid.measure(i) * v.norm_sqr())
        .sum();
    if norm_sq <= 0.0 {
        return None;
    }
    ModeFunction::normalized(Arc::clone(grid), raw, false).ok()
}

/// Woodbury solver for S = D + Σ_l c_l·u_l v_l† in the ⋄-calculus.
struct StarSolver {
    grid: Arc<WaveGrid>,
    d_inv: Vec<Complex64>,
    cols: Vec<Vec<Complex64>>,
    rows: Vec<Vec<Complex64>>,
    coeffs: Vec<Complex64>,
    core: Lu,
    det: Complex64,
}

impl StarSolver {
    fn build(
        grid: &Arc<WaveGrid>,
        s_diag: &DiagPart,
        s_parts: &[&RankPart],
    ) -> Result<StarSolver> {
        let n = grid.n_points();
        check_well_posed(grid, s_diag, s_parts)?;
        let d: Vec<Complex64> = (0..n).map(|i| s_diag.value_at(i)).collect();
        let d_inv: Vec<Complex64> = d.iter().map(|v| Complex64::new(1.0, 0.0) / v).collect();
        let r = s_parts.len();
        let cols: Vec<Vec<Complex64>> = s_parts.iter().map(|p| p.left.values().to_vec()).collect();
        let rows: Vec<Vec<Complex64>> = s_parts.iter().map(|p| p.right.values().to_vec()).collect();
        let coeffs: Vec<Complex64> = s_parts.iter().map(|p| p.coeff).collect();
        // core A = I + K·diag(c), K_{jl} = v_j†⋄D⁻¹⋄u_l
        let mut core = CMat::identity(r);
        for j in 0..r {
            for l in 0..r {
                let mut k = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    k += grid.measure(i) * rows[j][i].conj() * d_inv[i] * cols[l][i];
                }
                core[(j, l)] += k * coeffs[l];
            }
        }
        let core = Lu::factor(&core)?;
        let mut det = core.det();
        for v in &d {
            det *= v;
        }
        Ok(StarSolver {
            grid: Arc::clone(grid),
            d_inv,
            cols,
            rows,
            coeffs,
            core,
            det,
        })
    }

    /// S⁻¹x via Woodbury.
    fn apply_inv(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        let mut w: Vec<Complex64> = (0..n).map(|i| self.d_inv[i] * x[i]).collect();
        if self.cols.is_empty() {
            return w;
        }
        let t: Vec<Complex64> = self
            .rows
            .iter()
            .map(|v| contract(&self.grid, v, None, &w))
            .collect();
        let q = self.core.solve(&t);
        for (l, u_l) in self.cols.iter().enumerate() {
            let f = self.coeffs[l] * q[l];
            for i in 0..n {
                w[i] -= self.d_inv[i] * f * u_l[i];
            }
        }
        w
    }

    /// S⁻†x (adjoint inverse).
    fn apply_inv_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        let mut w: Vec<Complex64> = (0..n).map(|i| self.d_inv[i].conj() * x[i]).collect();
        if self.cols.is_empty() {
            return w;
        }
        // (S⁻¹)† = D̄⁻¹ − D̄⁻¹ V A⁻† C† U† D̄⁻¹ with t_l = u_l†⋄w
        let t: Vec<Complex64> = self
            .cols
            .iter()
            .enumerate()
            .map(|(l, u)| self.coeffs[l].conj() * contract(&self.grid, u, None, &w))
            .collect();
        let y = self.core.solve_adjoint(&t);
        for (j, v_j) in self.rows.iter().enumerate() {
            let f = y[j];
            for i in 0..n {
                w[i] -= self.d_inv[i].conj() * f * v_j[i];
            }
        }
        w
    }
}

/// The β-integral converges only when the Hermitian part of S is positive
/// definite on the grid.
fn check_well_posed(
    grid: &Arc<WaveGrid>,
    s_diag: &DiagPart,
    s_parts: &[&RankPart],
) -> Result<()> {
    let n = grid.n_points();
    let mut scale = 1.0_f64;
    let mut min_re = f64::INFINITY;
    for i in 0..n {
        let v = s_diag.value_at(i);
        scale = scale.max(v.norm());
        min_re = min_re.min(v.re);
    }
    for p in s_parts {
        scale = scale.max(p.coeff.norm());
    }
    let tol = 1e-12 * scale;
    if min_re <= tol {
        return Err(Error::IllPosedStar { margin: min_re });
    }
    if s_parts.is_empty() {
        return Ok(());
    }
    // Herm(S) = Re(D) + P Q P† with P = [u_1..u_r, v_1..v_r] and
    // Q = ½[[0, diag(c)], [diag(c̄), 0]]. Positive definiteness reduces to
    // eigenvalues of G^{1/2} Q G^{1/2} staying above −1, where G is the
    // Re(D)-weighted Gram matrix of P.
    let r = s_parts.len();
    let m2 = 2 * r;
    let mut vecs: Vec<&[Complex64]> = Vec::with_capacity(m2);
    for p in s_parts {
        vecs.push(p.left.values());
    }
    for p in s_parts {
        vecs.push(p.right.values());
    }
    let mut gram = CMat::zeros(m2);
    for a in 0..m2 {
        for b in 0..m2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, (va, vb)) in vecs[a].iter().zip(vecs[b]).enumerate() {
                let re_d = s_diag.value_at(i).re;
                acc += grid.measure(i) * va.conj() * vb / re_d;
            }
            gram[(a, b)] = acc;
        }
    }
    let (gvals, gvecs) = hermitian_eigen(&gram);
    let mut ghalf = CMat::zeros(m2);
    for a in 0..m2 {
        for b in 0..m2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m2 {
                let lam = gvals[k].max(0.0).sqrt();
                acc += gvecs[(a, k)] * lam * gvecs[(b, k)].conj();
            }
            ghalf[(a, b)] = acc;
        }
    }
    let mut q = CMat::zeros(m2);
    for (l, p) in s_parts.iter().enumerate() {
        q[(l, r + l)] = HALF * p.coeff;
        q[(r + l, l)] = HALF * p.coeff.conj();
    }
    // Z = G^{1/2} Q G^{1/2}
    let mut qg = CMat::zeros(m2);
    for a in 0..m2 {
        for b in 0..m2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m2 {
                acc += q[(a, k)] * ghalf[(k, b)];
            }
            qg[(a, b)] = acc;
        }
    }
    let mut z = CMat::zeros(m2);
    for a in 0..m2 {
        for b in 0..m2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m2 {
                acc += ghalf[(a, k)] * qg[(k, b)];
            }
            z[(a, b)] = acc;
        }
    }
    let (zvals, _) = hermitian_eigen(&z);
    let margin = 1.0 + zvals[0];
    if margin <= 1e-12 {
        return Err(Error::IllPosedStar { margin });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WaveGrid;
    use crate::mode::gaussian_mode;

    #[test]
    fn thermal_chi_structure() {
        let grid = WaveGrid::default_for_width(1.0).unwrap();
        let th = gaussian_mode(1.0, &grid).unwrap();
        let chi = thermal_chi(2.5, &th).unwrap();
        assert_eq!(chi.terms().len(), 1);
        let t = &chi.terms()[0];
        assert!(t.diag().is_half_identity());
        assert_eq!(t.rank(), 1);
        assert!((t.parts()[0].coeff.re - 2.5).abs() < 1e-15);
        assert!((chi.chi_zero() - 1.0).norm() < 1e-15);
        // vacuum
        let vac = thermal_chi(0.0, &th).unwrap();
        assert_eq!(vac.terms()[0].rank(), 0);
        assert!((vac.chi_zero() - 1.0).norm() < 1e-15);
        assert!(thermal_chi(-1.0, &th).is_err());
    }

    #[test]
    fn translation_chi_values() {
        // grid nodes at ±1, ±3 with z chosen so z·k hits π and π/2
        let grid = WaveGrid::symmetric(3.0, 4).unwrap();
        assert_eq!(grid.nodes(), &[-3.0, -1.0, 1.0, 3.0]);
        let z = std::f64::consts::PI / 2.0;
        let term = translation_chi(z, &grid).unwrap();
        let d = match term.diag() {
            DiagPart::PerNode(d) => d.clone(),
            _ => panic!("expected per-node diagonal"),
        };
        // z·k = 3π/2... use node k = 1: z·k = π/2 → τ = i/2
        assert!((d[2] - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        // τ is pure imaginary everywhere for real z·k away from poles
        for v in &d {
            assert!(v.re.abs() < 1e-14);
        }
        // z·k = π → τ = 0
        let grid2 = WaveGrid::symmetric(2.0, 4).unwrap();
        let idx = grid2
            .nodes()
            .iter()
            .position(|&k| (k - 2.0).abs() < 1e-12)
            .unwrap();
        let term2 = translation_chi(std::f64::consts::PI / 2.0, &grid2).unwrap();
        if let DiagPart::PerNode(d2) = term2.diag() {
            assert!(d2[idx].norm() < 1e-14);
        }
    }

    #[test]
    fn translation_chi_guards() {
        let grid = WaveGrid::symmetric(3.0, 4).unwrap();
        assert!(matches!(
            translation_chi(0.0, &grid),
            Err(Error::DegenerateTranslation)
        ));
        // pole: node k = 1 with z = 2π makes 1 − e^{izk} = 0
        let z = std::f64::consts::TAU;
        assert!(matches!(
            translation_chi(z, &grid),
            Err(Error::PoleProximity { .. })
        ));
        // odd grids contain k = 0, which is always a pole
        let grid0 = WaveGrid::symmetric(3.0, 5).unwrap();
        assert!(matches!(
            translation_chi(0.7, &grid0),
            Err(Error::PoleProximity { .. })
        ));
    }

    fn test_mode(grid: &std::sync::Arc<WaveGrid>) -> ModeFunction {
        let vals: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&k| Complex64::new((-k * k / 3.0).exp(), 0.0))
            .collect();
        ModeFunction::normalized(Arc::clone(grid), vals, true).unwrap().0
    }

    #[test]
    fn star_of_thermals_reproduces_purity() {
        // Tr[ρ_th²] = 1/(2n+1) comes out of the weight of the starred term
        let grid = WaveGrid::symmetric(4.0, 4).unwrap();
        let th = test_mode(&grid);
        let n_avg = 1.3;
        let chi = thermal_chi(n_avg, &th).unwrap();
        let prod = star(&chi, &chi).unwrap();
        assert_eq!(prod.terms().len(), 1);
        let w = prod.terms()[0].weight();
        assert!((w.re - 1.0 / (2.0 * n_avg + 1.0)).abs() < 1e-12, "{w}");
        assert!(w.im.abs() < 1e-14);
        // rank bound: r ≤ r_a + r_b
        assert!(prod.terms()[0].rank() <= 2);
    }

    #[test]
    fn star_rejects_non_decaying_forms() {
        let grid = WaveGrid::symmetric(4.0, 4).unwrap();
        let t1 = translation_chi(0.3, &grid).unwrap();
        let t2 = translation_chi(0.4, &grid).unwrap();
        let a = CharacteristicFunctional::from_term(t1);
        let b = CharacteristicFunctional::from_term(t2);
        // two pure phase kernels have a vanishing decay form
        assert!(matches!(star(&a, &b), Err(Error::IllPosedStar { .. })));
    }

    #[test]
    fn normalize_fixes_chi_zero_exactly() {
        let grid = WaveGrid::symmetric(4.0, 4).unwrap();
        let th = test_mode(&grid);
        let chi = thermal_chi(0.9, &th).unwrap();
        let scaled = CharacteristicFunctional::from_terms(
            chi.terms()
                .iter()
                .map(|t| t.scaled(Complex64::new(3.7, 0.4)))
                .collect(),
        )
        .unwrap();
        let back = scaled.normalize().unwrap();
        assert!((back.chi_zero() - 1.0).norm() < 1e-15);
        assert!(back.is_normalized_state());
    }
}
