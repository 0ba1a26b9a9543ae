//! Finite isometry groups acting on `ℓᵖ`, group averaging of projections,
//! and the translation-invariant trigonometric projection on a uniform grid.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{null_space, rank};
use crate::lpspace::{Exponent, LpSpace};
use crate::operators::{operator_norm, Operator, SearchConfig};
use crate::projections::ProjectionProblem;

const GROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryGroup {
    pub space: LpSpace,
    pub elements: Vec<DMatrix<f64>>,
    pub identity_index: usize,
}

impl IsometryGroup {
    /// Wraps a list of matrices; the identity must be among them.
    /// Use [`verify_group`] to check the remaining axioms.
    pub fn new(space: LpSpace, elements: Vec<DMatrix<f64>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Precondition("group has no elements".into()));
        }
        for (i, g) in elements.iter().enumerate() {
            if g.shape() != (space.dim, space.dim) {
                return Err(Error::Precondition(format!(
                    "element {i} is {}x{}, expected {}x{}",
                    g.nrows(),
                    g.ncols(),
                    space.dim,
                    space.dim
                )));
            }
        }
        let id = DMatrix::identity(space.dim, space.dim);
        let identity_index =
            elements.iter().position(|g| (g - &id).amax() <= GROUP_TOL).ok_or(Error::NoIdentity)?;
        Ok(IsometryGroup { space, elements, identity_index })
    }

    pub fn trivial(space: LpSpace) -> Self {
        IsometryGroup { space, elements: vec![DMatrix::identity(space.dim, space.dim)], identity_index: 0 }
    }

    /// `ℤ_n` acting by cyclic coordinate shifts; element `k` shifts by `k`.
    pub fn cyclic_shifts(space: LpSpace) -> Self {
        let n = space.dim;
        let elements = (0..n).map(|k| shift_matrix(n, k)).collect();
        IsometryGroup { space, elements, identity_index: 0 }
    }

    /// All `2ⁿ` diagonal sign changes.
    pub fn sign_changes(space: LpSpace) -> Self {
        let n = space.dim;
        let elements = (0..1usize << n)
            .map(|mask| DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })))
            .collect();
        IsometryGroup { space, elements, identity_index: 0 }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn index_of(&self, m: &DMatrix<f64>) -> Option<usize> {
        self.elements.iter().position(|g| (g - m).amax() <= GROUP_TOL)
    }

    /// Inverse of element `i`, looked up in the group.
    pub fn inverse_index(&self, i: usize) -> Option<usize> {
        let id = DMatrix::identity(self.space.dim, self.space.dim);
        (0..self.order()).find(|&j| (&self.elements[i] * &self.elements[j] - &id).amax() <= GROUP_TOL)
    }
}

/// `(S x)ᵢ = x_{i−k mod n}`.
pub fn shift_matrix(n: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if (j + k) % n == i { 1.0 } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupAxiom {
    Identity,
    Isometry,
    Closure,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub passed: bool,
    pub order: usize,
    /// First violated axiom with the offending element index.
    pub failure: Option<(GroupAxiom, usize)>,
    pub samples_checked: usize,
}

/// Checks identity, isometry (on ball vertices and `sample_count` sphere
/// samples), closure and inverses, in that order.
pub fn verify_group(group: &IsometryGroup, sample_count: usize, seed: u64) -> GroupReport {
    let order = group.order();
    let fail = |axiom, i, samples| GroupReport { passed: false, order, failure: Some((axiom, i)), samples_checked: samples };
    let id = DMatrix::identity(group.space.dim, group.space.dim);
    if group.identity_index >= order || (&group.elements[group.identity_index] - &id).amax() > GROUP_TOL {
        return fail(GroupAxiom::Identity, group.identity_index, 0);
    }
    let samples = group.space.sphere_sample(sample_count, seed);
    for (i, g) in group.elements.iter().enumerate() {
        for x in &samples {
            let gx = g * x;
            if (group.space.norm(&gx) - group.space.norm(x)).abs() > 1e-9 {
                return fail(GroupAxiom::Isometry, i, samples.len());
            }
        }
    }
    for (i, a) in group.elements.iter().enumerate() {
        for b in &group.elements {
            if group.index_of(&(a * b)).is_none() {
                return fail(GroupAxiom::Closure, i, samples.len());
            }
        }
    }
    for i in 0..order {
        if group.inverse_index(i).is_none() {
            return fail(GroupAxiom::Inverse, i, samples.len());
        }
    }
    GroupReport { passed: true, order, failure: None, samples_checked: samples.len() }
}

/// `Q = (1/|G|) Σ_g g⁻¹ P g`.
pub fn rudin_average(p: &DMatrix<f64>, group: &IsometryGroup) -> Result<DMatrix<f64>> {
    let n = group.space.dim;
    if p.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: if p.nrows() != n { p.nrows() } else { p.ncols() } });
    }
    let mut q = DMatrix::zeros(n, n);
    for (i, g) in group.elements.iter().enumerate() {
        let inv = match group.inverse_index(i) {
            Some(j) => group.elements[j].clone(),
            None => g.clone().try_inverse().ok_or_else(|| Error::Precondition(format!("element {i} is singular")))?,
        };
        q += inv * p * g;
    }
    Ok(q / group.order() as f64)
}

/// Index of the first element that does not map `V` into itself.
pub fn invariance_violation(group: &IsometryGroup, problem: &ProjectionProblem) -> Option<usize> {
    let b = problem.basis_matrix();
    let n = b.ncols();
    group.elements.iter().position(|g| {
        let mut aug = b.clone().insert_columns(n, n, 0.0);
        aug.view_mut((0, n), (b.nrows(), n)).copy_from(&(g * &b));
        rank(&aug, 1e-10) > n
    })
}

/// Dimension of `{P ∈ family : P g = g P for all g}`; `0` means the
/// commuting member is unique. `None` when no member commutes.
pub fn commutant_projections_dimension(group: &IsometryGroup, problem: &ProjectionProblem) -> Result<Option<usize>> {
    if let Some(g) = invariance_violation(group, problem) {
        return Err(Error::NotInvariant(g));
    }
    let param = problem.parametrize()?;
    let k = param.dim();
    let d = problem.space.dim;
    // rows: entries of (base + Σθ Δ) g − g (base + Σθ Δ) for each g
    let rows = group.order() * d * d;
    let mut a = DMatrix::zeros(rows, k);
    let mut rhs = DVector::zeros(rows);
    for (gi, g) in group.elements.iter().enumerate() {
        let base_c = &param.base * g - g * &param.base;
        let dir_c: Vec<DMatrix<f64>> = param.directions.iter().map(|dd| dd * g - g * dd).collect();
        for i in 0..d {
            for j in 0..d {
                let r = gi * d * d + i * d + j;
                rhs[r] = -base_c[(i, j)];
                for (l, c) in dir_c.iter().enumerate() {
                    a[(r, l)] = c[(i, j)];
                }
            }
        }
    }
    let ra = rank(&a, 1e-10);
    let mut aug = a.clone().insert_column(k, 0.0);
    aug.set_column(k, &rhs);
    if rank(&aug, 1e-10) > ra {
        return Ok(None);
    }
    Ok(Some(k - ra))
}

/// The commuting member of the family, when it is unique.
pub fn commuting_projection(group: &IsometryGroup, problem: &ProjectionProblem) -> Result<Option<DMatrix<f64>>> {
    match commutant_projections_dimension(group, problem)? {
        Some(0) => {
            // averaging any member lands on it
            let param = problem.parametrize()?;
            rudin_average(&param.base, group).map(Some)
        }
        _ => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// trigonometric projection on a uniform grid

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierGrid {
    /// Trigonometric degree.
    pub n: usize,
    /// Grid size.
    pub points: usize,
}

impl FourierGrid {
    /// Requires `points ≥ 4n + 2`, so products of two degree-`n`
    /// polynomials are integrated exactly by the grid mean.
    pub fn new(n: usize, points: usize) -> Result<Self> {
        if points < 4 * n + 2 {
            return Err(Error::GridTooCoarse { points, required: 4 * n + 2 });
        }
        Ok(FourierGrid { n, points })
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| 2.0 * PI * i as f64 / self.points as f64).collect()
    }

    pub fn space(&self) -> LpSpace {
        LpSpace::new(self.points, Exponent::Infinity).expect("nonempty grid")
    }

    /// Degree-`n` trigonometric polynomials sampled on the grid:
    /// `1, cos t, sin t, …, cos nt, sin nt`.
    pub fn trig_basis(&self) -> Vec<DVector<f64>> {
        let t = self.nodes();
        let mut out = vec![DVector::from_element(self.points, 1.0)];
        for m in 1..=self.n {
            out.push(DVector::from_fn(self.points, |i, _| (m as f64 * t[i]).cos()));
            out.push(DVector::from_fn(self.points, |i, _| (m as f64 * t[i]).sin()));
        }
        out
    }

    pub fn problem(&self) -> Result<ProjectionProblem> {
        ProjectionProblem::projection(self.space(), self.trig_basis())
    }

    pub fn translations(&self) -> IsometryGroup {
        IsometryGroup::cyclic_shifts(self.space())
    }
}

/// Kernel of the discrete Fourier projection at lag `k`:
/// `(2/N)(1/2 + Σ_{m≤n} cos(m·2πk/N))`.
fn fourier_kernel(grid: &FourierGrid, k: usize) -> f64 {
    let t = 2.0 * PI * k as f64 / grid.points as f64;
    let s: f64 = (1..=grid.n).map(|m| (m as f64 * t).cos()).sum();
    2.0 / grid.points as f64 * (0.5 + s)
}

pub fn fourier_projection(grid: &FourierGrid) -> DMatrix<f64> {
    let n = grid.points;
    let row: Vec<f64> = (0..n).map(|k| fourier_kernel(grid, k)).collect();
    DMatrix::from_fn(n, n, |i, j| row[(i + n - j) % n])
}

/// Sup-norm operator norm of the grid projection: one row sum, since the
/// matrix is circulant.
pub fn lebesgue_constant(grid: &FourierGrid) -> f64 {
    (0..grid.points).map(|k| fourier_kernel(grid, k).abs()).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct LebesgueSweep {
    pub value: f64,
    pub points: usize,
    pub converged: bool,
}

/// Doubles the grid from `start` until successive constants agree to `tol`.
pub fn lebesgue_constant_converged(n: usize, start: usize, tol: f64, max_points: usize) -> Result<LebesgueSweep> {
    let mut points = start.max(4 * n + 2);
    let mut prev = lebesgue_constant(&FourierGrid::new(n, points)?);
    while points * 2 <= max_points {
        points *= 2;
        let v = lebesgue_constant(&FourierGrid::new(n, points)?);
        if (v - prev).abs() < tol {
            return Ok(LebesgueSweep { value: v, points, converged: true });
        }
        prev = v;
    }
    Ok(LebesgueSweep { value: prev, points, converged: false })
}

/// Interpolation at `2n + 1` grid nodes: `P f` is the degree-`n`
/// polynomial matching `f` at the chosen nodes.
pub fn interpolation_projection(grid: &FourierGrid, nodes: &[usize]) -> Result<DMatrix<f64>> {
    let basis = grid.trig_basis();
    let k = basis.len();
    if nodes.len() != k {
        return Err(Error::Precondition(format!("need {k} interpolation nodes, got {}", nodes.len())));
    }
    if let Some(&bad) = nodes.iter().find(|&&i| i >= grid.points) {
        return Err(Error::Precondition(format!("node {bad} is outside the grid")));
    }
    let b = DMatrix::from_columns(&basis);
    let sampled = DMatrix::from_fn(k, k, |r, c| b[(nodes[r], c)]);
    let inv = sampled.try_inverse().ok_or_else(|| Error::Precondition("interpolation nodes are not unisolvent".into()))?;
    // P = B · S⁻¹ · R, R selecting the node values
    let select = DMatrix::from_fn(k, grid.points, |r, c| if nodes[r] == c { 1.0 } else { 0.0 });
    Ok(b * inv * select)
}

#[derive(Debug, Clone, Serialize)]
pub struct MarcinkiewiczResult {
    pub average: DMatrix<f64>,
    /// Max-entry distance from the grid Fourier projection.
    pub deviation: f64,
}

/// `(1/N) Σ_k S₋ₖ P Sₖ` over grid translations, compared with the grid
/// Fourier projection.
pub fn marcinkiewicz_average(p: &DMatrix<f64>, grid: &FourierGrid) -> Result<MarcinkiewiczResult> {
    let n = grid.points;
    if p.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
    }
    let problem = grid.problem()?;
    let err = problem.membership_error(p);
    if err > 1e-8 {
        return Err(Error::NotAProjection(format!("operator misses the trigonometric subspace by {err:.3e}")));
    }
    // entries of S₋ₖ P Sₖ are P shifted along the diagonal, so the mean
    // depends only on the lag i − j
    let lags: Vec<f64> = (0..n).map(|d| (0..n).map(|k| p[((k + d) % n, k)]).sum::<f64>() / n as f64).collect();
    let average = DMatrix::from_fn(n, n, |i, j| lags[(i + n - j) % n]);
    let deviation = (&average - fourier_projection(grid)).amax();
    Ok(MarcinkiewiczResult { average, deviation })
}

/// Sup-norm operator norm of a grid operator.
pub fn sup_norm(m: &DMatrix<f64>) -> Result<f64> {
    let space = LpSpace::new(m.nrows(), Exponent::Infinity)?;
    Ok(operator_norm(&Operator::on(space, m.clone())?, &SearchConfig::default())?.value)
}

/// Null-space helper exposed for diagnostics: family directions commuting with every element.
pub fn commuting_directions(group: &IsometryGroup, problem: &ProjectionProblem) -> Result<Vec<DMatrix<f64>>> {
    let param = problem.parametrize()?;
    let d = problem.space.dim;
    let k = param.dim();
    let rows = group.order() * d * d;
    let mut a = DMatrix::zeros(rows, k);
    for (gi, g) in group.elements.iter().enumerate() {
        for (l, dd) in param.directions.iter().enumerate() {
            let c = dd * g - g * dd;
            for i in 0..d {
                for j in 0..d {
                    a[(gi * d * d + i * d + j, l)] = c[(i, j)];
                }
            }
        }
    }
    Ok(null_space(&a, 1e-10)
        .into_iter()
        .map(|theta| param.directions.iter().zip(theta.iter()).fold(DMatrix::zeros(d, d), |acc, (dd, t)| acc + dd * *t))
        .collect())
}
