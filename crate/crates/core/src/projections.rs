//! Projections and extensions onto a subspace `V ⊂ X`.
//!
//! For a basis `v₁…vₙ` of `V` and a fixed map `A` on `V` (identity for
//! projections) the admissible operators are `{P : X → V, P|_V = A}`, an
//! affine family `base + span{vⱼ δₖᵀ}` where `δₖ` runs over a basis of the
//! annihilator of `V`. Both norms are convex along this family, so the
//! search is a small convex minimax problem.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, null_space, rank};
use crate::lpspace::{Exponent, LpSpace};
use crate::operators::{
    diagonal_local_maxima, norm_local_maxima, numerical_radius, operator_norm, Method, Operator,
    SearchConfig,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::simplex::{Constraint, LinearProgram, Relation};

const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Operator,
    Radius,
}

impl std::str::FromStr for NormKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "operator" | "norm" => Ok(NormKind::Operator),
            "radius" | "diagonal" => Ok(NormKind::Radius),
            other => Err(format!("unknown kind {other:?} (operator|radius)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionProblem {
    pub space: LpSpace,
    pub v_basis: Vec<DVector<f64>>,
    /// `A` in `V`-coordinates: column `j` holds the coordinates of `A vⱼ`.
    pub restriction: DMatrix<f64>,
}

impl ProjectionProblem {
    pub fn new(space: LpSpace, v_basis: Vec<DVector<f64>>, restriction: Option<DMatrix<f64>>) -> Result<Self> {
        for v in &v_basis {
            space.check_dim(v)?;
        }
        let n = v_basis.len();
        if n == 0 {
            return Err(Error::Precondition("subspace basis is empty".into()));
        }
        let b = DMatrix::from_columns(&v_basis);
        if rank(&b, RANK_TOL) != n {
            return Err(Error::DependentBasis);
        }
        let restriction = restriction.unwrap_or_else(|| DMatrix::identity(n, n));
        if restriction.shape() != (n, n) {
            return Err(Error::RestrictionShape { expected: n, rows: restriction.nrows(), cols: restriction.ncols() });
        }
        Ok(ProjectionProblem { space, v_basis, restriction })
    }

    /// The projection problem (`A = id`).
    pub fn projection(space: LpSpace, v_basis: Vec<DVector<f64>>) -> Result<Self> {
        Self::new(space, v_basis, None)
    }

    pub fn subspace_dim(&self) -> usize {
        self.v_basis.len()
    }

    pub fn is_projection_problem(&self) -> bool {
        let n = self.subspace_dim();
        self.restriction == DMatrix::identity(n, n)
    }

    /// Columns are the basis vectors of `V`.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.v_basis)
    }

    /// Basis of `V^⊥ = {y : y(v) = 0 for all v ∈ V}`, of size `dim X − dim V`.
    pub fn annihilator_basis(&self) -> Vec<DVector<f64>> {
        null_space(&self.basis_matrix().transpose(), RANK_TOL)
    }

    pub fn parametrize(&self) -> Result<Parametrization> {
        let b = self.basis_matrix();
        // left inverse (BᵀB)⁻¹Bᵀ extends A along the orthogonal complement
        let gram = b.transpose() * &b;
        let gram_inv = gram.try_inverse().ok_or(Error::DependentBasis)?;
        let base = &b * &self.restriction * gram_inv * b.transpose();
        let deltas = self.annihilator_basis();
        let mut directions = Vec::with_capacity(self.v_basis.len() * deltas.len());
        for v in &self.v_basis {
            for d in &deltas {
                directions.push(v * d.transpose());
            }
        }
        Ok(Parametrization { base, directions })
    }

    /// Whether `m` maps into `V` and agrees with `A` on `V`, entrywise to `tol`.
    pub fn contains(&self, m: &DMatrix<f64>, tol: f64) -> bool {
        m.shape() == (self.space.dim, self.space.dim) && self.membership_error(m) <= tol
    }

    /// Largest entry of `m B − B A` and of the part of `m` leaving `V`.
    pub fn membership_error(&self, m: &DMatrix<f64>) -> f64 {
        let b = self.basis_matrix();
        let on_v = (m * &b - &b * &self.restriction).amax();
        let Some(gram_inv) = (b.transpose() * &b).try_inverse() else {
            return f64::INFINITY;
        };
        // m − B (BᵀB)⁻¹ Bᵀ m
        let coords = gram_inv * (b.transpose() * m);
        let leak = (m - &b * coords).amax();
        on_v.max(leak)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parametrization {
    pub base: DMatrix<f64>,
    pub directions: Vec<DMatrix<f64>>,
}

impl Parametrization {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn operator(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let mut m = self.base.clone();
        for (d, t) in self.directions.iter().zip(theta.iter()) {
            m += d * *t;
        }
        m
    }

    /// Coordinates of a family member relative to `base`.
    pub fn coordinates(&self, m: &DMatrix<f64>) -> Option<DVector<f64>> {
        if self.directions.is_empty() {
            return Some(DVector::zeros(0));
        }
        let cols: Vec<DVector<f64>> =
            self.directions.iter().map(|d| DVector::from_column_slice(d.as_slice())).collect();
        let a = DMatrix::from_columns(&cols);
        let diff = m - &self.base;
        least_squares(&a, &DVector::from_column_slice(diff.as_slice()))
    }
}

/// Norm of `m` on `space` under `kind`.
pub fn norm_of(space: &LpSpace, m: &DMatrix<f64>, kind: NormKind, cfg: &SearchConfig) -> Result<f64> {
    let op = Operator::on(*space, m.clone())?;
    Ok(match kind {
        NormKind::Operator => operator_norm(&op, cfg)?.value,
        NormKind::Radius => numerical_radius(&op, cfg)?.value,
    })
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub shrink_tol: f64,
    /// Inner norm evaluations allowed per restart.
    pub max_evals: usize,
    /// Start points for full inner evaluations.
    pub inner_starts: usize,
    /// Fresh start points added to the warm witnesses on each inner evaluation.
    pub warm_fresh: usize,
    pub seed: u64,
    pub method: Method,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            shrink_tol: 1e-8,
            max_evals: 10_000,
            inner_starts: 64,
            warm_fresh: 2,
            seed: 0,
            method: Method::Auto,
        }
    }
}

impl OptimizerConfig {
    pub fn search(&self) -> SearchConfig {
        SearchConfig { method: self.method, starts: self.inner_starts, seed: self.seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalProjection {
    pub operator: DMatrix<f64>,
    pub theta: DVector<f64>,
    pub value: f64,
    pub kind: NormKind,
    pub converged: bool,
    pub evaluations: usize,
    /// Full-evaluation value reached by each restart.
    pub restart_values: Vec<f64>,
    pub method: &'static str,
}

/// Inner evaluator that reuses the best witnesses from previous calls.
struct WarmEvaluator {
    space: LpSpace,
    kind: NormKind,
    cache: Vec<DVector<f64>>,
    pool: Vec<DVector<f64>>,
    cursor: usize,
    fresh: usize,
    max_iter: usize,
    evals: usize,
    /// Used instead of local ascent when the exponent is 1 or ∞.
    direct: Option<SearchConfig>,
}

const WARM_CACHE: usize = 6;

impl WarmEvaluator {
    fn new(space: LpSpace, kind: NormKind, cfg: &OptimizerConfig, seed: u64) -> Self {
        let pool = space.sphere_sample(cfg.inner_starts.max(8), seed);
        let direct = match space.p {
            Exponent::Finite(p) if p > 1.0 => None,
            _ => Some(cfg.search()),
        };
        WarmEvaluator { space, kind, cache: pool.clone(), pool, cursor: 0, fresh: cfg.warm_fresh, max_iter: 300, evals: 0, direct }
    }

    /// Local maxima from the given starts: `(x, |value|)`.
    fn maxima(&self, m: &DMatrix<f64>, starts: &[DVector<f64>]) -> Vec<(DVector<f64>, f64)> {
        match self.kind {
            NormKind::Radius => diagonal_local_maxima(m, &self.space, starts, self.max_iter)
                .into_iter()
                .map(|(x, _, v)| (x, v.abs()))
                .collect(),
            NormKind::Operator => {
                let op = Operator { matrix: m.clone(), domain: self.space, codomain: self.space };
                norm_local_maxima(&op, starts, self.max_iter)
            }
        }
    }

    fn eval(&mut self, m: &DMatrix<f64>) -> f64 {
        self.evals += 1;
        if let Some(search) = &self.direct {
            return norm_of(&self.space, m, self.kind, search).unwrap_or(f64::INFINITY);
        }
        let mut starts = self.cache.clone();
        for _ in 0..self.fresh {
            starts.push(self.pool[self.cursor % self.pool.len()].clone());
            self.cursor += 1;
        }
        let mut found = self.maxima(m, &starts);
        found.sort_by(|a, b| b.1.total_cmp(&a.1));
        let best = found.first().map(|f| f.1).unwrap_or(f64::INFINITY);
        let mut cache: Vec<DVector<f64>> = Vec::new();
        for (x, _) in found {
            let distinct = cache.iter().all(|c| (c - &x).amax() > 1e-3 && (c + &x).amax() > 1e-3);
            if distinct {
                cache.push(x);
            }
            if cache.len() == WARM_CACHE {
                break;
            }
        }
        self.cache = cache;
        best
    }

    /// Full evaluation from the warm witnesses plus the whole pool.
    fn full(&mut self, m: &DMatrix<f64>) -> f64 {
        if let Some(search) = &self.direct {
            return norm_of(&self.space, m, self.kind, search).unwrap_or(f64::INFINITY);
        }
        let mut starts = self.cache.clone();
        starts.extend(self.pool.iter().cloned());
        self.maxima(m, &starts).into_iter().map(|f| f.1).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Minimises the chosen norm over the admissible family.
///
/// `p ∈ {1, ∞}` is solved exactly as a linear program (row or column sums
/// of an affine matrix, and both norms coincide there). Otherwise a
/// Nelder–Mead search over the family coordinates is restarted
/// `cfg.restarts` times; the best full re-evaluation wins, ties going to
/// the lowest restart index.
pub fn minimal_projection(
    problem: &ProjectionProblem,
    kind: NormKind,
    cfg: &OptimizerConfig,
) -> Result<MinimalProjection> {
    let param = problem.parametrize()?;
    let space = problem.space;
    let search = cfg.search();
    if param.dim() == 0 {
        let value = norm_of(&space, &param.base, kind, &search)?;
        return Ok(MinimalProjection {
            operator: param.base.clone(),
            theta: DVector::zeros(0),
            value,
            kind,
            converged: true,
            evaluations: 1,
            restart_values: vec![value],
            method: "trivial",
        });
    }
    if (space.p.is_one() || space.p.is_infinite()) && cfg.method != Method::Sample {
        return minimise_polyhedral(problem, &param, kind);
    }

    let hilbert = space.p.is_two() && cfg.method != Method::Sample;
    let k = param.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0f_fa11);
    let scale = 0.3 / param.directions.iter().map(|d| d.amax()).fold(1e-12, f64::max);
    let inits: Vec<DVector<f64>> = (0..cfg.restarts.max(1))
        .map(|r| {
            if r == 0 {
                DVector::zeros(k)
            } else {
                DVector::from_fn(k, |_, _| { let g: f64 = StandardNormal.sample(&mut rng); scale * g })
            }
        })
        .collect();
    let opts = NelderMeadOptions {
        shrink_tol: cfg.shrink_tol,
        value_tol: 1e-14,
        max_evals: cfg.max_evals,
        initial_step: 0.1 * scale.min(1.0),
    };

    let runs: Vec<(DVector<f64>, f64, bool, usize)> = inits
        .par_iter()
        .enumerate()
        .map(|(r, x0)| {
            if hilbert {
                let f = |t: &DVector<f64>| norm_of(&space, &param.operator(t), kind, &search).unwrap_or(f64::INFINITY);
                let res = nelder_mead(f, x0, &opts);
                (res.x, res.value, res.converged, res.evals)
            } else {
                let mut ev = WarmEvaluator::new(space, kind, cfg, cfg.seed.wrapping_add(r as u64));
                let res = nelder_mead(|t| ev.eval(&param.operator(t)), x0, &opts);
                // polish from the best point with a small simplex
                let fine = NelderMeadOptions { initial_step: 1e-3 * scale.min(1.0), ..opts.clone() };
                let res2 = nelder_mead(|t| ev.eval(&param.operator(t)), &res.x, &fine);
                let best = if res2.value <= res.value { res2.x } else { res.x };
                let value = ev.full(&param.operator(&best));
                (best, value, res.converged && res2.converged, ev.evals)
            }
        })
        .collect();

    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.1 < runs[best].1 {
            best = i;
        }
    }
    let theta = runs[best].0.clone();
    let operator = param.operator(&theta);
    // report a full evaluation with the standard start set
    let value = if hilbert { runs[best].1 } else { runs[best].1.max(norm_of(&space, &operator, kind, &search)?) };
    Ok(MinimalProjection {
        operator,
        theta,
        value,
        kind,
        converged: runs[best].2,
        evaluations: runs.iter().map(|r| r.3).sum(),
        restart_values: runs.iter().map(|r| r.1).collect(),
        method: "nelder-mead",
    })
}

/// Exact minimisation for `p ∈ {1, ∞}`: minimise `t` subject to
/// `Σⱼ |Pᵢⱼ(θ)| ≤ t` per row (`∞`) or per column (`1`).
fn minimise_polyhedral(problem: &ProjectionProblem, param: &Parametrization, kind: NormKind) -> Result<MinimalProjection> {
    let d = problem.space.dim;
    let k = param.dim();
    let by_rows = problem.space.p.is_infinite();
    // variables: θ⁺ (k), θ⁻ (k), s (d·d), t
    let nvar = 2 * k + d * d + 1;
    let s_idx = |i: usize, j: usize| 2 * k + i * d + j;
    let t_idx = nvar - 1;
    let mut constraints = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; nvar];
                for (l, dir) in param.directions.iter().enumerate() {
                    c[l] = sign * dir[(i, j)];
                    c[k + l] = -sign * dir[(i, j)];
                }
                c[s_idx(i, j)] = -1.0;
                constraints.push(Constraint::new(c, Relation::Le, -sign * param.base[(i, j)]));
            }
        }
    }
    for a in 0..d {
        let mut c = vec![0.0; nvar];
        for b in 0..d {
            let (i, j) = if by_rows { (a, b) } else { (b, a) };
            c[s_idx(i, j)] = 1.0;
        }
        c[t_idx] = -1.0;
        constraints.push(Constraint::new(c, Relation::Le, 0.0));
    }
    let mut objective = vec![0.0; nvar];
    objective[t_idx] = 1.0;
    let sol = LinearProgram { objective, constraints }.solve()?;
    let theta = DVector::from_fn(k, |l, _| sol.x[l] - sol.x[k + l]);
    let operator = param.operator(&theta);
    let value = norm_of(&problem.space, &operator, kind, &SearchConfig::default())?;
    Ok(MinimalProjection {
        operator,
        theta,
        value,
        kind,
        converged: true,
        evaluations: 1,
        restart_values: vec![value],
        method: "linear-program",
    })
}

// ---------------------------------------------------------------------------
// extremal pairs and the invariance certificate

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalPair {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    /// Signed value `y(P x)`.
    pub value: f64,
    pub diagonal: bool,
}

impl ExtremalPair {
    /// The rank-one operator `z ↦ y(z) x`, as a matrix `x yᵀ`.
    pub fn rank_one(&self) -> DMatrix<f64> {
        &self.x * self.y.transpose()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalPairSet {
    pub pairs: Vec<ExtremalPair>,
    /// Norm (or radius) the pairs were measured against.
    pub norm: f64,
    /// Set when no pair reached `norm - tol`.
    pub empty: bool,
}

/// Pairs `(x, y)` of unit vector and unit functional with `|y(Px)| ≥ ‖P‖ − tol`
/// (diagonal pairs, `y(x) = 1`, for the radius kind). Representatives closer
/// than `1e-4` in max-coordinate distance are merged, as are `(x, y)` and
/// `(−x, −y)`.
pub fn extremal_pairs(
    p: &DMatrix<f64>,
    problem: &ProjectionProblem,
    kind: NormKind,
    tol: f64,
    cfg: &SearchConfig,
) -> Result<ExtremalPairSet> {
    let space = problem.space;
    let op = Operator::on(space, p.clone())?;
    let candidates: Vec<ExtremalPair> = match (space.p, kind) {
        (Exponent::Infinity, NormKind::Radius) => linf_diagonal_candidates(p),
        (Exponent::Infinity, NormKind::Operator) => linf_norm_candidates(&op)?,
        (e, NormKind::Radius) if e.is_one() => l1_diagonal_candidates(p),
        (e, NormKind::Operator) if e.is_one() => l1_norm_candidates(&op)?,
        _ => {
            let mut starts: Vec<DVector<f64>> = cfg.extra_starts.clone();
            starts.extend(space.sphere_sample(cfg.starts.max(256), cfg.seed));
            match kind {
                NormKind::Radius => diagonal_local_maxima(p, &space, &starts, cfg.max_iter)
                    .into_iter()
                    .map(|(x, y, value)| ExtremalPair { x, y, value, diagonal: true })
                    .collect(),
                NormKind::Operator => norm_local_maxima(&op, &starts, cfg.max_iter)
                    .into_iter()
                    .filter_map(|(x, v)| {
                        let px = op.apply(&x);
                        let y = space.ext_functionals(&px).ok()?.remove(0);
                        Some(ExtremalPair { x, y, value: v, diagonal: false })
                    })
                    .collect(),
            }
        }
    };
    let norm = candidates.iter().map(|c| c.value.abs()).fold(0.0, f64::max);
    let mut pairs: Vec<ExtremalPair> = Vec::new();
    for mut c in candidates.into_iter().filter(|c| c.value.abs() >= norm - tol) {
        let lead = c.x.iter().fold(0.0_f64, |m, v| if v.abs() > m.abs() + 1e-12 { *v } else { m });
        if lead < 0.0 {
            c.x = -c.x;
            c.y = -c.y;
        }
        let dup = pairs.iter().any(|q| (&q.x - &c.x).amax() < 1e-4 && (&q.y - &c.y).amax() < 1e-4);
        if !dup {
            pairs.push(c);
        }
    }
    let empty = pairs.is_empty();
    Ok(ExtremalPairSet { pairs, norm, empty })
}

fn linf_diagonal_candidates(t: &DMatrix<f64>) -> Vec<ExtremalPair> {
    let n = t.nrows();
    (0..n)
        .map(|i| {
            let s = if t[(i, i)] < 0.0 { -1.0 } else { 1.0 };
            let x = DVector::from_fn(n, |j, _| if j == i { 1.0 } else if t[(i, j)] < 0.0 { -s } else { s });
            let mut y = DVector::zeros(n);
            y[i] = 1.0;
            let value = y.dot(&(t * &x));
            ExtremalPair { x, y, value, diagonal: true }
        })
        .collect()
}

fn l1_diagonal_candidates(t: &DMatrix<f64>) -> Vec<ExtremalPair> {
    let n = t.nrows();
    (0..n)
        .map(|j| {
            let s = if t[(j, j)] < 0.0 { -1.0 } else { 1.0 };
            let y = DVector::from_fn(n, |k, _| if k == j { 1.0 } else if t[(k, j)] < 0.0 { -s } else { s });
            let mut x = DVector::zeros(n);
            x[j] = 1.0;
            let value = y.dot(&(t * &x));
            ExtremalPair { x, y, value, diagonal: true }
        })
        .collect()
}

fn linf_norm_candidates(op: &Operator) -> Result<Vec<ExtremalPair>> {
    let n = op.domain.dim;
    if n > crate::operators::MAX_VERTEX_DIM {
        return Err(Error::VertexEnumerationTooLarge(n));
    }
    let mut out = Vec::new();
    for mask in 0..1usize << (n - 1) {
        let x = DVector::from_fn(n, |i, _| if mask >> i & 1 == 0 { 1.0 } else { -1.0 });
        let px = op.apply(&x);
        if px.amax() == 0.0 {
            continue;
        }
        for y in op.codomain.ext_functionals(&px)? {
            let value = y.dot(&px);
            out.push(ExtremalPair { x: x.clone(), y, value, diagonal: false });
        }
    }
    Ok(out)
}

fn l1_norm_candidates(op: &Operator) -> Result<Vec<ExtremalPair>> {
    let n = op.domain.dim;
    let mut out = Vec::new();
    for j in 0..n {
        let mut x = DVector::zeros(n);
        x[j] = 1.0;
        let px = op.apply(&x);
        if px.amax() == 0.0 {
            continue;
        }
        for y in op.codomain.ext_functionals(&px)? {
            let value = y.dot(&px);
            out.push(ExtremalPair { x: x.clone(), y, value, diagonal: false });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    /// Convex weights over the supplied pairs.
    pub weights: Vec<f64>,
    /// `max_k dist(E v̂ₖ, V)` in the ambient norm, `v̂ₖ` the normalised basis.
    pub residual: f64,
    /// `E = Σ λⱼ sign(valueⱼ) xⱼ yⱼᵀ`.
    pub operator: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CertificateOutcome {
    Feasible(Certificate),
    /// Carries the certificate of smallest achievable residual.
    Infeasible(Certificate),
}

impl CertificateOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CertificateOutcome::Feasible(_))
    }

    pub fn certificate(&self) -> &Certificate {
        match self {
            CertificateOutcome::Feasible(c) | CertificateOutcome::Infeasible(c) => c,
        }
    }
}

/// Searches the convex hull of the signed rank-one operators of `pairs` for
/// one that leaves `V` invariant.
///
/// The linear program minimises `max_{k,m} |δ̂ₘ(E v̂ₖ)|` over convex weights,
/// with `v̂ₖ` normalised in `X` and `δ̂ₘ` in `X*`. For a hyperplane this is
/// exactly the ambient distance `dist(E v̂, V)`; otherwise the distance of the
/// optimal `E` is measured afterwards.
pub fn invariance_certificate(
    pairs: &[ExtremalPair],
    problem: &ProjectionProblem,
    tol: f64,
) -> Result<CertificateOutcome> {
    if pairs.is_empty() {
        return Err(Error::Precondition("pair list is empty".into()));
    }
    let space = problem.space;
    let m = pairs.len();
    let basis: Vec<DVector<f64>> = problem.v_basis.iter().map(|v| v / space.norm(v)).collect();
    let deltas: Vec<DVector<f64>> =
        problem.annihilator_basis().into_iter().map(|d| &d / space.dual_norm(&d)).collect();
    let signed: Vec<DMatrix<f64>> = pairs.iter().map(|p| p.rank_one() * p.value.signum()).collect();

    let weights = if deltas.is_empty() {
        let mut w = vec![0.0; m];
        w[0] = 1.0;
        w
    } else {
        // variables λ (m), t
        let nvar = m + 1;
        let mut constraints = vec![Constraint::new(
            (0..nvar).map(|j| if j < m { 1.0 } else { 0.0 }).collect(),
            Relation::Eq,
            1.0,
        )];
        for v in &basis {
            for d in &deltas {
                let coeffs: Vec<f64> = signed.iter().map(|e| d.dot(&(e * v))).collect();
                for sign in [1.0, -1.0] {
                    let mut c: Vec<f64> = coeffs.iter().map(|x| sign * x).collect();
                    c.push(-1.0);
                    constraints.push(Constraint::new(c, Relation::Le, 0.0));
                }
            }
        }
        let mut objective = vec![0.0; nvar];
        objective[m] = 1.0;
        let sol = LinearProgram { objective, constraints }.solve()?;
        let mut w: Vec<f64> = sol.x[..m].to_vec();
        let total: f64 = w.iter().sum();
        for x in w.iter_mut() {
            *x /= total;
        }
        w
    };

    let e = signed.iter().zip(&weights).fold(DMatrix::zeros(space.dim, space.dim), |acc, (s, w)| acc + s * *w);
    let residual = basis
        .iter()
        .map(|v| distance_to_subspace(&space, &(&e * v), problem, &deltas))
        .fold(0.0, f64::max);
    let cert = Certificate { weights, residual, operator: e };
    Ok(if residual <= tol { CertificateOutcome::Feasible(cert) } else { CertificateOutcome::Infeasible(cert) })
}

/// `dist(w, V)` in the ambient norm.
fn distance_to_subspace(space: &LpSpace, w: &DVector<f64>, problem: &ProjectionProblem, deltas: &[DVector<f64>]) -> f64 {
    match deltas.len() {
        0 => 0.0,
        // unit annihilator of a hyperplane: dist(w, ker δ) = |δ(w)|
        1 => deltas[0].dot(w).abs(),
        _ => {
            let b = problem.basis_matrix();
            let c0 = least_squares(&b, w).unwrap_or_else(|| DVector::zeros(b.ncols()));
            let opts = NelderMeadOptions { shrink_tol: 1e-12, value_tol: 1e-16, max_evals: 20_000, initial_step: 0.1 };
            let res = nelder_mead(|c| space.norm(&(w - &b * c)), &c0, &opts);
            res.value.min(space.norm(&(w - &b * c0)))
        }
    }
}
