//! Operators between `ℓᵖ` spaces: operator norm, numerical range, numerical
//! radius and numerical-index estimates.
//!
//! Closed forms are used where they exist:
//!
//! * `p = 1` and `p = ∞`: the radius is a maximum over the vertices of the
//!   unit ball with an inner maximum over the finite extremal set, which
//!   collapses to `|tᵢᵢ| + Σ_{j≠i} |tᵢⱼ|` over rows (`∞`) or columns (`1`).
//! * `p = 2`: the radius is the largest eigenvalue modulus of `(T + Tᵀ)/2`,
//!   the norm the square root of the largest eigenvalue of `TᵀT`.
//!
//! Everything else is a multi-start sphere ascent. For `1 < p < 2` the
//! search runs on the transpose in the conjugate exponent, where the
//! objective is continuously differentiable; the duality map carries the
//! witnesses back.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::jacobi_eigen;
use crate::lpspace::{signed_pow, Exponent, LpSpace};
use crate::optimize::sphere_ascent;

/// Largest dimension for sign-vector enumeration.
pub const MAX_VERTEX_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed form or vertex enumeration when available, multi-start otherwise.
    #[default]
    Auto,
    /// Closed form or vertex enumeration only.
    Exact,
    /// Multi-start search even where a closed form exists.
    Sample,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Method::Auto),
            "exact" => Ok(Method::Exact),
            "sample" => Ok(Method::Sample),
            other => Err(format!("unknown method {other:?} (auto|exact|sample)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub method: Method,
    pub starts: usize,
    pub seed: u64,
    /// Additional start points tried before the sampled ones.
    pub extra_starts: Vec<DVector<f64>>,
    pub max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { method: Method::Auto, starts: 64, seed: 0, extra_starts: Vec::new(), max_iter: 600 }
    }
}

impl SearchConfig {
    pub fn with_method(method: Method) -> Self {
        SearchConfig { method, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub matrix: DMatrix<f64>,
    pub domain: LpSpace,
    pub codomain: LpSpace,
}

impl Operator {
    pub fn new(matrix: DMatrix<f64>, domain: LpSpace, codomain: LpSpace) -> Result<Self> {
        if matrix.ncols() != domain.dim {
            return Err(Error::DimensionMismatch { expected: domain.dim, found: matrix.ncols() });
        }
        if matrix.nrows() != codomain.dim {
            return Err(Error::DimensionMismatch { expected: codomain.dim, found: matrix.nrows() });
        }
        Ok(Operator { matrix, domain, codomain })
    }

    /// An operator from a space to itself.
    pub fn on(space: LpSpace, matrix: DMatrix<f64>) -> Result<Self> {
        Operator::new(matrix, space, space)
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain == self.codomain
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_endomorphism() {
            return Err(Error::NotSquare { rows: self.matrix.nrows(), cols: self.matrix.ncols() });
        }
        Ok(())
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusResult {
    pub value: f64,
    pub witness_x: DVector<f64>,
    pub witness_y: DVector<f64>,
    /// `y(x) = 1` holds for the witnesses (numerical radius results).
    pub diagonal: bool,
    /// False only for the zero operator, whose witnesses are arbitrary.
    pub attained: bool,
    pub method: &'static str,
}

impl RadiusResult {
    /// `|y(T x)|` recomputed from the witnesses.
    pub fn reevaluate(&self, t: &DMatrix<f64>) -> f64 {
        self.witness_y.dot(&(t * &self.witness_x)).abs()
    }
}

// ---------------------------------------------------------------------------
// operator norm

pub fn operator_norm(op: &Operator, cfg: &SearchConfig) -> Result<RadiusResult> {
    let (dp, cp) = (op.domain.p, op.codomain.p);
    let exact = match (cfg.method, dp, cp) {
        (Method::Sample, _, _) => None,
        (_, _, _) if op.domain.dim == 0 => None,
        (_, d, _) if d.is_one() => Some(norm_from_l1(op)),
        (_, Exponent::Infinity, Exponent::Infinity) => Some(norm_linf_rows(op)),
        (_, Exponent::Infinity, _) => Some(norm_sign_vertices(op)?),
        (_, Exponent::Finite(_), Exponent::Infinity) => Some(norm_to_linf(op)),
        (_, d, c) if d.is_two() && c.is_two() => Some(norm_hilbert(op)),
        (Method::Exact, _, _) => {
            return Err(Error::NoExactMethod(format!("operator norm from l^{dp} to l^{cp}")))
        }
        _ => None,
    };
    if let Some(r) = exact {
        return Ok(r);
    }
    norm_multistart(op, cfg)
}

fn norming_functional(space: &LpSpace, v: &DVector<f64>) -> DVector<f64> {
    space
        .ext_functionals(v)
        .ok()
        .and_then(|ys| ys.into_iter().next())
        .unwrap_or_else(|| {
            let mut y = DVector::zeros(space.dim);
            y[0] = 1.0;
            if space.p.is_one() {
                y.fill(1.0);
            }
            y
        })
}

fn norm_result(op: &Operator, x: DVector<f64>, method: &'static str) -> RadiusResult {
    let tx = op.apply(&x);
    let value = op.codomain.norm(&tx);
    let y = norming_functional(&op.codomain, &tx);
    RadiusResult { value, witness_x: x, witness_y: y, diagonal: false, attained: value > 0.0, method }
}

fn norm_from_l1(op: &Operator) -> RadiusResult {
    let n = op.domain.dim;
    let mut best = (0, -1.0);
    for j in 0..n {
        let v = op.codomain.norm(&op.matrix.column(j).into_owned());
        if v > best.1 {
            best = (j, v);
        }
    }
    let mut x = DVector::zeros(n);
    x[best.0] = 1.0;
    norm_result(op, x, "columns")
}

fn norm_linf_rows(op: &Operator) -> RadiusResult {
    let t = &op.matrix;
    let mut best = (0, -1.0);
    for i in 0..t.nrows() {
        let s: f64 = t.row(i).iter().map(|v| v.abs()).sum();
        if s > best.1 {
            best = (i, s);
        }
    }
    let x = DVector::from_fn(t.ncols(), |j, _| if t[(best.0, j)] < 0.0 { -1.0 } else { 1.0 });
    norm_result(op, x, "rows")
}

fn norm_sign_vertices(op: &Operator) -> Result<RadiusResult> {
    let n = op.domain.dim;
    if n > MAX_VERTEX_DIM {
        return Err(Error::VertexEnumerationTooLarge(n));
    }
    // x and -x give the same norm: fix the last sign
    let mut best = (0usize, -1.0);
    for mask in 0..1usize << (n - 1) {
        let x = sign_vector(n, mask);
        let v = op.codomain.norm(&op.apply(&x));
        if v > best.1 {
            best = (mask, v);
        }
    }
    Ok(norm_result(op, sign_vector(n, best.0), "sign-vertices"))
}

fn sign_vector(n: usize, mask: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| if mask >> i & 1 == 0 { 1.0 } else { -1.0 })
}

/// `‖T‖_{p→∞} = maxᵢ ‖rowᵢ‖_q`.
fn norm_to_linf(op: &Operator) -> RadiusResult {
    let q = op.domain.p.dual();
    let t = &op.matrix;
    let mut best = (0, -1.0);
    for i in 0..t.nrows() {
        let row: Vec<f64> = t.row(i).iter().copied().collect();
        let v = crate::lpspace::lp_norm(&row, q);
        if v > best.1 {
            best = (i, v);
        }
    }
    let row = t.row(best.0).transpose();
    let x = if best.1 > 0.0 {
        let dual = LpSpace { dim: op.domain.dim, p: q };
        norming_functional(&dual, &row)
    } else {
        let mut e = DVector::zeros(op.domain.dim);
        e[0] = 1.0;
        e
    };
    norm_result(op, x, "rows-dual")
}

fn norm_hilbert(op: &Operator) -> RadiusResult {
    let t = &op.matrix;
    let gram = t.transpose() * t;
    let eig = jacobi_eigen(&gram);
    let k = (0..eig.values.len()).fold(0, |b, k| if eig.values[k] > eig.values[b] { k } else { b });
    norm_result(op, eig.vectors.column(k).into_owned(), "jacobi")
}

fn norm_multistart(op: &Operator, cfg: &SearchConfig) -> Result<RadiusResult> {
    let starts = start_points(&op.domain, cfg);
    let smooth = |e: Exponent| matches!(e, Exponent::Finite(p) if p > 1.0);
    if !smooth(op.domain.p) || !smooth(op.codomain.p) {
        // ball vertices are part of the sample for p ∈ {1, ∞}
        let best = argmax(starts.iter().map(|x| op.codomain.norm(&op.apply(x)) / op.domain.norm(x)))
            .ok_or(Error::NoValidDirections)?;
        return Ok(norm_result(op, starts[best].clone(), "vertex-sampling"));
    }
    let maxima = norm_local_maxima(op, &starts, cfg.max_iter);
    let best = argmax(maxima.iter().map(|m| m.1)).ok_or(Error::NoValidDirections)?;
    Ok(norm_result(op, maxima[best].0.clone(), "multistart"))
}

/// Local maxima of `‖Tx‖/‖x‖` from every start (finite exponents `> 1`), in start order.
pub(crate) fn norm_local_maxima(
    op: &Operator,
    starts: &[DVector<f64>],
    max_iter: usize,
) -> Vec<(DVector<f64>, f64)> {
    use rayon::prelude::*;
    let (dp, cp) = (op.domain.p, op.codomain.p);
    // For an endomorphism with p < 2 run on the transpose: ‖T‖_p = ‖Tᵀ‖_q.
    if op.is_endomorphism() {
        if let Exponent::Finite(p) = dp {
            if p > 1.0 && p < 2.0 {
                let dual = op.domain.dual();
                let transposed = Operator { matrix: op.matrix.transpose(), domain: dual, codomain: dual };
                let mapped: Vec<DVector<f64>> = starts.iter().map(|x| norming_functional(&op.domain, x)).collect();
                return norm_local_maxima(&transposed, &mapped, max_iter)
                    .into_iter()
                    .map(|(w, _)| {
                        let x = norming_functional(&dual, &(&transposed.matrix * &w));
                        let v = op.codomain.norm(&op.apply(&x));
                        (x, v)
                    })
                    .collect();
            }
        }
    }
    let (Exponent::Finite(dpv), Exponent::Finite(cpv)) = (dp, cp) else {
        panic!("norm_local_maxima needs finite exponents")
    };
    let t = &op.matrix;
    let tt = t.transpose();
    let domain = op.domain;
    let f = |z: &DVector<f64>| {
        let nz = domain.norm(z);
        if nz == 0.0 {
            return f64::NEG_INFINITY;
        }
        crate::lpspace::lp_norm((t * z).as_slice(), cp) / nz
    };
    let grad = |z: &DVector<f64>| {
        let tz = t * z;
        let a: f64 = tz.iter().map(|v| v.abs().powf(cpv)).sum();
        let b: f64 = z.iter().map(|v| v.abs().powf(dpv)).sum();
        if a == 0.0 {
            return DVector::zeros(z.len());
        }
        let ga = &tt * tz.map(|v| signed_pow(v, cpv - 1.0)) / a;
        let gb = z.map(|v| signed_pow(v, dpv - 1.0)) / b;
        ga - gb
    };
    starts
        .par_iter()
        .map(|s| sphere_ascent(f, grad, |z| domain.normalize(z).ok(), s.clone(), max_iter))
        .collect()
}

/// Index of the largest finite value, lowest index on ties.
pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if v.is_finite() && best.is_none_or(|b| v > b.1) {
            best = Some((i, v));
        }
    }
    best.map(|b| b.0)
}

pub(crate) fn start_points(space: &LpSpace, cfg: &SearchConfig) -> Vec<DVector<f64>> {
    let mut starts: Vec<DVector<f64>> =
        cfg.extra_starts.iter().filter_map(|s| space.normalize(s).ok()).collect();
    starts.extend(space.sphere_sample(cfg.starts, cfg.seed));
    starts
}

// ---------------------------------------------------------------------------
// numerical range and radius

/// Values `y(Tx)` over sampled unit `x` and every extreme norming functional `y`.
pub fn numerical_range_sample(op: &Operator, count: usize, seed: u64) -> Result<Vec<f64>> {
    op.require_square()?;
    let space = op.domain;
    let mut out = Vec::new();
    for x in space.sphere_sample(count, seed) {
        let tx = op.apply(&x);
        for y in space.ext_functionals(&x)? {
            out.push(y.dot(&tx) / y.dot(&x));
        }
    }
    Ok(out)
}

pub fn numerical_radius(op: &Operator, cfg: &SearchConfig) -> Result<RadiusResult> {
    op.require_square()?;
    let t = &op.matrix;
    let space = op.domain;
    if t.iter().all(|v| *v == 0.0) {
        let mut x = DVector::zeros(space.dim);
        x[0] = 1.0;
        let y = norming_functional(&space, &x);
        return Ok(RadiusResult {
            value: 0.0,
            witness_x: x,
            witness_y: y,
            diagonal: true,
            attained: false,
            method: "zero",
        });
    }
    match (cfg.method, space.p) {
        (Method::Sample, Exponent::Infinity) => Ok(radius_vertex_sampling(op, cfg)),
        (Method::Sample, p) if p.is_one() => Ok(radius_vertex_sampling(op, cfg)),
        (_, Exponent::Infinity) => Ok(radius_linf(t)),
        (_, p) if p.is_one() => Ok(radius_l1(t)),
        (Method::Sample, _) => radius_multistart(op, cfg),
        (_, p) if p.is_two() => Ok(radius_hilbert(t)),
        (Method::Exact, p) => Err(Error::NoExactMethod(format!("numerical radius on l^{p}"))),
        _ => radius_multistart(op, cfg),
    }
}

fn radius_linf(t: &DMatrix<f64>) -> RadiusResult {
    let n = t.nrows();
    let row_value =
        |i: usize| t[(i, i)].abs() + (0..n).filter(|&j| j != i).map(|j| t[(i, j)].abs()).sum::<f64>();
    let i = (0..n).fold(0, |b, i| if row_value(i) > row_value(b) { i } else { b });
    let s = if t[(i, i)] < 0.0 { -1.0 } else { 1.0 };
    let x = DVector::from_fn(n, |j, _| {
        if j == i {
            1.0
        } else if t[(i, j)] < 0.0 {
            -s
        } else {
            s
        }
    });
    let mut y = DVector::zeros(n);
    y[i] = 1.0;
    let value = y.dot(&(t * &x)).abs();
    RadiusResult { value, witness_x: x, witness_y: y, diagonal: true, attained: true, method: "rows" }
}

fn radius_l1(t: &DMatrix<f64>) -> RadiusResult {
    let n = t.nrows();
    let col_value =
        |j: usize| t[(j, j)].abs() + (0..n).filter(|&k| k != j).map(|k| t[(k, j)].abs()).sum::<f64>();
    let j = (0..n).fold(0, |b, j| if col_value(j) > col_value(b) { j } else { b });
    let s = if t[(j, j)] < 0.0 { -1.0 } else { 1.0 };
    let y = DVector::from_fn(n, |k, _| {
        if k == j {
            1.0
        } else if t[(k, j)] < 0.0 {
            -s
        } else {
            s
        }
    });
    let mut x = DVector::zeros(n);
    x[j] = 1.0;
    let value = y.dot(&(t * &x)).abs();
    RadiusResult { value, witness_x: x, witness_y: y, diagonal: true, attained: true, method: "columns" }
}

fn radius_hilbert(t: &DMatrix<f64>) -> RadiusResult {
    let eig = jacobi_eigen(&((t + t.transpose()) * 0.5));
    let x = eig.vectors.column(eig.dominant()).into_owned();
    let value = x.dot(&(t * &x)).abs();
    RadiusResult { value, witness_x: x.clone(), witness_y: x, diagonal: true, attained: true, method: "jacobi" }
}

/// Best `max_{y ∈ ext x} |y(Tx)|` over sampled points and ball vertices.
fn radius_vertex_sampling(op: &Operator, cfg: &SearchConfig) -> RadiusResult {
    let space = op.domain;
    let mut best: Option<(f64, DVector<f64>, DVector<f64>)> = None;
    for x in start_points(&space, cfg) {
        let tx = op.apply(&x);
        for y in space.ext_functionals(&x).unwrap_or_default() {
            let v = y.dot(&tx).abs();
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, x.clone(), y));
            }
        }
    }
    let (value, x, y) = best.expect("sphere sample is nonempty");
    RadiusResult { value, witness_x: x, witness_y: y, diagonal: true, attained: true, method: "vertex-sampling" }
}

/// Signed diagonal objective `Σ (Tz)ᵢ sign(zᵢ)|zᵢ|^{p-1} / Σ|zᵢ|ᵖ` and its gradient.
///
/// Valid for `p ≥ 2`, where `|t|^{p-2}` is continuous.
pub(crate) struct DiagonalObjective<'a> {
    pub t: &'a DMatrix<f64>,
    pub tt: DMatrix<f64>,
    pub p: f64,
}

impl<'a> DiagonalObjective<'a> {
    pub fn new(t: &'a DMatrix<f64>, p: f64) -> Self {
        DiagonalObjective { t, tt: t.transpose(), p }
    }

    pub fn value(&self, z: &DVector<f64>) -> f64 {
        let tz = self.t * z;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..z.len() {
            num += tz[i] * signed_pow(z[i], self.p - 1.0);
            den += z[i].abs().powf(self.p);
        }
        if den == 0.0 {
            f64::NAN
        } else {
            num / den
        }
    }

    pub fn gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        let p = self.p;
        let phi = z.map(|v| signed_pow(v, p - 1.0));
        let tz = self.t * z;
        let den: f64 = z.iter().map(|v| v.abs().powf(p)).sum();
        let h = tz.dot(&phi) / den;
        let mut g = &self.tt * &phi;
        for k in 0..z.len() {
            let dphi = if p == 2.0 { 1.0 } else { (p - 1.0) * z[k].abs().powf(p - 2.0) };
            g[k] += tz[k] * dphi - h * p * phi[k];
        }
        g / den
    }
}

/// Multi-start local maxima of `|y(Tx)|` over diagonal pairs, for finite `p > 1`.
/// Returns `(x, y, signed value)` for every start, in start order.
pub(crate) fn diagonal_local_maxima(
    t: &DMatrix<f64>,
    space: &LpSpace,
    starts: &[DVector<f64>],
    max_iter: usize,
) -> Vec<(DVector<f64>, DVector<f64>, f64)> {
    use rayon::prelude::*;
    let Exponent::Finite(p) = space.p else { panic!("finite exponent required") };
    if p < 2.0 {
        // x = ext(w) for the transpose on the conjugate space
        let dual = space.dual();
        let tt = t.transpose();
        let mapped: Vec<DVector<f64>> = starts
            .iter()
            .map(|x| space.ext_functionals(x).map(|mut v| v.remove(0)).unwrap_or_else(|_| x.clone()))
            .collect();
        return diagonal_local_maxima(&tt, &dual, &mapped, max_iter)
            .into_iter()
            .map(|(w, x, v)| (x, w, v))
            .collect();
    }
    let obj = DiagonalObjective::new(t, p);
    starts
        .par_iter()
        .map(|s| {
            let sign = if obj.value(s) < 0.0 { -1.0 } else { 1.0 };
            let f = |z: &DVector<f64>| sign * obj.value(z);
            let g = |z: &DVector<f64>| obj.gradient(z) * sign;
            let (x, _) = sphere_ascent(f, g, |z| space.normalize(z).ok(), s.clone(), max_iter);
            let y = space.ext_functionals(&x).map(|mut v| v.remove(0)).unwrap_or_else(|_| x.clone());
            let value = y.dot(&(t * &x));
            (x, y, value)
        })
        .collect()
}

fn radius_multistart(op: &Operator, cfg: &SearchConfig) -> Result<RadiusResult> {
    let space = op.domain;
    let starts = start_points(&space, cfg);
    let maxima = diagonal_local_maxima(&op.matrix, &space, &starts, cfg.max_iter);
    let best = argmax(maxima.iter().map(|m| m.2.abs())).ok_or(Error::NoValidDirections)?;
    let (x, y, v) = maxima[best].clone();
    Ok(RadiusResult { value: v.abs(), witness_x: x, witness_y: y, diagonal: true, attained: true, method: "multistart" })
}

// ---------------------------------------------------------------------------
// numerical index

#[derive(Debug, Clone, Serialize)]
pub struct IndexEstimate {
    /// Minimum of `‖T‖_w / ‖T‖` over the sampled operators; an upper bound on `n(X)`.
    pub upper_bound: f64,
    pub trials: usize,
    pub worst: DMatrix<f64>,
}

/// Samples Gaussian operators (plus `extra`), normalises each to operator
/// norm one and records the smallest numerical radius.
pub fn numerical_index_estimate(
    space: &LpSpace,
    trials: usize,
    seed: u64,
    extra: &[DMatrix<f64>],
    cfg: &SearchConfig,
) -> Result<IndexEstimate> {
    if trials == 0 && extra.is_empty() {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let n = space.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mats: Vec<DMatrix<f64>> = extra.to_vec();
    for _ in 0..trials {
        mats.push(DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng)));
    }
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for m in mats {
        for e in [&m] {
            if e.nrows() != n || e.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: e.nrows() });
            }
        }
        let op = Operator::on(*space, m.clone())?;
        let norm = operator_norm(&op, cfg)?.value;
        if norm == 0.0 {
            continue;
        }
        let scaled = Operator::on(*space, m / norm)?;
        let r = numerical_radius(&scaled, cfg)?.value;
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, scaled.matrix));
        }
    }
    let (upper_bound, worst) = best.ok_or(Error::NoValidDirections)?;
    Ok(IndexEstimate { upper_bound, trials: trials + extra.len(), worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn space(n: usize, p: Exponent) -> LpSpace {
        LpSpace::new(n, p).unwrap()
    }

    #[test]
    fn sampled_norm_on_polyhedral_spaces_hits_vertices() {
        let t = DMatrix::from_row_slice(3, 3, &[1.0, -2.0, 0.5, 0.0, 1.0, 1.0, -3.0, 0.0, 0.25]);
        for p in [Exponent::one(), Exponent::Infinity] {
            let op = Operator::on(space(3, p), t.clone()).unwrap();
            let exact = operator_norm(&op, &SearchConfig::default()).unwrap().value;
            let sampled = operator_norm(&op, &SearchConfig::with_method(Method::Sample)).unwrap().value;
            assert_abs_diff_eq!(sampled, exact, epsilon = 1e-12);
        }
    }

    fn shift(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| if i == j + 1 { 1.0 } else { 0.0 })
    }

    #[test]
    fn identity_norms_are_one() {
        for p in [Exponent::one(), Exponent::Finite(1.5), Exponent::two(), Exponent::Finite(4.0), Exponent::Infinity] {
            let op = Operator::on(space(3, p), DMatrix::identity(3, 3)).unwrap();
            let cfg = SearchConfig::default();
            assert_abs_diff_eq!(operator_norm(&op, &cfg).unwrap().value, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(numerical_radius(&op, &cfg).unwrap().value, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn shift_radius_fast_path() {
        for n in 2..=8 {
            let op = Operator::on(space(n, Exponent::two()), shift(n)).unwrap();
            let r = numerical_radius(&op, &SearchConfig::default()).unwrap();
            assert_abs_diff_eq!(r.value, (PI / (n + 1) as f64).cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(r.reevaluate(&op.matrix), r.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_has_zero_range() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let op = Operator::on(space(2, Exponent::two()), rot).unwrap();
        for v in numerical_range_sample(&op, 50, 1).unwrap() {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(numerical_radius(&op, &SearchConfig::default()).unwrap().value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_range_reaches_both_ends() {
        let d = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let op = Operator::on(space(2, Exponent::two()), d).unwrap();
        let vals = numerical_range_sample(&op, 200, 3).unwrap();
        assert!(vals.iter().all(|v| (-1.0 - 1e-12..=1.0 + 1e-12).contains(v)));
        assert!(vals.iter().any(|v| (v - 1.0).abs() < 1e-12));
        assert!(vals.iter().any(|v| (v + 1.0).abs() < 1e-12));
    }

    #[test]
    fn range_of_identity_is_one() {
        for p in [Exponent::one(), Exponent::Finite(3.0), Exponent::Infinity] {
            let op = Operator::on(space(3, p), DMatrix::identity(3, 3)).unwrap();
            for v in numerical_range_sample(&op, 30, 2).unwrap() {
                assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn non_square_rejected() {
        let op = Operator::new(DMatrix::zeros(2, 3), space(3, Exponent::two()), space(2, Exponent::two())).unwrap();
        assert!(matches!(numerical_radius(&op, &SearchConfig::default()), Err(Error::NotSquare { .. })));
        assert!(numerical_range_sample(&op, 4, 0).is_err());
    }

    #[test]
    fn zero_operator_is_unattained() {
        let op = Operator::on(space(3, Exponent::Finite(3.0)), DMatrix::zeros(3, 3)).unwrap();
        let r = numerical_radius(&op, &SearchConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(!r.attained);
    }

    #[test]
    fn vertex_enumeration_limit() {
        let s = space(21, Exponent::Infinity);
        let op = Operator::new(DMatrix::identity(2, 21), s, space(2, Exponent::two())).unwrap();
        assert_eq!(operator_norm(&op, &SearchConfig::default()), Err(Error::VertexEnumerationTooLarge(21)));
    }

    #[test]
    fn hilbert_norm_is_top_singular_value() {
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 0.2, 0.0, 1.0]);
        let op = Operator::on(space(3, Exponent::two()), t.clone()).unwrap();
        let fast = operator_norm(&op, &SearchConfig::default()).unwrap().value;
        let sampled = operator_norm(&op, &SearchConfig::with_method(Method::Sample)).unwrap().value;
        let sv = t.singular_values().max();
        assert_abs_diff_eq!(fast, sv, epsilon = 1e-10);
        assert_abs_diff_eq!(sampled, sv, epsilon = 1e-9);
    }

    #[test]
    fn linf_and_l1_radius_equal_norm() {
        let t = DMatrix::from_row_slice(3, 3, &[0.3, -2.0, 0.5, 1.0, -0.1, 0.0, 0.7, 0.7, -0.7]);
        for p in [Exponent::one(), Exponent::Infinity] {
            let op = Operator::on(space(3, p), t.clone()).unwrap();
            let cfg = SearchConfig::default();
            let r = numerical_radius(&op, &cfg).unwrap();
            let nrm = operator_norm(&op, &cfg).unwrap();
            assert_abs_diff_eq!(r.value, nrm.value, epsilon = 1e-12);
            assert_abs_diff_eq!(r.witness_y.dot(&r.witness_x), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.reevaluate(&t), r.value, epsilon = 1e-12);
            let sampled = numerical_radius(&op, &SearchConfig::with_method(Method::Sample)).unwrap();
            assert!(sampled.value <= r.value + 1e-12);
            assert_abs_diff_eq!(sampled.value, r.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn general_radius_witness_is_diagonal() {
        let t = DMatrix::from_row_slice(3, 3, &[0.3, -2.0, 0.5, 1.0, -0.1, 0.0, 0.7, 0.7, -0.7]);
        for p in [1.25, 4.0 / 3.0, 3.0, 4.0] {
            let s = space(3, Exponent::Finite(p));
            let op = Operator::on(s, t.clone()).unwrap();
            let r = numerical_radius(&op, &SearchConfig::default()).unwrap();
            assert_abs_diff_eq!(s.norm(&r.witness_x), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.dual_norm(&r.witness_y), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.witness_y.dot(&r.witness_x), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.reevaluate(&t), r.value, epsilon = 1e-12);
            let n = operator_norm(&op, &SearchConfig::default()).unwrap();
            assert!(r.value <= n.value + 1e-9);
        }
    }

    #[test]
    fn index_of_l2_with_rotation_is_zero() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let est = numerical_index_estimate(&space(2, Exponent::two()), 5, 0, &[rot], &SearchConfig::default()).unwrap();
        assert_abs_diff_eq!(est.upper_bound, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn index_of_l1_and_linf_is_one() {
        for p in [Exponent::one(), Exponent::Infinity] {
            let est = numerical_index_estimate(&space(3, p), 25, 4, &[], &SearchConfig::default()).unwrap();
            assert_abs_diff_eq!(est.upper_bound, 1.0, epsilon = 1e-9);
        }
    }
}
