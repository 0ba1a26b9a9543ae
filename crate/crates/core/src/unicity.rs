//! Strong unicity of minimal extensions and the fixed problem instances.
//!
//! An extension `P_o` is strongly unique with constant `r > 0` when
//! `‖P‖ ≥ ‖P_o‖ + r ‖P − P_o‖` for every admissible `P`. The estimate here is
//! the smallest observed ratio over sampled `P`, so it only bounds `r` from
//! above.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpspace::{Exponent, LpSpace};
use crate::operators::SearchConfig;
use crate::projections::{extremal_pairs, norm_of, NormKind, ProjectionProblem};

#[derive(Debug, Clone, Serialize)]
pub struct UnicityEstimate {
    pub r_hat: f64,
    /// Samples that entered the minimum.
    pub sample_count: usize,
    /// `P − P_o` for the sample attaining `r_hat`.
    pub worst_direction: DMatrix<f64>,
    /// Differences with vanishing semi-norm but nonzero operator norm.
    pub degenerate_directions: Vec<DMatrix<f64>>,
    /// Samples equal to `P_o`.
    pub rejected: usize,
}

#[derive(Debug, Clone)]
pub struct UnicityConfig {
    pub samples: usize,
    pub seed: u64,
    /// Start points for each norm evaluation, on top of the witnesses of `P_o`.
    pub starts: usize,
    /// Admissible operators always included among the samples.
    pub extra: Vec<DMatrix<f64>>,
    pub method: crate::operators::Method,
}

impl Default for UnicityConfig {
    fn default() -> Self {
        UnicityConfig { samples: 10_000, seed: 0, starts: 8, extra: Vec::new(), method: Default::default() }
    }
}

const SAME_TOL: f64 = 1e-12;
const SEMINORM_ZERO: f64 = 1e-10;
const NORM_NONZERO: f64 = 1e-6;

/// Sampled estimate of the strong-unicity constant of `p_o`.
///
/// Half of the samples are local, `P_o + ρ Δ` with a random unit family
/// direction `Δ` and `ρ = 10^u`, `u ∈ [−3, 0]`; the rest are global draws
/// with Gaussian coordinates of scale 3.
pub fn strong_unicity_estimate(
    problem: &ProjectionProblem,
    p_o: &DMatrix<f64>,
    kind: NormKind,
    cfg: &UnicityConfig,
) -> Result<UnicityEstimate> {
    if !problem.contains(p_o, 1e-8) {
        return Err(Error::NotAProjection("reference operator is outside the admissible family".into()));
    }
    let space = problem.space;
    let param = problem.parametrize()?;
    let pairs = extremal_pairs(p_o, problem, kind, 1e-3, &SearchConfig { starts: 64, seed: cfg.seed, ..Default::default() })?;
    let search = SearchConfig {
        method: cfg.method,
        starts: cfg.starts,
        seed: cfg.seed,
        extra_starts: pairs.pairs.iter().map(|p| p.x.clone()).collect(),
        ..Default::default()
    };
    let base_value = norm_of(&space, p_o, kind, &SearchConfig { starts: 256, ..search.clone() })?;

    let mut samples: Vec<DMatrix<f64>> = cfg.extra.clone();
    let k = param.dim();
    if k > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x00c0_ffee);
        for i in 0..cfg.samples {
            let mut theta = DVector::from_fn(k, |_, _| {
                let g: f64 = StandardNormal.sample(&mut rng);
                g
            });
            if i % 2 == 0 {
                let rho = 10f64.powf(rng.random_range(-3.0..0.0));
                theta *= rho / theta.norm().max(1e-300);
            } else {
                theta *= 3.0;
            }
            let dir = param.directions.iter().zip(theta.iter()).fold(DMatrix::zeros(space.dim, space.dim), |acc, (d, t)| acc + d * *t);
            samples.push(p_o + dir);
        }
    }

    enum Outcome {
        Same,
        Degenerate(DMatrix<f64>),
        Ratio(f64, DMatrix<f64>),
        Failed,
    }
    let outcomes: Vec<Outcome> = samples
        .par_iter()
        .map(|p| {
            let diff = p - p_o;
            if diff.amax() <= SAME_TOL {
                return Outcome::Same;
            }
            let (Ok(dn), Ok(v)) = (norm_of(&space, &diff, kind, &search), norm_of(&space, p, kind, &search)) else {
                return Outcome::Failed;
            };
            if dn < SEMINORM_ZERO {
                let op_norm = norm_of(&space, &diff, NormKind::Operator, &search).unwrap_or(0.0);
                return if op_norm > NORM_NONZERO { Outcome::Degenerate(diff) } else { Outcome::Same };
            }
            Outcome::Ratio((v - base_value) / dn, diff)
        })
        .collect();

    let mut best: Option<(f64, DMatrix<f64>)> = None;
    let mut count = 0;
    let mut rejected = 0;
    let mut degenerate = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Same => rejected += 1,
            Outcome::Degenerate(d) => degenerate.push(d),
            Outcome::Failed => {}
            Outcome::Ratio(r, d) => {
                count += 1;
                if best.as_ref().is_none_or(|b| r < b.0) {
                    best = Some((r, d));
                }
            }
        }
    }
    let (r_hat, worst_direction) = best.ok_or(Error::NoValidDirections)?;
    Ok(UnicityEstimate { r_hat, sample_count: count, worst_direction, degenerate_directions: degenerate, rejected })
}

/// Closed-form minimal projection constant of a hyperplane `ker f` in `ℓ∞ⁿ`
/// with `f = (0, f₂, …, fₙ)`, together with two distinct minimal projections
/// `P₁ = I − y fᵀ` and `P₂ = I − z fᵀ`.
#[derive(Debug, Clone, Serialize)]
pub struct HyperplaneConstant {
    pub lambda: f64,
    pub first: DMatrix<f64>,
    pub second: DMatrix<f64>,
}

pub fn dim4_lambda(f: &[f64]) -> Result<HyperplaneConstant> {
    let n = f.len();
    if n < 3 {
        return Err(Error::Precondition(format!("functional needs at least 3 entries, got {n}")));
    }
    if f[0] != 0.0 {
        return Err(Error::Precondition(format!("first entry must be 0, got {}", f[0])));
    }
    for (i, &v) in f.iter().enumerate().skip(1) {
        if v <= 0.0 {
            return Err(Error::Precondition(format!("entry {i} must be positive, got {v}")));
        }
        if v >= 0.5 {
            return Err(Error::Precondition(format!("entry {i} must be below 1/2, got {v}")));
        }
    }
    let total: f64 = f.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("entries must sum to 1, got {total}")));
    }
    let s: f64 = f[1..].iter().map(|v| v / (1.0 - 2.0 * v)).sum();
    let lambda = 1.0 + 1.0 / s;
    // y and z differ only in the coordinate that f ignores
    let mut y = DVector::from_fn(n, |i, _| if i == 0 { 0.0 } else { (lambda - 1.0) / (1.0 - 2.0 * f[i]) });
    y[0] = lambda - 1.0;
    let mut z = y.clone();
    z[0] = 0.0;
    let fv = DVector::from_row_slice(f);
    let id = DMatrix::identity(n, n);
    Ok(HyperplaneConstant { lambda, first: &id - &y * fv.transpose(), second: &id - &z * fv.transpose() })
}

#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub name: &'static str,
    pub problem: InstanceProblem,
    /// Expected minimal operator norm and minimal numerical radius.
    pub expected: (f64, f64),
    pub tolerance: f64,
    /// `"published"` for values stated with the instance, `"closed-form"` otherwise.
    pub source: &'static str,
    /// Two distinct minimisers, when known.
    pub minimizers: Vec<DMatrix<f64>>,
}

/// Serialisable view of a [`ProjectionProblem`].
#[derive(Debug, Clone, Serialize)]
pub struct InstanceProblem {
    pub dim: usize,
    pub p: Exponent,
    pub v_basis: Vec<Vec<f64>>,
}

impl Instance {
    pub fn projection_problem(&self) -> ProjectionProblem {
        let space = LpSpace::new(self.problem.dim, self.problem.p).expect("instance space");
        let basis = self.problem.v_basis.iter().map(|v| DVector::from_row_slice(v)).collect();
        ProjectionProblem::projection(space, basis).expect("instance basis")
    }
}

/// The three fixed instances: the `ℓ^{4/3}` plane where the two minimisers
/// differ, the `ℓ∞³` kernel plane with several norm-one projections, and a
/// hyperplane in `ℓ∞⁴` with two minimal projections.
pub fn builtin_instances() -> Vec<Instance> {
    let normone_p1 = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    let normone_p2 = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let f = [0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
    let h = dim4_lambda(&f).expect("fixed functional");
    vec![
        Instance {
            name: "example-l43",
            problem: InstanceProblem {
                dim: 3,
                p: Exponent::Finite(4.0 / 3.0),
                v_basis: vec![vec![1.0, 1.0, 1.0], vec![-1.0, 0.0, 1.0]],
            },
            expected: (1.05251, 1.02751),
            tolerance: 2e-3,
            source: "published",
            minimizers: Vec::new(),
        },
        Instance {
            name: "normone",
            problem: InstanceProblem {
                dim: 3,
                p: Exponent::Infinity,
                v_basis: vec![vec![1.0, -1.0, 0.0], vec![0.0, 0.0, 1.0]],
            },
            expected: (1.0, 1.0),
            tolerance: 1e-6,
            source: "published",
            minimizers: vec![normone_p1, normone_p2],
        },
        Instance {
            name: "dim4",
            problem: InstanceProblem {
                dim: 4,
                p: Exponent::Infinity,
                v_basis: hyperplane_basis(&f),
            },
            expected: (h.lambda, h.lambda),
            tolerance: 2e-3,
            source: "closed-form",
            minimizers: vec![h.first, h.second],
        },
    ]
}

/// Basis of `ker f` for `f` with a nonzero last entry.
fn hyperplane_basis(f: &[f64]) -> Vec<Vec<f64>> {
    let n = f.len();
    let last = f[n - 1];
    (0..n - 1)
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v[n - 1] = -f[i] / last;
            v
        })
        .collect()
}
