//! Finite-dimensional sequence spaces `ℓᵖₙ`.
//!
//! Vectors and functionals are both plain `DVector<f64>`; a functional on
//! `ℓᵖₙ` is measured in the conjugate exponent. `p = ∞` is its own variant
//! rather than a large float so every branch on the exponent is explicit.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest dimension for which the sign vertices `{±1}ⁿ` are enumerated.
pub const MAX_SIGN_VERTICES_DIM: usize = 12;

/// Largest number of zero coordinates for which the `ℓ¹` duality map is expanded.
const MAX_FREE_SIGNS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn one() -> Self {
        Exponent::Finite(1.0)
    }

    pub fn two() -> Self {
        Exponent::Finite(2.0)
    }

    pub fn is_one(self) -> bool {
        matches!(self, Exponent::Finite(p) if p == 1.0)
    }

    pub fn is_two(self) -> bool {
        matches!(self, Exponent::Finite(p) if p == 2.0)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `1 < p < ∞`: the duality map is single-valued.
    pub fn is_smooth(self) -> bool {
        matches!(self, Exponent::Finite(p) if p > 1.0)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn dual(self) -> Self {
        dual_exponent(self)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts decimals, fractions such as `4/3`, and `inf`/`infinity`/`∞`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Exponent::Infinity),
            _ => {}
        }
        let value = if let Some((num, den)) = t.split_once('/') {
            let num: f64 = num.trim().parse().map_err(|_| Error::ExponentLiteral(s.into()))?;
            let den: f64 = den.trim().parse().map_err(|_| Error::ExponentLiteral(s.into()))?;
            num / den
        } else {
            t.parse().map_err(|_| Error::ExponentLiteral(s.into()))?
        };
        Exponent::new(value)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Number(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Hölder conjugate: `1/p + 1/q = 1`.
pub fn dual_exponent(p: Exponent) -> Exponent {
    match p {
        Exponent::Infinity => Exponent::one(),
        Exponent::Finite(v) if v == 1.0 => Exponent::Infinity,
        Exponent::Finite(v) => Exponent::Finite(v / (v - 1.0)),
    }
}

pub fn lp_norm(x: &[f64], p: Exponent) -> f64 {
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    match p {
        Exponent::Infinity => max,
        _ if max == 0.0 => 0.0,
        Exponent::Finite(p) if p == 1.0 => x.iter().map(|v| v.abs()).sum(),
        Exponent::Finite(p) if p == 2.0 => {
            max * x.iter().map(|v| (v / max).powi(2)).sum::<f64>().sqrt()
        }
        // scaled by the max entry so large p cannot overflow
        Exponent::Finite(p) => {
            max * x.iter().map(|v| (v.abs() / max).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// `⟨x, y⟩ = Σ yᵢ xᵢ`.
pub fn pair(y: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
    if y.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), found: x.len() });
    }
    Ok(y.dot(x))
}

/// `sign(t)|t|^{e}`; the building block of the `ℓᵖ` duality map.
#[inline]
pub(crate) fn signed_pow(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpSpace {
    pub dim: usize,
    pub p: Exponent,
}

impl LpSpace {
    pub fn new(dim: usize, p: Exponent) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Exponent::Finite(v) = p {
            if !(v >= 1.0) || !v.is_finite() {
                return Err(Error::InvalidExponent(v));
            }
        }
        Ok(LpSpace { dim, p })
    }

    pub fn dual(&self) -> LpSpace {
        LpSpace { dim: self.dim, p: self.p.dual() }
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        lp_norm(x.as_slice(), self.p)
    }

    /// Norm of a functional, i.e. the conjugate-exponent norm.
    pub fn dual_norm(&self, y: &DVector<f64>) -> f64 {
        lp_norm(y.as_slice(), self.p.dual())
    }

    pub fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    pub fn normalize(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.norm(x);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(x / n)
    }

    /// Extreme points of the duality map at `x`: norm-one functionals with
    /// `y(x) = ‖x‖`.
    ///
    /// For `1 < p < ∞` the set is a singleton. For `p = 1` every zero
    /// coordinate contributes a free sign; for `p = ∞` each coordinate of
    /// maximal modulus contributes `sign(xᵢ) eᵢ`.
    pub fn ext_functionals(&self, x: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        self.check_dim(x)?;
        let norm = self.norm(x);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        match self.p {
            Exponent::Infinity => {
                let cut = norm * (1.0 - 1e-12);
                Ok(x.iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() >= cut)
                    .map(|(i, v)| {
                        let mut y = DVector::zeros(self.dim);
                        y[i] = v.signum();
                        y
                    })
                    .collect())
            }
            Exponent::Finite(p) if p == 1.0 => {
                let zero_cut = norm * 1e-15;
                let free: Vec<usize> =
                    (0..self.dim).filter(|&i| x[i].abs() <= zero_cut).collect();
                if free.len() > MAX_FREE_SIGNS {
                    return Err(Error::VertexEnumerationTooLarge(free.len()));
                }
                let base = x.map(|v| if v.abs() <= zero_cut { 0.0 } else { v.signum() });
                Ok((0..1usize << free.len())
                    .map(|mask| {
                        let mut y = base.clone();
                        for (bit, &i) in free.iter().enumerate() {
                            y[i] = if mask >> bit & 1 == 0 { 1.0 } else { -1.0 };
                        }
                        y
                    })
                    .collect())
            }
            Exponent::Finite(p) => Ok(vec![self.duality_map(x, norm, p)]),
        }
    }

    fn duality_map(&self, x: &DVector<f64>, norm: f64, p: f64) -> DVector<f64> {
        x.map(|v| signed_pow(v / norm, p - 1.0))
    }

    /// A deterministic list of unit vectors.
    ///
    /// For `p ∈ {1, ∞}` the vertices of the unit ball (`±eᵢ`, respectively the
    /// sign vectors when `dim ≤ 12`) are always included and the list has
    /// `max(count, #vertices)` entries. For `1 < p < ∞` up to half of the list
    /// is taken from `±eᵢ` and the normalised sign vectors; the rest are
    /// normalised Gaussian draws.
    pub fn sphere_sample(&self, count: usize, seed: u64) -> Vec<DVector<f64>> {
        let n = self.dim;
        let basis = || {
            (0..n).flat_map(move |i| {
                [1.0, -1.0].into_iter().map(move |s| {
                    let mut e = DVector::zeros(n);
                    e[i] = s;
                    e
                })
            })
        };
        let signs = || {
            let limit = if n <= MAX_SIGN_VERTICES_DIM { 1usize << n } else { 0 };
            (0..limit).map(move |mask| {
                DVector::from_fn(n, |i, _| if mask >> i & 1 == 0 { 1.0 } else { -1.0 })
            })
        };

        let mut out: Vec<DVector<f64>> = match self.p {
            Exponent::Infinity => signs().collect(),
            Exponent::Finite(p) if p == 1.0 => basis().collect(),
            _ => basis()
                .chain(signs().skip(if n == 1 { 2 } else { 0 }))
                .take(count / 2)
                .map(|v| self.normalize(&v).expect("structural vertex is nonzero"))
                .collect(),
        };

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while out.len() < count {
            let g = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            if let Ok(u) = self.normalize(&g) {
                out.push(u);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn norms() {
        assert_eq!(lp_norm(&[1.0, 1.0, 1.0], Exponent::one()), 3.0);
        assert_abs_diff_eq!(lp_norm(&[3.0, 4.0], Exponent::two()), 5.0, epsilon = 1e-15);
        assert_eq!(lp_norm(&[-1.0, 0.0, 1.0], Exponent::Infinity), 1.0);
        assert_eq!(lp_norm(&[0.0, 0.0], Exponent::Finite(4.0 / 3.0)), 0.0);
        // no overflow for huge exponents
        assert_abs_diff_eq!(lp_norm(&[1e200, 1e200], Exponent::Finite(50.0)), 1e200 * 2f64.powf(0.02), epsilon = 1e186);
    }

    #[test]
    fn conjugates() {
        assert_eq!(dual_exponent(Exponent::two()), Exponent::two());
        match dual_exponent(Exponent::Finite(4.0 / 3.0)) {
            Exponent::Finite(q) => assert_abs_diff_eq!(q, 4.0, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(dual_exponent(Exponent::Infinity), Exponent::one());
        assert_eq!(dual_exponent(Exponent::one()), Exponent::Infinity);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::two());
        assert!(matches!("4/3".parse::<Exponent>().unwrap(), Exponent::Finite(p) if (p - 4.0/3.0).abs() < 1e-15));
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
        let p: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(p, Exponent::Infinity);
        assert_eq!(serde_json::to_string(&Exponent::Infinity).unwrap(), "\"inf\"");
    }

    #[test]
    fn hilbert_duality_is_normalisation() {
        let s = LpSpace::new(2, Exponent::two()).unwrap();
        let ys = s.ext_functionals(&v(&[0.6, 0.8])).unwrap();
        assert_eq!(ys.len(), 1);
        assert_abs_diff_eq!(ys[0], v(&[0.6, 0.8]), epsilon = 1e-15);
    }

    #[test]
    fn l1_duality_expands_free_signs() {
        let s = LpSpace::new(2, Exponent::one()).unwrap();
        let ys = s.ext_functionals(&v(&[1.0, 0.0])).unwrap();
        assert_eq!(ys, vec![v(&[1.0, 1.0]), v(&[1.0, -1.0])]);
    }

    #[test]
    fn linf_duality_picks_maximal_coordinates() {
        let s = LpSpace::new(3, Exponent::Infinity).unwrap();
        let ys = s.ext_functionals(&v(&[-2.0, 1.0, 2.0])).unwrap();
        assert_eq!(ys, vec![v(&[-1.0, 0.0, 0.0]), v(&[0.0, 0.0, 1.0])]);
    }

    #[test]
    fn holder_equality_at_four_thirds() {
        let s = LpSpace::new(3, Exponent::Finite(4.0 / 3.0)).unwrap();
        let x = v(&[1.0, 1.0, 1.0]);
        let ys = s.ext_functionals(&x).unwrap();
        assert_eq!(ys.len(), 1);
        // ‖x‖_{4/3} = 3^{3/4}; y = 3^{-1/4}(1,1,1)
        assert_abs_diff_eq!(pair(&ys[0], &x).unwrap(), 3f64.powf(0.75), epsilon = 1e-12);
        assert_abs_diff_eq!(s.dual_norm(&ys[0]), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ys[0][0], 3f64.powf(-0.25), epsilon = 1e-12);
    }

    #[test]
    fn zero_has_no_extremal() {
        let s = LpSpace::new(2, Exponent::Finite(3.0)).unwrap();
        assert_eq!(s.ext_functionals(&v(&[0.0, 0.0])), Err(Error::ZeroVector));
    }

    #[test]
    fn pairing() {
        assert_eq!(pair(&v(&[1.0, 0.0, 0.0]), &v(&[5.0, 2.0, 1.0])).unwrap(), 5.0);
        assert_eq!(pair(&v(&[-0.5, 0.0, 0.5]), &v(&[1.0, 1.0, 1.0])).unwrap(), 0.0);
        assert_eq!(pair(&v(&[-0.5, 0.0, 0.5]), &v(&[-1.0, 0.0, 1.0])).unwrap(), 1.0);
        assert!(pair(&v(&[1.0]), &v(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn sphere_sample_contracts() {
        let s = LpSpace::new(2, Exponent::two()).unwrap();
        let pts = s.sphere_sample(4, 0);
        assert_eq!(pts.len(), 4);
        for x in &pts {
            assert_abs_diff_eq!(s.norm(x), 1.0, epsilon = 1e-12);
        }

        let l1 = LpSpace::new(3, Exponent::one()).unwrap();
        let pts = l1.sphere_sample(2, 7);
        for i in 0..3 {
            for sgn in [1.0, -1.0] {
                let mut e = DVector::zeros(3);
                e[i] = sgn;
                assert!(pts.contains(&e));
            }
        }

        let linf = LpSpace::new(3, Exponent::Infinity).unwrap();
        let pts = linf.sphere_sample(20, 3);
        assert_eq!(pts.len(), 20);
        for mask in 0..8usize {
            let s = DVector::from_fn(3, |i, _| if mask >> i & 1 == 0 { 1.0 } else { -1.0 });
            assert!(pts.contains(&s));
        }
        assert_eq!(linf.sphere_sample(20, 3), pts);
    }
}
