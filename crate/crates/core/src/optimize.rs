//! Derivative-free and first-order local searches used by the norm evaluators
//! and by the outer projection search.

use nalgebra::DVector;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Stop once the simplex diameter (max-coordinate) falls below this.
    pub shrink_tol: f64,
    /// Stop once the spread of function values falls below this.
    pub value_tol: f64,
    pub max_evals: usize,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { shrink_tol: 1e-8, value_tol: 1e-13, max_evals: 10_000, initial_step: 0.1 }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: DVector<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimises `f` with the standard Nelder–Mead simplex (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2).
pub fn nelder_mead<F>(mut f: F, x0: &DVector<f64>, opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&DVector<f64>) -> f64,
{
    let n = x0.len();
    if n == 0 {
        let value = f(x0);
        return NelderMeadResult { x: x0.clone(), value, evals: 1, converged: true };
    }
    let mut evals = 0usize;
    let mut eval = |x: &DVector<f64>, evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.clone(), eval(x0, &mut evals)));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += if x[i] == 0.0 { opts.initial_step } else { opts.initial_step * x[i].abs().max(1.0) };
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| (x - &simplex[0].0).amax())
            .fold(0.0, f64::max);
        let spread = simplex[n].1 - simplex[0].1;
        if diameter <= opts.shrink_tol && spread <= opts.value_tol.max(1e-15 * simplex[0].1.abs()) {
            converged = true;
            break;
        }
        if diameter <= opts.shrink_tol * 1e-3 {
            // collapsed simplex on a kink; nothing more to gain
            converged = true;
            break;
        }

        let centroid = simplex[..n].iter().fold(DVector::zeros(n), |acc, (x, _)| acc + x) / n as f64;
        let worst = simplex[n].clone();
        let reflect = &centroid + (&centroid - &worst.0);
        let fr = eval(&reflect, &mut evals);
        if fr < simplex[0].1 {
            let expand = &centroid + (&centroid - &worst.0) * 2.0;
            let fe = eval(&expand, &mut evals);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let (cand, fc) = if fr < worst.1 {
                let c = &centroid + (&reflect - &centroid) * 0.5;
                let fc = eval(&c, &mut evals);
                (c, fc)
            } else {
                let c = &centroid + (&worst.0 - &centroid) * 0.5;
                let fc = eval(&c, &mut evals);
                (c, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (cand, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x = &best + (&item.0 - &best) * 0.5;
                    let v = eval(&x, &mut evals);
                    *item = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult { x, value, evals, converged }
}

/// Local maximisation of a scale-invariant objective over a unit sphere.
///
/// `normalize` maps a nonzero vector back to the sphere. The search runs
/// normalised steepest ascent with an adaptive step and finishes with a
/// coordinate pattern search, which also handles points where the gradient
/// is not defined.
pub fn sphere_ascent<F, G, N>(
    f: F,
    grad: G,
    normalize: N,
    start: DVector<f64>,
    max_iter: usize,
) -> (DVector<f64>, f64)
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
    N: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    let mut z = start;
    let mut fz = f(&z);
    let mut step = 0.25;
    let mut iter = 0;
    while iter < max_iter && step > 1e-13 {
        iter += 1;
        let g = grad(&z);
        let gn = g.norm();
        if !gn.is_finite() || gn < 1e-300 {
            break;
        }
        let scale = z.norm();
        let Some(cand) = normalize(&(&z + &g * (step * scale / gn))) else {
            step *= 0.5;
            continue;
        };
        let fc = f(&cand);
        if fc > fz {
            z = cand;
            fz = fc;
            step = (step * 1.6).min(1.0);
        } else {
            step *= 0.4;
        }
    }
    coordinate_polish(&f, &normalize, z, fz, 1e-3, 1e-12)
}

/// Pattern search along coordinate axes with a halving step.
pub fn coordinate_polish<F, N>(
    f: &F,
    normalize: &N,
    mut z: DVector<f64>,
    mut fz: f64,
    initial: f64,
    finest: f64,
) -> (DVector<f64>, f64)
where
    F: Fn(&DVector<f64>) -> f64,
    N: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    let n = z.len();
    let mut step = initial * z.amax().max(1e-300);
    let floor = finest * z.amax().max(1e-300);
    let mut rounds = 0;
    while step > floor && rounds < 400 {
        rounds += 1;
        let mut improved = false;
        for i in 0..n {
            for s in [step, -step] {
                let mut c = z.clone();
                c[i] += s;
                if let Some(c) = normalize(&c) {
                    let fc = f(&c);
                    if fc > fz {
                        z = c;
                        fz = fc;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (z, fz)
}

/// Runs `local` from every start in parallel and keeps the best value;
/// ties go to the lowest start index so the result matches a sequential scan.
pub fn best_of<T, L>(starts: &[DVector<f64>], local: L) -> Option<(usize, T, f64)>
where
    T: Send,
    L: Fn(&DVector<f64>) -> (T, f64) + Sync + Send,
{
    let results: Vec<(T, f64)> = starts.par_iter().map(&local).collect();
    let mut best: Option<(usize, T, f64)> = None;
    for (i, (t, v)) in results.into_iter().enumerate() {
        let better = match &best {
            None => true,
            Some((_, _, bv)) => v > *bv,
        };
        if better && v.is_finite() {
            best = Some((i, t, v));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &DVector<f64>| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions { shrink_tol: 1e-10, value_tol: 1e-16, max_evals: 20_000, initial_step: 0.5 };
        let r = nelder_mead(f, &DVector::from_row_slice(&[-1.2, 1.0]), &opts);
        assert!(r.converged);
        assert_abs_diff_eq!(r.x, DVector::from_row_slice(&[1.0, 1.0]), epsilon = 1e-6);
    }

    #[test]
    fn nelder_mead_kink() {
        // piecewise-linear convex objective with minimum 1 at (0.3, -0.2)
        let f = |x: &DVector<f64>| 1.0 + (x[0] - 0.3).abs() + 2.0 * (x[1] + 0.2).abs();
        let r = nelder_mead(f, &DVector::zeros(2), &NelderMeadOptions::default());
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn ascent_finds_rayleigh_maximum() {
        // max of x^T A x on the Euclidean sphere is the top eigenvalue 3
        let a = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let f = |z: &DVector<f64>| (z.transpose() * &a * z)[0] / z.norm_squared();
        let g = |z: &DVector<f64>| {
            let v = f(z);
            (&a * z * 2.0 - z * (2.0 * v)) / z.norm_squared()
        };
        let norm = |z: &DVector<f64>| {
            let n = z.norm();
            (n > 0.0).then(|| z / n)
        };
        let (z, v) = sphere_ascent(f, g, norm, DVector::from_row_slice(&[1.0, 0.0]), 500);
        assert_abs_diff_eq!(v, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z[0].abs(), z[1].abs(), epsilon = 1e-6);
    }

    #[test]
    fn best_of_prefers_lowest_index_on_ties() {
        let starts = vec![DVector::from_element(1, 1.0), DVector::from_element(1, 2.0), DVector::from_element(1, 1.0)];
        let (i, _, v) = best_of(&starts, |s| ((), if s[0] > 0.0 { 5.0 } else { 0.0 })).unwrap();
        assert_eq!((i, v), (0, 5.0));
    }
}
