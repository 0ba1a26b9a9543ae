//! Small dense linear algebra: cyclic Jacobi for symmetric eigenproblems and
//! Gaussian elimination with partial pivoting for ranks and null spaces.

use nalgebra::{DMatrix, DVector};

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    /// Index of the eigenvalue with largest modulus (lowest index on ties).
    pub fn dominant(&self) -> usize {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = k;
            }
        }
        best
    }
}

fn off_diagonal_mass(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi iteration. Sweeps until the off-diagonal Frobenius mass is
/// at most `1e-12` relative to the matrix norm (or exactly zero).
pub fn jacobi_eigen(sym: &DMatrix<f64>) -> SymmetricEigen {
    assert!(sym.is_square(), "jacobi_eigen needs a square matrix");
    let n = sym.nrows();
    let mut a = (sym + sym.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        if off_diagonal_mass(&a) <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    SymmetricEigen { values: (0..n).map(|i| a[(i, i)]).collect(), vectors: v }
}

/// Reduced row echelon form with partial pivoting. Returns the reduced matrix
/// and the pivot columns.
pub fn rref(m: &DMatrix<f64>, tol: f64) -> (DMatrix<f64>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.amax().max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol * scale {
            for i in r..rows {
                a[(i, c)] = 0.0;
            }
            continue;
        }
        a.swap_rows(r, best);
        let piv = a[(r, c)];
        for j in 0..cols {
            a[(r, j)] /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in 0..cols {
                        a[(i, j)] -= f * a[(r, j)];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    rref(m, tol).1.len()
}

/// Basis of `{x : m x = 0}`, one vector per free column (free entry set to 1).
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    let (r, pivots) = rref(m, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = DVector::zeros(cols);
            x[f] = 1.0;
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -r[(row, f)];
            }
            x
        })
        .collect()
}

/// Solves `m x = b` in the least-squares sense via the normal equations;
/// `m` must have full column rank.
pub fn least_squares(m: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let mtm = m.transpose() * m;
    mtm.lu().solve(&(m.transpose() * b))
}
