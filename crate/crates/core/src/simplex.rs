//! Dense two-phase simplex method with Bland's rule.
//!
//! Sized for the small epigraph programs that appear here (a few hundred
//! columns at most); no attempt is made at sparse or revised updates.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

/// `minimise cᵀx` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

const EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
        }
        self.basis[r] = c;
    }

    /// Sets the objective row to the reduced costs of `cost` for the current basis.
    fn price(&mut self, cost: &[f64]) {
        let mut obj = cost.to_vec();
        obj.push(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (v, t) in obj.iter_mut().zip(&self.rows[i]) {
                    *v -= cb * t;
                }
            }
        }
        self.obj = obj;
    }

    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let Some(enter) = (0..self.width).find(|&j| allowed(j) && self.obj[j] < -EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - EPS
                                || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Lp("unbounded"));
            };
            self.pivot(r, enter);
        }
        Err(Error::Lp("cycling"))
    }
}

impl LinearProgram {
    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.objective.len();
        let m = self.constraints.len();
        let slack_count = self.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let art_count = self
            .constraints
            .iter()
            .filter(|c| {
                let rel = normalized_relation(c);
                rel != Relation::Le
            })
            .count();
        let width = n + slack_count + art_count;
        let art_start = n + slack_count;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (n, art_start);
        for c in &self.constraints {
            assert_eq!(c.coeffs.len(), n, "constraint width must match objective");
            let flip = c.rhs < 0.0;
            let sign = if flip { -1.0 } else { 1.0 };
            let rel = normalized_relation(c);
            let mut row = vec![0.0; width + 1];
            for (j, v) in c.coeffs.iter().enumerate() {
                row[j] = sign * v;
            }
            row[width] = sign * c.rhs;
            match rel {
                Relation::Le => {
                    row[s] = 1.0;
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -1.0;
                    s += 1;
                    row[a] = 1.0;
                    basis.push(a);
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = 1.0;
                    basis.push(a);
                    a += 1;
                }
            }
            rows.push(row);
        }

        let mut t = Tableau { rows, obj: Vec::new(), basis, width };

        if art_count > 0 {
            let mut phase1 = vec![0.0; width];
            for c in phase1.iter_mut().skip(art_start) {
                *c = 1.0;
            }
            t.price(&phase1);
            t.run(&|_| true)?;
            if -t.obj[width] > 1e-8 {
                return Err(Error::Lp("infeasible"));
            }
            for i in 0..m {
                if t.basis[i] >= art_start {
                    if let Some(j) = (0..art_start).find(|&j| t.rows[i][j].abs() > EPS) {
                        t.pivot(i, j);
                    }
                }
            }
        }

        let mut cost = self.objective.clone();
        cost.resize(width, 0.0);
        t.price(&cost);
        t.run(&|j| j < art_start)?;

        let mut x = vec![0.0; n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs(i).max(0.0);
            }
        }
        let objective = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, objective })
    }
}

fn normalized_relation(c: &Constraint) -> Relation {
    match (c.relation, c.rhs < 0.0) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    }
}
