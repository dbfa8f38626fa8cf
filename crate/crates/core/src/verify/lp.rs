//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Solves `min c·x` subject to `A x (≤ | = | ≥) b`, `x ≥ 0`, and returns a
//! dual vector together with the duality gap and the worst dual
//! infeasibility measured on the original data.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearProgram {
    pub fn new(cost: Vec<f64>) -> LinearProgram {
        LinearProgram {
            cost,
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.cost.len());
        self.rows.push((coeffs, rel, rhs));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    /// One multiplier per row, in the sign convention of the original rows.
    pub duals: Vec<f64>,
    /// `|c·x − b·y|`.
    pub duality_gap: f64,
    /// Largest violation of dual feasibility (reduced costs and row signs).
    pub dual_infeasibility: f64,
}

impl LpSolution {
    fn without_solution(status: LpStatus, n: usize, m: usize) -> LpSolution {
        LpSolution {
            status,
            x: vec![0.0; n],
            value: f64::NAN,
            duals: vec![0.0; m],
            duality_gap: f64::NAN,
            dual_infeasibility: f64::NAN,
        }
    }
}

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

struct Tableau {
    /// `m` rows of `ncols + 1` entries, the last one the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        self.t[r][c] = 1.0;
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for (i, row) in self.t.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (rj, a) in r.iter_mut().zip(row) {
                    *rj -= cb * a;
                }
            }
        }
        r
    }

    /// Bland's rule. `Ok(true)` at optimality, `Ok(false)` if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let r = self.reduced_costs(cost);
            let Some(c) = (0..self.ncols).find(|&j| allowed[j] && r[j] < -COST_EPS) else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                let a = row[c];
                if a > PIVOT_EPS {
                    let ratio = row[self.ncols] / a;
                    let better = match best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - 1e-14 * br.abs().max(1.0)
                                || (ratio <= br + 1e-14 * br.abs().max(1.0)
                                    && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return Ok(false),
                Some((i, _)) => self.pivot(i, c),
            }
        }
        Err(Error::InternalInvariant(
            "simplex pivot limit reached".into(),
        ))
    }
}

/// Solves the program. Never fails on well-formed input except by exceeding
/// the pivot limit.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.cost.len();
    let m = lp.rows.len();

    // Flip rows so that every right-hand side is non-negative.
    let mut rows: Vec<(Vec<f64>, Relation, f64, f64)> = Vec::with_capacity(m);
    for (a, rel, b) in &lp.rows {
        if *b < 0.0 {
            let flipped = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            rows.push((a.iter().map(|v| -v).collect(), flipped, -b, -1.0));
        } else {
            rows.push((a.clone(), *rel, *b, 1.0));
        }
    }

    // Columns: originals, one slack or surplus per inequality, one
    // artificial per `=`/`≥` row. `unit[i]` is the column that starts as the
    // identity column of row i.
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ncols = n + n_slack + n_art;
    let mut t = vec![vec![0.0; ncols + 1]; m];
    let mut basis = vec![0; m];
    let mut unit = vec![0; m];
    let mut artificial = vec![false; ncols];
    let (mut s, mut a_col) = (n, n + n_slack);
    for (i, (a, rel, b, _)) in rows.iter().enumerate() {
        t[i][..n].copy_from_slice(a);
        t[i][ncols] = *b;
        match rel {
            Relation::Le => {
                t[i][s] = 1.0;
                basis[i] = s;
                unit[i] = s;
                s += 1;
            }
            Relation::Ge => {
                t[i][s] = -1.0;
                s += 1;
                t[i][a_col] = 1.0;
                basis[i] = a_col;
                unit[i] = a_col;
                artificial[a_col] = true;
                a_col += 1;
            }
            Relation::Eq => {
                t[i][a_col] = 1.0;
                basis[i] = a_col;
                unit[i] = a_col;
                artificial[a_col] = true;
                a_col += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, ncols };
    let scale = 1.0 + rows.iter().fold(0.0_f64, |acc, r| acc.max(r.2));

    if n_art > 0 {
        let phase1: Vec<f64> = (0..ncols)
            .map(|j| if artificial[j] { 1.0 } else { 0.0 })
            .collect();
        let all = vec![true; ncols];
        tab.optimize(&phase1, &all)?;
        let infeas: f64 = tab
            .t
            .iter()
            .zip(&tab.basis)
            .filter(|(_, &b)| artificial[b])
            .map(|(row, _)| row[ncols])
            .sum();
        if infeas > 1e-9 * scale {
            return Ok(LpSolution::without_solution(LpStatus::Infeasible, n, m));
        }
        // Drive zero-level artificials out of the basis; rows where that is
        // impossible are redundant and are dropped.
        let mut i = 0;
        while i < tab.t.len() {
            if artificial[tab.basis[i]] {
                let col = (0..ncols).find(|&j| !artificial[j] && tab.t[i][j].abs() > 1e-9);
                match col {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut phase2 = vec![0.0; ncols];
    phase2[..n].copy_from_slice(&lp.cost);
    let allowed: Vec<bool> = (0..ncols).map(|j| !artificial[j]).collect();
    if !tab.optimize(&phase2, &allowed)? {
        return Ok(LpSolution::without_solution(LpStatus::Unbounded, n, m));
    }

    let mut x = vec![0.0; n];
    for (row, &b) in tab.t.iter().zip(&tab.basis) {
        if b < n {
            x[b] = row[ncols].max(0.0);
        }
    }
    let rc = tab.reduced_costs(&phase2);
    let duals: Vec<f64> = (0..m).map(|i| -rc[unit[i]] * rows[i].3).collect();

    let value: f64 = lp.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    let dual_value: f64 = lp.rows.iter().zip(&duals).map(|(r, y)| r.2 * y).sum();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let reduced = lp.cost[j]
            - lp.rows
                .iter()
                .zip(&duals)
                .map(|(r, y)| r.0[j] * y)
                .sum::<f64>();
        worst = worst.max(-reduced);
    }
    for (r, y) in lp.rows.iter().zip(&duals) {
        match r.1 {
            Relation::Le => worst = worst.max(*y),
            Relation::Ge => worst = worst.max(-*y),
            Relation::Eq => {}
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        value,
        duals,
        duality_gap: (value - dual_value).abs(),
        dual_infeasibility: worst,
    })
}
