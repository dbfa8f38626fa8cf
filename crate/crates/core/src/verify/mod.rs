//! Independent oracles: linear programs over supermartingale transport
//! polytopes, the shadow put-value program, random instances and the
//! optimality trial runner.

mod cost;
pub mod lp;
mod random;

pub use cost::{spence_mirrlees_cost, CostFunction};
pub use lp::{LinearProgram, LpSolution, LpStatus, Relation};
pub use random::{random_instance, random_source, random_target, rng_for, InstanceKind};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::{pi_decreasing, DiscreteCoupling};
use crate::error::{Error, Result};
use crate::measures::{merge_positions, order_check, DiscreteMeasure, OrderRelation};
use crate::shadow::require_pcd;

/// Largest number of cells `atoms(μ)·atoms(ν)` accepted by [`lp_min_cost`].
pub const DEFAULT_CELL_CAP: usize = 2500;

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub value: f64,
    pub coupling: DiscreteCoupling,
    pub duality_gap: f64,
    pub dual_infeasibility: f64,
}

/// Minimises `∫c dπ` over supermartingale couplings of `mu` and `nu`.
pub fn lp_min_cost(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostFunction,
) -> Result<LpResult> {
    let c: Vec<Vec<f64>> = mu
        .atoms()
        .iter()
        .map(|a| nu.atoms().iter().map(|b| cost.eval(a.x, b.x)).collect())
        .collect();
    lp_min_cost_matrix(mu, nu, &c, DEFAULT_CELL_CAP)
}

/// Same as [`lp_min_cost`] with an explicit cost matrix indexed by the atoms
/// of `mu` and `nu`.
pub fn lp_min_cost_matrix(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &[Vec<f64>],
    cap: usize,
) -> Result<LpResult> {
    let (n, m) = (mu.len(), nu.len());
    if n * m > cap {
        return Err(Error::SizeCap { size: n * m, cap });
    }
    let (xs, ys) = (mu.atoms(), nu.atoms());
    let var = |i: usize, j: usize| i * m + j;
    let mut lp = LinearProgram::new((0..n * m).map(|k| cost[k / m][k % m]).collect());
    for (i, a) in xs.iter().enumerate() {
        let mut row = vec![0.0; n * m];
        for j in 0..m {
            row[var(i, j)] = 1.0;
        }
        lp.add_row(row, Relation::Eq, a.w);
    }
    for (j, b) in ys.iter().enumerate() {
        let mut row = vec![0.0; n * m];
        for i in 0..n {
            row[var(i, j)] = 1.0;
        }
        lp.add_row(row, Relation::Eq, b.w);
    }
    // Σ_j y_j π_ij ≤ x_i μ_i, written with y_j − x_i to keep the rows centred.
    for (i, a) in xs.iter().enumerate() {
        let mut row = vec![0.0; n * m];
        for (j, b) in ys.iter().enumerate() {
            row[var(i, j)] = b.x - a.x;
        }
        lp.add_row(row, Relation::Le, 0.0);
    }
    let sol = lp::solve(&lp)?;
    let coupling = match sol.status {
        LpStatus::Optimal => DiscreteCoupling::new(
            (0..n * m)
                .map(|k| (xs[k / m].x, ys[k % m].x, sol.x[k]))
                .collect(),
        ),
        _ => DiscreteCoupling::default(),
    };
    Ok(LpResult {
        status: sol.status,
        value: sol.value,
        coupling,
        duality_gap: sol.duality_gap,
        dual_infeasibility: sol.dual_infeasibility,
    })
}

/// Minimum of `P_θ(k)` over `θ ≤ ν` with `mass(θ) = mass(μ)` and
/// `P_θ ≥ P_μ`, which is `P` of the shadow at `k`. Requires `mu ≤_pcd nu`.
pub fn shadow_put_oracle(mu: &DiscreteMeasure, nu: &DiscreteMeasure, k: f64) -> Result<f64> {
    require_pcd(mu, nu)?;
    let ys = nu.atoms();
    let m = ys.len();
    let put = |strike: f64| -> Vec<f64> { ys.iter().map(|b| (strike - b.x).max(0.0)).collect() };
    let mut lp = LinearProgram::new(put(k));
    for (j, b) in ys.iter().enumerate() {
        let mut row = vec![0.0; m];
        row[j] = 1.0;
        lp.add_row(row, Relation::Le, b.w);
    }
    lp.add_row(vec![1.0; m], Relation::Eq, mu.mass());
    let p_mu = mu.put();
    // Both puts are affine with equal slope beyond the last strike, so the
    // breakpoints suffice.
    for strike in merge_positions(mu, nu) {
        lp.add_row(put(strike), Relation::Ge, p_mu.eval(strike));
    }
    let sol = lp::solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        status => Err(Error::InternalInvariant(format!(
            "shadow put program is {status:?}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub trials: usize,
    pub failures: Vec<TrialFailure>,
    /// Largest `|∫c dπ^D − LP value| / (1 + |LP value|)`.
    pub max_value_gap: f64,
    pub max_cell_gap: f64,
    pub max_duality_gap: f64,
}

impl OptimalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub const VALUE_GAP_TOL: f64 = 1e-7;
pub const CELL_GAP_TOL: f64 = 1e-6;
pub const DUALITY_GAP_TOL: f64 = 1e-9;

struct TrialOutcome {
    value_gap: f64,
    cell_gap: f64,
    duality_gap: f64,
    failure: Option<String>,
}

fn optimality_trial(seed: u64, max_atoms: usize, cost: &CostFunction) -> Result<TrialOutcome> {
    let mut rng = rng_for(seed);
    let n = rng.gen_range(1..=max_atoms);
    let m = rng.gen_range(1..=max_atoms);
    let (mu, nu) = random_instance(rng.gen(), n, m, InstanceKind::GeneralCd);
    let pd = pi_decreasing(&mu, &nu)?;
    let lp = lp_min_cost(&mu, &nu, cost)?;
    if lp.status != LpStatus::Optimal {
        return Ok(TrialOutcome {
            value_gap: f64::NAN,
            cell_gap: f64::NAN,
            duality_gap: f64::NAN,
            failure: Some(format!("LP status {:?} on a feasible instance", lp.status)),
        });
    }
    let value = pd.coupling.integrate(|x, y| cost.eval(x, y));
    let value_gap = (value - lp.value).abs() / (1.0 + lp.value.abs());
    let cell_gap = pd.coupling.max_cell_diff(&lp.coupling);
    let mut problems = Vec::new();
    if value_gap > VALUE_GAP_TOL {
        problems.push(format!("value gap {value_gap:e}"));
    }
    // Uniqueness, and with it the cell comparison, needs a strict cost.
    if cost.is_strict() && cell_gap > CELL_GAP_TOL {
        problems.push(format!("cell gap {cell_gap:e}"));
    }
    if lp.duality_gap > DUALITY_GAP_TOL {
        problems.push(format!("duality gap {:e}", lp.duality_gap));
    }
    Ok(TrialOutcome {
        value_gap,
        cell_gap,
        duality_gap: lp.duality_gap,
        failure: (!problems.is_empty())
            .then(|| format!("mu = {mu}, nu = {nu}: {}", problems.join(", "))),
    })
}

/// Compares `π^D` with the LP minimiser of `cost` on random instances with
/// up to `max_atoms` atoms per marginal. Trials run in parallel; trial `t`
/// uses seed `seed + t`.
pub fn optimality_trials(
    trials: usize,
    seed: u64,
    max_atoms: usize,
    cost: &CostFunction,
) -> OptimalityReport {
    let outcomes: Vec<(usize, u64, Result<TrialOutcome>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = seed.wrapping_add(t as u64);
            (t, s, optimality_trial(s, max_atoms.max(1), cost))
        })
        .collect();
    let mut report = OptimalityReport {
        trials,
        failures: Vec::new(),
        max_value_gap: 0.0,
        max_cell_gap: 0.0,
        max_duality_gap: 0.0,
    };
    for (trial, seed, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                report.max_value_gap = report.max_value_gap.max(o.value_gap);
                report.max_cell_gap = report.max_cell_gap.max(o.cell_gap);
                report.max_duality_gap = report.max_duality_gap.max(o.duality_gap);
                if let Some(detail) = o.failure {
                    report.failures.push(TrialFailure {
                        trial,
                        seed,
                        detail,
                    });
                }
            }
            Err(e) => report.failures.push(TrialFailure {
                trial,
                seed,
                detail: e.to_string(),
            }),
        }
    }
    report
}

/// Whether the LP agrees with the order test on feasibility.
pub fn feasibility_agrees(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<bool> {
    let lp = lp_min_cost(mu, nu, &CostFunction::default())?;
    Ok((lp.status == LpStatus::Optimal) == order_check(OrderRelation::Cd, mu, nu))
}
