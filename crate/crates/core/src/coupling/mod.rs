//! Supermartingale couplings: finitely supported plans, lifts of the source
//! measure, the event-driven lifted shadow coupling, the decreasing coupling
//! `π^D`, its supporting functions `R`/`S`, the irreducible decomposition and
//! the monotonicity audits.

mod audit;
mod decompose;
mod engine;
mod lift;
mod rs;

pub use audit::{
    barrier_audit, monotonicity_audit, rs_audit, supermartingale_audit, MonotonicityReport,
    Violation,
};
pub use decompose::{irreducible_decompose, Component, ComponentKind, Decomposition, Interval};
pub use engine::{
    c_curve, lifted_shadow_coupling, pi_decreasing, project, CCurve, Flow, FlowSegment,
    LiftedCoupling, PiDecreasing,
};
pub use lift::{make_lift, mu_cumulative, LiftKind, LiftSegment, LiftSpec};
pub use rs::{decreasing_source, e_function, rs_at, rs_curve, RsPoint};

use crate::measures::DiscreteMeasure;
use crate::tol;

/// A finitely supported measure on pairs `(x, y)`.
///
/// Cells are sorted by `(x, y)`, coincident cells merged and negligible
/// weights dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiscreteCoupling {
    cells: Vec<(f64, f64, f64)>,
}

impl DiscreteCoupling {
    pub fn new(mut raw: Vec<(f64, f64, f64)>) -> DiscreteCoupling {
        raw.retain(|c| c.2 > 0.0);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let total: f64 = raw.iter().map(|c| c.2).sum();
        let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(raw.len());
        for (x, y, w) in raw {
            if let Some(c) = cells
                .iter_mut()
                .rev()
                .take_while(|c| tol::same_position(c.0, x))
                .find(|c| tol::same_position(c.1, y))
            {
                c.2 += w;
            } else {
                cells.push((x, y, w));
            }
        }
        let floor = tol::get().mass * total;
        cells.retain(|c| c.2 > floor);
        DiscreteCoupling { cells }
    }

    pub fn cells(&self) -> &[(f64, f64, f64)] {
        &self.cells
    }

    pub fn mass(&self) -> f64 {
        self.cells.iter().map(|c| c.2).sum()
    }

    pub fn first_marginal(&self) -> DiscreteMeasure {
        DiscreteMeasure::from_derived(self.cells.iter().map(|c| (c.0, c.2)).collect())
    }

    pub fn second_marginal(&self) -> DiscreteMeasure {
        DiscreteMeasure::from_derived(self.cells.iter().map(|c| (c.1, c.2)).collect())
    }

    /// Weight of the cell `(x, y)` (0 if absent).
    pub fn weight(&self, x: f64, y: f64) -> f64 {
        self.cells
            .iter()
            .filter(|c| tol::same_position(c.0, x) && tol::same_position(c.1, y))
            .map(|c| c.2)
            .sum()
    }

    /// Source positions with their row mass and row first moment `Σ y·π(x, y)`.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for &(x, y, w) in &self.cells {
            match rows.last_mut() {
                Some(r) if tol::same_position(r.0, x) => {
                    r.1 += w;
                    r.2 += y * w;
                }
                _ => rows.push((x, w, y * w)),
            }
        }
        rows
    }

    /// Cells whose source satisfies `keep`.
    pub fn restrict_sources(&self, keep: impl Fn(f64) -> bool) -> DiscreteCoupling {
        DiscreteCoupling {
            cells: self.cells.iter().filter(|c| keep(c.0)).copied().collect(),
        }
    }

    /// `∫ cost dπ`.
    pub fn integrate(&self, cost: impl Fn(f64, f64) -> f64) -> f64 {
        self.cells.iter().map(|&(x, y, w)| cost(x, y) * w).sum()
    }

    /// Largest cell-wise weight difference.
    pub fn max_cell_diff(&self, other: &DiscreteCoupling) -> f64 {
        let a = self
            .cells
            .iter()
            .map(|&(x, y, w)| (w - other.weight(x, y)).abs());
        let b = other
            .cells
            .iter()
            .map(|&(x, y, w)| (w - self.weight(x, y)).abs());
        a.chain(b).fold(0.0, f64::max)
    }
}
