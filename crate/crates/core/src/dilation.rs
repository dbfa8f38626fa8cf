//! Kellerer dilations onto a finite target set, adapted to supermartingales:
//! a point with no target above it moves down to the nearest target below.

use crate::coupling::DiscreteCoupling;
use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::tol;

/// Finite, strictly increasing, non-empty set of target points.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSet {
    points: Vec<f64>,
}

impl TargetSet {
    pub fn new(points: Vec<f64>) -> Result<TargetSet> {
        if points.is_empty() || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTargetSet);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteInput("target set".into()));
        }
        Ok(TargetSet { points })
    }

    /// The support of a non-empty measure.
    pub fn support_of(m: &DiscreteMeasure) -> Result<TargetSet> {
        TargetSet::new(m.positions())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn contains(&self, x: f64) -> bool {
        self.nearest_index(x).is_some()
    }

    fn nearest_index(&self, x: f64) -> Option<usize> {
        let i = self.points.partition_point(|&p| p < x);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.points.len())
            .find(|&j| tol::same_position(self.points[j], x))
    }
}

/// The two-point law `χ_{c,x,d}`: mean-preserving split of `x` between `c`
/// and `d`, the point mass at `x` when `c = d = x`, or the point mass at `c`
/// when `d = +∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPointKernel {
    pub source: f64,
    pub lower: f64,
    /// `+∞` encodes the pure down-move.
    pub upper: f64,
}

impl TwoPointKernel {
    pub fn stay(x: f64) -> TwoPointKernel {
        TwoPointKernel {
            source: x,
            lower: x,
            upper: x,
        }
    }

    pub fn is_stay(&self) -> bool {
        self.lower == self.upper
    }

    pub fn is_down_move(&self) -> bool {
        self.upper == f64::INFINITY
    }

    /// `(position, probability)` pairs with positive probability.
    pub fn weights(&self) -> Vec<(f64, f64)> {
        let (c, x, d) = (self.lower, self.source, self.upper);
        if d == f64::INFINITY || c >= d {
            vec![(c, 1.0)]
        } else {
            let p_low = (d - x) / (d - c);
            [(c, p_low), (d, 1.0 - p_low)]
                .into_iter()
                .filter(|&(_, p)| p > 0.0)
                .collect()
        }
    }

    pub fn mean(&self) -> f64 {
        self.weights().iter().map(|(y, p)| y * p).sum()
    }
}

/// `D_T(x, ·)`.
pub fn dilate(targets: &TargetSet, x: f64) -> Result<TwoPointKernel> {
    if let Some(i) = targets.nearest_index(x) {
        // Snap to the target point so the consumed atom is the one in T.
        let p = targets.points()[i];
        return Ok(TwoPointKernel {
            source: x,
            lower: p,
            upper: p,
        });
    }
    if x < targets.min() {
        return Err(Error::BelowSupport {
            x,
            min: targets.min(),
        });
    }
    let pts = targets.points();
    let i = pts.partition_point(|&p| p <= x);
    Ok(TwoPointKernel {
        source: x,
        lower: pts[i - 1],
        upper: pts.get(i).copied().unwrap_or(f64::INFINITY),
    })
}

fn check_support(mu: &DiscreteMeasure, targets: &TargetSet) -> Result<()> {
    match mu.min_position() {
        Some(x) if x < targets.min() && !tol::same_position(x, targets.min()) => {
            Err(Error::BelowSupport {
                x,
                min: targets.min(),
            })
        }
        _ => Ok(()),
    }
}

/// Hitting projection `μD_T`.
pub fn hitting_projection(mu: &DiscreteMeasure, targets: &TargetSet) -> Result<DiscreteMeasure> {
    Ok(hitting_coupling(mu, targets)?.second_marginal())
}

/// Hitting coupling `π(dx, dy) = μ(dx) D_T(x, dy)`.
pub fn hitting_coupling(mu: &DiscreteMeasure, targets: &TargetSet) -> Result<DiscreteCoupling> {
    check_support(mu, targets)?;
    let mut cells = Vec::new();
    for a in mu.atoms() {
        let k = dilate(targets, a.x)?;
        for (y, p) in k.weights() {
            cells.push((a.x, y, a.w * p));
        }
    }
    Ok(DiscreteCoupling::new(cells))
}
