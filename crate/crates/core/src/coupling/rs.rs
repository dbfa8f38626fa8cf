//! The supporting functions `R` and `S` of the decreasing coupling, read off
//! the convex hull of `E_u = D + C_μ − C_{μ_u}` at `G(1 − u)`.

use serde::Serialize;

use super::engine::pi_decreasing;
use super::lift::mu_cumulative;
use crate::error::{Error, Result};
use crate::measures::{masses_equal, order_check, DiscreteMeasure, OrderRelation, Side};
use crate::pwl::PiecewiseLinear;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RsPoint {
    pub u: f64,
    /// `G(1 − u)`, the source emitted by the decreasing lift at `u`.
    pub g: f64,
    pub r: f64,
    pub s: f64,
    pub phi: f64,
}

fn require_cd(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    if order_check(OrderRelation::Cd, mu, nu) {
        Ok(())
    } else {
        Err(Error::OrderViolation(
            "source is not below target in convex-decreasing order".into(),
        ))
    }
}

/// `G(1 − u)` with the left-continuous quantile, so that `[lo, hi)` of the
/// decreasing lift maps to the segment's atom. At `u = 1` the lowest atom.
pub fn decreasing_source(mu: &DiscreteMeasure, u: f64) -> Result<f64> {
    if !masses_equal(mu.mass(), 1.0) {
        return Err(Error::MassNotOne(mu.mass()));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfRange {
            what: "u",
            value: u,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if u == 1.0 {
        return Ok(mu.min_position().unwrap());
    }
    mu.quantile(1.0 - u, Side::Left)
}

/// `E_u`. Requires `mu ≤_cd nu` and `0 ≤ u ≤ 1`.
pub fn e_function(mu: &DiscreteMeasure, nu: &DiscreteMeasure, u: f64) -> Result<PiecewiseLinear> {
    require_cd(mu, nu)?;
    e_unchecked(mu, nu, u)
}

fn e_unchecked(mu: &DiscreteMeasure, nu: &DiscreteMeasure, u: f64) -> Result<PiecewiseLinear> {
    let mu_u = mu_cumulative(mu, u)?;
    let d = PiecewiseLinear::combine(1.0, &nu.put(), -1.0, &mu.put());
    let calls = PiecewiseLinear::combine(1.0, &mu.call(), -1.0, &mu_u.call());
    Ok(PiecewiseLinear::combine(1.0, &d, 1.0, &calls))
}

/// `(R(u), S(u), φ(u))` together with `G(1 − u)`.
pub fn rs_at(mu: &DiscreteMeasure, nu: &DiscreteMeasure, u: f64) -> Result<RsPoint> {
    require_cd(mu, nu)?;
    rs_unchecked(mu, nu, u)
}

fn rs_unchecked(mu: &DiscreteMeasure, nu: &DiscreteMeasure, u: f64) -> Result<RsPoint> {
    let g = decreasing_source(mu, u)?;
    let hull = e_unchecked(mu, nu, u)?.convex_hull()?;
    // A pruned affine hull keeps a single nominal breakpoint that is not a kink.
    let bx: &[f64] = if hull.is_affine() {
        &[]
    } else {
        hull.breakpoints()
    };
    let n = bx.len();
    let slopes = hull.segment_slopes();
    let (r, s, phi) = match bx.iter().position(|&b| tol::same_position(b, g)) {
        Some(k) => (
            bx[k],
            bx.get(k + 1).copied().unwrap_or(f64::INFINITY),
            slopes[k + 1],
        ),
        None => {
            let j = bx.partition_point(|&b| b < g);
            let r = if j == 0 { f64::NEG_INFINITY } else { bx[j - 1] };
            let s = if j == n { f64::INFINITY } else { bx[j] };
            let phi = if n == 0 {
                hull.right_tail_slope()
            } else {
                slopes[j]
            };
            (r, s, phi)
        }
    };
    Ok(RsPoint { u, g, r, s, phi })
}

/// `R`/`S` on the event boundaries of `π^D` in `[0, 1)` and the midpoints
/// between them. `u = 1` is left out: there `E_1 = D` and its hull is
/// usually flat, so `R(1) = −∞` says nothing about the coupling.
pub fn rs_curve(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Vec<RsPoint>> {
    let pd = pi_decreasing(mu, nu)?;
    let b = pd.lifted.boundaries();
    let mut grid = Vec::with_capacity(2 * b.len());
    for w in b.windows(2) {
        grid.push(w[0]);
        grid.push(0.5 * (w[0] + w[1]));
    }
    grid.into_iter().map(|u| rs_unchecked(mu, nu, u)).collect()
}
