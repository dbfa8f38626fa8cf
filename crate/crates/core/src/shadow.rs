//! The supermartingale shadow `S^ν(μ)`: the smallest measure in
//! convex-decreasing order among all `θ ≤ ν` with `μ ≤_cd θ`.
//!
//! The shadow is read off a convex hull: its put potential is
//! `P_ν − (P_ν − P_μ)^c`. The mean it loses relative to `μ` is the defect
//! constant `sup_k {C_μ(k) − C_ν(k)}`.

use crate::error::{Error, Result};
use crate::measures::{order_check, DiscreteMeasure, OrderRelation};
use crate::pwl::PiecewiseLinear;
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowResult {
    pub shadow: DiscreteMeasure,
    /// `mean(μ) − mean(shadow)`, equal to the defect constant of `(μ, ν)`.
    pub defect: f64,
    /// The hull `(P_ν − P_μ)^c`.
    pub hull: PiecewiseLinear,
}

pub(crate) fn require_pcd(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    if order_check(OrderRelation::Pcd, mu, nu) {
        Ok(())
    } else {
        Err(Error::OrderViolation(
            "first measure is not below the second in positive convex-decreasing order".into(),
        ))
    }
}

/// Shadow of `mu` in `nu`. Requires `mu ≤_pcd nu`.
pub fn shadow(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<ShadowResult> {
    require_pcd(mu, nu)?;
    Ok(shadow_unchecked(mu, nu))
}

/// Same as [`shadow`] without the order check. Inputs violating the order by
/// float noise still yield a non-negative measure `≤ nu`.
pub(crate) fn shadow_unchecked(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> ShadowResult {
    let p_nu = nu.put();
    let gap = PiecewiseLinear::combine(1.0, &p_nu, -1.0, &mu.put());
    // Tail slopes are 0 and mass(ν) − mass(μ) ≥ 0, so the hull exists.
    let hull = gap.convex_hull().unwrap_or_else(|_| {
        let flat = PiecewiseLinear::from_parts(
            gap.breakpoints().to_vec(),
            gap.values().to_vec(),
            0.0,
            0.0,
        );
        flat.convex_hull().expect("flat tails always admit a hull")
    });
    // P_ν − hull has its slope jumps at atoms of ν only (the hull never kinks
    // at a concave corner of the gap). A kink may sit at a μ position within
    // rounding of the ν atom, so kinks are snapped to the nearest ν atom.
    let positions = nu.positions();
    let mut jumps = vec![0.0; positions.len()];
    let slopes = hull.segment_slopes();
    if !hull.is_affine() {
        for (i, &b) in hull.breakpoints().iter().enumerate() {
            let k = positions.partition_point(|&p| p < b);
            let near = [k.checked_sub(1), Some(k)]
                .into_iter()
                .flatten()
                .filter(|&j| j < positions.len())
                .min_by(|&p, &q| {
                    (positions[p] - b)
                        .abs()
                        .total_cmp(&(positions[q] - b).abs())
                });
            if let Some(j) = near.filter(|&j| tol::same_position(positions[j], b)) {
                jumps[j] += slopes[i + 1] - slopes[i];
            }
        }
    }
    let raw: Vec<(f64, f64)> = nu
        .atoms()
        .iter()
        .zip(&jumps)
        .map(|(a, jump)| (a.x, (a.w - jump).clamp(0.0, a.w)))
        .collect();
    let shadow = DiscreteMeasure::from_derived(raw);
    let defect = (mu.mean() - shadow.mean()).max(0.0);
    ShadowResult {
        shadow,
        defect,
        hull,
    }
}

/// Defect constant `sup_k {C_η(k) − C_χ(k)}`. Requires `eta ≤_pcd chi`.
pub fn defect_constant(eta: &DiscreteMeasure, chi: &DiscreteMeasure) -> Result<f64> {
    require_pcd(eta, chi)?;
    let diff = PiecewiseLinear::combine(1.0, &eta.call(), -1.0, &chi.call());
    // Left tail slope is mass(χ) − mass(η) ≥ 0 and the right tail is flat at 0.
    let sup = diff.values().iter().copied().fold(0.0_f64, f64::max);
    let eps = crate::measures::potential_slack(eta, chi);
    Ok(if sup <= eps { 0.0 } else { sup })
}

/// Left-most measure `θ ≤ χ` of mass `mass(eta)`: `χ` filled from the left.
pub fn leftmost(eta: &DiscreteMeasure, chi: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    leftmost_of_mass(eta.mass(), chi)
}

pub fn leftmost_of_mass(mass: f64, chi: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    let available = chi.mass();
    if mass > available + tol::get().mass * available.max(1.0) {
        return Err(Error::MassExceeds {
            needed: mass,
            available,
        });
    }
    let mut left = mass;
    let mut raw = Vec::new();
    for a in chi.atoms() {
        if left <= 0.0 {
            break;
        }
        let take = a.w.min(left);
        raw.push((a.x, take));
        left -= take;
    }
    Ok(DiscreteMeasure::from_derived(raw))
}
