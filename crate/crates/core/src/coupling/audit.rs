//! Cell-level audits of couplings: supermartingale rows, the monotonicity
//! that characterises `π^D`, the barriers at zeros of `D`, and the shape of
//! the supporting functions `R`/`S`.

use serde::Serialize;

use super::decompose::Decomposition;
use super::engine::PiDecreasing;
use super::rs::rs_at;
use super::DiscreteCoupling;
use crate::error::Result;
use crate::measures::{potential_slack, DiscreteMeasure};
use crate::pwl::PiecewiseLinear;
use crate::tol;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(rule: &'static str, detail: String) -> Violation {
        Violation { rule, detail }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub second_order: Vec<Violation>,
    pub first_order: Vec<Violation>,
}

impl MonotonicityReport {
    pub fn is_clean(&self) -> bool {
        self.second_order.is_empty() && self.first_order.is_empty()
    }
}

fn position_slack(pi: &DiscreteCoupling) -> f64 {
    let scale = pi
        .cells()
        .iter()
        .fold(1.0_f64, |m, c| m.max(c.0.abs()).max(c.1.abs()));
    tol::get().position * scale
}

/// Checks right-monotonicity of second order and left-monotonicity of
/// first order relative to the source set `m`.
///
/// Second order: for cells `(x, y1)`, `(x, y2)`, `(x', y')` with `x' < x`,
/// `y'` must avoid `(y1, y2)`. It suffices to test `y'` against the extreme
/// targets of each row. First order: for `x1 < x2` with `x2 ∉ m`,
/// `y1 ≤ y2`.
pub fn monotonicity_audit(pi: &DiscreteCoupling, m: &[f64]) -> MonotonicityReport {
    let eps = position_slack(pi);
    let cells = pi.cells();
    let mut report = MonotonicityReport::default();

    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for &(x, y, _) in cells {
        match rows.last_mut() {
            Some(r) if r.0 == x => {
                r.1 = r.1.min(y);
                r.2 = r.2.max(y);
            }
            _ => rows.push((x, y, y)),
        }
    }
    for &(x, lo, hi) in &rows {
        for &(xp, yp, _) in cells.iter().take_while(|c| c.0 < x) {
            if yp > lo + eps && yp < hi - eps {
                report.second_order.push(Violation::new(
                    "second_order",
                    format!("({xp}, {yp}) lies inside ({lo}, {hi}) of source {x}"),
                ));
            }
        }
    }

    let in_m = |x: f64| m.iter().any(|&p| tol::same_position(p, x));
    for &(x2, y2, _) in cells {
        if in_m(x2) {
            continue;
        }
        for &(x1, y1, _) in cells.iter().take_while(|c| c.0 < x2) {
            if y1 > y2 + eps {
                report.first_order.push(Violation::new(
                    "first_order",
                    format!("({x1}, {y1}) is above ({x2}, {y2})"),
                ));
            }
        }
    }
    report
}

/// Rows whose barycentre exceeds the source: `Σ_y y·π(x, y) > x·μ(x)`.
pub fn supermartingale_audit(pi: &DiscreteCoupling) -> Vec<Violation> {
    let eps = position_slack(pi).max(1e-12);
    pi.rows()
        .into_iter()
        .filter(|&(x, w, first)| first > x * w + eps * w.max(1e-300))
        .map(|(x, w, first)| {
            Violation::new(
                "supermartingale",
                format!("row {x} has mean {} above its source", first / w),
            )
        })
        .collect()
}

/// Cells moving mass strictly across a zero of `D` at or below `x*`.
pub fn barrier_audit(pi: &DiscreteCoupling, dec: &Decomposition) -> Vec<Violation> {
    let eps = position_slack(pi);
    let mut out = Vec::new();
    for &(x, y, w) in pi.cells() {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        for &z in &dec.zeros {
            if z > lo + eps && z < hi - eps {
                out.push(Violation::new(
                    "barrier",
                    format!("cell ({x}, {y}) with weight {w} crosses the zero {z}"),
                ));
            }
        }
    }
    out
}

/// Shape checks on `R`/`S` over the event boundaries of `π^D` and the
/// midpoints between them, plus agreement with the engine's dilation
/// endpoints inside segments where the source lies strictly inside
/// `{D > 0}` and outside `T(u)`.
///
/// The monotonicity checks are: `R ≤ G ≤ S`; `R` non-increasing; for
/// `u < v`, `S(v) ∉ (R(u), S(u))`; and where `S(u) = ∞`, every later
/// target set lies at or below `R(u)`.
pub fn rs_audit(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    pd: &PiDecreasing,
) -> Result<Vec<Violation>> {
    let scale = mu.position_scale().max(nu.position_scale());
    let eps = 1e-9 * scale;
    let d = PiecewiseLinear::combine(1.0, &nu.put(), -1.0, &mu.put());
    let d_eps = potential_slack(mu, nu);
    let segments = pd.lifted.segments();

    let mut pts = Vec::new();
    let mut out = Vec::new();
    for (k, seg) in segments.iter().enumerate() {
        for (u, interior) in [(seg.lo, false), (0.5 * (seg.lo + seg.hi), true)] {
            let p = rs_at(mu, nu, u)?;
            if interior && d.eval(p.g) > d_eps {
                let t = &seg.targets;
                if !t.iter().any(|&y| tol::same_position(y, p.g)) {
                    let below = t
                        .iter()
                        .copied()
                        .filter(|&y| y <= p.g)
                        .fold(f64::NEG_INFINITY, f64::max);
                    let above = t
                        .iter()
                        .copied()
                        .filter(|&y| y >= p.g)
                        .fold(f64::INFINITY, f64::min);
                    let same = |a: f64, b: f64| a == b || (a - b).abs() <= eps;
                    if !same(p.r, below) || !same(p.s, above) {
                        out.push(Violation::new(
                            "engine",
                            format!(
                                "u = {u}: hull gives ({}, {}), dilation gives ({below}, {above})",
                                p.r, p.s
                            ),
                        ));
                    }
                }
            }
            pts.push((k, p));
        }
    }

    for (i, &(_, p)) in pts.iter().enumerate() {
        if !(p.r <= p.g + eps && p.g <= p.s + eps) {
            out.push(Violation::new(
                "ordering",
                format!("u = {}: R = {}, G = {}, S = {}", p.u, p.r, p.g, p.s),
            ));
        }
        for &(kv, q) in &pts[i + 1..] {
            if q.r > p.r + eps {
                out.push(Violation::new(
                    "r_decreasing",
                    format!("R({}) = {} < R({}) = {}", p.u, p.r, q.u, q.r),
                ));
            }
            if q.s > p.r + eps && q.s < p.s - eps {
                out.push(Violation::new(
                    "s_avoids",
                    format!(
                        "S({}) = {} inside ({}, {}) at u = {}",
                        q.u, q.s, p.r, p.s, p.u
                    ),
                ));
            }
            if p.s == f64::INFINITY && q.u > p.u {
                let sup_t = segments[kv]
                    .targets
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max);
                if sup_t > p.r + eps {
                    out.push(Violation::new(
                        "down_targets",
                        format!("sup T({}) = {sup_t} above R({}) = {}", q.u, p.u, p.r),
                    ));
                }
            }
        }
    }
    Ok(out)
}
