//! Splitting `(μ, ν)` at the zeros of `D = P_ν − P_μ`.
//!
//! Every supermartingale coupling keeps mass inside the pieces: identity
//! stretches where `D ≡ 0`, martingale components between zeros below `x*`,
//! and one supermartingale component on `(x*, ∞)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{order_check, potential_slack, DiscreteMeasure, OrderRelation};
use crate::pwl::merge_breakpoints;
use crate::pwl::PiecewiseLinear;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentKind {
    Supermartingale,
    Martingale,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed {
            x >= self.lo
        } else {
            x > self.lo
        };
        let below = if self.hi_closed {
            x <= self.hi
        } else {
            x < self.hi
        };
        above && below
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub interval: Interval,
    pub kind: ComponentKind,
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// `+∞` when the means agree; `−∞` when `D > 0` on all of `(ℓ_ν, ∞)` and
    /// no mass sits at `ℓ_ν`.
    pub x_star: f64,
    pub components: Vec<Component>,
    /// Zeros of `D` among the atoms of `μ` and `ν`, up to `x*`.
    pub zeros: Vec<f64>,
}

/// Requires `mu ≤_cd nu`.
pub fn irreducible_decompose(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Decomposition> {
    if !order_check(OrderRelation::Cd, mu, nu) {
        return Err(Error::OrderViolation(
            "source is not below target in convex-decreasing order".into(),
        ));
    }
    let pts = merge_breakpoints(&mu.positions(), &nu.positions());
    let n = pts.len();
    let d = PiecewiseLinear::combine(1.0, &nu.put(), -1.0, &mu.put());
    let eps = potential_slack(mu, nu);
    let zero: Vec<bool> = pts.iter().map(|&x| d.eval(x) <= eps).collect();
    // D equals mean(μ) − mean(ν) to the right of the last atom.
    let equal_means = zero[n - 1];
    let top = if equal_means {
        n - 1
    } else {
        (0..n).rev().find(|&i| zero[i]).unwrap_or(0)
    };
    let x_star = if equal_means {
        f64::INFINITY
    } else if top == 0 && mu.weight_at(pts[0]) == 0.0 {
        f64::NEG_INFINITY
    } else {
        pts[top]
    };

    let mut components = Vec::new();
    let mut zeros = Vec::new();
    let mut accounted = DiscreteMeasure::empty();
    let mut i = 0;
    let mut prev_zero: Option<usize> = None;
    while i <= top && x_star > f64::NEG_INFINITY {
        if !zero[i] {
            i += 1;
            continue;
        }
        if let Some(p) = prev_zero {
            if p + 1 < i {
                let c = martingale_component(mu, nu, pts[p], pts[i]);
                accounted = accounted.add(&c.nu);
                components.push(c);
            }
        }
        let start = i;
        while i < top && zero[i + 1] {
            i += 1;
        }
        zeros.extend_from_slice(&pts[start..=i]);
        let part = between(mu, pts[start], pts[i], true);
        if !part.is_empty() {
            accounted = accounted.add(&part);
            components.push(Component {
                interval: Interval {
                    lo: pts[start],
                    hi: pts[i],
                    lo_closed: true,
                    hi_closed: true,
                },
                kind: ComponentKind::Identity,
                mu: part.clone(),
                nu: part,
            });
        }
        prev_zero = Some(i);
        i += 1;
    }

    let slack = 1e-9 * nu.mass().max(1.0);
    let rest: Vec<(f64, f64)> = pts
        .iter()
        .map(|&x| (x, nu.weight_at(x) - accounted.weight_at(x)))
        .collect();
    if let Some(&(x, w)) = rest.iter().find(|&&(_, w)| w < -slack) {
        return Err(Error::DecompositionFailure(format!(
            "components overuse the target at {x} by {}",
            -w
        )));
    }
    let nu_rest =
        DiscreteMeasure::from_derived(rest.into_iter().filter(|&(_, w)| w > slack).collect());

    if x_star < f64::INFINITY {
        let mu_0 = between(mu, x_star, f64::INFINITY, false);
        if !order_check(OrderRelation::Cd, &mu_0, &nu_rest) {
            return Err(Error::DecompositionFailure(
                "supermartingale component is not in convex-decreasing order".into(),
            ));
        }
        components.push(Component {
            interval: Interval {
                lo: x_star,
                hi: f64::INFINITY,
                lo_closed: false,
                hi_closed: false,
            },
            kind: ComponentKind::Supermartingale,
            mu: mu_0,
            nu: nu_rest,
        });
    } else if !nu_rest.is_empty() {
        return Err(Error::DecompositionFailure(format!(
            "target mass {} left over with equal means",
            nu_rest.mass()
        )));
    }

    for c in &components {
        if c.kind == ComponentKind::Martingale && !order_check(OrderRelation::C, &c.mu, &c.nu) {
            return Err(Error::DecompositionFailure(format!(
                "martingale component on ({}, {}) is not in convex order",
                c.interval.lo, c.interval.hi
            )));
        }
    }
    Ok(Decomposition {
        x_star,
        components,
        zeros,
    })
}

/// Atoms in `[a, b]` or `(a, b)`, with endpoints matched up to rounding.
fn between(m: &DiscreteMeasure, a: f64, b: f64, closed: bool) -> DiscreteMeasure {
    let (lo, hi) = if closed {
        (a - tol_at(a), b + tol_at(b))
    } else {
        (a + tol_at(a), b - tol_at(b))
    };
    m.restrict(lo, hi, closed, closed)
}

fn tol_at(x: f64) -> f64 {
    if x.is_finite() {
        tol::get().position * (1.0 + x.abs())
    } else {
        0.0
    }
}

/// `ν` on `(a, b)` plus fragments at `a` and `b` matching the mass and mean
/// of `μ` on `(a, b)`.
fn martingale_component(mu: &DiscreteMeasure, nu: &DiscreteMeasure, a: f64, b: f64) -> Component {
    let mu_k = between(mu, a, b, false);
    let inner = between(nu, a, b, false);
    let dm = mu_k.mass() - inner.mass();
    let dmean = mu_k.mean() - inner.mean();
    let w_b = ((dmean - a * dm) / (b - a)).max(0.0);
    let w_a = (dm - w_b).max(0.0);
    let nu_k = inner.add(&DiscreteMeasure::from_derived(vec![(a, w_a), (b, w_b)]));
    Component {
        interval: Interval {
            lo: a,
            hi: b,
            lo_closed: false,
            hi_closed: false,
        },
        kind: ComponentKind::Martingale,
        mu: mu_k,
        nu: nu_k,
    }
}
