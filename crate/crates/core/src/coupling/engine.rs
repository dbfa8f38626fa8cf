//! Exact event-driven construction of lifted shadow couplings.
//!
//! Between events every source atom `x` of the current lift kernel is
//! dilated onto `T = supp(ν_rem)`, so each target point of `T` is consumed at
//! a constant rate. An event is the first exhaustion of a target atom or the
//! end of a lift segment; all atoms exhausted at that event leave `T`
//! together.

use serde::Serialize;

use super::lift::{make_lift, LiftKind, LiftSpec};
use super::DiscreteCoupling;
use crate::dilation::{dilate, TargetSet};
use crate::error::{Error, Result};
use crate::measures::{order_check, DiscreteMeasure, OrderRelation};
use crate::pwl::PiecewiseLinear;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Flow {
    pub source: f64,
    pub target: f64,
    /// Mass per unit of `u`.
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowSegment {
    pub lo: f64,
    pub hi: f64,
    /// Index of the lift segment this flow segment belongs to.
    pub lift_segment: usize,
    pub flows: Vec<Flow>,
    /// `T(u)` for `u` in `[lo, hi)`.
    pub targets: Vec<f64>,
    /// Cumulative target measure at `hi`.
    pub consumed: DiscreteMeasure,
}

impl FlowSegment {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    /// Mean of the source kernel (per unit `u`).
    pub fn source_mean(&self) -> f64 {
        self.flows.iter().map(|f| f.source * f.rate).sum()
    }

    /// Mean of the instantaneous target kernel (per unit `u`).
    pub fn target_mean(&self) -> f64 {
        self.flows.iter().map(|f| f.target * f.rate).sum()
    }

    /// Mean lost per unit of `u`.
    pub fn slope(&self) -> f64 {
        self.source_mean() - self.target_mean()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftedCoupling {
    lift: LiftSpec,
    segments: Vec<FlowSegment>,
}

impl LiftedCoupling {
    pub fn lift(&self) -> &LiftSpec {
        &self.lift
    }

    pub fn segments(&self) -> &[FlowSegment] {
        &self.segments
    }

    /// Event boundaries, starting at 0 and ending at 1.
    pub fn boundaries(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.segments.iter().map(|s| s.hi))
            .collect()
    }

    /// Index of the segment containing `u` (`[lo, hi)`, the last one closed).
    pub fn segment_index(&self, u: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&u) || self.segments.is_empty() {
            return None;
        }
        let i = self.segments.partition_point(|s| s.hi <= u);
        Some(i.min(self.segments.len() - 1))
    }

    /// Target measure consumed on `[0, u]`.
    pub fn consumed_at(&self, u: f64) -> Result<DiscreteMeasure> {
        let i = self.segment_index(u).ok_or(Error::OutOfRange {
            what: "u",
            value: u,
            lo: 0.0,
            hi: 1.0,
        })?;
        let seg = &self.segments[i];
        let mut raw: Vec<(f64, f64)> = match i {
            0 => Vec::new(),
            _ => self.segments[i - 1]
                .consumed
                .atoms()
                .iter()
                .map(|a| (a.x, a.w))
                .collect(),
        };
        let dt = (u - seg.lo).max(0.0);
        raw.extend(seg.flows.iter().map(|f| (f.target, f.rate * dt)));
        Ok(DiscreteMeasure::from_derived(raw))
    }
}

/// Runs the engine. Requires `mu ≤_cd nu` and `lift` to be a lift of `mu`.
pub fn lifted_shadow_coupling(
    lift: &LiftSpec,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<LiftedCoupling> {
    if !order_check(OrderRelation::Cd, mu, nu) {
        return Err(Error::OrderViolation(
            "source is not below target in convex-decreasing order".into(),
        ));
    }
    let gap = lift.source().max_atom_diff(mu);
    if gap > 1e-9 * mu.mass().max(1.0) {
        return Err(Error::InvalidLift(format!(
            "lift marginal differs from the source measure by {gap}"
        )));
    }
    run(lift, nu)
}

const U_EPS: f64 = 1e-12;

fn run(lift: &LiftSpec, nu: &DiscreteMeasure) -> Result<LiftedCoupling> {
    let pos = nu.positions();
    let init: Vec<f64> = nu.atoms().iter().map(|a| a.w).collect();
    let n = pos.len();
    let mut rem = init.clone();
    let mut alive = vec![true; n];
    let thresh = 1e-12 * nu.mass();
    let mut segments = Vec::new();

    for (li, seg) in lift.segments().iter().enumerate() {
        let mut u = seg.lo;
        while u < seg.hi {
            let idx: Vec<usize> = (0..n).filter(|&j| alive[j]).collect();
            if idx.is_empty() {
                return Err(Error::InternalInvariant(format!(
                    "target exhausted at u = {u}"
                )));
            }
            let points: Vec<f64> = idx.iter().map(|&j| pos[j]).collect();
            let targets = TargetSet::new(points.clone())?;

            let mut rates = vec![0.0; n];
            let mut flows = Vec::new();
            for a in seg.kernel.atoms() {
                let k = dilate(&targets, a.x).map_err(|e| {
                    Error::InternalInvariant(format!("dilation failed at u = {u}: {e}"))
                })?;
                for (y, p) in k.weights() {
                    let t = points.partition_point(|&q| q < y);
                    rates[idx[t]] += a.w * p;
                    flows.push(Flow {
                        source: a.x,
                        target: y,
                        rate: a.w * p,
                    });
                }
            }

            let mut first: Option<(usize, f64)> = None;
            for &j in &idx {
                if rates[j] > 0.0 {
                    let dt = rem[j] / rates[j];
                    if first.is_none_or(|(_, best)| dt < best) {
                        first = Some((j, dt));
                    }
                }
            }
            let (j_first, dt) = first.ok_or_else(|| {
                Error::InternalInvariant(format!("no target consumed at u = {u}"))
            })?;
            // An exhaustion within rounding of the segment end happens at the end.
            let at_end = u + dt >= seg.hi - U_EPS;
            let end = if at_end { seg.hi } else { u + dt };
            let du = end - u;

            for &j in &idx {
                rem[j] -= rates[j] * du;
            }
            if u + dt <= end {
                rem[j_first] = 0.0;
            }
            for &j in &idx {
                if rem[j] <= thresh {
                    rem[j] = 0.0;
                    alive[j] = false;
                }
            }

            if du > 0.0 {
                let consumed = DiscreteMeasure::from_derived(
                    (0..n).map(|j| (pos[j], init[j] - rem[j])).collect(),
                );
                segments.push(FlowSegment {
                    lo: u,
                    hi: end,
                    lift_segment: li,
                    flows,
                    targets: points,
                    consumed,
                });
            }
            u = end;
        }
    }

    let left: f64 = rem.iter().sum();
    if left > 1e-9 * nu.mass().max(1.0) {
        return Err(Error::InternalInvariant(format!(
            "mass {left} of the target left unconsumed"
        )));
    }
    Ok(LiftedCoupling {
        lift: lift.clone(),
        segments,
    })
}

/// `∫ π̂_u du`.
pub fn project(lc: &LiftedCoupling) -> DiscreteCoupling {
    DiscreteCoupling::new(
        lc.segments
            .iter()
            .flat_map(|s| {
                let len = s.len();
                s.flows
                    .iter()
                    .map(move |f| (f.source, f.target, f.rate * len))
            })
            .collect(),
    )
}

/// The mean-defect curve `c(u)` of a lifted coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct CCurve {
    pub curve: PiecewiseLinear,
    /// Maximal `u`-intervals on which `c` is flat.
    pub martingale_set: Vec<(f64, f64)>,
}

impl CCurve {
    pub fn from_lifted(lc: &LiftedCoupling) -> CCurve {
        let scale = 1.0
            + lc.segments
                .iter()
                .flat_map(|s| s.flows.iter())
                .fold(0.0_f64, |m, f| m.max(f.source.abs()).max(f.target.abs()));
        let eps = tol::get().slope * scale;
        let mut xs = vec![0.0];
        let mut ys = vec![0.0];
        let mut flat: Vec<(f64, f64)> = Vec::new();
        let mut c = 0.0;
        for s in &lc.segments {
            let slope = s.slope();
            // Flat segments keep c exactly level; their slope is rounding.
            let is_flat = slope <= eps;
            if !is_flat {
                c += slope * s.len();
            }
            xs.push(s.hi);
            ys.push(c);
            if is_flat {
                match flat.last_mut() {
                    Some(last) if last.1 == s.lo => last.1 = s.hi,
                    _ => flat.push((s.lo, s.hi)),
                }
            }
        }
        CCurve {
            curve: PiecewiseLinear::from_parts(xs, ys, 0.0, 0.0),
            martingale_set: flat,
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.curve.eval(u)
    }

    /// `c(1) = mean(μ) − mean(ν)`.
    pub fn terminal(&self) -> f64 {
        *self.curve.values().last().unwrap()
    }

    pub fn in_martingale_set(&self, u: f64) -> bool {
        self.martingale_set
            .iter()
            .any(|&(lo, hi)| lo <= u && u < hi)
            || self
                .martingale_set
                .last()
                .is_some_and(|&(_, hi)| hi == 1.0 && u == 1.0)
    }
}

pub fn c_curve(lift: &LiftSpec, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<CCurve> {
    Ok(CCurve::from_lifted(&lifted_shadow_coupling(lift, mu, nu)?))
}

/// The decreasing supermartingale coupling with its lifted form and c-curve.
#[derive(Clone, Debug, PartialEq)]
pub struct PiDecreasing {
    pub coupling: DiscreteCoupling,
    pub lifted: LiftedCoupling,
    pub c_curve: CCurve,
}

impl PiDecreasing {
    /// Source positions emitted during a martingale segment of positive length.
    pub fn martingale_sources(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self
            .lifted
            .segments
            .iter()
            .filter(|s| {
                let mid = 0.5 * (s.lo + s.hi);
                self.c_curve.in_martingale_set(mid)
            })
            .flat_map(|s| s.flows.iter().map(|f| f.source))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }
}

/// `π^D`. Requires `mu ≤_cd nu` with unit mass.
pub fn pi_decreasing(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<PiDecreasing> {
    if !order_check(OrderRelation::Cd, mu, nu) {
        return Err(Error::OrderViolation(
            "source is not below target in convex-decreasing order".into(),
        ));
    }
    let lift = make_lift(LiftKind::DecreasingQuantile, mu)?;
    let lifted = run(&lift, nu)?;
    let coupling = project(&lifted);
    let c_curve = CCurve::from_lifted(&lifted);
    Ok(PiDecreasing {
        coupling,
        lifted,
        c_curve,
    })
}
