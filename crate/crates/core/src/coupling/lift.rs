use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{masses_equal, DiscreteMeasure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    DecreasingQuantile,
    IncreasingQuantile,
    Uniform,
    Custom,
}

/// On `[lo, hi)` the lift emits source mass at rate `kernel` per unit of `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftSegment {
    pub lo: f64,
    pub hi: f64,
    pub kernel: DiscreteMeasure,
}

/// A lift of `μ` whose kernel is constant on finitely many `u`-segments.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftSpec {
    kind: LiftKind,
    segments: Vec<LiftSegment>,
}

const U_TOL: f64 = 1e-12;

impl LiftSpec {
    /// Validates that the segments partition `[0, 1]` and each kernel has mass 1.
    pub fn custom(segments: Vec<LiftSegment>) -> Result<LiftSpec> {
        LiftSpec::build(LiftKind::Custom, segments)
    }

    fn build(kind: LiftKind, segments: Vec<LiftSegment>) -> Result<LiftSpec> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidLift("no segments".into()))?;
        if first.lo.abs() > U_TOL {
            return Err(Error::InvalidLift(format!("starts at {}", first.lo)));
        }
        let last = segments.last().unwrap();
        if (last.hi - 1.0).abs() > U_TOL {
            return Err(Error::InvalidLift(format!("ends at {}", last.hi)));
        }
        for s in &segments {
            if s.lo >= s.hi || s.lo.is_nan() || s.hi.is_nan() {
                return Err(Error::InvalidLift(format!(
                    "empty segment [{}, {})",
                    s.lo, s.hi
                )));
            }
            if !masses_equal(s.kernel.mass(), 1.0) {
                return Err(Error::InvalidLift(format!(
                    "kernel on [{}, {}) has mass {}",
                    s.lo,
                    s.hi,
                    s.kernel.mass()
                )));
            }
        }
        for w in segments.windows(2) {
            if (w[0].hi - w[1].lo).abs() > U_TOL {
                return Err(Error::InvalidLift(format!("gap at {}", w[0].hi)));
            }
        }
        Ok(LiftSpec { kind, segments })
    }

    pub fn kind(&self) -> LiftKind {
        self.kind
    }

    pub fn segments(&self) -> &[LiftSegment] {
        &self.segments
    }

    /// Source mass released on `[0, u]`.
    pub fn cumulative(&self, u: f64) -> Result<DiscreteMeasure> {
        check_unit(u)?;
        let mut raw = Vec::new();
        for s in &self.segments {
            let len = (u.min(s.hi) - s.lo).max(0.0);
            if len > 0.0 {
                raw.extend(s.kernel.atoms().iter().map(|a| (a.x, a.w * len)));
            }
        }
        Ok(DiscreteMeasure::from_derived(raw))
    }

    /// First marginal of the lift.
    pub fn source(&self) -> DiscreteMeasure {
        self.cumulative(1.0).expect("1 is in range")
    }
}

fn check_unit(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "u",
            value: u,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

fn check_unit_mass(mu: &DiscreteMeasure) -> Result<()> {
    if masses_equal(mu.mass(), 1.0) {
        Ok(())
    } else {
        Err(Error::MassNotOne(mu.mass()))
    }
}

pub fn make_lift(kind: LiftKind, mu: &DiscreteMeasure) -> Result<LiftSpec> {
    check_unit_mass(mu)?;
    let quantile = |atoms: Vec<(f64, f64)>| {
        let mut segments = Vec::with_capacity(atoms.len());
        let mut lo = 0.0;
        for (i, &(x, w)) in atoms.iter().enumerate() {
            let hi = if i + 1 == atoms.len() { 1.0 } else { lo + w };
            segments.push(LiftSegment {
                lo,
                hi,
                kernel: DiscreteMeasure::dirac(x, 1.0),
            });
            lo = hi;
        }
        segments
    };
    let atoms: Vec<(f64, f64)> = mu.atoms().iter().map(|a| (a.x, a.w)).collect();
    let segments = match kind {
        LiftKind::DecreasingQuantile => quantile(atoms.into_iter().rev().collect()),
        LiftKind::IncreasingQuantile => quantile(atoms),
        LiftKind::Uniform => vec![LiftSegment {
            lo: 0.0,
            hi: 1.0,
            kernel: mu.scaled(1.0 / mu.mass()),
        }],
        LiftKind::Custom => {
            return Err(Error::InvalidLift(
                "custom lifts are built from explicit segments".into(),
            ))
        }
    };
    LiftSpec::build(kind, segments)
}

/// `μ_u`: the top `u` of the mass of `μ`, split at the boundary atom.
pub fn mu_cumulative(mu: &DiscreteMeasure, u: f64) -> Result<DiscreteMeasure> {
    check_unit_mass(mu)?;
    check_unit(u)?;
    if u == 1.0 {
        return Ok(mu.clone());
    }
    let mut left = u;
    let mut raw = Vec::new();
    for a in mu.atoms().iter().rev() {
        if left <= 0.0 {
            break;
        }
        let take = a.w.min(left);
        raw.push((a.x, take));
        left -= take;
    }
    Ok(DiscreteMeasure::from_derived(raw))
}
