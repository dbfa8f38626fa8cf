//! Randomised checks of the Wasserstein stability of the shadow map:
//! `W(S^ν(μ), S^ν'(μ')) ≤ W(μ, μ') + 2W(ν, ν')`, and its one-sided forms
//! with a fixed target (`≤ W(μ, μ')`) or a fixed source (`≤ 2W(ν, ν')`).

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::measures::{wasserstein1, DiscreteMeasure};
use crate::shadow::shadow;
use crate::verify::{random_source, random_target, rng_for, InstanceKind};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
}

impl BoundCheck {
    /// `lhs − rhs` when positive beyond `1e-9·scale`.
    pub fn violation(&self) -> Option<f64> {
        let d = self.lhs - self.rhs;
        (d > 1e-9 * self.scale).then_some(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityViolation {
    pub trial: usize,
    pub bound: &'static str,
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tightness {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub trials: usize,
    pub violations: Vec<StabilityViolation>,
    /// Largest `lhs − rhs` over all bounds and trials (negative when slack).
    pub max_violation: f64,
    /// `lhs / rhs` of the two-sided bound over trials with `rhs > 0`.
    pub tightness: Option<Tightness>,
}

struct Trial {
    full: BoundCheck,
    fixed_target: BoundCheck,
    fixed_source: BoundCheck,
}

fn scale_of(ms: &[&DiscreteMeasure]) -> f64 {
    ms.iter()
        .map(|m| m.position_scale() * m.mass().max(1.0))
        .fold(1.0, f64::max)
}

fn check(
    mu: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    nu2: &DiscreteMeasure,
    rhs_nu: f64,
) -> Result<BoundCheck> {
    let s1 = shadow(mu, nu)?.shadow;
    let s2 = shadow(mu2, nu2)?.shadow;
    let lhs = wasserstein1(&s1, &s2)?;
    let mut rhs = wasserstein1(mu, mu2)?;
    if rhs_nu > 0.0 {
        rhs += rhs_nu * wasserstein1(nu, nu2)?;
    }
    Ok(BoundCheck {
        lhs,
        rhs,
        scale: scale_of(&[mu, mu2, nu, nu2]),
    })
}

/// Moves atoms down or splits them around their position, which keeps
/// `ν ≤_cd ν'`.
fn spread<R: Rng>(rng: &mut R, nu: &DiscreteMeasure) -> DiscreteMeasure {
    let mut raw = Vec::new();
    for a in nu.atoms() {
        match rng.gen_range(0..3) {
            0 => raw.push((a.x, a.w)),
            1 => raw.push((a.x - rng.gen_range(0..3) as f64, a.w)),
            _ => {
                let (l, r) = (rng.gen_range(1..3) as f64, rng.gen_range(1..3) as f64);
                raw.push((a.x - l, a.w * r / (l + r)));
                raw.push((a.x + r, a.w * l / (l + r)));
            }
        }
    }
    DiscreteMeasure::from_derived(raw)
}

fn trial(seed: u64) -> Result<Trial> {
    let mut rng = rng_for(seed);
    let m = rng.gen_range(1..=6);
    let n = rng.gen_range(1..=6);
    let frac = rng.gen_range(0.3..=1.0);
    let (m2, n2) = (rng.gen_range(1..=6), rng.gen_range(1..=6));

    // Independent targets of equal mass, sources of equal smaller mass.
    let nu = random_target(&mut rng, m);
    let nu2 = random_target(&mut rng, m2);
    let mu = random_source(&mut rng, &nu.scaled(frac), n, InstanceKind::GeneralCd);
    let mu2 = random_source(&mut rng, &nu2.scaled(frac), n2, InstanceKind::GeneralCd);
    let full = check(&mu, &mu2, &nu, &nu2, 2.0)?;

    // Fixed target: a second source from the same target, or a translate of
    // the first one upwards.
    let mu3 = if rng.gen_bool(0.5) {
        random_source(&mut rng, &nu.scaled(frac), n, InstanceKind::GeneralCd)
    } else {
        let shift = rng.gen_range(0.0..2.0);
        DiscreteMeasure::from_derived(mu.atoms().iter().map(|a| (a.x + shift, a.w)).collect())
    };
    let fixed_target = check(&mu, &mu3, &nu, &nu, 0.0)?;

    // Fixed source: both targets dominate the source.
    let nu3 = spread(&mut rng, &nu);
    let fixed_source = check(&mu, &mu, &nu, &nu3, 2.0)?;

    Ok(Trial {
        full,
        fixed_target,
        fixed_source,
    })
}

/// Runs `trials` random checks in parallel; trial `t` uses seed `seed + t`.
pub fn stability_experiment(trials: usize, seed: u64) -> Result<StabilityReport> {
    let results: Vec<Result<Trial>> = (0..trials)
        .into_par_iter()
        .map(|t| trial(seed.wrapping_add(t as u64)))
        .collect();
    let mut violations = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    let mut ratios = Vec::new();
    for (t, r) in results.into_iter().enumerate() {
        let r = r?;
        for (name, b) in [
            ("two_sided", &r.full),
            ("fixed_target", &r.fixed_target),
            ("fixed_source", &r.fixed_source),
        ] {
            max_violation = max_violation.max(b.lhs - b.rhs);
            if let Some(excess) = b.violation() {
                violations.push(StabilityViolation {
                    trial: t,
                    bound: name,
                    excess,
                });
            }
        }
        if r.full.rhs > 0.0 {
            ratios.push(r.full.lhs / r.full.rhs);
        }
    }
    ratios.sort_by(f64::total_cmp);
    let tightness = (!ratios.is_empty()).then(|| Tightness {
        min: ratios[0],
        median: ratios[ratios.len() / 2],
        max: ratios[ratios.len() - 1],
    });
    Ok(StabilityReport {
        trials,
        violations,
        max_violation,
        tightness,
    })
}
