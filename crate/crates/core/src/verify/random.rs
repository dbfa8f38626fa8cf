use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::measures::DiscreteMeasure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InstanceKind {
    /// Supermartingale kernels; roughly half the rows lose mean.
    GeneralCd,
    /// Martingale kernels only.
    EqualMeans,
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A probability measure with `m` atoms on distinct integers.
pub fn random_target<R: Rng>(rng: &mut R, m: usize) -> DiscreteMeasure {
    let span = (4 * m).max(8);
    let lo = -(span as i64 / 2);
    let mut pos: Vec<usize> = sample(rng, span + 1, m).into_vec();
    pos.sort_unstable();
    let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    DiscreteMeasure::from_derived(
        pos.iter()
            .zip(&w)
            .map(|(&p, &wi)| ((lo + p as i64) as f64, wi / total))
            .collect(),
    )
}

/// A measure `μ` with at most `n` atoms and `μ ≤_cd target`: the first
/// marginal of a random supermartingale coupling whose second marginal is
/// `target`.
pub fn random_source<R: Rng>(
    rng: &mut R,
    target: &DiscreteMeasure,
    n: usize,
    kind: InstanceKind,
) -> DiscreteMeasure {
    let m = target.len();
    let mut k = vec![vec![0.0; m]; n];
    for row in k.iter_mut() {
        for v in row.iter_mut() {
            if rng.gen_bool(0.6) {
                *v = rng.gen_range(0.05..1.0);
            }
        }
    }
    // Every row and column needs some mass.
    for row in k.iter_mut() {
        if row.iter().all(|&v| v == 0.0) {
            let j = rng.gen_range(0..m);
            row[j] = rng.gen_range(0.05..1.0);
        }
    }
    for j in 0..m {
        if k.iter().all(|row| row[j] == 0.0) {
            let i = rng.gen_range(0..n);
            k[i][j] = rng.gen_range(0.05..1.0);
        }
    }
    for (j, a) in target.atoms().iter().enumerate() {
        let col: f64 = k.iter().map(|row| row[j]).sum();
        for row in k.iter_mut() {
            row[j] *= a.w / col;
        }
    }
    let atoms = target.atoms();
    let raw = k
        .iter()
        .map(|row| {
            let mass: f64 = row.iter().sum();
            let first: f64 = row.iter().zip(atoms).map(|(v, a)| v * a.x).sum();
            let drift = match kind {
                InstanceKind::EqualMeans => 0.0,
                InstanceKind::GeneralCd => {
                    if rng.gen_bool(0.5) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1.5)
                    }
                }
            };
            (first / mass + drift, mass)
        })
        .collect();
    DiscreteMeasure::from_derived(raw)
}

/// A pair `(μ, ν)` of probability measures with `μ ≤_cd ν`, `μ` with at most
/// `n` atoms and `ν` with `m` atoms on distinct integers.
pub fn random_instance(
    seed: u64,
    n: usize,
    m: usize,
    kind: InstanceKind,
) -> (DiscreteMeasure, DiscreteMeasure) {
    assert!(
        n >= 1 && m >= 1,
        "instances need at least one atom on each side"
    );
    let mut rng = rng_for(seed);
    let nu = random_target(&mut rng, m);
    let mu = random_source(&mut rng, &nu, n, kind);
    (mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{order_check, OrderRelation};

    #[test]
    fn instances_are_ordered() {
        for seed in 0..200 {
            for kind in [InstanceKind::GeneralCd, InstanceKind::EqualMeans] {
                let (mu, nu) = random_instance(
                    seed,
                    1 + (seed as usize % 6),
                    1 + (seed as usize / 7 % 6),
                    kind,
                );
                assert!(order_check(OrderRelation::Cd, &mu, &nu), "seed {seed}");
                if kind == InstanceKind::EqualMeans {
                    assert!((mu.mean() - nu.mean()).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = random_instance(42, 3, 3, InstanceKind::GeneralCd);
        let b = random_instance(42, 3, 3, InstanceKind::GeneralCd);
        assert_eq!(a, b);
    }

    #[test]
    fn seed_42_regression() {
        let (mu, nu) = random_instance(42, 3, 3, InstanceKind::GeneralCd);
        assert_eq!(mu.positions(), vec![-4.0, 2.082776078712517]);
        assert_eq!(nu.positions(), vec![-4.0, 2.0, 6.0]);
        assert_eq!(nu.atoms()[0].w, 0.32122267725483744);
        assert_eq!(mu.atoms()[0].w, 0.17370683255490926);
    }
}
