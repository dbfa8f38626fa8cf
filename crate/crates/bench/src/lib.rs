//! Benchmark-only crate; see `benches/`.

use shadow_transport::verify::{random_instance, InstanceKind};
use shadow_transport::DiscreteMeasure;

/// A fixed `μ ≤_cd ν` pair with `n` source and `m` target atoms.
pub fn instance(n: usize, m: usize) -> (DiscreteMeasure, DiscreteMeasure) {
    random_instance(1234 + (n * 97 + m) as u64, n, m, InstanceKind::GeneralCd)
}
