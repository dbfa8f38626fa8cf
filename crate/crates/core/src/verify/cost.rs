use std::fmt;
use std::sync::Arc;

/// A transport cost `c(x, y)` with declared Spence–Mirrlees conditions.
#[derive(Clone)]
pub struct CostFunction {
    name: String,
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    /// Declared: `c(x2, ·) − c(x1, ·)` strictly decreasing for `x1 < x2`.
    pub cross_decreasing: bool,
    /// Declared: `c(x2, ·) − c(x1, ·)` strictly convex for `x1 < x2`.
    pub cross_convex: bool,
}

impl CostFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        cross_decreasing: bool,
        cross_convex: bool,
    ) -> CostFunction {
        CostFunction {
            name: name.into(),
            eval: Arc::new(eval),
            cross_decreasing,
            cross_convex,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    /// Whether the declared conditions make the minimiser unique.
    pub fn is_strict(&self) -> bool {
        self.cross_decreasing && self.cross_convex
    }

    /// Samples the cross difference `h(y) = c(x2, y) − c(x1, y)` on `ys`
    /// (increasing) and reports whether it is strictly decreasing and
    /// strictly convex there.
    pub fn check_cross_difference(&self, x1: f64, x2: f64, ys: &[f64]) -> (bool, bool) {
        let h: Vec<f64> = ys
            .iter()
            .map(|&y| self.eval(x2, y) - self.eval(x1, y))
            .collect();
        let decreasing = h.windows(2).all(|w| w[1] < w[0]);
        let slopes: Vec<f64> = h
            .windows(2)
            .zip(ys.windows(2))
            .map(|(v, y)| (v[1] - v[0]) / (y[1] - y[0]))
            .collect();
        let convex = slopes.windows(2).all(|s| s[1] > s[0]);
        (decreasing, convex)
    }
}

impl fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostFunction")
            .field("name", &self.name)
            .field("cross_decreasing", &self.cross_decreasing)
            .field("cross_convex", &self.cross_convex)
            .finish()
    }
}

impl Default for CostFunction {
    fn default() -> Self {
        spence_mirrlees_cost(1.0)
    }
}

/// `c(x, y) = x·e^{−βy}`. Requires `β > 0`.
pub fn spence_mirrlees_cost(beta: f64) -> CostFunction {
    assert!(beta > 0.0, "beta must be positive");
    CostFunction::new(
        format!("x*exp(-{beta}*y)"),
        move |x, y| x * (-beta * y).exp(),
        true,
        true,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cost_values() {
        let c = CostFunction::default();
        assert_eq!(c.eval(1.0, 0.0), 1.0);
        for y in [-3.0, 0.0, 2.5] {
            assert_eq!(c.eval(0.0, y), 0.0);
        }
        let ys: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.3).collect();
        assert_eq!(c.check_cross_difference(-1.0, 2.0, &ys), (true, true));
        assert!(c.is_strict());
    }
}
