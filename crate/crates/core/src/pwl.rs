//! Continuous piecewise-linear functions with linear tails.
//!
//! A [`PiecewiseLinear`] is stored as its breakpoints, the values at those
//! breakpoints and the two tail slopes. Everything the library needs from
//! such functions (evaluation, linear combination, convex hull, one-sided
//! slopes and reading off the measure encoded by a convex function) is exact
//! up to floating point rounding.

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

impl PiecewiseLinear {
    /// Builds a function from breakpoints, values and tail slopes.
    ///
    /// Breakpoints must be strictly increasing and all numbers finite. An
    /// empty breakpoint list is rejected; use [`PiecewiseLinear::line`].
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, left_slope: f64, right_slope: f64) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::Parse(
                "breakpoints and values must be non-empty and of equal length".into(),
            ));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite())
            || !left_slope.is_finite()
            || !right_slope.is_finite()
        {
            return Err(Error::NonFiniteInput("piecewise-linear data".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(PiecewiseLinear {
            xs,
            ys,
            left_slope,
            right_slope,
        })
    }

    pub(crate) fn from_parts(
        xs: Vec<f64>,
        ys: Vec<f64>,
        left_slope: f64,
        right_slope: f64,
    ) -> Self {
        debug_assert!(!xs.is_empty() && xs.len() == ys.len());
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        PiecewiseLinear {
            xs,
            ys,
            left_slope,
            right_slope,
        }
    }

    /// The affine function `k ↦ intercept + slope·k`, anchored at 0.
    pub fn line(intercept: f64, slope: f64) -> Self {
        PiecewiseLinear {
            xs: vec![0.0],
            ys: vec![intercept],
            left_slope: slope,
            right_slope: slope,
        }
    }

    pub fn zero() -> Self {
        Self::line(0.0, 0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn left_tail_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_tail_slope(&self) -> f64 {
        self.right_slope
    }

    /// Whether the function has no interior kink (after pruning it is a
    /// single line).
    pub fn is_affine(&self) -> bool {
        self.segment_slopes()
            .windows(2)
            .all(|w| !slopes_differ(w[0], w[1], tol::get().collinear))
    }

    /// Slopes of all `n + 1` linear pieces, left tail first.
    pub fn segment_slopes(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.xs.len() + 1);
        s.push(self.left_slope);
        for i in 1..self.xs.len() {
            s.push((self.ys[i] - self.ys[i - 1]) / (self.xs[i] - self.xs[i - 1]));
        }
        s.push(self.right_slope);
        s
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let idx = self.xs.partition_point(|&b| b <= x);
        if idx == 0 {
            self.ys[0] + self.left_slope * (x - self.xs[0])
        } else if idx == n {
            self.ys[n - 1] + self.right_slope * (x - self.xs[n - 1])
        } else {
            let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
            let (y0, y1) = (self.ys[idx - 1], self.ys[idx]);
            let t = (x - x0) / (x1 - x0);
            y0 + t * (y1 - y0)
        }
    }

    pub fn right_slope(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let idx = self.xs.partition_point(|&b| b <= x);
        if idx == 0 {
            self.left_slope
        } else if idx == n {
            self.right_slope
        } else {
            (self.ys[idx] - self.ys[idx - 1]) / (self.xs[idx] - self.xs[idx - 1])
        }
    }

    pub fn left_slope(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let idx = self.xs.partition_point(|&b| b < x);
        if idx == 0 {
            self.left_slope
        } else if idx == n {
            self.right_slope
        } else {
            (self.ys[idx] - self.ys[idx - 1]) / (self.xs[idx] - self.xs[idx - 1])
        }
    }

    /// `a·f + b·g` on the merged breakpoints, collinear breakpoints pruned.
    pub fn combine(a: f64, f: &PiecewiseLinear, b: f64, g: &PiecewiseLinear) -> PiecewiseLinear {
        let xs = merge_breakpoints(&f.xs, &g.xs);
        let ys = xs.iter().map(|&x| a * f.eval(x) + b * g.eval(x)).collect();
        PiecewiseLinear {
            xs,
            ys,
            left_slope: a * f.left_slope + b * g.left_slope,
            right_slope: a * f.right_slope + b * g.right_slope,
        }
        .pruned()
    }

    /// `self + intercept + slope·k`.
    pub fn add_affine(&self, intercept: f64, slope: f64) -> PiecewiseLinear {
        PiecewiseLinear {
            xs: self.xs.clone(),
            ys: self
                .xs
                .iter()
                .zip(&self.ys)
                .map(|(&x, &y)| y + intercept + slope * x)
                .collect(),
            left_slope: self.left_slope + slope,
            right_slope: self.right_slope + slope,
        }
    }

    /// Removes breakpoints at which the two adjacent slopes agree.
    pub fn pruned(self) -> PiecewiseLinear {
        let eps = tol::get().collinear;
        let slopes = self.segment_slopes();
        let keep: Vec<usize> = (0..self.xs.len())
            .filter(|&i| slopes_differ(slopes[i], slopes[i + 1], eps))
            .collect();
        if keep.len() == self.xs.len() {
            return self;
        }
        if keep.is_empty() {
            let intercept = self.eval(0.0);
            return PiecewiseLinear {
                xs: vec![0.0],
                ys: vec![intercept],
                left_slope: self.left_slope,
                right_slope: self.left_slope,
            };
        }
        PiecewiseLinear {
            xs: keep.iter().map(|&i| self.xs[i]).collect(),
            ys: keep.iter().map(|&i| self.ys[i]).collect(),
            left_slope: self.left_slope,
            right_slope: self.right_slope,
        }
    }

    /// Largest convex minorant.
    ///
    /// The epigraph of `self` is the convex hull of its breakpoints plus two
    /// rays with the tail slopes. The left ray of the hull leaves the last
    /// point supporting a line of slope `left_slope`, the right ray leaves
    /// the first point supporting a line of slope `right_slope`, and in
    /// between the hull is the lower convex chain of the breakpoints.
    pub fn convex_hull(&self) -> Result<PiecewiseLinear> {
        let (l, r) = (self.left_slope, self.right_slope);
        let slope_eps = tol::get().collinear * (1.0 + l.abs().max(r.abs()));
        if l > r + slope_eps {
            return Err(Error::UnboundedBelow { left: l, right: r });
        }
        let n = self.xs.len();
        let scale = self.value_scale();
        let tie = 1e-13 * scale;

        let offset = |i: usize, s: f64| self.ys[i] - s * self.xs[i];
        let min_l = (0..n).map(|i| offset(i, l)).fold(f64::INFINITY, f64::min);
        let min_r = (0..n).map(|i| offset(i, r)).fold(f64::INFINITY, f64::min);
        let first = (0..n)
            .rev()
            .find(|&i| offset(i, l) <= min_l + tie)
            .unwrap_or(0);
        let last = (0..n)
            .find(|&i| offset(i, r) <= min_r + tie)
            .unwrap_or(n - 1);
        if first >= last {
            let i = last;
            return Ok(PiecewiseLinear {
                xs: vec![self.xs[i]],
                ys: vec![self.ys[i]],
                left_slope: l,
                right_slope: r.max(l),
            }
            .pruned());
        }

        let mut chain: Vec<usize> = Vec::with_capacity(last - first + 1);
        for i in first..=last {
            while chain.len() >= 2 {
                let a = chain[chain.len() - 2];
                let b = chain[chain.len() - 1];
                let s_ab = (self.ys[b] - self.ys[a]) / (self.xs[b] - self.xs[a]);
                let s_bi = (self.ys[i] - self.ys[b]) / (self.xs[i] - self.xs[b]);
                if s_ab >= s_bi {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(i);
        }
        Ok(PiecewiseLinear {
            xs: chain.iter().map(|&i| self.xs[i]).collect(),
            ys: chain.iter().map(|&i| self.ys[i]).collect(),
            left_slope: l,
            right_slope: r,
        }
        .pruned())
    }

    /// Reads off the measure `m` with `self = P_m + intercept + left_slope·k`.
    ///
    /// Fails with [`Error::NotConvex`] if some slope decreases by more than
    /// the convexity tolerance; smaller negative jumps are treated as zero.
    pub fn measure_from_convex(&self) -> Result<TailedMeasure> {
        let slopes = self.segment_slopes();
        let scale = slopes
            .iter()
            .chain(&self.ys)
            .fold(1.0_f64, |m, v| m.max(v.abs()));
        let eps = tol::get().convexity * scale;
        let mut atoms = Vec::with_capacity(self.xs.len());
        for (i, &x) in self.xs.iter().enumerate() {
            let jump = slopes[i + 1] - slopes[i];
            if jump < -eps {
                return Err(Error::NotConvex { at: x, drop: -jump });
            }
            if jump > 0.0 {
                atoms.push((x, jump));
            }
        }
        let body = DiscreteMeasure::from_derived(atoms);
        Ok(TailedMeasure {
            body,
            left_tail_slope: self.left_slope,
            right_tail_slope: self.right_slope,
            intercept: self.ys[0] - self.left_slope * self.xs[0],
        })
    }

    /// Supremum over the real line (`+∞` when a tail increases outward).
    pub fn supremum(&self) -> f64 {
        let eps = tol::get().collinear;
        if self.left_slope < -eps * (1.0 + self.left_slope.abs())
            || self.right_slope > eps * (1.0 + self.right_slope.abs())
        {
            return f64::INFINITY;
        }
        self.ys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Infimum over the real line (`-∞` when a tail decreases outward).
    pub fn infimum(&self) -> f64 {
        -self.negated().supremum()
    }

    pub fn negated(&self) -> PiecewiseLinear {
        PiecewiseLinear {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|y| -y).collect(),
            left_slope: -self.left_slope,
            right_slope: -self.right_slope,
        }
    }

    /// `self ≤ other + abs_tol` everywhere, decided on the merged breakpoints
    /// and the tail slopes.
    pub fn le_everywhere(&self, other: &PiecewiseLinear, abs_tol: f64) -> bool {
        let xs = merge_breakpoints(&self.xs, &other.xs);
        if xs.iter().any(|&x| self.eval(x) > other.eval(x) + abs_tol) {
            return false;
        }
        let eps = tol::get().collinear;
        let ls = eps * (1.0 + self.left_slope.abs().max(other.left_slope.abs()));
        let rs = eps * (1.0 + self.right_slope.abs().max(other.right_slope.abs()));
        self.left_slope >= other.left_slope - ls && self.right_slope <= other.right_slope + rs
    }

    fn value_scale(&self) -> f64 {
        let xmax = self.xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let ymax = self.ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
        1.0 + ymax + xmax * self.left_slope.abs().max(self.right_slope.abs())
    }
}

/// Result of [`PiecewiseLinear::measure_from_convex`].
#[derive(Clone, Debug, PartialEq)]
pub struct TailedMeasure {
    pub body: DiscreteMeasure,
    pub left_tail_slope: f64,
    pub right_tail_slope: f64,
    /// Value at 0 of the affine part `f − P_body`.
    pub intercept: f64,
}

impl TailedMeasure {
    /// Whether the left tail is flat, i.e. the function is a pure put
    /// potential up to a constant.
    pub fn is_put_potential(&self) -> bool {
        self.left_tail_slope.abs() <= tol::get().collinear
    }
}

fn slopes_differ(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() > eps * (1.0 + a.abs().max(b.abs()))
}

/// Sorted union of two breakpoint lists with coincident points merged.
pub(crate) fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        match out.last() {
            Some(&last) if tol::same_position(last, next) => {}
            _ => out.push(next),
        }
    }
    out
}
