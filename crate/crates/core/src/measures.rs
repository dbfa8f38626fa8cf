//! Finite atomic measures on the real line.
//!
//! [`DiscreteMeasure`] is the currency of the whole crate: potentials,
//! quantiles, Wasserstein-1 distances, the stochastic orders used to state
//! every embedding problem, and the Up/Down measures built from pointwise
//! maxima and minima of quantile functions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pwl::{merge_breakpoints, PiecewiseLinear};
use crate::tol;

/// A weighted point mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

/// A finite positive measure with finitely many atoms.
///
/// Positions are strictly increasing and every weight is positive. The
/// empty measure is a legal value with mass and mean 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

/// Which canonical quantile function to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `G⁻(u) = sup{k : F(k) < u}` (left-continuous).
    Left,
    /// `G⁺(u) = inf{k : F(k) > u}` (right-continuous).
    Right,
}

/// Stochastic order relations between measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderRelation {
    /// First-order stochastic dominance (equal masses).
    Sto,
    /// Convex order.
    C,
    /// Convex-decreasing order.
    Cd,
    /// Positive convex order.
    Pc,
    /// Positive convex-decreasing order.
    Pcd,
    /// Set-wise domination `a(A) ≤ b(A)`.
    Leq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpDown {
    Up,
    Down,
}

/// Put, call and negated absolute-value potentials of a measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Potentials {
    /// `P(k) = ∫(k − x)⁺ dm`.
    pub put: PiecewiseLinear,
    /// `C(k) = ∫(x − k)⁺ dm`.
    pub call: PiecewiseLinear,
    /// `U(k) = −∫|k − x| dm`.
    pub u: PiecewiseLinear,
}

impl DiscreteMeasure {
    /// Validating constructor: sorts atoms, merges coincident positions and
    /// drops atoms whose weight is negligible relative to the total mass.
    pub fn new<I>(raw: I) -> Result<DiscreteMeasure>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let raw: Vec<(f64, f64)> = raw.into_iter().collect();
        for &(x, w) in &raw {
            if !x.is_finite() || !w.is_finite() {
                return Err(Error::NonFiniteInput(format!("atom ({x}, {w})")));
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight {
                    position: x,
                    weight: w,
                });
            }
        }
        Ok(Self::from_derived(raw))
    }

    /// Normalising constructor for internally computed atoms: negative and
    /// negligible weights are dropped instead of rejected.
    pub(crate) fn from_derived(mut raw: Vec<(f64, f64)>) -> DiscreteMeasure {
        raw.retain(|&(_, w)| w > 0.0);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = raw.iter().map(|a| a.1).sum();
        let mut atoms: Vec<Atom> = Vec::with_capacity(raw.len());
        for (x, w) in raw {
            match atoms.last_mut() {
                Some(last) if tol::same_position(last.x, x) => last.w += w,
                _ => atoms.push(Atom { x, w }),
            }
        }
        let floor = tol::get().mass * total;
        atoms.retain(|a| a.w > floor);
        DiscreteMeasure { atoms }
    }

    pub fn empty() -> DiscreteMeasure {
        DiscreteMeasure::default()
    }

    /// Unit point mass scaled by `w`.
    pub fn dirac(x: f64, w: f64) -> DiscreteMeasure {
        DiscreteMeasure::from_derived(vec![(x, w)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn positions(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.x).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// First moment `∫x dm` (not normalised by the mass).
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.x * a.w).sum()
    }

    pub fn mass_and_mean(&self) -> (f64, f64) {
        (self.mass(), self.mean())
    }

    pub fn min_position(&self) -> Option<f64> {
        self.atoms.first().map(|a| a.x)
    }

    pub fn max_position(&self) -> Option<f64> {
        self.atoms.last().map(|a| a.x)
    }

    /// Weight of the atom at `x` (0 if none).
    pub fn weight_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| tol::same_position(a.x, x))
            .map_or(0.0, |a| a.w)
    }

    /// `1 + max |x|`, the natural length scale for tolerances.
    pub fn position_scale(&self) -> f64 {
        1.0 + self.atoms.iter().fold(0.0_f64, |m, a| m.max(a.x.abs()))
    }

    /// Right-continuous cumulative mass `m((−∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.x <= x || tol::same_position(a.x, x))
            .map(|a| a.w)
            .sum()
    }

    /// Quantile function at level `u ∈ [0, mass]`.
    ///
    /// The left version returns `−∞` at `u = 0` and the right version `+∞`
    /// at `u = mass`.
    pub fn quantile(&self, u: f64, side: Side) -> Result<f64> {
        let mass = self.mass();
        let eps = tol::get().mass * mass.max(1.0);
        if !u.is_finite() || u < -eps || u > mass + eps {
            return Err(Error::OutOfRange {
                what: "quantile level",
                value: u,
                lo: 0.0,
                hi: mass,
            });
        }
        let mut cum = 0.0;
        match side {
            Side::Left => {
                if u <= eps {
                    return Ok(f64::NEG_INFINITY);
                }
                for a in &self.atoms {
                    cum += a.w;
                    if cum >= u - eps {
                        return Ok(a.x);
                    }
                }
                Ok(self.max_position().unwrap_or(f64::NEG_INFINITY))
            }
            Side::Right => {
                for a in &self.atoms {
                    cum += a.w;
                    if cum > u + eps {
                        return Ok(a.x);
                    }
                }
                Ok(f64::INFINITY)
            }
        }
    }

    /// Put potential `P(k) = ∫(k − x)⁺ dm`.
    pub fn put(&self) -> PiecewiseLinear {
        if self.is_empty() {
            return PiecewiseLinear::zero();
        }
        let mut ys = Vec::with_capacity(self.atoms.len());
        let (mut w_left, mut m_left) = (0.0, 0.0);
        for a in &self.atoms {
            ys.push(a.x * w_left - m_left);
            w_left += a.w;
            m_left += a.w * a.x;
        }
        PiecewiseLinear::from_parts(self.positions(), ys, 0.0, self.mass())
    }

    /// Call potential `C(k) = ∫(x − k)⁺ dm`.
    pub fn call(&self) -> PiecewiseLinear {
        if self.is_empty() {
            return PiecewiseLinear::zero();
        }
        let mut ys = vec![0.0; self.atoms.len()];
        let (mut w_right, mut m_right) = (0.0, 0.0);
        for (i, a) in self.atoms.iter().enumerate().rev() {
            ys[i] = m_right - a.x * w_right;
            w_right += a.w;
            m_right += a.w * a.x;
        }
        PiecewiseLinear::from_parts(self.positions(), ys, -self.mass(), 0.0)
    }

    pub fn potentials(&self) -> Potentials {
        let put = self.put();
        let call = self.call();
        let u = PiecewiseLinear::combine(-1.0, &put, -1.0, &call);
        Potentials { put, call, u }
    }

    /// Atoms inside the interval with the given endpoints.
    pub fn restrict(
        &self,
        lo: f64,
        hi: f64,
        include_lo: bool,
        include_hi: bool,
    ) -> DiscreteMeasure {
        let atoms = self
            .atoms
            .iter()
            .filter(|a| {
                let above = if include_lo { a.x >= lo } else { a.x > lo };
                let below = if include_hi { a.x <= hi } else { a.x < hi };
                above && below
            })
            .copied()
            .collect();
        DiscreteMeasure { atoms }
    }

    pub fn scaled(&self, factor: f64) -> DiscreteMeasure {
        DiscreteMeasure::from_derived(self.atoms.iter().map(|a| (a.x, a.w * factor)).collect())
    }

    pub fn add(&self, other: &DiscreteMeasure) -> DiscreteMeasure {
        DiscreteMeasure::from_derived(
            self.atoms
                .iter()
                .chain(&other.atoms)
                .map(|a| (a.x, a.w))
                .collect(),
        )
    }

    /// `self − other`, with atoms that cancel up to the mass tolerance
    /// removed. Only meaningful when `other ≤ self`.
    pub fn sub(&self, other: &DiscreteMeasure) -> DiscreteMeasure {
        let floor = tol::get().mass * self.mass().max(other.mass());
        let raw = self
            .atoms
            .iter()
            .map(|a| (a.x, a.w - other.weight_at(a.x)))
            .filter(|&(_, w)| w > floor)
            .collect();
        DiscreteMeasure::from_derived(raw)
    }

    /// Largest atom-wise weight difference between two measures.
    pub fn max_atom_diff(&self, other: &DiscreteMeasure) -> f64 {
        let xs = merge_breakpoints(&self.positions(), &other.positions());
        xs.iter()
            .map(|&x| (self.weight_at(x) - other.weight_at(x)).abs())
            .fold(0.0, f64::max)
    }

    fn check_equal_mass(&self, other: &DiscreteMeasure) -> Result<f64> {
        let (ma, mb) = (self.mass(), other.mass());
        if !masses_equal(ma, mb) {
            return Err(Error::MassMismatch(ma, mb));
        }
        Ok(ma.max(mb))
    }

    /// Walks the quantile functions of two equal-mass measures in lockstep,
    /// calling `f(x_self, x_other, du)` on each common constancy interval.
    fn zip_quantiles(&self, other: &DiscreteMeasure, mut f: impl FnMut(f64, f64, f64)) {
        let (a, b) = (&self.atoms, &other.atoms);
        let (mut i, mut j) = (0, 0);
        let (mut ra, mut rb) = (
            a.first().map_or(0.0, |t| t.w),
            b.first().map_or(0.0, |t| t.w),
        );
        while i < a.len() && j < b.len() {
            let du = ra.min(rb);
            if du > 0.0 {
                f(a[i].x, b[j].x, du);
            }
            ra -= du;
            rb -= du;
            if ra <= 0.0 {
                i += 1;
                ra = a.get(i).map_or(0.0, |t| t.w);
            }
            if rb <= 0.0 {
                j += 1;
                rb = b.get(j).map_or(0.0, |t| t.w);
            }
        }
    }

    /// Wasserstein-1 distance `∫|G_other − G_self| du` over `[0, mass]`.
    pub fn wasserstein1(&self, other: &DiscreteMeasure) -> Result<f64> {
        self.check_equal_mass(other)?;
        let mut total = 0.0;
        self.zip_quantiles(other, |xa, xb, du| total += (xa - xb).abs() * du);
        Ok(total)
    }

    /// Push-forward of Lebesgue measure on `[0, mass]` under the pointwise
    /// maximum (`Up`) or minimum (`Down`) of the two quantile functions.
    pub fn up_down(&self, other: &DiscreteMeasure, mode: UpDown) -> Result<DiscreteMeasure> {
        self.check_equal_mass(other)?;
        let mut raw = Vec::with_capacity(self.len() + other.len());
        self.zip_quantiles(other, |xa, xb, du| {
            let x = match mode {
                UpDown::Up => xa.max(xb),
                UpDown::Down => xa.min(xb),
            };
            raw.push((x, du));
        });
        Ok(DiscreteMeasure::from_derived(raw))
    }

    /// Whether `self ≤ other` set-wise, i.e. atom by atom.
    pub fn le_atomwise(&self, other: &DiscreteMeasure) -> bool {
        let eps = tol::get().mass * self.mass().max(other.mass()).max(1.0);
        self.atoms.iter().all(|a| a.w <= other.weight_at(a.x) + eps)
    }
}

impl fmt::Display for DiscreteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·δ({})", a.w, a.x)?;
        }
        Ok(())
    }
}

/// Sorted union of the atom positions of `a` and `b`.
pub(crate) fn merge_positions(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Vec<f64> {
    merge_breakpoints(&a.positions(), &b.positions())
}

pub(crate) fn masses_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= tol::get().mass * a.abs().max(b.abs()).max(1.0)
}

/// Absolute slack for comparing potentials of `a` and `b`.
pub(crate) fn potential_slack(a: &DiscreteMeasure, b: &DiscreteMeasure) -> f64 {
    let scale = a.mass().max(b.mass()).max(1.0) * a.position_scale().max(b.position_scale());
    tol::get().order * scale
}

/// Decides `a ≤_rel b`.
///
/// Pointwise comparisons of potentials are exact for piecewise-linear
/// functions: they are evaluated on the merged breakpoints plus the tail
/// slopes. Relations that require equal masses return `false` on a mass
/// mismatch.
pub fn order_check(rel: OrderRelation, a: &DiscreteMeasure, b: &DiscreteMeasure) -> bool {
    let slack = potential_slack(a, b);
    let eq_mass = masses_equal(a.mass(), b.mass());
    let puts_le = || a.put().le_everywhere(&b.put(), slack);
    match rel {
        OrderRelation::Sto => {
            if !eq_mass {
                return false;
            }
            let eps = tol::get().mass * a.mass().max(1.0);
            merge_breakpoints(&a.positions(), &b.positions())
                .iter()
                .all(|&x| a.cdf(x) >= b.cdf(x) - eps)
        }
        OrderRelation::Cd => eq_mass && puts_le(),
        OrderRelation::C => eq_mass && (a.mean() - b.mean()).abs() <= slack && puts_le(),
        OrderRelation::Pcd => {
            a.mass() <= b.mass() + tol::get().mass * b.mass().max(1.0) && puts_le()
        }
        OrderRelation::Pc => puts_le() && a.call().le_everywhere(&b.call(), slack),
        OrderRelation::Leq => a.le_atomwise(b),
    }
}

/// `a.up_down(b, mode)` as a free function.
pub fn up_down(a: &DiscreteMeasure, b: &DiscreteMeasure, mode: UpDown) -> Result<DiscreteMeasure> {
    a.up_down(b, mode)
}

/// `a.wasserstein1(b)` as a free function.
pub fn wasserstein1(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64> {
    a.wasserstein1(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(atoms: &[(f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::new(atoms.iter().copied()).unwrap()
    }

    #[test]
    fn make_measure_sorts_and_merges() {
        let a = m(&[(1.0, 0.5), (0.0, 0.5)]);
        assert_eq!(
            a.atoms(),
            &[Atom { x: 0.0, w: 0.5 }, Atom { x: 1.0, w: 0.5 }]
        );
        let b = m(&[(0.0, 0.3), (0.0, 0.2)]);
        assert_eq!(b.atoms(), &[Atom { x: 0.0, w: 0.5 }]);
        let c = m(&[(0.0, 0.5), (2.0, 0.0)]);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn make_measure_rejects_bad_input() {
        assert!(matches!(
            DiscreteMeasure::new([(0.0, 0.5), (1.0, -0.1)]),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(matches!(
            DiscreteMeasure::new([(f64::NAN, 0.5)]),
            Err(Error::NonFiniteInput(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new([(0.0, f64::INFINITY)]),
            Err(Error::NonFiniteInput(_))
        ));
    }

    #[test]
    fn mass_and_mean_examples() {
        assert_eq!(m(&[(0.0, 1.0)]).mass_and_mean(), (1.0, 0.0));
        assert_eq!(m(&[(-2.0, 0.5), (1.0, 0.5)]).mass_and_mean(), (1.0, -0.5));
        assert_eq!(DiscreteMeasure::empty().mass_and_mean(), (0.0, 0.0));
    }

    #[test]
    fn cdf_examples() {
        let s = m(&[(-1.0, 0.5), (1.0, 0.5)]);
        assert_eq!(s.cdf(0.0), 0.5);
        assert_eq!(s.cdf(1.0), 1.0);
        assert_eq!(m(&[(0.0, 1.0)]).cdf(-1.0), 0.0);
    }

    #[test]
    fn quantile_examples() {
        let s = m(&[(-1.0, 0.5), (1.0, 0.5)]);
        assert_eq!(s.quantile(0.5, Side::Left).unwrap(), -1.0);
        assert_eq!(s.quantile(0.5, Side::Right).unwrap(), 1.0);
        assert_eq!(s.quantile(1.0, Side::Right).unwrap(), f64::INFINITY);
        let d = m(&[(0.0, 1.0)]);
        assert_eq!(d.quantile(0.0, Side::Left).unwrap(), f64::NEG_INFINITY);
        assert_eq!(d.quantile(0.0, Side::Right).unwrap(), 0.0);
        assert!(matches!(
            d.quantile(1.5, Side::Left),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            d.quantile(-0.1, Side::Left),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn potentials_examples() {
        let d = m(&[(0.0, 1.0)]).put();
        assert_eq!(d.left_tail_slope(), 0.0);
        assert_eq!(d.right_tail_slope(), 1.0);
        assert_eq!(d.eval(3.0), 3.0);
        assert_eq!(m(&[(-1.0, 0.5), (1.0, 0.5)]).put().eval(0.0), 0.5);
        let p = m(&[(-2.0, 0.5), (1.0, 0.5)]).potentials();
        assert_eq!(p.call.eval(0.0), 0.5);
        assert_eq!(p.put.eval(0.0), 1.0);
        assert_eq!(p.u.eval(0.0), -1.5);
    }

    #[test]
    fn empty_measure_potentials_vanish() {
        let p = DiscreteMeasure::empty().potentials();
        assert_eq!(p.put.eval(4.0), 0.0);
        assert_eq!(p.call.eval(-4.0), 0.0);
    }

    #[test]
    fn wasserstein_examples() {
        let d0 = m(&[(0.0, 1.0)]);
        let d1 = m(&[(1.0, 1.0)]);
        let s = m(&[(-1.0, 0.5), (1.0, 0.5)]);
        assert_eq!(d0.wasserstein1(&d1).unwrap(), 1.0);
        assert_eq!(s.wasserstein1(&s).unwrap(), 0.0);
        assert_eq!(d0.wasserstein1(&s).unwrap(), 1.0);
        assert!(matches!(
            d0.wasserstein1(&d0.scaled(0.5)),
            Err(Error::MassMismatch(..))
        ));
    }

    #[test]
    fn order_check_examples() {
        let d0 = m(&[(0.0, 1.0)]);
        let d1 = m(&[(1.0, 1.0)]);
        assert!(order_check(OrderRelation::Cd, &d1, &d0));
        assert!(!order_check(OrderRelation::Cd, &d0, &d1));
        let half0 = m(&[(0.0, 0.5)]);
        let s = m(&[(-1.0, 0.5), (1.0, 0.5)]);
        assert!(order_check(OrderRelation::Pcd, &half0, &s));
        assert!(order_check(OrderRelation::Pc, &half0, &s));
        assert!(!order_check(OrderRelation::Cd, &half0, &s));
        assert!(order_check(OrderRelation::C, &d0, &s));
        assert!(order_check(OrderRelation::Sto, &d0, &d1));
        assert!(!order_check(OrderRelation::Sto, &d1, &d0));
        assert!(order_check(OrderRelation::Leq, &half0, &d0));
        assert!(!order_check(OrderRelation::Leq, &d0, &half0));
        // δ_1 ≤_pcd δ_0 but not ≤_pc: calls disagree.
        assert!(order_check(OrderRelation::Pcd, &d1, &d0));
        assert!(!order_check(OrderRelation::Pc, &d1, &d0));
    }

    #[test]
    fn up_down_examples() {
        let d0 = m(&[(0.0, 1.0)]);
        let d1 = m(&[(1.0, 1.0)]);
        assert_eq!(d0.up_down(&d1, UpDown::Up).unwrap(), d1);
        let wide = m(&[(-2.0, 0.5), (2.0, 0.5)]);
        assert_eq!(
            wide.up_down(&d0, UpDown::Down).unwrap(),
            m(&[(-2.0, 0.5), (0.0, 0.5)])
        );
        assert_eq!(wide.up_down(&wide, UpDown::Down).unwrap(), wide);
        assert!(d0.up_down(&wide.scaled(2.0), UpDown::Up).is_err());
    }

    #[test]
    fn restrict_examples() {
        let a = m(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(
            a.restrict(1.0, f64::INFINITY, true, false),
            m(&[(1.0, 0.5)])
        );
        assert_eq!(
            a.restrict(f64::NEG_INFINITY, f64::INFINITY, false, false),
            a
        );
        assert!(a.restrict(0.0, 1.0, false, false).is_empty());
    }

    #[test]
    fn sub_cancels_exactly() {
        let a = m(&[(0.0, 0.5), (1.0, 0.5)]);
        let b = m(&[(1.0, 0.5)]);
        assert_eq!(a.sub(&b), m(&[(0.0, 0.5)]));
        assert!(a.sub(&a).is_empty());
    }
}
