//! Numerical tolerances shared by the whole library.
//!
//! Every construction in this crate is exact for piecewise-linear inputs, so
//! the tolerances only absorb floating point noise. They are read once per
//! process; [`install`] may replace the defaults before first use (the CLI
//! does so from the `SHADOW_TRANSPORT_TOL` environment variable).

use std::sync::OnceLock;

/// Environment variable read by [`Tolerances::from_env`].
pub const TOL_ENV_VAR: &str = "SHADOW_TRANSPORT_TOL";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative distance under which two atom positions are merged.
    pub position: f64,
    /// Relative (to total mass) weight under which atoms are dropped and
    /// masses compared equal.
    pub mass: f64,
    /// Relative slack for pointwise comparisons of potential functions.
    pub order: f64,
    /// Relative slope difference under which a breakpoint is collinear.
    pub collinear: f64,
    /// Relative slack for convexity checks.
    pub convexity: f64,
    /// Relative slope under which a c-curve segment counts as flat.
    pub slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            position: 1e-12,
            mass: 1e-12,
            order: 1e-10,
            collinear: 1e-12,
            convexity: 1e-10,
            slope: 1e-10,
        }
    }
}

impl Tolerances {
    /// Parses an override string.
    ///
    /// Accepts either a bare number (replaces the order tolerance) or a
    /// comma separated list of `key=value` pairs with keys `position`,
    /// `mass`, `order`, `collinear`, `convexity`, `slope`.
    pub fn parse(spec: &str) -> Result<Tolerances, String> {
        let mut tol = Tolerances::default();
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(tol);
        }
        if let Ok(v) = spec.parse::<f64>() {
            tol.order = check_positive("order", v)?;
            return Ok(tol);
        }
        for part in spec.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let key = key.trim();
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| format!("invalid number for `{key}`: `{value}`"))?;
            let v = check_positive(key, v)?;
            match key {
                "position" => tol.position = v,
                "mass" => tol.mass = v,
                "order" => tol.order = v,
                "collinear" => tol.collinear = v,
                "convexity" => tol.convexity = v,
                "slope" => tol.slope = v,
                other => return Err(format!("unknown tolerance key `{other}`")),
            }
        }
        Ok(tol)
    }

    /// Defaults overridden by [`TOL_ENV_VAR`] when it is set.
    pub fn from_env() -> Result<Tolerances, String> {
        match std::env::var(TOL_ENV_VAR) {
            Ok(s) => Tolerances::parse(&s),
            Err(_) => Ok(Tolerances::default()),
        }
    }
}

fn check_positive(key: &str, v: f64) -> Result<f64, String> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!(
            "tolerance `{key}` must be a positive finite number"
        ))
    }
}

static GLOBAL: OnceLock<Tolerances> = OnceLock::new();

/// The process-wide tolerances (defaults unless [`install`] ran first).
pub fn get() -> &'static Tolerances {
    GLOBAL.get_or_init(Tolerances::default)
}

/// Installs process-wide tolerances. Returns `false` if they were already
/// fixed by an earlier call to [`install`] or [`get`].
pub fn install(tol: Tolerances) -> bool {
    GLOBAL.set(tol).is_ok()
}

/// `a` and `b` are the same position.
pub(crate) fn same_position(a: f64, b: f64) -> bool {
    (a - b).abs() <= get().position * (1.0 + a.abs().max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_bare_number_sets_order() {
        let t = Tolerances::parse("1e-8").unwrap();
        assert_eq!(t.order, 1e-8);
        assert_eq!(t.mass, Tolerances::default().mass);
    }

    #[test]
    fn parse_pairs() {
        let t = Tolerances::parse("mass=1e-9, slope=2e-9").unwrap();
        assert_eq!(t.mass, 1e-9);
        assert_eq!(t.slope, 2e-9);
        assert!(Tolerances::parse("bogus=1").is_err());
        assert!(Tolerances::parse("mass=-1").is_err());
        assert!(Tolerances::parse("mass").is_err());
    }
}
