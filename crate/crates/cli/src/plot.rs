//! Column series for external plotting.

use serde_json::{json, Value};
use shadow_transport::coupling::{c_curve as c_of, e_function, rs_curve as rs_points};
use shadow_transport::json::number;
use shadow_transport::{make_lift, DiscreteMeasure, LiftKind, PiecewiseLinear, Result};

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|&x| number(x)).collect()))
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&x| csv_number(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_number(x: f64) -> String {
    match number(x) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

/// Breakpoints of the functions plus one unit beyond each end, where every
/// function is affine.
fn grid(fs: &[&PiecewiseLinear]) -> Vec<f64> {
    let mut xs: Vec<f64> = fs
        .iter()
        .flat_map(|f| f.breakpoints().iter().copied())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    match (xs.first().copied(), xs.last().copied()) {
        (Some(a), Some(b)) => {
            xs.insert(0, a - 1.0);
            xs.push(b + 1.0);
        }
        _ => xs = vec![-1.0, 1.0],
    }
    xs
}

/// Put, call and `U` potentials; with a target also `D = P_ν − P_μ`.
pub fn potentials(mu: &DiscreteMeasure, nu: Option<&DiscreteMeasure>) -> Table {
    let pm = mu.potentials();
    match nu {
        None => {
            let ks = grid(&[&pm.put]);
            Table {
                columns: vec!["k", "put", "call", "u"],
                rows: ks
                    .iter()
                    .map(|&k| vec![k, pm.put.eval(k), pm.call.eval(k), pm.u.eval(k)])
                    .collect(),
            }
        }
        Some(nu) => {
            let pn = nu.potentials();
            let ks = grid(&[&pm.put, &pn.put]);
            Table {
                columns: vec!["k", "put_mu", "put_nu", "d"],
                rows: ks
                    .iter()
                    .map(|&k| {
                        let (a, b) = (pm.put.eval(k), pn.put.eval(k));
                        vec![k, a, b, b - a]
                    })
                    .collect(),
            }
        }
    }
}

/// `E_u` and its convex hull.
pub fn e_hull(mu: &DiscreteMeasure, nu: &DiscreteMeasure, u: f64) -> Result<Table> {
    let e = e_function(mu, nu, u)?;
    let h = e.convex_hull()?;
    let ks = grid(&[&e]);
    Ok(Table {
        columns: vec!["k", "e", "hull"],
        rows: ks.iter().map(|&k| vec![k, e.eval(k), h.eval(k)]).collect(),
    })
}

pub fn rs_curve(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Table> {
    Ok(Table {
        columns: vec!["u", "g", "r", "s"],
        rows: rs_points(mu, nu)?
            .iter()
            .map(|p| vec![p.u, p.g, p.r, p.s])
            .collect(),
    })
}

/// `c(u)` of the decreasing lift at its breakpoints.
pub fn c_curve(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Table> {
    let lift = make_lift(LiftKind::DecreasingQuantile, mu)?;
    let c = c_of(&lift, mu, nu)?;
    Ok(Table {
        columns: vec!["u", "c"],
        rows: c
            .curve
            .breakpoints()
            .iter()
            .zip(c.curve.values())
            .map(|(&u, &v)| vec![u, v])
            .collect(),
    })
}
