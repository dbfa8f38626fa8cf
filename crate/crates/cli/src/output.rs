//! JSON documents for the subcommands.

use serde_json::{json, Map, Value};
use shadow_transport::coupling::{ComponentKind, Decomposition, RsPoint};
use shadow_transport::experiments::StabilityReport;
use shadow_transport::json::{measure, number, pwl};
use shadow_transport::verify::OptimalityReport;
use shadow_transport::{CCurve, LiftKind, LiftedCoupling};

fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut o = Map::new();
    for (k, v) in pairs {
        o.insert(k.to_string(), v);
    }
    Value::Object(o)
}

fn intervals(xs: &[(f64, f64)]) -> Value {
    Value::Array(
        xs.iter()
            .map(|&(a, b)| json!([number(a), number(b)]))
            .collect(),
    )
}

pub fn rs_rows(points: &[RsPoint]) -> Value {
    let rows: Vec<Value> = points
        .iter()
        .map(|p| {
            object(vec![
                ("u", number(p.u)),
                ("g", number(p.g)),
                ("r", number(p.r)),
                ("s", number(p.s)),
                ("phi", number(p.phi)),
            ])
        })
        .collect();
    json!({ "rows": rows })
}

pub fn c_curve(c: &CCurve) -> Value {
    object(vec![
        ("curve", pwl(&c.curve)),
        ("martingale_set", intervals(&c.martingale_set)),
        ("terminal", number(c.terminal())),
    ])
}

fn lift_name(k: LiftKind) -> &'static str {
    match k {
        LiftKind::DecreasingQuantile => "decreasing_quantile",
        LiftKind::IncreasingQuantile => "increasing_quantile",
        LiftKind::Uniform => "uniform",
        LiftKind::Custom => "custom",
    }
}

pub fn lifted(lc: &LiftedCoupling) -> Value {
    let segments: Vec<Value> = lc
        .segments()
        .iter()
        .map(|s| {
            let flows: Vec<Value> = s
                .flows
                .iter()
                .map(|f| {
                    object(vec![
                        ("source", number(f.source)),
                        ("target", number(f.target)),
                        ("rate", number(f.rate)),
                    ])
                })
                .collect();
            object(vec![
                ("lo", number(s.lo)),
                ("hi", number(s.hi)),
                ("flows", Value::Array(flows)),
            ])
        })
        .collect();
    object(vec![
        ("lift", Value::from(lift_name(lc.lift().kind()))),
        ("segments", Value::Array(segments)),
    ])
}

pub fn decomposition(d: &Decomposition) -> Value {
    let components: Vec<Value> = d
        .components
        .iter()
        .map(|c| {
            let kind = match c.kind {
                ComponentKind::Supermartingale => "SUPERMARTINGALE",
                ComponentKind::Martingale => "MARTINGALE",
                ComponentKind::Identity => "IDENTITY",
            };
            let i = &c.interval;
            object(vec![
                ("kind", Value::from(kind)),
                (
                    "interval",
                    object(vec![
                        ("lo", number(i.lo)),
                        ("hi", number(i.hi)),
                        ("lo_closed", Value::from(i.lo_closed)),
                        ("hi_closed", Value::from(i.hi_closed)),
                    ]),
                ),
                ("mu", measure(&c.mu)),
                ("nu", measure(&c.nu)),
            ])
        })
        .collect();
    object(vec![
        ("x_star", number(d.x_star)),
        ("components", Value::Array(components)),
        (
            "zeros",
            Value::Array(d.zeros.iter().map(|&z| number(z)).collect()),
        ),
    ])
}

pub fn optimality(r: &OptimalityReport) -> Value {
    let failures: Vec<Value> = r
        .failures
        .iter()
        .map(|f| {
            object(vec![
                ("trial", Value::from(f.trial)),
                ("seed", Value::from(f.seed)),
                ("detail", Value::from(f.detail.clone())),
            ])
        })
        .collect();
    object(vec![
        ("trials", Value::from(r.trials)),
        ("failures", Value::Array(failures)),
        ("max_value_gap", number(r.max_value_gap)),
        ("max_cell_gap", number(r.max_cell_gap)),
        ("max_duality_gap", number(r.max_duality_gap)),
    ])
}

pub fn stability(r: &StabilityReport) -> Value {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| {
            object(vec![
                ("trial", Value::from(v.trial)),
                ("bound", Value::from(v.bound)),
                ("excess", number(v.excess)),
            ])
        })
        .collect();
    let tightness = match &r.tightness {
        Some(t) => object(vec![
            ("min", number(t.min)),
            ("median", number(t.median)),
            ("max", number(t.max)),
        ]),
        None => Value::Null,
    };
    object(vec![
        ("trials", Value::from(r.trials)),
        ("violations", Value::Array(violations)),
        ("max_violation", number(r.max_violation)),
        ("tightness", tightness),
    ])
}
