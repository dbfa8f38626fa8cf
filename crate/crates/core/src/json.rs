//! JSON forms of measures, couplings and piecewise-linear functions.
//!
//! Integral values are written as integers, other finite values with the
//! shortest representation that round-trips, and infinities as the strings
//! `"inf"` / `"-inf"`.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::coupling::DiscreteCoupling;
use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::pwl::PiecewiseLinear;

const EXACT_INT: f64 = 9_007_199_254_740_992.0;

pub fn number(x: f64) -> Value {
    if x == f64::INFINITY {
        Value::from("inf")
    } else if x == f64::NEG_INFINITY {
        Value::from("-inf")
    } else if x.is_nan() {
        Value::Null
    } else if x.fract() == 0.0 && x.abs() < EXACT_INT {
        // -0.0 prints as 0.
        Value::from(x as i64)
    } else {
        Value::from(x)
    }
}

pub fn numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| number(x)).collect())
}

/// Reads a number written by [`number`].
pub fn read_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) if s == "inf" => Some(f64::INFINITY),
        Value::String(s) if s == "-inf" => Some(f64::NEG_INFINITY),
        _ => None,
    }
}

pub fn measure(m: &DiscreteMeasure) -> Value {
    let atoms: Vec<Value> = m
        .atoms()
        .iter()
        .map(|a| {
            let mut o = Map::new();
            o.insert("x".into(), number(a.x));
            o.insert("w".into(), number(a.w));
            Value::Object(o)
        })
        .collect();
    json!({ "atoms": atoms })
}

pub fn coupling(c: &DiscreteCoupling) -> Value {
    let cells: Vec<Value> = c
        .cells()
        .iter()
        .map(|&(x, y, w)| {
            let mut o = Map::new();
            o.insert("x".into(), number(x));
            o.insert("y".into(), number(y));
            o.insert("w".into(), number(w));
            Value::Object(o)
        })
        .collect();
    json!({ "cells": cells })
}

pub fn pwl(p: &PiecewiseLinear) -> Value {
    let mut o = Map::new();
    o.insert("breakpoints".into(), numbers(p.breakpoints()));
    o.insert("values".into(), numbers(p.values()));
    o.insert("lslope".into(), number(p.left_tail_slope()));
    o.insert("rslope".into(), number(p.right_tail_slope()));
    Value::Object(o)
}

#[derive(Deserialize)]
struct RawAtom {
    x: f64,
    w: f64,
}

#[derive(Deserialize)]
struct RawMeasure {
    atoms: Vec<RawAtom>,
}

/// Parses `{"atoms": [{"x": .., "w": ..}, ...]}`; atoms may come in any order.
pub fn parse_measure(text: &str) -> Result<DiscreteMeasure> {
    let raw: RawMeasure = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    DiscreteMeasure::new(raw.atoms.into_iter().map(|a| (a.x, a.w)))
}

pub fn parse_pwl(text: &str) -> Result<PiecewiseLinear> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let list = |key: &str| -> Result<Vec<f64>> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("missing array `{key}`")))?
            .iter()
            .map(|x| read_number(x).ok_or_else(|| Error::Parse(format!("bad number in `{key}`"))))
            .collect()
    };
    let scalar = |key: &str| -> Result<f64> {
        v.get(key)
            .and_then(read_number)
            .ok_or_else(|| Error::Parse(format!("missing number `{key}`")))
    };
    PiecewiseLinear::new(
        list("breakpoints")?,
        list("values")?,
        scalar("lslope")?,
        scalar("rslope")?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(number(-1.0).to_string(), "-1");
        assert_eq!(number(0.25).to_string(), "0.25");
        assert_eq!(number(-0.0).to_string(), "0");
        assert_eq!(number(f64::INFINITY).to_string(), "\"inf\"");
        assert_eq!(number(0.1 + 0.2).to_string(), "0.30000000000000004");
    }

    #[test]
    fn measure_round_trip() {
        let text = r#"{"atoms":[{"x":1,"w":0.5},{"x":-1,"w":0.25}]}"#;
        let m = parse_measure(text).unwrap();
        let out = measure(&m).to_string();
        assert_eq!(out, r#"{"atoms":[{"x":-1,"w":0.25},{"x":1,"w":0.5}]}"#);
        assert_eq!(parse_measure(&out).unwrap(), m);
        assert!(matches!(parse_measure("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_measure(r#"{"atoms":[{"x":0,"w":-1}]}"#),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn pwl_round_trip() {
        let p = DiscreteMeasure::new([(0.0, 1.0)]).unwrap().put();
        let v = pwl(&p);
        assert_eq!(
            v.to_string(),
            r#"{"breakpoints":[0],"values":[0],"lslope":0,"rslope":1}"#
        );
        assert_eq!(parse_pwl(&v.to_string()).unwrap(), p);
    }
}
