//! Browser bindings. Each export returns a JSON string; the plain Rust
//! functions underneath are what the native tests exercise.

use num_bigint::BigInt;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use quadcong::cfrac::{expand, orbit, QuadIrr};
use quadcong::classgroup::class_table;
use quadcong::congruence::row;

fn parse(name: &str, s: &str) -> Result<BigInt, String> {
    s.trim().parse().map_err(|_| format!("{name}: `{s}` is not an integer"))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Expansion {
    xi: String,
    preperiod: Vec<String>,
    period: Vec<String>,
    psi: String,
    reduced: bool,
    states: Vec<String>,
}

pub fn expand_json(a: &str, b: &str, delta: &str) -> Result<String, String> {
    let xi = QuadIrr::new(parse("a", a)?, parse("b", b)?, parse("delta", delta)?).map_err(|e| e.to_string())?;
    let e = expand(&xi);
    let o = orbit(&xi);
    let strs = |v: &[BigInt]| v.iter().map(ToString::to_string).collect();
    to_json(&Expansion {
        xi: xi.to_string(),
        preperiod: strs(&e.preperiod),
        period: strs(&e.period),
        psi: e.psi().to_string(),
        reduced: xi.is_reduced(),
        states: o.states.iter().map(ToString::to_string).collect(),
    })
}

pub fn congruence_row_json(p: u32) -> Result<String, String> {
    to_json(&row(u64::from(p)).map_err(|e| e.to_string())?)
}

#[derive(Serialize)]
struct ClassRow {
    a: String,
    b: String,
    xi: String,
    psi: String,
    principal: bool,
}

#[derive(Serialize)]
struct Classes {
    delta: String,
    h: usize,
    h_plus: usize,
    narrow: Vec<ClassRow>,
}

/// Largest discriminant the page will enumerate.
pub const CLASS_TABLE_LIMIT: u64 = 10_000_000;

pub fn class_table_json(delta: &str) -> Result<String, String> {
    let d = parse("delta", delta)?;
    if d > BigInt::from(CLASS_TABLE_LIMIT) {
        return Err(format!("delta above {CLASS_TABLE_LIMIT} is too slow for the page"));
    }
    let t = class_table(&d).map_err(|e| e.to_string())?;
    let narrow = t
        .narrow_reps
        .iter()
        .map(|x| ClassRow {
            a: x.a().to_string(),
            b: x.b().to_string(),
            xi: x.to_string(),
            psi: quadcong::cfrac::hirzebruch_psi(x).to_string(),
            principal: *x == t.principal,
        })
        .collect();
    to_json(&Classes { delta: d.to_string(), h: t.h(), h_plus: t.h_plus(), narrow })
}

#[wasm_bindgen(js_name = expand)]
pub fn expand_js(a: &str, b: &str, delta: &str) -> Result<String, JsValue> {
    expand_json(a, b, delta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = congruenceRow)]
pub fn congruence_row_js(p: u32) -> Result<String, JsValue> {
    congruence_row_json(p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = classTable)]
pub fn class_table_js(delta: &str) -> Result<String, JsValue> {
    class_table_json(delta).map_err(|e| JsValue::from_str(&e))
}
