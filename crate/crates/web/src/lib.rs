//! Browser demo: explore z-orbits and classes, plot the counting function
//! against the bound expressions, and draw Pratt-Fibonacci trees.
//!
//! Every exported function returns a JSON string. The `*_json` functions hold
//! the logic and are plain Rust so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fibdiv::census::{bound_report_from_count, enumerate_selfdivisors_with, CensusOptions};
use fibdiv::classify::{classify_with, enumerate_class_with};
use fibdiv::entry::{iterate_z_with, z_of_with};
use fibdiv::{pratt_fib_tree, EntryPointCache, Method};

/// Largest census bound the page will compute.
pub const MAX_CURVE_LIMIT: u64 = 2_000_000;
/// Largest class listing bound.
pub const MAX_CLASS_LIMIT: u64 = 1_000_000_000_000;

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Orbit {
    record: fibdiv::EntryPointRecord,
    chain: fibdiv::ZChain,
    class: fibdiv::DivisorClass,
    verdict: String,
    members: Vec<u64>,
    limit: u64,
}

/// `z(k)`, the orbit of `k` under `z`, and the class `A_k` up to `limit`.
pub fn orbit_json(k: u64, limit: u64) -> Result<String, String> {
    if k == 0 {
        return Err("k must be positive".into());
    }
    let limit = limit.clamp(1, MAX_CLASS_LIMIT);
    let cache = EntryPointCache::new();
    let record = z_of_with(k, &cache).map_err(|e| e.to_string())?;
    let chain = iterate_z_with(k, 200, &cache).map_err(|e| e.to_string())?;
    let class = classify_with(k, &cache).map_err(|e| e.to_string())?;
    let mut members = enumerate_class_with(k, limit, &cache).map_err(|e| e.to_string())?;
    members.truncate(500);
    to_json(&Orbit {
        record,
        chain,
        verdict: class.to_string(),
        class,
        members,
        limit,
    })
}

#[derive(Serialize)]
struct CurvePoint {
    x: u64,
    count: u64,
    log_a: Option<f64>,
    lower_aux: Option<f64>,
    upper_main: Option<f64>,
    heuristic: Option<f64>,
}

#[derive(Serialize)]
struct Curve {
    limit: u64,
    count: u64,
    points: Vec<CurvePoint>,
}

/// `A(x)` sampled at `samples` geometrically spaced points up to `limit`,
/// with the logarithmic bound expressions where they are defined.
pub fn curve_json(limit: u64, samples: u32) -> Result<String, String> {
    let limit = limit.clamp(1, MAX_CURVE_LIMIT);
    let samples = samples.clamp(2, 400);
    let opts = CensusOptions {
        jobs: 1,
        ..CensusOptions::default()
    };
    let report = enumerate_selfdivisors_with(limit, Method::EntryPoint, &opts)
        .map_err(|e| e.to_string())?;
    let members = report.members.unwrap_or_default();
    let mut xs: Vec<u64> = (0..samples)
        .map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            (limit as f64).powf(t).round().max(1.0) as u64
        })
        .collect();
    xs.dedup();
    let points = xs
        .into_iter()
        .map(|x| {
            let count = members.partition_point(|&n| n <= x) as u64;
            let b = bound_report_from_count(x, count).ok();
            CurvePoint {
                x,
                count,
                log_a: b.map(|b| b.log_a),
                lower_aux: b.map(|b| b.lower_aux),
                upper_main: b.map(|b| b.upper_main),
                heuristic: b.map(|b| b.heuristic),
            }
        })
        .collect();
    to_json(&Curve {
        limit,
        count: report.count,
        points,
    })
}

/// Pratt-Fibonacci tree of the prime `p`, as JSON plus indented text.
pub fn tree_json(p: u64, depth: u32) -> Result<String, String> {
    let tree = pratt_fib_tree(p, depth.min(40) as usize).map_err(|e| e.to_string())?;
    to_json(&serde_json::json!({
        "tree": tree,
        "text": tree.render(),
        "nodes": tree.node_count(),
        "height": tree.height(),
    }))
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn orbit(k: f64, limit: f64) -> Result<String, JsValue> {
    js(orbit_json(k as u64, limit as u64))
}

#[wasm_bindgen]
pub fn curve(limit: f64, samples: u32) -> Result<String, JsValue> {
    js(curve_json(limit as u64, samples))
}

#[wasm_bindgen]
pub fn tree(p: f64, depth: u32) -> Result<String, JsValue> {
    js(tree_json(p as u64, depth))
}
