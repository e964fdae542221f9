//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string; errors become JS exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use awe::feature::{exact_embedding, l1_distance, required_samples, sampled_embedding, SamplingPlan};
use awe::graph::generate_erdos_renyi;
use awe::walk::{enumerate_vocabulary, RandomWalkGraph};

/// Longest walk the page will draw bars for.
const MAX_DEMO_LENGTH: usize = 7;
const MAX_LISTED: usize = 2000;

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

pub fn vocabulary_json(length: usize) -> Result<Value, String> {
    let vocab = enumerate_vocabulary(length).map_err(|e| e.to_string())?;
    let walks: Vec<String> = vocab.iter().take(MAX_LISTED).map(|w| w.to_string()).collect();
    Ok(json!({ "length": length, "eta": vocab.len(), "walks": walks }))
}

pub fn compare_json(nodes: usize, p: f64, length: usize, samples: u64, seed: u64) -> Result<Value, String> {
    if length > MAX_DEMO_LENGTH {
        return Err(format!("the demo draws walk lengths up to {MAX_DEMO_LENGTH}"));
    }
    if !(2..=60).contains(&nodes) {
        return Err("node count must be between 2 and 60".into());
    }
    let err = |e: awe::Error| e.to_string();
    let graph = generate_erdos_renyi(nodes, p, seed).map_err(err)?;
    if graph.edge_count() == 0 {
        return Err("the sampled graph has no edges; raise p".into());
    }
    let vocab = enumerate_vocabulary(length).map_err(err)?;
    let rwg = RandomWalkGraph::new(&graph);
    let exact = exact_embedding(&rwg, &vocab).map_err(err)?;
    let plan = SamplingPlan::fixed(samples).map_err(err)?;
    let sampled = sampled_embedding(&rwg, &vocab, &plan, seed).map_err(err)?;
    let edges: Vec<[usize; 2]> = graph.edges().map(|a| [a.source, a.target]).collect();
    Ok(json!({
        "nodes": nodes,
        "edges": edges,
        "eta": vocab.len(),
        "walks": vocab.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "exact": exact.to_dense(),
        "sampled": sampled.to_dense(),
        "samples": samples,
        "l1": l1_distance(&exact, &sampled).map_err(err)?,
    }))
}

pub fn bound_json(delta: f64, length: usize) -> Result<Value, String> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err("delta must be in (0, 1)".into());
    }
    let eta = enumerate_vocabulary(length).map_err(|e| e.to_string())?.len();
    let eps: Vec<f64> = (1..=20).map(|i| i as f64 / 40.0).collect();
    let m: Vec<u64> = eps.iter().map(|&e| required_samples(e, delta, eta)).collect();
    Ok(json!({ "length": length, "eta": eta, "delta": delta, "epsilon": eps, "samples": m }))
}

/// All anonymous walks of `length` edges (the first 2000 when longer).
#[wasm_bindgen]
pub fn vocabulary(length: usize) -> Result<String, JsValue> {
    to_js(vocabulary_json(length))
}

/// Random graph with its exact and sampled walk distributions.
#[wasm_bindgen]
pub fn compare(nodes: usize, p: f64, length: usize, samples: u64, seed: u64) -> Result<String, JsValue> {
    to_js(compare_json(nodes, p, length, samples, seed))
}

/// Walks needed for an L1 error of ε with probability 1 − δ, over an ε grid.
#[wasm_bindgen]
pub fn sample_bound(delta: f64, length: usize) -> Result<String, JsValue> {
    to_js(bound_json(delta, length))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_listing() {
        let v = vocabulary_json(3).unwrap();
        assert_eq!(v["eta"], 5);
        assert_eq!(v["walks"][0], "1 2 1 2");
        assert!(vocabulary_json(20).is_err());
    }

    #[test]
    fn comparison() {
        let v = compare_json(8, 0.5, 3, 5000, 2).unwrap();
        let exact: Vec<f64> = serde_json::from_value(v["exact"].clone()).unwrap();
        assert_eq!(exact.len(), 5);
        assert!(v["l1"].as_f64().unwrap() < 0.2);
        assert!(compare_json(8, 0.5, 9, 10, 2).is_err());
    }

    #[test]
    fn bound_curve() {
        let v = bound_json(0.05, 7).unwrap();
        assert_eq!(v["eta"], 877);
        let m: Vec<u64> = serde_json::from_value(v["samples"].clone()).unwrap();
        assert!(m.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(m[19], 4888);
    }
}
