//! Hand-transcribed example presentations shipped with the crate.

use serde_json::Value;

use crate::error::{input, Error, Result};
use crate::graph::{validate_graph, LayeredGraph};
use crate::presentation::{parse_module_spec, parse_presentation, ModuleSpec, Presentation, Quiver};

pub const NAMES: &[&str] = &[
    "ex1.1", "ex3-brush", "ex4.2", "ex4.3", "ex4.4", "ex4.5", "ex7.3", "ex7.5", "ex8.5", "ex8.7",
];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "ex1.1" => include_str!("../fixtures/ex1.1.alg"),
        "ex3-brush" => include_str!("../fixtures/ex3-brush.alg"),
        "ex4.2" => include_str!("../fixtures/ex4.2.alg"),
        "ex4.3" | "ex8.5" => include_str!("../fixtures/ex4.3.alg"),
        "ex4.4" => include_str!("../fixtures/ex4.4.alg"),
        "ex4.5" => include_str!("../fixtures/ex4.5.alg"),
        "ex7.3" => include_str!("../fixtures/ex7.3.alg"),
        "ex7.5" => include_str!("../fixtures/ex7.5.alg"),
        "ex8.7" => include_str!("../fixtures/ex8.7.alg"),
        _ => return None,
    })
}

pub fn presentation(name: &str) -> Result<Presentation> {
    match source(name) {
        Some(text) => parse_presentation(text),
        None => input(format!("unknown fixture {name}")),
    }
}

/// Expected graphs and module specs recorded for the worked examples.
pub fn golden_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "ex1.1" => include_str!("../fixtures/golden/ex1.1.json"),
        "ex3-brush" => include_str!("../fixtures/golden/ex3-brush.json"),
        "ex7.3" => include_str!("../fixtures/golden/ex7.3.json"),
        "ex7.5" => include_str!("../fixtures/golden/ex7.5.json"),
        "ex8.5" => include_str!("../fixtures/golden/ex8.5.json"),
        "ex8.7" => include_str!("../fixtures/golden/ex8.7.json"),
        _ => return None,
    })
}

fn golden_value(name: &str) -> Result<Value> {
    let Some(text) = golden_source(name) else {
        return input(format!("no golden data for {name}"));
    };
    serde_json::from_str(text).map_err(|e| Error::Consistency(format!("golden {name}: {e}")))
}

fn section_keys(name: &str, section: &str) -> Result<Vec<String>> {
    let v = golden_value(name)?;
    Ok(v.get(section).and_then(Value::as_object).map(|m| m.keys().cloned().collect()).unwrap_or_default())
}

pub fn golden_graph_names(name: &str) -> Result<Vec<String>> {
    section_keys(name, "graphs")
}

/// A recorded graph; the caller decides whether it should realize.
pub fn golden_graph(name: &str, key: &str, q: &Quiver) -> Result<LayeredGraph> {
    let v = golden_value(name)?;
    match v.get("graphs").and_then(|g| g.get(key)) {
        Some(g) => validate_graph(&LayeredGraph::from_value(g, q)?, q),
        None => input(format!("no golden graph {name}/{key}")),
    }
}

pub fn golden_module_names(name: &str) -> Result<Vec<String>> {
    section_keys(name, "modules")
}

pub fn golden_module(name: &str, key: &str, pres: &Presentation) -> Result<ModuleSpec> {
    let v = golden_value(name)?;
    match v.get("modules").and_then(|g| g.get(key)).and_then(Value::as_str) {
        Some(text) => parse_module_spec(text, pres),
        None => input(format!("no golden module {name}/{key}")),
    }
}
