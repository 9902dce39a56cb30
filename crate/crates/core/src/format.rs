//! Canonical JSON encoding of instances.
//!
//! Numbers are decimal strings (`"1.5"`, `"inf"`); object keys are sorted,
//! edges are listed by id and critical vertices in `(side, index)` order, so
//! equal instances serialize to identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::MatroidSpec;
use crate::model::{Edge, Instance, VertexRef};
use crate::value::Value;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    u_count: usize,
    w_count: usize,
    #[serde(default)]
    critical_vertices: Vec<VertexRef>,
    edges: Vec<EdgeFile>,
    #[serde(default)]
    constraints: BTreeMap<String, MatroidSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    id: usize,
    u: usize,
    w: usize,
    p_u: Value,
    p_w: Value,
    gamma_u: Value,
    delta_u: Value,
    gamma_w: Value,
    delta_w: Value,
    #[serde(default)]
    critical: bool,
}

impl From<&Edge> for EdgeFile {
    fn from(e: &Edge) -> Self {
        EdgeFile {
            id: e.id,
            u: e.u,
            w: e.w,
            p_u: e.p_u,
            p_w: e.p_w,
            gamma_u: e.gamma_u,
            delta_u: e.delta_u,
            gamma_w: e.gamma_w,
            delta_w: e.delta_w,
            critical: e.critical,
        }
    }
}

impl From<EdgeFile> for Edge {
    fn from(e: EdgeFile) -> Self {
        Edge {
            id: e.id,
            u: e.u,
            w: e.w,
            p_u: e.p_u,
            p_w: e.p_w,
            gamma_u: e.gamma_u,
            delta_u: e.delta_u,
            gamma_w: e.gamma_w,
            delta_w: e.delta_w,
            critical: e.critical,
        }
    }
}

/// Canonical JSON value of an instance.
pub fn to_json_value(instance: &Instance) -> serde_json::Value {
    let mut edges: Vec<EdgeFile> = instance.edges.iter().map(EdgeFile::from).collect();
    edges.sort_by_key(|e| e.id);
    let file = InstanceFile {
        u_count: instance.u_count,
        w_count: instance.w_count,
        critical_vertices: instance.critical_vertices.iter().copied().collect(),
        edges,
        constraints: instance.constraints.iter().map(|(v, spec)| (v.to_string(), spec.canonical())).collect(),
    };
    // serde_json's map is ordered, so going through Value sorts every object's keys
    serde_json::to_value(file).expect("instance encodes as JSON")
}

/// Canonical pretty-printed JSON, newline terminated.
pub fn to_json(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&to_json_value(instance)).expect("instance encodes as JSON");
    s.push('\n');
    s
}

/// Parses an instance. Structural problems (ranges, thresholds, matroid
/// axioms) are left to [`Instance::validate`].
pub fn from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let mut constraints = BTreeMap::new();
    for (key, spec) in file.constraints {
        let v: VertexRef = key.parse()?;
        if constraints.insert(v, spec).is_some() {
            return Err(Error::Format(format!("duplicate constraint for {v}")));
        }
    }
    let mut edges: Vec<Edge> = file.edges.into_iter().map(Edge::from).collect();
    edges.sort_by_key(|e| e.id);
    Ok(Instance {
        u_count: file.u_count,
        w_count: file.w_count,
        edges,
        critical_vertices: file.critical_vertices.into_iter().collect(),
        constraints,
    })
}
