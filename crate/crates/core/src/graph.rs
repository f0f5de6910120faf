//! Layered labeled graphs of modules.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{input, Result};
use crate::presentation::Quiver;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GNode {
    pub id: String,
    pub layer: usize,
    /// Internal (0-based) vertex.
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GEdge {
    pub up: usize,
    pub down: usize,
    pub arrow: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LayeredGraph {
    pub nodes: Vec<GNode>,
    pub edges: Vec<GEdge>,
    pub tops: Vec<usize>,
    /// False when the graph was produced from a basis that is not adapted to the tops.
    pub canonical: bool,
}

impl LayeredGraph {
    pub fn new() -> Self {
        LayeredGraph { canonical: true, ..Default::default() }
    }

    pub fn add_node(&mut self, id: impl Into<String>, layer: usize, vertex: usize) -> usize {
        self.nodes.push(GNode { id: id.into(), layer, vertex });
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, up: usize, down: usize, arrow: usize) {
        self.edges.push(GEdge { up, down, arrow: Some(arrow) });
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        let depth = self.nodes.iter().map(|n| n.layer + 1).max().unwrap_or(0);
        let mut out = vec![0; depth];
        for n in &self.nodes {
            out[n.layer] += 1;
        }
        out
    }

    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &GEdge> {
        self.edges.iter().filter(move |e| e.up == node)
    }

    pub fn in_edges(&self, node: usize) -> impl Iterator<Item = &GEdge> {
        self.edges.iter().filter(move |e| e.down == node)
    }

    /// Parses the JSON form `{nodes:[{id,layer,vertex}], edges:[{up,down,arrow}], tops:[id]}`.
    pub fn from_json(text: &str, q: &Quiver) -> Result<Self> {
        let v: Value = serde_json::from_str(text).or_else(|e| input(format!("graph json: {e}")))?;
        Self::from_value(&v, q)
    }

    pub fn from_value(v: &Value, q: &Quiver) -> Result<Self> {
        let id_of = |x: &Value| -> Result<String> {
            match x {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => input("node ids must be strings or numbers"),
            }
        };
        let mut g = LayeredGraph::new();
        let nodes = v.get("nodes").and_then(Value::as_array).ok_or_else(|| crate::error::Error::Input("graph json: missing nodes".into()))?;
        for n in nodes {
            let id = id_of(n.get("id").unwrap_or(&Value::Null))?;
            let layer = n.get("layer").and_then(Value::as_u64);
            let vertex = n.get("vertex").and_then(Value::as_u64);
            let (Some(layer), Some(vertex)) = (layer, vertex) else {
                return input(format!("graph json: node {id} needs layer and vertex"));
            };
            if vertex == 0 || vertex as usize > q.n {
                return input(format!("graph json: node {id} has unknown vertex {vertex}"));
            }
            if g.node_index(&id).is_some() {
                return input(format!("graph json: duplicate node id {id}"));
            }
            g.add_node(id, layer as usize, vertex as usize - 1);
        }
        let lookup = |g: &LayeredGraph, x: Option<&Value>| -> Result<usize> {
            let id = id_of(x.unwrap_or(&Value::Null))?;
            g.node_index(&id).ok_or_else(|| crate::error::Error::Input(format!("graph json: unknown node {id}")))
        };
        for e in v.get("edges").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
            let up = lookup(&g, e.get("up"))?;
            let down = lookup(&g, e.get("down"))?;
            let arrow = match e.get("arrow") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => match q.arrow_index(s) {
                    Some(a) => Some(a),
                    None => return input(format!("graph json: unknown arrow {s}")),
                },
                _ => return input("graph json: arrow labels must be strings"),
            };
            g.edges.push(GEdge { up, down, arrow });
        }
        for t in v.get("tops").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
            let i = lookup(&g, Some(t))?;
            g.tops.push(i);
        }
        Ok(g)
    }

    pub fn to_value(&self, q: &Quiver) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| json!({"id": n.id, "layer": n.layer, "vertex": n.vertex + 1}))
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| {
                json!({
                    "up": self.nodes[e.up].id,
                    "down": self.nodes[e.down].id,
                    "arrow": e.arrow.map(|a| q.arrow_name(a).to_string()),
                })
            })
            .collect();
        let tops: Vec<Value> = self.tops.iter().map(|&t| json!(self.nodes[t].id)).collect();
        json!({"nodes": nodes, "edges": edges, "tops": tops, "canonical": self.canonical})
    }

    pub fn to_dot(&self, q: &Quiver, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=TB;\n");
        let depth = self.nodes.iter().map(|n| n.layer + 1).max().unwrap_or(0);
        for layer in 0..depth {
            let _ = write!(s, "  {{ rank=same;");
            for (i, n) in self.nodes.iter().enumerate() {
                if n.layer == layer {
                    let _ = write!(s, " n{i};");
                }
            }
            s.push_str(" }\n");
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = if self.tops.contains(&i) { ", shape=box" } else { "" };
            let _ = writeln!(s, "  n{i} [label=\"{}\"{shape}];", n.vertex + 1);
        }
        for e in &self.edges {
            let label = e.arrow.map(|a| q.arrow_name(a).to_string()).unwrap_or_default();
            let _ = writeln!(s, "  n{} -> n{} [label=\"{label}\", arrowhead=none];", e.up, e.down);
        }
        s.push_str("}\n");
        s
    }
}

/// Checks labels against vertices and layering; fills in unlabeled edges when
/// exactly one arrow joins the two vertices.
pub fn validate_graph(g: &LayeredGraph, q: &Quiver) -> Result<LayeredGraph> {
    let mut out = g.clone();
    for e in out.edges.iter_mut() {
        let (u, d) = (&g.nodes[e.up], &g.nodes[e.down]);
        match e.arrow {
            Some(a) => {
                let arr = &q.arrows[a];
                if arr.source != u.vertex || arr.target != d.vertex {
                    return input(format!(
                        "edge {}-{} labeled {} joins vertices {} and {}",
                        u.id,
                        d.id,
                        arr.name,
                        u.vertex + 1,
                        d.vertex + 1
                    ));
                }
            }
            None => {
                let cands = q.arrows_between(u.vertex, d.vertex);
                if cands.len() != 1 {
                    return input(format!("edge {}-{} needs an arrow label", u.id, d.id));
                }
                e.arrow = Some(cands[0]);
            }
        }
        if d.layer <= u.layer {
            return input(format!("edge {}-{} does not descend", u.id, d.id));
        }
    }
    for &t in &out.tops {
        if out.nodes[t].layer != 0 {
            return input(format!("top {} is not on layer 0", out.nodes[t].id));
        }
    }
    let mut seen = HashSet::new();
    for e in &out.edges {
        if !seen.insert((e.up, e.down, e.arrow)) {
            return input("duplicate edge");
        }
    }
    Ok(out)
}

type EdgeMap = HashMap<(usize, usize), Vec<usize>>;

fn edge_map(g: &LayeredGraph) -> EdgeMap {
    let mut m: EdgeMap = HashMap::new();
    for e in &g.edges {
        m.entry((e.up, e.down)).or_default().push(e.arrow.unwrap_or(usize::MAX));
    }
    for v in m.values_mut() {
        v.sort_unstable();
    }
    m
}

fn signature(g: &LayeredGraph, i: usize) -> (usize, usize, Vec<(bool, usize)>) {
    let mut s: Vec<(bool, usize)> = g
        .edges
        .iter()
        .filter_map(|e| {
            let a = e.arrow.unwrap_or(usize::MAX);
            if e.up == i {
                Some((true, a))
            } else if e.down == i {
                Some((false, a))
            } else {
                None
            }
        })
        .collect();
    s.sort_unstable();
    (g.nodes[i].layer, g.nodes[i].vertex, s)
}

/// Layer- and label-preserving isomorphism, as a node map from `a` to `b`.
pub fn graph_isomorphism(a: &LayeredGraph, b: &LayeredGraph) -> Option<Vec<usize>> {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return None;
    }
    let sa: Vec<_> = (0..a.nodes.len()).map(|i| signature(a, i)).collect();
    let sb: Vec<_> = (0..b.nodes.len()).map(|i| signature(b, i)).collect();
    let mut ca: BTreeMap<_, usize> = BTreeMap::new();
    let mut cb: BTreeMap<_, usize> = BTreeMap::new();
    for s in &sa {
        *ca.entry(s.clone()).or_default() += 1;
    }
    for s in &sb {
        *cb.entry(s.clone()).or_default() += 1;
    }
    if ca != cb {
        return None;
    }
    let ea = edge_map(a);
    let eb = edge_map(b);
    // Visit nodes so that each one (after the first of a component) touches a visited one.
    let n = a.nodes.len();
    let mut adj = vec![Vec::new(); n];
    for e in &a.edges {
        adj[e.up].push(e.down);
        adj[e.down].push(e.up);
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        k: usize,
        order: &[usize],
        sa: &[(usize, usize, Vec<(bool, usize)>)],
        sb: &[(usize, usize, Vec<(bool, usize)>)],
        ea: &EdgeMap,
        eb: &EdgeMap,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let x = order[k];
        for y in 0..sb.len() {
            if used[y] || sa[x] != sb[y] {
                continue;
            }
            let ok = order[..k].iter().all(|&z| {
                let w = map[z];
                ea.get(&(x, z)) == eb.get(&(y, w)) && ea.get(&(z, x)) == eb.get(&(w, y))
            });
            if !ok {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if rec(k + 1, order, sa, sb, ea, eb, map, used) {
                return true;
            }
            used[y] = false;
            map[x] = usize::MAX;
        }
        false
    }
    rec(0, &order, &sa, &sb, &ea, &eb, &mut map, &mut used).then_some(map)
}

pub fn graph_equivalent(a: &LayeredGraph, b: &LayeredGraph) -> bool {
    graph_isomorphism(a, b).is_some()
}

/// Builds a graph from a compact description: nodes `"id:vertex@layer"` and
/// edges `"up-arrow-down"`; tops are the layer-0 nodes in listed order.
pub fn graph_from_lists(q: &Quiver, nodes: &[&str], edges: &[&str]) -> Result<LayeredGraph> {
    let mut g = LayeredGraph::new();
    for n in nodes {
        let (id, rest) = n.split_once(':').ok_or_else(|| crate::error::Error::Input(format!("bad node {n}")))?;
        let (v, l) = rest.split_once('@').ok_or_else(|| crate::error::Error::Input(format!("bad node {n}")))?;
        let v: usize = v.parse().map_err(|_| crate::error::Error::Input(format!("bad node {n}")))?;
        let l: usize = l.parse().map_err(|_| crate::error::Error::Input(format!("bad node {n}")))?;
        if v == 0 || v > q.n {
            return input(format!("bad vertex in {n}"));
        }
        g.add_node(id, l, v - 1);
    }
    for e in edges {
        let parts: Vec<&str> = e.split('-').collect();
        let (up, arrow, down) = match parts.as_slice() {
            [u, a, d] => (*u, Some(*a), *d),
            [u, d] => (*u, None, *d),
            _ => return input(format!("bad edge {e}")),
        };
        let up = g.node_index(up).ok_or_else(|| crate::error::Error::Input(format!("unknown node in {e}")))?;
        let down = g.node_index(down).ok_or_else(|| crate::error::Error::Input(format!("unknown node in {e}")))?;
        let arrow = match arrow {
            Some(a) => Some(q.arrow_index(a).ok_or_else(|| crate::error::Error::Input(format!("unknown arrow in {e}")))?),
            None => None,
        };
        g.edges.push(GEdge { up, down, arrow });
    }
    g.tops = (0..g.nodes.len()).filter(|&i| g.nodes[i].layer == 0).collect();
    validate_graph(&g, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn quiver() -> Quiver {
        parse_presentation(
            "quiver { vertices 1..3; arrow a : 1 -> 2; arrow b : 1 -> 2; arrow c : 2 -> 3; } relations { loewy 3 }",
        )
        .unwrap()
        .quiver
    }

    #[test]
    fn json_roundtrip() {
        let q = quiver();
        let g = graph_from_lists(&q, &["x:1@0", "y:2@1", "z:3@2"], &["x-a-y", "y-z"]).unwrap();
        assert_eq!(g.edges[1].arrow, q.arrow_index("c"));
        let text = g.to_value(&q).to_string();
        let h = LayeredGraph::from_json(&text, &q).unwrap();
        assert!(graph_equivalent(&g, &h));
    }

    #[test]
    fn rejects_mislabeled_edge() {
        let q = quiver();
        assert!(graph_from_lists(&q, &["x:2@0", "y:3@1"], &["x-a-y"]).is_err());
        assert!(graph_from_lists(&q, &["x:1@0", "y:2@1"], &["x-y"]).is_err());
    }

    #[test]
    fn labels_matter() {
        let q = quiver();
        let g = graph_from_lists(&q, &["x:1@0", "y:2@1"], &["x-a-y"]).unwrap();
        let h = graph_from_lists(&q, &["x:1@0", "y:2@1"], &["x-b-y"]).unwrap();
        assert!(!graph_equivalent(&g, &h));
    }

    #[test]
    fn permuted_copy_is_equivalent() {
        let q = quiver();
        let g = graph_from_lists(&q, &["x:1@0", "w:1@0", "y:2@1", "u:2@1"], &["x-a-y", "w-b-y", "w-a-u"]).unwrap();
        let h = graph_from_lists(&q, &["u:2@1", "w:1@0", "y:2@1", "x:1@0"], &["x-a-y", "w-b-y", "w-a-u"]).unwrap();
        assert!(graph_equivalent(&g, &h));
        let k = graph_from_lists(&q, &["x:1@0", "w:1@0", "y:2@1", "u:2@1"], &["x-a-y", "w-b-y", "x-a-u"]);
        assert!(!graph_equivalent(&g, &k.unwrap()));
    }
}
