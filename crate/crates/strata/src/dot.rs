//! DOT emission for level graphs and boundary complexes. Vertical
//! edges are drawn top-to-bottom (upper level first); horizontal
//! edges are dashed and unconstrained.

use crate::connectivity::BoundaryComplex;
use crate::graph::LevelGraph;
use std::fmt::Write;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders a level graph as a DOT digraph. Vertices at the same level
/// share a rank; vertical edges point from the upper to the lower
/// vertex.
pub fn graph_to_dot(graph: &LevelGraph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  rankdir=TB;");
    let _ = writeln!(out, "  node [shape=circle];");
    for level in graph.levels() {
        let ids: Vec<String> = (0..graph.vertices.len())
            .filter(|&v| graph.vertices[v].level == level)
            .map(|v| format!("v{v}"))
            .collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }}", ids.join("; "));
    }
    for (v, vert) in graph.vertices.iter().enumerate() {
        let legs: Vec<String> = graph
            .legs
            .iter()
            .filter(|l| l.vertex == v)
            .map(|l| format!("z{}:{}", l.point, l.order))
            .collect();
        let label = format!(
            "g={} L={}{}{}",
            vert.genus,
            vert.level,
            if legs.is_empty() { "" } else { "\\n" },
            legs.join(" ")
        );
        let _ = writeln!(out, "  v{v} [label=\"{}\"];", escape(&label));
    }
    for e in &graph.edges {
        if e.is_horizontal() {
            let _ = writeln!(
                out,
                "  v{} -> v{} [style=dashed, dir=none, label=\"(-1,-1)\"];",
                e.a, e.b
            );
        } else {
            let ((upper, uo), (lower, lo)) = e.upper_lower();
            let _ = writeln!(
                out,
                "  v{upper} -> v{lower} [label=\"({uo},{lo})\"];"
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Renders the boundary complex as an undirected DOT graph of node
/// keys.
pub fn complex_to_dot(complex: &BoundaryComplex, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  node [shape=box, fontsize=9];");
    let ids: std::collections::BTreeMap<&String, usize> = complex
        .nodes
        .keys()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    for (key, i) in &ids {
        let _ = writeln!(out, "  n{i} [label=\"{}\"];", escape(key));
    }
    for (a, b) in complex.edges.keys() {
        if let (Some(ia), Some(ib)) = (ids.get(a), ids.get(b)) {
            let _ = writeln!(out, "  n{ia} -- n{ib};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::{build_boundary_complex, Mode};
    use crate::enumerate::Caps;
    use crate::moves::merge_zeroes;
    use crate::stratum::Signature;

    #[test]
    fn vertical_edges_point_downward_and_loops_are_dashed() {
        let sig = Signature::new(2, vec![1, 1]).unwrap();
        let divisor = merge_zeroes(&sig).unwrap().result;
        let dot = graph_to_dot(&divisor, "H_2(1,1) merge-zeroes");
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("rankdir=TB"));
        // the unique vertical edge runs from the level-0 vertex
        let top = (0..2)
            .find(|&v| divisor.vertices[v].level == 0)
            .unwrap();
        assert!(dot.contains(&format!("v{top} -> ")));

        let dhirr = crate::moves::construct_dhirr(&sig).unwrap();
        let dot = graph_to_dot(&dhirr.graph, "dhirr");
        assert!(dot.contains("style=dashed"));
    }

    #[test]
    fn braces_balance() {
        let sig = Signature::new(1, vec![2, -1, -1]).unwrap();
        let c = build_boundary_complex(&sig, &Caps::default(), Mode::Certified).unwrap();
        for dot in [
            complex_to_dot(&c, "complex"),
            graph_to_dot(&LevelGraph::smooth(&sig), "smooth"),
        ] {
            let open = dot.matches('{').count();
            let close = dot.matches('}').count();
            assert_eq!(open, close);
            assert!(dot.trim_end().ends_with('}'));
        }
    }
}
