//! DOT and JSON export of graphs.
//!
//! Drawing convention: black edges are solid arrows, red edges are drawn as
//! doubled lines (the `=` of the hand-drawn figures), rendered in DOT with a
//! parallel color list.

use std::fmt::Write as _;

use crate::comb::CombGraph;
use crate::degeneracy::EncodingGraph;
use crate::geometry::Component;
use crate::group::EdgeLabel;
use crate::ratvec;

fn dot_escape(s: &str) -> String {
    s.replace('"', "\\\"")
}

/// DOT text for a geometric component; vertex names are the exact points.
pub fn component_dot(c: &Component) -> String {
    let mut out = String::from("digraph component {\n");
    for (i, v) in c.vertices.iter().enumerate() {
        let _ = writeln!(
            out,
            "  p{i} [label=\"{}\"];",
            dot_escape(&ratvec::format(v))
        );
    }
    for e in &c.edges {
        let label = dot_escape(&e.label.to_string());
        match e.label {
            EdgeLabel::Black { .. } => {
                let _ = writeln!(out, "  p{} -> p{} [label=\"{label}\"];", e.from, e.to);
            }
            EdgeLabel::Red { .. } => {
                let _ = writeln!(
                    out,
                    "  p{} -> p{} [label=\"{label}\", dir=none, color=\"red:red\"];",
                    e.from, e.to
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

/// DOT text for a combinatorial graph; vertices carry their vector names
/// and their color class.
pub fn comb_graph_dot(g: &CombGraph) -> String {
    let mut out = String::from("digraph comb {\n");
    for (i, v) in g.vertices().iter().enumerate() {
        let shade = if v.mass() == -2 { ", color=red" } else { "" };
        let _ = writeln!(out, "  v{i} [label=\"{}\"{shade}];", dot_escape(&v.to_string()));
    }
    for e in g.edges() {
        let label = dot_escape(&e.label.to_string());
        match e.label {
            EdgeLabel::Black { .. } => {
                let _ = writeln!(out, "  v{} -> v{} [label=\"{label}\"];", e.from, e.to);
            }
            EdgeLabel::Red { .. } => {
                let _ = writeln!(
                    out,
                    "  v{} -> v{} [label=\"{label}\", dir=none, color=\"red:red\"];",
                    e.from, e.to
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

/// DOT text for an encoding multigraph on site indices.
pub fn encoding_graph_dot(e: &EncodingGraph) -> String {
    let mut out = String::from("graph encoding {\n");
    for i in e.indices() {
        let _ = writeln!(out, "  i{} [label=\"{}\"];", i, i + 1);
    }
    for l in &e.labels {
        let (i, j) = l.indices();
        if l.is_red() {
            let _ = writeln!(out, "  i{i} -- i{j} [color=\"red:red\"];");
        } else {
            let _ = writeln!(out, "  i{i} -- i{j};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneracy::encoding_graph;
    use crate::group::IntVector;

    #[test]
    fn dot_outputs_have_expected_shapes() {
        let g = CombGraph::full_subgraph(
            2,
            vec![IntVector(vec![0, 0]), IntVector(vec![-1, -1])],
        )
        .unwrap();
        let dot = comb_graph_dot(&g);
        assert!(dot.contains("color=\"red:red\""));
        assert!(dot.starts_with("digraph comb {"));
        let e = encoding_graph(
            2,
            &[
                crate::group::EdgeLabel::black(0, 1).unwrap(),
                crate::group::EdgeLabel::red(0, 1).unwrap(),
            ],
        );
        let dot = encoding_graph_dot(&e);
        assert!(dot.contains("i0 -- i1"));
        assert!(dot.contains("red:red"));
    }
}
