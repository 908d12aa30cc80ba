//! Graphviz output.

use std::fmt::Write;

use crate::uogas::{FiniteOrientedGraph, Labeled, VertexId};
use crate::word::BinWord;

pub trait DotLabel {
    fn dot_label(&self) -> String;
}

macro_rules! display_label {
    ($($t:ty),*) => {$(
        impl DotLabel for $t {
            fn dot_label(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

display_label!(u32, u64, usize, char, String);

impl DotLabel for BinWord {
    fn dot_label(&self) -> String {
        if self.is_empty() {
            "∅".into()
        } else {
            self.to_string()
        }
    }
}

impl<V: DotLabel> DotLabel for Labeled<V> {
    fn dot_label(&self) -> String {
        let l: Vec<String> = self.label.iter().map(u32::to_string).collect();
        format!("({}, ({}))", self.base.dot_label(), l.join(","))
    }
}

/// `digraph` text with vertices and edges in sorted order.
pub fn to_dot<V: VertexId + DotLabel>(g: &FiniteOrientedGraph<V>, name: &str) -> String {
    let mut s = format!("digraph \"{name}\" {{\n");
    for (i, v) in g.vertices().iter().enumerate() {
        let _ = writeln!(s, "  v{i} [label=\"{}\"];", v.dot_label().replace('"', "\\\""));
    }
    for (a, b) in g.edges() {
        let ia = g.vertices().binary_search(a).unwrap();
        let ib = g.vertices().binary_search(b).unwrap();
        let _ = writeln!(s, "  v{ia} -> v{ib};");
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_output() {
        let g = FiniteOrientedGraph::from_edges(vec![(2u32, 1u32), (0, 1)]);
        assert_eq!(
            to_dot(&g, "g"),
            "digraph \"g\" {\n  v0 [label=\"0\"];\n  v1 [label=\"1\"];\n  v2 [label=\"2\"];\n  v0 -> v1;\n  v2 -> v1;\n}\n"
        );
    }
}
