//! JSON and DOT renderings of a stage.

use std::collections::HashSet;
use std::fmt::Write;

use serde_json::{json, Value};

use super::ApproxState;

fn name(w: &crate::word::BinWord) -> String {
    if w.is_empty() {
        "∅".into()
    } else {
        w.to_string()
    }
}

impl ApproxState {
    /// `{level, X, B: [[y, x, φ]], A: [[y, x]], E}` with `∅` for the empty
    /// word.
    pub fn to_json(&self) -> Value {
        let words: Vec<String> = self.words().iter().map(name).collect();
        let b: Vec<Value> = self.b.iter().map(|&(y, x, n)| json!([words[y as usize], words[x as usize], n])).collect();
        let a: Vec<Value> = self.a.edges().map(|(y, x)| json!([words[y as usize], words[x as usize]])).collect();
        let e: Vec<&String> = (0..self.len()).filter(|&i| self.e[i]).map(|i| &words[i]).collect();
        json!({ "level": self.level, "X": words, "B": b, "A": a, "E": e })
    }

    /// `A_l` edges solid, the rest of `B_l` dashed, `E_l` cells boxed.
    pub fn to_dot(&self) -> String {
        let words: Vec<String> = self.words().iter().map(name).collect();
        let mut s = format!("digraph \"stage_{}\" {{\n", self.level);
        for (i, wd) in words.iter().enumerate() {
            let shape = if self.e[i] { "box" } else { "ellipse" };
            let _ = writeln!(s, "  v{i} [label=\"{wd}\", shape={shape}];");
        }
        let a: HashSet<(u32, u32)> = self.a.edges().collect();
        for &(y, x, n) in &self.b {
            let style = if a.contains(&(y, x)) { "solid" } else { "dashed" };
            let _ = writeln!(s, "  v{y} -> v{x} [label=\"{n}\", style={style}];");
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use crate::approx::ApproxSystem;
    use crate::seq::FamilyLevel;

    #[test]
    fn second_stage_json() {
        let st = ApproxSystem::new(FamilyLevel::new(1).unwrap()).run(2).unwrap();
        let j = st[2].to_json();
        assert_eq!(j["X"], serde_json::json!(["00", "01", "10", "11"]));
        assert_eq!(j["A"], serde_json::json!([["00", "01"]]));
        assert_eq!(j["B"], serde_json::json!([["00", "01", 0]]));
        assert_eq!(st[0].to_json()["E"], serde_json::json!(["∅"]));
        assert!(st[2].to_dot().contains("v0 -> v1 [label=\"0\", style=solid];"));
    }
}
