//! Graphviz export.
//!
//! Nodes are emitted in preorder as `n<id>`; edges carry the child's 1-based
//! position as their label so the drawing preserves tick order.

use std::fmt::Write;

use crate::domain::GroundedDomain;
use crate::tree::{Node, NodeKind};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(tree: &Node, domain: &GroundedDomain) -> String {
    let mut out = String::from("digraph bbt {\n  ordering=out;\n");
    for (node, _) in tree.preorder() {
        let (label, shape) = match &node.kind {
            NodeKind::Control { control, .. } => (control.symbol().to_string(), "square"),
            NodeKind::Condition { literal } => (domain.literal_name(*literal), "ellipse"),
            NodeKind::Action { action, .. } => (
                domain
                    .action(*action)
                    .map(|a| a.name.clone())
                    .unwrap_or_else(|_| format!("action#{}", action.0)),
                "box",
            ),
        };
        let _ = writeln!(out, "  n{} [label=\"{}\", shape={}];", node.id, escape(&label), shape);
    }
    for (node, _) in tree.preorder() {
        for (i, child) in node.children().iter().enumerate() {
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", node.id, child.id, i + 1);
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ground, parse_domain, LiteralId};
    use crate::tree::NodeId;

    #[test]
    fn single_condition_sequence() {
        let d = ground(&parse_domain("condition a values { S F }").unwrap()).unwrap();
        let t = Node::sequence(NodeId(0), vec![Node::condition(NodeId(1), LiteralId(0))]);
        let dot = to_dot(&t, &d);
        assert_eq!(
            dot,
            "digraph bbt {\n  ordering=out;\n  n0 [label=\"→\", shape=square];\n  \
             n1 [label=\"a\", shape=ellipse];\n  n0 -> n1 [label=\"1\"];\n}\n"
        );
        assert_eq!(dot, to_dot(&t, &d));
    }
}
