//! JSON tree files.
//!
//! ```json
//! {
//!   "format": 1,
//!   "root": {
//!     "kind": "sequence",
//!     "id": 0,
//!     "children": [
//!       { "kind": "condition", "id": 1, "literal": "seen(soda)" },
//!       { "kind": "action", "id": 2, "action": "detect(soda)" }
//!     ]
//!   }
//! }
//! ```
//!
//! `kind` is one of `sequence`, `fallback`, `skipper`, `condition`, `action`.
//! Literals and actions are referenced by grounded name, so a file is only
//! meaningful together with its domain. Latches are not stored; a loaded tree
//! starts fresh.

use serde::{Deserialize, Serialize};

use crate::domain::GroundedDomain;
use crate::tree::{Control, Node, NodeId, NodeKind};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFile {
    format: u32,
    root: FileNode,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FileNode {
    Sequence { id: u32, children: Vec<FileNode> },
    Fallback { id: u32, children: Vec<FileNode> },
    Skipper { id: u32, children: Vec<FileNode> },
    Condition { id: u32, literal: String },
    Action { id: u32, action: String },
}

fn to_file(node: &Node, domain: &GroundedDomain) -> Result<FileNode> {
    let id = node.id.0;
    Ok(match &node.kind {
        NodeKind::Control { control, children } => {
            let children = children
                .iter()
                .map(|c| to_file(c, domain))
                .collect::<Result<Vec<_>>>()?;
            match control {
                Control::Sequence => FileNode::Sequence { id, children },
                Control::Fallback => FileNode::Fallback { id, children },
                Control::Skipper => FileNode::Skipper { id, children },
            }
        }
        NodeKind::Condition { literal } => FileNode::Condition {
            id,
            literal: domain
                .literal(*literal)
                .ok_or_else(|| Error::UnknownLiteral(literal.to_string()))?
                .name
                .clone(),
        },
        NodeKind::Action { action, .. } => FileNode::Action {
            id,
            action: domain.action(*action)?.name.clone(),
        },
    })
}

fn from_file(node: FileNode, domain: &GroundedDomain) -> Result<Node> {
    let control = |id: u32, c: Control, children: Vec<FileNode>| -> Result<Node> {
        let children = children
            .into_iter()
            .map(|c| from_file(c, domain))
            .collect::<Result<Vec<_>>>()?;
        Ok(Node::control(NodeId(id), c, children))
    };
    match node {
        FileNode::Sequence { id, children } => control(id, Control::Sequence, children),
        FileNode::Fallback { id, children } => control(id, Control::Fallback, children),
        FileNode::Skipper { id, children } => control(id, Control::Skipper, children),
        FileNode::Condition { id, literal } => Ok(Node::condition(NodeId(id), domain.literal_id(&literal)?)),
        FileNode::Action { id, action } => Ok(Node::action(NodeId(id), domain.action_id(&action)?)),
    }
}

/// Serializes `tree` as pretty-printed JSON with a trailing newline.
pub fn to_json(tree: &Node, domain: &GroundedDomain) -> Result<String> {
    let file = TreeFile {
        format: FORMAT_VERSION,
        root: to_file(tree, domain)?,
    };
    let mut out = serde_json::to_string_pretty(&file)?;
    out.push('\n');
    Ok(out)
}

/// Parses and validates a tree file against `domain`.
pub fn from_json(text: &str, domain: &GroundedDomain) -> Result<Node> {
    let file: TreeFile = serde_json::from_str(text)?;
    if file.format != FORMAT_VERSION {
        return Err(Error::InvalidTree(format!(
            "unsupported format {} (expected {FORMAT_VERSION})",
            file.format
        )));
    }
    let tree = from_file(file.root, domain)?;
    tree.validate()?;
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ground, parse_domain, SODA_DOMAIN};
    use crate::planner::{refine_tree, PlanRequest};

    fn soda() -> GroundedDomain {
        ground(&parse_domain(SODA_DOMAIN).unwrap()).unwrap()
    }

    #[test]
    fn planned_tree_round_trips() {
        let d = soda();
        let plan = refine_tree(&PlanRequest::from_domain(&d).unwrap()).unwrap();
        let text = to_json(&plan.tree, &d).unwrap();
        assert_eq!(from_json(&text, &d).unwrap(), plan.tree);
        assert!(text.starts_with("{\n  \"format\": 1,"));
    }

    #[test]
    fn rejects_bad_files() {
        let d = soda();
        let wrong_format = r#"{"format":2,"root":{"kind":"condition","id":0,"literal":"seen(soda)"}}"#;
        assert!(matches!(from_json(wrong_format, &d), Err(Error::InvalidTree(_))));
        let unknown = r#"{"format":1,"root":{"kind":"condition","id":0,"literal":"seen(cup)"}}"#;
        assert!(matches!(from_json(unknown, &d), Err(Error::UnknownLiteral(_))));
        let dup = r#"{"format":1,"root":{"kind":"sequence","id":0,"children":[
            {"kind":"condition","id":0,"literal":"seen(soda)"}]}}"#;
        assert!(matches!(from_json(dup, &d), Err(Error::InvalidTree(_))));
        let empty = r#"{"format":1,"root":{"kind":"fallback","id":0,"children":[]}}"#;
        assert!(matches!(from_json(empty, &d), Err(Error::InvalidTree(_))));
        assert!(matches!(from_json("{", &d), Err(Error::TreeFile(_))));
        let bad_kind = r#"{"format":1,"root":{"kind":"parallel","id":0,"children":[]}}"#;
        assert!(matches!(from_json(bad_kind, &d), Err(Error::TreeFile(_))));
    }
}
