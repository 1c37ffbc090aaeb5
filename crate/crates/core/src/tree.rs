//! Tree structure shared by the classic and belief executors and the planner.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{ActionId, LiteralId};
use crate::{Error, Result, Status};

/// Identifier of a node, unique within one tree and stable across planner edits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The three control nodes differ only in which child status lets the scan continue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Control {
    Sequence,
    Fallback,
    Skipper,
}

impl Control {
    pub fn continue_status(self) -> Status {
        match self {
            Control::Sequence => Status::Success,
            Control::Fallback => Status::Failure,
            Control::Skipper => Status::Running,
        }
    }

    /// Conventional glyph used in drawings of the tree.
    pub fn symbol(self) -> &'static str {
        match self {
            Control::Sequence => "→",
            Control::Fallback => "?",
            Control::Skipper => "⇒",
        }
    }

    /// Status returned when a child stops the scan, or the continue status
    /// when every child continued.
    pub fn scan<I: IntoIterator<Item = Status>>(self, statuses: I) -> Status {
        let cont = self.continue_status();
        statuses.into_iter().find(|s| *s != cont).unwrap_or(cont)
    }
}

/// Latch bookkeeping of an action node. `Done` is absorbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Latch {
    #[default]
    Fresh,
    Pending,
    Done(Status),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Control { control: Control, children: Vec<Node> },
    Condition { literal: LiteralId },
    Action { action: ActionId, latch: Latch },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
}

impl Node {
    pub fn control(id: NodeId, control: Control, children: Vec<Node>) -> Self {
        Node {
            id,
            kind: NodeKind::Control { control, children },
        }
    }

    pub fn sequence(id: NodeId, children: Vec<Node>) -> Self {
        Self::control(id, Control::Sequence, children)
    }

    pub fn fallback(id: NodeId, children: Vec<Node>) -> Self {
        Self::control(id, Control::Fallback, children)
    }

    pub fn skipper(id: NodeId, children: Vec<Node>) -> Self {
        Self::control(id, Control::Skipper, children)
    }

    pub fn condition(id: NodeId, literal: LiteralId) -> Self {
        Node {
            id,
            kind: NodeKind::Condition { literal },
        }
    }

    pub fn action(id: NodeId, action: ActionId) -> Self {
        Node {
            id,
            kind: NodeKind::Action {
                action,
                latch: Latch::Fresh,
            },
        }
    }

    pub fn children(&self) -> &[Node] {
        match &self.kind {
            NodeKind::Control { children, .. } => children,
            _ => &[],
        }
    }

    pub fn control_kind(&self) -> Option<Control> {
        match &self.kind {
            NodeKind::Control { control, .. } => Some(*control),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self.kind, NodeKind::Control { .. })
    }

    /// Nodes in tick order (pre-order, left to right) with their depth.
    pub fn preorder(&self) -> Vec<(&Node, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![(self, 0usize)];
        while let Some((node, depth)) = stack.pop() {
            out.push((node, depth));
            for child in node.children().iter().rev() {
                stack.push((child, depth + 1));
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        self.preorder().len()
    }

    /// Largest edge distance from this node to a leaf.
    pub fn height(&self) -> usize {
        self.preorder().iter().map(|(_, d)| *d).max().unwrap_or(0)
    }

    pub fn action_count(&self) -> usize {
        self.preorder()
            .iter()
            .filter(|(n, _)| matches!(n.kind, NodeKind::Action { .. }))
            .count()
    }

    pub fn max_id(&self) -> NodeId {
        self.preorder()
            .iter()
            .map(|(n, _)| n.id)
            .max()
            .unwrap_or(NodeId(0))
    }

    pub fn find(&self, id: NodeId) -> Option<&Node> {
        self.preorder().into_iter().map(|(n, _)| n).find(|n| n.id == id)
    }

    pub fn find_mut(&mut self, id: NodeId) -> Option<&mut Node> {
        if self.id == id {
            return Some(self);
        }
        match &mut self.kind {
            NodeKind::Control { children, .. } => children.iter_mut().find_map(|c| c.find_mut(id)),
            _ => None,
        }
    }

    /// Checks the structural invariants: unique ids and non-empty control nodes.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (node, _) in self.preorder() {
            if !seen.insert(node.id) {
                return Err(Error::InvalidTree(format!("duplicate node id {}", node.id)));
            }
            if let NodeKind::Control { children, .. } = &node.kind {
                if children.is_empty() {
                    return Err(Error::InvalidTree(format!(
                        "control node {} has no children",
                        node.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Latch states that are not fresh, keyed by node.
    pub fn latches(&self) -> BTreeMap<NodeId, Latch> {
        self.preorder()
            .into_iter()
            .filter_map(|(n, _)| match n.kind {
                NodeKind::Action { latch, .. } if latch != Latch::Fresh => Some((n.id, latch)),
                _ => None,
            })
            .collect()
    }
}

/// Returns a copy of `tree` with every action latch fresh.
pub fn reset_latches(tree: &Node) -> Node {
    let mut out = tree.clone();
    reset_in_place(&mut out);
    out
}

fn reset_in_place(node: &mut Node) {
    match &mut node.kind {
        NodeKind::Control { children, .. } => children.iter_mut().for_each(reset_in_place),
        NodeKind::Action { latch, .. } => *latch = Latch::Fresh,
        NodeKind::Condition { .. } => {}
    }
}

/// Position of a node within its tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub depth: usize,
    /// Index in tick (pre-order) order.
    pub order: usize,
    pub parent: Option<NodeId>,
    pub child_index: usize,
}

/// Lookup table from node id to its placement.
#[derive(Debug, Clone, Default)]
pub struct NodeIndex {
    places: BTreeMap<NodeId, Placement>,
}

impl NodeIndex {
    pub fn new(tree: &Node) -> Self {
        let mut places = BTreeMap::new();
        let mut order = 0;
        index_rec(tree, None, 0, 0, &mut order, &mut places);
        NodeIndex { places }
    }

    pub fn get(&self, id: NodeId) -> Option<Placement> {
        self.places.get(&id).copied()
    }

    /// Ancestors of `id` from its parent up to the root.
    pub fn ancestors(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.get(id).and_then(|p| p.parent);
        while let Some(p) = cur {
            out.push(p);
            cur = self.get(p).and_then(|pl| pl.parent);
        }
        out
    }

    /// True when `a` is a deeper node than `b`, or equally deep and further left.
    pub fn deeper_or_left(&self, a: NodeId, b: NodeId) -> bool {
        match (self.get(a), self.get(b)) {
            (Some(pa), Some(pb)) => (pa.depth, std::cmp::Reverse(pa.order)) > (pb.depth, std::cmp::Reverse(pb.order)),
            _ => false,
        }
    }
}

fn index_rec(
    node: &Node,
    parent: Option<NodeId>,
    child_index: usize,
    depth: usize,
    order: &mut usize,
    places: &mut BTreeMap<NodeId, Placement>,
) {
    places.insert(
        node.id,
        Placement {
            depth,
            order: *order,
            parent,
            child_index,
        },
    );
    *order += 1;
    for (i, child) in node.children().iter().enumerate() {
        index_rec(child, Some(node.id), i, depth + 1, order, places);
    }
}

/// Hands out node ids that do not collide with an existing tree.
#[derive(Debug, Clone)]
pub struct IdAllocator {
    next: u32,
}

impl IdAllocator {
    pub fn starting_at(next: u32) -> Self {
        IdAllocator { next }
    }

    pub fn after(tree: &Node) -> Self {
        IdAllocator {
            next: tree.max_id().0 + 1,
        }
    }

    pub fn next_id(&mut self) -> NodeId {
        let id = NodeId(self.next);
        self.next += 1;
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(i: u32) -> LiteralId {
        LiteralId(i)
    }

    fn sample() -> Node {
        Node::sequence(
            NodeId(0),
            vec![
                Node::condition(NodeId(1), lit(0)),
                Node::fallback(
                    NodeId(2),
                    vec![
                        Node::condition(NodeId(3), lit(1)),
                        Node::action(NodeId(4), ActionId(0)),
                    ],
                ),
            ],
        )
    }

    #[test]
    fn scan_matches_definitions() {
        use Status::*;
        assert_eq!(Control::Sequence.scan([Success, Success]), Success);
        assert_eq!(Control::Sequence.scan([Success, Running, Failure]), Running);
        assert_eq!(Control::Fallback.scan([Failure, Success]), Success);
        assert_eq!(Control::Fallback.scan([Failure, Failure]), Failure);
        assert_eq!(Control::Skipper.scan([Running, Failure]), Failure);
        assert_eq!(Control::Skipper.scan([Running, Running]), Running);
    }

    #[test]
    fn preorder_and_index() {
        let t = sample();
        let ids: Vec<u32> = t.preorder().iter().map(|(n, _)| n.id.0).collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 4]);
        let idx = NodeIndex::new(&t);
        assert_eq!(idx.get(NodeId(3)).unwrap().depth, 2);
        assert_eq!(idx.get(NodeId(4)).unwrap().child_index, 1);
        assert_eq!(idx.ancestors(NodeId(4)), vec![NodeId(2), NodeId(0)]);
        assert!(idx.deeper_or_left(NodeId(3), NodeId(1)));
        assert!(idx.deeper_or_left(NodeId(3), NodeId(4)));
        assert_eq!(t.height(), 2);
        assert_eq!(t.action_count(), 1);
    }

    #[test]
    fn validation_rejects_duplicates_and_empty_controls() {
        let dup = Node::sequence(
            NodeId(0),
            vec![Node::condition(NodeId(1), lit(0)), Node::condition(NodeId(1), lit(1))],
        );
        assert!(dup.validate().is_err());
        assert!(Node::fallback(NodeId(0), vec![]).validate().is_err());
        assert!(sample().validate().is_ok());
    }

    #[test]
    fn reset_latches_clears_done() {
        let mut t = sample();
        if let NodeKind::Action { latch, .. } = &mut t.find_mut(NodeId(4)).unwrap().kind {
            *latch = Latch::Done(Status::Success);
        }
        assert_eq!(t.latches().len(), 1);
        let r = reset_latches(&t);
        assert!(r.latches().is_empty());
        assert_eq!(reset_latches(&r), r);

        let no_actions = Node::sequence(NodeId(0), vec![Node::condition(NodeId(1), lit(0))]);
        assert_eq!(reset_latches(&no_actions), no_actions);
    }
}
