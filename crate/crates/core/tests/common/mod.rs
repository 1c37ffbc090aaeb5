//! Test support: an independent exhaustive enumerator and random generators.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bbt_core::belief::{BeliefState, Entry, PhysicalState};
use bbt_core::domain::{ground, parse_domain, GroundedDomain, LiteralId};
use bbt_core::tree::{Control, Node, NodeId, NodeKind};
use bbt_core::Status;
use rand::rngs::StdRng;
use rand::RngExt;

pub const STATUSES: [Status; 3] = [Status::Success, Status::Failure, Status::Running];

/// Exhaustive enumeration of every outcome sequence of a classic execution.
///
/// Deliberately self-contained: its own tick, its own latch table, its own
/// outcome application. One action starts per tick; outcomes apply between
/// ticks; an execution ends on the first tick that starts nothing.
pub mod oracle {
    use super::*;

    #[derive(Clone, Copy, PartialEq, Debug)]
    enum L {
        Fresh,
        Done(Status),
    }

    struct Walk<'a> {
        domain: &'a GroundedDomain,
        tree: &'a Node,
        /// (assignment, root status) -> mass
        terminal: BTreeMap<(Vec<Status>, Status), f64>,
        max_ticks: usize,
    }

    fn tick(
        node: &Node,
        values: &[Status],
        latches: &BTreeMap<NodeId, L>,
        started: &mut Option<NodeId>,
    ) -> Status {
        match &node.kind {
            NodeKind::Condition { literal } => values[literal.0 as usize],
            NodeKind::Action { .. } => match latches.get(&node.id).copied().unwrap_or(L::Fresh) {
                L::Done(s) => s,
                L::Fresh => {
                    if started.is_none() {
                        *started = Some(node.id);
                    }
                    Status::Running
                }
            },
            NodeKind::Control { control, children } => {
                let go_on = match control {
                    Control::Sequence => Status::Success,
                    Control::Fallback => Status::Failure,
                    Control::Skipper => Status::Running,
                };
                for c in children {
                    let s = tick(c, values, latches, started);
                    if s != go_on {
                        return s;
                    }
                }
                go_on
            }
        }
    }

    fn action_at(tree: &Node, id: NodeId) -> usize {
        fn go(n: &Node, id: NodeId) -> Option<usize> {
            if n.id == id {
                if let NodeKind::Action { action, .. } = n.kind {
                    return Some(action.0 as usize);
                }
            }
            n.children().iter().find_map(|c| go(c, id))
        }
        go(tree, id).expect("started node is an action")
    }

    impl Walk<'_> {
        fn explore(&mut self, values: Vec<Status>, latches: BTreeMap<NodeId, L>, p: f64, ticks: usize) {
            let mut started = None;
            let status = tick(self.tree, &values, &latches, &mut started);
            let ticks = ticks + 1;
            self.max_ticks = self.max_ticks.max(ticks);
            let Some(node) = started else {
                *self.terminal.entry((values, status)).or_insert(0.0) += p;
                return;
            };
            let action = &self.domain.actions()[action_at(self.tree, node)];
            for o in &action.outcomes {
                let mut next = values.clone();
                for (l, v) in &o.post {
                    next[l.0 as usize] = *v;
                }
                let mut lat = latches.clone();
                lat.insert(node, L::Done(o.report));
                self.explore(next, lat, p * o.probability, ticks);
            }
        }
    }

    pub struct Enumeration {
        pub terminal: BTreeMap<(Vec<Status>, Status), f64>,
        /// Longest branch, in root ticks (including the final one).
        pub max_ticks: usize,
    }

    /// Enumerates from one assignment with the given finished latches.
    pub fn enumerate_from(
        domain: &GroundedDomain,
        tree: &Node,
        values: &[Status],
        done: &BTreeMap<NodeId, Status>,
        p: f64,
    ) -> Enumeration {
        let mut walk = Walk {
            domain,
            tree,
            terminal: BTreeMap::new(),
            max_ticks: 0,
        };
        let latches = done.iter().map(|(k, v)| (*k, L::Done(*v))).collect();
        walk.explore(values.to_vec(), latches, p, 0);
        Enumeration {
            terminal: walk.terminal,
            max_ticks: walk.max_ticks,
        }
    }

    pub fn enumerate(domain: &GroundedDomain, tree: &Node, values: &[Status]) -> Enumeration {
        enumerate_from(domain, tree, values, &BTreeMap::new(), 1.0)
    }
}

/// Projects a belief state onto (assignment, root status), summing masses.
pub fn project(m: &BeliefState) -> BTreeMap<(Vec<Status>, Status), f64> {
    let mut out = BTreeMap::new();
    for e in m.entries() {
        *out.entry((e.state.assignment.clone(), e.state.r)).or_insert(0.0) += e.p;
    }
    out
}

/// Largest absolute difference between two projected distributions.
pub fn distance(a: &BTreeMap<(Vec<Status>, Status), f64>, b: &BTreeMap<(Vec<Status>, Status), f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Integer weights summing to 100, rendered as two-decimal probabilities.
fn split_hundred(rng: &mut StdRng, n: usize) -> Vec<String> {
    let mut cuts: Vec<u32> = (0..n - 1).map(|_| rng.random_range(1..100)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(100);
    bounds
        .windows(2)
        .map(|w| format!("{}", (w[1] - w[0]) as f64 / 100.0))
        .collect()
}

/// A parameterless domain with `lits` conditions and `acts` actions. With
/// `deterministic`, every action has a single outcome.
pub fn random_domain_text(rng: &mut StdRng, lits: usize, acts: usize, deterministic: bool) -> String {
    let mut text = String::new();
    let mut values = Vec::new();
    for i in 0..lits {
        let with_r = rng.random_bool(0.5);
        values.push(with_r);
        text += &format!("condition c{i} values {{ S F{} }}\n", if with_r { " R" } else { "" });
    }
    let pick_value = |rng: &mut StdRng, i: usize| -> &'static str {
        match rng.random_range(0..if values[i] { 3 } else { 2 }) {
            0 => "S",
            1 => "F",
            _ => "R",
        }
    };
    for a in 0..acts {
        let n_out = if deterministic { 1 } else { rng.random_range(1..=3) };
        let probs = if n_out == 1 { vec!["1".to_string()] } else { split_hundred(rng, n_out) };
        text += &format!("action a{a} {{\n    pre {{ }}\n");
        for p in probs {
            let k = rng.random_range(0..=lits.min(2));
            let mut post = Vec::new();
            for _ in 0..k {
                let l = rng.random_range(0..lits);
                if post.iter().any(|(x, _)| *x == l) {
                    continue;
                }
                post.push((l, pick_value(rng, l)));
            }
            let post: Vec<String> = post.iter().map(|(l, v)| format!("c{l} = {v}")).collect();
            let report = ["", " -> S", " -> F", " -> R"][rng.random_range(0..4)];
            text += &format!("    outcome {p}{report} {{ {} }}\n", post.join("; "));
        }
        text += "}\n";
    }
    text
}

pub fn random_domain(rng: &mut StdRng, deterministic: bool) -> GroundedDomain {
    let lits = rng.random_range(1..=3);
    let acts = rng.random_range(1..=3);
    let text = random_domain_text(rng, lits, acts, deterministic);
    ground(&parse_domain(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))).unwrap()
}

/// A random tree of at most `max_nodes` nodes, ids in preorder.
pub fn random_tree(rng: &mut StdRng, domain: &GroundedDomain, max_nodes: usize) -> Node {
    fn build(rng: &mut StdRng, domain: &GroundedDomain, budget: usize, next: &mut u32) -> Node {
        let id = NodeId(*next);
        *next += 1;
        if budget <= 1 || rng.random_bool(0.35) {
            return if rng.random_bool(0.5) {
                Node::condition(id, LiteralId(rng.random_range(0..domain.literals().len()) as u32))
            } else {
                Node::action(id, domain.actions()[rng.random_range(0..domain.actions().len())].id)
            };
        }
        let control = [Control::Sequence, Control::Fallback, Control::Skipper][rng.random_range(0..3)];
        let mut left = budget - 1;
        let mut children = Vec::new();
        while left > 0 && (children.is_empty() || rng.random_bool(0.6)) {
            let share = rng.random_range(1..=left);
            left -= share;
            children.push(build(rng, domain, share, next));
        }
        Node::control(id, control, children)
    }
    let mut next = 0;
    build(rng, domain, max_nodes, &mut next)
}

pub fn random_assignment(rng: &mut StdRng, domain: &GroundedDomain) -> Vec<Status> {
    domain
        .literals()
        .iter()
        .map(|l| l.values[rng.random_range(0..l.values.len())])
        .collect()
}

/// Up to `max_entries` entries with random assignments, root statuses and
/// finished latches on the tree's action nodes; total mass 1.
pub fn random_belief(rng: &mut StdRng, domain: &GroundedDomain, tree: &Node, max_entries: usize) -> BeliefState {
    let actions: Vec<NodeId> = tree
        .preorder()
        .into_iter()
        .filter(|(n, _)| matches!(n.kind, NodeKind::Action { .. }))
        .map(|(n, _)| n.id)
        .collect();
    let n = rng.random_range(1..=max_entries);
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let entries = weights
        .into_iter()
        .map(|w| {
            let mut state = PhysicalState::new(random_assignment(rng, domain));
            state.r = STATUSES[rng.random_range(0..3)];
            for a in &actions {
                if rng.random_bool(0.3) {
                    state.latches.insert(*a, STATUSES[rng.random_range(0..3)]);
                }
            }
            Entry { p: w / total, state }
        })
        .collect();
    BeliefState::from_entries(entries).unwrap()
}

pub mod specs {
    use bbt_core::domain::{
        ActionSchema, Assignment, BtExpr, ConditionSchema, DeclaredOutcome, DomainSpec, GoalSpec, OutcomeSpec,
        ParamSpace, TemplateSchema,
    };
    use bbt_core::tree::Control;
    use bbt_core::Status;
    use rand::rngs::StdRng;
    use rand::RngExt;

    use super::{split_hundred, STATUSES};

    fn pick<'a, T>(rng: &mut StdRng, items: &'a [T]) -> &'a T {
        &items[rng.random_range(0..items.len())]
    }

    /// Distinct spaces for a signature of up to two positions.
    fn signature(rng: &mut StdRng, params: &[ParamSpace]) -> Vec<String> {
        let mut sig: Vec<String> = Vec::new();
        for _ in 0..rng.random_range(0..=2usize) {
            let p = &pick(rng, params).name;
            if !sig.contains(p) {
                sig.push(p.clone());
            }
        }
        sig
    }

    fn args(rng: &mut StdRng, spaces: &[String], scope: &[String], params: &[ParamSpace]) -> Vec<String> {
        spaces
            .iter()
            .map(|sp| {
                if scope.contains(sp) && rng.random_bool(0.6) {
                    sp.clone()
                } else {
                    let space = params.iter().find(|p| &p.name == sp).unwrap();
                    pick(rng, &space.instances).clone()
                }
            })
            .collect()
    }

    fn assignment(rng: &mut StdRng, conds: &[ConditionSchema], scope: &[String], params: &[ParamSpace]) -> Assignment {
        let c = pick(rng, conds);
        Assignment {
            name: c.name.clone(),
            args: args(rng, &c.params, scope, params),
            value: *pick(rng, &c.values),
        }
    }

    fn asgnset(rng: &mut StdRng, conds: &[ConditionSchema], scope: &[String], params: &[ParamSpace]) -> Vec<Assignment> {
        (0..rng.random_range(0..=3)).map(|_| assignment(rng, conds, scope, params)).collect()
    }

    fn probabilities(rng: &mut StdRng) -> Vec<f64> {
        let n = rng.random_range(1..=3);
        if n == 1 {
            vec![1.0]
        } else {
            split_hundred(rng, n).iter().map(|s| s.parse().unwrap()).collect()
        }
    }

    fn body(rng: &mut StdRng, spec: &DomainSpec, scope: &[String], depth: usize) -> BtExpr {
        let leaf = depth >= 2 || rng.random_bool(0.4);
        if !leaf {
            let control = *pick(rng, &[Control::Sequence, Control::Fallback, Control::Skipper]);
            let children = (0..rng.random_range(1..=3)).map(|_| body(rng, spec, scope, depth + 1)).collect();
            return BtExpr::Control(control, children);
        }
        let params = &spec.params;
        match rng.random_range(0..3) {
            0 if !spec.templates.is_empty() => {
                let t = pick(rng, &spec.templates);
                BtExpr::Tmpl { name: t.name.clone(), args: args(rng, &t.params, scope, params) }
            }
            1 => {
                let c = pick(rng, &spec.conditions);
                BtExpr::Cond { name: c.name.clone(), args: args(rng, &c.params, scope, params) }
            }
            _ => {
                let a = pick(rng, &spec.actions);
                BtExpr::Act { name: a.name.clone(), args: args(rng, &a.params, scope, params) }
            }
        }
    }

    /// A random valid spec exercising every construct of the language.
    pub fn random_spec(rng: &mut StdRng) -> DomainSpec {
        let mut spec = DomainSpec::default();
        for p in 0..rng.random_range(1..=3) {
            spec.params.push(ParamSpace {
                name: format!("space{p}"),
                instances: (0..rng.random_range(1..=3)).map(|i| format!("obj{p}_{i}")).collect(),
            });
        }
        for c in 0..rng.random_range(1..=4) {
            let mut values = vec![Status::Success];
            for v in [Status::Failure, Status::Running] {
                if rng.random_bool(0.6) {
                    values.push(v);
                }
            }
            spec.conditions.push(ConditionSchema {
                name: format!("cond{c}"),
                params: signature(rng, &spec.params),
                values,
            });
        }
        for a in 0..rng.random_range(1..=3) {
            let params = signature(rng, &spec.params);
            let pre = asgnset(rng, &spec.conditions, &params, &spec.params);
            let outcomes = probabilities(rng)
                .into_iter()
                .map(|probability| OutcomeSpec {
                    probability,
                    report: if rng.random_bool(0.5) { Some(*pick(rng, &STATUSES)) } else { None },
                    post: asgnset(rng, &spec.conditions, &params, &spec.params),
                })
                .collect();
            spec.actions.push(ActionSchema { name: format!("act{a}"), params, pre, outcomes });
        }
        for t in 0..rng.random_range(0..=2) {
            let params = signature(rng, &spec.params);
            let pre = asgnset(rng, &spec.conditions, &params, &spec.params);
            let declared = if rng.random_bool(0.7) {
                probabilities(rng)
                    .into_iter()
                    .map(|probability| DeclaredOutcome {
                        probability,
                        post: asgnset(rng, &spec.conditions, &params, &spec.params),
                    })
                    .collect()
            } else {
                Vec::new()
            };
            let body = body(rng, &spec, &params, 0);
            spec.templates.push(TemplateSchema { name: format!("tmpl{t}"), params, pre, declared, body });
        }
        if rng.random_bool(0.7) {
            let mut initial: Vec<Assignment> = Vec::new();
            for _ in 0..rng.random_range(0..=4) {
                let a = assignment(rng, &spec.conditions, &[], &spec.params);
                if !initial.iter().any(|b| b.name == a.name && b.args == a.args) {
                    initial.push(a);
                }
            }
            spec.initial = Some(initial);
        }
        if rng.random_bool(0.7) {
            let literals = (0..rng.random_range(1..=2))
                .map(|_| Assignment { value: Status::Success, ..assignment(rng, &spec.conditions, &[], &spec.params) })
                .collect();
            spec.goal = Some(GoalSpec { literals, probability: *pick(rng, &[0.5, 0.9, 0.95, 1.0, 0.125]) });
        }
        spec
    }
}
