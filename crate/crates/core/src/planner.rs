//! Iterative tree synthesis.
//!
//! Starting from a Sequence of goal conditions, each iteration simulates the
//! tree, picks the condition that most probably causes failure (deepest
//! first), and either reorders branches to remove a conflicting action ahead
//! of it or inserts a latched resolver behind a Skipper (unknown value) or a
//! Fallback (false value). Stops once the success probability reaches the
//! target.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write;

use log::{debug, info};

use crate::belief::{achieving_probability, BeliefState, Entry, Outcome};
use crate::domain::{ActionId, GroundedDomain, LiteralId, TemplateId};
use crate::exec::{initial_belief, simulate, SimulationLimits};
use crate::tree::{reset_latches, Control, IdAllocator, Node, NodeId, NodeIndex, NodeKind};
use crate::{Error, Result, Status, MASS_EPSILON};

/// Multiplier applied per previous insertion of the same resolver.
const REPEAT_PENALTY: f64 = 0.9;

#[derive(Debug, Clone)]
pub struct PlanRequest<'a> {
    pub domain: &'a GroundedDomain,
    pub initial: BeliefState,
    /// Literals that must all hold `S`.
    pub goal: Vec<LiteralId>,
    pub target_probability: f64,
    pub limits: SimulationLimits,
    pub max_iterations: usize,
}

impl<'a> PlanRequest<'a> {
    /// Request built from the domain's own initial assignment and goal.
    pub fn from_domain(domain: &'a GroundedDomain) -> Result<Self> {
        let (goal, p) = domain
            .goal()?
            .ok_or_else(|| Error::InvalidRequest("domain declares no goal".into()))?;
        Ok(PlanRequest {
            domain,
            initial: initial_belief(domain),
            goal,
            target_probability: p,
            limits: SimulationLimits::default(),
            max_iterations: 64,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.target_probability > 0.0 && self.target_probability <= 1.0) {
            return Err(Error::InvalidRequest(format!(
                "target probability {} outside (0, 1]",
                self.target_probability
            )));
        }
        for g in &self.goal {
            if self.domain.literal(*g).is_none() {
                return Err(Error::UnknownLiteral(g.to_string()));
            }
        }
        Ok(())
    }
}

/// The condition chosen for resolution and the evidence behind the choice.
#[derive(Debug, Clone, PartialEq)]
pub struct FailedConditionReport {
    pub node: NodeId,
    pub literal: LiteralId,
    /// `F` or `R`, whichever carries more of the attributed mass.
    pub observed: Status,
    /// Mass of failing entries whose deepest failed condition is `node`.
    pub mass: f64,
    /// Per failing entry (index into the terminal state): its deepest failed condition.
    pub indicators: Vec<(usize, Option<NodeId>)>,
    /// Cumulative mass per condition node.
    pub totals: BTreeMap<NodeId, f64>,
}

/// Something that can be inserted to make a literal true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resolver {
    Action(ActionId),
    Template(TemplateId),
}

impl Resolver {
    pub fn name(self, domain: &GroundedDomain) -> String {
        match self {
            Resolver::Action(a) => domain
                .action(a)
                .map(|a| a.name.clone())
                .unwrap_or_default(),
            Resolver::Template(t) => domain.template(t).name.clone(),
        }
    }

    fn pre(self, domain: &GroundedDomain) -> &[(LiteralId, Status)] {
        match self {
            Resolver::Action(a) => &domain.actions()[a.0 as usize].pre,
            Resolver::Template(t) => &domain.template(t).pre,
        }
    }

    fn outcomes(self, domain: &GroundedDomain) -> &[Outcome] {
        match self {
            Resolver::Action(a) => &domain.actions()[a.0 as usize].outcomes,
            Resolver::Template(t) => &domain.template(t).declared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Insert,
    ThreatReorder,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Insert => "insert",
            StepKind::ThreatReorder => "threat-reorder",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub kind: StepKind,
    pub target: String,
    pub resolver: Option<String>,
    /// Success probability of the tree after this step.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub tree: Node,
    pub probability: f64,
    pub log: Vec<IterationRecord>,
    /// Terminal distribution of the final tree.
    pub terminal: BeliefState,
}

impl PlanResult {
    /// One tab-separated line per iteration: number, kind, target literal, probability.
    pub fn log_text(&self) -> String {
        let mut out = String::new();
        for r in &self.log {
            let _ = writeln!(out, "{}\t{}\t{}\t{:.6}", r.iteration, r.kind, r.target, r.probability);
        }
        out
    }
}

/// A Sequence with one condition per goal literal, in order.
pub fn initial_tree(goal: &[LiteralId]) -> Result<Node> {
    if goal.is_empty() {
        return Err(Error::EmptyGoal);
    }
    let mut ids = IdAllocator::starting_at(0);
    let root = ids.next_id();
    let children = goal.iter().map(|l| Node::condition(ids.next_id(), *l)).collect();
    Ok(Node::sequence(root, children))
}

fn condition_literal(tree: &Node, id: NodeId) -> Result<LiteralId> {
    match tree.find(id).map(|n| &n.kind) {
        Some(NodeKind::Condition { literal }) => Ok(*literal),
        _ => Err(Error::InvalidTree(format!("node {id} is not a condition"))),
    }
}

/// Picks the condition with the largest cumulative failing mass, where each
/// non-successful terminal entry contributes to its deepest failed condition.
/// Ties go to the deeper node, then the one further left.
pub fn find_failed_condition(tree: &Node, terminal: &BeliefState) -> Result<FailedConditionReport> {
    let failing: Vec<(usize, &Entry)> = terminal
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.state.r != Status::Success)
        .collect();
    if failing.is_empty() {
        return Err(Error::NothingFailed);
    }
    let mut totals: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut indicators = Vec::with_capacity(failing.len());
    for (i, e) in &failing {
        indicators.push((*i, e.state.failed_at));
        if let Some(n) = e.state.failed_at {
            *totals.entry(n).or_default() += e.p;
        }
    }
    let index = NodeIndex::new(tree);
    let mut best: Option<(NodeId, f64)> = None;
    for (&node, &mass) in &totals {
        best = match best {
            None => Some((node, mass)),
            Some((b, bm)) => {
                let better = if (mass - bm).abs() <= MASS_EPSILON {
                    index.deeper_or_left(node, b)
                } else {
                    mass > bm
                };
                Some(if better { (node, mass) } else { (b, bm) })
            }
        };
    }
    let (node, mass) = best.ok_or(Error::NoFailedCondition)?;
    let literal = condition_literal(tree, node)?;

    let mut by_value: BTreeMap<Status, f64> = BTreeMap::new();
    for (_, e) in failing.iter().filter(|(_, e)| e.state.failed_at == Some(node)) {
        *by_value.entry(e.state.value(literal)?).or_default() += e.p;
    }
    let f = by_value.get(&Status::Failure).copied().unwrap_or(0.0);
    let r = by_value.get(&Status::Running).copied().unwrap_or(0.0);
    let observed = if r >= f { Status::Running } else { Status::Failure };

    Ok(FailedConditionReport {
        node,
        literal,
        observed,
        mass,
        indicators,
        totals,
    })
}

/// Failing entries attributed to the reported condition.
fn attributed<'t>(report: &FailedConditionReport, terminal: &'t BeliefState) -> Vec<&'t Entry> {
    terminal
        .entries()
        .iter()
        .filter(|e| e.state.r != Status::Success && e.state.failed_at == Some(report.node))
        .collect()
}

/// Chooses the resolver with the best score
/// `P(outcome sets target) * feasibility * 0.9^(previous uses)`, where
/// feasibility is the fraction of attributed failing mass in which every
/// precondition already holds or can be made to hold by some resolver.
/// For an unknown target only perception resolvers (requiring the target to
/// be `R`) qualify.
pub fn select_resolver(
    report: &FailedConditionReport,
    domain: &GroundedDomain,
    failing: &[&Entry],
    history: &[Resolver],
) -> Result<Resolver> {
    let candidates = domain
        .actions()
        .iter()
        .map(|a| Resolver::Action(a.id))
        .chain(domain.templates().iter().map(|t| Resolver::Template(t.id)));

    let settable = |lit: LiteralId, v: Status| {
        domain
            .actions()
            .iter()
            .map(|a| a.outcomes.as_slice())
            .chain(domain.templates().iter().map(|t| t.declared.as_slice()))
            .any(|outs| achieving_probability(outs, lit, v) > 0.0)
    };
    let total: f64 = failing.iter().map(|e| e.p).sum();

    let mut best: Option<(Resolver, f64)> = None;
    for cand in candidates {
        let achieve = achieving_probability(cand.outcomes(domain), report.literal, Status::Success);
        if achieve <= 0.0 {
            continue;
        }
        let pre = cand.pre(domain);
        if report.observed == Status::Running
            && !pre.contains(&(report.literal, Status::Running))
        {
            continue;
        }
        let feasible_mass: f64 = failing
            .iter()
            .filter(|e| {
                pre.iter().all(|(l, v)| {
                    e.state.assignment.get(l.0 as usize) == Some(v) || settable(*l, *v)
                })
            })
            .map(|e| e.p)
            .sum();
        let feasibility = if total > 0.0 { feasible_mass / total } else { 0.0 };
        let uses = history.iter().filter(|h| **h == cand).count();
        let score = achieve * feasibility * REPEAT_PENALTY.powi(uses as i32);
        debug!(
            "candidate {} achieve={achieve} feasibility={feasibility} uses={uses} score={score}",
            cand.name(domain)
        );
        if score > 0.0 && best.is_none_or(|(_, s)| score > s) {
            best = Some((cand, score));
        }
    }
    best.map(|(r, _)| r).ok_or_else(|| Error::NoResolver {
        literal: domain.literal_name(report.literal),
    })
}

fn replace_node(root: &mut Node, id: NodeId, replacement: Node) -> bool {
    if root.id == id {
        *root = replacement;
        return true;
    }
    if let NodeKind::Control { children, .. } = &mut root.kind {
        for c in children.iter_mut() {
            if c.id == id {
                *c = replacement;
                return true;
            }
            if replace_node(c, id, replacement.clone()) {
                return true;
            }
        }
    }
    false
}

/// Inserts `resolver` for the reported condition: guard conditions for its
/// `S` preconditions followed by the action (or template body), placed under a
/// Skipper (target unknown) or Fallback (target false). An existing wrapper of
/// that kind headed by the target receives the new branch as its next child.
pub fn resolve_by_insert(
    tree: &Node,
    report: &FailedConditionReport,
    resolver: Resolver,
    domain: &GroundedDomain,
) -> Result<Node> {
    let wrapper = if report.observed == Status::Running {
        Control::Skipper
    } else {
        Control::Fallback
    };
    let mut ids = IdAllocator::after(tree);
    let seq_id = ids.next_id();
    let mut body: Vec<Node> = resolver
        .pre(domain)
        .iter()
        .filter(|(_, v)| *v == Status::Success)
        .map(|(l, _)| Node::condition(ids.next_id(), *l))
        .collect();
    body.push(match resolver {
        Resolver::Action(a) => Node::action(ids.next_id(), a),
        Resolver::Template(t) => domain.instantiate(t, &mut ids)?,
    });
    let branch = Node::sequence(seq_id, body);

    let index = NodeIndex::new(tree);
    let target = tree
        .find(report.node)
        .ok_or_else(|| Error::InvalidTree(format!("no node {}", report.node)))?
        .clone();
    let mut out = tree.clone();
    let parent = index.get(report.node).and_then(|p| p.parent);
    if let Some(pid) = parent {
        let p = out.find_mut(pid).expect("parent exists");
        if let NodeKind::Control { control, children } = &mut p.kind {
            if *control == wrapper && children[0].id == report.node {
                children.push(branch);
                return Ok(out);
            }
        }
    }
    let wrapped = Node::control(ids.next_id(), wrapper, vec![target, branch]);
    replace_node(&mut out, report.node, wrapped);
    Ok(out)
}

/// Subtree owned by the target: its wrapper when it heads one, else itself.
fn target_region(tree: &Node, index: &NodeIndex, target: NodeId) -> NodeId {
    if let Some(pid) = index.get(target).and_then(|p| p.parent) {
        if let Some(p) = tree.find(pid) {
            let is_wrapper = matches!(p.control_kind(), Some(Control::Fallback | Control::Skipper));
            if is_wrapper && p.children()[0].id == target {
                return pid;
            }
        }
    }
    target
}

fn contains(index: &NodeIndex, ancestor: NodeId, node: NodeId) -> bool {
    node == ancestor || index.ancestors(node).contains(&ancestor)
}

/// An action node ticked before the target's region that can set the target
/// literal to something other than `S`, and that actually ran on some
/// attributed failing branch.
pub fn find_threat(
    tree: &Node,
    report: &FailedConditionReport,
    domain: &GroundedDomain,
    failing: &[&Entry],
) -> Result<Option<NodeId>> {
    let index = NodeIndex::new(tree);
    let region = target_region(tree, &index, report.node);
    let region_order = index.get(region).map(|p| p.order).unwrap_or(0);
    for (node, _) in tree.preorder() {
        let NodeKind::Action { action, .. } = node.kind else {
            continue;
        };
        let order = index.get(node.id).map(|p| p.order).unwrap_or(usize::MAX);
        if order >= region_order || contains(&index, region, node.id) {
            continue;
        }
        let clashes = domain
            .action(action)?
            .outcomes
            .iter()
            .any(|o| o.post.iter().any(|(l, v)| *l == report.literal && *v != Status::Success));
        let ran = failing.iter().any(|e| e.state.latches.contains_key(&node.id));
        if clashes && ran {
            return Ok(Some(node.id));
        }
    }
    Ok(None)
}

/// Reorders the children of the lowest common ancestor of `target` and
/// `conflict` so that the branch holding the target comes right before the
/// branch holding the conflicting action.
pub fn resolve_threat(tree: &Node, target: NodeId, conflict: NodeId, literal: &str) -> Result<Node> {
    let index = NodeIndex::new(tree);
    let unresolvable = || Error::UnresolvableThreat {
        literal: literal.to_string(),
        conflict,
    };
    let region = target_region(tree, &index, target);
    let mut target_chain = vec![region];
    target_chain.extend(index.ancestors(region));
    let mut conflict_chain = vec![conflict];
    conflict_chain.extend(index.ancestors(conflict));

    let lca = target_chain
        .iter()
        .copied()
        .find(|n| conflict_chain.contains(n))
        .ok_or_else(unresolvable)?;
    let child_towards = |chain: &[NodeId]| -> Option<NodeId> {
        let pos = chain.iter().position(|n| *n == lca)?;
        pos.checked_sub(1).map(|i| chain[i])
    };
    let (Some(t_child), Some(c_child)) = (child_towards(&target_chain), child_towards(&conflict_chain)) else {
        return Err(unresolvable());
    };
    if t_child == c_child {
        return Err(unresolvable());
    }
    let mut out = tree.clone();
    let Some(NodeKind::Control { children, .. }) = out.find_mut(lca).map(|n| &mut n.kind) else {
        return Err(unresolvable());
    };
    let ti = children.iter().position(|c| c.id == t_child).ok_or_else(unresolvable)?;
    let ci = children.iter().position(|c| c.id == c_child).ok_or_else(unresolvable)?;
    if ti < ci {
        return Ok(out);
    }
    let moved = children.remove(ti);
    children.insert(ci, moved);
    Ok(out)
}

/// Runs the synthesis loop until the target probability is reached.
pub fn refine_tree(request: &PlanRequest) -> Result<PlanResult> {
    request.validate()?;
    let domain = request.domain;
    let mut tree = initial_tree(&request.goal)?;
    let mut log: Vec<IterationRecord> = Vec::new();
    let mut history: Vec<Resolver> = Vec::new();
    let mut reordered: BTreeSet<(LiteralId, NodeId)> = BTreeSet::new();

    for iteration in 0..=request.max_iterations {
        let sim = simulate(domain, &reset_latches(&tree), &request.initial, &request.limits)?;
        let probability = sim.success_probability();
        if let Some(last) = log.last_mut() {
            last.probability = probability;
            info!(
                "iteration {} {} {} -> {:.6}",
                last.iteration, last.kind, last.target, probability
            );
        }
        if probability >= request.target_probability - MASS_EPSILON {
            return Ok(PlanResult {
                tree,
                probability,
                log,
                terminal: sim.terminal,
            });
        }
        if iteration == request.max_iterations {
            return Err(Error::IterationLimit {
                iterations: iteration,
                probability,
            });
        }

        let report = find_failed_condition(&tree, &sim.terminal)?;
        let target = domain.literal_name(report.literal);
        let failing = attributed(&report, &sim.terminal);
        debug!(
            "target {} (node {}, observed {}, mass {:.6})",
            target, report.node, report.observed, report.mass
        );

        let (kind, resolver_name) = match find_threat(&tree, &report, domain, &failing)? {
            Some(conflict) => {
                if !reordered.insert((report.literal, conflict)) {
                    return Err(Error::UnresolvableThreat {
                        literal: target,
                        conflict,
                    });
                }
                tree = resolve_threat(&tree, report.node, conflict, &target)?;
                (StepKind::ThreatReorder, None)
            }
            None => {
                let resolver = select_resolver(&report, domain, &failing, &history)?;
                tree = resolve_by_insert(&tree, &report, resolver, domain)?;
                history.push(resolver);
                (StepKind::Insert, Some(resolver.name(domain)))
            }
        };
        log.push(IterationRecord {
            iteration: iteration + 1,
            kind,
            target,
            resolver: resolver_name,
            probability: f64::NAN,
        });
    }
    unreachable!("loop returns on its last iteration")
}
