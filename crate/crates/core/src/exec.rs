//! Belief-space execution: ticking a tree on a whole belief state, delayed
//! action outcomes, and exhaustive self-simulation.
//!
//! An action reached by a tick does not change the state immediately. It is
//! recorded as the entry's pending action and the node returns `R`; the
//! outcome distribution is applied between root ticks by [`apply_delayed`].
//! At most one action starts per entry per root tick: once an entry has a
//! pending action, later action nodes on the same tick return `R` untouched.
//!
//! Latches are tracked per entry, so that branches created by different
//! outcomes remember independently which actions already finished.

use std::collections::HashMap;
use std::fmt::Write;

use crate::belief::{BeliefState, Entry, Pending, PhysicalState};
use crate::domain::{ActionId, GroundedDomain};
use crate::tree::{Latch, Node, NodeId, NodeIndex, NodeKind};
use crate::{Error, Result, Status};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationLimits {
    pub max_root_ticks: usize,
    pub max_entries: usize,
    /// Entries lighter than this are dropped after each outcome application
    /// and their mass reported as pruned. Zero disables pruning.
    pub prune_epsilon: f64,
}

impl Default for SimulationLimits {
    fn default() -> Self {
        SimulationLimits {
            max_root_ticks: 10_000,
            max_entries: 100_000,
            prune_epsilon: 0.0,
        }
    }
}

/// Mass flow of one root tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickFlow {
    pub tick: usize,
    pub entries: usize,
    pub mass_in: f64,
    pub ended_mass: f64,
    pub ended_success: f64,
    pub pruned_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// Entries without a pending action after their last root tick.
    pub terminal: BeliefState,
    pub ticks_used: usize,
    pub pruned_mass: f64,
    pub flow: Vec<TickFlow>,
}

impl SimulationResult {
    pub fn success_probability(&self) -> f64 {
        self.terminal.success_probability()
    }

    /// Tab-separated per-tick log: tick, entries, mass in, ended, ended with S, pruned.
    pub fn flow_log(&self) -> String {
        let mut out = String::from("tick\tentries\tmass_in\tended\tsucceeded\tpruned\n");
        for f in &self.flow {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.12}\t{:.12}\t{:.12}\t{:.12}",
                f.tick, f.entries, f.mass_in, f.ended_mass, f.ended_success, f.pruned_mass
            );
        }
        out
    }
}

/// An entry travelling through one root tick.
struct Token {
    slot: usize,
    entry: Entry,
    /// Deepest condition responsible for the status last returned to this token.
    blame: Option<NodeId>,
}

struct Ticker<'a> {
    domain: &'a GroundedDomain,
    index: NodeIndex,
}

impl Ticker<'_> {
    fn deeper(&self, a: Option<NodeId>, b: Option<NodeId>) -> Option<NodeId> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if self.index.deeper_or_left(y, x) { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn tick(&self, node: &Node, tokens: Vec<Token>) -> Result<Vec<Token>> {
        if tokens.is_empty() {
            return Ok(tokens);
        }
        match &node.kind {
            NodeKind::Condition { literal } => tokens
                .into_iter()
                .map(|mut t| {
                    let r = t.entry.state.value(*literal)?;
                    t.entry.state.r = r;
                    t.blame = (r != Status::Success).then_some(node.id);
                    Ok(t)
                })
                .collect(),
            NodeKind::Action { action, .. } => {
                self.domain.action(*action)?;
                Ok(tokens
                    .into_iter()
                    .map(|mut t| {
                        schedule_entry(node.id, *action, &mut t.entry.state);
                        t.blame = None;
                        t
                    })
                    .collect())
            }
            NodeKind::Control { control, children } => {
                let cont_status = control.continue_status();
                let mut acc: HashMap<usize, Option<NodeId>> = HashMap::new();
                let mut stopped = Vec::new();
                let mut cont = tokens;
                for child in children {
                    if cont.is_empty() {
                        break;
                    }
                    let out = self.tick(child, cont)?;
                    cont = Vec::with_capacity(out.len());
                    for mut t in out {
                        if t.entry.state.r == cont_status {
                            if cont_status != Status::Success {
                                let slot = acc.entry(t.slot).or_default();
                                *slot = self.deeper(*slot, t.blame);
                            }
                            cont.push(t);
                        } else {
                            if t.entry.state.r == Status::Success {
                                t.blame = None;
                            }
                            stopped.push(t);
                        }
                    }
                }
                for t in &mut cont {
                    t.blame = if cont_status == Status::Success {
                        None
                    } else {
                        acc.get(&t.slot).copied().flatten()
                    };
                }
                stopped.extend(cont);
                Ok(stopped)
            }
        }
    }
}

fn schedule_entry(node: NodeId, action: ActionId, state: &mut PhysicalState) {
    if let Some(done) = state.latches.get(&node) {
        state.r = *done;
    } else {
        if state.pending.is_none() {
            state.pending = Some(Pending { node, action });
        }
        state.r = Status::Running;
    }
}

/// Ticks `node` once on every entry of `mem`. Each entry's `r` receives the
/// status the node returns for it; for entries not returning `S`,
/// `failed_at` records the deepest condition that caused it.
pub fn belief_tick(domain: &GroundedDomain, node: &Node, mem: BeliefState) -> Result<BeliefState> {
    let ticker = Ticker {
        domain,
        index: NodeIndex::new(node),
    };
    tick_with(&ticker, node, mem)
}

fn tick_with(ticker: &Ticker, node: &Node, mem: BeliefState) -> Result<BeliefState> {
    let tokens = mem
        .into_entries()
        .into_iter()
        .enumerate()
        .map(|(slot, entry)| Token {
            slot,
            entry,
            blame: None,
        })
        .collect();
    let out = ticker.tick(node, tokens)?;
    Ok(BeliefState::from_vec(
        out.into_iter()
            .map(|mut t| {
                t.entry.state.failed_at = if t.entry.state.r == Status::Success {
                    None
                } else {
                    t.blame
                };
                t.entry
            })
            .collect(),
    ))
}

/// Schedules action node `node` on every entry: finished latches replay their
/// status, entries already holding a pending action return `R`, and the rest
/// get this action as pending and return `R`.
pub fn schedule_delayed(node: NodeId, action: ActionId, mem: BeliefState) -> BeliefState {
    BeliefState::from_vec(
        mem.into_entries()
            .into_iter()
            .map(|mut e| {
                schedule_entry(node, action, &mut e.state);
                e
            })
            .collect(),
    )
}

/// Expands every entry by the outcomes of its pending action, latching the
/// realized report status on that branch. Resets `r` to `R`.
pub fn apply_delayed(domain: &GroundedDomain, mem: BeliefState) -> Result<BeliefState> {
    let mut out = Vec::new();
    for e in mem.into_entries() {
        let pending = e.state.pending.ok_or(Error::NoPending)?;
        let action = domain.action(pending.action)?;
        for o in &action.outcomes {
            let mut state = e.state.clone();
            state.assign(&o.post)?;
            state.pending = None;
            state.r = Status::Running;
            state.failed_at = None;
            state.latches.insert(pending.node, o.report);
            out.push(Entry {
                p: e.p * o.probability,
                state,
            });
        }
    }
    Ok(BeliefState::from_vec(out).coalesce())
}

/// Runs the tree from `initial` until every branch reaches a state with no
/// pending action, returning the exact distribution of those terminal states.
pub fn simulate(
    domain: &GroundedDomain,
    tree: &Node,
    initial: &BeliefState,
    limits: &SimulationLimits,
) -> Result<SimulationResult> {
    tree.validate()?;
    let ticker = Ticker {
        domain,
        index: NodeIndex::new(tree),
    };
    let tree_latches: Vec<(NodeId, Status)> = tree
        .latches()
        .into_iter()
        .filter_map(|(id, l)| match l {
            Latch::Done(s) => Some((id, s)),
            _ => None,
        })
        .collect();

    let mut mem = BeliefState::from_vec(
        initial
            .entries()
            .iter()
            .cloned()
            .map(|mut e| {
                e.state.pending = None;
                e.state.failed_at = None;
                for (id, s) in &tree_latches {
                    e.state.latches.entry(*id).or_insert(*s);
                }
                e
            })
            .collect(),
    );
    if mem.len() > limits.max_entries {
        return Err(Error::EntryLimitExceeded {
            count: mem.len(),
            limit: limits.max_entries,
        });
    }

    let mut results = BeliefState::empty();
    let mut ticks = 0;
    let mut pruned_total = 0.0;
    let mut flow = Vec::new();
    while !mem.is_empty() {
        if ticks >= limits.max_root_ticks {
            return Err(Error::TickLimitExceeded {
                limit: limits.max_root_ticks,
            });
        }
        let entries = mem.len();
        let mass_in = mem.mass();
        let current = tick_with(&ticker, tree, mem)?;
        ticks += 1;
        let (running, ended) = current.split_by(|s| s.pending.is_some());
        let ended_mass = ended.mass();
        let ended_success = ended.success_probability();
        results = results.union(ended);
        let (next, pruned) = apply_delayed(domain, running)?.prune(limits.prune_epsilon);
        pruned_total += pruned;
        if next.len() > limits.max_entries {
            return Err(Error::EntryLimitExceeded {
                count: next.len(),
                limit: limits.max_entries,
            });
        }
        flow.push(TickFlow {
            tick: ticks,
            entries,
            mass_in,
            ended_mass,
            ended_success,
            pruned_mass: pruned,
        });
        mem = next;
    }
    Ok(SimulationResult {
        terminal: results.coalesce(),
        ticks_used: ticks,
        pruned_mass: pruned_total,
        flow,
    })
}

/// Point belief state at the domain's initial assignment.
pub fn initial_belief(domain: &GroundedDomain) -> BeliefState {
    BeliefState::point(PhysicalState::new(domain.initial().to_vec()))
}
