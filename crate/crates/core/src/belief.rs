//! Belief states: finite distributions over physical states, and the
//! transformations that actions and conditions induce on them.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::domain::{ActionId, GroundedDomain, LiteralId};
use crate::tree::NodeId;
use crate::{Error, Result, Status};

/// One probabilistic outcome of an action.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub post: Vec<(LiteralId, Status)>,
    /// Status the action latches when this outcome is realized.
    pub report: Status,
}

/// A grounded action: preconditions and a distribution over postcondition sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionInstance {
    pub id: ActionId,
    pub name: String,
    pub pre: Vec<(LiteralId, Status)>,
    pub outcomes: Vec<Outcome>,
}

impl ActionInstance {
    /// Total probability of outcomes assigning `value` to `literal`.
    pub fn achieving_probability(&self, literal: LiteralId, value: Status) -> f64 {
        achieving_probability(&self.outcomes, literal, value)
    }
}

pub(crate) fn achieving_probability(outcomes: &[Outcome], literal: LiteralId, value: Status) -> f64 {
    outcomes
        .iter()
        .filter(|o| o.post.iter().any(|(l, v)| *l == literal && *v == value))
        .map(|o| o.probability)
        .sum()
}

/// An action started on the current root tick whose outcome is not applied yet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pending {
    pub node: NodeId,
    pub action: ActionId,
}

/// A complete assignment of literals plus execution bookkeeping.
///
/// Field order defines the canonical ordering of coalesced belief states:
/// assignments compare first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhysicalState {
    /// Value of every grounded literal, indexed by [`LiteralId`].
    pub assignment: Vec<Status>,
    /// Status last propagated to the root for this state.
    pub r: Status,
    pub pending: Option<Pending>,
    /// Finished latched actions on this branch and the status they replay.
    pub latches: BTreeMap<NodeId, Status>,
    /// Deepest condition that caused a non-success root status on the last tick.
    pub failed_at: Option<NodeId>,
}

impl PhysicalState {
    pub fn new(assignment: Vec<Status>) -> Self {
        PhysicalState {
            assignment,
            r: Status::Running,
            pending: None,
            latches: BTreeMap::new(),
            failed_at: None,
        }
    }

    pub fn value(&self, literal: LiteralId) -> Result<Status> {
        self.assignment
            .get(literal.0 as usize)
            .copied()
            .ok_or_else(|| Error::UnknownLiteral(literal.to_string()))
    }

    pub fn assign(&mut self, post: &[(LiteralId, Status)]) -> Result<()> {
        for (lit, v) in post {
            let slot = self
                .assignment
                .get_mut(lit.0 as usize)
                .ok_or_else(|| Error::UnknownLiteral(lit.to_string()))?;
            *slot = *v;
        }
        Ok(())
    }

    fn display_key(&self) -> (&[Status], Status, Option<Pending>) {
        (&self.assignment, self.r, self.pending)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub p: f64,
    pub state: PhysicalState,
}

/// A finite discrete distribution over physical states. Entries have strictly
/// positive probability; the total mass need not be one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BeliefState {
    entries: Vec<Entry>,
}

impl BeliefState {
    pub fn empty() -> Self {
        BeliefState::default()
    }

    /// A single state with probability one.
    pub fn point(state: PhysicalState) -> Self {
        BeliefState {
            entries: vec![Entry { p: 1.0, state }],
        }
    }

    /// Builds a belief state, dropping nothing; non-positive probabilities are rejected.
    pub fn from_entries(entries: Vec<Entry>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.p <= 0.0 || !e.p.is_finite()) {
            return Err(Error::InvalidRequest(format!(
                "belief entry with probability {}",
                e.p
            )));
        }
        Ok(BeliefState { entries })
    }

    pub(crate) fn from_vec(entries: Vec<Entry>) -> Self {
        BeliefState { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Entry> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc + e.p)
    }

    /// Concatenation of two distributions (no merging).
    pub fn union(mut self, other: BeliefState) -> BeliefState {
        self.entries.extend(other.entries);
        self
    }

    /// Partitions entries by `pred`, preserving order within each part.
    pub fn split_by<F>(self, pred: F) -> (BeliefState, BeliefState)
    where
        F: Fn(&PhysicalState) -> bool,
    {
        let (yes, no): (Vec<Entry>, Vec<Entry>) = self.entries.into_iter().partition(|e| pred(&e.state));
        (BeliefState { entries: yes }, BeliefState { entries: no })
    }

    /// Merges entries with identical physical states and sorts them canonically.
    pub fn coalesce(self) -> BeliefState {
        let mut merged: BTreeMap<PhysicalState, f64> = BTreeMap::new();
        for e in self.entries {
            *merged.entry(e.state).or_insert(0.0) += e.p;
        }
        BeliefState {
            entries: merged.into_iter().map(|(state, p)| Entry { p, state }).collect(),
        }
    }

    /// Mass of entries whose propagated status is success.
    pub fn success_probability(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.state.r == Status::Success)
            .fold(0.0, |acc, e| acc + e.p)
    }

    /// Drops entries lighter than `epsilon`, returning the kept part and the dropped mass.
    pub fn prune(self, epsilon: f64) -> (BeliefState, f64) {
        if epsilon <= 0.0 {
            return (self, 0.0);
        }
        let (keep, drop) = self.split_by_p(|p| p >= epsilon);
        let dropped = drop.mass();
        (keep, dropped)
    }

    fn split_by_p<F: Fn(f64) -> bool>(self, pred: F) -> (BeliefState, BeliefState) {
        let (yes, no): (Vec<Entry>, Vec<Entry>) = self.entries.into_iter().partition(|e| pred(e.p));
        (BeliefState { entries: yes }, BeliefState { entries: no })
    }

    /// Text dump, one line per distinct (assignment, r, pending):
    /// `p | literal=V,... | r=V | pending=action`.
    pub fn dump(&self, domain: &GroundedDomain) -> String {
        let mut rows: BTreeMap<(&[Status], Status, Option<Pending>), f64> = BTreeMap::new();
        for e in &self.entries {
            *rows.entry(e.state.display_key()).or_insert(0.0) += e.p;
        }
        let mut out = String::new();
        for ((assignment, r, pending), p) in rows {
            let lits: Vec<String> = assignment
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{}={}", domain.literal_name(LiteralId(i as u32)), v))
                .collect();
            let pending = match pending {
                Some(pd) => domain
                    .action(pd.action)
                    .map(|a| a.name.clone())
                    .unwrap_or_else(|_| "?".into()),
                None => "-".into(),
            };
            let _ = writeln!(out, "{p:.12} | {} | r={r} | pending={pending}", lits.join(","));
        }
        out
    }
}

/// Applies every outcome of `action` to every entry: `p_i * p_j` mass on the
/// state with outcome `j`'s postconditions assigned. The result is coalesced.
pub fn apply_outcomes(action: &ActionInstance, m: &BeliefState) -> Result<BeliefState> {
    let mut out = Vec::with_capacity(m.len() * action.outcomes.len());
    for e in &m.entries {
        for o in &action.outcomes {
            let mut state = e.state.clone();
            state.assign(&o.post)?;
            out.push(Entry {
                p: e.p * o.probability,
                state,
            });
        }
    }
    Ok(BeliefState { entries: out }.coalesce())
}

/// Sets each entry's return status to the literal's value.
pub fn eval_condition(literal: LiteralId, m: &BeliefState) -> Result<BeliefState> {
    let mut out = m.clone();
    for e in &mut out.entries {
        e.state.r = e.state.value(literal)?;
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= crate::MASS_EPSILON
}
