//! Classic execution: one physical state, outcomes sampled at random.
//!
//! Used as an independent check of the belief-space simulation. Follows the
//! same delayed-outcome convention: an action returns `R` on the tick it
//! starts, and its sampled outcome is applied before the next root tick.

use std::collections::BTreeMap;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::belief::{Pending, PhysicalState};
use crate::domain::{ActionId, GroundedDomain};
use crate::tree::{reset_latches, Latch, Node, NodeId, NodeKind};
use crate::{Error, Result, Status};

/// Source of uniform draws in `[0, 1)` for outcome selection.
pub trait OutcomeSampler {
    fn next_unit(&mut self) -> f64;
}

/// Counter-based generator: ChaCha8 keyed by the seed, one stream per run,
/// the stream position acting as draw index. Any `(seed, run, draw)` triple
/// names a fixed value independent of the other runs.
#[derive(Debug, Clone)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, run: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(run);
        CounterRng { inner }
    }
}

impl OutcomeSampler for CounterRng {
    fn next_unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub tick: usize,
    pub node: NodeId,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealizedOutcome {
    pub tick: usize,
    pub node: NodeId,
    pub action: ActionId,
    pub outcome: usize,
}

/// Node returns in the order they happened, plus sampled outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExecutionTrace {
    pub events: Vec<TraceEvent>,
    pub outcomes: Vec<RealizedOutcome>,
}

/// Ticks `node` once on `state`. Latches live in the tree; a started action
/// is left pending in `state` for [`finish_pending`].
pub fn classic_tick(
    domain: &GroundedDomain,
    node: &mut Node,
    state: &mut PhysicalState,
    tick: usize,
    mut trace: Option<&mut ExecutionTrace>,
) -> Result<Status> {
    let id = node.id;
    let status = match &mut node.kind {
        NodeKind::Condition { literal } => state.value(*literal)?,
        NodeKind::Action { action, latch } => match *latch {
            Latch::Done(s) => s,
            Latch::Fresh | Latch::Pending => {
                domain.action(*action)?;
                if state.pending.is_none() {
                    state.pending = Some(Pending {
                        node: id,
                        action: *action,
                    });
                    *latch = Latch::Pending;
                }
                Status::Running
            }
        },
        NodeKind::Control { control, children } => {
            let cont = control.continue_status();
            let mut result = cont;
            for child in children.iter_mut() {
                let s = classic_tick(domain, child, state, tick, trace.as_deref_mut())?;
                if s != cont {
                    result = s;
                    break;
                }
            }
            result
        }
    };
    if let Some(t) = trace {
        t.events.push(TraceEvent { tick, node: id, status });
    }
    Ok(status)
}

/// Samples and applies the outcome of the pending action, latching its report.
pub fn finish_pending(
    domain: &GroundedDomain,
    tree: &mut Node,
    state: &mut PhysicalState,
    rng: &mut impl OutcomeSampler,
    tick: usize,
    trace: Option<&mut ExecutionTrace>,
) -> Result<()> {
    let pending = state.pending.take().ok_or(Error::NoPending)?;
    let action = domain.action(pending.action)?;
    let u = rng.next_unit();
    let mut cumulative = 0.0;
    let mut chosen = action.outcomes.len() - 1;
    for (j, o) in action.outcomes.iter().enumerate() {
        cumulative += o.probability;
        if u < cumulative {
            chosen = j;
            break;
        }
    }
    let outcome = &action.outcomes[chosen];
    state.assign(&outcome.post)?;
    match tree.find_mut(pending.node).map(|n| &mut n.kind) {
        Some(NodeKind::Action { latch, .. }) => *latch = Latch::Done(outcome.report),
        _ => return Err(Error::InvalidTree(format!("pending node {} is not an action", pending.node))),
    }
    if let Some(t) = trace {
        t.outcomes.push(RealizedOutcome {
            tick,
            node: pending.node,
            action: pending.action,
            outcome: chosen,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicRun {
    /// Root status of the last tick, the one that started no action.
    pub status: Status,
    pub ticks: usize,
    pub state: PhysicalState,
    pub trace: ExecutionTrace,
}

/// Ticks the root until a tick starts no action.
pub fn run_classic(
    domain: &GroundedDomain,
    tree: &mut Node,
    initial: PhysicalState,
    rng: &mut impl OutcomeSampler,
    max_ticks: usize,
    record: bool,
) -> Result<ClassicRun> {
    let mut state = initial;
    state.pending = None;
    let mut trace = ExecutionTrace::default();
    let mut tick = 0;
    loop {
        if tick >= max_ticks {
            return Err(Error::TickLimitExceeded { limit: max_ticks });
        }
        let status = classic_tick(domain, tree, &mut state, tick, record.then_some(&mut trace))?;
        state.r = status;
        if state.pending.is_none() {
            return Ok(ClassicRun {
                status,
                ticks: tick + 1,
                state,
                trace,
            });
        }
        finish_pending(domain, tree, &mut state, rng, tick, record.then_some(&mut trace))?;
        tick += 1;
    }
}

/// Aggregate of independent classic runs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonteCarloSummary {
    pub runs: u64,
    pub successes: u64,
    /// Run counts per final (assignment, root status).
    pub outcomes: BTreeMap<(Vec<Status>, Status), u64>,
}

impl MonteCarloSummary {
    pub fn success_rate(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.successes as f64 / self.runs as f64
        }
    }
}

/// Runs the tree `runs` times from `initial`; run `i` draws from `CounterRng::new(seed, i)`
/// on its own latch-reset copy of the tree. Runs are spread over worker threads;
/// the summary does not depend on how they are split.
pub fn monte_carlo(
    domain: &GroundedDomain,
    tree: &Node,
    initial: &PhysicalState,
    seed: u64,
    runs: u64,
    max_ticks: usize,
) -> Result<MonteCarloSummary> {
    tree.validate()?;
    let fresh = reset_latches(tree);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()) as u64;
    let workers = workers.clamp(1, runs.max(1));
    let chunk = runs.div_ceil(workers);

    let batch = |range: std::ops::Range<u64>| -> Result<MonteCarloSummary> {
        let mut summary = MonteCarloSummary::default();
        for run in range {
            let mut t = fresh.clone();
            let mut rng = CounterRng::new(seed, run);
            let out = run_classic(domain, &mut t, initial.clone(), &mut rng, max_ticks, false)?;
            summary.runs += 1;
            if out.status == Status::Success {
                summary.successes += 1;
            }
            *summary
                .outcomes
                .entry((out.state.assignment, out.status))
                .or_default() += 1;
        }
        Ok(summary)
    };

    let parts: Vec<Result<MonteCarloSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk).min(runs)..((w + 1) * chunk).min(runs);
                let batch = &batch;
                scope.spawn(move || batch(range))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("monte carlo worker panicked"))
            .collect()
    });

    let mut total = MonteCarloSummary::default();
    for part in parts {
        let part = part?;
        total.runs += part.runs;
        total.successes += part.successes;
        for (k, v) in part.outcomes {
            *total.outcomes.entry(k).or_default() += v;
        }
    }
    Ok(total)
}
