mod common;

use bbt_core::belief::{apply_outcomes, eval_condition, BeliefState, PhysicalState};
use bbt_core::classic::{run_classic, CounterRng};
use bbt_core::exec::{belief_tick, simulate, SimulationLimits};
use bbt_core::tree::reset_latches;
use bbt_core::Status;
use common::{random_assignment, random_belief, random_domain, random_tree};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

const EPS: f64 = 1e-12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tick_and_simulate_conserve_mass(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let domain = random_domain(&mut rng, false);
        let tree = random_tree(&mut rng, &domain, 8);
        let m = random_belief(&mut rng, &domain, &tree, 6);
        let before = m.mass();
        let ticked = belief_tick(&domain, &tree, m.clone()).unwrap();
        prop_assert!((ticked.mass() - before).abs() <= EPS);
        let res = simulate(&domain, &tree, &m, &SimulationLimits::default()).unwrap();
        prop_assert!((res.terminal.mass() - before).abs() <= EPS);
        prop_assert!(res.terminal.entries().iter().all(|e| e.state.pending.is_none()));
        prop_assert!(res.terminal.entries().iter().all(|e| e.p > 0.0));
    }

    #[test]
    fn coalesce_is_idempotent_and_mass_preserving(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let domain = random_domain(&mut rng, false);
        let tree = random_tree(&mut rng, &domain, 8);
        let m = random_belief(&mut rng, &domain, &tree, 6);
        let doubled = m.clone().union(m.clone());
        let once = doubled.clone().coalesce();
        prop_assert!((once.mass() - doubled.mass()).abs() <= EPS);
        prop_assert_eq!(once.clone().coalesce(), once.clone());
        prop_assert!(once.len() <= m.len());
    }

    #[test]
    fn outcome_application_conserves_mass(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let domain = random_domain(&mut rng, false);
        let tree = random_tree(&mut rng, &domain, 4);
        let m = random_belief(&mut rng, &domain, &tree, 6);
        let action = &domain.actions()[rng.random_range(0..domain.actions().len())];
        let out = apply_outcomes(action, &m).unwrap();
        prop_assert!((out.mass() - m.mass()).abs() <= EPS);
        let lit = bbt_core::domain::LiteralId(rng.random_range(0..domain.literals().len()) as u32);
        let evaluated = eval_condition(lit, &m).unwrap();
        prop_assert!((evaluated.mass() - m.mass()).abs() <= EPS);
        for e in evaluated.entries() {
            prop_assert_eq!(e.state.r, e.state.value(lit).unwrap());
        }
    }

    #[test]
    fn split_and_union_partition_mass(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let domain = random_domain(&mut rng, false);
        let tree = random_tree(&mut rng, &domain, 8);
        let m = random_belief(&mut rng, &domain, &tree, 6);
        let (yes, no) = m.clone().split_by(|s| s.r == Status::Success);
        prop_assert!((yes.mass() + no.mass() - m.mass()).abs() <= EPS);
        prop_assert_eq!(yes.success_probability(), m.success_probability());
        prop_assert_eq!(yes.union(no).len(), m.len());
    }

    #[test]
    fn deterministic_point_matches_classic(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let domain = random_domain(&mut rng, true);
        let tree = random_tree(&mut rng, &domain, 8);
        let values = random_assignment(&mut rng, &domain);
        let res = simulate(&domain, &tree, &BeliefState::point(PhysicalState::new(values.clone())), &SimulationLimits::default()).unwrap();
        prop_assert_eq!(res.terminal.len(), 1);
        let mut t = reset_latches(&tree);
        let run = run_classic(&domain, &mut t, PhysicalState::new(values), &mut CounterRng::new(seed, 0), 1000, false).unwrap();
        let terminal = &res.terminal.entries()[0].state;
        prop_assert_eq!(terminal.r, run.status);
        prop_assert_eq!(&terminal.assignment, &run.state.assignment);
        prop_assert_eq!(res.ticks_used, run.ticks);
    }
}

#[test]
fn prune_reports_dropped_mass() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..50 {
        let domain = random_domain(&mut rng, false);
        let tree = random_tree(&mut rng, &domain, 8);
        let m = random_belief(&mut rng, &domain, &tree, 6);
        let limits = SimulationLimits {
            prune_epsilon: 0.05,
            ..SimulationLimits::default()
        };
        let res = simulate(&domain, &tree, &m, &limits).unwrap();
        assert!((res.terminal.mass() + res.pruned_mass - m.mass()).abs() <= EPS);
    }
}

#[test]
fn empty_belief_state() {
    let m = BeliefState::empty();
    assert_eq!(m.mass(), 0.0);
    assert_eq!(m.success_probability(), 0.0);
    assert!(m.coalesce().is_empty());
}
