mod common;

use std::collections::BTreeMap;

use bbt_core::belief::{BeliefState, PhysicalState};
use bbt_core::domain::{ground, parse_domain, SODA_DOMAIN, SODA_STOCHASTIC_DOMAIN};
use bbt_core::exec::{initial_belief, simulate, SimulationLimits};
use bbt_core::planner::{refine_tree, PlanRequest};
use common::{distance, oracle, project, random_assignment, random_belief, random_domain, random_tree};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn simulate_matches_enumeration_from_a_point(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let domain = random_domain(&mut rng, false);
        let tree = random_tree(&mut rng, &domain, 8);
        let values = random_assignment(&mut rng, &domain);
        let res = simulate(&domain, &tree, &BeliefState::point(PhysicalState::new(values.clone())), &SimulationLimits::default()).unwrap();
        let expected = oracle::enumerate(&domain, &tree, &values);
        prop_assert!(distance(&project(&res.terminal), &expected.terminal) <= 1e-12);
        prop_assert_eq!(res.ticks_used, expected.max_ticks);
    }

    #[test]
    fn simulate_matches_enumeration_from_a_mixture(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let domain = random_domain(&mut rng, false);
        let tree = random_tree(&mut rng, &domain, 8);
        let m = random_belief(&mut rng, &domain, &tree, 6);
        let res = simulate(&domain, &tree, &m, &SimulationLimits::default()).unwrap();
        let mut expected: BTreeMap<_, f64> = BTreeMap::new();
        for e in m.entries() {
            let part = oracle::enumerate_from(&domain, &tree, &e.state.assignment, &e.state.latches, e.p);
            for (k, v) in part.terminal {
                *expected.entry(k).or_default() += v;
            }
        }
        prop_assert!(distance(&project(&res.terminal), &expected) <= 1e-12);
    }
}

#[test]
fn planned_soda_trees_match_enumeration() {
    for text in [SODA_DOMAIN, SODA_STOCHASTIC_DOMAIN] {
        let d = ground(&parse_domain(text).unwrap()).unwrap();
        let plan = refine_tree(&PlanRequest::from_domain(&d).unwrap()).unwrap();
        let res = simulate(&d, &plan.tree, &initial_belief(&d), &SimulationLimits::default()).unwrap();
        let expected = oracle::enumerate(&d, &plan.tree, d.initial());
        assert!(distance(&project(&res.terminal), &expected.terminal) <= 1e-12);
        let total: f64 = expected.terminal.values().sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }
}
