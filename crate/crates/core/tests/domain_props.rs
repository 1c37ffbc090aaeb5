mod common;

use bbt_core::domain::{ground, parse_domain, write_domain, ParseError, SODA_DOMAIN};
use bbt_core::tree::IdAllocator;
use common::specs::random_spec;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn written_specs_parse_back(seed in any::<u64>()) {
        let spec = random_spec(&mut StdRng::seed_from_u64(seed));
        let text = write_domain(&spec);
        let parsed = parse_domain(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&parsed, &spec);
        prop_assert_eq!(write_domain(&parsed), text);
    }

    #[test]
    fn generated_specs_ground(seed in any::<u64>()) {
        let spec = random_spec(&mut StdRng::seed_from_u64(seed));
        let d = ground(&spec).unwrap();
        let expected: usize = spec
            .conditions
            .iter()
            .map(|c| c.params.iter().map(|p| spec.param(p).unwrap().instances.len()).product::<usize>())
            .sum();
        prop_assert_eq!(d.literals().len(), expected);
        prop_assert_eq!(d.initial().len(), expected);
        for a in d.actions() {
            let total: f64 = a.outcomes.iter().map(|o| o.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
        let mut ids = IdAllocator::starting_at(0);
        for t in d.templates() {
            let body = d.instantiate(t.id, &mut ids).unwrap();
            prop_assert!(body.validate().is_ok());
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[a-z(){};=.0-9 \n]{0,80}") {
        let _ = parse_domain(&text);
    }
}

fn error_at(text: &str) -> (usize, usize, String) {
    let err = parse_domain(text).unwrap_err();
    let (l, c) = err.location();
    (l, c, err.to_string())
}

#[test]
fn diagnostics_carry_positions() {
    let (l, c, msg) = error_at("condition a values { S F }\ncondition a values { S }");
    assert_eq!((l, c), (2, 11));
    assert!(msg.contains("duplicate"), "{msg}");

    let (l, _, msg) = error_at("param p { x }\ncondition c(q) values { S }");
    assert_eq!(l, 2);
    assert!(msg.contains("unknown parameter space"), "{msg}");

    let (l, _, msg) = error_at("condition c values { S F }\ninitial { c = R }");
    assert_eq!(l, 2);
    assert!(msg.contains("not allowed"), "{msg}");

    let (l, _, msg) = error_at("condition c values { S F }\n\ngoal { c = F } prob 0.9");
    assert_eq!(l, 3);
    assert!(msg.contains("must require S"), "{msg}");

    let (_, _, msg) = error_at("condition c values { S F }\ngoal { c = S } prob 1.5");
    assert!(msg.contains("outside (0, 1]"), "{msg}");

    let (l, _, msg) = error_at("condition c values { S F }\naction a { pre { } }");
    assert_eq!(l, 2);
    assert!(msg.contains("no outcomes"), "{msg}");

    let err = parse_domain("condition c values { S F").unwrap_err();
    assert!(matches!(err, ParseError::Syntax { .. }));
}

#[test]
fn template_cycles_are_rejected() {
    let text = "condition c values { S F }\n\
                template a { pre { } body tmpl b }\n\
                template b { pre { } body seq { tmpl a } }";
    let err = parse_domain(text).unwrap_err();
    assert!(err.to_string().contains("expands into itself"), "{err}");
}

#[test]
fn soda_grounds_to_the_expected_counts() {
    let d = ground(&parse_domain(SODA_DOMAIN).unwrap()).unwrap();
    let names: Vec<&str> = d.literals().iter().map(|l| l.name.as_str()).collect();
    assert_eq!(names, ["at(table1)", "at(table2)", "seen(soda)", "seen(sprayer)", "luminousity_ok"]);
    assert_eq!(d.actions().len() + d.templates().len(), 7);
}

#[test]
fn empty_parameter_space_warns() {
    let d = ground(&parse_domain("param p { }\ncondition c(p) values { S F }").unwrap()).unwrap();
    assert!(d.literals().is_empty());
    assert_eq!(d.warnings().len(), 1);
}
