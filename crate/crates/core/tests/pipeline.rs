use domain_learner::dataset::{generate, generate_test_walks};
use domain_learner::eval::{evaluate, generate_problems, EvalOptions};
use domain_learner::experiment::cell_rng;
use domain_learner::fixtures::Fixture;
use domain_learner::learner::{learn, LearnConfig};
use domain_learner::oracle::{ObservationConfig, Oracle};
use domain_learner::pddl::{parse_domain, serialize_domain};
use domain_learner::Exec;

fn learn_and_score(f: Fixture, observe: f64, noise: f64) -> (f64, f64, String) {
    let o = Oracle::new(f.domain(), f.problems().remove(1)).unwrap();
    let cfg = ObservationConfig::new(observe, noise).unwrap();
    let ds = generate(&o, &o.init, 30, (10, 20), &cfg, &mut cell_rng(9, 1, 0), Exec::Parallel).unwrap();
    let out = learn(&o.domain, &o.grounding, &ds, &LearnConfig::default()).unwrap();

    // the written domain parses back to the same operators
    let text = serialize_domain(&out.domain);
    let back = parse_domain(&text).unwrap();
    assert_eq!(back, out.domain);

    let test = generate_test_walks(&o, &o.init, 50, (1, 50), &mut cell_rng(9, 1, 1));
    let problems = generate_problems(&o, &o.init, 10, (20, 50), &mut cell_rng(9, 1, 2));
    let m = evaluate(&back, &o, &o.init, &test, &problems, &EvalOptions::default()).unwrap();
    (m.e_sigma, m.acc, text)
}

#[test]
fn noiseless_gripper_is_exact() {
    let (sigma, acc, text) = learn_and_score(Fixture::Gripper, 1.0, 0.0);
    assert_eq!(sigma, 0.0);
    assert_eq!(acc, 100.0);
    assert_eq!(text.matches("(:action").count(), 3);
}

#[test]
fn negative_preconditions_are_learned() {
    let (sigma, acc, text) = learn_and_score(Fixture::NegElevator, 1.0, 0.0);
    assert_eq!(sigma, 0.0);
    assert_eq!(acc, 100.0);
    assert!(text.contains("(not "));
}

#[test]
fn noisy_partial_blocksworld_still_plans() {
    let (_, acc, _) = learn_and_score(Fixture::Blocksworld, 0.25, 0.2);
    assert!(acc >= 50.0, "acc {acc}");
}
