//! Evaluation problems drawn from random walks.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::planner::Goal;
use crate::oracle::Oracle;
use crate::pddl::{GroundLiteral, GroundState, Grounding, Problem, PropId};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalProblem {
    pub init: Vec<PropId>,
    pub goal: Goal,
}

impl EvalProblem {
    pub fn init_state(&self, universe: usize) -> GroundState {
        let mut s = GroundState::empty(universe);
        for &p in &self.init {
            s.insert(p);
        }
        s
    }

    pub fn to_problem(&self, g: &Grounding, domain: &str, name: &str) -> Problem {
        Problem {
            name: name.to_string(),
            domain: domain.to_string(),
            objects: g.objects.clone(),
            init: self.init.iter().map(|p| g.props[p.index()].clone()).collect(),
            goal: self
                .goal
                .pos
                .iter()
                .map(|p| GroundLiteral {
                    atom: g.props[p.index()].clone(),
                    positive: true,
                })
                .collect(),
        }
    }
}

fn random_walk(oracle: &Oracle, s: &GroundState, len: usize, rng: &mut ChaCha8Rng) -> GroundState {
    let mut s = s.clone();
    let ids: Vec<_> = oracle.grounding.action_ids().collect();
    for _ in 0..len {
        let options: Vec<_> = ids.iter().filter(|&&a| oracle.is_applicable(&s, a)).collect();
        match options.choose(rng) {
            Some(&&a) => s = oracle.apply(&s, a).next_state.unwrap(),
            None => break,
        }
    }
    s
}

/// `n` problems whose initial state is reached by a short walk from `s0`
/// and whose goal is a subset of the state at the end of a longer walk.
/// At least one goal proposition is false initially, so no goal is trivial.
pub fn generate_problems(
    oracle: &Oracle,
    s0: &GroundState,
    n: usize,
    len_range: (usize, usize),
    rng: &mut ChaCha8Rng,
) -> Vec<EvalProblem> {
    let statics = oracle.domain.static_predicates();
    let g = &oracle.grounding;
    let fluent = |p: PropId| !statics.contains(&g.props[p.index()].predicate);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n && attempts < 100 * n.max(1) {
        attempts += 1;
        let init = random_walk(oracle, s0, rng.random_range(0..=5), rng);
        let end = random_walk(oracle, &init, rng.random_range(len_range.0..=len_range.1), rng);
        let candidates: Vec<PropId> = end.iter().filter(|&p| fluent(p)).collect();
        let changed: Vec<PropId> = candidates.iter().copied().filter(|&p| !init.contains(p)).collect();
        let Some(&first) = changed.choose(rng) else {
            continue;
        };
        let k = rng.random_range(1..=candidates.len().min(4));
        let rest: Vec<PropId> = candidates.iter().copied().filter(|&p| p != first).collect();
        let mut goal: Vec<PropId> = rest.choose_multiple(rng, k - 1).copied().collect();
        goal.push(first);
        goal.sort();
        out.push(EvalProblem {
            init: init.iter().collect(),
            goal: Goal { pos: goal, neg: vec![] },
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::eval::{plan, validate, PlannerLimits};
    use crate::fixtures::Fixture;
    use crate::pddl::{parse_problem, serialize_problem};

    fn problems(f: Fixture, seed: u64) -> (Oracle, Vec<EvalProblem>) {
        let o = Oracle::new(f.domain(), f.problems().remove(0)).unwrap();
        let ps = generate_problems(&o, &o.init, 10, (20, 50), &mut ChaCha8Rng::seed_from_u64(seed));
        (o, ps)
    }

    #[test]
    fn goals_are_open_and_solvable() {
        for f in Fixture::ALL {
            let (o, ps) = problems(f, 7);
            assert_eq!(ps.len(), 10, "{}", f.name());
            let n = o.grounding.prop_count();
            for p in &ps {
                let init = p.init_state(n);
                assert!(!p.goal.satisfied(&init));
                assert!((1..=4).contains(&p.goal.pos.len()));
                let pi = plan(&o.grounding, &init, &p.goal, &PlannerLimits::default());
                assert!(validate(&o.grounding, &init, &p.goal, pi.plan().unwrap()));
            }
        }
    }

    #[test]
    fn same_seed_same_problems() {
        assert_eq!(problems(Fixture::Blocksworld, 3).1, problems(Fixture::Blocksworld, 3).1);
        assert_ne!(problems(Fixture::Blocksworld, 3).1, problems(Fixture::Blocksworld, 4).1);
    }

    #[test]
    fn pddl_round_trip() {
        let (o, ps) = problems(Fixture::Gripper, 1);
        for (i, p) in ps.iter().enumerate() {
            let prob = p.to_problem(&o.grounding, &o.domain.name, &format!("eval-{i}"));
            let back = parse_problem(&serialize_problem(&o.domain, &prob), &o.domain).unwrap();
            assert_eq!(Goal::of_problem(&o.grounding, &back).unwrap(), p.goal);
            assert_eq!(o.grounding.state_of(&back.init), p.init_state(o.grounding.prop_count()));
        }
    }
}
