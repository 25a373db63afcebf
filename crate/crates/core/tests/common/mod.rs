//! Reference models shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use domain_learner::dataset::generate;
use domain_learner::learner::space::{Mask, OpModel};
use domain_learner::learner::{tabu_search, Candidate, FitnessData, SchemaSpace, TabuConfig};
use domain_learner::oracle::{ObservationConfig, Oracle};
use domain_learner::pddl::{parse_domain, parse_problem, GroundState};
use domain_learner::Exec;

/// Hand-written Blocksworld over blocks a, b, c.
pub mod blocks {
    use super::*;

    pub const NAMES: [&str; 3] = ["a", "b", "c"];

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Pos {
        Table,
        On(usize),
        Held,
    }

    pub type State = [Pos; 3];

    fn clear(s: &State, x: usize) -> bool {
        s[x] != Pos::Held && !s.contains(&Pos::On(x))
    }

    fn hand_empty(s: &State) -> bool {
        !s.contains(&Pos::Held)
    }

    /// Every physically possible arrangement.
    pub fn all_states() -> Vec<State> {
        let options = |i: usize| {
            let mut v = vec![Pos::Table, Pos::Held];
            v.extend((0..3).filter(|&j| j != i).map(Pos::On));
            v
        };
        let mut out = Vec::new();
        for p0 in options(0) {
            for p1 in options(1) {
                for p2 in options(2) {
                    let s = [p0, p1, p2];
                    if valid(&s) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    fn valid(s: &State) -> bool {
        if s.iter().filter(|&&p| p == Pos::Held).count() > 1 {
            return false;
        }
        for y in 0..3 {
            let above = s.iter().filter(|&&p| p == Pos::On(y)).count();
            if above > 1 || (above == 1 && s[y] == Pos::Held) {
                return false;
            }
        }
        // no cycles: following On links from any block ends on the table or in the hand
        (0..3).all(|x| {
            let mut cur = x;
            for _ in 0..4 {
                match s[cur] {
                    Pos::On(y) => cur = y,
                    _ => return true,
                }
            }
            false
        })
    }

    /// Ground action label, e.g. `stack(a,b)`, applied to `s`.
    pub fn apply(s: &State, label: &str) -> Option<State> {
        let (name, args) = label.split_once('(').unwrap();
        let args: Vec<usize> = args
            .trim_end_matches(')')
            .split(',')
            .map(|a| NAMES.iter().position(|n| *n == a).unwrap())
            .collect();
        let mut n = *s;
        match (name, args.as_slice()) {
            ("pick-up", &[x]) if s[x] == Pos::Table && clear(s, x) && hand_empty(s) => n[x] = Pos::Held,
            ("put-down", &[x]) if s[x] == Pos::Held => n[x] = Pos::Table,
            ("stack", &[x, y]) if x != y && s[x] == Pos::Held && clear(s, y) => n[x] = Pos::On(y),
            ("unstack", &[x, y]) if s[x] == Pos::On(y) && clear(s, x) && hand_empty(s) => n[x] = Pos::Held,
            _ => return None,
        }
        Some(n)
    }

    /// Proposition labels true in `s`.
    pub fn labels(s: &State) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for x in 0..3 {
            match s[x] {
                Pos::Table => {
                    out.insert(format!("ontable({})", NAMES[x]));
                }
                Pos::On(y) => {
                    out.insert(format!("on({},{})", NAMES[x], NAMES[y]));
                }
                Pos::Held => {
                    out.insert(format!("holding({})", NAMES[x]));
                }
            }
            if clear(s, x) {
                out.insert(format!("clear({})", NAMES[x]));
            }
        }
        if hand_empty(s) {
            out.insert("handempty()".to_string());
        }
        out
    }

    /// Compares the oracle with the table on every arrangement and every
    /// ground action. Returns the number of checks, or the first mismatch.
    pub fn check(oracle: &Oracle) -> Result<usize, String> {
        let g = &oracle.grounding;
        let (props, _) = g.label_index();
        let encode = |s: &State| -> GroundState {
            let mut out = GroundState::empty(g.prop_count());
            for l in labels(s) {
                out.insert(props[&l]);
            }
            out
        };
        let decode = |s: &GroundState| -> BTreeSet<String> { s.iter().map(|p| g.prop_label(p)).collect() };
        let mut checks = 0;
        for s in all_states() {
            let gs = encode(&s);
            for a in g.action_ids() {
                let label = g.action_label(a);
                let want = apply(&s, &label).map(|n| labels(&n));
                let got = oracle.apply(&gs, a).next_state.map(|n| decode(&n));
                if want != got {
                    return Err(format!("{label} in {:?}: expected {want:?}, got {got:?}", labels(&s)));
                }
                checks += 1;
            }
        }
        Ok(checks)
    }
}

/// One-operator worlds over three nullary propositions.
pub mod toy {
    use super::*;

    pub const WORLDS: [(&str, &str); 3] = [
        ("grow", ":precondition (p) :effect (and (q) (not (r)))"),
        ("flip", ":precondition (and (p) (not (q))) :effect (and (q) (not (p)))"),
        ("swap", ":precondition (and (r) (not (p))) :effect (and (p) (not (r)))"),
    ];

    pub fn oracle(body: &str) -> Oracle {
        let domain = parse_domain(&format!(
            "(define (domain toy) (:requirements :strips :negative-preconditions)
               (:predicates (p) (q) (r))
               (:action step :parameters () {body}))"
        ))
        .unwrap();
        let problem = parse_problem(
            "(define (problem toy-1) (:domain toy) (:init (p) (r)) (:goal (and (q))))",
            &domain,
        )
        .unwrap();
        Oracle::new(domain, problem).unwrap()
    }

    /// Every consistent model of a 3-atom operator.
    pub fn all_models() -> Vec<OpModel> {
        let mut out = Vec::new();
        // per atom: 0 none, 1 positive, 2 negative (pre) / 1 add, 2 del (effects)
        for code in 0..729u32 {
            let mut m = OpModel::default();
            let mut c = code;
            for k in 0..3 {
                let bit: Mask = 1 << k;
                match c % 3 {
                    1 => m.pre_pos |= bit,
                    2 => m.pre_neg |= bit,
                    _ => {}
                }
                c /= 3;
                match c % 3 {
                    1 => m.add |= bit,
                    2 => m.del |= bit,
                    _ => {}
                }
                c /= 3;
            }
            out.push(m);
        }
        out
    }

    /// `(tabu score, exhaustive optimum)` on one sampled dataset.
    pub fn compare(body: &str, seed: u64, observe: f64, noise: f64) -> (i64, i64) {
        let o = oracle(body);
        let cfg = ObservationConfig::new(observe, noise).unwrap();
        let ds = generate(
            &o,
            &o.init,
            10,
            (3, 6),
            &cfg,
            &mut ChaCha8Rng::seed_from_u64(seed),
            Exec::Sequential,
        )
        .unwrap();
        let space = SchemaSpace::new(&o.domain.signature(), &o.grounding).unwrap();
        assert_eq!(space.atoms[0].len(), 3);
        let data = FitnessData::new(&space, &ds.positives, &ds.negatives, o.grounding.prop_count());
        let best = all_models()
            .into_iter()
            .map(|m| data.score(&space, &vec![m] as &Candidate).total())
            .max()
            .unwrap();
        let r = tabu_search(
            &space.empty_candidate(),
            &space,
            &data,
            &TabuConfig::default(),
            Exec::Sequential,
        );
        (r.score.total(), best)
    }
}
