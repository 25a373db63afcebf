//! The ground-truth state machine queried by the learner.

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{ground, ActionId, Domain, GroundAction, GroundState, Grounding, PddlError, Problem, PropId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionResult {
    pub next_state: Option<GroundState>,
}

impl TransitionResult {
    pub fn feasible(&self) -> bool {
        self.next_state.is_some()
    }
}

#[inline]
pub fn applicable(s: &GroundState, a: &GroundAction) -> bool {
    a.pre_pos.iter().all(|&p| s.contains(p)) && !a.pre_neg.iter().any(|&p| s.contains(p))
}

/// `(s ∪ add) \ del` regardless of preconditions.
pub fn successor(s: &GroundState, a: &GroundAction) -> GroundState {
    let mut next = s.clone();
    for &p in &a.add {
        next.insert(p);
    }
    for &p in &a.del {
        next.remove(p);
    }
    next
}

pub fn apply(s: &GroundState, a: &GroundAction) -> TransitionResult {
    TransitionResult {
        next_state: applicable(s, a).then(|| successor(s, a)),
    }
}

/// States visited while executing `pi` from `s0`, stopping before the first
/// inapplicable action.
pub fn run(g: &Grounding, s0: &GroundState, pi: &[ActionId]) -> Vec<GroundState> {
    let mut out = vec![s0.clone()];
    for &a in pi {
        match apply(out.last().unwrap(), g.action(a)).next_state {
            Some(s) => out.push(s),
            None => break,
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{name} must lie in [0, 1], got {value}")]
    OutOfRange { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationConfig {
    pub observe_fraction: f64,
    pub noise_rate: f64,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        ObservationConfig {
            observe_fraction: 1.0,
            noise_rate: 0.0,
        }
    }
}

impl ObservationConfig {
    pub fn new(observe_fraction: f64, noise_rate: f64) -> Result<Self, ConfigError> {
        let c = ObservationConfig {
            observe_fraction,
            noise_rate,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("observe_fraction", self.observe_fraction),
            ("noise_rate", self.noise_rate),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::OutOfRange { name, value });
            }
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.observe_fraction >= 1.0 && self.noise_rate <= 0.0
    }
}

/// A partial assignment of truth values. Propositions outside `known` carry
/// no information.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observation {
    known: FixedBitSet,
    value: FixedBitSet,
}

impl Observation {
    pub fn unknown(universe: usize) -> Self {
        Observation {
            known: FixedBitSet::with_capacity(universe),
            value: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(s: &GroundState) -> Self {
        let mut known = FixedBitSet::with_capacity(s.universe());
        known.insert_range(..);
        Observation {
            known,
            value: s.bits().clone(),
        }
    }

    pub fn universe(&self) -> usize {
        self.known.len()
    }

    #[inline]
    pub fn get(&self, p: PropId) -> Option<bool> {
        self.known.contains(p.index()).then(|| self.value.contains(p.index()))
    }

    pub fn set(&mut self, p: PropId, v: Option<bool>) {
        self.known.set(p.index(), v.is_some());
        self.value.set(p.index(), v == Some(true));
    }

    pub fn known(&self) -> &FixedBitSet {
        &self.known
    }

    /// Truth values, zero outside `known`.
    pub fn values(&self) -> &FixedBitSet {
        &self.value
    }

    pub fn observed_count(&self) -> usize {
        self.known.count_ones(..)
    }
}

/// Masks each proposition with probability `1 - observe_fraction`, then flips
/// each remaining value with probability `noise_rate`.
pub fn observe<R: Rng + ?Sized>(s: &GroundState, cfg: &ObservationConfig, rng: &mut R) -> Observation {
    let n = s.universe();
    let mut obs = Observation::unknown(n);
    for i in 0..n {
        if rng.random_bool(cfg.observe_fraction) {
            let mut v = s.contains(PropId(i as u32));
            if rng.random_bool(cfg.noise_rate) {
                v = !v;
            }
            obs.set(PropId(i as u32), Some(v));
        }
    }
    obs
}

/// A ground-truth domain bound to one problem instance.
///
/// Actions whose static preconditions (over predicates no operator changes)
/// fail in the initial state can never fire and are left out of the alphabet.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub domain: Domain,
    pub problem: Problem,
    pub grounding: Grounding,
    pub init: GroundState,
}

impl Oracle {
    pub fn new(domain: Domain, problem: Problem) -> Result<Self, PddlError> {
        if problem.domain != domain.name {
            return Err(PddlError::DomainMismatch {
                expected: domain.name.clone(),
                found: problem.domain.clone(),
            });
        }
        let mut grounding = ground(&domain, &problem.objects)?;
        let init = grounding.state_of(&problem.init);
        let statics = domain.static_predicates();
        let is_static = |g: &Grounding, p: PropId| statics.contains(&g.props[p.index()].predicate);
        let g2 = grounding.clone();
        grounding.retain_actions(|a| {
            a.pre_pos.iter().all(|&p| !is_static(&g2, p) || init.contains(p))
                && a.pre_neg.iter().all(|&p| !is_static(&g2, p) || !init.contains(p))
        });
        Ok(Oracle {
            domain,
            problem,
            grounding,
            init,
        })
    }

    pub fn action_count(&self) -> usize {
        self.grounding.action_count()
    }

    pub fn apply(&self, s: &GroundState, a: ActionId) -> TransitionResult {
        apply(s, self.grounding.action(a))
    }

    pub fn is_applicable(&self, s: &GroundState, a: ActionId) -> bool {
        applicable(s, self.grounding.action(a))
    }

    pub fn run(&self, s0: &GroundState, pi: &[ActionId]) -> Vec<GroundState> {
        run(&self.grounding, s0, pi)
    }

    pub fn is_feasible(&self, s0: &GroundState, pi: &[ActionId]) -> bool {
        self.run(s0, pi).len() == pi.len() + 1
    }

    /// Same objects and alphabet with the initial state replaced.
    pub fn with_init(&self, init: GroundState) -> Oracle {
        Oracle { init, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gripper() -> Oracle {
        let d = Fixture::Gripper.domain();
        Oracle::new(d, Fixture::Gripper.problems().remove(0)).unwrap()
    }

    fn act(o: &Oracle, label: &str) -> ActionId {
        o.grounding.label_index().1[label]
    }

    #[test]
    fn pick_needs_robot_in_room() {
        let o = gripper();
        let pick = act(&o, "pick(ball1,roomb,left)");
        assert!(!o.apply(&o.init, pick).feasible());
        let pick = act(&o, "pick(ball1,rooma,left)");
        assert!(o.apply(&o.init, pick).feasible());
    }

    #[test]
    fn empty_action_is_identity() {
        let s = GroundState::empty(4);
        let a = GroundAction {
            schema: 0,
            args: vec![],
            pre_pos: vec![],
            pre_neg: vec![],
            add: vec![],
            del: vec![],
        };
        assert_eq!(apply(&s, &a).next_state, Some(s));
    }

    #[test]
    fn run_stops_at_first_failure() {
        let o = gripper();
        assert_eq!(o.run(&o.init, &[]), vec![o.init.clone()]);
        let bad = act(&o, "move(roomb,rooma)");
        assert_eq!(o.run(&o.init, &[bad]).len(), 1);
        let mv = act(&o, "move(rooma,roomb)");
        let pick = act(&o, "pick(ball1,roomb,left)");
        // ball1 starts in rooma in this instance, so the pick fails
        assert_eq!(o.run(&o.init, &[mv, pick]).len(), 2);
        let o2 = Oracle::new(Fixture::Gripper.domain(), Fixture::Gripper.problems().remove(1)).unwrap();
        assert_eq!(o2.run(&o2.init, &[mv, pick]).len(), 3);
    }

    #[test]
    fn static_pruning_counts() {
        let sizes: Vec<_> = Fixture::ALL
            .iter()
            .map(|f| {
                let d = f.domain();
                Oracle::new(d, f.problems().remove(0)).unwrap().action_count()
            })
            .collect();
        // gripper and blocksworld have no static predicates
        assert_eq!(sizes[0], 10);
        assert_eq!(sizes[1], 18);
        // 12 in-line triples for each jump operator plus 9 end-move
        assert_eq!(sizes[2], 33);
    }

    #[test]
    fn exact_observation_is_identity() {
        let o = gripper();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obs = observe(&o.init, &ObservationConfig::default(), &mut rng);
        assert_eq!(obs, Observation::full(&o.init));
    }

    #[test]
    fn partial_observation_rate() {
        let s = GroundState::empty(8);
        let cfg = ObservationConfig::new(0.25, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10_000;
        let total: usize = (0..n).map(|_| observe(&s, &cfg, &mut rng).observed_count()).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 2.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn noise_rate_flips() {
        let s = GroundState::empty(16);
        let cfg = ObservationConfig::new(1.0, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10_000;
        let flips: usize = (0..n)
            .map(|_| observe(&s, &cfg, &mut rng).values().count_ones(..))
            .sum();
        let mean = flips as f64 / n as f64;
        assert!((mean - 3.2).abs() < 0.1, "{mean}");
    }

    #[test]
    fn config_rejects_out_of_range() {
        assert!(ObservationConfig::new(1.5, 0.0).is_err());
        assert!(ObservationConfig::new(0.5, -0.1).is_err());
    }
}
