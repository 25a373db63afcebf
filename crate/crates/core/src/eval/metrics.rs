//! Syntactic and trace-based error rates.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::PositiveSample;
use crate::learner::space::scoped_atoms;
use crate::pddl::{Atom, Domain, GroundState, Grounding, PddlError, PropId};

/// What E_sigma divides an operator's error count by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaDenominator {
    /// Scoped atoms times three: one chance per slot.
    #[default]
    PerSlot,
    /// Scoped atoms counted once.
    AtomUnion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorError {
    pub operator: String,
    pub missing: usize,
    pub extra: usize,
    pub possible: usize,
    /// Percentage.
    pub error: f64,
}

/// `(missing, extra)` of `learned` relative to `truth`.
fn diff<'a>(learned: impl Iterator<Item = &'a Atom>, truth: impl Iterator<Item = &'a Atom>) -> (usize, usize) {
    let l: BTreeSet<_> = learned.collect();
    let t: BTreeSet<_> = truth.collect();
    (t.difference(&l).count(), l.difference(&t).count())
}

/// Mean over operators of missing plus extra atoms in the positive
/// preconditions, add and delete lists, relative to the atoms in scope.
/// Negative preconditions are ignored.
pub fn syntactical_error(
    learned: &Domain,
    truth: &Domain,
    denom: SigmaDenominator,
) -> Result<(f64, Vec<OperatorError>), PddlError> {
    let mut per_op = Vec::with_capacity(truth.schemas.len());
    for t in &truth.schemas {
        let l = learned
            .schemas
            .iter()
            .find(|s| s.name == t.name)
            .ok_or_else(|| PddlError::Unsupported(format!("learned domain lacks operator `{}`", t.name)))?;
        let scope = scoped_atoms(truth, t)?.len();
        let (m1, e1) = diff(l.positive_preconditions(), t.positive_preconditions());
        let (m2, e2) = diff(l.add_effects.iter(), t.add_effects.iter());
        let (m3, e3) = diff(l.del_effects.iter(), t.del_effects.iter());
        let possible = match denom {
            SigmaDenominator::PerSlot => 3 * scope,
            SigmaDenominator::AtomUnion => scope,
        };
        let (missing, extra) = (m1 + m2 + m3, e1 + e2 + e3);
        let error = if possible == 0 {
            0.0
        } else {
            100.0 * (missing + extra) as f64 / possible as f64
        };
        per_op.push(OperatorError {
            operator: t.name.clone(),
            missing,
            extra,
            possible,
            error,
        });
    }
    let mean = if per_op.is_empty() {
        0.0
    } else {
        per_op.iter().map(|e| e.error).sum::<f64>() / per_op.len() as f64
    };
    Ok((mean, per_op))
}

fn ratio(errors: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * errors as f64 / total as f64
    }
}

fn replay<'a>(
    truth: &'a Grounding,
    s0: &GroundState,
    test: &'a [PositiveSample],
) -> impl Iterator<Item = (crate::pddl::ActionId, GroundState, GroundState)> + 'a {
    let s0 = s0.clone();
    test.iter().flat_map(move |p| {
        let states = crate::oracle::run(truth, &s0, &p.actions);
        debug_assert_eq!(states.len(), p.actions.len() + 1);
        p.actions
            .iter()
            .enumerate()
            .map(|(t, &a)| (a, states[t].clone(), states[t + 1].clone()))
            .collect::<Vec<_>>()
    })
}

/// Share of learned precondition literals violated along the test walks.
/// `learned` must be grounded over the same actions as `truth`.
pub fn precondition_error(learned: &Grounding, truth: &Grounding, s0: &GroundState, test: &[PositiveSample]) -> f64 {
    let (mut errors, mut total) = (0, 0);
    for (a, s, _) in replay(truth, s0, test) {
        let ga = learned.action(a);
        total += ga.pre_pos.len() + ga.pre_neg.len();
        errors += ga.pre_pos.iter().filter(|&&p| !s.contains(p)).count();
        errors += ga.pre_neg.iter().filter(|&&p| s.contains(p)).count();
    }
    ratio(errors, total)
}

/// Share of learned effects contradicted by the state after the action.
pub fn effect_error(learned: &Grounding, truth: &Grounding, s0: &GroundState, test: &[PositiveSample]) -> f64 {
    let (mut errors, mut total) = (0, 0);
    for (a, _, next) in replay(truth, s0, test) {
        let ga = learned.action(a);
        total += ga.add.len() + ga.del.len();
        errors += ga.add.iter().filter(|&&p: &&PropId| !next.contains(p)).count();
        errors += ga.del.iter().filter(|&&p| next.contains(p)).count();
    }
    ratio(errors, total)
}
