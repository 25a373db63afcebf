//! Observations attached to automaton transitions.

use std::collections::BTreeMap;

use super::space::{Mask, SchemaSpace};
use super::LearnError;
use crate::dataset::PositiveSample;
use crate::grammar::Dfa;
use crate::pddl::ActionId;

/// Position of an observation: sample index and state index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsRef {
    pub sample: usize,
    pub step: usize,
}

/// The visits of one transition `node --action--> target`. Visit `r` saw
/// observation `r` before the action and `r.step + 1` after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visits {
    pub target: usize,
    pub refs: Vec<ObsRef>,
}

/// Keyed by `(node, action)`.
pub type Mapping = BTreeMap<(usize, ActionId), Visits>;

pub fn build_mappings(dfa: &Dfa, positives: &[PositiveSample]) -> Result<Mapping, LearnError> {
    let mut m = Mapping::new();
    for (i, p) in positives.iter().enumerate() {
        let path = dfa.path(&p.actions).ok_or(LearnError::NotAccepted(i))?;
        for (t, &a) in p.actions.iter().enumerate() {
            m.entry((path[t], a))
                .or_insert_with(|| Visits {
                    target: path[t + 1],
                    refs: Vec::new(),
                })
                .refs
                .push(ObsRef { sample: i, step: t });
        }
    }
    Ok(m)
}

/// Tri-state agreement over a bag of observations, per atom.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Consensus {
    /// Observed, and true every time.
    pub pos: Mask,
    /// Observed, and false every time.
    pub neg: Mask,
    /// Observed with both values.
    pub conflict: Mask,
}

impl Consensus {
    fn from_bag(bag: impl Iterator<Item = (Mask, Mask)>) -> Self {
        let (mut t, mut f) = (0, 0);
        for (ti, fi) in bag {
            t |= ti;
            f |= fi;
        }
        Consensus {
            pos: t & !f,
            neg: f & !t,
            conflict: t & f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedTransition {
    pub target: usize,
    pub ante: Consensus,
    pub post: Consensus,
}

/// Consensus literals per transition, lifted to the action's operator.
pub type Reduced = BTreeMap<(usize, ActionId), ReducedTransition>;

pub fn reduce(m: &Mapping, space: &SchemaSpace, positives: &[PositiveSample]) -> Reduced {
    m.iter()
        .map(|(&(n, a), v)| {
            let side = |offset: usize| {
                Consensus::from_bag(
                    v.refs
                        .iter()
                        .map(|r| space.lift(&positives[r.sample].observations[r.step + offset], a)),
                )
            };
            (
                (n, a),
                ReducedTransition {
                    target: v.target,
                    ante: side(0),
                    post: side(1),
                },
            )
        })
        .collect()
}
