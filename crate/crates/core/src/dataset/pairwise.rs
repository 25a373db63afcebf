use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use super::{Dataset, NegativeSample, PositiveSample};
use crate::pddl::ActionId;

/// Ordered action pairs never seen adjacent in any positive sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseConstraints {
    n: usize,
    adjacent: FixedBitSet,
}

impl PairwiseConstraints {
    pub fn is_forbidden(&self, a: ActionId, b: ActionId) -> bool {
        !self.adjacent.contains(a.index() * self.n + b.index())
    }

    pub fn forbidden(&self) -> impl Iterator<Item = (ActionId, ActionId)> + '_ {
        self.adjacent
            .zeroes()
            .map(move |i| (ActionId((i / self.n) as u32), ActionId((i % self.n) as u32)))
    }

    pub fn len(&self) -> usize {
        self.n * self.n - self.adjacent.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn compute_pairwise_constraints(positives: &[PositiveSample], n_actions: usize) -> PairwiseConstraints {
    let mut adjacent = FixedBitSet::with_capacity(n_actions * n_actions);
    for p in positives {
        for w in p.actions.windows(2) {
            adjacent.insert(w[0].index() * n_actions + w[1].index());
        }
    }
    PairwiseConstraints { n: n_actions, adjacent }
}

/// The negatives of `ds` plus every positive prefix ending in `a` followed
/// by an action forbidden after `a`. Positives are used unchanged.
pub fn extend_samples(ds: &Dataset, pc: &PairwiseConstraints) -> Vec<NegativeSample> {
    let mut seen: HashSet<Vec<ActionId>> = ds.negatives.iter().map(|n| n.actions.clone()).collect();
    let mut out = ds.negatives.clone();
    let followers: Vec<Vec<ActionId>> = (0..pc.n as u32)
        .map(|a| {
            (0..pc.n as u32)
                .map(ActionId)
                .filter(|&b| pc.is_forbidden(ActionId(a), b))
                .collect()
        })
        .collect();
    for (i, p) in ds.positives.iter().enumerate() {
        for k in 1..=p.actions.len() {
            let last = p.actions[k - 1];
            for &b in &followers[last.index()] {
                let mut seq = p.actions[..k].to_vec();
                seq.push(b);
                if !seen.contains(&seq) {
                    seen.insert(seq.clone());
                    out.push(NegativeSample {
                        actions: seq,
                        origin: i,
                    });
                }
            }
        }
    }
    out
}
