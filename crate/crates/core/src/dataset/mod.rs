//! Training data: feasible walks with their observations, the infeasible
//! probes met along the way, and pairwise-constraint extensions.

mod pairwise;
mod text;

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::oracle::{observe, ConfigError, Observation, ObservationConfig, Oracle};
use crate::pddl::{ActionId, GroundState};

pub use pairwise::{compute_pairwise_constraints, extend_samples, PairwiseConstraints};
pub use text::{read_dataset, write_dataset, TextError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveSample {
    pub actions: Vec<ActionId>,
    /// One per visited state, so `actions.len() + 1` entries.
    pub observations: Vec<Observation>,
}

impl PositiveSample {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// A feasible prefix followed by one action that fails after it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NegativeSample {
    pub actions: Vec<ActionId>,
    /// Index of a positive sample whose first `actions.len() - 1` actions
    /// equal the prefix.
    pub origin: usize,
}

impl NegativeSample {
    pub fn prefix(&self) -> &[ActionId] {
        &self.actions[..self.actions.len() - 1]
    }

    pub fn last(&self) -> ActionId {
        *self.actions.last().unwrap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub positives: Vec<PositiveSample>,
    pub negatives: Vec<NegativeSample>,
    pub initial_state: GroundState,
    pub obs_config: ObservationConfig,
    /// Walks that hit a state with no applicable action before their target length.
    pub dead_ends: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("at least one positive sample is required")]
    NoSamples,
    #[error("length range {0}..={1} is empty")]
    EmptyRange(usize, usize),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Shape statistics of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub actions: usize,
    pub propositions: usize,
    pub positives: usize,
    pub mean_positive_len: f64,
    pub negatives: usize,
    pub mean_negative_len: f64,
    pub states: usize,
}

impl Dataset {
    pub fn stats(&self, actions: usize) -> DatasetStats {
        let mean = |total: usize, n: usize| if n == 0 { 0.0 } else { total as f64 / n as f64 };
        let pos_total: usize = self.positives.iter().map(|p| p.len()).sum();
        let neg_total: usize = self.negatives.iter().map(|n| n.actions.len()).sum();
        DatasetStats {
            actions,
            propositions: self.initial_state.universe(),
            positives: self.positives.len(),
            mean_positive_len: mean(pos_total, self.positives.len()),
            negatives: self.negatives.len(),
            mean_negative_len: mean(neg_total, self.negatives.len()),
            states: self.positives.iter().map(|p| p.observations.len()).sum(),
        }
    }
}

struct Walk {
    positive: PositiveSample,
    negatives: Vec<Vec<ActionId>>,
    dead_end: bool,
}

fn walk(oracle: &Oracle, s0: &GroundState, len: usize, cfg: &ObservationConfig, rng: &mut ChaCha8Rng) -> Walk {
    let n = oracle.action_count();
    let mut pool: Vec<ActionId> = (0..n as u32).map(ActionId).collect();
    let mut state = s0.clone();
    let mut actions = Vec::with_capacity(len);
    let mut observations = vec![observe(&state, cfg, rng)];
    let mut negatives = Vec::new();
    let mut dead_end = false;
    while actions.len() < len {
        // Partial Fisher-Yates: draw without replacement until one succeeds.
        let mut found = None;
        for i in 0..n {
            let j = rng.random_range(i..n);
            pool.swap(i, j);
            let a = pool[i];
            match oracle.apply(&state, a).next_state {
                Some(next) => {
                    found = Some((a, next));
                    break;
                }
                None => {
                    let mut neg = actions.clone();
                    neg.push(a);
                    negatives.push(neg);
                }
            }
        }
        match found {
            Some((a, next)) => {
                actions.push(a);
                state = next;
                observations.push(observe(&state, cfg, rng));
            }
            None => {
                dead_end = true;
                break;
            }
        }
    }
    Walk {
        positive: PositiveSample { actions, observations },
        negatives,
        dead_end,
    }
}

/// Random-walk dataset from `s0`. Each walk gets its own generator seeded
/// from `rng`, so the result does not depend on `exec`.
pub fn generate(
    oracle: &Oracle,
    s0: &GroundState,
    n_pos: usize,
    len_range: (usize, usize),
    cfg: &ObservationConfig,
    rng: &mut ChaCha8Rng,
    exec: Exec,
) -> Result<Dataset, DatasetError> {
    if n_pos == 0 {
        return Err(DatasetError::NoSamples);
    }
    if len_range.0 > len_range.1 {
        return Err(DatasetError::EmptyRange(len_range.0, len_range.1));
    }
    cfg.validate()?;
    let jobs: Vec<(u64, usize)> = (0..n_pos)
        .map(|_| (rng.random(), rng.random_range(len_range.0..=len_range.1)))
        .collect();
    let walks = exec.map(&jobs, |&(seed, len)| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        walk(oracle, s0, len, cfg, &mut r)
    });

    let mut seen = HashSet::new();
    let mut positives = Vec::with_capacity(n_pos);
    let mut negatives = Vec::new();
    let mut dead_ends = 0;
    for (i, w) in walks.into_iter().enumerate() {
        dead_ends += w.dead_end as usize;
        for neg in w.negatives {
            if seen.insert(neg.clone()) {
                negatives.push(NegativeSample {
                    actions: neg,
                    origin: i,
                });
            }
        }
        positives.push(w.positive);
    }
    Ok(Dataset {
        positives,
        negatives,
        initial_state: s0.clone(),
        obs_config: *cfg,
        dead_ends,
    })
}

/// Fresh noiseless walks for evaluation, keeping only the positives.
pub fn generate_test_walks(
    oracle: &Oracle,
    s0: &GroundState,
    n: usize,
    len_range: (usize, usize),
    rng: &mut ChaCha8Rng,
) -> Vec<PositiveSample> {
    let cfg = ObservationConfig::default();
    (0..n)
        .map(|_| {
            let len = rng.random_range(len_range.0..=len_range.1);
            walk(oracle, s0, len, &cfg, rng).positive
        })
        .collect()
}
