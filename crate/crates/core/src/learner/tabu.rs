//! Tabu search over single-literal edits.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::fitness::{FitnessData, FitnessScore};
use super::space::{Candidate, SchemaSpace, Slot};
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabuConfig {
    pub iterations: usize,
    pub tenure: usize,
}

impl Default for TabuConfig {
    fn default() -> Self {
        TabuConfig {
            iterations: 200,
            tenure: 10,
        }
    }
}

/// Toggle of one atom in one slot of one operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub op: usize,
    pub slot: Slot,
    pub atom: usize,
}

impl Move {
    pub fn apply(&self, c: &mut Candidate) {
        c[self.op].toggle(self.slot, self.atom);
    }
}

#[derive(Debug, Clone)]
pub struct TabuResult {
    pub best: Candidate,
    pub score: FitnessScore,
    pub iterations: usize,
    /// Moves taken by the walk, in order.
    pub moves: Vec<Move>,
}

/// Every legal toggle from `c`, in canonical order.
pub fn neighbourhood(space: &SchemaSpace, c: &Candidate) -> Vec<Move> {
    let mut out = Vec::new();
    for (op, m) in c.iter().enumerate() {
        for slot in Slot::ALL {
            for atom in 0..space.atoms[op].len() {
                if m.can_toggle(slot, atom) {
                    out.push(Move { op, slot, atom });
                }
            }
        }
    }
    out
}

/// Moves to the best non-tabu neighbour at each step and returns the best
/// candidate seen. A move stays tabu for `tenure` steps after it was taken,
/// unless it would beat the best score so far. Ties go to the earliest move
/// in canonical order, so the search is deterministic.
pub fn tabu_search(
    start: &Candidate,
    space: &SchemaSpace,
    data: &FitnessData,
    cfg: &TabuConfig,
    exec: Exec,
) -> TabuResult {
    let mut current = start.clone();
    let mut best = start.clone();
    let mut best_score = data.score(space, start);
    let mut tabu: HashMap<Move, usize> = HashMap::new();
    let mut moves = Vec::new();
    let mut iterations = 0;
    for it in 0..cfg.iterations {
        let hood = neighbourhood(space, &current);
        let scores = exec.map(&hood, |mv| {
            let mut c = current.clone();
            mv.apply(&mut c);
            data.score(space, &c)
        });
        let mut chosen: Option<(usize, i64)> = None;
        for (i, (mv, s)) in hood.iter().zip(&scores).enumerate() {
            let total = s.total();
            let is_tabu = tabu.get(mv).is_some_and(|&until| it < until);
            if is_tabu && total <= best_score.total() {
                continue;
            }
            if chosen.is_none_or(|(_, t)| total > t) {
                chosen = Some((i, total));
            }
        }
        let Some((i, _)) = chosen else { break };
        iterations = it + 1;
        let mv = hood[i];
        mv.apply(&mut current);
        tabu.insert(mv, it + 1 + cfg.tenure);
        moves.push(mv);
        if scores[i].total() > best_score.total() {
            best_score = scores[i];
            best = current.clone();
        }
    }
    TabuResult {
        best,
        score: best_score,
        iterations,
        moves,
    }
}
