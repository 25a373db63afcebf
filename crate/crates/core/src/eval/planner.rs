//! Greedy best-first forward search with the additive heuristic.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::oracle::{applicable, run, successor};
use crate::pddl::{ActionId, GroundState, Grounding, Problem, PropId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannerLimits {
    pub timeout: Duration,
    pub max_expansions: usize,
}

impl Default for PlannerLimits {
    fn default() -> Self {
        PlannerLimits {
            timeout: Duration::from_secs(60),
            max_expansions: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanOutcome {
    Found(Vec<ActionId>),
    /// The reachable state space was exhausted.
    Unsolvable,
    /// A time or expansion limit was hit.
    Timeout,
}

impl PlanOutcome {
    pub fn plan(&self) -> Option<&[ActionId]> {
        match self {
            PlanOutcome::Found(p) => Some(p),
            _ => None,
        }
    }
}

/// A ground goal: propositions that must hold and propositions that must not.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Goal {
    pub pos: Vec<PropId>,
    pub neg: Vec<PropId>,
}

impl Goal {
    /// The goal of `p` over `g`'s propositions. `None` if it mentions a
    /// proposition `g` does not have.
    pub fn of_problem(g: &Grounding, p: &Problem) -> Option<Goal> {
        let mut goal = Goal {
            pos: Vec::new(),
            neg: Vec::new(),
        };
        for l in &p.goal {
            let id = g.prop_id(&l.atom)?;
            if l.positive {
                goal.pos.push(id);
            } else {
                goal.neg.push(id);
            }
        }
        Some(goal)
    }

    pub fn satisfied(&self, s: &GroundState) -> bool {
        self.pos.iter().all(|&p| s.contains(p)) && !self.neg.iter().any(|&p| s.contains(p))
    }
}

const INF: u64 = u64::MAX;

/// Sum of relaxed costs of the positive goals, ignoring deletes and negative
/// preconditions. `None` if some goal is unreachable even then.
fn h_add(g: &Grounding, s: &GroundState, goal: &Goal) -> Option<u64> {
    let mut cost = vec![INF; g.prop_count()];
    for p in s.iter() {
        cost[p.index()] = 0;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for a in &g.actions {
            let mut c: u64 = 1;
            for &p in &a.pre_pos {
                let pc = cost[p.index()];
                if pc == INF {
                    c = INF;
                    break;
                }
                c += pc;
            }
            if c == INF {
                continue;
            }
            for &p in &a.add {
                if c < cost[p.index()] {
                    cost[p.index()] = c;
                    changed = true;
                }
            }
        }
    }
    goal.pos.iter().try_fold(0u64, |acc, p| {
        let c = cost[p.index()];
        (c != INF).then(|| acc.saturating_add(c))
    })
}

/// Searches for a plan in the domain `g` is grounded from. Nodes with equal
/// heuristic value are expanded in insertion order, and successors are
/// generated in action order.
pub fn plan(g: &Grounding, init: &GroundState, goal: &Goal, limits: &PlannerLimits) -> PlanOutcome {
    let start = Instant::now();
    // state -> (parent index, action)
    let mut nodes: Vec<(GroundState, usize, Option<ActionId>)> = Vec::new();
    let mut seen = HashSet::new();
    let mut open = BinaryHeap::new();
    let Some(h0) = h_add(g, init, goal) else {
        return PlanOutcome::Unsolvable;
    };
    nodes.push((init.clone(), usize::MAX, None));
    seen.insert(init.clone());
    open.push(Reverse((h0, 0usize)));
    let mut expansions = 0;
    while let Some(Reverse((_, idx))) = open.pop() {
        if goal.satisfied(&nodes[idx].0) {
            let mut plan = Vec::new();
            let mut i = idx;
            while let Some(a) = nodes[i].2 {
                plan.push(a);
                i = nodes[i].1;
            }
            plan.reverse();
            return PlanOutcome::Found(plan);
        }
        expansions += 1;
        if expansions > limits.max_expansions || (expansions % 256 == 0 && start.elapsed() > limits.timeout) {
            return PlanOutcome::Timeout;
        }
        for (ai, a) in g.actions.iter().enumerate() {
            if !applicable(&nodes[idx].0, a) {
                continue;
            }
            let next = successor(&nodes[idx].0, a);
            if seen.contains(&next) {
                continue;
            }
            seen.insert(next.clone());
            if let Some(h) = h_add(g, &next, goal) {
                open.push(Reverse((h, nodes.len())));
                nodes.push((next, idx, Some(ActionId(ai as u32))));
            }
        }
    }
    PlanOutcome::Unsolvable
}

/// IPC plan text: one parenthesised action per line.
pub fn format_plan(g: &Grounding, plan: &[ActionId]) -> String {
    plan.iter().map(|&a| g.action_sexp(a) + "\n").collect()
}

/// Whether `plan` executes from `init` under `truth` and reaches the goal.
pub fn validate(truth: &Grounding, init: &GroundState, goal: &Goal, plan: &[ActionId]) -> bool {
    let states = run(truth, init, plan);
    states.len() == plan.len() + 1 && goal.satisfied(states.last().unwrap())
}
