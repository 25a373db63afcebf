//! Automata over ground-action symbols.

mod rpni;

use std::collections::VecDeque;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::pddl::{ActionId, Grounding};

pub use rpni::{rpni, GrammarError};

const NONE: u32 = u32::MAX;

/// A deterministic automaton with a dense transition table. Node 0 is the
/// initial node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    n_symbols: usize,
    delta: Vec<u32>,
    finals: Vec<bool>,
}

impl Dfa {
    pub(crate) fn from_parts(n_symbols: usize, delta: Vec<u32>, finals: Vec<bool>) -> Dfa {
        debug_assert_eq!(delta.len(), finals.len() * n_symbols);
        Dfa {
            n_symbols,
            delta,
            finals,
        }
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn node_count(&self) -> usize {
        self.finals.len()
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().filter(|&&t| t != NONE).count()
    }

    pub fn is_final(&self, n: usize) -> bool {
        self.finals[n]
    }

    #[inline]
    pub fn step(&self, n: usize, a: ActionId) -> Option<usize> {
        match self.delta[n * self.n_symbols + a.index()] {
            NONE => None,
            t => Some(t as usize),
        }
    }

    /// Nodes visited along `pi`, or `None` if a transition is missing.
    pub fn path(&self, pi: &[ActionId]) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(pi.len() + 1);
        out.push(0);
        let mut n = 0;
        for &a in pi {
            n = self.step(n, a)?;
            out.push(n);
        }
        Some(out)
    }

    pub fn accepts(&self, pi: &[ActionId]) -> bool {
        let mut n = 0;
        for &a in pi {
            match self.step(n, a) {
                Some(m) => n = m,
                None => return false,
            }
        }
        self.finals[n]
    }

    /// All transitions `(from, symbol, to)` ordered by source then symbol.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, ActionId, usize)> + '_ {
        self.delta
            .iter()
            .enumerate()
            .filter(|(_, &t)| t != NONE)
            .map(move |(i, &t)| (i / self.n_symbols, ActionId((i % self.n_symbols) as u32), t as usize))
    }

    /// One `from action to` line per transition followed by a `final` line.
    pub fn to_text(&self, g: &Grounding) -> String {
        let mut out = String::new();
        for (n, a, m) in self.transitions() {
            let _ = writeln!(out, "{n} {} {m}", g.action_label(a));
        }
        out.push_str("final");
        for n in (0..self.node_count()).filter(|&n| self.finals[n]) {
            let _ = write!(out, " {n}");
        }
        out.push('\n');
        out
    }

    /// Drops nodes that are unreachable or cannot reach a final node and
    /// renumbers the rest breadth-first, visiting symbols in order.
    pub(crate) fn trimmed(&self) -> Dfa {
        let n = self.node_count();
        let k = self.n_symbols;
        let mut live = self.finals.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for u in 0..n {
                if !live[u]
                    && self.delta[u * k..(u + 1) * k]
                        .iter()
                        .any(|&t| t != NONE && live[t as usize])
                {
                    live[u] = true;
                    changed = true;
                }
            }
        }
        let mut order = vec![NONE; n];
        let mut queue = VecDeque::new();
        let mut visited = Vec::new();
        order[0] = 0;
        queue.push_back(0usize);
        while let Some(u) = queue.pop_front() {
            visited.push(u);
            for a in 0..k {
                let t = self.delta[u * k + a];
                if t != NONE && live[t as usize] && order[t as usize] == NONE {
                    order[t as usize] = (visited.len() + queue.len()) as u32;
                    queue.push_back(t as usize);
                }
            }
        }
        let mut delta = vec![NONE; visited.len() * k];
        let mut finals = vec![false; visited.len()];
        for (new, &u) in visited.iter().enumerate() {
            finals[new] = self.finals[u];
            for a in 0..k {
                let t = self.delta[u * k + a];
                if t != NONE && order[t as usize] != NONE {
                    delta[new * k + a] = order[t as usize];
                }
            }
        }
        Dfa::from_parts(k, delta, finals)
    }
}

/// Tree automaton accepting exactly `samples`.
pub fn build_pta(n_symbols: usize, samples: &[&[ActionId]]) -> Dfa {
    let k = n_symbols;
    let mut delta = vec![NONE; k];
    let mut finals = vec![false];
    for s in samples {
        let mut n = 0;
        for &a in *s {
            let i = n * k + a.index();
            if delta[i] == NONE {
                delta[i] = finals.len() as u32;
                finals.push(false);
                delta.extend(std::iter::repeat_n(NONE, k));
            }
            n = delta[i] as usize;
        }
        finals[n] = true;
    }
    // trimming renumbers in shortlex order; every node of a PTA is live
    Dfa::from_parts(k, delta, finals).trimmed()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomatonStats {
    pub nodes: usize,
    pub transitions: usize,
    pub states: usize,
    /// Observed states per node.
    pub compression: f64,
}

pub fn compression_stats(dfa: &Dfa, ds: &Dataset) -> AutomatonStats {
    let states: usize = ds.positives.iter().map(|p| p.observations.len()).sum();
    AutomatonStats {
        nodes: dfa.node_count(),
        transitions: dfa.transition_count(),
        states,
        compression: states as f64 / dfa.node_count() as f64,
    }
}
