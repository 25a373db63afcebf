//! Red-blue state merging over an augmented prefix tree.

use std::collections::VecDeque;

use thiserror::Error;

use super::{Dfa, NONE};
use crate::pddl::ActionId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("sequence of length {0} is both positive and negative")]
    Inconsistent(usize),
    #[error("negative sample is empty")]
    EmptyNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Unknown,
    Accept,
    Reject,
}

struct Apta {
    k: usize,
    delta: Vec<u32>,
    label: Vec<Label>,
    undo: Vec<Undo>,
}

enum Undo {
    Delta(usize, u32),
    Label(usize, Label),
}

impl Apta {
    fn new(k: usize) -> Self {
        Apta {
            k,
            delta: vec![NONE; k],
            label: vec![Label::Unknown],
            undo: Vec::new(),
        }
    }

    fn insert(&mut self, seq: &[ActionId], every_prefix: Label, end: Label) -> Result<(), GrammarError> {
        let mut n = 0;
        let mark = |apta: &mut Apta, n: usize, l: Label| -> Result<(), GrammarError> {
            match (apta.label[n], l) {
                (_, Label::Unknown) => {}
                (Label::Unknown, l) => apta.label[n] = l,
                (a, b) if a == b => {}
                _ => return Err(GrammarError::Inconsistent(seq.len())),
            }
            Ok(())
        };
        mark(self, 0, every_prefix)?;
        for &a in seq {
            let i = n * self.k + a.index();
            if self.delta[i] == NONE {
                self.delta[i] = self.label.len() as u32;
                self.label.push(Label::Unknown);
                self.delta.extend(std::iter::repeat_n(NONE, self.k));
            }
            n = self.delta[i] as usize;
            mark(self, n, every_prefix)?;
        }
        mark(self, n, end)
    }

    /// Renumbers nodes breadth-first so node ids follow shortlex order of
    /// their access strings.
    fn canonical(self) -> Apta {
        let k = self.k;
        let n = self.label.len();
        let mut order = vec![NONE; n];
        let mut seq = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0usize]);
        order[0] = 0;
        while let Some(u) = queue.pop_front() {
            seq.push(u);
            for a in 0..k {
                let t = self.delta[u * k + a];
                if t != NONE {
                    order[t as usize] = (seq.len() + queue.len()) as u32;
                    queue.push_back(t as usize);
                }
            }
        }
        let mut delta = vec![NONE; n * k];
        let mut label = vec![Label::Unknown; n];
        for (new, &u) in seq.iter().enumerate() {
            label[new] = self.label[u];
            for a in 0..k {
                let t = self.delta[u * k + a];
                if t != NONE {
                    delta[new * k + a] = order[t as usize];
                }
            }
        }
        Apta {
            k,
            delta,
            label,
            undo: Vec::new(),
        }
    }

    fn set_delta(&mut self, i: usize, v: u32) {
        self.undo.push(Undo::Delta(i, self.delta[i]));
        self.delta[i] = v;
    }

    fn rollback(&mut self) {
        while let Some(u) = self.undo.pop() {
            match u {
                Undo::Delta(i, v) => self.delta[i] = v,
                Undo::Label(i, l) => self.label[i] = l,
            }
        }
    }

    /// Folds the tree rooted at `blue` into `red`. Returns false on a label
    /// conflict, leaving the undo log for the caller to roll back.
    fn fold(&mut self, red: usize, blue: usize) -> bool {
        let mut stack = vec![(red, blue)];
        while let Some((r, b)) = stack.pop() {
            match (self.label[r], self.label[b]) {
                (Label::Accept, Label::Reject) | (Label::Reject, Label::Accept) => return false,
                (Label::Unknown, l) if l != Label::Unknown => {
                    self.undo.push(Undo::Label(r, Label::Unknown));
                    self.label[r] = l;
                }
                _ => {}
            }
            for a in 0..self.k {
                let tb = self.delta[b * self.k + a];
                if tb == NONE {
                    continue;
                }
                let i = r * self.k + a;
                match self.delta[i] {
                    NONE => self.set_delta(i, tb),
                    tr => stack.push((tr as usize, tb as usize)),
                }
            }
        }
        true
    }
}

/// Infers an automaton accepting every positive sample and all of their
/// prefixes while rejecting every negative sample.
pub fn rpni(n_symbols: usize, positives: &[&[ActionId]], negatives: &[&[ActionId]]) -> Result<Dfa, GrammarError> {
    let mut apta = Apta::new(n_symbols);
    for p in positives {
        apta.insert(p, Label::Accept, Label::Accept)?;
    }
    for n in negatives {
        if n.is_empty() {
            return Err(GrammarError::EmptyNegative);
        }
        apta.insert(n, Label::Unknown, Label::Reject)?;
    }
    let mut apta = apta.canonical();
    let k = n_symbols;
    let mut red = vec![0usize];
    let mut is_red = vec![false; apta.label.len()];
    is_red[0] = true;

    loop {
        // lowest-numbered child of a red node that is not red itself
        let mut blue: Option<(usize, usize)> = None;
        for &r in &red {
            for a in 0..k {
                let t = apta.delta[r * k + a];
                if t != NONE && !is_red[t as usize] && blue.is_none_or(|(b, _)| (t as usize) < b) {
                    blue = Some((t as usize, r * k + a));
                }
            }
        }
        let Some((b, edge)) = blue else { break };
        let mut merged = false;
        for &r in &red {
            apta.undo.clear();
            apta.set_delta(edge, r as u32);
            if apta.fold(r, b) {
                merged = true;
                break;
            }
            apta.rollback();
        }
        apta.undo.clear();
        if !merged {
            red.push(b);
            red.sort_unstable();
            is_red[b] = true;
        }
    }

    // Only red nodes remain reachable; compact them.
    let mut finals = vec![false; apta.label.len()];
    for &r in &red {
        finals[r] = apta.label[r] == Label::Accept;
    }
    Ok(Dfa::from_parts(k, apta.delta, finals).trimmed())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<ActionId> {
        v.iter().map(|&a| ActionId(a)).collect()
    }

    #[test]
    fn forbidden_repeat_keeps_two_nodes() {
        let p = ids(&[0]);
        let n = ids(&[0, 0]);
        let d = rpni(1, &[&p], &[&n]).unwrap();
        assert_eq!(d.node_count(), 2);
        assert_eq!(d.step(0, ActionId(0)), Some(1));
        assert_eq!(d.step(1, ActionId(0)), None);
        assert!(d.accepts(&p) && !d.accepts(&n));
    }

    #[test]
    fn no_negatives_collapses_to_one_node() {
        let p = ids(&[0]);
        let d = rpni(1, &[&p], &[]).unwrap();
        assert_eq!(d.node_count(), 1);
        assert!(d.accepts(&ids(&[0, 0, 0])));
    }

    #[test]
    fn alternating_language() {
        let pos = [ids(&[0, 1, 0, 1]), ids(&[0, 1, 0])];
        let neg = [ids(&[1]), ids(&[0, 0]), ids(&[0, 1, 1])];
        let pr: Vec<&[ActionId]> = pos.iter().map(|v| v.as_slice()).collect();
        let nr: Vec<&[ActionId]> = neg.iter().map(|v| v.as_slice()).collect();
        let d = rpni(2, &pr, &nr).unwrap();
        assert_eq!(d.node_count(), 2);
        assert_eq!(d.transition_count(), 2);
        assert!(d.accepts(&ids(&[0, 1, 0, 1, 0, 1, 0])));
        assert!(!d.accepts(&ids(&[0, 1, 1, 0])));
    }

    #[test]
    fn inconsistent_samples_rejected() {
        let p = ids(&[0, 1]);
        let n = ids(&[0]);
        assert!(matches!(rpni(2, &[&p], &[&n]), Err(GrammarError::Inconsistent(_))));
    }
}
