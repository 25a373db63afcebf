//! Line-oriented dataset format.
//!
//! ```text
//! pos move(rooma,roomb) pick(ball1,roomb,left)
//! obs +at-robby(rooma) -at-robby(roomb) ?free(left) ...
//! obs ...
//! neg move(rooma,roomb) drop(ball1,rooma,left)
//! ```
//!
//! Each `pos` line is followed by one `obs` line per visited state.

use std::collections::HashMap;

use thiserror::Error;

use super::{Dataset, NegativeSample, PositiveSample};
use crate::oracle::{Observation, ObservationConfig};
use crate::pddl::{ActionId, GroundState, Grounding, PropId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn err(line: usize, message: impl Into<String>) -> TextError {
    TextError::Parse {
        line,
        message: message.into(),
    }
}

pub fn write_dataset(g: &Grounding, ds: &Dataset) -> String {
    let mut out = String::new();
    let actions = |seq: &[ActionId]| -> String { seq.iter().map(|&a| format!(" {}", g.action_label(a))).collect() };
    for p in &ds.positives {
        out.push_str("pos");
        out.push_str(&actions(&p.actions));
        out.push('\n');
        for o in &p.observations {
            out.push_str("obs");
            for i in 0..g.prop_count() {
                let p = PropId(i as u32);
                let sign = match o.get(p) {
                    Some(true) => '+',
                    Some(false) => '-',
                    None => '?',
                };
                out.push(' ');
                out.push(sign);
                out.push_str(&g.prop_label(p));
            }
            out.push('\n');
        }
    }
    for n in &ds.negatives {
        out.push_str("neg");
        out.push_str(&actions(&n.actions));
        out.push('\n');
    }
    out
}

/// Reads the text format back. The initial state is the first observation
/// of the first positive sample with unknown values read as false.
pub fn read_dataset(g: &Grounding, text: &str, cfg: ObservationConfig) -> Result<Dataset, TextError> {
    let (props, acts) = g.label_index();
    let parse_actions = |line: usize, words: &[&str]| -> Result<Vec<ActionId>, TextError> {
        words
            .iter()
            .map(|w| {
                acts.get(*w)
                    .copied()
                    .ok_or_else(|| err(line, format!("unknown action `{w}`")))
            })
            .collect()
    };
    let mut positives: Vec<PositiveSample> = Vec::new();
    let mut negatives = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let words: Vec<&str> = raw.split_whitespace().collect();
        let Some((&head, rest)) = words.split_first() else {
            continue;
        };
        match head {
            "pos" => positives.push(PositiveSample {
                actions: parse_actions(line, rest)?,
                observations: Vec::new(),
            }),
            "obs" => {
                let p = positives
                    .last_mut()
                    .ok_or_else(|| err(line, "observation before any positive sample"))?;
                let mut o = Observation::unknown(g.prop_count());
                for w in rest {
                    let (value, label) = match w.split_at(1) {
                        ("+", l) => (Some(true), l),
                        ("-", l) => (Some(false), l),
                        ("?", l) => (None, l),
                        _ => return Err(err(line, format!("bad literal `{w}`"))),
                    };
                    let id = props
                        .get(label)
                        .ok_or_else(|| err(line, format!("unknown proposition `{label}`")))?;
                    o.set(*id, value);
                }
                p.observations.push(o);
            }
            "neg" => {
                let actions = parse_actions(line, rest)?;
                if actions.is_empty() {
                    return Err(err(line, "empty negative sample"));
                }
                negatives.push((line, actions));
            }
            other => return Err(err(line, format!("unknown record `{other}`"))),
        }
    }
    for p in &positives {
        if p.observations.len() != p.actions.len() + 1 {
            return Err(err(0, "observation count must be one more than action count"));
        }
    }
    let mut prefix_owner: HashMap<&[ActionId], usize> = HashMap::new();
    for (i, p) in positives.iter().enumerate() {
        for k in 0..=p.actions.len() {
            prefix_owner.entry(&p.actions[..k]).or_insert(i);
        }
    }
    let negatives = negatives
        .into_iter()
        .map(|(line, actions)| {
            let origin = *prefix_owner
                .get(&actions[..actions.len() - 1])
                .ok_or_else(|| err(line, "negative prefix is not a positive prefix"))?;
            Ok(NegativeSample { actions, origin })
        })
        .collect::<Result<Vec<_>, TextError>>()?;
    let mut initial_state = GroundState::empty(g.prop_count());
    if let Some(o) = positives.first().and_then(|p| p.observations.first()) {
        for i in o.values().ones() {
            initial_state.insert(PropId(i as u32));
        }
    }
    Ok(Dataset {
        positives,
        negatives,
        initial_state,
        obs_config: cfg,
        dead_ends: 0,
    })
}
