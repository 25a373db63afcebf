//! Operator learning: automaton induction, operator generation, refinement
//! and tabu search.

pub mod fitness;
pub mod generate;
pub mod mapping;
pub mod refine;
pub mod space;
pub mod tabu;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{compute_pairwise_constraints, extend_samples, Dataset};
use crate::exec::Exec;
use crate::grammar::{rpni, Dfa, GrammarError};
use crate::pddl::{Domain, Grounding, PddlError};

pub use fitness::{FitnessData, FitnessScore};
pub use generate::generate_operators;
pub use mapping::{build_mappings, reduce, Mapping, Reduced};
pub use refine::{refine_effects, refine_fixpoint, refine_preconditions};
pub use space::{Candidate, OpModel, SchemaSpace, Slot};
pub use tabu::{tabu_search, TabuConfig, TabuResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("operator `{operator}` has {atoms} candidate atoms, more than 128")]
    TooManyAtoms { operator: String, atoms: usize },
    #[error("positive sample {0} is not accepted by the automaton")]
    NotAccepted(usize),
    #[error("operator `{0}` is missing")]
    MissingOperator(String),
    #[error("atom {atom} is outside the parameters of `{operator}`")]
    OutOfScope { operator: String, atom: String },
    #[error("dataset has no positive samples")]
    EmptyDataset,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Full,
    GenerationOnly,
    SimpleRefinement,
    TabuAlone,
    WithoutPc,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Full,
        Variant::GenerationOnly,
        Variant::SimpleRefinement,
        Variant::TabuAlone,
        Variant::WithoutPc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::GenerationOnly => "generation_only",
            Variant::SimpleRefinement => "simple_refinement",
            Variant::TabuAlone => "tabu_alone",
            Variant::WithoutPc => "without_pc",
        }
    }

    pub fn from_name(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub variant: Variant,
    pub tabu: TabuConfig,
    /// Cap on refinement + tabu rounds.
    pub max_rounds: usize,
    pub exec: Exec,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            variant: Variant::Full,
            tabu: TabuConfig::default(),
            max_rounds: 10,
            exec: Exec::default(),
        }
    }
}

/// One line of the learning trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub stage: String,
    pub fitness: Option<i64>,
    pub edits: Vec<String>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct LearnOutput {
    pub domain: Domain,
    pub candidate: Candidate,
    pub score: FitnessScore,
    pub dfa: Dfa,
    pub trace: Vec<TraceEvent>,
    /// Operators never seen in the positive samples.
    pub unobserved: Vec<String>,
}

impl LearnOutput {
    /// The trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|e| serde_json::to_string(e).expect("trace serializes") + "\n")
            .collect()
    }

    /// Pass counts of every refinement stage.
    pub fn refine_passes(&self) -> Vec<usize> {
        self.trace
            .iter()
            .filter(|e| e.stage == "refine")
            .map(|e| e.iterations)
            .collect()
    }
}

fn describe(space: &SchemaSpace, before: &Candidate, after: &Candidate) -> Vec<String> {
    let mut out = Vec::new();
    for (o, (b, a)) in before.iter().zip(after).enumerate() {
        for slot in Slot::ALL {
            let diff = b.get(slot) ^ a.get(slot);
            for k in space::bits(diff) {
                let sign = if a.get(slot) >> k & 1 == 1 { '+' } else { '-' };
                out.push(format!(
                    "{}: {sign}{slot} {}",
                    space.signature.schemas[o].name,
                    space.atom_name(o, k)
                ));
            }
        }
    }
    out
}

/// Learns a domain for the operator signatures of `signature` from `ds`.
/// `grounding` supplies the ground action alphabet the samples refer to;
/// only action names and bindings are read from it.
pub fn learn(
    signature: &Domain,
    grounding: &Grounding,
    ds: &Dataset,
    cfg: &LearnConfig,
) -> Result<LearnOutput, LearnError> {
    if ds.positives.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let signature = signature.signature();
    let space = SchemaSpace::new(&signature, grounding)?;
    let n = grounding.action_count();
    let mut trace = Vec::new();

    let negatives = if cfg.variant == Variant::WithoutPc {
        ds.negatives.clone()
    } else {
        let pc = compute_pairwise_constraints(&ds.positives, n);
        let ext = extend_samples(ds, &pc);
        trace.push(TraceEvent {
            stage: "pairwise".into(),
            fitness: None,
            edits: vec![format!(
                "{} forbidden pairs, {} extra negatives",
                pc.len(),
                ext.len() - ds.negatives.len()
            )],
            iterations: 0,
        });
        ext
    };
    let pos: Vec<_> = ds.positives.iter().map(|p| p.actions.as_slice()).collect();
    let neg: Vec<_> = negatives.iter().map(|p| p.actions.as_slice()).collect();
    let dfa = rpni(n, &pos, &neg)?;
    trace.push(TraceEvent {
        stage: "rpni".into(),
        fitness: None,
        edits: vec![format!(
            "{} nodes, {} transitions",
            dfa.node_count(),
            dfa.transition_count()
        )],
        iterations: 0,
    });

    let mapping = build_mappings(&dfa, &ds.positives)?;
    let rm = reduce(&mapping, &space, &ds.positives);
    let data = FitnessData::new(&space, &ds.positives, &ds.negatives, grounding.prop_count());
    let (generated, seen) = generate_operators(&space, &rm);
    let unobserved: Vec<String> = seen
        .iter()
        .enumerate()
        .filter(|(_, s)| !**s)
        .map(|(o, _)| signature.schemas[o].name.clone())
        .collect();
    for op in &unobserved {
        log::warn!("operator {op} never observed; its model is empty");
    }

    let empty = space.empty_candidate();
    let mut c = if cfg.variant == Variant::TabuAlone {
        empty.clone()
    } else {
        trace.push(TraceEvent {
            stage: "generate".into(),
            fitness: Some(data.score(&space, &generated).total()),
            edits: describe(&space, &empty, &generated),
            iterations: 0,
        });
        generated
    };

    let refine_stage = |c: &mut Candidate, trace: &mut Vec<TraceEvent>| {
        let (passes, edits) = refine_fixpoint(c, &space, &rm);
        trace.push(TraceEvent {
            stage: "refine".into(),
            fitness: Some(data.score(&space, c).total()),
            edits,
            iterations: passes,
        });
    };
    let tabu_stage = |c: &mut Candidate, trace: &mut Vec<TraceEvent>| {
        let r = tabu_search(c, &space, &data, &cfg.tabu, cfg.exec);
        trace.push(TraceEvent {
            stage: "tabu".into(),
            fitness: Some(r.score.total()),
            edits: describe(&space, c, &r.best),
            iterations: r.iterations,
        });
        *c = r.best;
    };

    match cfg.variant {
        Variant::GenerationOnly => {}
        Variant::SimpleRefinement => refine_stage(&mut c, &mut trace),
        Variant::TabuAlone => tabu_stage(&mut c, &mut trace),
        Variant::Full | Variant::WithoutPc => {
            for _ in 0..cfg.max_rounds.max(1) {
                let before = c.clone();
                refine_stage(&mut c, &mut trace);
                tabu_stage(&mut c, &mut trace);
                if c == before {
                    break;
                }
            }
        }
    }

    let score = data.score(&space, &c);
    Ok(LearnOutput {
        domain: space.to_domain(&c),
        candidate: c,
        score,
        dfa,
        trace,
        unobserved,
    })
}

#[cfg(test)]
pub(crate) mod testing {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::space::{Mask, OpModel};
    use super::{Candidate, SchemaSpace};
    use crate::dataset::{generate, NegativeSample, PositiveSample};
    use crate::exec::Exec;
    use crate::fixtures::Fixture;
    use crate::oracle::{ObservationConfig, Oracle};

    /// A small dataset from the first problem of `f`.
    pub fn setup(f: Fixture, obs: f64, noise: f64) -> (SchemaSpace, Vec<PositiveSample>, Vec<NegativeSample>, usize) {
        let o = Oracle::new(f.domain(), f.problems().remove(0)).unwrap();
        let cfg = ObservationConfig::new(obs, noise).unwrap();
        let ds = generate(
            &o,
            &o.init,
            10,
            (5, 10),
            &cfg,
            &mut ChaCha8Rng::seed_from_u64(4),
            Exec::Sequential,
        )
        .unwrap();
        let space = SchemaSpace::new(&o.domain.signature(), &o.grounding).unwrap();
        (space, ds.positives, ds.negatives, o.grounding.prop_count())
    }

    /// Consistent candidate from arbitrary bits, one `[pre+, pre-, add, del]`
    /// row per operator.
    pub fn candidate(space: &SchemaSpace, raw: &[[u64; 4]]) -> Candidate {
        space
            .atoms
            .iter()
            .zip(raw)
            .map(|(atoms, r)| {
                let full: Mask = if atoms.len() == 128 { !0 } else { (1 << atoms.len()) - 1 };
                let pre_pos = r[0] as Mask & full;
                let add = r[2] as Mask & full;
                OpModel {
                    pre_pos,
                    pre_neg: r[1] as Mask & full & !pre_pos,
                    add,
                    del: r[3] as Mask & full & !add,
                }
            })
            .collect()
    }
}
