//! Learning STRIPS domains from a black-box state machine.
//!
//! The pipeline queries an [`oracle::Oracle`] with random walks, induces an
//! automaton over the feasible action sequences, derives lifted operators
//! from the observations mapped onto that automaton, and polishes them with
//! refinement and tabu search. [`eval`] scores the result against the
//! ground-truth domain.

pub mod dataset;
pub mod eval;
pub mod exec;
pub mod experiment;
pub mod fixtures;
pub mod grammar;
pub mod learner;
pub mod oracle;
pub mod pddl;

pub use exec::Exec;
