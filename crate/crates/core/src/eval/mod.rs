//! Scoring a learned domain against the ground truth.

mod metrics;
mod planner;
mod problems;

use serde::{Deserialize, Serialize};

use crate::dataset::PositiveSample;
use crate::exec::Exec;
use crate::oracle::Oracle;
use crate::pddl::{Domain, GroundState, Grounding, PddlError};

pub use metrics::{effect_error, precondition_error, syntactical_error, OperatorError, SigmaDenominator};
pub use planner::{format_plan, plan, validate, Goal, PlanOutcome, PlannerLimits};
pub use problems::{generate_problems, EvalProblem};

/// All figures are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub e_rho: f64,
    pub e_eps: f64,
    pub e_sigma: f64,
    pub solved: f64,
    pub acc: f64,
    pub per_operator: Vec<OperatorError>,
}

/// Plans every problem in `learned` and checks each plan against `truth`.
/// Returns the solved and correctly solved percentages.
pub fn accuracy(
    learned: &Grounding,
    truth: &Grounding,
    problems: &[EvalProblem],
    limits: &PlannerLimits,
    exec: Exec,
) -> (f64, f64) {
    if problems.is_empty() {
        return (0.0, 0.0);
    }
    let n = truth.prop_count();
    let results = exec.map(problems, |p| {
        let init = p.init_state(n);
        match plan(learned, &init, &p.goal, limits) {
            PlanOutcome::Found(pi) => (true, validate(truth, &init, &p.goal, &pi)),
            _ => (false, false),
        }
    });
    let solved = results.iter().filter(|r| r.0).count();
    let correct = results.iter().filter(|r| r.1).count();
    let pct = |k: usize| 100.0 * k as f64 / problems.len() as f64;
    (pct(solved), pct(correct))
}

/// Options for [`evaluate`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub limits: PlannerLimits,
    pub sigma: SigmaDenominator,
    pub exec: Exec,
}

/// Every metric of `learned` against the oracle's domain. `test` are
/// walks from `s0`.
pub fn evaluate(
    learned: &Domain,
    oracle: &Oracle,
    s0: &GroundState,
    test: &[PositiveSample],
    problems: &[EvalProblem],
    opts: &EvalOptions,
) -> Result<MetricsReport, PddlError> {
    let lg = oracle.grounding.instantiate(learned)?;
    let (e_sigma, per_operator) = syntactical_error(learned, &oracle.domain, opts.sigma)?;
    let e_rho = precondition_error(&lg, &oracle.grounding, s0, test);
    let e_eps = effect_error(&lg, &oracle.grounding, s0, test);
    let (solved, acc) = accuracy(&lg, &oracle.grounding, problems, &opts.limits, opts.exec);
    Ok(MetricsReport {
        e_rho,
        e_eps,
        e_sigma,
        solved,
        acc,
        per_operator,
    })
}
