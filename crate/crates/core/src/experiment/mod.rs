//! Grids of (initial state, seed) cells: generate, learn, evaluate, report.

mod config;
mod report;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{generate, generate_test_walks, DatasetStats};
use crate::eval::{evaluate, generate_problems, EvalOptions, MetricsReport};
use crate::exec::Exec;
use crate::grammar::{compression_stats, AutomatonStats};
use crate::learner::{learn, LearnConfig, Variant};
use crate::oracle::Oracle;
use crate::pddl::{Domain, Problem};

pub use config::{ConfigError, ExperimentConfig};
pub use report::{ablation_markdown, emit_report, ReportFormat};

/// Result of one (initial state, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub problem: String,
    pub seed: u64,
    pub metrics: Option<MetricsReport>,
    pub error: Option<String>,
    pub dataset: Option<DatasetStats>,
    pub automaton: Option<AutomatonStats>,
    pub refine_passes: Vec<usize>,
    pub fitness: Option<i64>,
}

/// Means over the cells that finished.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub e_rho: f64,
    pub e_eps: f64,
    pub e_sigma: f64,
    pub solved: f64,
    pub acc: f64,
    pub nodes: f64,
    pub compression: f64,
    pub negatives: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub domain: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
    pub mean: Option<MeanMetrics>,
    pub failures: usize,
}

impl RunReport {
    pub fn max_refine_passes(&self) -> usize {
        self.cells
            .iter()
            .flat_map(|c| c.refine_passes.iter().copied())
            .max()
            .unwrap_or(0)
    }
}

/// Generator for one cell of the grid: `problem` is the index of the
/// initial state, `purpose` is 0 for training data, 1 for test walks and
/// 2 for evaluation problems.
pub fn cell_rng(seed: u64, problem: usize, purpose: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(problem as u64 * 4 + purpose);
    r
}

fn run_cell(
    cfg: &ExperimentConfig,
    domain: &Domain,
    problem: &Problem,
    index: usize,
    seed: u64,
    exec: Exec,
) -> CellReport {
    let mut cell = CellReport {
        problem: problem.name.clone(),
        seed,
        metrics: None,
        error: None,
        dataset: None,
        automaton: None,
        refine_passes: Vec::new(),
        fitness: None,
    };
    if let Err(e) = fill_cell(&mut cell, cfg, domain, problem, index, exec) {
        log::warn!("{} seed {seed}: {e}", problem.name);
        cell.error = Some(e);
    }
    cell
}

fn fill_cell(
    cell: &mut CellReport,
    cfg: &ExperimentConfig,
    domain: &Domain,
    problem: &Problem,
    index: usize,
    exec: Exec,
) -> Result<(), String> {
    let seed = cell.seed;
    let oracle = Oracle::new(domain.clone(), problem.clone()).map_err(|e| e.to_string())?;
    let s0 = oracle.init.clone();
    let obs = cfg.observation().map_err(|e| e.to_string())?;
    let ds = generate(
        &oracle,
        &s0,
        cfg.n_pos,
        cfg.train_len,
        &obs,
        &mut cell_rng(seed, index, 0),
        exec,
    )
    .map_err(|e| e.to_string())?;
    cell.dataset = Some(ds.stats(oracle.action_count()));

    let lc = LearnConfig {
        variant: cfg.variant,
        tabu: cfg.tabu(),
        max_rounds: cfg.max_rounds,
        exec,
    };
    let out = learn(&domain.signature(), &oracle.grounding, &ds, &lc).map_err(|e| e.to_string())?;
    cell.automaton = Some(compression_stats(&out.dfa, &ds));
    cell.refine_passes = out.refine_passes();
    cell.fitness = Some(out.score.total());

    let test = generate_test_walks(&oracle, &s0, cfg.n_test, cfg.test_len, &mut cell_rng(seed, index, 1));
    let problems = generate_problems(
        &oracle,
        &s0,
        cfg.n_problems,
        cfg.problem_len,
        &mut cell_rng(seed, index, 2),
    );
    let opts = EvalOptions {
        limits: cfg.planner(),
        sigma: cfg.sigma,
        exec,
    };
    let m = evaluate(&out.domain, &oracle, &s0, &test, &problems, &opts).map_err(|e| e.to_string())?;
    cell.metrics = Some(m);
    Ok(())
}

fn mean_of(cells: &[CellReport]) -> Option<MeanMetrics> {
    let ok: Vec<&CellReport> = cells.iter().filter(|c| c.metrics.is_some()).collect();
    if ok.is_empty() {
        return None;
    }
    let avg = |f: &dyn Fn(&CellReport) -> f64| ok.iter().map(|c| f(c)).sum::<f64>() / ok.len() as f64;
    let m = |c: &CellReport| c.metrics.clone().expect("filtered");
    Some(MeanMetrics {
        e_rho: avg(&|c| m(c).e_rho),
        e_eps: avg(&|c| m(c).e_eps),
        e_sigma: avg(&|c| m(c).e_sigma),
        solved: avg(&|c| m(c).solved),
        acc: avg(&|c| m(c).acc),
        nodes: avg(&|c| c.automaton.as_ref().map_or(0.0, |a| a.nodes as f64)),
        compression: avg(&|c| c.automaton.as_ref().map_or(0.0, |a| a.compression)),
        negatives: avg(&|c| c.dataset.as_ref().map_or(0.0, |d| d.negatives as f64)),
    })
}

/// Runs every cell of an already loaded domain. Cells run concurrently
/// under `exec`; the report does not depend on it.
pub fn run_grid(cfg: &ExperimentConfig, domain: &Domain, problems: &[Problem], exec: Exec) -> RunReport {
    let jobs: Vec<(usize, u64)> = (0..problems.len())
        .flat_map(|p| cfg.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let cells = exec.map(&jobs, |&(p, s)| run_cell(cfg, domain, &problems[p], p, s, exec));
    let failures = cells.iter().filter(|c| c.error.is_some()).count();
    RunReport {
        domain: cfg.domain_name(),
        config: cfg.clone(),
        mean: mean_of(&cells),
        cells,
        failures,
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, exec: Exec) -> Result<RunReport, ConfigError> {
    let (domain, problems) = cfg.load()?;
    let start = std::time::Instant::now();
    let report = run_grid(cfg, &domain, &problems, exec);
    log::info!(
        "{} ({}): {} cells in {:.2?}",
        report.domain,
        cfg.variant.name(),
        report.cells.len(),
        start.elapsed()
    );
    Ok(report)
}

/// The same grid once per variant.
pub fn run_ablation(cfg: &ExperimentConfig, variants: &[Variant], exec: Exec) -> Result<Vec<RunReport>, ConfigError> {
    let (domain, problems) = cfg.load()?;
    Ok(variants
        .iter()
        .map(|&v| {
            let c = ExperimentConfig {
                variant: v,
                ..cfg.clone()
            };
            run_grid(&c, &domain, &problems, exec)
        })
        .collect())
}
