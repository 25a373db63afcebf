use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use domain_learner::dataset::{generate, generate_test_walks, read_dataset, write_dataset, Dataset};
use domain_learner::eval::{evaluate, format_plan, generate_problems, plan, EvalOptions, PlanOutcome};
use domain_learner::experiment::{
    ablation_markdown, cell_rng, emit_report, run_ablation, run_experiment, ExperimentConfig, ReportFormat, RunReport,
};
use domain_learner::learner::{learn, LearnConfig, Variant};
use domain_learner::oracle::Oracle;
use domain_learner::pddl::{parse_domain, serialize_domain, serialize_problem};
use domain_learner::Exec;

#[derive(Parser)]
#[command(
    name = "dlearn",
    version,
    about = "Learn STRIPS domains from random walks over a simulated system"
)]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a training dataset and write it in text form.
    Generate {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        sample: Sample,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn a domain from a dataset file or from fresh samples.
    Learn {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        sample: Sample,
        /// Read samples from this file instead of generating them.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, default_value = "full", value_parser = parse_variant)]
        variant: Variant,
        /// Directory for domain.pddl, automaton.txt and trace.jsonl; the
        /// domain goes to stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a learned domain against the true one.
    Evaluate {
        #[command(flatten)]
        source: Source,
        /// Learned domain file.
        #[arg(long)]
        learned: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        problem_index: usize,
        /// Output file for the JSON metrics; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for each evaluation problem and the learned domain's
        /// plan for it.
        #[arg(long)]
        plans: Option<PathBuf>,
    },
    /// Run a grid of initial states and seeds.
    Experiment {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, value_parser = parse_variant)]
        variant: Option<Variant>,
    },
    /// Run the same grid under several variants.
    Ablation {
        #[command(flatten)]
        grid: Grid,
        /// Variants to compare; all five if absent.
        #[arg(long = "variant", value_parser = parse_variant)]
        variants: Vec<Variant>,
    },
}

/// Where the true domain comes from.
#[derive(Args, Clone)]
struct Source {
    /// Bundled domain: gripper, blocksworld, peg-solitaire or neg-elevator.
    #[arg(long, conflicts_with = "domain")]
    fixture: Option<String>,
    /// True domain file.
    #[arg(long, requires = "problems")]
    domain: Option<PathBuf>,
    /// Problem files; their initial states seed the walks.
    #[arg(long, num_args = 1..)]
    problems: Vec<PathBuf>,
}

#[derive(Args, Clone)]
struct Sample {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Which problem's initial state to start from.
    #[arg(long, default_value_t = 0)]
    problem_index: usize,
    #[arg(long, default_value_t = 30)]
    n_pos: usize,
    #[arg(long, default_value_t = 10)]
    min_len: usize,
    #[arg(long, default_value_t = 20)]
    max_len: usize,
    #[arg(long, default_value_t = 1.0)]
    observe: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

#[derive(Args)]
struct Grid {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    observe: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    /// Repeat to give several seeds.
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    /// Directory for report files; markdown on stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Variant::ALL.iter().map(|v| v.name()).collect();
        format!("unknown variant `{s}` (expected one of {})", names.join(", "))
    })
}

impl Source {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            fixture: self.fixture.clone(),
            domain: self.domain.clone(),
            problems: self.problems.clone(),
            ..Default::default()
        }
    }

    fn is_given(&self) -> bool {
        self.fixture.is_some() || self.domain.is_some()
    }

    fn oracle(&self, index: usize) -> Result<Oracle> {
        let (domain, mut problems) = self.config().load()?;
        if index >= problems.len() {
            bail!("problem index {index} out of range ({} problems)", problems.len());
        }
        Ok(Oracle::new(domain, problems.swap_remove(index))?)
    }
}

impl Sample {
    fn dataset(&self, oracle: &Oracle, exec: Exec) -> Result<Dataset> {
        let cfg = domain_learner::oracle::ObservationConfig::new(self.observe, self.noise)?;
        let mut rng = cell_rng(self.seed, self.problem_index, 0);
        Ok(generate(
            oracle,
            &oracle.init,
            self.n_pos,
            (self.min_len, self.max_len),
            &cfg,
            &mut rng,
            exec,
        )?)
    }
}

impl Grid {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if self.source.is_given() {
            let src = self.source.config();
            cfg.fixture = src.fixture;
            cfg.domain = src.domain;
            cfg.problems = src.problems;
        }
        if let Some(o) = self.observe {
            cfg.observe = o;
        }
        if let Some(n) = self.noise {
            cfg.noise = n;
        }
        if !self.seeds.is_empty() {
            cfg.seeds = self.seeds.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_reports(dir: &Path, stem: &str, r: &RunReport) -> Result<()> {
    for (ext, f) in [
        ("csv", ReportFormat::Csv),
        ("json", ReportFormat::Json),
        ("md", ReportFormat::Markdown),
    ] {
        let p = dir.join(format!("{stem}.{ext}"));
        fs::write(&p, emit_report(r, f)).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };

    match cli.command {
        Command::Generate { source, sample, out } => {
            let oracle = source.oracle(sample.problem_index)?;
            let ds = sample.dataset(&oracle, exec)?;
            write_or_print(out.as_deref(), &write_dataset(&oracle.grounding, &ds))?;
        }
        Command::Learn {
            source,
            sample,
            dataset,
            variant,
            out,
        } => {
            let oracle = source.oracle(sample.problem_index)?;
            let ds = match dataset {
                Some(p) => {
                    let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    let cfg = domain_learner::oracle::ObservationConfig::new(sample.observe, sample.noise)?;
                    read_dataset(&oracle.grounding, &text, cfg)?
                }
                None => sample.dataset(&oracle, exec)?,
            };
            let cfg = LearnConfig {
                variant,
                exec,
                ..Default::default()
            };
            let learned = learn(&oracle.domain, &oracle.grounding, &ds, &cfg)?;
            for op in &learned.unobserved {
                log::warn!("operator {op} never appears in the samples");
            }
            let text = serialize_domain(&learned.domain);
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    fs::write(dir.join("domain.pddl"), text)?;
                    fs::write(dir.join("automaton.txt"), learned.dfa.to_text(&oracle.grounding))?;
                    fs::write(dir.join("trace.jsonl"), learned.trace_jsonl())?;
                }
                None => print!("{text}"),
            }
        }
        Command::Evaluate {
            source,
            learned,
            seed,
            problem_index,
            out,
            plans,
        } => {
            let oracle = source.oracle(problem_index)?;
            let text = fs::read_to_string(&learned).with_context(|| format!("reading {}", learned.display()))?;
            let domain = parse_domain(&text).with_context(|| format!("parsing {}", learned.display()))?;
            let d = ExperimentConfig::default();
            let s0 = oracle.init.clone();
            let test = generate_test_walks(
                &oracle,
                &s0,
                d.n_test,
                d.test_len,
                &mut cell_rng(seed, problem_index, 1),
            );
            let problems = generate_problems(
                &oracle,
                &s0,
                d.n_problems,
                d.problem_len,
                &mut cell_rng(seed, problem_index, 2),
            );
            let opts = EvalOptions {
                limits: d.planner(),
                sigma: d.sigma,
                exec,
            };
            let m = evaluate(&domain, &oracle, &s0, &test, &problems, &opts)?;
            if let Some(dir) = plans {
                fs::create_dir_all(&dir)?;
                let lg = oracle.grounding.instantiate(&domain)?;
                let n = oracle.grounding.prop_count();
                for (i, p) in problems.iter().enumerate() {
                    let name = format!("eval-{i:02}");
                    let prob = p.to_problem(&oracle.grounding, &oracle.domain.name, &name);
                    fs::write(
                        dir.join(format!("{name}.pddl")),
                        serialize_problem(&oracle.domain, &prob),
                    )?;
                    if let PlanOutcome::Found(pi) = plan(&lg, &p.init_state(n), &p.goal, &opts.limits) {
                        fs::write(dir.join(format!("{name}.plan")), format_plan(&lg, &pi))?;
                    }
                }
            }
            write_or_print(out.as_deref(), &(serde_json::to_string_pretty(&m)? + "\n"))?;
        }
        Command::Experiment { grid, variant } => {
            let mut cfg = grid.config()?;
            if let Some(v) = variant {
                cfg.variant = v;
            }
            let start = Instant::now();
            let r = run_experiment(&cfg, exec)?;
            eprintln!(
                "{} cells in {:.2?}, {} failed",
                r.cells.len(),
                start.elapsed(),
                r.failures
            );
            match &grid.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    write_reports(dir, "report", &r)?;
                }
                None => print!("{}", emit_report(&r, ReportFormat::Markdown)),
            }
        }
        Command::Ablation { grid, variants } => {
            let cfg = grid.config()?;
            let variants = if variants.is_empty() {
                Variant::ALL.to_vec()
            } else {
                variants
            };
            let start = Instant::now();
            let reports = run_ablation(&cfg, &variants, exec)?;
            eprintln!("{} variants in {:.2?}", reports.len(), start.elapsed());
            let table = ablation_markdown(&reports);
            match &grid.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    for r in &reports {
                        write_reports(dir, r.config.variant.name(), r)?;
                    }
                    fs::write(dir.join("ablation.md"), table)?;
                }
                None => print!("{table}"),
            }
        }
    }
    Ok(())
}
