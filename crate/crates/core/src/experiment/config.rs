use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{PlannerLimits, SigmaDenominator};
use crate::fixtures::Fixture;
use crate::learner::{TabuConfig, Variant};
use crate::oracle::ObservationConfig;
use crate::pddl::{parse_domain, parse_problem, Domain, PddlError, Problem};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Pddl { path: String, source: PddlError },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

/// One experiment: a domain, its initial states, and the settings applied
/// to every (initial state, seed) cell.
///
/// Either `fixture` names a bundled domain, or `domain` and `problems` point
/// at PDDL files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub fixture: Option<String>,
    pub domain: Option<PathBuf>,
    pub problems: Vec<PathBuf>,
    pub n_pos: usize,
    pub train_len: (usize, usize),
    pub test_len: (usize, usize),
    pub n_test: usize,
    pub n_problems: usize,
    /// Length range of the walks that pick evaluation goals.
    pub problem_len: (usize, usize),
    pub observe: f64,
    pub noise: f64,
    pub seeds: Vec<u64>,
    pub variant: Variant,
    pub tabu_iterations: usize,
    pub tabu_tenure: usize,
    pub max_rounds: usize,
    pub planner_timeout_secs: u64,
    pub planner_max_expansions: usize,
    pub sigma: SigmaDenominator,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            fixture: None,
            domain: None,
            problems: Vec::new(),
            n_pos: 30,
            train_len: (10, 20),
            test_len: (1, 100),
            n_test: 100,
            n_problems: 20,
            problem_len: (20, 50),
            observe: 1.0,
            noise: 0.0,
            seeds: vec![1, 2, 3, 4, 5],
            variant: Variant::Full,
            tabu_iterations: TabuConfig::default().iterations,
            tabu_tenure: TabuConfig::default().tenure,
            max_rounds: 10,
            planner_timeout_secs: 60,
            planner_max_expansions: PlannerLimits::default().max_expansions,
            sigma: SigmaDenominator::PerSlot,
        }
    }
}

impl ExperimentConfig {
    pub fn for_fixture(f: Fixture) -> Self {
        ExperimentConfig {
            fixture: Some(f.name().to_string()),
            ..Default::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a TOML file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: ExperimentConfig = toml::from_str(&text)?;
        let base = path.parent().unwrap_or(std::path::Path::new(""));
        cfg.domain = cfg.domain.map(|d| base.join(d));
        cfg.problems = cfg.problems.iter().map(|q| base.join(q)).collect();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.seeds.is_empty() {
            return bad("seeds must not be empty");
        }
        match (&self.fixture, &self.domain) {
            (Some(_), Some(_)) => return bad("give either fixture or domain, not both"),
            (None, None) => return bad("one of fixture or domain is required"),
            (Some(name), None) if Fixture::from_name(name).is_none() => {
                return Err(ConfigError::Invalid(format!("unknown fixture `{name}`")))
            }
            (None, Some(_)) if self.problems.is_empty() => return bad("problems must not be empty"),
            _ => {}
        }
        if self.n_pos == 0 {
            return bad("n_pos must be positive");
        }
        for (name, (lo, hi)) in [
            ("train_len", self.train_len),
            ("test_len", self.test_len),
            ("problem_len", self.problem_len),
        ] {
            if lo > hi {
                return Err(ConfigError::Invalid(format!("{name} is empty")));
            }
        }
        if self.tabu_iterations == 0 {
            return bad("tabu_iterations must be positive");
        }
        self.observation().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn observation(&self) -> Result<ObservationConfig, crate::oracle::ConfigError> {
        ObservationConfig::new(self.observe, self.noise)
    }

    pub fn tabu(&self) -> TabuConfig {
        TabuConfig {
            iterations: self.tabu_iterations,
            tenure: self.tabu_tenure,
        }
    }

    pub fn planner(&self) -> PlannerLimits {
        PlannerLimits {
            timeout: Duration::from_secs(self.planner_timeout_secs),
            max_expansions: self.planner_max_expansions,
        }
    }

    /// Name used in reports.
    pub fn domain_name(&self) -> String {
        match (&self.fixture, &self.domain) {
            (Some(f), _) => f.clone(),
            (None, Some(p)) => p
                .file_stem()
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
            _ => String::new(),
        }
    }

    /// Parses the domain and the initial-state problems.
    pub fn load(&self) -> Result<(Domain, Vec<Problem>), ConfigError> {
        self.validate()?;
        if let Some(name) = &self.fixture {
            let f = Fixture::from_name(name).expect("validated");
            return Ok((f.domain(), f.problems()));
        }
        let read = |p: &PathBuf| {
            std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.clone(),
                source,
            })
        };
        let path = self.domain.as_ref().expect("validated");
        let domain = parse_domain(&read(path)?).map_err(|source| ConfigError::Pddl {
            path: path.display().to_string(),
            source,
        })?;
        let problems = self
            .problems
            .iter()
            .map(|p| {
                parse_problem(&read(p)?, &domain).map_err(|source| ConfigError::Pddl {
                    path: p.display().to_string(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((domain, problems))
    }
}
