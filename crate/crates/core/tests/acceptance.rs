//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::Instant;

use common::{blocks, toy};
use domain_learner::dataset::{compute_pairwise_constraints, extend_samples, generate};
use domain_learner::experiment::{cell_rng, emit_report, run_experiment, ExperimentConfig, ReportFormat, RunReport};
use domain_learner::fixtures::Fixture;
use domain_learner::grammar::rpni;
use domain_learner::learner::Variant;
use domain_learner::oracle::Oracle;
use domain_learner::Exec;

struct Check {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn config(f: Fixture, observe: f64, noise: f64, variant: Variant) -> ExperimentConfig {
    ExperimentConfig {
        observe,
        noise,
        variant,
        ..ExperimentConfig::for_fixture(f)
    }
}

fn run(cfg: &ExperimentConfig) -> RunReport {
    let t = Instant::now();
    let r = run_experiment(cfg, Exec::Parallel).expect("config is valid");
    eprintln!(
        "  ran {} obs {:.2} noise {:.2} {} in {:.1?}",
        r.domain,
        cfg.observe,
        cfg.noise,
        cfg.variant.name(),
        t.elapsed()
    );
    r
}

fn mean(r: &RunReport) -> (f64, f64, f64, f64) {
    match &r.mean {
        Some(m) if r.failures == 0 => (m.e_rho, m.e_eps, m.e_sigma, m.acc),
        _ => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    }
}

/// Regenerates the training data of every cell and checks the automaton
/// accepts each positive prefix and rejects each (extended) negative.
fn grammar_invariants(cfg: &ExperimentConfig) -> Result<usize, String> {
    let (domain, problems) = cfg.load().map_err(|e| e.to_string())?;
    let obs = cfg.observation().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (i, p) in problems.iter().enumerate() {
        let o = Oracle::new(domain.clone(), p.clone()).map_err(|e| e.to_string())?;
        for &seed in &cfg.seeds {
            let ds = generate(
                &o,
                &o.init,
                cfg.n_pos,
                cfg.train_len,
                &obs,
                &mut cell_rng(seed, i, 0),
                Exec::Parallel,
            )
            .map_err(|e| e.to_string())?;
            let pc = compute_pairwise_constraints(&ds.positives, o.action_count());
            let negs = extend_samples(&ds, &pc);
            let pos: Vec<_> = ds.positives.iter().map(|p| p.actions.as_slice()).collect();
            let neg: Vec<_> = negs.iter().map(|n| n.actions.as_slice()).collect();
            let dfa = rpni(o.action_count(), &pos, &neg).map_err(|e| e.to_string())?;
            if let Some(p) = pos.iter().find(|p| !(0..=p.len()).all(|k| dfa.accepts(&p[..k]))) {
                return Err(format!("{} seed {seed}: positive {p:?} rejected", o.problem.name));
            }
            if let Some(n) = neg.iter().find(|n| dfa.accepts(n)) {
                return Err(format!("{} seed {seed}: negative {n:?} accepted", o.problem.name));
            }
            runs += 1;
        }
    }
    Ok(runs)
}

fn main() {
    let start = Instant::now();
    let mut checks = Vec::new();

    // 1
    let g1 = run(&config(Fixture::Gripper, 1.0, 0.0, Variant::Full));
    let b1 = run(&config(Fixture::Blocksworld, 1.0, 0.0, Variant::Full));
    {
        let exact = |r: &RunReport| {
            r.cells.len() == 15
                && r.cells.iter().all(|c| {
                    c.metrics
                        .as_ref()
                        .is_some_and(|m| m.e_rho == 0.0 && m.e_eps == 0.0 && m.e_sigma == 0.0)
                })
        };
        let (ga, ba) = (mean(&g1).3, mean(&b1).3);
        checks.push(Check {
            id: 1,
            title: "scenario 1 exact on Gripper and Blocksworld",
            pass: exact(&g1) && exact(&b1) && ga >= 95.0 && ba >= 95.0,
            detail: format!(
                "errors all zero: gripper {} blocksworld {}; Acc {ga:.2} / {ba:.2} (>= 95)",
                exact(&g1),
                exact(&b1)
            ),
        });
    }

    // 2
    let p1 = run(&config(Fixture::PegSolitaire, 1.0, 0.0, Variant::Full));
    {
        let (_, _, sigma, acc) = mean(&p1);
        checks.push(Check {
            id: 2,
            title: "Peg-Solitaire scenario 1",
            pass: acc == 100.0 && sigma <= 10.0,
            detail: format!("Acc {acc:.2} (= 100), E_sigma {sigma:.2} (<= 10)"),
        });
    }

    // 3
    let g_noise = run(&config(Fixture::Gripper, 1.0, 0.2, Variant::Full));
    let g_obs = run(&config(Fixture::Gripper, 0.25, 0.0, Variant::Full));
    let g_both = run(&config(Fixture::Gripper, 0.25, 0.2, Variant::Full));
    let b_both = run(&config(Fixture::Blocksworld, 0.25, 0.2, Variant::Full));
    {
        let accs = [mean(&g_noise).3, mean(&g_obs).3, mean(&g_both).3];
        let bacc = mean(&b_both).3;
        checks.push(Check {
            id: 3,
            title: "robustness to noise and partial observation",
            pass: accs.iter().all(|&a| a >= 90.0) && bacc >= 60.0,
            detail: format!(
                "Gripper Acc noise {:.2}, obs {:.2}, both {:.2} (>= 90); Blocksworld both {bacc:.2} (>= 60)",
                accs[0], accs[1], accs[2]
            ),
        });
    }

    // 4
    let g_simple = run(&config(Fixture::Gripper, 1.0, 0.2, Variant::SimpleRefinement));
    let g_gen = run(&config(Fixture::Gripper, 1.0, 0.2, Variant::GenerationOnly));
    let b_noise = run(&config(Fixture::Blocksworld, 1.0, 0.2, Variant::Full));
    let b_simple = run(&config(Fixture::Blocksworld, 1.0, 0.2, Variant::SimpleRefinement));
    let b_gen = run(&config(Fixture::Blocksworld, 1.0, 0.2, Variant::GenerationOnly));
    {
        let acc = |r: &RunReport| mean(r).3;
        let (gf, gs, gg) = (acc(&g_noise), acc(&g_simple), acc(&g_gen));
        let (bf, bs, bg) = (acc(&b_noise), acc(&b_simple), acc(&b_gen));
        checks.push(Check {
            id: 4,
            title: "ablation ordering at 20% noise",
            pass: gf >= gs && gf >= gg && bf >= bs && bf >= bg && gg == 0.0,
            detail: format!(
                "Gripper full/simple/generation {gf:.2}/{gs:.2}/{gg:.2}; Blocksworld {bf:.2}/{bs:.2}/{bg:.2}; Gripper generation = 0"
            ),
        });
    }

    // 5
    {
        let mut runs = 0;
        let mut err = None;
        for (f, obs, noise) in [
            (Fixture::Gripper, 1.0, 0.0),
            (Fixture::Gripper, 1.0, 0.2),
            (Fixture::Gripper, 0.25, 0.0),
            (Fixture::Gripper, 0.25, 0.2),
            (Fixture::Blocksworld, 1.0, 0.0),
            (Fixture::Blocksworld, 1.0, 0.2),
            (Fixture::Blocksworld, 0.25, 0.2),
            (Fixture::PegSolitaire, 1.0, 0.0),
            (Fixture::NegElevator, 1.0, 0.0),
        ] {
            match grammar_invariants(&config(f, obs, noise, Variant::Full)) {
                Ok(n) => runs += n,
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        let nodes: Vec<usize> = g1
            .cells
            .iter()
            .filter_map(|c| c.automaton.as_ref().map(|a| a.nodes))
            .collect();
        let (lo, hi) = (
            nodes.iter().min().copied().unwrap_or(0),
            nodes.iter().max().copied().unwrap_or(0),
        );
        let in_range = nodes.len() == 15 && lo >= 6 && hi <= 12;
        checks.push(Check {
            id: 5,
            title: "grammar separates samples; Gripper automaton size",
            pass: err.is_none() && in_range,
            detail: match err {
                Some(e) => e,
                None => format!("{runs} RPNI runs consistent; Gripper nodes {lo}..={hi} (within 6..=12)"),
            },
        });
    }

    // 6
    {
        let f = Fixture::Blocksworld;
        let o = Oracle::new(f.domain(), f.problems().remove(0)).unwrap();
        let res = blocks::check(&o);
        checks.push(Check {
            id: 6,
            title: "oracle matches hand-coded 3-block Blocksworld",
            pass: res.is_ok(),
            detail: match res {
                Ok(n) => format!(
                    "{} states x {} actions = {n} transitions agree",
                    blocks::all_states().len(),
                    o.action_count()
                ),
                Err(e) => e,
            },
        });
    }

    // 7
    let e1 = run(&config(Fixture::NegElevator, 1.0, 0.0, Variant::Full));
    {
        let all = [
            &g1, &b1, &p1, &e1, &g_noise, &g_obs, &g_both, &b_both, &g_simple, &b_simple, &b_noise,
        ];
        let worst = all.iter().map(|r| r.max_refine_passes()).max().unwrap_or(0);
        let stages: usize = all.iter().flat_map(|r| &r.cells).map(|c| c.refine_passes.len()).sum();
        checks.push(Check {
            id: 7,
            title: "refinement reaches a fixpoint",
            pass: worst < 10 && stages > 0,
            detail: format!("max passes {worst} (< 10) over {stages} refinement stages on all four fixtures"),
        });
    }

    // 8
    {
        let mut cases = 0;
        let mut miss = Vec::new();
        for (name, body) in toy::WORLDS {
            for seed in 0..5 {
                for (obs, noise) in [(1.0, 0.0), (0.5, 0.0), (1.0, 0.2), (0.5, 0.2)] {
                    let (got, best) = toy::compare(body, seed, obs, noise);
                    cases += 1;
                    if got != best {
                        miss.push(format!("{name}/{seed}/{obs}/{noise}: {got} vs {best}"));
                    }
                }
            }
        }
        checks.push(Check {
            id: 8,
            title: "tabu reaches the exhaustive optimum on toy worlds",
            pass: miss.is_empty(),
            detail: if miss.is_empty() {
                format!("{cases} datasets, 729 candidates each, all optima matched")
            } else {
                miss.join("; ")
            },
        });
    }

    // 9
    {
        let cfg = config(Fixture::Gripper, 1.0, 0.0, Variant::Full);
        let again = run(&cfg);
        let seq = run_experiment(&cfg, Exec::Sequential).unwrap();
        let formats = [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown];
        let same = |a: &RunReport, b: &RunReport| formats.iter().all(|&f| emit_report(a, f) == emit_report(b, f));
        checks.push(Check {
            id: 9,
            title: "identical configs give byte-identical reports",
            pass: same(&g1, &again) && same(&g1, &seq),
            detail: format!(
                "json/csv/markdown equal on rerun: {}, with sequential execution: {}",
                same(&g1, &again),
                same(&g1, &seq)
            ),
        });
    }

    println!();
    for c in &checks {
        println!(
            "{} criterion {}: {} | {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!(
        "\n{} of {} criteria passed in {:.1?}",
        checks.len() - failed,
        checks.len(),
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
