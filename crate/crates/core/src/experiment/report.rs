use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(ReportFormat::Csv),
            "json" => Some(ReportFormat::Json),
            "md" | "markdown" => Some(ReportFormat::Markdown),
            _ => None,
        }
    }
}

pub fn emit_report(r: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => csv(r),
        ReportFormat::Json => serde_json::to_string_pretty(r).expect("report serializes") + "\n",
        ReportFormat::Markdown => markdown(r),
    }
}

fn csv(r: &RunReport) -> String {
    let mut s = String::from("problem,seed,e_rho,e_eps,e_sigma,solved,acc,nodes,negatives,error\n");
    for c in &r.cells {
        let _ = write!(s, "{},{}", c.problem, c.seed);
        match &c.metrics {
            Some(m) => {
                let _ = write!(
                    s,
                    ",{:.2},{:.2},{:.2},{:.2},{:.2}",
                    m.e_rho, m.e_eps, m.e_sigma, m.solved, m.acc
                );
            }
            None => s.push_str(",,,,,"),
        }
        let nodes = c.automaton.as_ref().map(|a| a.nodes.to_string()).unwrap_or_default();
        let negs = c.dataset.as_ref().map(|d| d.negatives.to_string()).unwrap_or_default();
        let err = c.error.as_deref().unwrap_or("").replace([',', '\n'], " ");
        let _ = writeln!(s, ",{nodes},{negs},{err}");
    }
    if let Some(m) = &r.mean {
        let _ = writeln!(
            s,
            "mean,,{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},",
            m.e_rho, m.e_eps, m.e_sigma, m.solved, m.acc, m.nodes, m.negatives
        );
    }
    s
}

const HEADER: &str = "| Domain | Variant | E_rho (%) | E_eps (%) | E_sigma (%) | Solved (%) | Acc (%) | Failures |\n|---|---|---|---|---|---|---|---|\n";

fn summary_row(r: &RunReport) -> String {
    match &r.mean {
        Some(m) => format!(
            "| {} | {} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} | {} |\n",
            r.domain,
            r.config.variant.name(),
            m.e_rho,
            m.e_eps,
            m.e_sigma,
            m.solved,
            m.acc,
            r.failures
        ),
        None => format!(
            "| {} | {} | - | - | - | - | - | {} |\n",
            r.domain,
            r.config.variant.name(),
            r.failures
        ),
    }
}

fn markdown(r: &RunReport) -> String {
    let mut s = format!(
        "# {}\n\nobserve {:.2}, noise {:.2}, {} positives per cell\n\n",
        r.domain, r.config.observe, r.config.noise, r.config.n_pos
    );
    s.push_str(HEADER);
    s.push_str(&summary_row(r));
    s.push_str("\n| Problem | Seed | E_rho | E_eps | E_sigma | Solved | Acc | Nodes | Negatives |\n|---|---|---|---|---|---|---|---|---|\n");
    for c in &r.cells {
        let nodes = c.automaton.as_ref().map_or(String::from("-"), |a| a.nodes.to_string());
        let negs = c
            .dataset
            .as_ref()
            .map_or(String::from("-"), |d| d.negatives.to_string());
        match &c.metrics {
            Some(m) => {
                let _ = writeln!(
                    s,
                    "| {} | {} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} | {nodes} | {negs} |",
                    c.problem, c.seed, m.e_rho, m.e_eps, m.e_sigma, m.solved, m.acc
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    "| {} | {} | error: {} | | | | | {nodes} | {negs} |",
                    c.problem,
                    c.seed,
                    c.error.as_deref().unwrap_or("")
                );
            }
        }
    }
    s
}

/// One summary row per report.
pub fn ablation_markdown(reports: &[RunReport]) -> String {
    let mut s = String::from(HEADER);
    for r in reports {
        s.push_str(&summary_row(r));
    }
    s
}
