use std::fmt::Write;

use super::{ActionSchema, Atom, Domain, GroundAtom, Problem, ROOT_TYPE};

fn atom_text(domain: &Domain, schema: &ActionSchema, atom: &Atom) -> String {
    domain.display_atom(schema, atom)
}

fn typed(name: &str, ty: &str, typing: bool) -> String {
    if typing && ty != ROOT_TYPE {
        format!("{name} - {ty}")
    } else {
        name.to_string()
    }
}

fn conjunction(parts: &[String], indent: &str) -> String {
    match parts.len() {
        0 => "()".to_string(),
        1 => parts[0].clone(),
        _ => {
            let sep = format!("\n{indent}     ");
            format!("(and {})", parts.join(&sep))
        }
    }
}

/// Renders a domain as PDDL text that [`super::parse_domain`] reads back.
pub fn serialize_domain(domain: &Domain) -> String {
    let typing = domain.types.iter().any(|t| t.name != ROOT_TYPE)
        || domain
            .predicates
            .iter()
            .flat_map(|p| &p.params)
            .any(|p| p.ty != ROOT_TYPE);
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", domain.name);
    if !domain.requirements.is_empty() {
        let reqs: Vec<_> = domain.requirements.iter().map(|r| r.keyword()).collect();
        let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));
    }
    if !domain.types.is_empty() {
        let types: Vec<_> = domain.types.iter().map(|t| typed(&t.name, &t.parent, true)).collect();
        let _ = writeln!(out, "  (:types {})", types.join(" "));
    }
    out.push_str("  (:predicates");
    for p in &domain.predicates {
        let _ = write!(out, "\n    ({}", p.name);
        for param in &p.params {
            let _ = write!(out, " {}", typed(&param.name, &param.ty, typing));
        }
        out.push(')');
    }
    out.push(')');

    for s in &domain.schemas {
        let params: Vec<_> = s.params.iter().map(|p| typed(&p.name, &p.ty, typing)).collect();
        let pre: Vec<_> = s
            .preconditions
            .iter()
            .map(|l| {
                let a = atom_text(domain, s, &l.atom);
                if l.positive {
                    a
                } else {
                    format!("(not {a})")
                }
            })
            .collect();
        let eff: Vec<_> = s
            .add_effects
            .iter()
            .map(|a| atom_text(domain, s, a))
            .chain(
                s.del_effects
                    .iter()
                    .map(|a| format!("(not {})", atom_text(domain, s, a))),
            )
            .collect();
        let _ = write!(
            out,
            "\n\n  (:action {}\n    :parameters ({})\n    :precondition {}\n    :effect {})",
            s.name,
            params.join(" "),
            conjunction(&pre, "                  "),
            conjunction(&eff, "            "),
        );
    }
    out.push_str(")\n");
    out
}

fn ground_atom_text(domain: &Domain, problem: &Problem, atom: &GroundAtom) -> String {
    let mut s = format!("({}", domain.predicates[atom.predicate].name);
    for &o in &atom.args {
        s.push(' ');
        s.push_str(&problem.objects[o].name);
    }
    s.push(')');
    s
}

pub fn serialize_problem(domain: &Domain, problem: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", problem.name);
    let _ = writeln!(out, "  (:domain {})", problem.domain);
    let objects: Vec<_> = problem.objects.iter().map(|o| typed(&o.name, &o.ty, true)).collect();
    let _ = writeln!(out, "  (:objects {})", objects.join(" "));
    out.push_str("  (:init");
    for a in &problem.init {
        let _ = write!(out, "\n    {}", ground_atom_text(domain, problem, a));
    }
    out.push_str(")\n");
    let goal: Vec<_> = problem
        .goal
        .iter()
        .map(|l| {
            let a = ground_atom_text(domain, problem, &l.atom);
            if l.positive {
                a
            } else {
                format!("(not {a})")
            }
        })
        .collect();
    let _ = writeln!(out, "  (:goal (and {})))", goal.join(" "));
    out
}
