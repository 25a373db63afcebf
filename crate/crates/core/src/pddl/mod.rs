//! Symbolic STRIPS vocabulary: predicates, lifted operators, domains and
//! problems, plus the PDDL reader/writer and the grounder.

mod ground;
mod parser;
mod writer;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ground::{ground, ActionId, GroundAction, GroundState, Grounding, PropId};
pub use parser::{parse_domain, parse_problem};
pub use writer::{serialize_domain, serialize_problem};

/// Implicit root of every type hierarchy.
pub const ROOT_TYPE: &str = "object";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PddlError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported requirement `{0}`")]
    UnsupportedRequirement(String),
    #[error("unsupported construct `{0}`")]
    Unsupported(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown parameter `{name}` in action `{action}`")]
    UnknownParameter { action: String, name: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("predicate `{predicate}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("action `{action}` both adds and deletes `{atom}`")]
    ConflictingEffects { action: String, atom: String },
    #[error("action `{action}` requires both `{atom}` and its negation")]
    ContradictoryPrecondition { action: String, atom: String },
    #[error("argument `{argument}` of `{predicate}` has type `{found}`, expected `{expected}`")]
    TypeMismatch {
        predicate: String,
        argument: String,
        expected: String,
        found: String,
    },
    #[error("atom `{0}` repeats a parameter")]
    RepeatedParameter(String),
    #[error("problem is for domain `{found}`, expected `{expected}`")]
    DomainMismatch { expected: String, found: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Requirement {
    Strips,
    Typing,
    NegativePreconditions,
}

impl Requirement {
    pub fn keyword(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::NegativePreconditions => ":negative-preconditions",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            ":strips" => Some(Requirement::Strips),
            ":typing" => Some(Requirement::Typing),
            ":negative-preconditions" => Some(Requirement::NegativePreconditions),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

/// A typed variable, used both for predicate arguments and operator parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<Parameter>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// A lifted atom: a predicate (index into [`Domain::predicates`]) applied to
/// operator parameters (indices into [`ActionSchema::params`]).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: usize,
    pub args: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }
}

/// A lifted operator `(name, params, pre, add, del)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Parameter>,
    pub preconditions: BTreeSet<Literal>,
    pub add_effects: BTreeSet<Atom>,
    pub del_effects: BTreeSet<Atom>,
}

impl ActionSchema {
    /// The same operator with every precondition and effect removed.
    pub fn signature(&self) -> ActionSchema {
        ActionSchema {
            name: self.name.clone(),
            params: self.params.clone(),
            preconditions: BTreeSet::new(),
            add_effects: BTreeSet::new(),
            del_effects: BTreeSet::new(),
        }
    }

    pub fn positive_preconditions(&self) -> impl Iterator<Item = &Atom> {
        self.preconditions.iter().filter(|l| l.positive).map(|l| &l.atom)
    }

    pub fn negative_preconditions(&self) -> impl Iterator<Item = &Atom> {
        self.preconditions.iter().filter(|l| !l.positive).map(|l| &l.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    pub requirements: BTreeSet<Requirement>,
    pub types: Vec<TypeDecl>,
    /// Sorted by name, so atom order is lexicographic in predicate names.
    pub predicates: Vec<PredicateDecl>,
    pub schemas: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    pub fn schema_index(&self, name: &str) -> Option<usize> {
        self.schemas.iter().position(|s| s.name == name)
    }

    pub fn type_hierarchy(&self) -> Result<TypeHierarchy, PddlError> {
        TypeHierarchy::new(&self.types)
    }

    /// Copy of the domain with every operator stripped down to its signature.
    pub fn signature(&self) -> Domain {
        Domain {
            schemas: self.schemas.iter().map(ActionSchema::signature).collect(),
            ..self.clone()
        }
    }

    /// Predicates that no operator adds or deletes.
    pub fn static_predicates(&self) -> BTreeSet<usize> {
        let mut fluent = HashSet::new();
        for s in &self.schemas {
            for a in s.add_effects.iter().chain(&s.del_effects) {
                fluent.insert(a.predicate);
            }
        }
        (0..self.predicates.len()).filter(|p| !fluent.contains(p)).collect()
    }

    pub fn display_atom(&self, schema: &ActionSchema, atom: &Atom) -> String {
        let mut s = format!("({}", self.predicates[atom.predicate].name);
        for &a in &atom.args {
            s.push(' ');
            s.push_str(&schema.params[a].name);
        }
        s.push(')');
        s
    }

    /// Checks every structural invariant of a domain.
    pub fn validate(&self) -> Result<(), PddlError> {
        let types = self.type_hierarchy()?;
        let mut names = HashSet::new();
        for p in &self.predicates {
            if !names.insert(p.name.as_str()) {
                return Err(PddlError::Duplicate {
                    kind: "predicate",
                    name: p.name.clone(),
                });
            }
            for param in &p.params {
                types.check(&param.ty)?;
            }
        }
        let mut names = HashSet::new();
        for s in &self.schemas {
            if !names.insert(s.name.as_str()) {
                return Err(PddlError::Duplicate {
                    kind: "action",
                    name: s.name.clone(),
                });
            }
            let mut params = HashSet::new();
            for p in &s.params {
                types.check(&p.ty)?;
                if !params.insert(p.name.as_str()) {
                    return Err(PddlError::Duplicate {
                        kind: "parameter",
                        name: p.name.clone(),
                    });
                }
            }
            let atoms = s
                .preconditions
                .iter()
                .map(|l| &l.atom)
                .chain(&s.add_effects)
                .chain(&s.del_effects);
            for atom in atoms {
                self.check_atom(&types, s, atom)?;
            }
            for l in &s.preconditions {
                if l.positive && s.preconditions.contains(&Literal::neg(l.atom.clone())) {
                    return Err(PddlError::ContradictoryPrecondition {
                        action: s.name.clone(),
                        atom: self.display_atom(s, &l.atom),
                    });
                }
            }
            if let Some(a) = s.add_effects.intersection(&s.del_effects).next() {
                return Err(PddlError::ConflictingEffects {
                    action: s.name.clone(),
                    atom: self.display_atom(s, a),
                });
            }
        }
        Ok(())
    }

    fn check_atom(&self, types: &TypeHierarchy, schema: &ActionSchema, atom: &Atom) -> Result<(), PddlError> {
        let pred = self
            .predicates
            .get(atom.predicate)
            .ok_or_else(|| PddlError::UnknownPredicate(format!("#{}", atom.predicate)))?;
        if pred.arity() != atom.args.len() {
            return Err(PddlError::ArityMismatch {
                predicate: pred.name.clone(),
                expected: pred.arity(),
                found: atom.args.len(),
            });
        }
        let mut seen = HashSet::new();
        for (&arg, decl) in atom.args.iter().zip(&pred.params) {
            let param = schema.params.get(arg).ok_or_else(|| PddlError::UnknownParameter {
                action: schema.name.clone(),
                name: format!("#{arg}"),
            })?;
            if !seen.insert(arg) {
                return Err(PddlError::RepeatedParameter(self.display_atom(schema, atom)));
            }
            if !types.is_subtype(&param.ty, &decl.ty) {
                return Err(PddlError::TypeMismatch {
                    predicate: pred.name.clone(),
                    argument: param.name.clone(),
                    expected: decl.ty.clone(),
                    found: param.ty.clone(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Object {
    pub name: String,
    pub ty: String,
}

/// A ground atom over problem objects (indices into the object list).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: usize,
    pub args: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundLiteral {
    pub atom: GroundAtom,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<Object>,
    pub init: BTreeSet<GroundAtom>,
    pub goal: Vec<GroundLiteral>,
}

impl Problem {
    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }
}

/// Single-inheritance type tree rooted at [`ROOT_TYPE`].
#[derive(Debug, Clone)]
pub struct TypeHierarchy {
    parent: HashMap<String, String>,
}

impl TypeHierarchy {
    pub fn new(decls: &[TypeDecl]) -> Result<Self, PddlError> {
        let mut parent = HashMap::new();
        for d in decls {
            if d.name == ROOT_TYPE {
                continue;
            }
            if parent.insert(d.name.clone(), d.parent.clone()).is_some() {
                return Err(PddlError::Duplicate {
                    kind: "type",
                    name: d.name.clone(),
                });
            }
        }
        let h = TypeHierarchy { parent };
        for d in decls {
            h.check(&d.parent)?;
            // Reject cycles: walking up must reach the root.
            let mut cur = d.name.as_str();
            let mut steps = 0;
            while cur != ROOT_TYPE {
                cur = h
                    .parent
                    .get(cur)
                    .ok_or_else(|| PddlError::UnknownType(cur.to_string()))?;
                steps += 1;
                if steps > decls.len() + 1 {
                    return Err(PddlError::Unsupported(format!("cyclic type `{}`", d.name)));
                }
            }
        }
        Ok(h)
    }

    pub fn check(&self, ty: &str) -> Result<(), PddlError> {
        if ty == ROOT_TYPE || self.parent.contains_key(ty) {
            Ok(())
        } else {
            Err(PddlError::UnknownType(ty.to_string()))
        }
    }

    /// True if `ty` equals `ancestor` or inherits from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut cur = ty;
        loop {
            if cur == ancestor {
                return true;
            }
            match self.parent.get(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}
