//! Lifted atoms each operator may mention, and candidate domains as bitmasks
//! over them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::oracle::Observation;
use crate::pddl::{ActionId, ActionSchema, Atom, Domain, Grounding, Literal, PddlError, PropId};

/// Atoms are limited to 128 per operator.
pub type Mask = u128;

pub const MAX_ATOMS: usize = Mask::BITS as usize;

#[inline]
pub fn bits(m: Mask) -> impl Iterator<Item = usize> {
    let mut m = m;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    PrePos,
    PreNeg,
    Add,
    Del,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::PrePos, Slot::PreNeg, Slot::Add, Slot::Del];
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::PrePos => "pre+",
            Slot::PreNeg => "pre-",
            Slot::Add => "add",
            Slot::Del => "del",
        })
    }
}

/// One operator of a candidate domain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpModel {
    pub pre_pos: Mask,
    pub pre_neg: Mask,
    pub add: Mask,
    pub del: Mask,
}

impl OpModel {
    pub fn get(&self, slot: Slot) -> Mask {
        match slot {
            Slot::PrePos => self.pre_pos,
            Slot::PreNeg => self.pre_neg,
            Slot::Add => self.add,
            Slot::Del => self.del,
        }
    }

    pub fn get_mut(&mut self, slot: Slot) -> &mut Mask {
        match slot {
            Slot::PrePos => &mut self.pre_pos,
            Slot::PreNeg => &mut self.pre_neg,
            Slot::Add => &mut self.add,
            Slot::Del => &mut self.del,
        }
    }

    /// Whether flipping `atom` in `slot` keeps preconditions and effects
    /// free of contradictions.
    pub fn can_toggle(&self, slot: Slot, atom: usize) -> bool {
        let b = 1 << atom;
        match slot {
            Slot::PrePos => self.pre_neg & b == 0,
            Slot::PreNeg => self.pre_pos & b == 0,
            Slot::Add => self.del & b == 0,
            Slot::Del => self.add & b == 0,
        }
    }

    pub fn toggle(&mut self, slot: Slot, atom: usize) {
        *self.get_mut(slot) ^= 1 << atom;
    }

    pub fn is_consistent(&self) -> bool {
        self.pre_pos & self.pre_neg == 0 && self.add & self.del == 0
    }
}

/// A full candidate domain: one model per operator, in schema order.
pub type Candidate = Vec<OpModel>;

/// The atoms in scope for each operator and their groundings per action.
#[derive(Debug, Clone)]
pub struct SchemaSpace {
    pub signature: Domain,
    /// Per schema, lifted atoms sorted by predicate then arguments.
    pub atoms: Vec<Vec<Atom>>,
    /// Per ground action, the proposition of each atom of its schema.
    pub action_props: Vec<Vec<PropId>>,
    pub action_schema: Vec<usize>,
}

fn param_tuples(n_params: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, arity: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        for p in 0..n {
            if !cur.contains(&p) {
                cur.push(p);
                rec(n, arity, cur, out);
                cur.pop();
            }
        }
    }
    rec(n_params, arity, &mut cur, &mut out);
    out
}

/// Every atom whose arguments are distinct parameters of `schema` with
/// compatible types, ordered by predicate then argument tuple.
pub fn scoped_atoms(domain: &Domain, schema: &ActionSchema) -> Result<Vec<Atom>, PddlError> {
    let types = domain.type_hierarchy()?;
    let mut list = Vec::new();
    for (pi, pred) in domain.predicates.iter().enumerate() {
        for args in param_tuples(schema.params.len(), pred.arity()) {
            let ok = args
                .iter()
                .zip(&pred.params)
                .all(|(&a, d)| types.is_subtype(&schema.params[a].ty, &d.ty));
            if ok {
                list.push(Atom { predicate: pi, args });
            }
        }
    }
    Ok(list)
}

impl SchemaSpace {
    pub fn new(domain: &Domain, g: &Grounding) -> Result<Self, LearnError> {
        let mut atoms = Vec::with_capacity(domain.schemas.len());
        for s in &domain.schemas {
            let list = scoped_atoms(domain, s)?;
            if list.len() > MAX_ATOMS {
                return Err(LearnError::TooManyAtoms {
                    operator: s.name.clone(),
                    atoms: list.len(),
                });
            }
            atoms.push(list);
        }
        let mut action_props = Vec::with_capacity(g.action_count());
        let mut action_schema = Vec::with_capacity(g.action_count());
        for a in &g.actions {
            let props = atoms[a.schema]
                .iter()
                .map(|atom| {
                    let ga = crate::pddl::GroundAtom {
                        predicate: atom.predicate,
                        args: atom.args.iter().map(|&p| a.args[p]).collect(),
                    };
                    g.prop_id(&ga).expect("type-compatible atom is grounded")
                })
                .collect();
            action_props.push(props);
            action_schema.push(a.schema);
        }
        Ok(SchemaSpace {
            signature: domain.signature(),
            atoms,
            action_props,
            action_schema,
        })
    }

    pub fn n_ops(&self) -> usize {
        self.atoms.len()
    }

    pub fn n_actions(&self) -> usize {
        self.action_props.len()
    }

    pub fn schema_of(&self, a: ActionId) -> usize {
        self.action_schema[a.index()]
    }

    pub fn props_of(&self, a: ActionId) -> &[PropId] {
        &self.action_props[a.index()]
    }

    /// Atom index of `p` in the scope of action `a`.
    pub fn atom_of(&self, a: ActionId, p: PropId) -> Option<usize> {
        self.action_props[a.index()].iter().position(|&q| q == p)
    }

    /// Observed-true and observed-false atoms of `a`'s scope.
    pub fn lift(&self, obs: &Observation, a: ActionId) -> (Mask, Mask) {
        let mut t = 0;
        let mut f = 0;
        for (k, &p) in self.action_props[a.index()].iter().enumerate() {
            match obs.get(p) {
                Some(true) => t |= 1 << k,
                Some(false) => f |= 1 << k,
                None => {}
            }
        }
        (t, f)
    }

    pub fn empty_candidate(&self) -> Candidate {
        vec![OpModel::default(); self.n_ops()]
    }

    pub fn to_domain(&self, c: &[OpModel]) -> Domain {
        let mut d = self.signature.clone();
        d.schemas = self
            .signature
            .schemas
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let atoms = &self.atoms[i];
                let m = &c[i];
                let mut pre = BTreeSet::new();
                for k in bits(m.pre_pos) {
                    pre.insert(Literal::pos(atoms[k].clone()));
                }
                for k in bits(m.pre_neg) {
                    pre.insert(Literal::neg(atoms[k].clone()));
                }
                ActionSchema {
                    name: s.name.clone(),
                    params: s.params.clone(),
                    preconditions: pre,
                    add_effects: bits(m.add).map(|k| atoms[k].clone()).collect(),
                    del_effects: bits(m.del).map(|k| atoms[k].clone()).collect(),
                }
            })
            .collect();
        d
    }

    /// Encodes a domain with the same operators. Fails if it mentions an atom
    /// outside an operator's scope.
    pub fn from_domain(&self, d: &Domain) -> Result<Candidate, LearnError> {
        let mut out = Vec::with_capacity(self.n_ops());
        for (i, s) in self.signature.schemas.iter().enumerate() {
            let src = d
                .schemas
                .iter()
                .find(|t| t.name == s.name)
                .ok_or_else(|| LearnError::MissingOperator(s.name.clone()))?;
            let idx = |atom: &Atom| -> Result<usize, LearnError> {
                self.atoms[i]
                    .iter()
                    .position(|a| a == atom)
                    .ok_or_else(|| LearnError::OutOfScope {
                        operator: s.name.clone(),
                        atom: d.display_atom(src, atom),
                    })
            };
            let mut m = OpModel::default();
            for l in &src.preconditions {
                let k = idx(&l.atom)?;
                if l.positive {
                    m.pre_pos |= 1 << k;
                } else {
                    m.pre_neg |= 1 << k;
                }
            }
            for a in &src.add_effects {
                m.add |= 1 << idx(a)?;
            }
            for a in &src.del_effects {
                m.del |= 1 << idx(a)?;
            }
            out.push(m);
        }
        Ok(out)
    }

    /// Human-readable name of an atom, e.g. `(at ?obj ?room)`.
    pub fn atom_name(&self, op: usize, k: usize) -> String {
        let s = &self.signature.schemas[op];
        self.signature.display_atom(s, &self.atoms[op][k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;
    use crate::learner::testing::{candidate, setup};
    use proptest::prelude::*;

    #[test]
    fn truth_domains_encode() {
        for f in Fixture::ALL {
            let d = f.domain();
            let o = crate::oracle::Oracle::new(d.clone(), f.problems().remove(0)).unwrap();
            let space = SchemaSpace::new(&d, &o.grounding).unwrap();
            let c = space.from_domain(&d).unwrap();
            assert_eq!(space.from_domain(&space.to_domain(&c)).unwrap(), c, "{}", f.name());
        }
    }

    #[test]
    fn gripper_scope_sizes() {
        let (space, ..) = setup(Fixture::Gripper, 1.0, 0.0);
        // move(?from ?to): at-robby x2
        // pick/drop(?obj ?room ?g): at, at-robby, carry, free
        let sizes: Vec<usize> = space.atoms.iter().map(|a| a.len()).collect();
        assert_eq!(sizes, [2, 4, 4]);
    }

    #[test]
    fn lift_splits_observation() {
        let f = Fixture::Gripper;
        let o = crate::oracle::Oracle::new(f.domain(), f.problems().remove(0)).unwrap();
        let space = SchemaSpace::new(&o.domain, &o.grounding).unwrap();
        let obs = Observation::full(&o.init);
        for a in o.grounding.action_ids() {
            let (t, fl) = space.lift(&obs, a);
            assert_eq!(t & fl, 0);
            assert_eq!((t | fl).count_ones() as usize, space.atoms[space.schema_of(a)].len());
        }
    }

    proptest! {
        #[test]
        fn domain_round_trip(raw in prop::collection::vec(any::<[u64; 4]>(), 4)) {
            let (space, ..) = setup(Fixture::Blocksworld, 1.0, 0.0);
            let c = candidate(&space, &raw);
            prop_assert_eq!(space.from_domain(&space.to_domain(&c)).unwrap(), c);
        }
    }
}
