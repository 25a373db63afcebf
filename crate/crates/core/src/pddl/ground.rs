use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{Domain, GroundAtom, Object, PddlError, TypeHierarchy};

/// Index of a ground proposition in a [`Grounding`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PropId(pub u32);

/// Index of a ground action in a [`Grounding`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionId(pub u32);

impl PropId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An operator instantiated with objects. The literal sets are resolved to
/// proposition ids of the owning [`Grounding`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAction {
    pub schema: usize,
    pub args: Vec<usize>,
    pub pre_pos: Vec<PropId>,
    pub pre_neg: Vec<PropId>,
    pub add: Vec<PropId>,
    pub del: Vec<PropId>,
}

/// All propositions and actions of a domain over a fixed object set.
///
/// Parameters bind pairwise distinct objects: `move(r1 r1)` or `on(a a)` are
/// never produced.
#[derive(Debug, Clone)]
pub struct Grounding {
    pub objects: Vec<Object>,
    pub props: Vec<GroundAtom>,
    pub actions: Vec<GroundAction>,
    predicate_names: Vec<String>,
    schema_names: Vec<String>,
    prop_index: HashMap<GroundAtom, PropId>,
}

/// All injective tuples drawn from the per-position candidate lists, in
/// lexicographic order.
fn injective_tuples(candidates: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn rec(candidates: &[Vec<usize>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == candidates.len() {
            out.push(cur.clone());
            return;
        }
        for &c in &candidates[cur.len()] {
            if !cur.contains(&c) {
                cur.push(c);
                rec(candidates, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(candidates, &mut Vec::new(), &mut out);
    out
}

/// Enumerates every type-consistent proposition and action of `domain` over `objects`.
pub fn ground(domain: &Domain, objects: &[Object]) -> Result<Grounding, PddlError> {
    let types = domain.type_hierarchy()?;
    for o in objects {
        types.check(&o.ty)?;
    }
    let of_type = |ty: &str| -> Vec<usize> {
        (0..objects.len())
            .filter(|&i| types.is_subtype(&objects[i].ty, ty))
            .collect()
    };

    let mut props = Vec::new();
    let mut prop_index = HashMap::new();
    for (pi, pred) in domain.predicates.iter().enumerate() {
        let cands: Vec<_> = pred.params.iter().map(|p| of_type(&p.ty)).collect();
        for args in injective_tuples(&cands) {
            let atom = GroundAtom { predicate: pi, args };
            prop_index.insert(atom.clone(), PropId(props.len() as u32));
            props.push(atom);
        }
    }

    let mut g = Grounding {
        objects: objects.to_vec(),
        props,
        actions: Vec::new(),
        predicate_names: domain.predicates.iter().map(|p| p.name.clone()).collect(),
        schema_names: domain.schemas.iter().map(|s| s.name.clone()).collect(),
        prop_index,
    };
    for (si, schema) in domain.schemas.iter().enumerate() {
        let cands: Vec<_> = schema.params.iter().map(|p| of_type(&p.ty)).collect();
        for args in injective_tuples(&cands) {
            let action = g.instantiate_action(domain, &types, si, args)?;
            g.actions.push(action);
        }
    }
    Ok(g)
}

impl Grounding {
    fn instantiate_action(
        &self,
        domain: &Domain,
        types: &TypeHierarchy,
        schema: usize,
        args: Vec<usize>,
    ) -> Result<GroundAction, PddlError> {
        let s = &domain.schemas[schema];
        let resolve = |atom: &super::Atom| -> Result<PropId, PddlError> {
            let ga = GroundAtom {
                predicate: atom.predicate,
                args: atom.args.iter().map(|&p| args[p]).collect(),
            };
            self.prop_index.get(&ga).copied().ok_or_else(|| {
                // Only reachable when a parameter type is wider than the
                // predicate argument type.
                let pred = &domain.predicates[atom.predicate];
                let (arg, decl) = ga
                    .args
                    .iter()
                    .zip(&pred.params)
                    .find(|(&o, d)| !types.is_subtype(&self.objects[o].ty, &d.ty))
                    .map(|(&o, d)| (o, d.ty.clone()))
                    .unwrap_or((ga.args[0], String::new()));
                PddlError::TypeMismatch {
                    predicate: pred.name.clone(),
                    argument: self.objects[arg].name.clone(),
                    expected: decl,
                    found: self.objects[arg].ty.clone(),
                }
            })
        };
        let collect = |it: &mut dyn Iterator<Item = &super::Atom>| -> Result<Vec<PropId>, PddlError> {
            let mut v = it.map(&resolve).collect::<Result<Vec<_>, _>>()?;
            v.sort();
            Ok(v)
        };
        Ok(GroundAction {
            schema,
            pre_pos: collect(&mut s.positive_preconditions())?,
            pre_neg: collect(&mut s.negative_preconditions())?,
            add: collect(&mut s.add_effects.iter())?,
            del: collect(&mut s.del_effects.iter())?,
            args,
        })
    }

    /// Re-derives every action's literal sets from another domain sharing this
    /// grounding's predicates and operator signatures.
    pub fn instantiate(&self, domain: &Domain) -> Result<Grounding, PddlError> {
        let types = domain.type_hierarchy()?;
        let mut g = Grounding {
            actions: Vec::with_capacity(self.actions.len()),
            ..self.clone()
        };
        g.schema_names = domain.schemas.iter().map(|s| s.name.clone()).collect();
        for a in &self.actions {
            let action = g.instantiate_action(domain, &types, a.schema, a.args.clone())?;
            g.actions.push(action);
        }
        Ok(g)
    }

    /// Keeps only the actions satisfying `keep`; ids are renumbered densely.
    pub fn retain_actions(&mut self, mut keep: impl FnMut(&GroundAction) -> bool) {
        self.actions.retain(|a| keep(a));
    }

    pub fn prop_count(&self) -> usize {
        self.props.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.index()]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn prop_id(&self, atom: &GroundAtom) -> Option<PropId> {
        self.prop_index.get(atom).copied()
    }

    pub fn schema_name(&self, schema: usize) -> &str {
        &self.schema_names[schema]
    }

    /// Looks up an action by schema index and bound objects.
    pub fn find_action(&self, schema: usize, args: &[usize]) -> Option<ActionId> {
        self.actions
            .iter()
            .position(|a| a.schema == schema && a.args == args)
            .map(|i| ActionId(i as u32))
    }

    pub fn state_of<'a>(&self, atoms: impl IntoIterator<Item = &'a GroundAtom>) -> GroundState {
        let mut s = GroundState::empty(self.props.len());
        for a in atoms {
            if let Some(p) = self.prop_id(a) {
                s.insert(p);
            }
        }
        s
    }

    /// `pred(obj,obj)` form used by the dataset text format.
    pub fn prop_label(&self, p: PropId) -> String {
        let atom = &self.props[p.index()];
        let args: Vec<_> = atom.args.iter().map(|&o| self.objects[o].name.as_str()).collect();
        format!("{}({})", self.predicate_names[atom.predicate], args.join(","))
    }

    /// `name(obj,obj)` form used by the dataset text format.
    pub fn action_label(&self, a: ActionId) -> String {
        let act = &self.actions[a.index()];
        let args: Vec<_> = act.args.iter().map(|&o| self.objects[o].name.as_str()).collect();
        format!("{}({})", self.schema_names[act.schema], args.join(","))
    }

    /// `(name obj obj)` form used by plan files.
    pub fn action_sexp(&self, a: ActionId) -> String {
        let act = &self.actions[a.index()];
        let mut s = format!("({}", self.schema_names[act.schema]);
        for &o in &act.args {
            s.push(' ');
            s.push_str(&self.objects[o].name);
        }
        s.push(')');
        s
    }

    /// Lookup tables from the labels above back to ids.
    pub fn label_index(&self) -> (HashMap<String, PropId>, HashMap<String, ActionId>) {
        let props = (0..self.props.len() as u32)
            .map(|i| (self.prop_label(PropId(i)), PropId(i)))
            .collect();
        let actions = self.action_ids().map(|a| (self.action_label(a), a)).collect();
        (props, actions)
    }
}

/// A world state: the set of true propositions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundState(FixedBitSet);

impl GroundState {
    pub fn empty(universe: usize) -> Self {
        GroundState(FixedBitSet::with_capacity(universe))
    }

    pub fn from_bits(bits: FixedBitSet) -> Self {
        GroundState(bits)
    }

    #[inline]
    pub fn contains(&self, p: PropId) -> bool {
        self.0.contains(p.index())
    }

    #[inline]
    pub fn insert(&mut self, p: PropId) {
        self.0.insert(p.index());
    }

    #[inline]
    pub fn remove(&mut self, p: PropId) {
        self.0.remove(p.index());
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = PropId> + '_ {
        self.0.ones().map(|i| PropId(i as u32))
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.0
    }
}

impl fmt::Display for GroundState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", p.0)?;
        }
        write!(f, "}}")
    }
}
