//! Effect and precondition refinement.

use std::collections::BTreeMap;

use super::mapping::Reduced;
use super::space::{bits, Candidate, SchemaSpace};
use crate::pddl::ActionId;

/// Upper bound on refinement passes.
pub const MAX_REFINE_PASSES: usize = 10;

/// For each pair of consecutive transitions `n -a-> n' -b-> n''`, makes sure
/// every precondition of `b` that `a` could affect holds after `a`: either
/// `a` produces it, or it held before `a` at `n` and `a` leaves it alone.
/// Missing effects are added to `a`. Returns a description of each edit.
pub fn refine_effects(c: &mut Candidate, space: &SchemaSpace, rm: &Reduced) -> Vec<String> {
    let mut outgoing: BTreeMap<usize, Vec<ActionId>> = BTreeMap::new();
    for &(n, a) in rm.keys() {
        outgoing.entry(n).or_default().push(a);
    }
    let mut edits = Vec::new();
    for (&(_, a), t) in rm {
        let oa = space.schema_of(a);
        for &b in outgoing.get(&t.target).map_or(&[][..], |v| v.as_slice()) {
            let ob = space.schema_of(b);
            let need = c[ob];
            for (k, positive) in bits(need.pre_pos)
                .map(|k| (k, true))
                .chain(bits(need.pre_neg).map(|k| (k, false)))
            {
                let p = space.props_of(b)[k];
                let Some(j) = space.atom_of(a, p) else { continue };
                let bit = 1u128 << j;
                let m = &mut c[oa];
                let held = if positive { t.ante.pos } else { t.ante.neg };
                let (produce, destroy) = if positive { (m.add, m.del) } else { (m.del, m.add) };
                if produce & bit != 0 || (held & bit != 0 && destroy & bit == 0) {
                    continue;
                }
                let name = space.atom_name(oa, j);
                let op = &space.signature.schemas[oa].name;
                if destroy & bit != 0 {
                    log::debug!("skip {op}: {name} would be both added and deleted");
                    continue;
                }
                if positive {
                    m.add |= bit;
                    edits.push(format!("{op}: add {name}"));
                } else if m.pre_neg & bit != 0 {
                    // deleting a proposition required to be false would be
                    // undone by precondition refinement
                    log::debug!("skip {op}: del {name} contradicts its precondition");
                } else {
                    m.del |= bit;
                    edits.push(format!("{op}: del {name}"));
                }
            }
        }
    }
    edits
}

/// Every deleted proposition becomes a positive precondition. If the
/// operator requires it to be false, the delete effect is dropped instead.
pub fn refine_preconditions(c: &mut Candidate, space: &SchemaSpace) -> Vec<String> {
    let mut edits = Vec::new();
    for (o, m) in c.iter_mut().enumerate() {
        let op = &space.signature.schemas[o].name;
        for k in bits(m.del & !m.pre_pos) {
            let bit = 1u128 << k;
            let name = space.atom_name(o, k);
            if m.pre_neg & bit != 0 {
                m.del &= !bit;
                edits.push(format!("{op}: drop del {name}"));
            } else {
                m.pre_pos |= bit;
                edits.push(format!("{op}: pre {name}"));
            }
        }
    }
    edits
}

/// Alternates both refinements until neither changes anything. Returns the
/// number of passes, counting the final one that confirmed the fixpoint.
pub fn refine_fixpoint(c: &mut Candidate, space: &SchemaSpace, rm: &Reduced) -> (usize, Vec<String>) {
    let mut all = Vec::new();
    for pass in 1..=MAX_REFINE_PASSES {
        let mut edits = refine_effects(c, space, rm);
        edits.extend(refine_preconditions(c, space));
        if edits.is_empty() {
            return (pass, all);
        }
        all.extend(edits);
    }
    log::warn!("refinement did not settle within {MAX_REFINE_PASSES} passes");
    (MAX_REFINE_PASSES, all)
}
