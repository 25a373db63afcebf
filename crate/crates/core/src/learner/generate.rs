//! Operators read off the reduced mapping.

use super::mapping::Reduced;
use super::space::{Candidate, OpModel, SchemaSpace};

/// Preconditions and effects from consensus literals. A literal is kept if
/// every transition of the operator that observed it agrees and at least one
/// did. Returns the candidate and, per operator, whether it was ever seen.
pub fn generate_operators(space: &SchemaSpace, rm: &Reduced) -> (Candidate, Vec<bool>) {
    let n = space.n_ops();
    let mut support = vec![OpModel::default(); n];
    let mut veto = vec![OpModel::default(); n];
    let mut seen = vec![false; n];
    for (&(_, a), t) in rm {
        let o = space.schema_of(a);
        seen[o] = true;
        let (ante, post) = (&t.ante, &t.post);
        let s = &mut support[o];
        s.pre_pos |= ante.pos;
        s.pre_neg |= ante.neg;
        s.del |= ante.pos & post.neg;
        s.add |= ante.neg & post.pos;
        let v = &mut veto[o];
        v.pre_pos |= ante.neg | ante.conflict;
        v.pre_neg |= ante.pos | ante.conflict;
        v.del |= ante.neg | ante.conflict | post.pos | post.conflict;
        v.add |= ante.pos | ante.conflict | post.neg | post.conflict;
    }
    let c = support
        .iter()
        .zip(&veto)
        .map(|(s, v)| OpModel {
            pre_pos: s.pre_pos & !v.pre_pos,
            pre_neg: s.pre_neg & !v.pre_neg,
            add: s.add & !v.add,
            del: s.del & !v.del,
        })
        .collect();
    (c, seen)
}
