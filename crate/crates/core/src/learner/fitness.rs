//! Scoring candidate domains against the training data.

use serde::{Deserialize, Serialize};

use super::space::{bits, Candidate, SchemaSpace};
use crate::dataset::{NegativeSample, PositiveSample};
use crate::pddl::ActionId;

const WORD: usize = usize::BITS as usize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FitnessScore {
    pub j_rho: i64,
    pub j_eps: i64,
    pub j_plus: i64,
    pub j_minus: i64,
}

impl FitnessScore {
    pub fn total(&self) -> i64 {
        self.j_rho + self.j_eps + self.j_plus + self.j_minus
    }
}

struct Sample {
    actions: Vec<ActionId>,
    /// `(actions.len() + 1) * words` words each.
    known: Vec<usize>,
    value: Vec<usize>,
    /// `(prefix length, failing action)` of negatives rooted here, by length.
    negatives: Vec<(usize, ActionId)>,
}

/// Precomputed view of a dataset for repeated scoring.
///
/// * `J_rho`: for every action firing, +1 per precondition literal the
///   observed state satisfies and -1 per literal it contradicts.
/// * `J_eps`: for every step, the state before (observed values, simulated
///   ones where unobserved) is pushed through the candidate's effects and
///   compared with the next observation: +1 per agreeing, -1 per disagreeing
///   proposition.
/// * `J_plus`: the length of every positive sample the candidate can execute
///   from the estimated initial state.
/// * `J_minus`: +1 per negative sample whose prefix the candidate executes
///   and whose last action it definitely refuses.
///
/// Simulation starts from a per-proposition majority vote over the initial
/// observations and propagates unknown values; an unknown precondition
/// literal counts as satisfied.
pub struct FitnessData {
    words: usize,
    s0_known: Vec<usize>,
    s0_value: Vec<usize>,
    samples: Vec<Sample>,
    /// Per operator and atom: satisfied minus contradicted count of the
    /// positive literal over all firings.
    rho: Vec<Vec<i64>>,
}

#[inline]
fn get(words: &[usize], p: usize) -> bool {
    words[p / WORD] >> (p % WORD) & 1 == 1
}

#[inline]
fn put(known: &mut [usize], value: &mut [usize], p: usize, v: bool) {
    let (w, b) = (p / WORD, 1usize << (p % WORD));
    known[w] |= b;
    if v {
        value[w] |= b;
    } else {
        value[w] &= !b;
    }
}

/// Ground literal lists of a candidate, flattened per action.
struct Grounded {
    offsets: Vec<[u32; 5]>,
    props: Vec<u32>,
}

impl Grounded {
    fn new(space: &SchemaSpace, c: &Candidate) -> Self {
        let mut offsets = Vec::with_capacity(space.n_actions());
        let mut props = Vec::new();
        for a in 0..space.n_actions() {
            let m = c[space.action_schema[a]];
            let ap = &space.action_props[a];
            let mut off = [0u32; 5];
            for (i, mask) in [m.pre_pos, m.pre_neg, m.add, m.del].into_iter().enumerate() {
                off[i] = props.len() as u32;
                props.extend(bits(mask).map(|k| ap[k].0));
            }
            off[4] = props.len() as u32;
            offsets.push(off);
        }
        Grounded { offsets, props }
    }

    #[inline]
    fn slice(&self, a: ActionId, i: usize) -> &[u32] {
        let o = &self.offsets[a.index()];
        &self.props[o[i] as usize..o[i + 1] as usize]
    }

    /// True if the state definitely violates a precondition of `a`.
    #[inline]
    fn refuses(&self, a: ActionId, known: &[usize], value: &[usize]) -> bool {
        self.slice(a, 0)
            .iter()
            .any(|&p| get(known, p as usize) && !get(value, p as usize))
            || self
                .slice(a, 1)
                .iter()
                .any(|&p| get(known, p as usize) && get(value, p as usize))
    }

    #[inline]
    fn apply(&self, a: ActionId, known: &mut [usize], value: &mut [usize]) {
        for &p in self.slice(a, 2) {
            put(known, value, p as usize, true);
        }
        for &p in self.slice(a, 3) {
            put(known, value, p as usize, false);
        }
    }
}

impl FitnessData {
    pub fn new(
        space: &SchemaSpace,
        positives: &[PositiveSample],
        negatives: &[NegativeSample],
        n_props: usize,
    ) -> Self {
        let words = n_props.div_ceil(WORD).max(1);
        let mut t_count = vec![0u32; n_props];
        let mut f_count = vec![0u32; n_props];
        for p in positives {
            let o = &p.observations[0];
            for i in o.known().ones() {
                if o.values().contains(i) {
                    t_count[i] += 1;
                } else {
                    f_count[i] += 1;
                }
            }
        }
        let mut s0_known = vec![0; words];
        let mut s0_value = vec![0; words];
        for i in 0..n_props {
            if t_count[i] != f_count[i] {
                put(&mut s0_known, &mut s0_value, i, t_count[i] > f_count[i]);
            }
        }

        let mut rho: Vec<Vec<i64>> = space.atoms.iter().map(|a| vec![0; a.len()]).collect();
        let mut samples: Vec<Sample> = positives
            .iter()
            .map(|p| {
                let mut known = vec![0; words * p.observations.len()];
                let mut value = vec![0; words * p.observations.len()];
                for (t, o) in p.observations.iter().enumerate() {
                    let (ks, vs) = (o.known().as_slice(), o.values().as_slice());
                    known[t * words..t * words + ks.len().min(words)].copy_from_slice(&ks[..ks.len().min(words)]);
                    value[t * words..t * words + vs.len().min(words)].copy_from_slice(&vs[..vs.len().min(words)]);
                }
                for (t, &a) in p.actions.iter().enumerate() {
                    let o = &p.observations[t];
                    let row = &mut rho[space.schema_of(a)];
                    for (k, &prop) in space.props_of(a).iter().enumerate() {
                        match o.get(prop) {
                            Some(true) => row[k] += 1,
                            Some(false) => row[k] -= 1,
                            None => {}
                        }
                    }
                }
                Sample {
                    actions: p.actions.clone(),
                    known,
                    value,
                    negatives: Vec::new(),
                }
            })
            .collect();
        for n in negatives {
            samples[n.origin].negatives.push((n.actions.len() - 1, n.last()));
        }
        for s in &mut samples {
            s.negatives.sort();
        }
        FitnessData {
            words,
            s0_known,
            s0_value,
            samples,
            rho,
        }
    }

    pub fn score(&self, space: &SchemaSpace, c: &Candidate) -> FitnessScore {
        let g = Grounded::new(space, c);
        let w = self.words;
        let mut score = FitnessScore::default();
        for (o, m) in c.iter().enumerate() {
            let row = &self.rho[o];
            score.j_rho += bits(m.pre_pos).map(|k| row[k]).sum::<i64>();
            score.j_rho -= bits(m.pre_neg).map(|k| row[k]).sum::<i64>();
        }

        let mut sk = vec![0usize; w];
        let mut sv = vec![0usize; w];
        let mut pk = vec![0usize; w];
        let mut pv = vec![0usize; w];
        for s in &self.samples {
            sk.copy_from_slice(&self.s0_known);
            sv.copy_from_slice(&self.s0_value);
            let mut accepted = true;
            let mut negs = s.negatives.iter().peekable();
            let len = s.actions.len();
            for t in 0..=len {
                while let Some(&&(step, last)) = negs.peek() {
                    if step != t {
                        break;
                    }
                    negs.next();
                    if accepted && g.refuses(last, &sk, &sv) {
                        score.j_minus += 1;
                    }
                }
                if t == len {
                    break;
                }
                let a = s.actions[t];
                if accepted && g.refuses(a, &sk, &sv) {
                    accepted = false;
                }
                let ok = &s.known[t * w..(t + 1) * w];
                let ov = &s.value[t * w..(t + 1) * w];
                for i in 0..w {
                    pk[i] = ok[i] | sk[i];
                    pv[i] = (ov[i] & ok[i]) | (sv[i] & !ok[i]);
                }
                g.apply(a, &mut pk, &mut pv);
                let nk = &s.known[(t + 1) * w..(t + 2) * w];
                let nv = &s.value[(t + 1) * w..(t + 2) * w];
                for i in 0..w {
                    let mask = nk[i] & pk[i];
                    let diff = ((pv[i] ^ nv[i]) & mask).count_ones() as i64;
                    score.j_eps += mask.count_ones() as i64 - 2 * diff;
                }
                g.apply(a, &mut sk, &mut sv);
            }
            if accepted {
                score.j_plus += len as i64;
            }
        }
        score
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;
    use crate::learner::space::Mask;
    use crate::learner::testing::{candidate, setup};
    use proptest::prelude::*;

    type State = Vec<Option<bool>>;

    /// Direct transcription of the score definitions over `Option<bool>` states.
    fn naive(
        space: &SchemaSpace,
        c: &Candidate,
        pos: &[PositiveSample],
        neg: &[NegativeSample],
        n: usize,
    ) -> FitnessScore {
        let lits = |a: ActionId, m: Mask| -> Vec<usize> { bits(m).map(|k| space.props_of(a)[k].index()).collect() };
        let model = |a: ActionId| c[space.schema_of(a)];
        let refuses = |a: ActionId, s: &State| {
            let m = model(a);
            lits(a, m.pre_pos).iter().any(|&p| s[p] == Some(false))
                || lits(a, m.pre_neg).iter().any(|&p| s[p] == Some(true))
        };
        let apply = |a: ActionId, s: &mut State| {
            let m = model(a);
            for p in lits(a, m.add) {
                s[p] = Some(true);
            }
            for p in lits(a, m.del) {
                s[p] = Some(false);
            }
        };
        let mut s0: State = vec![None; n];
        for (p, slot) in s0.iter_mut().enumerate() {
            let t = pos
                .iter()
                .filter(|x| x.observations[0].get(crate::pddl::PropId(p as u32)) == Some(true))
                .count();
            let f = pos
                .iter()
                .filter(|x| x.observations[0].get(crate::pddl::PropId(p as u32)) == Some(false))
                .count();
            if t != f {
                *slot = Some(t > f);
            }
        }
        let obs = |o: &crate::oracle::Observation| -> State {
            (0..n).map(|p| o.get(crate::pddl::PropId(p as u32))).collect()
        };
        let executes = |seq: &[ActionId]| -> Option<State> {
            let mut s = s0.clone();
            for &a in seq {
                if refuses(a, &s) {
                    return None;
                }
                apply(a, &mut s);
            }
            Some(s)
        };

        let mut out = FitnessScore::default();
        for x in pos {
            let mut sim = s0.clone();
            for (t, &a) in x.actions.iter().enumerate() {
                let before = obs(&x.observations[t]);
                let m = model(a);
                for p in lits(a, m.pre_pos) {
                    out.j_rho += match before[p] {
                        Some(true) => 1,
                        Some(false) => -1,
                        None => 0,
                    };
                }
                for p in lits(a, m.pre_neg) {
                    out.j_rho += match before[p] {
                        Some(false) => 1,
                        Some(true) => -1,
                        None => 0,
                    };
                }
                let mut prev: State = (0..n).map(|p| before[p].or(sim[p])).collect();
                apply(a, &mut prev);
                let after = obs(&x.observations[t + 1]);
                for p in 0..n {
                    if let (Some(u), Some(v)) = (prev[p], after[p]) {
                        out.j_eps += if u == v { 1 } else { -1 };
                    }
                }
                apply(a, &mut sim);
            }
            if executes(&x.actions).is_some() {
                out.j_plus += x.actions.len() as i64;
            }
        }
        for x in neg {
            if let Some(s) = executes(x.prefix()) {
                if refuses(x.last(), &s) {
                    out.j_minus += 1;
                }
            }
        }
        out
    }

    #[test]
    fn truth_scores_positive_and_executes_everything() {
        let (space, pos, neg, n) = setup(Fixture::Gripper, 1.0, 0.0);
        let f = Fixture::Gripper;
        let truth = space.from_domain(&f.domain()).unwrap();
        let data = FitnessData::new(&space, &pos, &neg, n);
        let s = data.score(&space, &truth);
        assert_eq!(s, naive(&space, &truth, &pos, &neg, n));
        let steps: i64 = pos.iter().map(|p| p.actions.len() as i64).sum();
        assert_eq!(s.j_plus, steps);
        assert_eq!(s.j_minus, neg.len() as i64);
    }

    #[test]
    fn empty_candidate_scores_zero_precondition_terms() {
        let (space, pos, neg, n) = setup(Fixture::Gripper, 1.0, 0.0);
        let data = FitnessData::new(&space, &pos, &neg, n);
        let s = data.score(&space, &space.empty_candidate());
        assert_eq!(s.j_rho, 0);
        assert_eq!(s.j_minus, 0);
        assert_eq!(s.j_plus, pos.iter().map(|p| p.actions.len() as i64).sum::<i64>());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_naive_scoring(raw in prop::collection::vec(any::<[u64; 4]>(), 3), obs in 0.2f64..=1.0, noise in 0.0f64..0.3) {
            let (space, pos, neg, n) = setup(Fixture::Gripper, obs, noise);
            let c = candidate(&space, &raw);
            let data = FitnessData::new(&space, &pos, &neg, n);
            prop_assert_eq!(data.score(&space, &c), naive(&space, &c, &pos, &neg, n));
        }
    }
}
