//! Exhaustive and seeded random generation of small posets, full frames and
//! BAOs.
//!
//! Isomorphism classes are separated by a canonical code: the least value of
//! the relabelled adjacency bit-string over all permutations. That is exact
//! and fast enough at the sizes handled here (at most 720 permutations).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bao::{subalgebra, FiniteBAO};
use crate::bits::StateSet;
use crate::error::{Error, Result};
use crate::frame::{box_set, condition_holds, Condition, FinitePoset, Frame, Relation};

/// Largest poset size `enumerate_posets` accepts.
pub const MAX_ENUM_POSET: usize = 6;
/// Largest value of `states² × indices` for exhaustive frame enumeration.
pub const MAX_FRAME_RELATION_BITS: usize = 18;
/// Largest atom count for exhaustive BAO enumeration.
pub const MAX_ENUM_ATOMS: usize = 3;

/// Every permutation of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // Next lexicographic permutation.
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Packs a family of `n` sets into one word, row `k` at bits `k*n..`.
fn pack(rows: impl Iterator<Item = StateSet>, n: usize) -> u64 {
    rows.enumerate().fold(0, |acc, (k, s)| acc | s.0 << (k * n))
}

/// The rows of `sets` after renaming state `s` to `perm[s]`.
fn permuted_code(sets: &[StateSet], perm: &[usize]) -> u64 {
    let n = sets.len();
    let mut rows = vec![StateSet::EMPTY; n];
    for (old, &s) in sets.iter().enumerate() {
        rows[perm[old]] = s.map(|y| perm[y]);
    }
    pack(rows.into_iter(), n)
}

/// Canonical code of a poset and a permutation attaining it.
pub fn poset_canonical(p: &FinitePoset) -> (u64, Vec<usize>) {
    let mut best: Option<(u64, Vec<usize>)> = None;
    for perm in permutations(p.n()) {
        let code = permuted_code(p.down_sets(), &perm);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            best = Some((code, perm));
        }
    }
    best.expect("at least one permutation")
}

/// Order automorphisms of a poset, each as a map old state to new state.
pub fn automorphisms(p: &FinitePoset) -> Vec<Vec<usize>> {
    let own = permuted_code(p.down_sets(), &(0..p.n()).collect::<Vec<_>>());
    permutations(p.n())
        .into_iter()
        .filter(|perm| permuted_code(p.down_sets(), perm) == own)
        .collect()
}

/// Naturally labelled posets on `0..n` (every state above only smaller
/// ones), one per labelled structure. Each isomorphism class occurs at least
/// once, since every poset has a linear extension.
fn natural_posets(n: usize) -> Vec<Vec<StateSet>> {
    let mut layer: Vec<Vec<StateSet>> = vec![Vec::new()];
    for x in 0..n {
        let mut next = Vec::new();
        for downs in &layer {
            for below in StateSet::full(x).subsets() {
                // Keep only down-closed choices of strict lower bounds.
                let closed = below.iter().all(|y| downs[y].is_subset(below));
                if closed {
                    let mut d = downs.clone();
                    d.push(below | StateSet::singleton(x));
                    next.push(d);
                }
            }
        }
        layer = next;
    }
    layer
}

/// One poset per isomorphism class of `n`-element posets, each labelled by
/// its canonical permutation, in increasing order of canonical code.
pub fn enumerate_posets(n: usize) -> Result<Vec<FinitePoset>> {
    if n > MAX_ENUM_POSET {
        return Err(Error::CapExceeded(format!(
            "poset enumeration supports at most {MAX_ENUM_POSET} states, asked for {n}"
        )));
    }
    let mut classes: BTreeMap<u64, FinitePoset> = BTreeMap::new();
    for downs in natural_posets(n) {
        let p = FinitePoset::from_down_sets(downs)?;
        let (code, perm) = poset_canonical(&p);
        classes.entry(code).or_insert_with(|| p.relabel(&perm));
    }
    Ok(classes.into_values().collect())
}

/// States of `p` listed so that every state comes after its proper
/// refinements.
fn refinements_first(p: &FinitePoset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.n()).collect();
    order.sort_by_key(|&x| (p.down(x).len(), x));
    order
}

/// Every relation on `p` satisfying R-rule and R⇒win, in the order of a
/// depth-first search over successor sets. R-rule is checked state by state
/// as soon as a state and all of its refinements have their successors
/// fixed; R⇒win is checked on complete relations.
pub fn full_frame_relations(p: &FinitePoset) -> Vec<Relation> {
    let n = p.n();
    let order = refinements_first(p);
    let mut succ = vec![StateSet::EMPTY; n];
    let mut out = Vec::new();
    extend_relation(p, &order, 0, &mut succ, &mut out);
    out
}

fn extend_relation(
    p: &FinitePoset,
    order: &[usize],
    k: usize,
    succ: &mut Vec<StateSet>,
    out: &mut Vec<Relation>,
) {
    if k == order.len() {
        let r = Relation::from_succ(succ.clone());
        if condition_holds(p, &r, Condition::RWin) {
            out.push(r);
        }
        return;
    }
    let x = order[k];
    for s in p.states().subsets() {
        succ[x] = s;
        if r_rule_at(p, succ, x) {
            extend_relation(p, order, k + 1, succ, out);
        }
    }
    succ[x] = StateSet::EMPTY;
}

/// The R-rule instances whose outer state is `x`.
fn r_rule_at(p: &FinitePoset, succ: &[StateSet], x: usize) -> bool {
    let good = p.closure(p.down_set(succ[x]));
    p.down(x)
        .iter()
        .all(|xp| succ[xp].iter().all(|yp| p.compat(yp).is_subset(good)))
}

fn relation_bits_check(n: usize, k: usize) -> Result<()> {
    if n * n * k.max(1) > MAX_FRAME_RELATION_BITS {
        return Err(Error::CapExceeded(format!(
            "exhaustive frame enumeration over {n} states and {k} indices"
        )));
    }
    Ok(())
}

/// Canonical code of a relation tuple under a group of permutations, with
/// the first permutation attaining it.
fn tuple_canonical<'g>(rels: &[&Relation], group: &'g [Vec<usize>]) -> (Vec<u64>, &'g [usize]) {
    group
        .iter()
        .map(|perm| {
            let code: Vec<u64> = rels.iter().map(|r| permuted_code(r.succ_sets(), perm)).collect();
            (code, perm.as_slice())
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("nonempty group")
}

/// Full possibility frames with `n` states and the given indices, one per
/// isomorphism class. Frames over the same poset are ordered by canonical
/// code; posets follow [`enumerate_posets`].
pub fn enumerate_full_frames(n: usize, indices: &[&str]) -> Result<Vec<Frame>> {
    enumerate_full_frames_where(n, indices, |_, _| true)
}

/// As [`enumerate_full_frames`], keeping only relations accepted by `keep`
/// for every index. Filtering before pairing relations makes multi-index
/// enumeration of a subclass (say, standard frames) much cheaper.
pub fn enumerate_full_frames_where(
    n: usize,
    indices: &[&str],
    keep: impl Fn(&FinitePoset, &Relation) -> bool,
) -> Result<Vec<Frame>> {
    relation_bits_check(n, indices.len())?;
    let mut idx: Vec<&str> = indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    let mut out = Vec::new();
    for p in enumerate_posets(n)? {
        let rels: Vec<Relation> = full_frame_relations(&p).into_iter().filter(|r| keep(&p, r)).collect();
        let group = automorphisms(&p);
        let mut seen: BTreeMap<Vec<u64>, Vec<Relation>> = BTreeMap::new();
        let mut choice = vec![0usize; idx.len()];
        if !rels.is_empty() || idx.is_empty() {
            loop {
                let tuple: Vec<&Relation> = choice.iter().map(|&c| &rels[c]).collect();
                let (code, perm) = tuple_canonical(&tuple, &group);
                seen.entry(code)
                    .or_insert_with(|| tuple.iter().map(|r| r.relabel(perm)).collect());
                if !odometer(&mut choice, rels.len()) {
                    break;
                }
            }
        }
        for tuple in seen.into_values() {
            let map = idx.iter().map(|i| i.to_string()).zip(tuple).collect();
            out.push(Frame::full(p.clone(), map)?);
        }
    }
    Ok(out)
}

/// Advances a little-endian odometer; false once it wraps around.
fn odometer(choice: &mut [usize], base: usize) -> bool {
    for c in choice.iter_mut().rev() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

/// Every relation on `m` points, in increasing order of packed successor
/// rows.
fn all_relations(m: usize) -> impl Iterator<Item = Relation> {
    (0u64..1 << (m * m)).map(move |code| {
        let mask = StateSet::full(m).0;
        Relation::from_succ((0..m).map(|a| StateSet(code >> (a * m) & mask)).collect())
    })
}

/// BAOs on the powerset of `m` atoms, one per isomorphism class.
///
/// A normal multiplicative operator on a finite powerset is fixed by its
/// values on the coatoms, and those values may be chosen freely; reading
/// `■(S∖{a})` as the complement of the `a`-th row of a relation turns
/// every operator into a complex algebra, so classes of operators are
/// classes of relation tuples under renaming the atoms.
pub fn enumerate_baos(m: usize, indices: &[&str]) -> Result<Vec<FiniteBAO>> {
    if m > MAX_ENUM_ATOMS {
        return Err(Error::CapExceeded(format!(
            "exhaustive BAO enumeration supports at most {MAX_ENUM_ATOMS} atoms, asked for {m}"
        )));
    }
    let mut idx: Vec<&str> = indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    let rels: Vec<Relation> = all_relations(m).collect();
    let group = permutations(m);
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut choice = vec![0usize; idx.len()];
    loop {
        let tuple: Vec<&Relation> = choice.iter().map(|&c| &rels[c]).collect();
        let (code, _) = tuple_canonical(&tuple, &group);
        // Relation tuples are visited in increasing code order, so the first
        // member of each class is the canonical one.
        if seen.insert(code) {
            let map = idx
                .iter()
                .map(|i| i.to_string())
                .zip(tuple.iter().map(|&r| r.clone()))
                .collect();
            out.push(FiniteBAO::complex_algebra(m, &map)?);
        }
        if !odometer(&mut choice, rels.len()) {
            break;
        }
    }
    Ok(out)
}

/// Parameters for [`random_frame`].
#[derive(Clone, Debug, PartialEq)]
pub struct RandomFrameParams {
    pub states: usize,
    pub indices: Vec<String>,
    /// Chance of each pair in a sampled relation.
    pub density: f64,
    /// Admissible family: all regular open sets, or a random subalgebra of
    /// them closed under the box operators.
    pub full: bool,
    /// Sampled relations tried before falling back to a constructed one.
    pub attempts: usize,
}

impl Default for RandomFrameParams {
    fn default() -> Self {
        RandomFrameParams {
            states: 4,
            indices: vec!["i".to_string()],
            density: 0.35,
            full: true,
            attempts: 64,
        }
    }
}

/// A random poset: each new state is put above a random down-closed set of
/// earlier ones, then the labels are shuffled.
fn random_poset(rng: &mut ChaCha8Rng, n: usize) -> Result<FinitePoset> {
    let mut down: Vec<StateSet> = Vec::with_capacity(n);
    for x in 0..n {
        let mut below = StateSet::EMPTY;
        for y in 0..x {
            if rng.gen_bool(0.4) {
                below |= down[y];
            }
        }
        down.push(below | StateSet::singleton(x));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Ok(FinitePoset::from_down_sets(down)?.relabel(&perm))
}

/// A relation under which `■` keeps every set regular open: each minimal
/// state gets a random regular open successor set, and every other state
/// sees the regular open join of what the minimal states below it see.
/// `■X` is then the regular open set generated by the minimal states whose
/// successors lie inside `X`.
fn constructed_relation(rng: &mut ChaCha8Rng, p: &FinitePoset) -> Result<Relation> {
    let ro = p.regular_opens()?;
    let mut seen = vec![StateSet::EMPTY; p.n()];
    for a in p.minimal().iter() {
        seen[a] = ro[rng.gen_range(0..ro.len())];
    }
    let succ = (0..p.n())
        .map(|x| {
            let raw = (p.down(x) & p.minimal()).iter().fold(StateSet::EMPTY, |acc, a| acc | seen[a]);
            p.ro_hull(raw)
        })
        .collect();
    Ok(Relation::from_succ(succ))
}

fn sampled_relation(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Relation {
    let mut r = Relation::empty(n);
    for x in 0..n {
        for y in 0..n {
            if rng.gen_bool(density) {
                r.insert(x, y);
            }
        }
    }
    r
}

fn is_full_frame_relation(p: &FinitePoset, r: &Relation) -> bool {
    condition_holds(p, r, Condition::RRule) && condition_holds(p, r, Condition::RWin)
}

/// A random possibility frame, the same for the same seed and parameters.
pub fn random_frame(seed: u64, params: &RandomFrameParams) -> Result<Frame> {
    let n = params.states;
    if n == 0 || n > MAX_ENUM_POSET + 2 {
        return Err(Error::CapExceeded(format!("random frames need 1..=8 states, asked for {n}")));
    }
    if !(0.0..=1.0).contains(&params.density) {
        return Err(Error::Precondition(format!("density {} outside [0, 1]", params.density)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_poset(&mut rng, n)?;
    let mut rels = BTreeMap::new();
    for i in &params.indices {
        let sampled = (0..params.attempts)
            .map(|_| sampled_relation(&mut rng, n, params.density))
            .find(|r| is_full_frame_relation(&p, r));
        let r = match sampled {
            Some(r) => r,
            None => constructed_relation(&mut rng, &p)?,
        };
        rels.insert(i.clone(), r);
    }
    let full = Frame::full(p.clone(), rels.clone())?;
    if params.full {
        return Ok(full);
    }
    let ro = full.props().to_vec();
    let seeds: Vec<StateSet> = (0..rng.gen_range(0..=2)).map(|_| ro[rng.gen_range(0..ro.len())]).collect();
    Frame::new(p, rels.clone(), close_family(&full, &rels, &seeds))
}

/// The least family containing `seeds` and `∅` and closed under `∩`, `⊃`
/// and every `■ᵢ`, computed inside a full frame.
fn close_family(full: &Frame, rels: &BTreeMap<String, Relation>, seeds: &[StateSet]) -> Vec<StateSet> {
    let mut have: BTreeSet<StateSet> = seeds.iter().copied().collect();
    have.insert(StateSet::EMPTY);
    loop {
        let cur: Vec<StateSet> = have.iter().copied().collect();
        let mut next = have.clone();
        for &x in &cur {
            for r in rels.values() {
                next.insert(box_set(r, x));
            }
            for &y in &cur {
                next.insert(x & y);
                next.insert(full.imp_set(x, y));
            }
        }
        if next.len() == have.len() {
            return have.into_iter().collect();
        }
        have = next;
    }
}

/// Parameters for [`random_bao`].
#[derive(Clone, Debug, PartialEq)]
pub struct RandomBaoParams {
    pub atoms: usize,
    pub indices: Vec<String>,
    pub density: f64,
    /// Whether to pass to the subalgebra generated by a few random elements.
    pub subalgebra: bool,
}

impl Default for RandomBaoParams {
    fn default() -> Self {
        RandomBaoParams {
            atoms: 3,
            indices: vec!["i".to_string()],
            density: 0.4,
            subalgebra: false,
        }
    }
}

/// A random finite BAO: the complex algebra of a random relation on the
/// atoms, optionally cut down to a random subalgebra.
pub fn random_bao(seed: u64, params: &RandomBaoParams) -> Result<FiniteBAO> {
    let m = params.atoms;
    if m > 10 {
        return Err(Error::CapExceeded(format!("random BAOs support at most 10 atoms, asked for {m}")));
    }
    if !(0.0..=1.0).contains(&params.density) {
        return Err(Error::Precondition(format!("density {} outside [0, 1]", params.density)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rels = params
        .indices
        .iter()
        .map(|i| (i.clone(), sampled_relation(&mut rng, m, params.density)))
        .collect();
    let b = FiniteBAO::complex_algebra(m, &rels)?;
    if !params.subalgebra {
        return Ok(b);
    }
    let seeds: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..b.len())).collect();
    subalgebra(&b, &seeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_count_and_order() {
        let ps = permutations(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0], vec![0, 1, 2]);
        assert_eq!(ps[5], vec![2, 1, 0]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn small_poset_counts() {
        let counts: Vec<usize> = (0..=4).map(|n| enumerate_posets(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16]);
        assert!(matches!(enumerate_posets(7), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn one_state_frames() {
        let fs = enumerate_full_frames(1, &["i"]).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(fs[0].rel("i").unwrap().is_empty());
        assert!(fs[1].rel("i").unwrap().contains(0, 0));
    }

    #[test]
    fn one_atom_baos() {
        let bs = enumerate_baos(1, &["i"]).unwrap();
        assert_eq!(bs.len(), 2);
        assert!(matches!(enumerate_baos(4, &["i"]), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn random_frame_is_deterministic() {
        let params = RandomFrameParams::default();
        assert_eq!(random_frame(7, &params).unwrap(), random_frame(7, &params).unwrap());
    }
}
