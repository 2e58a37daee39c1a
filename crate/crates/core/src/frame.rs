//! Finite possibility frames.
//!
//! A frame is a finite poset of partial states (`x ⊑ y` reads "x refines y"),
//! one accessibility relation per modal index, and a family `P` of admissible
//! propositions. This module holds the regular-open machinery, the
//! accessibility/refinement interplay conditions, frame validation and the
//! frame-class predicates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::bits::{StateSet, MAX_STATES};
use crate::error::{Error, Result};
pub use crate::report::{CheckReport, Witness};

/// Largest number of minimal points for which the regular opens are listed
/// explicitly (the family has `2^k` members).
pub const RO_LISTING_CAP: usize = 20;

/// A finite partial order on `0..n`.
///
/// Only the order itself is stored, as principal down-sets and up-sets, plus
/// the compatibility sets `{z | ↓z ∩ ↓x ≠ ∅}` that most quantifier blocks need.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    n: usize,
    down: Vec<StateSet>,
    up: Vec<StateSet>,
    compat: Vec<StateSet>,
}

impl FinitePoset {
    /// Builds a poset from `(x, y)` pairs meaning `x ⊑ y`.
    ///
    /// Reflexive pairs are added. The transitive closure is not taken: a
    /// family of pairs that is not already transitive is rejected.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<FinitePoset> {
        if n > MAX_STATES {
            return Err(Error::TooManyStates(n));
        }
        let mut down: Vec<StateSet> = (0..n).map(StateSet::singleton).collect();
        for &(x, y) in pairs {
            for s in [x, y] {
                if s >= n {
                    return Err(Error::StateOutOfRange { state: s, n });
                }
            }
            down[y].insert(x);
        }
        FinitePoset::from_down_sets(down)
    }

    /// Builds a poset from its principal down-sets (`down[y]` lists every `x ⊑ y`).
    pub fn from_down_sets(mut down: Vec<StateSet>) -> Result<FinitePoset> {
        let n = down.len();
        if n > MAX_STATES {
            return Err(Error::TooManyStates(n));
        }
        let all = StateSet::full(n);
        for (y, d) in down.iter_mut().enumerate() {
            if let Some(bad) = (*d - all).first() {
                return Err(Error::StateOutOfRange { state: bad, n });
            }
            d.insert(y);
        }
        for y in 0..n {
            for x in down[y].iter() {
                if x != y && down[x].contains(y) {
                    return Err(Error::NotPartialOrder(format!(
                        "{x} ⊑ {y} and {y} ⊑ {x} for distinct states"
                    )));
                }
                if let Some(z) = (down[x] - down[y]).first() {
                    return Err(Error::NotPartialOrder(format!(
                        "{z} ⊑ {x} and {x} ⊑ {y} but not {z} ⊑ {y}"
                    )));
                }
            }
        }
        Ok(FinitePoset::from_down_unchecked(down))
    }

    pub(crate) fn from_down_unchecked(down: Vec<StateSet>) -> FinitePoset {
        let n = down.len();
        let mut up = vec![StateSet::EMPTY; n];
        for (y, d) in down.iter().enumerate() {
            for x in d.iter() {
                up[x].insert(y);
            }
        }
        let compat = (0..n)
            .map(|x| {
                let mut c = StateSet::EMPTY;
                for z in down[x].iter() {
                    c |= up[z];
                }
                c
            })
            .collect();
        FinitePoset {
            n,
            down,
            up,
            compat,
        }
    }

    /// The discrete order on `n` points.
    pub fn discrete(n: usize) -> FinitePoset {
        FinitePoset::from_down_unchecked((0..n).map(StateSet::singleton).collect())
    }

    /// The chain `0 ⊑ 1 ⊑ … ⊑ n-1`.
    pub fn chain(n: usize) -> FinitePoset {
        FinitePoset::from_down_unchecked((0..n).map(|y| StateSet::full(y + 1)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> StateSet {
        StateSet::full(self.n)
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.down[y].contains(x)
    }

    /// `↓x`, the refinements of `x`.
    #[inline]
    pub fn down(&self, x: usize) -> StateSet {
        self.down[x]
    }

    /// `↑x`, the states that `x` refines.
    #[inline]
    pub fn up(&self, x: usize) -> StateSet {
        self.up[x]
    }

    /// States compatible with `x`, i.e. sharing a common refinement with it.
    #[inline]
    pub fn compat(&self, x: usize) -> StateSet {
        self.compat[x]
    }

    #[inline]
    pub fn compatible(&self, x: usize, y: usize) -> bool {
        self.compat[x].contains(y)
    }

    pub fn down_sets(&self) -> &[StateSet] {
        &self.down
    }

    /// All `(x, y)` with `x ⊑ y`, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in self.up[x].iter() {
                out.push((x, y));
            }
        }
        out
    }

    /// Strict covering pairs `(x, y)`: `x ⊏ y` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.n {
            let strict = self.down[y] - StateSet::singleton(y);
            for x in strict.iter() {
                let between = strict & self.up[x] - StateSet::singleton(x);
                if between.is_empty() {
                    out.push((x, y));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub(crate) fn check_set(&self, x: StateSet) -> Result<()> {
        match (x - self.states()).first() {
            Some(s) => Err(Error::StateOutOfRange { state: s, n: self.n }),
            None => Ok(()),
        }
    }

    pub(crate) fn check_state(&self, x: usize) -> Result<()> {
        if x < self.n {
            Ok(())
        } else {
            Err(Error::StateOutOfRange { state: x, n: self.n })
        }
    }

    /// `int(X) = {y | ↓y ⊆ X}`.
    pub fn interior(&self, x: StateSet) -> StateSet {
        (0..self.n).filter(|&y| self.down[y].is_subset(x)).collect()
    }

    /// `cl(X) = {y | ↓y ∩ X ≠ ∅}`.
    pub fn closure(&self, x: StateSet) -> StateSet {
        let mut out = StateSet::EMPTY;
        for s in x.iter() {
            out |= self.up[s];
        }
        out
    }

    /// `⇓X = {y | y ⊑ x for some x ∈ X}`.
    pub fn down_set(&self, x: StateSet) -> StateSet {
        let mut out = StateSet::EMPTY;
        for s in x.iter() {
            out |= self.down[s];
        }
        out
    }

    /// `⇑X = {y | x ⊑ y for some x ∈ X}`; the same set as [`closure`](Self::closure).
    pub fn up_set(&self, x: StateSet) -> StateSet {
        self.closure(x)
    }

    /// Smallest regular open set containing `X`, computed as `int(cl(⇓X))`.
    pub fn ro_hull(&self, x: StateSet) -> StateSet {
        self.interior(self.closure(self.down_set(x)))
    }

    /// Every refinement of a member is a member.
    pub fn is_persistent(&self, x: StateSet) -> bool {
        x.iter().all(|s| self.down[s].is_subset(x))
    }

    /// Every non-member has a refinement none of whose refinements are members.
    pub fn is_refinable(&self, x: StateSet) -> bool {
        (self.states() - x)
            .iter()
            .all(|s| self.down[s].iter().any(|t| !self.down[t].intersects(x)))
    }

    pub fn is_regular_open(&self, x: StateSet) -> bool {
        self.is_persistent(x) && self.is_refinable(x)
    }

    /// Points with no proper refinement.
    pub fn minimal(&self) -> StateSet {
        (0..self.n).filter(|&x| self.down[x].len() == 1).collect()
    }

    /// The regular opens in canonical order.
    ///
    /// In a finite poset a regular open set is fixed by the minimal points it
    /// contains: it is `{y | every minimal point below y is in Y}` for some set
    /// `Y` of minimal points, and every such set is regular open. The listing
    /// therefore runs over subsets of the minimal points.
    pub fn regular_opens(&self) -> Result<Vec<StateSet>> {
        let min = self.minimal();
        if min.len() > RO_LISTING_CAP {
            return Err(Error::CapExceeded(format!(
                "{} minimal points give 2^{} regular open sets",
                min.len(),
                min.len()
            )));
        }
        let below: Vec<StateSet> = (0..self.n).map(|y| self.down[y] & min).collect();
        let mut out: Vec<StateSet> = min
            .subsets()
            .map(|ys| (0..self.n).filter(|&y| below[y].is_subset(ys)).collect())
            .collect();
        out.sort();
        Ok(out)
    }

    /// Number of regular opens, without listing them.
    pub fn regular_open_count(&self) -> u128 {
        1u128 << self.minimal().len()
    }

    /// `x ⊑s y`: every refinement of `x` is compatible with `y`.
    pub fn s_refines(&self, x: usize, y: usize) -> bool {
        self.down[x].is_subset(self.compat[y])
    }

    /// `⊑s` coincides with `⊑`.
    pub fn is_separative(&self) -> bool {
        (0..self.n).all(|x| {
            (0..self.n).all(|y| !self.s_refines(x, y) || self.leq(x, y))
        })
    }

    /// Greatest element of `x` under `⊑`, if it has one.
    pub fn maximum_of(&self, x: StateSet) -> Option<usize> {
        x.iter().find(|&m| x.is_subset(self.down[m]))
    }

    /// Minimum of the whole poset, if any.
    pub fn minimum(&self) -> Option<usize> {
        (0..self.n).find(|&b| self.up[b] == self.states())
    }

    /// The subposet on `subset`, renumbered in increasing order; also returns
    /// the original state of each new state.
    pub fn induced(&self, subset: StateSet) -> (FinitePoset, Vec<usize>) {
        let keep = subset.to_vec();
        let index = renumbering(self.n, &keep);
        let down = keep
            .iter()
            .map(|&y| (self.down[y] & subset).map(|x| index[x]))
            .collect();
        (FinitePoset::from_down_unchecked(down), keep)
    }

    /// The image of the poset under a bijection `perm` (old state to new state).
    pub fn relabel(&self, perm: &[usize]) -> FinitePoset {
        let mut down = vec![StateSet::EMPTY; self.n];
        for y in 0..self.n {
            down[perm[y]] = self.down[y].map(|x| perm[x]);
        }
        FinitePoset::from_down_unchecked(down)
    }

    /// Whether the map `x ↦ (minimal points below x)` is an order isomorphism
    /// onto the nonempty subsets of the minimal points, i.e. whether adding a
    /// bottom element yields a Boolean lattice.
    pub fn is_boolean_minus_bottom(&self) -> bool {
        let min = self.minimal();
        let k = min.len();
        if k >= 63 || self.n as u128 != (1u128 << k) - 1 {
            return false;
        }
        let atoms: Vec<StateSet> = (0..self.n).map(|x| self.down[x] & min).collect();
        let mut seen = std::collections::HashSet::new();
        for x in 0..self.n {
            if !seen.insert(atoms[x].0) {
                return false;
            }
            for y in 0..self.n {
                if self.leq(x, y) != atoms[x].is_subset(atoms[y]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Inverse of a strictly increasing list of kept states, as a lookup table.
pub(crate) fn renumbering(n: usize, keep: &[usize]) -> Vec<usize> {
    let mut index = vec![usize::MAX; n];
    for (k, &x) in keep.iter().enumerate() {
        index[x] = k;
    }
    index
}

/// A binary relation on `0..n`, stored as successor sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    succ: Vec<StateSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        Relation {
            succ: vec![StateSet::EMPTY; n],
        }
    }

    pub fn universal(n: usize) -> Relation {
        Relation {
            succ: vec![StateSet::full(n); n],
        }
    }

    pub fn identity(n: usize) -> Relation {
        Relation {
            succ: (0..n).map(StateSet::singleton).collect(),
        }
    }

    pub fn from_succ(succ: Vec<StateSet>) -> Relation {
        Relation { succ }
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Relation> {
        let mut r = Relation::empty(n);
        for &(x, y) in pairs {
            for s in [x, y] {
                if s >= n {
                    return Err(Error::StateOutOfRange { state: s, n });
                }
            }
            r.succ[x].insert(y);
        }
        Ok(r)
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    /// `R(x)`.
    #[inline]
    pub fn succ(&self, x: usize) -> StateSet {
        self.succ[x]
    }

    pub fn succ_sets(&self) -> &[StateSet] {
        &self.succ
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.succ[x].contains(y)
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.succ[x].insert(y);
    }

    /// `R[X]`.
    pub fn image(&self, x: StateSet) -> StateSet {
        let mut out = StateSet::EMPTY;
        for s in x.iter() {
            out |= self.succ[s];
        }
        out
    }

    /// `{x | x R y}`.
    pub fn predecessors(&self, y: usize) -> StateSet {
        (0..self.n()).filter(|&x| self.succ[x].contains(y)).collect()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (x, s) in self.succ.iter().enumerate() {
            for y in s.iter() {
                out.push((x, y));
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.succ.iter().all(|s| s.is_empty())
    }

    /// Relational composition: `x (R;S) z` iff `x R y S z` for some `y`.
    pub fn compose(&self, next: &Relation) -> Relation {
        Relation {
            succ: self.succ.iter().map(|&s| next.image(s)).collect(),
        }
    }

    pub fn relabel(&self, perm: &[usize]) -> Relation {
        let mut succ = vec![StateSet::EMPTY; self.n()];
        for (x, s) in self.succ.iter().enumerate() {
            succ[perm[x]] = s.map(|y| perm[y]);
        }
        Relation { succ }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.succ.len() != n {
            return Err(Error::InvalidFrame(format!(
                "relation covers {} states, frame has {n}",
                self.succ.len()
            )));
        }
        let all = StateSet::full(n);
        for s in &self.succ {
            if let Some(bad) = (*s - all).first() {
                return Err(Error::StateOutOfRange { state: bad, n });
            }
        }
        Ok(())
    }
}

/// A finite possibility frame, possibly extended with an impossible state.
///
/// Construction only checks that every component lives on the same state
/// set; whether the result is a possibility frame is a separate question
/// answered by [`validate_frame`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    poset: FinitePoset,
    rels: BTreeMap<String, Relation>,
    props: Vec<StateSet>,
    full: bool,
    bot: Option<usize>,
}

impl Frame {
    /// A frame with the given admissible family. The family is sorted,
    /// deduplicated, and `S` is added if absent.
    pub fn new(
        poset: FinitePoset,
        rels: BTreeMap<String, Relation>,
        props: Vec<StateSet>,
    ) -> Result<Frame> {
        Frame::build(poset, rels, props, false, None)
    }

    /// A frame whose admissible family is all of `RO(S, ⊑)`.
    pub fn full(poset: FinitePoset, rels: BTreeMap<String, Relation>) -> Result<Frame> {
        let props = poset.regular_opens()?;
        Frame::build(poset, rels, props, true, None)
    }

    /// An extended frame whose impossible state is the minimum of `poset`.
    pub fn extended(
        poset: FinitePoset,
        rels: BTreeMap<String, Relation>,
        props: Vec<StateSet>,
    ) -> Result<Frame> {
        let bot = poset.minimum().ok_or_else(|| {
            Error::InvalidFrame("an extended frame needs a minimum state".into())
        })?;
        Frame::build(poset, rels, props, false, Some(bot))
    }

    /// An extended frame whose admissible sets are `X ∪ {⊥}` for `X` regular
    /// open in the poset with `⊥` removed.
    pub fn extended_full(poset: FinitePoset, rels: BTreeMap<String, Relation>) -> Result<Frame> {
        let bot = poset.minimum().ok_or_else(|| {
            Error::InvalidFrame("an extended frame needs a minimum state".into())
        })?;
        let rest = poset.states() - StateSet::singleton(bot);
        let (sub, keep) = poset.induced(rest);
        let props = sub
            .regular_opens()?
            .into_iter()
            .map(|x| x.map(|s| keep[s]) | StateSet::singleton(bot))
            .collect();
        Frame::build(poset, rels, props, true, Some(bot))
    }

    fn build(
        poset: FinitePoset,
        rels: BTreeMap<String, Relation>,
        mut props: Vec<StateSet>,
        full: bool,
        bot: Option<usize>,
    ) -> Result<Frame> {
        let n = poset.n();
        for r in rels.values() {
            r.check(n)?;
        }
        for &x in &props {
            poset.check_set(x)?;
        }
        props.push(poset.states());
        props.sort();
        props.dedup();
        Ok(Frame {
            poset,
            rels,
            props,
            full,
            bot,
        })
    }

    /// Assembles a frame from parts already known to be consistent.
    pub(crate) fn from_parts(
        poset: FinitePoset,
        rels: BTreeMap<String, Relation>,
        mut props: Vec<StateSet>,
        full: bool,
        bot: Option<usize>,
    ) -> Frame {
        props.push(poset.states());
        props.sort();
        props.dedup();
        Frame {
            poset,
            rels,
            props,
            full,
            bot,
        }
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn n(&self) -> usize {
        self.poset.n
    }

    pub fn states(&self) -> StateSet {
        self.poset.states()
    }

    pub fn indices(&self) -> impl Iterator<Item = &str> {
        self.rels.keys().map(|s| s.as_str())
    }

    pub fn rels(&self) -> &BTreeMap<String, Relation> {
        &self.rels
    }

    pub fn rel(&self, index: &str) -> Result<&Relation> {
        self.rels
            .get(index)
            .ok_or_else(|| Error::UnknownIndex(index.to_string()))
    }

    /// The admissible family in canonical order.
    pub fn props(&self) -> &[StateSet] {
        &self.props
    }

    /// Whether the frame was built with `P = RO`.
    pub fn is_marked_full(&self) -> bool {
        self.full
    }

    /// The impossible state of an extended frame.
    pub fn bot(&self) -> Option<usize> {
        self.bot
    }

    pub fn is_admissible(&self, x: StateSet) -> bool {
        self.props.binary_search(&x).is_ok()
    }

    /// Position of `x` in [`props`](Self::props).
    pub fn prop_index(&self, x: StateSet) -> Option<usize> {
        self.props.binary_search(&x).ok()
    }

    /// `■X = {x | R(x) ⊆ X}` for an explicit relation.
    pub fn box_with(&self, r: &Relation, x: StateSet) -> StateSet {
        box_set(r, x)
    }

    /// `¬X`: states none of whose (possible) refinements lie in `X`.
    pub fn neg_set(&self, x: StateSet) -> StateSet {
        let x = match self.bot {
            Some(b) => x - StateSet::singleton(b),
            None => x,
        };
        let mut out = StateSet::EMPTY;
        for s in 0..self.n() {
            if !self.poset.down[s].intersects(x) {
                out.insert(s);
            }
        }
        out
    }

    /// `X ⊃ Y = {x | every refinement of x in X is in Y}`.
    pub fn imp_set(&self, x: StateSet, y: StateSet) -> StateSet {
        let mut out = StateSet::EMPTY;
        for s in 0..self.n() {
            if (self.poset.down[s] & x).is_subset(y) {
                out.insert(s);
            }
        }
        out
    }

    /// `P(x)`: positions of the admissible sets containing `x`.
    pub fn admissible_at(&self, x: usize) -> Vec<usize> {
        (0..self.props.len())
            .filter(|&k| self.props[k].contains(x))
            .collect()
    }

    /// Replaces the admissible family, keeping everything else.
    pub fn with_props(&self, props: Vec<StateSet>) -> Result<Frame> {
        Frame::build(self.poset.clone(), self.rels.clone(), props, false, self.bot)
    }

    /// Replaces the relations, keeping everything else.
    pub fn with_rels(&self, rels: BTreeMap<String, Relation>) -> Result<Frame> {
        Frame::build(self.poset.clone(), rels, self.props.clone(), self.full, self.bot)
    }

    /// The frame restricted to `subset`: induced order and relations, and the
    /// traces `X ∩ subset` of the admissible sets. Returns the original state
    /// of each new state.
    pub fn induced(&self, subset: StateSet) -> (Frame, Vec<usize>) {
        let (poset, keep) = self.poset.induced(subset);
        let index = renumbering(self.n(), &keep);
        let rels = self
            .rels
            .iter()
            .map(|(i, r)| {
                let succ = keep
                    .iter()
                    .map(|&x| (r.succ(x) & subset).map(|y| index[y]))
                    .collect();
                (i.clone(), Relation::from_succ(succ))
            })
            .collect();
        let props = self
            .props
            .iter()
            .map(|&x| (x & subset).map(|s| index[s]))
            .collect();
        let bot = self.bot.filter(|&b| subset.contains(b)).map(|b| index[b]);
        (Frame::from_parts(poset, rels, props, false, bot), keep)
    }

    /// The image of the frame under a bijection `perm` (old state to new state).
    pub fn relabel(&self, perm: &[usize]) -> Frame {
        let poset = self.poset.relabel(perm);
        let rels = self
            .rels
            .iter()
            .map(|(i, r)| (i.clone(), r.relabel(perm)))
            .collect();
        let props = self.props.iter().map(|x| x.map(|s| perm[s])).collect();
        Frame::from_parts(poset, rels, props, self.full, self.bot.map(|b| perm[b]))
    }

    /// `■ᵢX`.
    pub fn box_op(&self, index: &str, x: StateSet) -> Result<StateSet> {
        self.poset.check_set(x)?;
        Ok(box_set(self.rel(index)?, x))
    }

    /// `♦ᵢX`: states all of whose refinements see a state that can be
    /// refined into `X`.
    pub fn diamond_op(&self, index: &str, x: StateSet) -> Result<StateSet> {
        self.poset.check_set(x)?;
        let r = self.rel(index)?;
        let reach = self.poset.closure(x);
        let sees: StateSet = (0..self.n())
            .filter(|&s| r.succ(s).intersects(reach))
            .collect();
        Ok(self.poset.interior(sees))
    }

    /// `x ⊑s y` with range checks.
    pub fn s_refines(&self, x: usize, y: usize) -> Result<bool> {
        self.poset.check_state(x)?;
        self.poset.check_state(y)?;
        Ok(self.poset.s_refines(x, y))
    }
}

/// `■X = {x | R(x) ⊆ X}`.
pub fn box_set(r: &Relation, x: StateSet) -> StateSet {
    let mut out = StateSet::EMPTY;
    for (s, succ) in r.succ.iter().enumerate() {
        if succ.is_subset(x) {
            out.insert(s);
        }
    }
    out
}

/// `int(X)`; free-function form of [`FinitePoset::interior`].
pub fn interior(poset: &FinitePoset, x: StateSet) -> Result<StateSet> {
    poset.check_set(x)?;
    Ok(poset.interior(x))
}

/// `cl(X)`; free-function form of [`FinitePoset::closure`].
pub fn closure(poset: &FinitePoset, x: StateSet) -> Result<StateSet> {
    poset.check_set(x)?;
    Ok(poset.closure(x))
}

/// `⇓X`; free-function form of [`FinitePoset::down_set`].
pub fn down_set(poset: &FinitePoset, x: StateSet) -> Result<StateSet> {
    poset.check_set(x)?;
    Ok(poset.down_set(x))
}

pub fn ro_hull(poset: &FinitePoset, x: StateSet) -> Result<StateSet> {
    poset.check_set(x)?;
    Ok(poset.ro_hull(x))
}

pub fn regular_opens(poset: &FinitePoset) -> Result<Vec<StateSet>> {
    poset.regular_opens()
}

/// Interplay conditions between one accessibility relation and refinement.
///
/// The witness of a failed check lists the universally quantified states in
/// the order given with each variant, and is the lexicographically least
/// violating tuple in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// `x' ⊑ x`, `x' R y'`, `y' ≬ z` ⟹ some `y` with `x R y ≬ z`. Witness `(x, x', y', z)`.
    RRule,
    /// `x' ⊑ x`, `x' R y'` ⟹ some `y` with `x R y` and `y' ⊑ y`. Witness `(x, x', y')`.
    RCom,
    /// `x' ⊑ x`, `x' R y'` ⟹ `x R y'`. Witness `(x, x', y')`.
    UpR,
    /// `x R y`, `y' ⊑ y` ⟹ `x R y'`. Witness `(x, y, y')`.
    RDown,
    /// `x R y` ⟹ for every `y' ⊑ y` there is `x' ⊑ x` all of whose
    /// refinements see something compatible with `y'`. Witness `(x, y, y')`.
    RWin,
    /// As [`RWin`](Self::RWin), but the refinements must see something
    /// refining `y'`. Witness `(x, y, y')`.
    RWinUnder,
    /// `x R y` exactly when the game condition of
    /// [`RWinUnder`](Self::RWinUnder) holds for `(x, y)`. Witness `(x, y)`.
    RIffWinUnder,
    /// `x R y` ⟹ some `x' ⊑ x` whose refinements all see a refinement of `y`.
    /// Witness `(x, y)`.
    RRefinability,
    /// `x R y` ⟹ some `y' ⊑ y` and `x' ⊑ x` whose refinements all see `y'`.
    /// Witness `(x, y)`.
    RRefinabilityPlus,
    /// `x R y` ⟹ some `x' ⊑ x` whose refinements all see `y`. Witness `(x, y)`.
    RRefinabilityPlusPlus,
    /// If every `y' ⊑ y` has a refinement in `R(x)`, then `x R y`. Witness `(x, y)`.
    RDense,
    /// A nonempty `R(x)` has a greatest element. Witness `(x)`.
    RMax,
    /// `R(x)` has a greatest element. Witness `(x)`.
    RMaxe,
    /// `R(x)` is a principal down-set (so in particular nonempty). Witness `(x)`.
    RPrinc,
    /// `x' ⊑ x`, `x' R y'` ⟹ some `z ⊑ y'` with `x' R z` and `x R z`.
    /// Witness `(x, x', y')`.
    RCommon,
}

impl Condition {
    pub const ALL: [Condition; 15] = [
        Condition::RRule,
        Condition::RCom,
        Condition::UpR,
        Condition::RDown,
        Condition::RWin,
        Condition::RWinUnder,
        Condition::RIffWinUnder,
        Condition::RRefinability,
        Condition::RRefinabilityPlus,
        Condition::RRefinabilityPlusPlus,
        Condition::RDense,
        Condition::RMax,
        Condition::RMaxe,
        Condition::RPrinc,
        Condition::RCommon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::RRule => "R-rule",
            Condition::RCom => "R-com",
            Condition::UpR => "up-R",
            Condition::RDown => "R-down",
            Condition::RWin => "R=>win",
            Condition::RWinUnder => "R=>win-underline",
            Condition::RIffWinUnder => "R<=>win-underline",
            Condition::RRefinability => "R-refinability",
            Condition::RRefinabilityPlus => "R-refinability+",
            Condition::RRefinabilityPlusPlus => "R-refinability++",
            Condition::RDense => "R-dense",
            Condition::RMax => "R-max",
            Condition::RMaxe => "R-maxe",
            Condition::RPrinc => "R-princ",
            Condition::RCommon => "R-common",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    /// Accepts the ASCII names of [`Condition::name`] and the same names
    /// written with `⇒` / `⇔`.
    fn from_str(s: &str) -> Result<Condition> {
        let norm = s.trim().replace('⇒', "=>").replace('⇔', "<=>");
        Condition::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| Error::UnknownCondition(s.to_string()))
    }
}

/// Checks one interplay condition for the relation of `index`.
pub fn check_interplay(frame: &Frame, index: &str, condition: &str) -> Result<CheckReport> {
    let c: Condition = condition.parse()?;
    let r = frame.rel(index)?;
    Ok(check_condition(frame.poset(), r, c))
}

/// Checks one interplay condition for an explicit poset and relation.
pub fn check_condition(poset: &FinitePoset, r: &Relation, c: Condition) -> CheckReport {
    let w = condition_witness(poset, r, c);
    CheckReport::from_result(c.name(), w.map(Witness::States))
}

/// Whether a condition holds, without building a report.
pub fn condition_holds(poset: &FinitePoset, r: &Relation, c: Condition) -> bool {
    condition_witness(poset, r, c).is_none()
}

/// `cl(int(G))` for each `G` in `sets`: the states having a refinement all of
/// whose refinements lie in `G`.
fn eventually_inside(poset: &FinitePoset, sets: impl Iterator<Item = StateSet>) -> Vec<StateSet> {
    sets.map(|g| poset.closure(poset.interior(g))).collect()
}

fn condition_witness(p: &FinitePoset, r: &Relation, c: Condition) -> Option<Vec<usize>> {
    let n = p.n();
    let see_compat = |yp: usize| -> StateSet {
        (0..n).filter(|&s| r.succ(s).intersects(p.compat(yp))).collect()
    };
    let see_below = |yp: usize| -> StateSet {
        (0..n).filter(|&s| r.succ(s).intersects(p.down(yp))).collect()
    };
    match c {
        Condition::RRule => {
            for x in 0..n {
                let good = p.closure(p.down_set(r.succ(x)));
                for xp in p.down(x).iter() {
                    for yp in r.succ(xp).iter() {
                        if let Some(z) = (p.compat(yp) - good).first() {
                            return Some(vec![x, xp, yp, z]);
                        }
                    }
                }
            }
            None
        }
        Condition::RCom => {
            for x in 0..n {
                for xp in p.down(x).iter() {
                    for yp in r.succ(xp).iter() {
                        if !r.succ(x).intersects(p.up(yp)) {
                            return Some(vec![x, xp, yp]);
                        }
                    }
                }
            }
            None
        }
        Condition::UpR => {
            for x in 0..n {
                for xp in p.down(x).iter() {
                    if let Some(yp) = (r.succ(xp) - r.succ(x)).first() {
                        return Some(vec![x, xp, yp]);
                    }
                }
            }
            None
        }
        Condition::RDown => {
            for x in 0..n {
                for y in r.succ(x).iter() {
                    if let Some(yp) = (p.down(y) - r.succ(x)).first() {
                        return Some(vec![x, y, yp]);
                    }
                }
            }
            None
        }
        Condition::RWin | Condition::RWinUnder => {
            let ok = if c == Condition::RWin {
                eventually_inside(p, (0..n).map(see_compat))
            } else {
                eventually_inside(p, (0..n).map(see_below))
            };
            for x in 0..n {
                for y in r.succ(x).iter() {
                    if let Some(yp) = p.down(y).iter().find(|&yp| !ok[yp].contains(x)) {
                        return Some(vec![x, y, yp]);
                    }
                }
            }
            None
        }
        Condition::RIffWinUnder => {
            let ok = eventually_inside(p, (0..n).map(see_below));
            for x in 0..n {
                for y in 0..n {
                    let game = p.down(y).iter().all(|yp| ok[yp].contains(x));
                    if game != r.contains(x, y) {
                        return Some(vec![x, y]);
                    }
                }
            }
            None
        }
        Condition::RRefinability => {
            let ok = eventually_inside(p, (0..n).map(see_below));
            for x in 0..n {
                if let Some(y) = r.succ(x).iter().find(|&y| !ok[y].contains(x)) {
                    return Some(vec![x, y]);
                }
            }
            None
        }
        Condition::RRefinabilityPlus | Condition::RRefinabilityPlusPlus => {
            let ok = eventually_inside(p, (0..n).map(|y| r.predecessors(y)));
            let plus = c == Condition::RRefinabilityPlus;
            for x in 0..n {
                for y in r.succ(x).iter() {
                    let holds = if plus {
                        p.down(y).iter().any(|yp| ok[yp].contains(x))
                    } else {
                        ok[y].contains(x)
                    };
                    if !holds {
                        return Some(vec![x, y]);
                    }
                }
            }
            None
        }
        Condition::RDense => {
            for x in 0..n {
                let dense = p.interior(p.closure(r.succ(x)));
                if let Some(y) = (dense - r.succ(x)).first() {
                    return Some(vec![x, y]);
                }
            }
            None
        }
        Condition::RMax => (0..n)
            .find(|&x| !r.succ(x).is_empty() && p.maximum_of(r.succ(x)).is_none())
            .map(|x| vec![x]),
        Condition::RMaxe => (0..n)
            .find(|&x| p.maximum_of(r.succ(x)).is_none())
            .map(|x| vec![x]),
        Condition::RPrinc => (0..n)
            .find(|&x| !(0..n).any(|m| p.down(m) == r.succ(x)))
            .map(|x| vec![x]),
        Condition::RCommon => {
            for x in 0..n {
                for xp in p.down(x).iter() {
                    for yp in r.succ(xp).iter() {
                        if !(p.down(yp) & r.succ(xp)).intersects(r.succ(x)) {
                            return Some(vec![x, xp, yp]);
                        }
                    }
                }
            }
            None
        }
    }
}

/// First regular open set whose `■`-image is not regular open, if any.
pub fn ro_box_escape(poset: &FinitePoset, r: &Relation) -> Result<Option<StateSet>> {
    Ok(poset
        .regular_opens()?
        .into_iter()
        .find(|&x| !poset.is_regular_open(box_set(r, x))))
}

/// Validates the possibility-frame axioms.
///
/// Clauses are checked in a fixed order and the first failure is reported:
/// the order axioms, `∅ ∈ P`, closure under `∩`, under `⊃`, under `■ᵢ` for
/// each index in sorted order, and finally `P ⊆ RO`. Extended frames first
/// have their impossible state checked and then have the remaining clauses
/// checked on the frame with that state removed (witnesses still use the
/// extended frame's numbering).
pub fn validate_frame(frame: &Frame) -> CheckReport {
    if let Some(b) = frame.bot {
        return validate_extended(frame, b);
    }
    validate_plain(frame)
}

fn validate_extended(frame: &Frame, b: usize) -> CheckReport {
    let all = frame.states();
    if frame.poset.up(b) != all {
        let x = (all - frame.poset.up(b)).first().unwrap_or(b);
        return CheckReport::fails("impossible state is the minimum", Witness::States(vec![b, x]));
    }
    for (i, r) in &frame.rels {
        if r.succ(b) != StateSet::singleton(b) {
            return CheckReport::fails(
                format!("impossible state sees only itself[{i}]"),
                Witness::States(vec![b]),
            );
        }
        if let Some(x) = (0..frame.n()).find(|&x| !r.contains(x, b)) {
            return CheckReport::fails(
                format!("every state sees the impossible state[{i}]"),
                Witness::States(vec![x]),
            );
        }
    }
    if let Some(&x) = frame.props.iter().find(|x| !x.contains(b)) {
        return CheckReport::fails(
            "impossible state is in every admissible set",
            Witness::Sets(vec![x]),
        );
    }
    let (rest, keep) = frame.induced(all - StateSet::singleton(b));
    let mut report = validate_plain(&rest);
    if let Some(w) = report.witness.take() {
        report.witness = Some(lift_witness(w, &keep, Some(b)));
    }
    report
}

/// Renames the states of a witness from a restricted frame back to the frame
/// it came from, re-adding `extra` to every set.
fn lift_witness(w: Witness, keep: &[usize], extra: Option<usize>) -> Witness {
    let lift_set = |x: StateSet| {
        let mut y = x.map(|s| keep[s]);
        if let Some(e) = extra {
            y.insert(e);
        }
        y
    };
    match w {
        Witness::States(xs) => Witness::States(xs.into_iter().map(|s| keep[s]).collect()),
        Witness::Sets(xs) => Witness::Sets(xs.into_iter().map(lift_set).collect()),
        Witness::StatesAndSets { states, sets } => Witness::StatesAndSets {
            states: states.into_iter().map(|s| keep[s]).collect(),
            sets: sets.into_iter().map(lift_set).collect(),
        },
        other => other,
    }
}

fn validate_plain(frame: &Frame) -> CheckReport {
    let p = &frame.poset;
    let n = p.n();
    // The order is validated on construction; re-check it so the report
    // covers every axiom.
    for y in 0..n {
        if !p.down(y).contains(y) {
            return CheckReport::fails("partial order", Witness::States(vec![y]));
        }
        for x in p.down(y).iter() {
            if x != y && p.leq(y, x) {
                return CheckReport::fails("partial order", Witness::States(vec![x, y]));
            }
            if let Some(z) = (p.down(x) - p.down(y)).first() {
                return CheckReport::fails("partial order", Witness::States(vec![z, x, y]));
            }
        }
    }
    if !frame.is_admissible(StateSet::EMPTY) {
        return CheckReport::fails("empty set admissible", Witness::Sets(vec![StateSet::EMPTY]));
    }
    let props = &frame.props;
    for (k, &x) in props.iter().enumerate() {
        for &y in &props[k..] {
            if !frame.is_admissible(x & y) {
                return CheckReport::fails("closed under intersection", Witness::Sets(vec![x, y]));
            }
        }
    }
    for &x in props {
        for &y in props {
            if !frame.is_admissible(frame.imp_set(x, y)) {
                return CheckReport::fails("closed under implication", Witness::Sets(vec![x, y]));
            }
        }
    }
    for (i, r) in &frame.rels {
        for &x in props {
            if !frame.is_admissible(box_set(r, x)) {
                return CheckReport::fails(format!("closed under box[{i}]"), Witness::Sets(vec![x]));
            }
        }
    }
    for &x in props {
        if !p.is_regular_open(x) {
            return CheckReport::fails("admissible sets are regular open", Witness::Sets(vec![x]));
        }
    }
    CheckReport::holds("possibility frame")
}

/// The frame-class flags computed by [`classify`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    pub full: bool,
    pub standard: bool,
    pub strong: bool,
    pub separative: bool,
    pub leq_tight: bool,
    pub r_tight: bool,
    pub tight: bool,
    pub differentiated: bool,
    pub atomic: bool,
    pub principal: bool,
    pub lattice_complete: bool,
    pub rich: bool,
    pub quasi_functional: bool,
    pub functional: bool,
    pub filter_descriptive: bool,
}

impl Classification {
    pub fn flags(&self) -> [(&'static str, bool); 15] {
        [
            ("full", self.full),
            ("standard", self.standard),
            ("strong", self.strong),
            ("separative", self.separative),
            ("leq_tight", self.leq_tight),
            ("r_tight", self.r_tight),
            ("tight", self.tight),
            ("differentiated", self.differentiated),
            ("atomic", self.atomic),
            ("principal", self.principal),
            ("lattice_complete", self.lattice_complete),
            ("rich", self.rich),
            ("quasi_functional", self.quasi_functional),
            ("functional", self.functional),
            ("filter_descriptive", self.filter_descriptive),
        ]
    }
}

/// Computes every frame-class flag. Extended frames are classified through
/// the frame obtained by removing the impossible state.
pub fn classify(frame: &Frame) -> Result<Classification> {
    let report = validate_frame(frame);
    if !report.verdict {
        return Err(Error::InvalidFrame(report.to_string().replace('\n', "; ")));
    }
    if let Some(b) = frame.bot {
        let (rest, _) = frame.induced(frame.states() - StateSet::singleton(b));
        return classify(&rest);
    }
    let all_rels = |c: Condition| frame.rels.values().all(|r| condition_holds(&frame.poset, r, c));
    let leq_tight = is_leq_tight(frame);
    let r_tight = is_r_tight(frame);
    let principal = is_principal(frame);
    let lattice_complete = principal && frame.poset.is_boolean_minus_bottom();
    let strong = all_rels(Condition::RIffWinUnder);
    Ok(Classification {
        full: is_full(frame),
        standard: all_rels(Condition::RDown),
        strong,
        separative: frame.poset.is_separative(),
        leq_tight,
        r_tight,
        tight: leq_tight && r_tight,
        differentiated: is_differentiated(frame),
        atomic: is_atomic(&frame.poset),
        principal,
        lattice_complete,
        rich: lattice_complete && strong,
        quasi_functional: all_rels(Condition::RMax),
        functional: frame.rels.values().all(|r| r.succ_sets().iter().all(|s| s.len() <= 1)),
        filter_descriptive: leq_tight && r_tight && every_filter_realized(frame),
    })
}

/// `P = RO(S, ⊑)`. Assumes `P ⊆ RO`, so counting suffices.
pub fn is_full(frame: &Frame) -> bool {
    frame.props.len() as u128 == frame.poset.regular_open_count()
        && frame.props.iter().all(|&x| frame.poset.is_regular_open(x))
}

/// `P` is exactly the principal down-sets together with `∅`.
pub fn is_principal(frame: &Frame) -> bool {
    let mut principal: Vec<StateSet> = frame.poset.down.clone();
    principal.push(StateSet::EMPTY);
    principal.push(frame.states());
    principal.sort();
    principal.dedup();
    // `S` is always admissible; it is principal only if `S` has a maximum.
    let has_top = frame.poset.maximum_of(frame.states()).is_some() || frame.n() == 0;
    if !has_top {
        return false;
    }
    principal == frame.props
}

/// Points are told apart by the admissible sets containing them.
pub fn is_differentiated(frame: &Frame) -> bool {
    let n = frame.n();
    (0..n).all(|x| {
        (x + 1..n).all(|y| frame.props.iter().any(|z| z.contains(x) != z.contains(y)))
    })
}

/// Every non-minimum point has an atom below it.
pub fn is_atomic(poset: &FinitePoset) -> bool {
    let min = poset.minimum();
    let non_min = |x: usize| Some(x) != min;
    let atoms: StateSet = (0..poset.n())
        .filter(|&a| non_min(a))
        .filter(|&a| {
            poset
                .down(a)
                .iter()
                .all(|x| x == a || Some(x) == min)
        })
        .collect();
    (0..poset.n())
        .filter(|&x| non_min(x))
        .all(|x| poset.down(x).intersects(atoms))
}

/// `∩{Z ∈ P | x ∈ Z}`: everything `P` forces to lie below `x`.
pub fn admissible_hull_of(frame: &Frame, x: usize) -> StateSet {
    frame
        .props
        .iter()
        .filter(|z| z.contains(x))
        .fold(frame.states(), |acc, &z| acc & z)
}

/// `(∀Z ∈ P: x ∈ Z ⟹ y ∈ Z) ⟹ y ⊑ x`.
pub fn is_leq_tight(frame: &Frame) -> bool {
    (0..frame.n()).all(|x| admissible_hull_of(frame, x).is_subset(frame.poset.down(x)))
}

/// `{y | ∀Z ∈ P: x ∈ ■Z ⟹ y ∈ Z}`, the successors forced on `x` by `P`.
pub fn tight_successors(frame: &Frame, r: &Relation, x: usize) -> StateSet {
    frame
        .props
        .iter()
        .filter(|z| r.succ(x).is_subset(**z))
        .fold(frame.states(), |acc, &z| acc & z)
}

/// Every index satisfies `(∀Z ∈ P: x ∈ ■Z ⟹ y ∈ Z) ⟹ x R y`.
pub fn is_r_tight(frame: &Frame) -> bool {
    frame.rels.values().all(|r| {
        (0..frame.n()).all(|x| tight_successors(frame, r, x).is_subset(r.succ(x)))
    })
}

/// Every proper filter `↑X` (`X ∈ P`, `X ≠ ∅`) of the admissible algebra is
/// `P(x)` for some state `x`.
fn every_filter_realized(frame: &Frame) -> bool {
    frame.props.iter().filter(|x| !x.is_empty()).all(|&x| {
        (0..frame.n()).any(|s| frame.props.iter().all(|&z| z.contains(s) == x.is_subset(z)))
    })
}

/// `x ⊑s y`: every refinement of `x` is compatible with `y`.
pub fn s_refines(frame: &Frame, x: usize, y: usize) -> Result<bool> {
    frame.s_refines(x, y)
}
