//! Frame constructions that keep the valid formulas fixed (or move them in a
//! known direction): powerset possibilization, relation and order
//! tightening, quotients, atom structures, unions, subframes and the
//! impossible-state extension.
//!
//! Quotients number their classes by least member, so outputs are canonical
//! and golden files stay stable.

use std::collections::BTreeMap;
use std::fmt;

use crate::bits::{StateSet, MAX_STATES};
use crate::error::{Error, Result};
use crate::forcing::Valuation;
use crate::frame::{
    admissible_hull_of, tight_successors, validate_frame, Condition, FinitePoset, Frame, Relation,
};

/// Largest world set accepted by [`powerset_possibilization`]; `2^6 - 1`
/// states is the last size that fits a state-set.
pub const MAX_POWERSET_WORLDS: usize = 6;

fn require_valid(frame: &Frame) -> Result<()> {
    let report = validate_frame(frame);
    if report.verdict {
        Ok(())
    } else {
        Err(Error::InvalidFrame(report.to_string().replace('\n', "; ")))
    }
}

fn require_plain(frame: &Frame) -> Result<()> {
    if frame.bot().is_some() {
        return Err(Error::Precondition(
            "extended frame: restrict away the impossible state first".into(),
        ));
    }
    Ok(())
}

fn is_discrete(p: &FinitePoset) -> bool {
    (0..p.n()).all(|x| p.down(x).len() == 1)
}

/// The nonempty subsets of `n` worlds in canonical order; state `k` of the
/// powerset possibilization is the `k`-th set.
pub fn powerset_states(n: usize) -> Vec<StateSet> {
    let mut out: Vec<StateSet> = StateSet::full(n)
        .subsets()
        .filter(|s| !s.is_empty())
        .collect();
    out.sort();
    out
}

/// Possibilities are nonempty sets of worlds ordered by inclusion. `X R Y`
/// holds when every world of `Y` is reachable from some world of `X`, and the
/// admissible sets are `↓A` for `A` admissible in the world frame.
pub fn powerset_possibilization(world: &Frame) -> Result<Frame> {
    require_plain(world)?;
    let w = world.n();
    if w == 0 {
        return Err(Error::Precondition("empty world set".into()));
    }
    if w > MAX_POWERSET_WORLDS {
        return Err(Error::TooManyStates((1 << w) - 1));
    }
    if !is_discrete(world.poset()) {
        return Err(Error::Precondition(
            "powerset possibilization needs a world frame (discrete order)".into(),
        ));
    }
    let sets = powerset_states(w);
    let pos: BTreeMap<StateSet, usize> = sets.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    let below = |a: StateSet| -> StateSet {
        sets.iter()
            .enumerate()
            .filter(|(_, s)| s.is_subset(a))
            .map(|(k, _)| k)
            .collect()
    };
    let down = sets.iter().map(|&s| below(s)).collect();
    let poset = FinitePoset::from_down_sets(down)?;
    let rels = world
        .rels()
        .iter()
        .map(|(i, r)| {
            let succ = sets.iter().map(|&x| below(r.image(x))).collect();
            (i.clone(), Relation::from_succ(succ))
        })
        .collect();
    let props = world.props().iter().map(|&a| below(a)).collect();
    debug_assert_eq!(pos.len(), sets.len());
    Ok(Frame::from_parts(
        poset,
        rels,
        props,
        world.is_marked_full(),
        None,
    ))
}

/// Carries a world valuation to the powerset possibilization:
/// `π(p) = {X | X ⊆ V(p)}`.
pub fn powerset_valuation(worlds: usize, valuation: &Valuation) -> Valuation {
    let sets = powerset_states(worlds);
    valuation
        .iter()
        .map(|(v, &a)| {
            let img = sets
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_subset(a))
                .map(|(k, _)| k)
                .collect();
            (v.clone(), img)
        })
        .collect()
}

/// Replaces each relation by the largest one with the same boxes on `P`:
/// `x R y` iff every admissible `Z` with `x ∈ ■Z` contains `y`.
pub fn box_tighten(frame: &Frame) -> Result<Frame> {
    require_plain(frame)?;
    require_valid(frame)?;
    let rels = frame
        .rels()
        .iter()
        .map(|(i, r)| {
            let succ = (0..frame.n()).map(|x| tight_successors(frame, r, x)).collect();
            (i.clone(), Relation::from_succ(succ))
        })
        .collect();
    frame.with_rels(rels)
}

/// Groups states into classes of the preorder `leq`, numbered by least
/// member. Returns the class of each state and the members of each class.
fn classes(n: usize, leq: impl Fn(usize, usize) -> bool) -> (Vec<usize>, Vec<usize>) {
    let mut class = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if class[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for y in x..n {
            if class[y] == usize::MAX && leq(x, y) && leq(y, x) {
                class[y] = c;
            }
        }
    }
    (class, reps)
}

/// Builds the quotient frame on classes. `leq` and `rel` are evaluated on
/// representatives; admissible sets are images.
fn quotient(
    frame: &Frame,
    class: &[usize],
    reps: &[usize],
    leq: impl Fn(usize, usize) -> bool,
    rel: impl Fn(&str, &Relation, usize) -> StateSet,
) -> Result<Frame> {
    let m = reps.len();
    let down = (0..m)
        .map(|b| (0..m).filter(|&a| leq(reps[a], reps[b])).collect())
        .collect();
    let poset = FinitePoset::from_down_sets(down)?;
    let rels = frame
        .rels()
        .iter()
        .map(|(i, r)| {
            let succ = (0..m).map(|a| rel(i, r, a)).collect();
            (i.clone(), Relation::from_succ(succ))
        })
        .collect();
    let props = frame.props().iter().map(|x| x.map(|s| class[s])).collect();
    Ok(Frame::from_parts(poset, rels, props, frame.is_marked_full(), None))
}

/// Collapses states that refine each other in the separative sense. Returns
/// the quotient and the map `x ↦ [x]`.
pub fn separative_quotient(frame: &Frame) -> Result<(Frame, Vec<usize>)> {
    require_plain(frame)?;
    require_valid(frame)?;
    let p = frame.poset();
    let (class, reps) = classes(frame.n(), |x, y| p.s_refines(x, y));
    let q = quotient(
        frame,
        &class,
        &reps,
        |x, y| p.s_refines(x, y),
        |_, r, a| {
            let mut out = StateSet::EMPTY;
            for x in (0..frame.n()).filter(|&x| class[x] == a) {
                out |= r.succ(x).map(|y| class[y]);
            }
            out
        },
    )?;
    Ok((q, class))
}

/// Replaces `⊑` by the order the admissible sets induce (`x ⊑ y` iff every
/// admissible set containing `y` contains `x`), collapses its cycles, and
/// makes each relation tight. Returns the result and the quotient map.
pub fn tighten(frame: &Frame) -> Result<(Frame, Vec<usize>)> {
    require_plain(frame)?;
    require_valid(frame)?;
    let hull: Vec<StateSet> = (0..frame.n()).map(|y| admissible_hull_of(frame, y)).collect();
    let leq = |x: usize, y: usize| hull[y].contains(x);
    let (class, reps) = classes(frame.n(), leq);
    let q = quotient(frame, &class, &reps, leq, |_, r, a| {
        tight_successors(frame, r, reps[a]).map(|y| class[y])
    })?;
    Ok((q, class))
}

/// Replaces each relation by the partial function sending `x` to the
/// maximum of `R(x)`. Fails with the first state whose successors have no
/// maximum.
pub fn functionalize(frame: &Frame) -> Result<Frame> {
    require_plain(frame)?;
    require_valid(frame)?;
    let p = frame.poset();
    let mut rels = BTreeMap::new();
    for (i, r) in frame.rels() {
        let mut succ = Vec::with_capacity(frame.n());
        for x in 0..frame.n() {
            let s = r.succ(x);
            if s.is_empty() {
                succ.push(StateSet::EMPTY);
                continue;
            }
            match p.maximum_of(s) {
                Some(m) => succ.push(StateSet::singleton(m)),
                None => {
                    return Err(Error::Precondition(format!(
                        "{} fails at state {x} for index {i}",
                        Condition::RMax
                    )))
                }
            }
        }
        rels.insert(i.clone(), Relation::from_succ(succ));
    }
    frame.with_rels(rels)
}

/// The world frame on the minimal states: `a R b` iff `a R x` for some `x`
/// above `b`, with admissible sets the traces on the minimal states. Also
/// returns the original state of each world.
pub fn atom_structure(frame: &Frame) -> Result<(Frame, Vec<usize>)> {
    require_plain(frame)?;
    let p = frame.poset();
    let min = p.minimal();
    let keep = min.to_vec();
    let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &a)| (a, k)).collect();
    let rels = frame
        .rels()
        .iter()
        .map(|(i, r)| {
            let succ = keep
                .iter()
                .map(|&a| (p.down_set(r.succ(a)) & min).map(|b| index[&b]))
                .collect();
            (i.clone(), Relation::from_succ(succ))
        })
        .collect();
    let props = frame
        .props()
        .iter()
        .map(|&x| (x & min).map(|a| index[&a]))
        .collect();
    let world = Frame::from_parts(
        FinitePoset::discrete(keep.len()),
        rels,
        props,
        frame.is_marked_full(),
        None,
    );
    Ok((world, keep))
}

/// The disjoint union, summands placed one after another. Returns the union
/// and, per summand, the new number of each of its states.
pub fn disjoint_union(frames: &[Frame]) -> Result<(Frame, Vec<Vec<usize>>)> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Precondition("disjoint union of no frames".into()))?;
    let indices: Vec<&str> = first.indices().collect();
    let total: usize = frames.iter().map(Frame::n).sum();
    if total > MAX_STATES {
        return Err(Error::TooManyStates(total));
    }
    let mut offset = 0;
    let mut embeds = Vec::with_capacity(frames.len());
    let mut down = Vec::with_capacity(total);
    let mut succ: BTreeMap<String, Vec<StateSet>> = indices
        .iter()
        .map(|i| (i.to_string(), Vec::with_capacity(total)))
        .collect();
    let mut props = vec![StateSet::EMPTY];
    for f in frames {
        require_plain(f)?;
        if !f.indices().eq(indices.iter().copied()) {
            return Err(Error::Mismatch("summands have different index sets".into()));
        }
        let shift = |x: StateSet| StateSet(x.0 << offset);
        embeds.push((offset..offset + f.n()).collect());
        for x in 0..f.n() {
            down.push(shift(f.poset().down(x)));
        }
        for (i, r) in f.rels() {
            let v = succ.get_mut(i).expect("index present");
            v.extend((0..f.n()).map(|x| shift(r.succ(x))));
        }
        let mut next = Vec::with_capacity(props.len() * f.props().len());
        for &acc in &props {
            for &x in f.props() {
                next.push(acc | shift(x));
            }
        }
        props = next;
        offset += f.n();
    }
    let rels = succ
        .into_iter()
        .map(|(i, s)| (i, Relation::from_succ(s)))
        .collect();
    let full = frames.iter().all(Frame::is_marked_full);
    let frame = Frame::from_parts(FinitePoset::from_down_unchecked(down), rels, props, full, None);
    Ok((frame, embeds))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubframeKind {
    /// Closed under refinement and every relation.
    Generated,
    /// Every refinement of a kept state is refined by a kept state, and
    /// successors are approximated by compatible kept successors.
    Selective,
    Neither,
}

impl fmt::Display for SubframeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubframeKind::Generated => "generated",
            SubframeKind::Selective => "selective",
            SubframeKind::Neither => "neither",
        })
    }
}

/// Restriction to `subset` with traced admissible sets, together with the
/// strongest kind it has and the original state of each new state.
pub fn subframe(frame: &Frame, subset: StateSet) -> Result<(Frame, SubframeKind, Vec<usize>)> {
    require_plain(frame)?;
    if subset.is_empty() {
        return Err(Error::Precondition("subframe on the empty set".into()));
    }
    if let Some(bad) = (subset - frame.states()).first() {
        return Err(Error::StateOutOfRange {
            state: bad,
            n: frame.n(),
        });
    }
    let kind = subframe_kind(frame, subset);
    let (sub, keep) = frame.induced(subset);
    let sub = if frame.is_marked_full() && kind != SubframeKind::Neither {
        Frame::from_parts(sub.poset().clone(), sub.rels().clone(), sub.props().to_vec(), true, None)
    } else {
        sub
    };
    Ok((sub, kind, keep))
}

pub fn subframe_kind(frame: &Frame, s: StateSet) -> SubframeKind {
    let p = frame.poset();
    let generated = s.iter().all(|x| {
        p.down(x).is_subset(s) && frame.rels().values().all(|r| r.succ(x).is_subset(s))
    });
    if generated {
        return SubframeKind::Generated;
    }
    let dense = s
        .iter()
        .all(|x| p.down(x).iter().all(|y| p.down(y).intersects(s)));
    let approx = frame.rels().values().all(|r| {
        s.iter().all(|x| {
            let kept = r.succ(x) & s;
            r.succ(x)
                .iter()
                .all(|y| p.down(y).iter().all(|u| p.compat(u).intersects(kept)))
        })
    });
    if dense && approx {
        SubframeKind::Selective
    } else {
        SubframeKind::Neither
    }
}

/// Adds an impossible state as state 0, below everything, seen by every
/// state and seeing only itself, and inside every admissible set.
pub fn extend_bot(frame: &Frame) -> Result<Frame> {
    require_plain(frame)?;
    let n = frame.n();
    if n + 1 > MAX_STATES {
        return Err(Error::TooManyStates(n + 1));
    }
    let bot = StateSet::singleton(0);
    let shift = |x: StateSet| StateSet(x.0 << 1);
    let down = std::iter::once(bot)
        .chain((0..n).map(|x| shift(frame.poset().down(x)) | bot))
        .collect();
    let rels = frame
        .rels()
        .iter()
        .map(|(i, r)| {
            let succ = std::iter::once(bot)
                .chain((0..n).map(|x| shift(r.succ(x)) | bot))
                .collect();
            (i.clone(), Relation::from_succ(succ))
        })
        .collect();
    let props = frame.props().iter().map(|&x| shift(x) | bot).collect();
    Ok(Frame::from_parts(
        FinitePoset::from_down_unchecked(down),
        rels,
        props,
        frame.is_marked_full(),
        Some(0),
    ))
}

/// Removes the impossible state of an extended frame.
pub fn restrict_bot(frame: &Frame) -> Result<Frame> {
    let b = frame
        .bot()
        .ok_or_else(|| Error::Precondition("frame has no impossible state".into()))?;
    let all = frame.states();
    let ok = frame.poset().up(b) == all
        && frame
            .rels()
            .values()
            .all(|r| r.succ(b) == StateSet::singleton(b) && r.predecessors(b) == all)
        && frame.props().iter().all(|x| x.contains(b));
    if !ok {
        return Err(Error::Precondition(
            "impossible state is not a minimum seen by all and kept by every admissible set"
                .into(),
        ));
    }
    let (rest, _) = frame.induced(all - StateSet::singleton(b));
    Ok(Frame::from_parts(
        rest.poset().clone(),
        rest.rels().clone(),
        rest.props().to_vec(),
        frame.is_marked_full(),
        None,
    ))
}
