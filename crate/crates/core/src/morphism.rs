//! Morphisms between possibility frames.
//!
//! A map `h: S → S'` is checked clause by clause. The grade fixes the core
//! clause set and each flag adds its own clauses; the first failing clause is
//! reported with the least violating tuple.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::bits::StateSet;
use crate::error::{Error, Result};
use crate::frame::{CheckReport, Frame, Relation, Witness};

/// Default number of search nodes [`find_morphism`] may visit.
pub const DEFAULT_NODE_LIMIT: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Grade {
    /// `⊑`-matching, `R`-matching and pull back.
    Possibility,
    /// Pull back with the forth and back conditions.
    Strict,
    /// Strict, with the back conditions hitting exact images.
    P,
}

impl Grade {
    pub fn name(self) -> &'static str {
        match self {
            Grade::Possibility => "possibility",
            Grade::Strict => "strict",
            Grade::P => "p",
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Grade {
    type Err = Error;
    fn from_str(s: &str) -> Result<Grade> {
        match s {
            "possibility" => Ok(Grade::Possibility),
            "strict" => Ok(Grade::Strict),
            "p" | "p-morphism" => Ok(Grade::P),
            _ => Err(Error::UnknownCondition(format!("morphism grade `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    Dense,
    Robust,
    StrongEmbedding,
    LeqStrongEmbedding,
    Isomorphism,
    Surjective,
    Injective,
}

impl Flag {
    pub const ALL: [Flag; 7] = [
        Flag::Dense,
        Flag::Robust,
        Flag::StrongEmbedding,
        Flag::LeqStrongEmbedding,
        Flag::Isomorphism,
        Flag::Surjective,
        Flag::Injective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flag::Dense => "dense",
            Flag::Robust => "robust",
            Flag::StrongEmbedding => "strong_embedding",
            Flag::LeqStrongEmbedding => "leq_strong_embedding",
            Flag::Isomorphism => "isomorphism",
            Flag::Surjective => "surjective",
            Flag::Injective => "injective",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Flag> {
        let norm = s.replace('-', "_");
        Flag::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| Error::UnknownCondition(format!("morphism flag `{s}`")))
    }
}

/// A map between two frames together with the grade and flags it is meant
/// to have.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismSpec {
    pub source: Frame,
    pub target: Frame,
    pub map: Vec<usize>,
    pub grade: Grade,
    pub flags: BTreeSet<Flag>,
}

impl MorphismSpec {
    /// Rejects maps that are not total functions into the target states.
    pub fn new(
        source: Frame,
        target: Frame,
        map: Vec<usize>,
        grade: Grade,
        flags: impl IntoIterator<Item = Flag>,
    ) -> Result<MorphismSpec> {
        if map.len() != source.n() {
            return Err(Error::Mismatch(format!(
                "map has {} entries for {} source states",
                map.len(),
                source.n()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.n()) {
            return Err(Error::StateOutOfRange {
                state: bad,
                n: target.n(),
            });
        }
        Ok(MorphismSpec {
            source,
            target,
            map,
            grade,
            flags: flags.into_iter().collect(),
        })
    }

    pub fn identity(frame: &Frame, grade: Grade) -> MorphismSpec {
        MorphismSpec {
            source: frame.clone(),
            target: frame.clone(),
            map: (0..frame.n()).collect(),
            grade,
            flags: BTreeSet::new(),
        }
    }

    pub fn image(&self, x: StateSet) -> StateSet {
        image(&self.map, x)
    }

    pub fn preimage(&self, y: StateSet) -> StateSet {
        preimage(&self.map, y)
    }
}

/// `h[X]`.
pub fn image(map: &[usize], x: StateSet) -> StateSet {
    x.iter().map(|s| map[s]).collect()
}

/// `h⁻¹[Y]`.
pub fn preimage(map: &[usize], y: StateSet) -> StateSet {
    (0..map.len()).filter(|&s| y.contains(map[s])).collect()
}

/// Checks every clause implied by the grade and flags.
pub fn check_morphism(spec: &MorphismSpec) -> Result<CheckReport> {
    let src_idx: Vec<&str> = spec.source.indices().collect();
    let tgt_idx: Vec<&str> = spec.target.indices().collect();
    if src_idx != tgt_idx {
        return Err(Error::Mismatch(format!(
            "source indices {src_idx:?} differ from target indices {tgt_idx:?}"
        )));
    }
    let c = Clauses::new(spec);
    let mut clauses: Vec<Clause> = match spec.grade {
        Grade::Possibility => vec![Clause::LeqMatching, Clause::RMatching, Clause::PullBack],
        Grade::Strict => vec![
            Clause::PullBack,
            Clause::LeqForth,
            Clause::LeqBack,
            Clause::RForth,
            Clause::RBack,
        ],
        Grade::P => vec![
            Clause::PullBack,
            Clause::LeqForth,
            Clause::LeqBack,
            Clause::PLeqBack,
            Clause::RForth,
            Clause::RBack,
            Clause::PRBack,
        ],
    };
    for &flag in &spec.flags {
        clauses.extend_from_slice(match flag {
            Flag::Dense => &[Clause::Dense][..],
            Flag::Robust => &[Clause::Robust],
            Flag::StrongEmbedding => &[Clause::LeqIff, Clause::RIff, Clause::TraceImage],
            Flag::LeqStrongEmbedding => &[Clause::LeqIff, Clause::TraceImage],
            Flag::Isomorphism => &[
                Clause::Bijective,
                Clause::LeqIff,
                Clause::RIff,
                Clause::PullBack,
                Clause::ForwardImage,
            ],
            Flag::Surjective => &[Clause::Surjective],
            Flag::Injective => &[Clause::Injective],
        });
    }
    let mut done = BTreeSet::new();
    for clause in clauses {
        if !done.insert(clause) {
            continue;
        }
        if let Some((name, w)) = c.check(clause) {
            return Ok(CheckReport::fails(name, w));
        }
    }
    let flags: Vec<&str> = spec.flags.iter().map(|f| f.name()).collect();
    let mut cond = format!("{} morphism", spec.grade);
    if !flags.is_empty() {
        cond.push_str(&format!(" [{}]", flags.join(", ")));
    }
    Ok(CheckReport::holds(cond))
}

/// Individual clauses of the morphism definitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Clause {
    /// `↓'h(x) ∩ X' = ∅` iff `↓x ∩ h⁻¹[X'] = ∅`. Witness `(x)` and `X'`.
    LeqMatching,
    /// `R'(h(x)) ⊆ X'` iff `R(x) ⊆ h⁻¹[X']`. Witness `(x)` and `X'`.
    RMatching,
    /// `h⁻¹[X'] ∈ P`. Witness `X'`.
    PullBack,
    /// `y ⊑ x` ⟹ `h(y) ⊑' h(x)`. Witness `(y, x)`.
    LeqForth,
    /// `y' ⊑' h(x)` ⟹ some `y ⊑ x` with `h(y) ⊑' y'`. Witness `(x, y')`.
    LeqBack,
    /// `y' ⊑' h(x)` ⟹ some `y ⊑ x` with `h(y) = y'`. Witness `(x, y')`.
    PLeqBack,
    /// `x R y` ⟹ `h(x) R' h(y)`. Witness `(x, y)`.
    RForth,
    /// `h(x) R' y'`, `z' ⊑' y'` ⟹ some `y` with `x R y` and `h(y) ≬' z'`.
    /// Witness `(x, y', z')`.
    RBack,
    /// `h(x) R' y'` ⟹ some `y` with `x R y` and `h(y) = y'`. Witness `(x, y')`.
    PRBack,
    /// Every target state is refined by an image. Witness `(x')`.
    Dense,
    /// `X = h⁻¹[h[X]]` and `h[X]` is the trace of an admissible set on
    /// `h[S]`. Witness `X`.
    Robust,
    /// `y ⊑ x` iff `h(y) ⊑' h(x)`. Witness `(y, x)`.
    LeqIff,
    /// `x R y` iff `h(x) R' h(y)`. Witness `(x, y)`.
    RIff,
    /// `h[X]` is the trace of an admissible set on `h[S]`. Witness `X`.
    TraceImage,
    /// `h[X] ∈ P'`. Witness `X`.
    ForwardImage,
    Bijective,
    Surjective,
    Injective,
}

impl Clause {
    pub fn name(self) -> &'static str {
        match self {
            Clause::LeqMatching => "⊑-matching",
            Clause::RMatching => "R-matching",
            Clause::PullBack => "pull back",
            Clause::LeqForth => "⊑-forth",
            Clause::LeqBack => "⊑-back",
            Clause::PLeqBack => "p-⊑-back",
            Clause::RForth => "R-forth",
            Clause::RBack => "R-back",
            Clause::PRBack => "p-R-back",
            Clause::Dense => "dense",
            Clause::Robust => "robust",
            Clause::LeqIff => "⊑ reflected",
            Clause::RIff => "R reflected",
            Clause::TraceImage => "images are traces",
            Clause::ForwardImage => "images admissible",
            Clause::Bijective => "bijective",
            Clause::Surjective => "surjective",
            Clause::Injective => "injective",
        }
    }
}

struct Clauses<'a> {
    src: &'a Frame,
    tgt: &'a Frame,
    h: &'a [usize],
    rels: Vec<(&'a str, &'a Relation, &'a Relation)>,
}

type Failure = Option<(String, Witness)>;

impl<'a> Clauses<'a> {
    fn new(spec: &'a MorphismSpec) -> Clauses<'a> {
        let rels = spec
            .source
            .rels()
            .iter()
            .map(|(i, r)| (i.as_str(), r, &spec.target.rels()[i]))
            .collect();
        Clauses {
            src: &spec.source,
            tgt: &spec.target,
            h: &spec.map,
            rels,
        }
    }

    fn states(&self, name: &str, xs: Vec<usize>) -> Failure {
        Some((name.to_string(), Witness::States(xs)))
    }

    fn check(&self, clause: Clause) -> Failure {
        let (src, tgt, h) = (self.src, self.tgt, self.h);
        let (sp, tp) = (src.poset(), tgt.poset());
        let n = src.n();
        let name = clause.name();
        match clause {
            Clause::LeqMatching => {
                for x in 0..n {
                    for &xp in tgt.props() {
                        let lhs = !tp.down(h[x]).intersects(xp);
                        let rhs = !sp.down(x).intersects(preimage(h, xp));
                        if lhs != rhs {
                            return Some((
                                name.into(),
                                Witness::StatesAndSets {
                                    states: vec![x],
                                    sets: vec![xp],
                                },
                            ));
                        }
                    }
                }
                None
            }
            Clause::RMatching => {
                for &(i, r, rt) in &self.rels {
                    for x in 0..n {
                        for &xp in tgt.props() {
                            let lhs = rt.succ(h[x]).is_subset(xp);
                            let rhs = r.succ(x).is_subset(preimage(h, xp));
                            if lhs != rhs {
                                return Some((
                                    format!("{name}[{i}]"),
                                    Witness::StatesAndSets {
                                        states: vec![x],
                                        sets: vec![xp],
                                    },
                                ));
                            }
                        }
                    }
                }
                None
            }
            Clause::PullBack => tgt
                .props()
                .iter()
                .find(|&&xp| !src.is_admissible(preimage(h, xp)))
                .map(|&xp| (name.to_string(), Witness::Sets(vec![xp]))),
            Clause::LeqForth | Clause::LeqIff => {
                for y in 0..n {
                    for x in 0..n {
                        let lhs = sp.leq(y, x);
                        let rhs = tp.leq(h[y], h[x]);
                        let bad = if clause == Clause::LeqForth {
                            lhs && !rhs
                        } else {
                            lhs != rhs
                        };
                        if bad {
                            return self.states(name, vec![y, x]);
                        }
                    }
                }
                None
            }
            Clause::LeqBack | Clause::PLeqBack => {
                for x in 0..n {
                    let below: Vec<usize> = sp.down(x).iter().map(|y| h[y]).collect();
                    for yp in tp.down(h[x]).iter() {
                        let ok = if clause == Clause::LeqBack {
                            below.iter().any(|&hy| tp.leq(hy, yp))
                        } else {
                            below.contains(&yp)
                        };
                        if !ok {
                            return self.states(name, vec![x, yp]);
                        }
                    }
                }
                None
            }
            Clause::RForth | Clause::RIff => {
                for &(i, r, rt) in &self.rels {
                    for x in 0..n {
                        for y in 0..n {
                            let lhs = r.contains(x, y);
                            let rhs = rt.contains(h[x], h[y]);
                            let bad = if clause == Clause::RForth {
                                lhs && !rhs
                            } else {
                                lhs != rhs
                            };
                            if bad {
                                return self.states(&format!("{name}[{i}]"), vec![x, y]);
                            }
                        }
                    }
                }
                None
            }
            Clause::RBack => {
                for &(i, r, rt) in &self.rels {
                    for x in 0..n {
                        let reach = image(h, r.succ(x));
                        for yp in rt.succ(h[x]).iter() {
                            for zp in tp.down(yp).iter() {
                                if !tp.compat(zp).intersects(reach) {
                                    return self.states(&format!("{name}[{i}]"), vec![x, yp, zp]);
                                }
                            }
                        }
                    }
                }
                None
            }
            Clause::PRBack => {
                for &(i, r, rt) in &self.rels {
                    for x in 0..n {
                        let reach = image(h, r.succ(x));
                        if let Some(yp) = (rt.succ(h[x]) - reach).first() {
                            return self.states(&format!("{name}[{i}]"), vec![x, yp]);
                        }
                    }
                }
                None
            }
            Clause::Dense => {
                let imgs = image(h, src.states());
                (0..tgt.n())
                    .find(|&xp| !tp.down(xp).intersects(imgs))
                    .and_then(|xp| self.states(name, vec![xp]))
            }
            Clause::Robust => src
                .props()
                .iter()
                .find(|&&x| preimage(h, image(h, x)) != x || !self.is_trace(image(h, x)))
                .map(|&x| (name.to_string(), Witness::Sets(vec![x]))),
            Clause::TraceImage => src
                .props()
                .iter()
                .find(|&&x| !self.is_trace(image(h, x)))
                .map(|&x| (name.to_string(), Witness::Sets(vec![x]))),
            Clause::ForwardImage => src
                .props()
                .iter()
                .find(|&&x| !tgt.is_admissible(image(h, x)))
                .map(|&x| (name.to_string(), Witness::Sets(vec![x]))),
            Clause::Bijective => {
                if n != tgt.n() {
                    return Some((name.into(), Witness::Text(format!("{n} vs {} states", tgt.n()))));
                }
                self.check(Clause::Injective).map(|(_, w)| (name.to_string(), w))
            }
            Clause::Surjective => (tgt.states() - image(h, src.states()))
                .first()
                .and_then(|xp| self.states(name, vec![xp])),
            Clause::Injective => {
                for y in 0..n {
                    for x in y + 1..n {
                        if h[x] == h[y] {
                            return self.states(name, vec![y, x]);
                        }
                    }
                }
                None
            }
        }
    }

    /// `Y = h[S] ∩ X'` for some admissible `X'`.
    fn is_trace(&self, y: StateSet) -> bool {
        let range = image(self.h, self.src.states());
        self.tgt.props().iter().any(|&xp| range & xp == y)
    }
}

/// The closure form of `R`-back: `⇓R'(h(x)) ⊆ cl(⇓h[R(x)])` for every `x`.
pub fn r_back_closure_form(spec: &MorphismSpec, index: &str) -> Result<bool> {
    let r = spec.source.rel(index)?;
    let rt = spec.target.rel(index)?;
    let tp = spec.target.poset();
    Ok((0..spec.source.n()).all(|x| {
        let lhs = tp.down_set(rt.succ(spec.map[x]));
        let rhs = tp.closure(tp.down_set(spec.image(r.succ(x))));
        lhs.is_subset(rhs)
    }))
}

/// `g ∘ f`, checked at the weaker of the two grades and keeping the flags
/// both carry.
pub fn compose(f: &MorphismSpec, g: &MorphismSpec) -> Result<MorphismSpec> {
    if f.target != g.source {
        return Err(Error::Mismatch(
            "target of the first map is not the source of the second".into(),
        ));
    }
    let map = f.map.iter().map(|&y| g.map[y]).collect();
    Ok(MorphismSpec {
        source: f.source.clone(),
        target: g.target.clone(),
        map,
        grade: f.grade.min(g.grade),
        flags: f.flags.intersection(&g.flags).copied().collect(),
    })
}

/// Search for the lexicographically least map with the given grade and flags.
pub fn find_morphism(
    source: &Frame,
    target: &Frame,
    grade: Grade,
    flags: &[Flag],
) -> Result<Option<MorphismSpec>> {
    find_morphism_with_limit(source, target, grade, flags, DEFAULT_NODE_LIMIT)
}

/// As [`find_morphism`], with an explicit bound on visited search nodes.
pub fn find_morphism_with_limit(
    source: &Frame,
    target: &Frame,
    grade: Grade,
    flags: &[Flag],
    node_limit: u64,
) -> Result<Option<MorphismSpec>> {
    let mut spec = MorphismSpec::new(
        source.clone(),
        target.clone(),
        vec![0; source.n()],
        grade,
        flags.iter().copied(),
    )?;
    if source.n() == 0 {
        spec.map.clear();
        return Ok(check_morphism(&spec)?.verdict.then_some(spec));
    }
    if target.n() == 0 {
        return Ok(None);
    }
    let src_idx: Vec<&str> = source.indices().collect();
    let tgt_idx: Vec<&str> = target.indices().collect();
    if src_idx != tgt_idx {
        return Err(Error::Mismatch("index sets differ".into()));
    }
    let fl: BTreeSet<Flag> = flags.iter().copied().collect();
    let embed = fl.contains(&Flag::StrongEmbedding)
        || fl.contains(&Flag::LeqStrongEmbedding)
        || fl.contains(&Flag::Isomorphism);
    let prune = Prune {
        leq_forth: grade != Grade::Possibility || embed,
        leq_iff: embed,
        r_forth: grade != Grade::Possibility
            || fl.contains(&Flag::StrongEmbedding)
            || fl.contains(&Flag::Isomorphism),
        r_iff: fl.contains(&Flag::StrongEmbedding) || fl.contains(&Flag::Isomorphism),
        injective: embed || fl.contains(&Flag::Injective),
    };
    if fl.contains(&Flag::Isomorphism) && source.n() != target.n() {
        return Ok(None);
    }
    let mut search = Search {
        src: source,
        tgt: target,
        prune,
        nodes: 0,
        limit: node_limit,
        map: Vec::with_capacity(source.n()),
        spec: &mut spec,
    };
    search.run()
}

struct Prune {
    leq_forth: bool,
    leq_iff: bool,
    r_forth: bool,
    r_iff: bool,
    injective: bool,
}

struct Search<'a> {
    src: &'a Frame,
    tgt: &'a Frame,
    prune: Prune,
    nodes: u64,
    limit: u64,
    map: Vec<usize>,
    spec: &'a mut MorphismSpec,
}

impl Search<'_> {
    fn run(&mut self) -> Result<Option<MorphismSpec>> {
        if self.extend()? {
            Ok(Some(self.spec.clone()))
        } else {
            Ok(None)
        }
    }

    fn extend(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::BudgetExceeded(self.limit));
        }
        let x = self.map.len();
        if x == self.src.n() {
            self.spec.map.clone_from(&self.map);
            return Ok(check_morphism(self.spec)?.verdict);
        }
        for v in 0..self.tgt.n() {
            if self.consistent(x, v) {
                self.map.push(v);
                if self.extend()? {
                    return Ok(true);
                }
                self.map.pop();
            }
        }
        Ok(false)
    }

    /// Whether assigning `h(x) = v` keeps the partial map free of violations
    /// that no later choice could repair.
    fn consistent(&self, x: usize, v: usize) -> bool {
        let (sp, tp) = (self.src.poset(), self.tgt.poset());
        for (y, &w) in self.map.iter().enumerate() {
            if self.prune.injective && w == v {
                return false;
            }
            for (a, b, ha, hb) in [(y, x, w, v), (x, y, v, w)] {
                let s = sp.leq(a, b);
                let t = tp.leq(ha, hb);
                if (self.prune.leq_forth && s && !t) || (self.prune.leq_iff && s != t) {
                    return false;
                }
            }
            for (i, r) in self.src.rels() {
                let rt = &self.tgt.rels()[i];
                for (a, b, ha, hb) in [(y, x, w, v), (x, y, v, w)] {
                    let s = r.contains(a, b);
                    let t = rt.contains(ha, hb);
                    if (self.prune.r_forth && s && !t) || (self.prune.r_iff && s != t) {
                        return false;
                    }
                }
            }
        }
        for (i, r) in self.src.rels() {
            let rt = &self.tgt.rels()[i];
            let s = r.contains(x, x);
            let t = rt.contains(v, v);
            if (self.prune.r_forth && s && !t) || (self.prune.r_iff && s != t) {
                return false;
            }
        }
        // Pull back restricted to the states assigned so far: each preimage
        // must agree there with some admissible set.
        let assigned = StateSet::full(x + 1);
        self.tgt.props().iter().all(|&xp| {
            let mut pre = StateSet::EMPTY;
            for (y, &w) in self.map.iter().enumerate() {
                if xp.contains(w) {
                    pre.insert(y);
                }
            }
            if xp.contains(v) {
                pre.insert(x);
            }
            self.src.props().iter().any(|&z| z & assigned == pre)
        })
    }
}

/// A bijection preserving and reflecting `⊑`, every relation and the
/// admissible family, if one exists.
pub fn are_isomorphic(f: &Frame, g: &Frame) -> Result<Option<Vec<usize>>> {
    are_isomorphic_with_limit(f, g, DEFAULT_NODE_LIMIT)
}

pub fn are_isomorphic_with_limit(f: &Frame, g: &Frame, node_limit: u64) -> Result<Option<Vec<usize>>> {
    if f.n() != g.n()
        || f.props().len() != g.props().len()
        || !f.indices().eq(g.indices())
        || f.bot().is_some() != g.bot().is_some()
    {
        return Ok(None);
    }
    let sig = |fr: &Frame, x: usize| -> Vec<usize> {
        let p = fr.poset();
        let mut s = vec![
            p.down(x).len(),
            p.up(x).len(),
            fr.admissible_at(x).len(),
        ];
        for r in fr.rels().values() {
            s.push(r.succ(x).len());
            s.push(r.predecessors(x).len());
        }
        s
    };
    let fs: Vec<Vec<usize>> = (0..f.n()).map(|x| sig(f, x)).collect();
    let gs: Vec<Vec<usize>> = (0..g.n()).map(|x| sig(g, x)).collect();
    let mut a = fs.clone();
    let mut b = gs.clone();
    a.sort();
    b.sort();
    if a != b {
        return Ok(None);
    }
    let mut iso = IsoSearch {
        f,
        g,
        fs,
        gs,
        map: Vec::new(),
        used: StateSet::EMPTY,
        nodes: 0,
        limit: node_limit,
    };
    if iso.extend()? {
        Ok(Some(iso.map))
    } else {
        Ok(None)
    }
}

struct IsoSearch<'a> {
    f: &'a Frame,
    g: &'a Frame,
    fs: Vec<Vec<usize>>,
    gs: Vec<Vec<usize>>,
    map: Vec<usize>,
    used: StateSet,
    nodes: u64,
    limit: u64,
}

impl IsoSearch<'_> {
    fn extend(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::BudgetExceeded(self.limit));
        }
        let x = self.map.len();
        if x == self.f.n() {
            let ok = self
                .f
                .props()
                .iter()
                .all(|&z| self.g.is_admissible(image(&self.map, z)));
            return Ok(ok);
        }
        for v in 0..self.g.n() {
            if self.used.contains(v) || self.fs[x] != self.gs[v] || !self.consistent(x, v) {
                continue;
            }
            self.map.push(v);
            self.used.insert(v);
            if self.extend()? {
                return Ok(true);
            }
            self.map.pop();
            self.used.remove(v);
        }
        Ok(false)
    }

    fn consistent(&self, x: usize, v: usize) -> bool {
        let (fp, gp) = (self.f.poset(), self.g.poset());
        let pairs = self
            .map
            .iter()
            .enumerate()
            .map(|(y, &w)| (y, w))
            .chain(std::iter::once((x, v)));
        for (y, w) in pairs {
            if fp.leq(y, x) != gp.leq(w, v) || fp.leq(x, y) != gp.leq(v, w) {
                return false;
            }
            for (i, r) in self.f.rels() {
                let rg = &self.g.rels()[i];
                if r.contains(y, x) != rg.contains(w, v) || r.contains(x, y) != rg.contains(v, w) {
                    return false;
                }
            }
        }
        if self.f.bot() == Some(x) && self.g.bot() != Some(v) {
            return false;
        }
        true
    }
}
