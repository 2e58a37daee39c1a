//! Finite Boolean algebras with operators and their passage to and from
//! possibility frames.
//!
//! An algebra is stored as a field of sets over `universe` points, elements
//! in canonical order (so element 0 is always `⊥`). Operators are tables of
//! element indices. Every finite Boolean algebra is a powerset, so nothing is
//! lost by this; it also makes filters and homomorphisms cheap.
//!
//! Numbering conventions used throughout:
//! * the state `s` of a principal frame `A•` is the nonzero element `s + 1`;
//! * filters are listed by their generator, so filter `s` is `↑(s + 1)` and
//!   the state `s` of `A_gff` or `A_ff` is that filter.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::bits::{StateSet, MAX_STATES};
use crate::error::{Error, Result};
use crate::formula::{Formula, RESERVED_VAR};
use crate::frame::{admissible_hull_of, classify, validate_frame, FinitePoset, Frame, Relation};
use crate::morphism::{check_morphism, preimage, Flag, Grade, MorphismSpec};
use crate::report::{CheckReport, Witness};

/// Canonicity of Lemmon-Scott inequalities for filter frames lives with the
/// schemas it is stated for.
pub use crate::correspondence::lemmon_scott_filter_canonicity;

/// Work limit for [`algebraic_valid`], counted in formula nodes evaluated.
pub const ALGEBRA_BUDGET: u64 = 20_000_000;

/// Largest product [`product`] will build, in elements.
pub const MAX_PRODUCT_ELEMENTS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBAO {
    universe: usize,
    elements: Vec<StateSet>,
    ops: BTreeMap<String, Vec<usize>>,
    index: HashMap<StateSet, usize>,
}

impl FiniteBAO {
    /// Builds an algebra from a field of sets and operator tables aligned with
    /// `elements` (`ops[i][k]` is `■ᵢ elements[k]`). The elements are put in
    /// canonical order.
    pub fn new(
        universe: usize,
        elements: Vec<StateSet>,
        ops: BTreeMap<String, Vec<StateSet>>,
    ) -> Result<FiniteBAO> {
        if universe > MAX_STATES {
            return Err(Error::TooManyStates(universe));
        }
        let all = StateSet::full(universe);
        let mut sorted = elements.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != elements.len() {
            return Err(Error::InvalidAlgebra("repeated element".into()));
        }
        if let Some(x) = sorted.iter().find(|x| !x.is_subset(all)) {
            return Err(Error::InvalidAlgebra(format!(
                "element {x} leaves the {universe}-point universe"
            )));
        }
        let index: HashMap<StateSet, usize> =
            sorted.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let field = |x: StateSet| index.contains_key(&x);
        if !field(StateSet::EMPTY) || !field(all) {
            return Err(Error::InvalidAlgebra("bottom or top missing".into()));
        }
        for &a in &sorted {
            if !field(all - a) {
                return Err(Error::InvalidAlgebra(format!("complement of {a} missing")));
            }
            for &b in &sorted {
                if !field(a & b) {
                    return Err(Error::InvalidAlgebra(format!("meet of {a} and {b} missing")));
                }
            }
        }
        let mut tables = BTreeMap::new();
        for (i, table) in ops {
            if table.len() != elements.len() {
                return Err(Error::InvalidAlgebra(format!(
                    "operator {i} has {} entries for {} elements",
                    table.len(),
                    elements.len()
                )));
            }
            let mut t = vec![0; sorted.len()];
            for (x, y) in elements.iter().zip(&table) {
                t[index[x]] = *index.get(y).ok_or_else(|| {
                    Error::InvalidAlgebra(format!("operator {i} sends {x} outside the algebra"))
                })?;
            }
            tables.insert(i, t);
        }
        Ok(FiniteBAO {
            universe,
            elements: sorted,
            ops: tables,
            index,
        })
    }

    /// Builds the operator tables by evaluating `f(index, element)`.
    pub fn from_fn(
        universe: usize,
        elements: Vec<StateSet>,
        indices: &[&str],
        f: impl Fn(&str, StateSet) -> StateSet,
    ) -> Result<FiniteBAO> {
        let ops = indices
            .iter()
            .map(|&i| (i.to_string(), elements.iter().map(|&x| f(i, x)).collect()))
            .collect();
        FiniteBAO::new(universe, elements, ops)
    }

    /// The powerset of `m` atoms with operators given by `f`.
    pub fn powerset(
        m: usize,
        indices: &[&str],
        f: impl Fn(&str, StateSet) -> StateSet,
    ) -> Result<FiniteBAO> {
        if m > 16 {
            return Err(Error::CapExceeded(format!("powerset of {m} atoms")));
        }
        let elements = StateSet::full(m).subsets().collect();
        FiniteBAO::from_fn(m, elements, indices, f)
    }

    /// The complex algebra of a relation on `m` points: `■X = {a | R(a) ⊆ X}`.
    pub fn complex_algebra(m: usize, rels: &BTreeMap<String, Relation>) -> Result<FiniteBAO> {
        let idx: Vec<&str> = rels.keys().map(String::as_str).collect();
        FiniteBAO::powerset(m, &idx, |i, x| {
            let r = &rels[i];
            (0..m).filter(|&a| r.succ(a).is_subset(x)).collect()
        })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[StateSet] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> StateSet {
        self.elements[k]
    }

    pub fn index_of(&self, x: StateSet) -> Option<usize> {
        self.index.get(&x).copied()
    }

    pub fn indices(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(String::as_str)
    }

    pub fn ops(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.ops
    }

    pub fn op(&self, index: &str) -> Result<&[usize]> {
        self.ops
            .get(index)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownIndex(index.to_string()))
    }

    fn at(&self, x: StateSet) -> usize {
        self.index[&x]
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.at(self.elements[a] & self.elements[b])
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.at(self.elements[a] | self.elements[b])
    }

    pub fn complement(&self, a: usize) -> usize {
        self.at(StateSet::full(self.universe) - self.elements[a])
    }

    pub fn imp(&self, a: usize, b: usize) -> usize {
        self.join(self.complement(a), b)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.elements[a].is_subset(self.elements[b])
    }

    /// `■ᵢ a` for an index known to exist.
    pub fn boxed(&self, index: &str, a: usize) -> usize {
        self.ops[index][a]
    }

    /// `♦ᵢ a = −■ᵢ−a`.
    pub fn dia(&self, index: &str, a: usize) -> usize {
        self.complement(self.boxed(index, self.complement(a)))
    }

    /// Meet of a family; `⊤` for the empty family.
    pub fn meet_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top(), |acc, x| self.meet(acc, x))
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bottom(), |acc, x| self.join(acc, x))
    }

    /// Minimal nonzero elements.
    pub fn atoms(&self) -> Vec<usize> {
        (1..self.len())
            .filter(|&a| (1..self.len()).all(|b| b == a || !self.leq(b, a)))
            .collect()
    }

    /// Nonzero elements below `a`.
    pub fn nonzero_below(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (1..self.len()).filter(move |&b| self.leq(b, a))
    }

    fn check_index_set(&self, other: &FiniteBAO) -> Result<()> {
        if self.ops.keys().eq(other.ops.keys()) {
            Ok(())
        } else {
            Err(Error::Mismatch("algebras have different index sets".into()))
        }
    }
}

/// Checks the field-of-sets laws and, per index, `■⊤ = ⊤` and
/// `■(a ∧ b) = ■a ∧ ■b`.
pub fn validate_bao(b: &FiniteBAO) -> CheckReport {
    let all = StateSet::full(b.universe);
    for &x in &b.elements {
        if b.index_of(all - x).is_none() {
            return CheckReport::fails("closed under complement", Witness::Sets(vec![x]));
        }
        for &y in &b.elements {
            if b.index_of(x & y).is_none() {
                return CheckReport::fails("closed under intersection", Witness::Sets(vec![x, y]));
            }
        }
    }
    for (i, t) in &b.ops {
        if t[b.top()] != b.top() {
            return CheckReport::fails(
                format!("box preserves top[{i}]"),
                Witness::Sets(vec![all]),
            );
        }
        for x in 0..b.len() {
            for y in x..b.len() {
                if t[b.meet(x, y)] != b.meet(t[x], t[y]) {
                    return CheckReport::fails(
                        format!("box preserves meets[{i}]"),
                        Witness::Sets(vec![b.elements[x], b.elements[y]]),
                    );
                }
            }
        }
    }
    CheckReport::holds("BAO")
}

fn require_bao(b: &FiniteBAO) -> Result<()> {
    let r = validate_bao(b);
    if r.verdict {
        Ok(())
    } else {
        Err(Error::InvalidAlgebra(r.to_string().replace('\n', "; ")))
    }
}

fn require_nontrivial(b: &FiniteBAO) -> Result<()> {
    require_bao(b)?;
    if b.is_trivial() {
        return Err(Error::Precondition("the one-element algebra has no states".into()));
    }
    if b.len() - 1 > MAX_STATES {
        return Err(Error::TooManyStates(b.len() - 1));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaoClassification {
    pub trivial: bool,
    pub v_condition: bool,
    pub t_adjoint: bool,
}

impl BaoClassification {
    pub fn flags(&self) -> [(&'static str, bool); 3] {
        [
            ("trivial", self.trivial),
            ("V_condition", self.v_condition),
            ("T_adjoint", self.t_adjoint),
        ]
    }
}

pub fn classify_bao(b: &FiniteBAO) -> Result<BaoClassification> {
    require_bao(b)?;
    Ok(BaoClassification {
        trivial: b.is_trivial(),
        v_condition: v_condition(b).verdict,
        t_adjoint: b.ops.keys().all(|i| t_adjoint(b, i).is_some()),
    })
}

/// `x R y` in the principal frame: every nonzero `y' ≤ y` has `x ∧ ♦y' ≠ ⊥`.
pub fn algebra_r(b: &FiniteBAO, index: &str, x: usize, y: usize) -> bool {
    b.nonzero_below(y).all(|y2| b.meet(x, b.dia(index, y2)) != 0)
}

/// Whenever `x ∧ ♦y ≠ ⊥`, some nonzero `y' ≤ y` has `x R y'`. Witness:
/// the elements `(x, y)`.
pub fn v_condition(b: &FiniteBAO) -> CheckReport {
    for i in b.ops.keys() {
        for x in 0..b.len() {
            for y in 0..b.len() {
                if b.meet(x, b.dia(i, y)) == 0 {
                    continue;
                }
                if !b.nonzero_below(y).any(|y2| algebra_r(b, i, x, y2)) {
                    return CheckReport::fails(
                        format!("V condition[{i}]"),
                        Witness::Elements(vec![x, y]),
                    );
                }
            }
        }
    }
    CheckReport::holds("V condition")
}

/// The left adjoint of `■ᵢ`, if it has one. The only candidate is
/// `f(x) = ⋀{y | x ≤ ■y}`; this checks `x ≤ ■y ⟺ f(x) ≤ y` for it.
pub fn t_adjoint(b: &FiniteBAO, index: &str) -> Option<Vec<usize>> {
    let t = b.ops.get(index)?;
    let f: Vec<usize> = (0..b.len())
        .map(|x| b.meet_all((0..b.len()).filter(|&y| b.leq(x, t[y]))))
        .collect();
    let ok = (0..b.len()).all(|x| (0..b.len()).all(|y| b.leq(x, t[y]) == b.leq(f[x], y)));
    ok.then_some(f)
}

/// `F⋆`, with the admissible set each element stands for.
///
/// The elements are sets of atoms of `P` (its minimal nonempty members);
/// complement is `int(S ∖ X)` and `■ᵢ` comes from `Rᵢ`.
pub fn underlying_bao_labeled(frame: &Frame) -> Result<(FiniteBAO, Vec<StateSet>)> {
    if frame.bot().is_some() {
        return Err(Error::Precondition(
            "extended frame: restrict away the impossible state first".into(),
        ));
    }
    let report = validate_frame(frame);
    if !report.verdict {
        return Err(Error::InvalidFrame(report.to_string().replace('\n', "; ")));
    }
    let props = frame.props();
    let atoms: Vec<StateSet> = props
        .iter()
        .copied()
        .filter(|x| !x.is_empty() && props.iter().all(|y| y.is_empty() || !y.is_subset(*x) || y == x))
        .collect();
    if atoms.len() > MAX_STATES {
        return Err(Error::TooManyStates(atoms.len()));
    }
    let code = |x: StateSet| -> StateSet {
        (0..atoms.len()).filter(|&k| atoms[k].is_subset(x)).collect()
    };
    let mut pairs: Vec<(StateSet, StateSet)> = props.iter().map(|&x| (code(x), x)).collect();
    pairs.sort();
    let elements: Vec<StateSet> = pairs.iter().map(|p| p.0).collect();
    let labels: Vec<StateSet> = pairs.iter().map(|p| p.1).collect();
    let ops = frame
        .rels()
        .iter()
        .map(|(i, r)| {
            let t = labels.iter().map(|&x| code(frame.box_with(r, x))).collect();
            (i.clone(), t)
        })
        .collect();
    let b = FiniteBAO::new(atoms.len(), elements, ops)?;
    Ok((b, labels))
}

/// `F⋆`: the admissible sets under `∩`, relative complement and `■ᵢ`.
pub fn underlying_bao(frame: &Frame) -> Result<FiniteBAO> {
    underlying_bao_labeled(frame).map(|(b, _)| b)
}

fn principal_parts(b: &FiniteBAO) -> Result<(FinitePoset, BTreeMap<String, Relation>)> {
    require_nontrivial(b)?;
    let n = b.len() - 1;
    let down = (0..n)
        .map(|s| b.nonzero_below(s + 1).map(|e| e - 1).collect())
        .collect();
    let poset = FinitePoset::from_down_sets(down)?;
    let rels = b
        .ops
        .keys()
        .map(|i| {
            let succ = (0..n)
                .map(|x| (0..n).filter(|&y| algebra_r(b, i, x + 1, y + 1)).collect())
                .collect();
            (i.clone(), Relation::from_succ(succ))
        })
        .collect();
    Ok((poset, rels))
}

/// `A•`: nonzero elements, `⊑` the algebra order, admissible sets the
/// principal down-sets and `∅`.
pub fn principal_frame(b: &FiniteBAO) -> Result<Frame> {
    let (poset, rels) = principal_parts(b)?;
    let mut props: Vec<StateSet> = (0..b.len())
        .map(|a| b.nonzero_below(a).map(|e| e - 1).collect())
        .collect();
    props.sort();
    Frame::new(poset, rels, props)
}

/// `A◦`: as [`principal_frame`] with every regular open set admissible. For
/// finite algebras the two coincide.
pub fn full_frame(b: &FiniteBAO) -> Result<Frame> {
    let (poset, rels) = principal_parts(b)?;
    Frame::full(poset, rels)
}

/// Proper filters, each as a set of element indices; filter `s` is `↑(s+1)`.
pub fn filters(b: &FiniteBAO) -> Result<Vec<StateSet>> {
    require_bao(b)?;
    if b.len() > MAX_STATES {
        return Err(Error::TooManyStates(b.len()));
    }
    Ok((1..b.len()).map(|a| up_of(b, a)).collect())
}

fn up_of(b: &FiniteBAO, a: usize) -> StateSet {
    (0..b.len()).filter(|&y| b.leq(a, y)).collect()
}

/// The filter generated by `seeds`, or `None` if it is improper.
pub fn generated_filter(b: &FiniteBAO, seeds: &[usize]) -> Result<Option<StateSet>> {
    require_bao(b)?;
    if b.len() > MAX_STATES {
        return Err(Error::TooManyStates(b.len()));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= b.len()) {
        return Err(Error::StateOutOfRange {
            state: bad,
            n: b.len(),
        });
    }
    let m = b.meet_all(seeds.iter().copied());
    Ok((m != 0).then(|| up_of(b, m)))
}

fn filter_parts(b: &FiniteBAO) -> Result<(FinitePoset, BTreeMap<String, Relation>, Vec<StateSet>)> {
    require_nontrivial(b)?;
    let fs = filters(b)?;
    let n = fs.len();
    let down = (0..n)
        .map(|y| (0..n).filter(|&x| fs[y].is_subset(fs[x])).collect())
        .collect();
    let poset = FinitePoset::from_down_sets(down)?;
    let rels = b
        .ops
        .iter()
        .map(|(i, t)| {
            let succ = (0..n)
                .map(|x| {
                    (0..n)
                        .filter(|&y| (0..b.len()).all(|a| !fs[x].contains(t[a]) || fs[y].contains(a)))
                        .collect()
                })
                .collect();
            (i.clone(), Relation::from_succ(succ))
        })
        .collect();
    let hats = (0..b.len())
        .map(|a| (0..n).filter(|&s| fs[s].contains(a)).collect())
        .collect();
    Ok((poset, rels, hats))
}

/// `x̂`: the filters containing element `a`, as a state set of `A_gff`.
pub fn hat(b: &FiniteBAO, a: usize) -> StateSet {
    (1..b.len()).filter(|&g| b.leq(g, a)).map(|g| g - 1).collect()
}

/// `A_gff`: proper filters, reverse inclusion, admissible sets the `x̂`.
pub fn general_filter_frame(b: &FiniteBAO) -> Result<Frame> {
    let (poset, rels, hats) = filter_parts(b)?;
    Frame::new(poset, rels, hats)
}

/// `A_ff`: as [`general_filter_frame`] with every regular open set admissible.
pub fn filter_frame(b: &FiniteBAO) -> Result<Frame> {
    let (poset, rels, _) = filter_parts(b)?;
    Frame::full(poset, rels)
}

/// A map between algebras, as element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaoMap {
    pub source: FiniteBAO,
    pub target: FiniteBAO,
    pub map: Vec<usize>,
}

impl BaoMap {
    pub fn new(source: FiniteBAO, target: FiniteBAO, map: Vec<usize>) -> Result<BaoMap> {
        if map.len() != source.len() {
            return Err(Error::Mismatch(format!(
                "map has {} entries for {} elements",
                map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.len()) {
            return Err(Error::StateOutOfRange {
                state: bad,
                n: target.len(),
            });
        }
        Ok(BaoMap { source, target, map })
    }

    pub fn identity(b: &FiniteBAO) -> BaoMap {
        BaoMap {
            source: b.clone(),
            target: b.clone(),
            map: (0..b.len()).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.map.iter().collect::<BTreeSet<_>>().len() == self.map.len()
    }

    pub fn is_surjective(&self) -> bool {
        self.map.iter().collect::<BTreeSet<_>>().len() == self.target.len()
    }

    /// `self` then `next`.
    pub fn then(&self, next: &BaoMap) -> Result<BaoMap> {
        if self.target != next.source {
            return Err(Error::Mismatch("maps do not compose".into()));
        }
        Ok(BaoMap {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&y| next.map[y]).collect(),
        })
    }
}

/// Preservation of `⊤`, `∧`, `−` and every `■ᵢ`; with `complete`, also of
/// meets of arbitrary families (exhaustively for algebras of at most 16
/// elements, where the family count stays small).
pub fn check_bao_hom(h: &BaoMap, complete: bool) -> Result<CheckReport> {
    let (a, b, f) = (&h.source, &h.target, &h.map);
    a.check_index_set(b)?;
    if f[a.top()] != b.top() {
        return Ok(CheckReport::fails("preserves top", Witness::Elements(vec![a.top()])));
    }
    for x in 0..a.len() {
        if f[a.complement(x)] != b.complement(f[x]) {
            return Ok(CheckReport::fails("preserves complement", Witness::Elements(vec![x])));
        }
        for y in x..a.len() {
            if f[a.meet(x, y)] != b.meet(f[x], f[y]) {
                return Ok(CheckReport::fails("preserves meets", Witness::Elements(vec![x, y])));
            }
        }
        for (i, t) in &a.ops {
            if f[t[x]] != b.boxed(i, f[x]) {
                return Ok(CheckReport::fails(
                    format!("preserves box[{i}]"),
                    Witness::Elements(vec![x]),
                ));
            }
        }
    }
    if complete && a.len() <= 16 {
        for fam in StateSet::full(a.len()).subsets() {
            let m = a.meet_all(fam.iter());
            if f[m] != b.meet_all(fam.iter().map(|x| f[x])) {
                return Ok(CheckReport::fails(
                    "preserves arbitrary meets",
                    Witness::Elements(fam.to_vec()),
                ));
            }
        }
    }
    Ok(CheckReport::holds(if complete {
        "complete BAO homomorphism"
    } else {
        "BAO homomorphism"
    }))
}

fn require_hom(h: &BaoMap, complete: bool) -> Result<()> {
    let r = check_bao_hom(h, complete)?;
    if r.verdict {
        Ok(())
    } else {
        Err(Error::Precondition(r.to_string().replace('\n', "; ")))
    }
}

fn require_morphism(h: &MorphismSpec) -> Result<()> {
    let r = check_morphism(h)?;
    if r.verdict {
        Ok(())
    } else {
        Err(Error::Precondition(r.to_string().replace('\n', "; ")))
    }
}

/// For `h: F → G`, the map `h⋆: G⋆ → F⋆`, `X' ↦ h⁻¹[X']`.
pub fn dual_hom_under(h: &MorphismSpec) -> Result<BaoMap> {
    require_morphism(h)?;
    let (fs, fl) = underlying_bao_labeled(&h.source)?;
    let (gs, gl) = underlying_bao_labeled(&h.target)?;
    let pos: HashMap<StateSet, usize> = fl.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let map = gl
        .iter()
        .map(|&x| {
            pos.get(&preimage(&h.map, x))
                .copied()
                .ok_or_else(|| Error::Precondition("preimage is not admissible".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    BaoMap::new(gs, fs, map)
}

/// For a complete homomorphism `h: A → B`, the p-morphism `h♭: B• → A•`,
/// `x ↦ ⋀{a | x ≤ h(a)}`.
pub fn dual_hom_rela(h: &BaoMap) -> Result<MorphismSpec> {
    require_hom(h, true)?;
    let (a, b) = (&h.source, &h.target);
    let src = principal_frame(b)?;
    let tgt = principal_frame(a)?;
    let map = (1..b.len())
        .map(|x| a.meet_all((0..a.len()).filter(|&y| b.leq(x, h.map[y]))) - 1)
        .collect();
    MorphismSpec::new(src, tgt, map, Grade::P, [])
}

/// For a homomorphism `h: A → B`, the p-morphism `h_gff: B_gff → A_gff`,
/// `F ↦ h⁻¹[F]`.
pub fn dual_hom_gff(h: &BaoMap) -> Result<MorphismSpec> {
    require_hom(h, false)?;
    let (a, b) = (&h.source, &h.target);
    let src = general_filter_frame(b)?;
    let tgt = general_filter_frame(a)?;
    let fs = filters(b)?;
    let map = fs
        .iter()
        .map(|&f| {
            let pre = (0..a.len()).filter(|&y| f.contains(h.map[y]));
            a.meet_all(pre) - 1
        })
        .collect();
    MorphismSpec::new(src, tgt, map, Grade::P, [])
}

/// `ζ_A: A → (A•)⋆`, `x ↦ {x' ≠ ⊥ | x' ≤ x}`.
pub fn zeta_a(b: &FiniteBAO) -> Result<BaoMap> {
    let frame = principal_frame(b)?;
    let (star, labels) = underlying_bao_labeled(&frame)?;
    let pos: HashMap<StateSet, usize> = labels.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let map = (0..b.len())
        .map(|x| pos[&b.nonzero_below(x).map(|e| e - 1).collect::<StateSet>()])
        .collect();
    BaoMap::new(b.clone(), star, map)
}

/// `η_A: A → (A_gff)⋆`, `x ↦ x̂`.
pub fn eta_a(b: &FiniteBAO) -> Result<BaoMap> {
    let frame = general_filter_frame(b)?;
    let (star, labels) = underlying_bao_labeled(&frame)?;
    let pos: HashMap<StateSet, usize> = labels.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let map = (0..b.len()).map(|x| pos[&hat(b, x)]).collect();
    BaoMap::new(b.clone(), star, map)
}

/// `ζ_F: F → (F⋆)•`, `x ↦ {x' | x' ⊑s x}`. Needs that set admissible for
/// every `x`, as it is in full and in principal frames.
pub fn zeta_f(frame: &Frame) -> Result<MorphismSpec> {
    let (star, labels) = underlying_bao_labeled(frame)?;
    let pos: HashMap<StateSet, usize> = labels.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let target = principal_frame(&star)?;
    let p = frame.poset();
    let map = (0..frame.n())
        .map(|x| {
            let below: StateSet = (0..frame.n()).filter(|&y| p.s_refines(y, x)).collect();
            pos.get(&below).map(|&e| e - 1).ok_or_else(|| {
                Error::Precondition(format!("the separative down-set of {x} is not admissible"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MorphismSpec::new(frame.clone(), target, map, Grade::Strict, [Flag::Dense, Flag::Robust])
}

/// `η_F: F → (F⋆)_gff`, `x ↦ P(x)`, the admissible sets containing `x`.
pub fn eta_f(frame: &Frame) -> Result<MorphismSpec> {
    let (star, labels) = underlying_bao_labeled(frame)?;
    let pos: HashMap<StateSet, usize> = labels.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let target = general_filter_frame(&star)?;
    // P(x) is generated by the least admissible set containing x.
    let map = (0..frame.n())
        .map(|x| pos[&admissible_hull_of(frame, x)] - 1)
        .collect();
    MorphismSpec::new(frame.clone(), target, map, Grade::Possibility, [])
}

/// Least upper bound of `xs` in `p`, if it exists.
fn supremum(p: &FinitePoset, xs: StateSet) -> Option<usize> {
    let uppers: StateSet = (0..p.n())
        .filter(|&u| xs.iter().all(|x| p.leq(x, u)))
        .collect();
    uppers.iter().find(|&u| uppers.is_subset(p.up(u)))
}

/// For `g: F → G` with `G` rich, the p-morphism `ḡ: (F⋆)• → G`,
/// `X ↦ ⋁g[X]`, through which `g` factors as `ḡ ∘ ζ_F`.
pub fn rich_reflection(g: &MorphismSpec) -> Result<MorphismSpec> {
    require_morphism(g)?;
    if !classify(&g.target)?.rich {
        return Err(Error::Precondition("target frame is not rich".into()));
    }
    let (star, labels) = underlying_bao_labeled(&g.source)?;
    let src = principal_frame(&star)?;
    let tp = g.target.poset();
    let map = labels[1..]
        .iter()
        .map(|&x| {
            supremum(tp, g.image(x))
                .ok_or_else(|| Error::Precondition(format!("no join for the image of {x}")))
        })
        .collect::<Result<Vec<_>>>()?;
    MorphismSpec::new(src, g.target.clone(), map, Grade::P, [])
}

/// For `g: F → G` with `G` filter-descriptive, the p-morphism
/// `ḡ: (F⋆)_gff → G` sending a filter `F` to the state whose admissible
/// sets are exactly those `X'` with `g⁻¹[X'] ∈ F`; `g = ḡ ∘ η_F`.
pub fn filter_reflection(g: &MorphismSpec) -> Result<MorphismSpec> {
    require_morphism(g)?;
    if !classify(&g.target)?.filter_descriptive {
        return Err(Error::Precondition("target frame is not filter-descriptive".into()));
    }
    let (star, labels) = underlying_bao_labeled(&g.source)?;
    let src = general_filter_frame(&star)?;
    let tprops = g.target.props();
    let map = labels[1..]
        .iter()
        .map(|&gen| {
            let want: Vec<bool> = tprops
                .iter()
                .map(|&xp| gen.is_subset(preimage(&g.map, xp)))
                .collect();
            (0..g.target.n())
                .find(|&y| tprops.iter().zip(&want).all(|(z, &w)| z.contains(y) == w))
                .ok_or_else(|| Error::Precondition("transferred filter is not realized".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    MorphismSpec::new(src, g.target.clone(), map, Grade::P, [])
}

/// [`rich_reflection`] when the target is rich, otherwise
/// [`filter_reflection`].
pub fn reflection_map(g: &MorphismSpec) -> Result<MorphismSpec> {
    if classify(&g.target)?.rich {
        rich_reflection(g)
    } else {
        filter_reflection(g)
    }
}

/// The meaning of `f` under an assignment of elements to variables.
pub fn algebraic_meaning(b: &FiniteBAO, f: &Formula, assign: &BTreeMap<String, usize>) -> Result<usize> {
    Ok(match f {
        Formula::Var(v) => match assign.get(v) {
            Some(&a) => a,
            None if v == RESERVED_VAR => b.bottom(),
            None => return Err(Error::UnboundVariable(v.clone())),
        },
        Formula::Neg(a) => b.complement(algebraic_meaning(b, a, assign)?),
        Formula::And(x, y) => b.meet(algebraic_meaning(b, x, assign)?, algebraic_meaning(b, y, assign)?),
        Formula::Imp(x, y) => b.imp(algebraic_meaning(b, x, assign)?, algebraic_meaning(b, y, assign)?),
        Formula::Box(i, a) => {
            let t = b.op(i)?;
            t[algebraic_meaning(b, a, assign)?]
        }
    })
}

/// Whether `f` means `⊤` under every assignment. The witness lists the
/// element assigned to each variable, in variable order.
pub fn algebraic_valid(b: &FiniteBAO, f: &Formula) -> Result<CheckReport> {
    require_bao(b)?;
    for i in f.indices() {
        b.op(&i)?;
    }
    let vars: Vec<String> = f.variables().into_iter().filter(|v| v != RESERVED_VAR).collect();
    let per = f.size() as u64;
    let total = (b.len() as u64)
        .checked_pow(vars.len() as u32)
        .and_then(|c| c.checked_mul(per))
        .unwrap_or(u64::MAX);
    if total > ALGEBRA_BUDGET {
        return Err(Error::BudgetExceeded(ALGEBRA_BUDGET));
    }
    let cond = format!("algebraically valid: {f}");
    let mut digits = vec![0usize; vars.len()];
    loop {
        let assign: BTreeMap<String, usize> =
            vars.iter().cloned().zip(digits.iter().copied()).collect();
        if algebraic_meaning(b, f, &assign)? != b.top() {
            return Ok(CheckReport::fails(cond, Witness::Elements(digits)));
        }
        let mut k = vars.len();
        loop {
            if k == 0 {
                return Ok(CheckReport::holds(cond));
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < b.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// The direct product; the universe of factor `j` is shifted past those of
/// the earlier factors.
pub fn product(factors: &[FiniteBAO]) -> Result<FiniteBAO> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Precondition("product of no algebras".into()))?;
    let universe: usize = factors.iter().map(FiniteBAO::universe).sum();
    if universe > MAX_STATES {
        return Err(Error::TooManyStates(universe));
    }
    let count = factors.iter().try_fold(1usize, |acc, b| acc.checked_mul(b.len()));
    if count.is_none_or(|c| c > MAX_PRODUCT_ELEMENTS) {
        return Err(Error::CapExceeded("product has too many elements".into()));
    }
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for b in factors {
        first.check_index_set(b)?;
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..b.len()).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    let encode = |t: &[usize]| -> StateSet {
        let mut out = StateSet::EMPTY;
        let mut shift = 0;
        for (b, &k) in factors.iter().zip(t) {
            out |= StateSet(b.element(k).0 << shift);
            shift += b.universe();
        }
        out
    };
    let elements: Vec<StateSet> = tuples.iter().map(|t| encode(t)).collect();
    let ops = first
        .ops
        .keys()
        .map(|i| {
            let table = tuples
                .iter()
                .map(|t| {
                    let img: Vec<usize> = factors.iter().zip(t).map(|(b, &k)| b.boxed(i, k)).collect();
                    encode(&img)
                })
                .collect();
            (i.clone(), table)
        })
        .collect();
    FiniteBAO::new(universe, elements, ops)
}

/// The least subalgebra containing `seeds`.
pub fn subalgebra(b: &FiniteBAO, seeds: &[usize]) -> Result<FiniteBAO> {
    require_bao(b)?;
    if let Some(&bad) = seeds.iter().find(|&&s| s >= b.len()) {
        return Err(Error::StateOutOfRange {
            state: bad,
            n: b.len(),
        });
    }
    let mut have: BTreeSet<usize> = [b.bottom(), b.top()].into_iter().chain(seeds.iter().copied()).collect();
    loop {
        let cur: Vec<usize> = have.iter().copied().collect();
        let mut next = have.clone();
        for &x in &cur {
            next.insert(b.complement(x));
            for t in b.ops.values() {
                next.insert(t[x]);
            }
            for &y in &cur {
                next.insert(b.meet(x, y));
            }
        }
        if next.len() == have.len() {
            break;
        }
        have = next;
    }
    let keep: Vec<usize> = have.into_iter().collect();
    let elements = keep.iter().map(|&k| b.element(k)).collect();
    let ops = b
        .ops
        .iter()
        .map(|(i, t)| (i.clone(), keep.iter().map(|&k| b.element(t[k])).collect()))
        .collect();
    FiniteBAO::new(b.universe, elements, ops)
}

/// A BAO isomorphism `a → b`, found by matching atoms.
pub fn bao_isomorphism(a: &FiniteBAO, b: &FiniteBAO) -> Result<Option<Vec<usize>>> {
    a.check_index_set(b)?;
    if a.len() != b.len() {
        return Ok(None);
    }
    let (aa, ba) = (a.atoms(), b.atoms());
    if aa.len() != ba.len() {
        return Ok(None);
    }
    let mut used = vec![false; ba.len()];
    let mut perm = Vec::with_capacity(aa.len());
    Ok(atom_match(a, b, &aa, &ba, &mut used, &mut perm))
}

fn atom_match(
    a: &FiniteBAO,
    b: &FiniteBAO,
    aa: &[usize],
    ba: &[usize],
    used: &mut [bool],
    perm: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if perm.len() == aa.len() {
        let map: Vec<usize> = (0..a.len())
            .map(|x| {
                b.join_all(
                    aa.iter()
                        .zip(perm.iter())
                        .filter(|(&at, _)| a.leq(at, x))
                        .map(|(_, &k)| ba[k]),
                )
            })
            .collect();
        let ok = a
            .ops
            .iter()
            .all(|(i, t)| (0..a.len()).all(|x| map[t[x]] == b.boxed(i, map[x])));
        return ok.then_some(map);
    }
    for k in 0..ba.len() {
        if used[k] {
            continue;
        }
        used[k] = true;
        perm.push(k);
        if let Some(m) = atom_match(a, b, aa, ba, used, perm) {
            return Some(m);
        }
        perm.pop();
        used[k] = false;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_two() -> FiniteBAO {
        FiniteBAO::powerset(2, &["i"], |_, x| x).unwrap()
    }

    #[test]
    fn identity_powerset_is_a_bao() {
        let b = identity_two();
        assert!(validate_bao(&b).verdict);
        let c = classify_bao(&b).unwrap();
        assert!(!c.trivial && c.v_condition && c.t_adjoint);
        assert_eq!(t_adjoint(&b, "i").unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn box_missing_top_is_caught() {
        let b = FiniteBAO::powerset(1, &["i"], |_, _| StateSet::EMPTY).unwrap();
        let r = validate_bao(&b);
        assert!(!r.verdict);
        assert_eq!(r.witness, Some(Witness::Sets(vec![StateSet::full(1)])));
    }

    #[test]
    fn constant_top_box_has_bottom_adjoint() {
        let b = FiniteBAO::powerset(2, &["i"], |_, _| StateSet::full(2)).unwrap();
        assert_eq!(t_adjoint(&b, "i").unwrap(), vec![0; 4]);
    }

    #[test]
    fn filters_of_four_elements() {
        let b = identity_two();
        assert_eq!(filters(&b).unwrap().len(), 3);
        assert_eq!(generated_filter(&b, &[1, 2]).unwrap(), None);
        assert_eq!(generated_filter(&b, &[3]).unwrap(), Some(StateSet::singleton(3)));
        let gff = general_filter_frame(&b).unwrap();
        assert_eq!(gff.n(), 3);
        assert_eq!(gff.props().len(), 4);
    }

    #[test]
    fn principal_frame_of_identity_operator() {
        let b = identity_two();
        let f = principal_frame(&b).unwrap();
        assert_eq!(f.n(), 3);
        let r = f.rel("i").unwrap();
        for x in 0..3 {
            assert_eq!(r.succ(x), f.poset().down(x));
        }
        assert_eq!(full_frame(&b).unwrap().props(), f.props());
    }

    #[test]
    fn products_multiply_sizes() {
        let two = FiniteBAO::powerset(1, &["i"], |_, x| x).unwrap();
        let p = product(&[two.clone(), two]).unwrap();
        assert_eq!(p.len(), 4);
        assert!(bao_isomorphism(&p, &identity_two()).unwrap().is_some());
    }
}
