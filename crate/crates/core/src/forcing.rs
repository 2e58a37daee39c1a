//! Forcing, truth sets and validity over possibility frames, plus classical
//! Kripke semantics as a baseline.

use std::collections::{BTreeMap, HashMap};

use crate::bits::StateSet;
use crate::error::{Error, Result};
use crate::formula::{Formula, RESERVED_VAR};
use crate::frame::{box_set, validate_frame, CheckReport, FinitePoset, Frame, Relation, Witness};

/// Assignment of admissible sets to propositional variables.
pub type Valuation = BTreeMap<String, StateSet>;

/// Default number of state-level forcing evaluations a validity sweep may spend.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A frame together with an admissible valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    valuation: Valuation,
}

impl Model {
    /// Rejects valuations that assign a non-admissible set.
    pub fn new(frame: Frame, valuation: Valuation) -> Result<Model> {
        for (v, &x) in &valuation {
            if !frame.is_admissible(x) {
                return Err(Error::InadmissibleValuation(v.clone()));
            }
        }
        Ok(Model { frame, valuation })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    /// The value of a variable. The reserved variable behind `⊤`/`⊥` defaults
    /// to the empty set when unassigned; any admissible value gives the same
    /// truth sets for `⊤` and `⊥`.
    fn value(&self, v: &str) -> Result<StateSet> {
        match self.valuation.get(v) {
            Some(&x) => Ok(x),
            None if v == RESERVED_VAR => Ok(bot_value(&self.frame)),
            None => Err(Error::UnboundVariable(v.to_string())),
        }
    }
}

/// The least admissible value: `∅`, or `{⊥}` in an extended frame.
fn bot_value(frame: &Frame) -> StateSet {
    frame.bot().map(StateSet::singleton).unwrap_or(StateSet::EMPTY)
}

/// `M, x ⊩ φ`, evaluated clause by clause.
pub fn forces(model: &Model, state: usize, f: &Formula) -> Result<bool> {
    model.frame.poset().check_state(state)?;
    forces_at(model, state, f)
}

fn forces_at(m: &Model, x: usize, f: &Formula) -> Result<bool> {
    let p = m.frame.poset();
    Ok(match f {
        Formula::Var(v) => m.value(v)?.contains(x),
        Formula::Neg(a) => {
            for y in p.down(x).iter() {
                if Some(y) != m.frame.bot() && forces_at(m, y, a)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::And(a, b) => forces_at(m, x, a)? && forces_at(m, x, b)?,
        Formula::Imp(a, b) => {
            for y in p.down(x).iter() {
                if forces_at(m, y, a)? && !forces_at(m, y, b)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Box(i, a) => {
            let r = m.frame.rel(i)?;
            for y in r.succ(x).iter() {
                if !forces_at(m, y, a)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

/// `⟦φ⟧`, computed bottom-up with set operations.
pub fn truth_set(model: &Model, f: &Formula) -> Result<StateSet> {
    let prog = Program::compile(&model.frame, f)?;
    let vals: Vec<StateSet> = prog
        .vars
        .iter()
        .map(|v| model.value(v))
        .collect::<Result<_>>()?;
    Ok(prog.eval(&model.frame, &vals))
}

/// A formula flattened into a list of set operations over shared subterms.
#[derive(Debug)]
pub(crate) struct Program {
    ops: Vec<Op>,
    /// Variables in sorted order; `Op::Var(k)` reads the `k`-th.
    pub(crate) vars: Vec<String>,
    rels: Vec<Relation>,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Var(usize),
    Neg(usize),
    And(usize, usize),
    Imp(usize, usize),
    Box(usize, usize),
}

impl Program {
    pub(crate) fn compile(frame: &Frame, f: &Formula) -> Result<Program> {
        let vars: Vec<String> = f.variables().into_iter().collect();
        let mut rel_names: Vec<String> = Vec::new();
        let mut rels = Vec::new();
        for i in f.indices() {
            rels.push(frame.rel(&i)?.clone());
            rel_names.push(i);
        }
        let mut prog = Program {
            ops: Vec::new(),
            vars,
            rels,
        };
        let mut memo = HashMap::new();
        prog.emit(f, &rel_names, &mut memo);
        Ok(prog)
    }

    fn emit<'f>(
        &mut self,
        f: &'f Formula,
        rel_names: &[String],
        memo: &mut HashMap<&'f Formula, usize>,
    ) -> usize {
        if let Some(&k) = memo.get(f) {
            return k;
        }
        let op = match f {
            Formula::Var(v) => Op::Var(self.vars.binary_search(v).expect("collected variable")),
            Formula::Neg(a) => Op::Neg(self.emit(a, rel_names, memo)),
            Formula::And(a, b) => {
                let a = self.emit(a, rel_names, memo);
                Op::And(a, self.emit(b, rel_names, memo))
            }
            Formula::Imp(a, b) => {
                let a = self.emit(a, rel_names, memo);
                Op::Imp(a, self.emit(b, rel_names, memo))
            }
            Formula::Box(i, a) => {
                let r = rel_names.binary_search(i).expect("collected index");
                Op::Box(r, self.emit(a, rel_names, memo))
            }
        };
        self.ops.push(op);
        memo.insert(f, self.ops.len() - 1);
        self.ops.len() - 1
    }

    pub(crate) fn len(&self) -> usize {
        self.ops.len()
    }

    pub(crate) fn eval(&self, frame: &Frame, vals: &[StateSet]) -> StateSet {
        let mut out: Vec<StateSet> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Var(k) => vals[k],
                Op::Neg(a) => frame.neg_set(out[a]),
                Op::And(a, b) => out[a] & out[b],
                Op::Imp(a, b) => frame.imp_set(out[a], out[b]),
                Op::Box(r, a) => box_set(&self.rels[r], out[a]),
            };
            out.push(v);
        }
        *out.last().expect("nonempty program")
    }
}

/// Runs validity and satisfiability sweeps over one frame that has been
/// validated once up front.
#[derive(Debug, Clone)]
pub struct ValidityChecker<'a> {
    frame: &'a Frame,
    budget: u64,
}

/// Result of sweeping every valuation.
enum Sweep {
    Complete,
    Found(Valuation, usize),
}

impl<'a> ValidityChecker<'a> {
    pub fn new(frame: &'a Frame) -> Result<ValidityChecker<'a>> {
        let report = validate_frame(frame);
        if !report.verdict {
            return Err(Error::InvalidFrame(report.to_string().replace('\n', "; ")));
        }
        Ok(ValidityChecker {
            frame,
            budget: DEFAULT_BUDGET,
        })
    }

    /// Skips validation; for frames produced by constructions already known
    /// to yield possibility frames.
    pub fn trusted(frame: &'a Frame) -> ValidityChecker<'a> {
        ValidityChecker {
            frame,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Validity, with the first falsifying valuation and state as witness.
    pub fn check(&self, f: &Formula) -> Result<CheckReport> {
        let cond = format!("valid: {f}");
        match self.sweep(f, |truth| (self.frame.states() - truth).first())? {
            Sweep::Complete => Ok(CheckReport::holds(cond)),
            Sweep::Found(valuation, state) => Ok(CheckReport::fails(
                cond,
                Witness::Countermodel { valuation, state },
            )),
        }
    }

    pub fn is_valid(&self, f: &Formula) -> Result<bool> {
        Ok(self.check(f)?.verdict)
    }

    /// A valuation and a (non-impossible) state forcing `f`, if there is one.
    pub fn satisfying(&self, f: &Formula) -> Result<Option<(Valuation, usize)>> {
        let bot = bot_value(self.frame);
        match self.sweep(f, |truth| (truth - bot).first())? {
            Sweep::Complete => Ok(None),
            Sweep::Found(v, s) => Ok(Some((v, s))),
        }
    }

    /// Walks valuations in lexicographic order (first variable most
    /// significant, admissible sets in canonical order) and stops at the first
    /// for which `hit` picks a state out of the truth set.
    fn sweep(&self, f: &Formula, hit: impl Fn(StateSet) -> Option<usize>) -> Result<Sweep> {
        let prog = Program::compile(self.frame, f)?;
        let props = self.frame.props();
        let bot = bot_value(self.frame);
        let bot_pos = self.frame.prop_index(bot).unwrap_or(0);
        // The reserved variable only occurs inside ⊤ and ⊥, whose truth sets
        // do not depend on it; pin it instead of sweeping it.
        let swept: Vec<bool> = prog.vars.iter().map(|v| v != RESERVED_VAR).collect();
        let mut choice: Vec<usize> = swept.iter().map(|&s| if s { 0 } else { bot_pos }).collect();
        let cost = (prog.len() * self.frame.n().max(1)) as u64;
        let mut spent = 0u64;
        let mut vals = vec![StateSet::EMPTY; choice.len()];
        loop {
            spent += cost;
            if spent > self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            for (k, &c) in choice.iter().enumerate() {
                vals[k] = props[c];
            }
            let truth = prog.eval(self.frame, &vals);
            if let Some(state) = hit(truth) {
                let valuation = prog
                    .vars
                    .iter()
                    .zip(&vals)
                    .zip(&swept)
                    .filter(|(_, &s)| s)
                    .map(|((v, &x), _)| (v.clone(), x))
                    .collect();
                return Ok(Sweep::Found(valuation, state));
            }
            // Odometer step, last variable fastest.
            let mut k = choice.len();
            loop {
                if k == 0 {
                    return Ok(Sweep::Complete);
                }
                k -= 1;
                if !swept[k] {
                    continue;
                }
                choice[k] += 1;
                if choice[k] < props.len() {
                    break;
                }
                choice[k] = 0;
            }
        }
    }
}

/// Validity of `f` on a frame, under every admissible assignment to the
/// variables of `f`.
pub fn valid_on_frame(frame: &Frame, f: &Formula) -> Result<CheckReport> {
    ValidityChecker::new(frame)?.check(f)
}

/// Validity with an explicit budget of state-level evaluations.
pub fn valid_on_frame_with_budget(frame: &Frame, f: &Formula, budget: u64) -> Result<CheckReport> {
    ValidityChecker::new(frame)?.with_budget(budget).check(f)
}

/// Whether some admissible valuation forces `f` at some possible state.
pub fn satisfiable_on_frame(frame: &Frame, f: &Formula) -> Result<bool> {
    Ok(ValidityChecker::new(frame)?.satisfying(f)?.is_some())
}

/// The first formula, valuation and state at which two frames on the same
/// states with the same admissible family disagree, if any. Valuations range
/// over the shared admissible family.
pub fn truth_set_difference(
    f: &Frame,
    g: &Frame,
    formulas: &[Formula],
) -> Result<Option<(Formula, Valuation, usize)>> {
    if f.n() != g.n() || f.props() != g.props() {
        return Err(Error::Mismatch("frames differ in states or admissible sets".into()));
    }
    let props = f.props();
    let bot_pos = f.prop_index(bot_value(f)).unwrap_or(0);
    for phi in formulas {
        let (pf, pg) = (Program::compile(f, phi)?, Program::compile(g, phi)?);
        let swept: Vec<bool> = pf.vars.iter().map(|v| v != RESERVED_VAR).collect();
        let mut choice: Vec<usize> = swept.iter().map(|&s| if s { 0 } else { bot_pos }).collect();
        let mut vals = vec![StateSet::EMPTY; choice.len()];
        'valuations: loop {
            for (k, &c) in choice.iter().enumerate() {
                vals[k] = props[c];
            }
            let (a, b) = (pf.eval(f, &vals), pg.eval(g, &vals));
            if let Some(x) = ((a - b) | (b - a)).first() {
                let valuation = pf.vars.iter().cloned().zip(vals.iter().copied()).collect();
                return Ok(Some((phi.clone(), valuation, x)));
            }
            let mut k = choice.len();
            loop {
                if k == 0 {
                    break 'valuations;
                }
                k -= 1;
                if !swept[k] {
                    continue;
                }
                choice[k] += 1;
                if choice[k] < props.len() {
                    break;
                }
                choice[k] = 0;
            }
        }
    }
    Ok(None)
}

/// A Kripke frame: worlds `0..n` and one relation per index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KripkeFrame {
    n: usize,
    rels: BTreeMap<String, Relation>,
}

impl KripkeFrame {
    pub fn new(n: usize, rels: BTreeMap<String, Relation>) -> Result<KripkeFrame> {
        if n > crate::bits::MAX_STATES {
            return Err(Error::TooManyStates(n));
        }
        for r in rels.values() {
            if r.n() != n {
                return Err(Error::InvalidFrame(format!(
                    "relation covers {} worlds, frame has {n}",
                    r.n()
                )));
            }
        }
        Ok(KripkeFrame { n, rels })
    }

    /// Single-index convenience constructor.
    pub fn single(n: usize, index: &str, pairs: &[(usize, usize)]) -> Result<KripkeFrame> {
        let r = Relation::from_pairs(n, pairs)?;
        KripkeFrame::new(n, BTreeMap::from([(index.to_string(), r)]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rels(&self) -> &BTreeMap<String, Relation> {
        &self.rels
    }

    pub fn rel(&self, index: &str) -> Result<&Relation> {
        self.rels
            .get(index)
            .ok_or_else(|| Error::UnknownIndex(index.to_string()))
    }

    /// The same frame read as a possibility frame: discrete order, every set
    /// of worlds admissible.
    pub fn to_frame(&self) -> Result<Frame> {
        Frame::full(FinitePoset::discrete(self.n), self.rels.clone())
    }
}

/// A Kripke frame with an arbitrary valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    pub frame: KripkeFrame,
    pub valuation: Valuation,
}

/// Classical satisfaction `m, w ⊨ φ`.
pub fn kripke_forces(model: &KripkeModel, world: usize, f: &Formula) -> Result<bool> {
    if world >= model.frame.n {
        return Err(Error::StateOutOfRange {
            state: world,
            n: model.frame.n,
        });
    }
    kripke_at(model, world, f)
}

fn kripke_at(m: &KripkeModel, w: usize, f: &Formula) -> Result<bool> {
    Ok(match f {
        Formula::Var(v) => match m.valuation.get(v) {
            Some(x) => x.contains(w),
            None if v == RESERVED_VAR => false,
            None => return Err(Error::UnboundVariable(v.clone())),
        },
        Formula::Neg(a) => !kripke_at(m, w, a)?,
        Formula::And(a, b) => kripke_at(m, w, a)? && kripke_at(m, w, b)?,
        Formula::Imp(a, b) => !kripke_at(m, w, a)? || kripke_at(m, w, b)?,
        Formula::Box(i, a) => {
            let r = m.frame.rel(i)?;
            for v in r.succ(w).iter() {
                if !kripke_at(m, v, a)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

/// Worlds satisfying `f`.
pub fn kripke_truth_set(model: &KripkeModel, f: &Formula) -> Result<StateSet> {
    let mut out = StateSet::EMPTY;
    for w in 0..model.frame.n {
        if kripke_at(model, w, f)? {
            out.insert(w);
        }
    }
    Ok(out)
}

/// Validity over every valuation of the variables of `f` by sets of worlds.
pub fn kripke_valid(frame: &KripkeFrame, f: &Formula) -> Result<CheckReport> {
    kripke_valid_with_budget(frame, f, DEFAULT_BUDGET)
}

pub fn kripke_valid_with_budget(frame: &KripkeFrame, f: &Formula, budget: u64) -> Result<CheckReport> {
    let cond = format!("valid: {f}");
    for i in f.indices() {
        frame.rel(&i)?;
    }
    let vars: Vec<String> = f
        .variables()
        .into_iter()
        .filter(|v| v != RESERVED_VAR)
        .collect();
    let mut subsets: Vec<StateSet> = StateSet::full(frame.n).subsets().collect();
    subsets.sort();
    let mut choice = vec![0usize; vars.len()];
    let cost = (f.size() * frame.n.max(1)) as u64;
    let mut spent = 0u64;
    loop {
        spent += cost;
        if spent > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        let valuation: Valuation = vars
            .iter()
            .zip(&choice)
            .map(|(v, &c)| (v.clone(), subsets[c]))
            .collect();
        let model = KripkeModel {
            frame: frame.clone(),
            valuation,
        };
        let truth = kripke_truth_set(&model, f)?;
        if let Some(w) = (StateSet::full(frame.n) - truth).first() {
            return Ok(CheckReport::fails(
                cond,
                Witness::Countermodel {
                    valuation: model.valuation,
                    state: w,
                },
            ));
        }
        let mut k = choice.len();
        loop {
            if k == 0 {
                return Ok(CheckReport::holds(cond));
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < subsets.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn set(xs: &[usize]) -> StateSet {
        StateSet::from_states(xs.iter().copied())
    }

    fn fig11() -> Frame {
        let p = FinitePoset::new(4, &[(1, 0), (2, 0), (3, 0)]).unwrap();
        Frame::full(p, BTreeMap::from([("i".to_string(), Relation::universal(4))])).unwrap()
    }

    fn model(frame: Frame, vals: &[(&str, StateSet)]) -> Model {
        Model::new(frame, vals.iter().map(|(v, s)| (v.to_string(), *s)).collect()).unwrap()
    }

    #[test]
    fn forcing_examples() {
        let m = model(fig11(), &[("p1", set(&[1]))]);
        assert!(forces(&m, 0, &parse("<i>p1").unwrap()).unwrap());
        assert!(!forces(&m, 0, &parse("[i]p1").unwrap()).unwrap());
        let m = model(fig11(), &[("p1", set(&[1, 2]))]);
        assert_eq!(truth_set(&m, &parse("~p1").unwrap()).unwrap(), set(&[3]));
        assert_eq!(truth_set(&m, &Formula::top()).unwrap(), m.frame().states());
        let chain = Frame::full(FinitePoset::chain(2), BTreeMap::new()).unwrap();
        let m = model(chain, &[("p1", set(&[0, 1]))]);
        assert!(forces(&m, 1, &parse("p1").unwrap()).unwrap());
    }

    #[test]
    fn inadmissible_and_unbound_are_errors() {
        assert!(matches!(
            Model::new(fig11(), Valuation::from([("p1".into(), set(&[0]))])),
            Err(Error::InadmissibleValuation(_))
        ));
        let m = model(fig11(), &[]);
        assert!(matches!(
            truth_set(&m, &parse("p1").unwrap()),
            Err(Error::UnboundVariable(_))
        ));
        assert!(matches!(
            forces(&m, 0, &parse("[j]#t").unwrap()),
            Err(Error::UnknownIndex(_))
        ));
    }

    #[test]
    fn k_is_valid_and_d_fails_on_dead_end() {
        let k = parse("[i](p1 -> p2) -> ([i]p1 -> [i]p2)").unwrap();
        assert!(valid_on_frame(&fig11(), &k).unwrap().verdict);
        let dead = KripkeFrame::single(1, "i", &[]).unwrap().to_frame().unwrap();
        let rep = valid_on_frame(&dead, &parse("[i]p1 -> <i>p1").unwrap()).unwrap();
        assert!(!rep.verdict);
        assert_eq!(
            rep.witness,
            Some(Witness::Countermodel {
                valuation: Valuation::from([("p1".into(), StateSet::EMPTY)]),
                state: 0
            })
        );
    }

    #[test]
    fn kripke_examples() {
        let refl = KripkeFrame::single(1, "i", &[(0, 0)]).unwrap();
        assert!(kripke_valid(&refl, &parse("[i]p1 -> p1").unwrap()).unwrap().verdict);
        let cycle = KripkeFrame::single(2, "i", &[(0, 1), (1, 0)]).unwrap();
        let rep = kripke_valid(&cycle, &parse("[i]p1 -> [i][i]p1").unwrap()).unwrap();
        assert!(!rep.verdict);
        assert_eq!(
            rep.witness,
            Some(Witness::Countermodel {
                // The symmetric valuation p1 = {1} also falsifies it at 0; {0}
                // comes first in the sweep.
                valuation: Valuation::from([("p1".into(), set(&[0]))]),
                state: 1
            })
        );
    }

    #[test]
    fn budget_is_enforced() {
        let f = parse("[i](p1 -> p2) -> ([i]p1 -> [i]p2)").unwrap();
        assert!(matches!(
            valid_on_frame_with_budget(&fig11(), &f, 10),
            Err(Error::BudgetExceeded(10))
        ));
    }
}
