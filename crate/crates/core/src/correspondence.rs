//! First-order frame conditions for Lemmon-Scott axioms
//! `◇α□βp → □δ◇γp`, and harnesses that compare them with validity.

use std::fmt;
use std::str::FromStr;

use crate::bao::{filter_frame, FiniteBAO};
use crate::error::{Error, Result};
use crate::forcing::{kripke_valid, valid_on_frame, KripkeFrame};
use crate::formula::Formula;
use crate::frame::{Frame, Relation};
use crate::report::{CheckReport, Witness};

/// How an empty path is read. Over possibility frames `x R_ε y` means
/// `y ⊑ x`; over Kripke frames it means `x = y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Possibility,
    Kripke,
}

impl FromStr for PathKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<PathKind> {
        match s {
            "possibility" => Ok(PathKind::Possibility),
            "kripke" => Ok(PathKind::Kripke),
            _ => Err(Error::UnknownCondition(format!("path kind `{s}`"))),
        }
    }
}

/// The four index sequences of `◇α□βp → □δ◇γp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LsSchema {
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
    pub delta: Vec<String>,
    pub gamma: Vec<String>,
}

impl LsSchema {
    pub fn new(alpha: &[&str], beta: &[&str], delta: &[&str], gamma: &[&str]) -> LsSchema {
        let own = |s: &[&str]| s.iter().map(|x| x.to_string()).collect();
        LsSchema {
            alpha: own(alpha),
            beta: own(beta),
            delta: own(delta),
            gamma: own(gamma),
        }
    }

    /// The familiar axioms D, T, 4, B and 5 for a single index.
    pub fn named(name: &str, i: &str) -> Result<LsSchema> {
        let s = [i];
        Ok(match name {
            "D" => LsSchema::new(&[], &s, &[], &s),
            "T" => LsSchema::new(&[], &s, &[], &[]),
            "4" => LsSchema::new(&[], &s, &[i, i], &[]),
            "B" => LsSchema::new(&[], &[], &s, &s),
            "5" => LsSchema::new(&s, &[], &s, &s),
            _ => return Err(Error::UnknownCondition(format!("axiom `{name}`"))),
        })
    }

    /// `□ᵢp → □ⱼp`.
    pub fn inclusion(i: &str, j: &str) -> LsSchema {
        LsSchema::new(&[], &[i], &[j], &[])
    }

    pub fn indices(&self) -> impl Iterator<Item = &String> {
        self.alpha
            .iter()
            .chain(&self.beta)
            .chain(&self.delta)
            .chain(&self.gamma)
    }

    /// Parses `α;β;δ;γ`. Sequences are comma-separated index lists; `e` or
    /// nothing stands for the empty sequence. `|` is accepted in place of `;`.
    pub fn parse(text: &str) -> Result<LsSchema> {
        let parts: Vec<&str> = text.split([';', '|']).collect();
        if parts.len() != 4 {
            return Err(Error::Syntax {
                offset: 0,
                expected: vec!["four ';'-separated index sequences".into()],
            });
        }
        let seq = |s: &str| -> Vec<String> {
            let s = s.trim();
            if s.is_empty() || s == "e" || s == "ε" {
                Vec::new()
            } else {
                s.split(',').map(|x| x.trim().to_string()).collect()
            }
        };
        Ok(LsSchema {
            alpha: seq(parts[0]),
            beta: seq(parts[1]),
            delta: seq(parts[2]),
            gamma: seq(parts[3]),
        })
    }
}

impl fmt::Display for LsSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seq = |s: &[String]| if s.is_empty() { "e".to_string() } else { s.join(",") };
        write!(
            f,
            "{};{};{};{}",
            seq(&self.alpha),
            seq(&self.beta),
            seq(&self.delta),
            seq(&self.gamma)
        )
    }
}

impl FromStr for LsSchema {
    type Err = Error;
    fn from_str(s: &str) -> Result<LsSchema> {
        LsSchema::parse(s)
    }
}

/// `◇α□β p1 → □δ◇γ p1`.
pub fn ls_axiom(schema: &LsSchema) -> Formula {
    let p = Formula::p(1);
    Formula::imp(
        Formula::dias(&schema.alpha, Formula::boxes(&schema.beta, p.clone())),
        Formula::boxes(&schema.delta, Formula::dias(&schema.gamma, p)),
    )
}

/// `R_σ`: the composite of the relations along `σ`, with the empty path
/// read according to `kind`.
pub fn path_relation(frame: &Frame, sigma: &[String], kind: PathKind) -> Result<Relation> {
    let n = frame.n();
    let mut acc = match kind {
        PathKind::Possibility if sigma.is_empty() => {
            return Ok(Relation::from_succ((0..n).map(|x| frame.poset().down(x)).collect()))
        }
        _ => Relation::identity(n),
    };
    for i in sigma {
        acc = acc.compose(frame.rel(i)?);
    }
    Ok(acc)
}

/// Evaluates the first-order correspondent of `schema` on `frame`.
///
/// Possibility kind, `α` nonempty:
/// `∀x∀y(x R_δ y → ∃x'⊑x ∀z(x' R_α z → ∃u(y R_γ u ∧ z R_β u)))`, witness `(x, y)`.
/// Possibility kind, `α` empty: `∀x∀y(x R_δ y → ∃u(y R_γ u ∧ x R_β u))`,
/// witness `(x, y)`.
/// Kripke kind: `∀x∀y∀z((x R_δ y ∧ x R_α z) → ∃u(y R_γ u ∧ z R_β u))`,
/// witness `(x, y, z)`.
pub fn ls_condition(frame: &Frame, schema: &LsSchema, kind: PathKind) -> Result<CheckReport> {
    let ra = path_relation(frame, &schema.alpha, kind)?;
    let rb = path_relation(frame, &schema.beta, kind)?;
    let rd = path_relation(frame, &schema.delta, kind)?;
    let rg = path_relation(frame, &schema.gamma, kind)?;
    let cond = format!("Lemmon-Scott condition {schema}");
    let p = frame.poset();
    for x in 0..frame.n() {
        for y in rd.succ(x).iter() {
            let gy = rg.succ(y);
            let meets = |z: usize| rb.succ(z).intersects(gy);
            match kind {
                PathKind::Kripke => {
                    if let Some(z) = ra.succ(x).iter().find(|&z| !meets(z)) {
                        return Ok(CheckReport::fails(cond, Witness::States(vec![x, y, z])));
                    }
                }
                PathKind::Possibility if schema.alpha.is_empty() => {
                    if !meets(x) {
                        return Ok(CheckReport::fails(cond, Witness::States(vec![x, y])));
                    }
                }
                PathKind::Possibility => {
                    let ok = p.down(x).iter().any(|x2| ra.succ(x2).iter().all(meets));
                    if !ok {
                        return Ok(CheckReport::fails(cond, Witness::States(vec![x, y])));
                    }
                }
            }
        }
    }
    Ok(CheckReport::holds(cond))
}

/// The condition checked by [`ls_condition`], written out. A nonempty path
/// `σ` is shown as `R[σ]`.
pub fn ls_condition_text(schema: &LsSchema, kind: PathKind) -> String {
    let rel = |a: &str, sigma: &[String], b: &str| -> String {
        match (sigma.is_empty(), kind) {
            (true, PathKind::Possibility) => format!("{b} ⊑ {a}"),
            (true, PathKind::Kripke) => format!("{a} = {b}"),
            (false, _) => format!("{a} R[{}] {b}", sigma.join(",")),
        }
    };
    let tail = |z: &str| {
        format!(
            "∃u({} ∧ {})",
            rel("y", &schema.gamma, "u"),
            rel(z, &schema.beta, "u")
        )
    };
    let d = rel("x", &schema.delta, "y");
    match kind {
        PathKind::Kripke => format!(
            "∀x∀y∀z(({d} ∧ {}) → {})",
            rel("x", &schema.alpha, "z"),
            tail("z")
        ),
        PathKind::Possibility if schema.alpha.is_empty() => format!("∀x∀y({d} → {})", tail("x")),
        PathKind::Possibility => format!(
            "∀x∀y({d} → ∃x'⊑x ∀z({} → {}))",
            rel("x'", &schema.alpha, "z"),
            tail("z")
        ),
    }
}

/// `∀w∀y(w R y → ∀x⊑y ∀y'⊑x ∃u⊑y': x R u)`: the local correspondent of
/// `□p → p` pushed under one box. Witness `(w, y, x, y')`.
pub fn shift_reflexivity_condition(frame: &Frame, index: &str) -> Result<CheckReport> {
    let r = frame.rel(index)?;
    let p = frame.poset();
    let cond = format!("shift reflexivity[{index}]");
    for w in 0..frame.n() {
        for y in r.succ(w).iter() {
            for x in p.down(y).iter() {
                for y2 in p.down(x).iter() {
                    if !r.succ(x).intersects(p.down(y2)) {
                        return Ok(CheckReport::fails(cond, Witness::States(vec![w, y, x, y2])));
                    }
                }
            }
        }
    }
    Ok(CheckReport::holds(cond))
}

/// A frame on which validity of the axiom and the condition disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub frame: Frame,
    pub valid: bool,
    pub condition: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceReport {
    pub schema: LsSchema,
    pub checked: usize,
    pub divergences: Vec<Divergence>,
}

impl CorrespondenceReport {
    pub fn holds(&self) -> bool {
        self.divergences.is_empty()
    }

    pub fn to_check_report(&self) -> CheckReport {
        let cond = format!("correspondence {} over {} frames", self.schema, self.checked);
        match self.divergences.first() {
            None => CheckReport::holds(cond),
            Some(d) => CheckReport::fails(
                cond,
                Witness::Text(format!(
                    "{} divergent frames; first has valid={} condition={}",
                    self.divergences.len(),
                    d.valid,
                    d.condition
                )),
            ),
        }
    }
}

/// Compares validity of the axiom with the condition on every frame.
pub fn verify_correspondence(
    schema: &LsSchema,
    frames: impl IntoIterator<Item = Frame>,
    kind: PathKind,
) -> Result<CorrespondenceReport> {
    sweep(schema, frames, kind, true)
}

/// Checks only that the condition implies validity, which needs no
/// fullness assumption.
pub fn verify_soundness(
    schema: &LsSchema,
    frames: impl IntoIterator<Item = Frame>,
) -> Result<CorrespondenceReport> {
    sweep(schema, frames, PathKind::Possibility, false)
}

fn sweep(
    schema: &LsSchema,
    frames: impl IntoIterator<Item = Frame>,
    kind: PathKind,
    both: bool,
) -> Result<CorrespondenceReport> {
    let axiom = ls_axiom(schema);
    let mut checked = 0;
    let mut divergences = Vec::new();
    for frame in frames {
        checked += 1;
        let condition = ls_condition(&frame, schema, kind)?.verdict;
        if !both && !condition {
            continue;
        }
        let valid = valid_on_frame(&frame, &axiom)?.verdict;
        if valid != condition {
            divergences.push(Divergence {
                frame,
                valid,
                condition,
            });
        }
    }
    Ok(CorrespondenceReport {
        schema: schema.clone(),
        checked,
        divergences,
    })
}

/// `ST_x(f)` as text. Bound variables are drawn from `y, z, u, v, w, y1, …`,
/// skipping `var`; `pk` becomes `Qk` and any other variable `q` becomes
/// `Q_q`.
pub fn standard_translation(f: &Formula, var: &str) -> String {
    let mut fresh = Fresh { used: 0, avoid: var };
    st(f, var, &mut fresh)
}

struct Fresh<'a> {
    used: usize,
    avoid: &'a str,
}

impl Fresh<'_> {
    fn next(&mut self) -> String {
        const BASE: [&str; 5] = ["y", "z", "u", "v", "w"];
        loop {
            let k = self.used;
            self.used += 1;
            let name = if k < BASE.len() {
                BASE[k].to_string()
            } else {
                format!("{}{}", BASE[k % BASE.len()], k / BASE.len())
            };
            if name != self.avoid {
                return name;
            }
        }
    }
}

fn predicate(v: &str) -> String {
    match v.strip_prefix('p') {
        Some(d) if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) => format!("Q{d}"),
        _ => format!("Q_{v}"),
    }
}

fn st(f: &Formula, x: &str, fresh: &mut Fresh) -> String {
    match f {
        Formula::Var(v) if v == crate::formula::RESERVED_VAR => "⊥".to_string(),
        Formula::Var(v) => format!("{}({x})", predicate(v)),
        Formula::Neg(a) => {
            let y = fresh.next();
            format!("∀{y}({y}⊑{x} → ¬{})", st(a, &y, fresh))
        }
        Formula::And(a, b) => {
            let l = st(a, x, fresh);
            format!("({l} ∧ {})", st(b, x, fresh))
        }
        Formula::Imp(a, b) => {
            let y = fresh.next();
            let l = st(a, &y, fresh);
            format!("∀{y}(({y}⊑{x} ∧ {l}) → {})", st(b, &y, fresh))
        }
        Formula::Box(i, a) => {
            let y = fresh.next();
            format!("∀{y}({x}R{i} {y} → {})", st(a, &y, fresh))
        }
    }
}

/// The variable the split schema is built around.
pub const SPLIT_VAR: &str = "p1";

/// `◇ᵢ(p ∧ ψ) → (◇ᵢ(p ∧ φ) ∧ ◇ᵢ(p ∧ ¬φ))` with `p` = `p1`, which must not
/// occur in `ψ`.
pub fn split_axiom(phi: &Formula, psi: &Formula, i: &str) -> Result<Formula> {
    if psi.variables().contains(SPLIT_VAR) {
        return Err(Error::Precondition(format!(
            "{SPLIT_VAR} may not occur in the second formula"
        )));
    }
    let p = Formula::var(SPLIT_VAR);
    Ok(Formula::imp(
        Formula::dia(i, Formula::and(p.clone(), psi.clone())),
        Formula::and(
            Formula::dia(i, Formula::and(p.clone(), phi.clone())),
            Formula::dia(i, Formula::and(p, Formula::neg(phi.clone()))),
        ),
    ))
}

/// On a Kripke frame: if the split schema is valid then so is `¬◇ᵢψ`.
pub fn kripke_split_property(
    frame: &KripkeFrame,
    phi: &Formula,
    psi: &Formula,
    i: &str,
) -> Result<CheckReport> {
    let split = split_axiom(phi, psi, i)?;
    let consequence = Formula::neg(Formula::dia(i, psi.clone()));
    let cond = format!("split validity implies {consequence}");
    if !kripke_valid(frame, &split)?.verdict {
        return Ok(CheckReport::holds(cond));
    }
    let r = kripke_valid(frame, &consequence)?;
    Ok(match r.witness {
        None => CheckReport::holds(cond),
        Some(w) => CheckReport::fails(cond, w),
    })
}

/// `♦_α■_β a ≤ ■_δ♦_γ a` for every element `a`.
pub fn ls_inequality_holds(b: &FiniteBAO, schema: &LsSchema) -> Result<bool> {
    for i in schema.indices() {
        b.op(i)?;
    }
    let boxes = |seq: &[String], a: usize| seq.iter().rev().fold(a, |acc, i| b.boxed(i, acc));
    let dias = |seq: &[String], a: usize| seq.iter().rev().fold(a, |acc, i| b.dia(i, acc));
    Ok((0..b.len()).all(|a| {
        let lhs = dias(&schema.alpha, boxes(&schema.beta, a));
        let rhs = boxes(&schema.delta, dias(&schema.gamma, a));
        b.leq(lhs, rhs)
    }))
}

/// When the algebra satisfies the schema's inequality, its filter frame
/// satisfies the schema's possibility-frame condition. The verdict is that
/// implication; a vacuous antecedent passes.
pub fn lemmon_scott_filter_canonicity(b: &FiniteBAO, schema: &LsSchema) -> Result<CheckReport> {
    let cond = format!("filter frame canonicity {schema}");
    if !ls_inequality_holds(b, schema)? {
        return Ok(CheckReport::holds(cond));
    }
    let frame = filter_frame(b)?;
    let r = ls_condition(&frame, schema, PathKind::Possibility)?;
    Ok(match r.witness {
        None => CheckReport::holds(cond),
        Some(w) => CheckReport::fails(cond, w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::FinitePoset;
    use std::collections::BTreeMap;

    #[test]
    fn schemas_instantiate() {
        let four = LsSchema::parse("e;i;i,i;e").unwrap();
        assert_eq!(ls_axiom(&four).to_string(), "[i]p1 -> [i][i]p1");
        let five = LsSchema::parse("i;i;i;i").unwrap();
        assert_eq!(ls_axiom(&five).to_string(), "<i>[i]p1 -> [i]<i>p1");
        let t = LsSchema::parse("e|i|e|e").unwrap();
        assert_eq!(ls_axiom(&t).to_string(), "[i]p1 -> p1");
        assert_eq!(four.to_string(), "e;i;i,i;e");
    }

    #[test]
    fn translation_goldens() {
        let t = |s: &str| standard_translation(&Formula::parse(s).unwrap(), "x");
        assert_eq!(t("p1"), "Q1(x)");
        assert_eq!(t("~p1"), "∀y(y⊑x → ¬Q1(y))");
        assert_eq!(t("[i]p1"), "∀y(xRi y → Q1(y))");
    }

    #[test]
    fn empty_paths_follow_the_kind() {
        let f = Frame::full(FinitePoset::chain(2), BTreeMap::new()).unwrap();
        let r = path_relation(&f, &[], PathKind::Possibility).unwrap();
        assert_eq!(r.pairs(), vec![(0, 0), (1, 0), (1, 1)]);
        let id = path_relation(&f, &[], PathKind::Kripke).unwrap();
        assert_eq!(id, Relation::identity(2));
    }

    #[test]
    fn two_cycle_squared_is_identity() {
        let k = KripkeFrame::single(2, "i", &[(0, 1), (1, 0)]).unwrap().to_frame().unwrap();
        let r = path_relation(&k, &["i".into(), "i".into()], PathKind::Kripke).unwrap();
        assert_eq!(r, Relation::identity(2));
    }

    #[test]
    fn split_rejects_its_own_variable() {
        let p1 = Formula::p(1);
        assert!(split_axiom(&Formula::p(2), &p1, "i").is_err());
        assert!(split_axiom(&Formula::p(2), &Formula::top(), "i").is_ok());
    }
}
