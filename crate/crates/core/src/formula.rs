//! Modal formulas over `¬`, `∧`, `→` and indexed boxes.
//!
//! Disjunction, diamonds, the biconditional and the constants are sugar: they
//! are expanded at construction time and recognised again when printing, so
//! `parse(print(f)) == f` for every tree.
//!
//! Concrete syntax (ASCII):
//!
//! | text      | meaning            |
//! |-----------|--------------------|
//! | `~a`      | negation           |
//! | `a & b`   | conjunction        |
//! | `a \| b`  | `~(~a & ~b)`       |
//! | `a -> b`  | implication        |
//! | `a <-> b` | `(a -> b) & (b -> a)` |
//! | `[i]a`    | box for index `i`  |
//! | `<i>a`    | `~[i]~a`           |
//! | `#f`      | `#v & ~#v`         |
//! | `#t`      | `~#f`              |
//!
//! Unary operators bind tightest, then `&`, `|`, `->`, `<->`. Conjunction and
//! disjunction associate to the left, the two arrows to the right.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// The variable through which `#t` and `#f` are expanded. The lexer accepts it
/// as `#v` so that every tree prints to parseable text.
pub const RESERVED_VAR: &str = "#v";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Var(String),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Box(String, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    /// `p{k}`, the conventional numbered variable.
    pub fn p(k: usize) -> Formula {
        Formula::Var(format!("p{k}"))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::Neg(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn boxed(index: impl Into<String>, a: Formula) -> Formula {
        Formula::Box(index.into(), Box::new(a))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::neg(Formula::and(Formula::neg(a), Formula::neg(b)))
    }

    pub fn dia(index: impl Into<String>, a: Formula) -> Formula {
        Formula::neg(Formula::boxed(index, Formula::neg(a)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn bot() -> Formula {
        let v = Formula::var(RESERVED_VAR);
        Formula::and(v.clone(), Formula::neg(v))
    }

    pub fn top() -> Formula {
        Formula::neg(Formula::bot())
    }

    /// Boxes along a sequence of indices, outermost first.
    pub fn boxes(seq: &[String], a: Formula) -> Formula {
        seq.iter()
            .rev()
            .fold(a, |acc, i| Formula::boxed(i.clone(), acc))
    }

    /// Diamonds along a sequence of indices, outermost first.
    pub fn dias(seq: &[String], a: Formula) -> Formula {
        seq.iter().rev().fold(a, |acc, i| Formula::dia(i.clone(), acc))
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Var(v) = f {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn indices(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Box(i, _) = f {
                out.insert(i.clone());
            }
        });
        out
    }

    /// Nesting depth of boxes in the primitive tree.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Neg(a) => a.modal_depth(),
            Formula::And(a, b) | Formula::Imp(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Box(_, a) => 1 + a.modal_depth(),
        }
    }

    /// Number of nodes in the primitive tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Var(_) => {}
            Formula::Neg(a) | Formula::Box(_, a) => a.walk(visit),
            Formula::And(a, b) | Formula::Imp(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Simultaneous uniform substitution of formulas for variables.
    pub fn substitute(&self, s: &BTreeMap<String, Formula>) -> Formula {
        match self {
            Formula::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Formula::Neg(a) => Formula::neg(a.substitute(s)),
            Formula::And(a, b) => Formula::and(a.substitute(s), b.substitute(s)),
            Formula::Imp(a, b) => Formula::imp(a.substitute(s), b.substitute(s)),
            Formula::Box(i, a) => Formula::boxed(i.clone(), a.substitute(s)),
        }
    }

    /// The modal Gödel–Gentzen translation: variables and boxes are wrapped in
    /// a double negation, the Boolean connectives are kept.
    pub fn negative_translation(&self) -> Formula {
        let dn = |f: Formula| Formula::neg(Formula::neg(f));
        match self {
            Formula::Var(_) => dn(self.clone()),
            Formula::Neg(a) => Formula::neg(a.negative_translation()),
            Formula::And(a, b) => Formula::and(a.negative_translation(), b.negative_translation()),
            Formula::Imp(a, b) => Formula::imp(a.negative_translation(), b.negative_translation()),
            Formula::Box(i, a) => dn(Formula::boxed(i.clone(), a.negative_translation())),
        }
    }

    pub fn parse(text: &str) -> Result<Formula> {
        Parser::new(text)?.parse_all()
    }
}

/// Shorthand for [`Formula::parse`].
pub fn parse(text: &str) -> Result<Formula> {
    Formula::parse(text)
}

/// Free-function form of [`Formula::substitute`].
pub fn substitute(f: &Formula, s: &BTreeMap<String, Formula>) -> Formula {
    f.substitute(s)
}

/// Free-function form of [`Formula::negative_translation`].
pub fn negative_translation(f: &Formula) -> Formula {
    f.negative_translation()
}

// ---------------------------------------------------------------------------
// Printing

/// A formula seen through the sugar it was built from.
enum Shape<'a> {
    Top,
    Bot,
    Var(&'a str),
    Neg(&'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Imp(&'a Formula, &'a Formula),
    Iff(&'a Formula, &'a Formula),
    Box(&'a str, &'a Formula),
    Dia(&'a str, &'a Formula),
}

fn is_bot(f: &Formula) -> bool {
    match f {
        Formula::And(a, b) => match (&**a, &**b) {
            (Formula::Var(v), Formula::Neg(w)) => {
                v == RESERVED_VAR && matches!(&**w, Formula::Var(u) if u == RESERVED_VAR)
            }
            _ => false,
        },
        _ => false,
    }
}

fn shape(f: &Formula) -> Shape<'_> {
    match f {
        Formula::Var(v) => Shape::Var(v),
        Formula::Neg(a) => {
            if is_bot(a) {
                return Shape::Top;
            }
            match &**a {
                Formula::And(l, r) => {
                    if let (Formula::Neg(l), Formula::Neg(r)) = (&**l, &**r) {
                        return Shape::Or(l, r);
                    }
                }
                Formula::Box(i, b) => {
                    if let Formula::Neg(c) = &**b {
                        return Shape::Dia(i, c);
                    }
                }
                _ => {}
            }
            Shape::Neg(a)
        }
        Formula::And(a, b) => {
            if is_bot(f) {
                return Shape::Bot;
            }
            if let (Formula::Imp(a1, b1), Formula::Imp(b2, a2)) = (&**a, &**b) {
                if a1 == a2 && b1 == b2 {
                    return Shape::Iff(a1, b1);
                }
            }
            Shape::And(a, b)
        }
        Formula::Imp(a, b) => Shape::Imp(a, b),
        Formula::Box(i, a) => Shape::Box(i, a),
    }
}

const PREC_IFF: u8 = 1;
const PREC_IMP: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_UNARY: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match shape(f) {
        Shape::Iff(..) => PREC_IFF,
        Shape::Imp(..) => PREC_IMP,
        Shape::Or(..) => PREC_OR,
        Shape::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut String) {
    if prec(f) < min {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    match shape(f) {
        Shape::Top => out.push_str("#t"),
        Shape::Bot => out.push_str("#f"),
        Shape::Var(v) => out.push_str(v),
        Shape::Neg(a) => {
            out.push('~');
            write_at(a, PREC_UNARY, out);
        }
        Shape::Box(i, a) => {
            out.push('[');
            out.push_str(i);
            out.push(']');
            write_at(a, PREC_UNARY, out);
        }
        Shape::Dia(i, a) => {
            out.push('<');
            out.push_str(i);
            out.push('>');
            write_at(a, PREC_UNARY, out);
        }
        Shape::And(a, b) => {
            write_at(a, PREC_AND, out);
            out.push_str(" & ");
            write_at(b, PREC_UNARY, out);
        }
        Shape::Or(a, b) => {
            write_at(a, PREC_OR, out);
            out.push_str(" | ");
            write_at(b, PREC_AND, out);
        }
        Shape::Imp(a, b) => {
            write_at(a, PREC_OR, out);
            out.push_str(" -> ");
            write_at(b, PREC_IMP, out);
        }
        Shape::Iff(a, b) => {
            write_at(a, PREC_IMP, out);
            out.push_str(" <-> ");
            write_at(b, PREC_IFF, out);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, &mut s);
        f.write_str(&s)
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    LBracket,
    RBracket,
    Lt,
    Gt,
    LParen,
    RParen,
    Top,
    Bot,
    Reserved,
    End,
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let symbol_error = |offset| Error::Syntax {
        offset,
        expected: ["identifier", "`~`", "`&`", "`|`", "`->`", "`<->`", "`[`", "`]`", "`<`", "`>`", "`(`", "`)`", "`#t`", "`#f`"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'>' => Tok::Gt,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    Tok::Arrow
                } else {
                    return Err(Error::Syntax {
                        offset: i + 1,
                        expected: vec!["`>`".into()],
                    });
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    i += 2;
                    Tok::DoubleArrow
                } else {
                    Tok::Lt
                }
            }
            b'#' => match bytes.get(i + 1) {
                Some(b't') => {
                    i += 1;
                    Tok::Top
                }
                Some(b'f') => {
                    i += 1;
                    Tok::Bot
                }
                Some(b'v') => {
                    i += 1;
                    Tok::Reserved
                }
                _ => {
                    return Err(Error::Syntax {
                        offset: i + 1,
                        expected: vec!["`t`".into(), "`f`".into()],
                    })
                }
            },
            c if is_ident_char(c) => {
                while i + 1 < bytes.len() && is_ident_char(bytes[i + 1]) {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => return Err(symbol_error(i)),
        };
        if matches!(tok, Tok::Top | Tok::Bot | Tok::Reserved)
            && bytes.get(i + 1).is_some_and(|&c| is_ident_char(c))
        {
            return Err(symbol_error(i + 1));
        }
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const PREFIX_EXPECTED: &[&str] = &["variable", "`~`", "`[`", "`<`", "`(`", "`#t`", "`#f`"];

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn parse_all(mut self) -> Result<Formula> {
        let f = self.parse_iff()?;
        if *self.peek() != Tok::End {
            return self.fail(&["`&`", "`|`", "`->`", "`<->`", "end of input"]);
        }
        Ok(f)
    }

    fn parse_iff(&mut self) -> Result<Formula> {
        let left = self.parse_imp()?;
        if *self.peek() == Tok::DoubleArrow {
            self.bump();
            let right = self.parse_iff()?;
            return Ok(Formula::iff(left, right));
        }
        Ok(left)
    }

    fn parse_imp(&mut self) -> Result<Formula> {
        let left = self.parse_or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.parse_imp()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn parse_or(&mut self) -> Result<Formula> {
        let mut left = self.parse_and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.parse_and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Formula> {
        let mut left = self.parse_unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.parse_unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn parse_index(&mut self, close: Tok, close_name: &str) -> Result<String> {
        let index = match self.bump() {
            Tok::Ident(name) => name,
            _ => {
                self.pos -= 1;
                return self.fail(&["modal index"]);
            }
        };
        if self.bump() != close {
            self.pos -= 1;
            return self.fail(&[close_name]);
        }
        Ok(index)
    }

    fn parse_unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::neg(self.parse_unary()?))
            }
            Tok::LBracket => {
                self.bump();
                let i = self.parse_index(Tok::RBracket, "`]`")?;
                Ok(Formula::boxed(i, self.parse_unary()?))
            }
            Tok::Lt => {
                self.bump();
                let i = self.parse_index(Tok::Gt, "`>`")?;
                Ok(Formula::dia(i, self.parse_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.parse_iff()?;
                if *self.peek() != Tok::RParen {
                    return self.fail(&["`&`", "`|`", "`->`", "`<->`", "`)`"]);
                }
                self.bump();
                Ok(f)
            }
            Tok::Top => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::bot())
            }
            Tok::Reserved => {
                self.bump();
                Ok(Formula::var(RESERVED_VAR))
            }
            Tok::Ident(name) => {
                if name.as_bytes()[0].is_ascii_digit() {
                    return self.fail(&["variable"]);
                }
                self.bump();
                Ok(Formula::Var(name))
            }
            _ => self.fail(PREFIX_EXPECTED),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: usize) -> Formula {
        Formula::p(k)
    }

    #[test]
    fn parses_box_and_diamond() {
        let f = parse("[a]p1 -> <a>p1").unwrap();
        assert_eq!(f, Formula::imp(Formula::boxed("a", p(1)), Formula::dia("a", p(1))));
    }

    #[test]
    fn parses_negated_contradiction() {
        let f = parse("~(p1 & ~p1)").unwrap();
        assert_eq!(f, Formula::neg(Formula::and(p(1), Formula::neg(p(1)))));
    }

    #[test]
    fn disjunction_is_sugar() {
        let f = parse("(p1 | p2)").unwrap();
        assert_eq!(
            f,
            Formula::neg(Formula::and(Formula::neg(p(1)), Formula::neg(p(2))))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("p1 & p2 | p3 -> p4 <-> p5").unwrap();
        let expected = Formula::iff(
            Formula::imp(Formula::or(Formula::and(p(1), p(2)), p(3)), p(4)),
            p(5),
        );
        assert_eq!(f, expected);
        assert_eq!(
            parse("p1 -> p2 -> p3").unwrap(),
            Formula::imp(p(1), Formula::imp(p(2), p(3)))
        );
        assert_eq!(
            parse("p1 & p2 & p3").unwrap(),
            Formula::and(Formula::and(p(1), p(2)), p(3))
        );
        assert_eq!(
            parse("~[i]p1 & p2").unwrap(),
            Formula::and(Formula::neg(Formula::boxed("i", p(1))), p(2))
        );
    }

    #[test]
    fn printing_uses_sugar() {
        for text in [
            "[a]p1 -> <a>p1",
            "p1 | p2",
            "#t",
            "#f",
            "p1 <-> ~p2",
            "<i>[i]p1 -> [i]<i>p1",
            "(p1 -> p2) -> p3",
            "p1 & (p2 & p3)",
            "~(p1 & p2)",
            "[i](p1 | p2) & <j>#t",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn syntax_errors_report_offset_and_expectations() {
        match parse("p1 & ") {
            Err(Error::Syntax { offset, expected }) => {
                assert_eq!(offset, 5);
                assert!(expected.contains(&"variable".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("(p1 p2") {
            Err(Error::Syntax { offset, expected }) => {
                assert_eq!(offset, 4);
                assert!(expected.contains(&"`)`".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("[i p1"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("p1 $ p2"), Err(Error::Syntax { offset: 3, .. })));
    }

    #[test]
    fn substitution_examples() {
        let mut s = BTreeMap::new();
        s.insert("p1".to_string(), Formula::and(p(1), p(2)));
        assert_eq!(
            Formula::boxed("a", p(1)).substitute(&s),
            Formula::boxed("a", Formula::and(p(1), p(2)))
        );
        assert_eq!(p(1).substitute(&BTreeMap::new()), p(1));
        let mut s = BTreeMap::new();
        s.insert("p1".to_string(), Formula::bot());
        assert_eq!(
            Formula::imp(p(1), p(1)).substitute(&s),
            Formula::imp(Formula::bot(), Formula::bot())
        );
    }

    #[test]
    fn negative_translation_examples() {
        let dn = |f: Formula| Formula::neg(Formula::neg(f));
        assert_eq!(p(1).negative_translation(), dn(p(1)));
        assert_eq!(
            Formula::boxed("a", p(1)).negative_translation(),
            dn(Formula::boxed("a", dn(p(1))))
        );
        assert_eq!(
            Formula::and(p(1), p(2)).negative_translation(),
            Formula::and(dn(p(1)), dn(p(2)))
        );
    }

    #[test]
    fn variables_and_indices() {
        let v: Vec<String> = Formula::imp(p(2), p(1)).variables().into_iter().collect();
        assert_eq!(v, vec!["p1", "p2"]);
        let i: Vec<String> = Formula::boxed("a", Formula::dia("b", p(1)))
            .indices()
            .into_iter()
            .collect();
        assert_eq!(i, vec!["a", "b"]);
        let t: Vec<String> = Formula::top().variables().into_iter().collect();
        assert_eq!(t, vec![RESERVED_VAR]);
    }
}
