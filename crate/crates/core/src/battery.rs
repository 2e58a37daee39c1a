//! A fixed, versioned list of test formulas.
//!
//! Equivalence claims between frames ("F and G validate the same formulas")
//! are checked against this list. It contains every Boolean shape over two
//! variables, their one-step boxes and diamonds, all implications between
//! iterated modalities of depth at most two, and a set of classical modal
//! principles. The list is generated by [`generate`] and stored in
//! `data/battery_v1.txt`; a test keeps the two in sync.

use crate::formula::Formula;

/// The stored battery file.
pub const BATTERY_V1: &str = include_str!("../data/battery_v1.txt");

/// Parses the stored battery. Lines starting with `//` are comments.
pub fn battery() -> Vec<Formula> {
    BATTERY_V1
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("//"))
        .map(|l| Formula::parse(l).expect("battery formulas parse"))
        .collect()
}

/// Same list with every modality re-indexed to `index`.
pub fn battery_for(index: &str) -> Vec<Formula> {
    battery().into_iter().map(|f| reindex(&f, index)).collect()
}

fn reindex(f: &Formula, index: &str) -> Formula {
    match f {
        Formula::Var(_) => f.clone(),
        Formula::Neg(a) => Formula::neg(reindex(a, index)),
        Formula::And(a, b) => Formula::and(reindex(a, index), reindex(b, index)),
        Formula::Imp(a, b) => Formula::imp(reindex(a, index), reindex(b, index)),
        Formula::Box(_, a) => Formula::boxed(index, reindex(a, index)),
    }
}

/// Rebuilds the battery text from scratch.
pub fn generate() -> String {
    let p1 = Formula::p(1);
    let p2 = Formula::p(2);
    let bx = |a: Formula| Formula::boxed("i", a);
    let dm = |a: Formula| Formula::dia("i", a);

    let boolean = vec![
        p1.clone(),
        p2.clone(),
        Formula::neg(p1.clone()),
        Formula::and(p1.clone(), p2.clone()),
        Formula::or(p1.clone(), p2.clone()),
        Formula::imp(p1.clone(), p2.clone()),
        Formula::imp(p2.clone(), p1.clone()),
        Formula::iff(p1.clone(), p2.clone()),
        Formula::neg(Formula::and(p1.clone(), p2.clone())),
        Formula::or(p1.clone(), Formula::neg(p1.clone())),
        Formula::bot(),
    ];

    let mut out: Vec<Formula> = boolean.clone();
    for a in &boolean {
        out.push(bx(a.clone()));
        out.push(dm(a.clone()));
    }

    let shapes = vec![
        p1.clone(),
        bx(p1.clone()),
        dm(p1.clone()),
        bx(bx(p1.clone())),
        bx(dm(p1.clone())),
        dm(bx(p1.clone())),
        dm(dm(p1.clone())),
    ];
    for a in &shapes {
        for b in &shapes {
            if a != b {
                out.push(Formula::imp(a.clone(), b.clone()));
            }
        }
    }

    let principles = [
        "[i](p1 -> p2) -> ([i]p1 -> [i]p2)",
        "[i](p1 & p2) <-> [i]p1 & [i]p2",
        "<i>(p1 | p2) -> <i>p1 | <i>p2",
        "[i](p1 | p2) -> [i]p1 | [i]p2",
        "<i>p1 & [i]p2 -> <i>(p1 & p2)",
        "[i]~p1 <-> ~<i>p1",
        "[i]([i]p1 -> p1) -> [i]p1",
        "[i]([i]p1 -> p1)",
        "p1 -> [i]<i>p1",
        "<i>[i]p1 -> p1",
        "<i>p1 -> [i]<i>p1",
        "<i>[i]p1 -> [i]p1",
        "[i]<i>p1 -> <i>[i]p1",
        "<i>[i]p1 -> [i]<i>p1",
        "<i>#t",
        "[i]#f",
        "~<i>#t",
        "<i><i>#t",
        "[i]<i>#t",
        "<i>#t -> <i><i>#t",
        "[i](p1 -> p2) -> (<i>p1 -> <i>p2)",
        "[i](p1 <-> p2) -> ([i]p1 <-> [i]p2)",
        "<i>(p1 & ~p2) | [i](p1 -> p2)",
        "[i]([i]p1 | [i]p2) -> [i][i]p1 | [i][i]p2",
        "[i](p1 | [i]p2) -> [i]p1 | [i][i]p2",
        "<i>(p1 & <i>p2) -> <i><i>(p1 | p2)",
        "[i][i](p1 & p2) -> [i]p1",
        "~[i]p1 -> <i>~p1",
        "~~p1 -> p1",
        "((p1 -> p2) -> p1) -> p1",
        "[i]p1 -> [i](p1 | p2)",
        "<i>(p1 & p2) -> <i>p1",
        "[i]p1 & [i]p2 -> [i](p1 & p2)",
        "[i](p1 -> [i]p1)",
        "<i>(p1 -> p2) | [i]p1",
    ];
    for s in principles {
        out.push(Formula::parse(s).expect("principle parses"));
    }

    let mut seen = std::collections::HashSet::new();
    out.retain(|f| seen.insert(f.clone()));

    let mut text = String::from(
        "// Formula battery v1: one formula per line, index i, variables p1 and p2.\n\
         // Regenerate with REGENERATE_BATTERY=1 cargo test stored_battery.\n",
    );
    for f in out {
        text.push_str(&f.to_string());
        text.push('\n');
    }
    text
}
