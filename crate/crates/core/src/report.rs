//! Verdicts returned by every checker in the crate.

use std::collections::BTreeMap;
use std::fmt;

use crate::bits::StateSet;

/// Evidence attached to a failed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A tuple of states, listed in the order the condition quantifies them.
    States(Vec<usize>),
    /// One or more state-sets, e.g. the admissible sets a closure check tripped on.
    Sets(Vec<StateSet>),
    /// States together with the admissible sets that make the clause fail.
    StatesAndSets {
        states: Vec<usize>,
        sets: Vec<StateSet>,
    },
    /// A falsifying valuation and the state where the formula is not forced.
    Countermodel {
        valuation: BTreeMap<String, StateSet>,
        state: usize,
    },
    /// Element indices of a finite algebra.
    Elements(Vec<usize>),
    /// A free-form description, used when the witness is a whole structure.
    Text(String),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &[usize]) -> fmt::Result {
            f.write_str("(")?;
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        }
        fn sets(f: &mut fmt::Formatter<'_>, xs: &[StateSet]) -> fmt::Result {
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            Witness::States(xs) => {
                f.write_str("states ")?;
                list(f, xs)
            }
            Witness::Sets(xs) => {
                f.write_str("sets ")?;
                sets(f, xs)
            }
            Witness::StatesAndSets { states, sets: ss } => {
                f.write_str("states ")?;
                list(f, states)?;
                f.write_str(" sets ")?;
                sets(f, ss)
            }
            Witness::Countermodel { valuation, state } => {
                write!(f, "state {state} under")?;
                for (v, s) in valuation {
                    write!(f, " {v}={s}")?;
                }
                Ok(())
            }
            Witness::Elements(xs) => {
                f.write_str("elements ")?;
                list(f, xs)
            }
            Witness::Text(s) => f.write_str(s),
        }
    }
}

/// Outcome of a checker: which condition was tested, whether it holds, and a
/// witness exactly when it does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub condition: String,
    pub verdict: bool,
    pub witness: Option<Witness>,
}

impl CheckReport {
    pub fn holds(condition: impl Into<String>) -> CheckReport {
        CheckReport {
            condition: condition.into(),
            verdict: true,
            witness: None,
        }
    }

    pub fn fails(condition: impl Into<String>, witness: Witness) -> CheckReport {
        CheckReport {
            condition: condition.into(),
            verdict: false,
            witness: Some(witness),
        }
    }

    pub fn from_result(condition: impl Into<String>, r: Option<Witness>) -> CheckReport {
        match r {
            None => CheckReport::holds(condition),
            Some(w) => CheckReport::fails(condition, w),
        }
    }

    /// Witness as a plain state tuple, if it is one.
    pub fn witness_states(&self) -> Option<&[usize]> {
        match &self.witness {
            Some(Witness::States(xs)) => Some(xs),
            Some(Witness::StatesAndSets { states, .. }) => Some(states),
            _ => None,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "condition: {}", self.condition)?;
        if let Some(w) = &self.witness {
            writeln!(f, "witness: {w}")?;
        }
        write!(f, "verdict: {}", self.verdict)
    }
}
