//! Fixed-width state sets.
//!
//! Every structure in this crate is small (at most 64 states or atoms), so a
//! set of states is a single `u64` word and set algebra is a handful of bit
//! operations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not, Sub};

/// Largest number of states (or atoms) a [`StateSet`] can address.
pub const MAX_STATES: usize = 64;

/// A set of states drawn from `0..MAX_STATES`.
///
/// The `Ord` instance is the canonical listing order used everywhere a family
/// of sets is printed or searched: smaller sets first, and among sets of equal
/// size the one whose sorted element list is lexicographically smaller.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> StateSet {
        debug_assert!(n <= MAX_STATES);
        if n >= 64 {
            StateSet(u64::MAX)
        } else {
            StateSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> StateSet {
        StateSet(1u64 << x)
    }

    pub fn from_states<I: IntoIterator<Item = usize>>(it: I) -> StateSet {
        let mut s = StateSet::EMPTY;
        for x in it {
            s.insert(x);
        }
        s
    }

    #[inline]
    pub fn contains(self, x: usize) -> bool {
        x < MAX_STATES && self.0 >> x & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        self.0 |= 1u64 << x;
    }

    #[inline]
    pub fn remove(&mut self, x: usize) {
        self.0 &= !(1u64 << x);
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: StateSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Least member, if any.
    #[inline]
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Image of the set under a map on states.
    pub fn map(self, f: impl Fn(usize) -> usize) -> StateSet {
        self.iter().map(f).collect()
    }

    /// All subsets of `self`, in increasing numeric order of the mask.
    pub fn subsets(self) -> Subsets {
        Subsets {
            universe: self.0,
            next: Some(0),
        }
    }
}

impl Ord for StateSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            // Among equal-size sets the one holding the least element of the
            // symmetric difference comes first.
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for StateSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl BitAnd for StateSet {
    type Output = StateSet;
    #[inline]
    fn bitand(self, rhs: StateSet) -> StateSet {
        StateSet(self.0 & rhs.0)
    }
}

impl BitOr for StateSet {
    type Output = StateSet;
    #[inline]
    fn bitor(self, rhs: StateSet) -> StateSet {
        StateSet(self.0 | rhs.0)
    }
}

impl Sub for StateSet {
    type Output = StateSet;
    #[inline]
    fn sub(self, rhs: StateSet) -> StateSet {
        StateSet(self.0 & !rhs.0)
    }
}

impl BitAndAssign for StateSet {
    fn bitand_assign(&mut self, rhs: StateSet) {
        self.0 &= rhs.0;
    }
}

impl BitOrAssign for StateSet {
    fn bitor_assign(&mut self, rhs: StateSet) {
        self.0 |= rhs.0;
    }
}

impl Not for StateSet {
    type Output = StateSet;
    fn not(self) -> StateSet {
        StateSet(!self.0)
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        StateSet::from_states(iter)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, x) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;
    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let x = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(x)
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

/// Subset enumeration by the standard `(s - u) & u` trick.
pub struct Subsets {
    universe: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = StateSet;
    fn next(&mut self) -> Option<StateSet> {
        let cur = self.next?;
        self.next = if cur == self.universe {
            None
        } else {
            Some(cur.wrapping_sub(self.universe) & self.universe)
        };
        Some(StateSet(cur))
    }
}
