//! Finite action-observation sequences and their canonical ordering.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interface::Interface;

/// A finite sequence of (action index, observation index) pairs. The empty
/// history is the identity for concatenation.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct History(Vec<(u16, u16)>);

impl History {
    pub fn empty() -> Self {
        History(Vec::new())
    }

    pub fn from_pairs(pairs: Vec<(u16, u16)>) -> Self {
        History(pairs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(u16, u16)] {
        &self.0
    }

    pub fn push(&mut self, action: u16, observation: u16) {
        self.0.push((action, observation));
    }

    /// `self` extended by one step, leaving `self` untouched.
    pub fn extended(&self, action: u16, observation: u16) -> History {
        let mut pairs = self.0.clone();
        pairs.push((action, observation));
        History(pairs)
    }

    /// Concatenation `self · suffix`.
    pub fn concat(&self, suffix: &History) -> History {
        let mut pairs = self.0.clone();
        pairs.extend_from_slice(&suffix.0);
        History(pairs)
    }

    pub fn prefix(&self, len: usize) -> History {
        History(self.0[..len].to_vec())
    }

    pub fn is_prefix_of(&self, other: &History) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Canonical order: shorter histories first, ties broken lexicographically
    /// by (action index, observation index). This is the enumeration order
    /// used everywhere an indexed listing of histories is needed.
    pub fn canonical_cmp(&self, other: &History) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }

    pub fn display<'a>(&'a self, interface: &'a Interface) -> HistoryDisplay<'a> {
        HistoryDisplay { history: self, interface }
    }
}

impl fmt::Debug for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, (a, o)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "a{a}o{o}")?;
        }
        Ok(())
    }
}

/// Pretty-printer resolving indices to interface symbols.
pub struct HistoryDisplay<'a> {
    history: &'a History,
    interface: &'a Interface,
}

impl fmt::Display for HistoryDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.history.is_empty() {
            return write!(f, "ε");
        }
        for (i, (a, o)) in self.history.pairs().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(
                f,
                "({},{})",
                self.interface.action_name(*a),
                self.interface.observation_name(*o)
            )?;
        }
        Ok(())
    }
}
