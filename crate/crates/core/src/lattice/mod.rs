//! Ordered state spaces and their symbolic set representations.
//!
//! A state space is a finite meet-semilattice `(S, ⪯)`. Downward-closed
//! subsets are represented by [`Antichain`]s of their maximal elements, and
//! arbitrary subsets by [`PseudoAntichain`]s: finite unions of
//! pseudo-closures `↓{x} \ ↓α`.
//!
//! All set operations work on the representations only; the closures are
//! never enumerated outside of tests and the explicit oracle.

mod antichain;
mod domains;
mod pseudo;

use std::fmt::Debug;
use std::hash::Hash;

pub use antichain::Antichain;
pub use domains::{CondSet, Grid, GridPoint, SubsetDomain};
pub use pseudo::{PaRecord, PseudoAntichain, PseudoElement};

/// An element of a finite meet-semilattice.
///
/// `Ord` is an arbitrary total order used only to keep representations in a
/// canonical layout; it has nothing to do with `leq`.
pub trait Lattice: Clone + Eq + Ord + Hash + Debug {
    /// The partial order `⪯`.
    fn leq(&self, other: &Self) -> bool;

    /// Greatest lower bound `⊓`.
    fn meet(&self, other: &Self) -> Self;
}

/// A concrete state space: a closed set `↓⌈S⌉` of lattice elements.
pub trait Domain {
    type Elem: Lattice;

    /// Maximal elements of the state space.
    fn top(&self) -> Antichain<Self::Elem>;

    /// Human readable rendering of an element.
    fn render(&self, e: &Self::Elem) -> String;

    /// Every element of the state space below `x` (inclusive). Only used by
    /// enumerative code paths.
    fn below(&self, x: &Self::Elem) -> Vec<Self::Elem>;

    /// `|↓{x}|`, without enumerating when possible.
    fn below_count(&self, x: &Self::Elem) -> u128 {
        self.below(x).len() as u128
    }

    /// Enumerate the whole state space.
    fn enumerate(&self) -> Vec<Self::Elem> {
        let mut all: Vec<Self::Elem> = self.top().iter().flat_map(|x| self.below(x)).collect();
        all.sort();
        all.dedup();
        all
    }
}
