use serde::Serialize;

use super::{Antichain, Domain, Lattice};
use crate::error::{Error, Result};

/// A couple `(x, α)` with `x ∉ ↓α`, denoting `↓{x} \ ↓α`.
///
/// Values of this type are always in canonical form: every member of `α` is
/// below `x`. Two canonical pseudo-elements denote the same set iff they are
/// structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PseudoElement<E> {
    x: E,
    alpha: Antichain<E>,
}

impl<E: Lattice> PseudoElement<E> {
    /// Canonicalize `(x, α)`, rejecting couples with `x ∈ ↓α`.
    pub fn new(x: E, alpha: Antichain<E>) -> Result<Self> {
        let shown = format!("{x:?}");
        Self::make(x, alpha).ok_or(Error::NotPseudoElement(shown))
    }

    /// Canonicalize `(x, α)`; `None` when the pseudo-closure is empty.
    pub fn make(x: E, alpha: Antichain<E>) -> Option<Self> {
        if alpha.contains(&x) {
            return None;
        }
        let alpha = alpha.below(&x);
        Some(PseudoElement { x, alpha })
    }

    /// The plain closure `↓{x}`.
    pub fn closure(x: E) -> Self {
        PseudoElement {
            x,
            alpha: Antichain::empty(),
        }
    }

    pub fn x(&self) -> &E {
        &self.x
    }

    pub fn alpha(&self) -> &Antichain<E> {
        &self.alpha
    }

    pub fn contains(&self, s: &E) -> bool {
        s.leq(&self.x) && !self.alpha.contains(s)
    }

    /// `↕self ⊆ ↕other`, decided on the representations.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.x.leq(&other.x) && other.alpha.iter().all(|b| self.alpha.contains(&b.meet(&self.x)))
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let x = self.x.meet(&other.x);
        // Only the exclusions that actually cut into ↓x matter; checking
        // membership first avoids building the union for empty results.
        if self.alpha.contains(&x) || other.alpha.contains(&x) {
            return None;
        }
        Self::make(x, self.alpha.union(&other.alpha))
    }

    /// `↕self \ ↕other` as a list of canonical pseudo-elements.
    pub fn difference(&self, other: &Self) -> Vec<Self> {
        let meet = self.x.meet(&other.x);
        if self.alpha.contains(&meet) || other.alpha.contains(&meet) {
            // ↕self ∩ ↕other is empty.
            return vec![self.clone()];
        }
        if self.is_subset(other) {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(other.alpha.len() + 1);
        let outer = self.alpha.union(&Antichain::singleton(other.x.clone()));
        if let Some(p) = Self::make(self.x.clone(), outer) {
            out.push(p);
        }
        for b in &other.alpha {
            if let Some(p) = Self::make(self.x.meet(b), self.alpha.clone()) {
                out.push(p);
            }
        }
        out
    }
}

/// A finite union of pseudo-closures, kept in simplified form.
///
/// Simplified means: every element canonical, pairwise distinct `x`
/// components, and no element's pseudo-closure contained in another's.
/// Simplified forms are not unique, so equality of denoted sets must be
/// tested with [`PseudoAntichain::equals`], not `==`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PseudoAntichain<E> {
    elems: Vec<PseudoElement<E>>,
}

impl<E> Default for PseudoAntichain<E> {
    fn default() -> Self {
        PseudoAntichain { elems: Vec::new() }
    }
}

impl<E: Lattice> PseudoAntichain<E> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_element(p: PseudoElement<E>) -> Self {
        PseudoAntichain { elems: vec![p] }
    }

    /// The closed set `↓α`.
    pub fn from_antichain(alpha: &Antichain<E>) -> Self {
        // An antichain has distinct, incomparable members: already simplified.
        PseudoAntichain {
            elems: alpha.iter().cloned().map(PseudoElement::closure).collect(),
        }
    }

    /// The whole state space of a domain.
    pub fn full<D: Domain<Elem = E>>(domain: &D) -> Self {
        Self::from_antichain(&domain.top())
    }

    /// Build from arbitrary pseudo-elements, simplifying.
    pub fn from_elements<I: IntoIterator<Item = PseudoElement<E>>>(items: I) -> Self {
        Self::simplify(items.into_iter().collect())
    }

    /// Simplification: merge equal `x` components, then drop contained elements.
    pub fn simplify(mut elems: Vec<PseudoElement<E>>) -> Self {
        if elems.len() <= 1 {
            return PseudoAntichain { elems };
        }
        elems.sort();
        let mut merged: Vec<PseudoElement<E>> = Vec::with_capacity(elems.len());
        for p in elems {
            match merged.last_mut() {
                Some(last) if last.x == p.x => {
                    // ↓x\↓α ∪ ↓x\↓β = ↓x \ (↓α ∩ ↓β); still canonical.
                    last.alpha = last.alpha.intersect(&p.alpha);
                }
                _ => merged.push(p),
            }
        }
        // Drop elements contained in another; among equal sets keep one.
        let n = merged.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            if !keep[i] {
                continue;
            }
            for j in 0..n {
                if i != j && keep[j] && merged[i].is_subset(&merged[j]) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let elems = merged
            .into_iter()
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect();
        PseudoAntichain { elems }
    }

    pub fn elements(&self) -> &[PseudoElement<E>] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PseudoElement<E>> {
        self.elems.iter()
    }

    /// Number of pseudo-elements in the representation.
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, s: &E) -> bool {
        self.elems.iter().any(|p| p.contains(s))
    }

    pub fn union(&self, other: &Self) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        Self::simplify(self.elems.iter().chain(&other.elems).cloned().collect())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for p in &self.elems {
            for q in &other.elems {
                if let Some(r) = p.intersect(q) {
                    out.push(r);
                }
            }
        }
        Self::simplify(out)
    }

    /// `↕self ∩ ↕other ≠ ∅`, without building the intersection.
    pub fn intersects(&self, other: &Self) -> bool {
        self.elems.iter().any(|p| {
            other.elems.iter().any(|q| {
                let m = p.x.meet(&q.x);
                !p.alpha.contains(&m) && !q.alpha.contains(&m)
            })
        })
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut cur = self.elems.clone();
        for q in &other.elems {
            if cur.is_empty() {
                break;
            }
            let next: Vec<_> = cur.iter().flat_map(|p| p.difference(q)).collect();
            cur = Self::simplify(next).elems;
        }
        PseudoAntichain { elems: cur }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        // Cheap sufficient test first: each element inside a single one.
        if self.elems.iter().all(|p| other.elems.iter().any(|q| p.is_subset(q))) {
            return true;
        }
        self.difference(other).is_empty()
    }

    /// Equality of the denoted sets.
    pub fn equals(&self, other: &Self) -> bool {
        self == other || (self.is_subset(other) && other.is_subset(self))
    }

    /// Enumerate the denoted set. Only for tests and explicit code paths.
    pub fn enumerate<D: Domain<Elem = E>>(&self, domain: &D) -> Vec<E> {
        let mut out: Vec<E> = self
            .elems
            .iter()
            .flat_map(|p| domain.below(&p.x).into_iter().filter(move |s| !p.alpha.contains(s)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Debug serialization: one record per pseudo-element.
    pub fn records<D: Domain<Elem = E>>(&self, domain: &D) -> Vec<PaRecord> {
        self.elems
            .iter()
            .map(|p| PaRecord {
                max: domain.render(&p.x),
                excluded: p.alpha.iter().map(|a| domain.render(a)).collect(),
            })
            .collect()
    }
}

impl<'a, E> IntoIterator for &'a PseudoAntichain<E> {
    type Item = &'a PseudoElement<E>;
    type IntoIter = std::slice::Iter<'a, PseudoElement<E>>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PaRecord {
    pub max: String,
    pub excluded: Vec<String>,
}
