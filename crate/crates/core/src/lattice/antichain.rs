use super::Lattice;

/// A set of pairwise incomparable elements, standing for its downward
/// closure `↓α`.
///
/// Elements are kept sorted by the element's `Ord`, so two antichains
/// denoting the same closed set are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Antichain<E> {
    elems: Vec<E>,
}

impl<E> Default for Antichain<E> {
    fn default() -> Self {
        Antichain { elems: Vec::new() }
    }
}

impl<E: Lattice> Antichain<E> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(e: E) -> Self {
        Antichain { elems: vec![e] }
    }

    /// `⌈L⌉`: the maximal elements of an arbitrary collection.
    pub fn maximal<I: IntoIterator<Item = E>>(items: I) -> Self {
        let mut kept: Vec<E> = Vec::new();
        for e in items {
            if kept.iter().any(|k| e.leq(k)) {
                continue;
            }
            kept.retain(|k| !k.leq(&e));
            kept.push(e);
        }
        kept.sort();
        Antichain { elems: kept }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, E> {
        self.elems.iter()
    }

    pub fn elements(&self) -> &[E] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Membership in the closure: `s ∈ ↓α`.
    pub fn contains(&self, s: &E) -> bool {
        self.elems.iter().any(|a| s.leq(a))
    }

    /// `α ∪̇ β`, the antichain of `↓α ∪ ↓β`.
    pub fn union(&self, other: &Self) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        Self::maximal(self.elems.iter().chain(other.elems.iter()).cloned())
    }

    /// `α ∩̇ β`, the antichain of `↓α ∩ ↓β`.
    pub fn intersect(&self, other: &Self) -> Self {
        Self::maximal(
            self.elems
                .iter()
                .flat_map(|a| other.elems.iter().map(move |b| a.meet(b))),
        )
    }

    /// `↓self ⊆ ↓other`.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.elems.iter().all(|a| other.contains(a))
    }

    /// `{x} ∩̇ α`: the part of `↓α` below `x`.
    pub fn below(&self, x: &E) -> Self {
        if self.elems.iter().all(|a| a.leq(x)) {
            return self.clone();
        }
        Self::maximal(self.elems.iter().map(|a| x.meet(a)))
    }
}

impl<'a, E> IntoIterator for &'a Antichain<E> {
    type Item = &'a E;
    type IntoIter = std::slice::Iter<'a, E>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridPoint;

    fn p(a: u16, b: u16) -> GridPoint {
        GridPoint::new(vec![a, b])
    }

    fn ac(pts: &[(u16, u16)]) -> Antichain<GridPoint> {
        Antichain::maximal(pts.iter().map(|&(a, b)| p(a, b)))
    }

    #[test]
    fn membership() {
        let alpha = ac(&[(2, 1), (0, 2)]);
        assert!(!alpha.contains(&p(1, 2)));
        assert!(alpha.contains(&p(2, 1)));
        assert!(ac(&[(2, 1)]).contains(&p(0, 0)));
    }

    #[test]
    fn maximal_drops_dominated() {
        let alpha = ac(&[(1, 1), (2, 1), (0, 3), (0, 2)]);
        assert_eq!(alpha, ac(&[(2, 1), (0, 3)]));
        assert_eq!(alpha.len(), 2);
    }

    #[test]
    fn union_absorbs() {
        assert_eq!(ac(&[(2, 1)]).union(&ac(&[(1, 1)])), ac(&[(2, 1)]));
    }

    #[test]
    fn intersection_takes_pairwise_meets() {
        let got = ac(&[(2, 1), (0, 3)]).intersect(&ac(&[(1, 2)]));
        assert_eq!(got, ac(&[(1, 1), (0, 2)]));
    }

    #[test]
    fn subset() {
        assert!(ac(&[(1, 1)]).is_subset(&ac(&[(2, 1), (0, 2)])));
        assert!(!ac(&[(1, 2)]).is_subset(&ac(&[(2, 1), (0, 2)])));
        assert!(Antichain::<GridPoint>::empty().is_subset(&ac(&[(0, 0)])));
    }
}
