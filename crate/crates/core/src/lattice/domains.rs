use std::fmt;

use super::{Antichain, Domain, Lattice};

/// A point of the bounded grid `N^k_{≤n}` under the componentwise order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint(Vec<u16>);

impl GridPoint {
    pub fn new(coords: Vec<u16>) -> Self {
        GridPoint(coords)
    }

    pub fn coords(&self) -> &[u16] {
        &self.0
    }
}

impl fmt::Debug for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Lattice for GridPoint {
    fn leq(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn meet(&self, other: &Self) -> Self {
        GridPoint(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

/// The lattice `N^dims_{≤max}`.
#[derive(Clone, Debug)]
pub struct Grid {
    pub dims: usize,
    pub max: u16,
}

impl Grid {
    pub fn new(dims: usize, max: u16) -> Self {
        Grid { dims, max }
    }

    pub fn point(&self, coords: &[u16]) -> GridPoint {
        assert_eq!(coords.len(), self.dims, "wrong arity");
        GridPoint(coords.to_vec())
    }
}

impl Domain for Grid {
    type Elem = GridPoint;

    fn top(&self) -> Antichain<GridPoint> {
        Antichain::singleton(GridPoint(vec![self.max; self.dims]))
    }

    fn render(&self, e: &GridPoint) -> String {
        format!("{e:?}")
    }

    fn below(&self, x: &GridPoint) -> Vec<GridPoint> {
        let mut out = vec![Vec::with_capacity(self.dims)];
        for &bound in x.coords() {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u16>| {
                    (0..=bound).map(move |c| {
                        let mut next = prefix.clone();
                        next.push(c);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(GridPoint).collect()
    }

    fn below_count(&self, x: &GridPoint) -> u128 {
        x.coords().iter().map(|&c| c as u128 + 1).product()
    }
}

/// A set of STRIPS conditions, packed into a bitmask (at most 64 conditions).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CondSet(pub u64);

impl CondSet {
    pub const EMPTY: CondSet = CondSet(0);

    pub fn from_indices<I: IntoIterator<Item = usize>>(idx: I) -> Self {
        CondSet(idx.into_iter().fold(0u64, |m, i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, other: CondSet) -> CondSet {
        CondSet(self.0 | other.0)
    }

    pub fn minus(self, other: CondSet) -> CondSet {
        CondSet(self.0 & !other.0)
    }

    pub fn intersects(self, other: CondSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_superset(self, other: CondSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits >> i & 1 == 1)
    }
}

impl fmt::Debug for CondSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

/// `s ⪯ s'` iff `s ⊇ s'`; the meet is set union and `∅` is the only
/// maximal element.
impl Lattice for CondSet {
    fn leq(&self, other: &Self) -> bool {
        self.is_superset(*other)
    }

    fn meet(&self, other: &Self) -> Self {
        self.union(*other)
    }
}

/// The powerset `2^P` of a named condition set, ordered by `⊇`.
#[derive(Clone, Debug)]
pub struct SubsetDomain {
    names: Vec<String>,
}

impl SubsetDomain {
    pub fn new(names: Vec<String>) -> Self {
        assert!(names.len() <= 64, "at most 64 conditions are supported");
        SubsetDomain { names }
    }

    /// Anonymous conditions `p0 .. p{n-1}`.
    pub fn anonymous(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("p{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn full(&self) -> CondSet {
        if self.names.len() == 64 {
            CondSet(u64::MAX)
        } else {
            CondSet((1u64 << self.names.len()) - 1)
        }
    }

    pub fn set_of<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Option<CondSet> {
        let mut idx = Vec::new();
        for n in names {
            idx.push(self.index_of(n)?);
        }
        Some(CondSet::from_indices(idx))
    }
}

impl Domain for SubsetDomain {
    type Elem = CondSet;

    fn top(&self) -> Antichain<CondSet> {
        Antichain::singleton(CondSet::EMPTY)
    }

    fn render(&self, e: &CondSet) -> String {
        let items: Vec<&str> = e.indices().map(|i| self.names[i].as_str()).collect();
        format!("{{{}}}", items.join(","))
    }

    fn below(&self, x: &CondSet) -> Vec<CondSet> {
        // Every superset of x inside the condition set.
        let free = self.full().minus(*x).0;
        let mut out = Vec::with_capacity(1usize << free.count_ones());
        let mut sub = free;
        loop {
            out.push(CondSet(x.0 | sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
        out.sort();
        out
    }

    fn below_count(&self, x: &CondSet) -> u128 {
        1u128 << (self.len() - x.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_below_counts() {
        let g = Grid::new(2, 3);
        assert_eq!(g.enumerate().len(), 16);
        assert_eq!(g.below(&g.point(&[1, 2])).len(), 6);
    }

    #[test]
    fn subset_order_is_reverse_inclusion() {
        let a = CondSet::from_indices([0, 1]);
        let b = CondSet::from_indices([1]);
        assert!(a.leq(&b));
        assert!(!b.leq(&a));
        assert_eq!(a.meet(&CondSet::from_indices([2])), CondSet::from_indices([0, 1, 2]));
    }

    #[test]
    fn subset_domain_enumeration() {
        let d = SubsetDomain::anonymous(3);
        assert_eq!(d.enumerate().len(), 8);
        assert_eq!(d.below(&CondSet::from_indices([0])).len(), 4);
        assert_eq!(SubsetDomain::anonymous(0).enumerate(), vec![CondSet::EMPTY]);
        assert_eq!(d.render(&CondSet::from_indices([0, 2])), "{p0,p2}");
    }
}
