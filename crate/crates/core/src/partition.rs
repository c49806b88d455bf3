//! Symbolic partitions: finite lists of disjoint pseudo-antichain blocks with
//! a payload per block.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, PseudoAntichain};
use crate::mdp::ActionId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPartition<E, P> {
    blocks: Vec<(PseudoAntichain<E>, P)>,
    carrier: PseudoAntichain<E>,
}

/// A strategy: one enabled action per block.
pub type Strategy<E> = SymbolicPartition<E, ActionId>;

impl<E: Lattice, P: Clone> SymbolicPartition<E, P> {
    /// Assemble a partition from blocks already known to be disjoint and to
    /// cover `carrier`. Empty blocks are dropped.
    pub fn from_blocks(carrier: PseudoAntichain<E>, blocks: Vec<(PseudoAntichain<E>, P)>) -> Self {
        let blocks = blocks.into_iter().filter(|(b, _)| !b.is_empty()).collect();
        SymbolicPartition { blocks, carrier }
    }

    /// The one-block partition of `carrier`.
    pub fn single(carrier: PseudoAntichain<E>, payload: P) -> Self {
        let blocks = if carrier.is_empty() {
            Vec::new()
        } else {
            vec![(carrier.clone(), payload)]
        };
        SymbolicPartition { blocks, carrier }
    }

    pub fn empty() -> Self {
        SymbolicPartition {
            blocks: Vec::new(),
            carrier: PseudoAntichain::empty(),
        }
    }

    pub fn blocks(&self) -> &[(PseudoAntichain<E>, P)] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<(PseudoAntichain<E>, P)> {
        self.blocks
    }

    pub fn carrier(&self) -> &PseudoAntichain<E> {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The unique block containing `s`.
    pub fn lookup(&self, s: &E) -> Option<(usize, &P)> {
        self.blocks
            .iter()
            .enumerate()
            .find(|(_, (b, _))| b.contains(s))
            .map(|(i, (_, p))| (i, p))
    }

    pub fn map<Q: Clone>(&self, mut f: impl FnMut(&P) -> Q) -> SymbolicPartition<E, Q> {
        SymbolicPartition {
            blocks: self.blocks.iter().map(|(b, p)| (b.clone(), f(p))).collect(),
            carrier: self.carrier.clone(),
        }
    }

    /// Check disjointness, cover and non-emptiness.
    pub fn validate(&self) -> Result<()> {
        for (i, (b, _)) in self.blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::BrokenPartition(format!("block {i} is empty")));
            }
            for (j, (c, _)) in self.blocks.iter().enumerate().skip(i + 1) {
                if b.intersects(c) {
                    return Err(Error::BrokenPartition(format!("blocks {i} and {j} overlap")));
                }
            }
        }
        let union = self
            .blocks
            .iter()
            .fold(PseudoAntichain::empty(), |acc, (b, _)| acc.union(b));
        if !union.equals(&self.carrier) {
            return Err(Error::BrokenPartition("blocks do not cover the carrier".into()));
        }
        Ok(())
    }

    /// Restrict every block to `sub`; the carrier becomes `carrier ∩ sub`.
    pub fn restrict(&self, sub: &PseudoAntichain<E>) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(b, p)| (b.intersect(sub), p.clone()))
            .filter(|(b, _)| !b.is_empty())
            .collect();
        SymbolicPartition {
            blocks,
            carrier: self.carrier.intersect(sub),
        }
    }

    /// Replace each block `B` by the non-empty members of `{B∩C, B\C}`, the
    /// payload of `B∩C` being rewritten by `inside`.
    pub fn refine_block(&self, c: &PseudoAntichain<E>, mut inside: impl FnMut(&P) -> P) -> Self {
        let mut blocks = Vec::with_capacity(self.blocks.len() + 1);
        for (b, p) in &self.blocks {
            if !b.intersects(c) {
                blocks.push((b.clone(), p.clone()));
                continue;
            }
            let out = b.difference(c);
            blocks.push((b.intersect(c), inside(p)));
            if !out.is_empty() {
                blocks.push((out, p.clone()));
            }
        }
        SymbolicPartition {
            blocks,
            carrier: self.carrier.clone(),
        }
    }
}

impl<E: Lattice, P: Clone + Ord> SymbolicPartition<E, P> {
    /// Merge blocks carrying equal payloads. Block order follows the first
    /// occurrence of each payload.
    pub fn coarsen(&self) -> Self {
        SymbolicPartition {
            blocks: merge_equal(self.blocks.iter().cloned()),
            carrier: self.carrier.clone(),
        }
    }

    /// All non-empty pairwise intersections, with combined payloads; blocks
    /// with equal combined payloads are merged.
    pub fn product<Q: Clone, R: Clone + Ord>(
        &self,
        other: &SymbolicPartition<E, Q>,
        mut combine: impl FnMut(&P, &Q) -> R,
    ) -> Result<SymbolicPartition<E, R>> {
        if self.carrier != other.carrier && !self.carrier.equals(&other.carrier) {
            return Err(Error::CarrierMismatch);
        }
        Ok(SymbolicPartition {
            blocks: merge_equal(self.raw_product(other, &mut combine)),
            carrier: self.carrier.clone(),
        })
    }

    fn raw_product<Q: Clone, R>(
        &self,
        other: &SymbolicPartition<E, Q>,
        combine: &mut impl FnMut(&P, &Q) -> R,
    ) -> Vec<(PseudoAntichain<E>, R)> {
        let mut out = Vec::new();
        for (b, p) in &self.blocks {
            for (c, q) in &other.blocks {
                if !b.intersects(c) {
                    continue;
                }
                let i = b.intersect(c);
                if !i.is_empty() {
                    out.push((i, combine(p, q)));
                }
            }
        }
        out
    }
}

/// Union blocks with equal payloads, keeping first-occurrence order.
pub(crate) fn merge_equal<E: Lattice, P: Clone + Ord>(
    blocks: impl IntoIterator<Item = (PseudoAntichain<E>, P)>,
) -> Vec<(PseudoAntichain<E>, P)> {
    let mut index: BTreeMap<P, usize> = BTreeMap::new();
    let mut parts: Vec<(Vec<PseudoAntichain<E>>, P)> = Vec::new();
    for (b, p) in blocks {
        match index.get(&p) {
            Some(&i) => parts[i].0.push(b),
            None => {
                index.insert(p.clone(), parts.len());
                parts.push((vec![b], p));
            }
        }
    }
    parts
        .into_iter()
        .map(|(bs, p)| {
            let set = if bs.len() == 1 {
                bs.into_iter().next().unwrap()
            } else {
                PseudoAntichain::simplify(bs.into_iter().flat_map(|b| b.elements().to_vec()).collect())
            };
            (set, p)
        })
        .collect()
}
