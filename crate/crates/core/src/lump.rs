//! Symbolic bisimulation lumping of the Markov chain induced by a strategy.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::Instant;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::PseudoAntichain;
use crate::mdp::{ActionId, EffectId, MonotonicMdp, SymbolicMdp};
use crate::numeric::QuotientMc;
use crate::partition::{merge_equal, Strategy, SymbolicPartition};
use crate::rational::Rational;

/// Payload of a quotient block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockLabel {
    /// The goal flag sorts first so goal blocks never merge with others.
    pub goal: bool,
    pub cost: Rational,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LumpStats {
    /// Splitters taken from the queue.
    pub splitters: usize,
    /// Blocks replaced by two or more sub-blocks.
    pub splits: usize,
}

#[derive(Clone, Debug)]
pub struct LumpResult<E> {
    pub quotient: SymbolicPartition<E, BlockLabel>,
    pub stats: LumpStats,
}

/// `∼_{C,λ}`: the strategy carrier partitioned by `C(s, λ(s))`.
pub fn cost_partition<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    strategy: &Strategy<M::Elem>,
) -> SymbolicPartition<M::Elem, Rational> {
    let mut blocks = Vec::new();
    for (b, a) in strategy.coarsen().blocks() {
        for (c, cost) in view.cost_blocks(*a) {
            if b.intersects(c) {
                blocks.push((b.intersect(c), cost.clone()));
            }
        }
    }
    SymbolicPartition::from_blocks(strategy.carrier().clone(), merge_equal(blocks))
}

/// `Pre_λ(C, τ)`: states whose `τ`-successor under `λ` lies in `C`.
pub fn pre_lambda<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    c: &PseudoAntichain<M::Elem>,
    t: EffectId,
    strategy: &Strategy<M::Elem>,
) -> PseudoAntichain<M::Elem> {
    strategy
        .coarsen()
        .blocks()
        .iter()
        .fold(PseudoAntichain::empty(), |acc, (b, a)| {
            acc.union(&view.pre_star(c, *a, t).intersect(b))
        })
}

/// Partition `B` by the probability of stepping into `C` under `λ`. Parts
/// are returned in increasing order of probability.
pub fn split<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    b: &PseudoAntichain<M::Elem>,
    c: &PseudoAntichain<M::Elem>,
    strategy: &Strategy<M::Elem>,
) -> Vec<(Rational, PseudoAntichain<M::Elem>)> {
    let coarse = strategy.coarsen();
    let mut ctx = Splitter::new(view, c);
    ctx.split(coarse.blocks(), b)
}

/// Per-splitter memo of `Pre_{σ,τ}(C)`.
struct Splitter<'a, 'm, M: MonotonicMdp> {
    view: &'a SymbolicMdp<'m, M>,
    c: &'a PseudoAntichain<M::Elem>,
    pre: HashMap<(ActionId, EffectId), PseudoAntichain<M::Elem>>,
}

impl<'a, 'm, M: MonotonicMdp> Splitter<'a, 'm, M> {
    fn new(view: &'a SymbolicMdp<'m, M>, c: &'a PseudoAntichain<M::Elem>) -> Self {
        Splitter {
            view,
            c,
            pre: HashMap::new(),
        }
    }

    fn pre(&mut self, a: ActionId, t: EffectId) -> &PseudoAntichain<M::Elem> {
        let (view, c) = (self.view, self.c);
        self.pre.entry((a, t)).or_insert_with(|| view.pre_star(c, a, t))
    }

    /// Split `b` against the splitter. `by_action` holds one block per
    /// action of the (coarsened) strategy.
    fn split(
        &mut self,
        by_action: &[(PseudoAntichain<M::Elem>, ActionId)],
        b: &PseudoAntichain<M::Elem>,
    ) -> Vec<(Rational, PseudoAntichain<M::Elem>)> {
        let mut acc: BTreeMap<Rational, Vec<PseudoAntichain<M::Elem>>> = BTreeMap::new();
        let view = self.view;
        for (lb, a) in by_action {
            if !lb.intersects(b) {
                continue;
            }
            let region = lb.intersect(b);
            for (d, dist) in view.dist_blocks(*a) {
                if !d.intersects(&region) {
                    continue;
                }
                let mut parts = vec![(Rational::zero(), region.intersect(d))];
                for (t, p) in dist.entries() {
                    let pre = self.pre(*a, *t);
                    parts = refine(parts, pre, p);
                }
                for (p, x) in parts {
                    acc.entry(p).or_default().push(x);
                }
            }
        }
        acc.into_iter()
            .map(|(p, xs)| (p, union_all(xs)))
            .filter(|(_, x)| !x.is_empty())
            .collect()
    }
}

/// One step of the probability table: every part meeting `pre` moves its
/// intersection to key `p + add`; equal keys are merged.
fn refine<E: crate::lattice::Lattice>(
    parts: Vec<(Rational, PseudoAntichain<E>)>,
    pre: &PseudoAntichain<E>,
    add: &Rational,
) -> Vec<(Rational, PseudoAntichain<E>)> {
    if pre.is_empty() {
        return parts;
    }
    let mut table: BTreeMap<Rational, Vec<PseudoAntichain<E>>> = BTreeMap::new();
    for (p, x) in parts {
        if !x.intersects(pre) {
            table.entry(p).or_default().push(x);
            continue;
        }
        let inside = x.intersect(pre);
        let outside = x.difference(pre);
        if !outside.is_empty() {
            table.entry(p.clone()).or_default().push(outside);
        }
        table.entry(p + add).or_default().push(inside);
    }
    table.into_iter().map(|(p, xs)| (p, union_all(xs))).collect()
}

pub(crate) fn union_all<E: crate::lattice::Lattice>(xs: Vec<PseudoAntichain<E>>) -> PseudoAntichain<E> {
    let mut it = xs.into_iter();
    let first = it.next().unwrap_or_default();
    it.fold(first, |acc, x| acc.union(&x))
}

/// Coarsest refinement of `∼_{C,λ}` that is stable under splitting. With a
/// goal set, `G` is one extra absorbing block of cost 0 that is never split;
/// the strategy must then cover exactly `carrier \ G`.
pub fn lump<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    strategy: &Strategy<M::Elem>,
    goal: Option<&PseudoAntichain<M::Elem>>,
) -> Result<LumpResult<M::Elem>> {
    lump_until(view, strategy, goal, None)
}

/// [`lump`] with a wall-clock deadline checked between splitters.
pub fn lump_until<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    strategy: &Strategy<M::Elem>,
    goal: Option<&PseudoAntichain<M::Elem>>,
    deadline: Option<Instant>,
) -> Result<LumpResult<M::Elem>> {
    let coarse = strategy.coarsen();
    let mut blocks: Vec<(PseudoAntichain<M::Elem>, BlockLabel)> = cost_partition(view, strategy)
        .into_blocks()
        .into_iter()
        .map(|(b, cost)| (b, BlockLabel { goal: false, cost }))
        .collect();
    if let Some(g) = goal.filter(|g| !g.is_empty()) {
        blocks.push((
            g.clone(),
            BlockLabel {
                goal: true,
                cost: Rational::zero(),
            },
        ));
    }
    let mut queue: VecDeque<PseudoAntichain<M::Elem>> = blocks.iter().map(|(b, _)| b.clone()).collect();
    let mut stats = LumpStats::default();
    while let Some(c) = queue.pop_front() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::Timeout);
        }
        stats.splitters += 1;
        let mut ctx = Splitter::new(view, &c);
        let mut next = Vec::with_capacity(blocks.len());
        for (b, label) in blocks {
            if label.goal {
                next.push((b, label));
                continue;
            }
            let parts = ctx.split(coarse.blocks(), &b);
            if parts.len() <= 1 {
                next.push((b, label));
                continue;
            }
            stats.splits += 1;
            let largest = parts.iter().enumerate().fold(
                0,
                |best, (i, (_, x))| if x.len() > parts[best].1.len() { i } else { best },
            );
            for (i, (_, x)) in parts.into_iter().enumerate() {
                if i != largest {
                    queue.push_back(x.clone());
                }
                next.push((x, label.clone()));
            }
        }
        blocks = next;
    }
    Ok(LumpResult {
        quotient: SymbolicPartition::from_blocks(view.carrier().clone(), blocks),
        stats,
    })
}

/// The explicit quotient chain, using the top of each block's first
/// pseudo-element as witness. Goal blocks get a self-loop.
pub fn explicitize<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    quotient: &SymbolicPartition<M::Elem, BlockLabel>,
    strategy: &Strategy<M::Elem>,
) -> Result<QuotientMc<M::Elem>> {
    let blocks = quotient.blocks();
    let mut rows = Vec::with_capacity(blocks.len());
    let mut cost = Vec::with_capacity(blocks.len());
    let mut goal = Vec::with_capacity(blocks.len());
    let mut witness = Vec::with_capacity(blocks.len());
    for (i, (b, label)) in blocks.iter().enumerate() {
        let w = b.elements()[0].x().clone();
        if label.goal {
            rows.push(vec![(i, Rational::from_integer(1.into()))]);
        } else {
            let a = *strategy
                .lookup(&w)
                .ok_or_else(|| Error::BrokenPartition("witness outside the strategy".into()))?
                .1;
            let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
            for (t, p) in view.distribution(&w, a)?.entries() {
                let s2 = view.succ_value(&w, a, *t)?;
                let j = blocks
                    .iter()
                    .position(|(c, _)| c.contains(&s2))
                    .ok_or_else(|| Error::BrokenPartition("successor outside every block".into()))?;
                *row.entry(j).or_insert_with(Rational::zero) += p;
            }
            rows.push(row.into_iter().collect());
        }
        cost.push(label.cost.clone());
        goal.push(label.goal);
        witness.push(w);
    }
    Ok(QuotientMc {
        rows,
        cost,
        goal,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CondSet, Domain};
    use crate::rational::{int, rat};
    use crate::strips::{generate, StripsMdp};

    fn action(m: &StripsMdp, name: &str) -> ActionId {
        (0..m.num_actions())
            .map(ActionId)
            .find(|a| m.action_name(*a) == name)
            .unwrap()
    }

    /// The monkey model restricted to `takebananaswithstick` on its enabled set.
    fn stick_view(m: &StripsMdp) -> (SymbolicMdp<'_, StripsMdp>, ActionId) {
        let full = SymbolicMdp::new(m);
        let a = action(m, "takebananaswithstick");
        let enabled = full
            .actions()
            .map(|b| {
                if b == a {
                    full.enabled(a).clone()
                } else {
                    PseudoAntichain::empty()
                }
            })
            .collect();
        (full.restrict(full.enabled(a).clone(), enabled), a)
    }

    #[test]
    fn split_against_goal() {
        let m = StripsMdp::new(generate("monkey:1,2").unwrap()).unwrap();
        let (view, a) = stick_view(&m);
        let s_a = view.carrier().clone();
        let goal = m.goal().unwrap();
        let strategy = SymbolicPartition::single(s_a.clone(), a);
        let parts = split(&view, &s_a, &goal, &strategy);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, rat(1, 5));
        assert!(parts[0].1.equals(&s_a.difference(&goal)));
        assert_eq!(parts[1].0, int(1));
        assert!(parts[1].1.equals(&s_a.intersect(&goal)));

        let got = (0..m.num_effects())
            .map(EffectId)
            .find(|t| m.effect(*t).add == m.domain().set_of(["bananas"]).unwrap() && m.effect(*t).del.is_empty())
            .unwrap();
        assert!(pre_lambda(&view, &goal, got, &strategy).equals(&s_a));
        assert!(pre_lambda(&view, &s_a, got, &strategy).equals(&s_a));

        // A splitter outside the reach of the strategy.
        let unreachable =
            PseudoAntichain::from_antichain(&crate::lattice::Antichain::singleton(CondSet::EMPTY)).difference(&s_a);
        let parts = split(&view, &s_a, &unreachable, &strategy);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, int(0));
    }

    #[test]
    fn lump_and_explicitize_stick_chain() {
        let m = StripsMdp::new(generate("monkey:1,2").unwrap()).unwrap();
        let (view, a) = stick_view(&m);
        let whole = lump(&view, &SymbolicPartition::single(view.carrier().clone(), a), None).unwrap();
        assert_eq!(whole.quotient.len(), 1);
        let goal = m.goal().unwrap().intersect(view.carrier());
        let strategy = SymbolicPartition::single(view.carrier().difference(&goal), a);
        let lumped = lump(&view, &strategy, Some(&goal)).unwrap();
        lumped.quotient.validate().unwrap();
        assert_eq!(lumped.quotient.len(), 2);
        let q = explicitize(&view, &lumped.quotient, &strategy).unwrap();
        q.check_stochastic().unwrap();
        let g = (0..2).find(|&i| goal.contains(&q.witness[i])).unwrap();
        let r = 1 - g;
        assert_eq!(q.rows[g], vec![(g, int(1))]);
        let mut row = q.rows[r].clone();
        row.sort();
        let mut want = vec![(g, rat(1, 5)), (r, rat(4, 5))];
        want.sort();
        assert_eq!(row, want);
    }

    #[test]
    fn uniform_chain_is_one_block() {
        let m = StripsMdp::new(generate("monkey:1,1").unwrap()).unwrap();
        let full = SymbolicMdp::new(&m);
        let a = action(&m, "takestone");
        let enabled = full
            .actions()
            .map(|b| {
                if b == a {
                    full.enabled(a).clone()
                } else {
                    PseudoAntichain::empty()
                }
            })
            .collect();
        let view = full.restrict(full.carrier().clone(), enabled);
        let strategy = SymbolicPartition::single(view.carrier().clone(), a);
        let lumped = lump(&view, &strategy, None).unwrap();
        assert_eq!(lumped.quotient.len(), 1);
        assert_eq!(lumped.quotient.blocks()[0].1.cost, int(1));
        assert_eq!(view.carrier().enumerate(m.domain()).len(), m.domain().enumerate().len());
    }
}
