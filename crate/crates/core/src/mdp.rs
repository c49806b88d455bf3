//! Monotonic MDPs `(S, Σ, T, E, D)` and the symbolic view used by the solver.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Antichain, Domain, Lattice, PseudoAntichain, PseudoElement};
use crate::partition::SymbolicPartition;
use crate::rational::Rational;

/// Index of a controllable action in `Σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ActionId(pub usize);

/// Index of a stochastic action in `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EffectId(pub usize);

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{}", self.0)
    }
}

/// A probability distribution over `T`, stored sparsely with positive
/// entries only, sorted by effect.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Distribution(Vec<(EffectId, Rational)>);

impl Distribution {
    /// Build a distribution, summing duplicate effects and dropping zeros.
    pub fn new(entries: impl IntoIterator<Item = (EffectId, Rational)>) -> Result<Self> {
        let mut map: std::collections::BTreeMap<EffectId, Rational> = Default::default();
        for (t, p) in entries {
            if p < Rational::zero() {
                return Err(Error::Validation(format!("negative probability {p}")));
            }
            *map.entry(t).or_insert_with(Rational::zero) += p;
        }
        let entries: Vec<_> = map.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total: Rational = entries.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::Validation(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Distribution(entries))
    }

    pub fn dirac(t: EffectId) -> Self {
        Distribution(vec![(t, Rational::one())])
    }

    pub fn prob(&self, t: EffectId) -> Rational {
        self.0
            .iter()
            .find(|(u, _)| *u == t)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> &[(EffectId, Rational)] {
        &self.0
    }

    pub fn support(&self) -> impl Iterator<Item = EffectId> + '_ {
        self.0.iter().map(|(t, _)| *t)
    }
}

/// A monotonic MDP over a finite meet-semilattice.
///
/// Implementations provide the successor function `E` and the predecessor
/// primitive `⌈Pre_{σ,τ}(↓{x})⌉`; `D` and `C` are exposed as symbolic
/// partitions of the states enabling each action. Implementations must be
/// read-only after construction.
pub trait MonotonicMdp {
    type Elem: Lattice;
    type Dom: Domain<Elem = Self::Elem>;

    fn domain(&self) -> &Self::Dom;

    fn num_actions(&self) -> usize;

    fn action_name(&self, a: ActionId) -> String;

    /// `|T|`.
    fn num_effects(&self) -> usize;

    fn effect_name(&self, t: EffectId) -> String;

    /// `⌈S⌉`.
    fn top(&self) -> Antichain<Self::Elem>;

    /// `E(s, σ)(τ)`, for `σ` enabled in `s`.
    fn succ(&self, s: &Self::Elem, a: ActionId, t: EffectId) -> Self::Elem;

    /// `⌈Pre_{σ,τ}(↓{x})⌉`: the maximal states enabling `σ` whose `τ`
    /// successor lies below `x`.
    fn pre_max(&self, x: &Self::Elem, a: ActionId, t: EffectId) -> Antichain<Self::Elem>;

    /// `∼_{D,σ}`: a partition of `S_σ` with one distribution per block.
    fn dist_partition(&self, a: ActionId) -> SymbolicPartition<Self::Elem, Distribution>;

    /// `∼_{C,σ}`: a partition of `S_σ` with one cost per block.
    fn cost_partition(&self, a: ActionId) -> SymbolicPartition<Self::Elem, Rational>;

    /// `S_σ = Pre_{σ,τ}(S)` for an arbitrary `τ`.
    fn states_enabling(&self, a: ActionId) -> PseudoAntichain<Self::Elem> {
        let t = EffectId(0);
        let maxes = self
            .top()
            .iter()
            .flat_map(|x| self.pre_max(x, a, t).iter().cloned().collect::<Vec<_>>())
            .collect::<Vec<_>>();
        PseudoAntichain::from_antichain(&Antichain::maximal(maxes))
    }
}

type PreKey<E> = (E, usize, usize);

/// The symbolic view of a monotonic MDP that the solver works on: the
/// carrier `S`, the per-action enabled sets and the `D`/`C` partitions
/// restricted to them.
///
/// A view may restrict the model to a subset of states and shrink the
/// enabled sets (the SSP solver restricts to proper states and safe
/// actions). The `pre_max` cache lives in a `RefCell`, so a view is meant to
/// be owned by a single solver run and is not `Sync`.
pub struct SymbolicMdp<'m, M: MonotonicMdp> {
    mdp: &'m M,
    carrier: PseudoAntichain<M::Elem>,
    enabled: Vec<PseudoAntichain<M::Elem>>,
    dist: Vec<Vec<(PseudoAntichain<M::Elem>, Distribution)>>,
    cost: Vec<Vec<(PseudoAntichain<M::Elem>, Rational)>>,
    restricted: bool,
    cache: RefCell<HashMap<PreKey<M::Elem>, Antichain<M::Elem>>>,
}

impl<'m, M: MonotonicMdp> SymbolicMdp<'m, M> {
    pub fn new(mdp: &'m M) -> Self {
        let carrier = PseudoAntichain::from_antichain(&mdp.top());
        let enabled: Vec<_> = (0..mdp.num_actions())
            .map(|a| mdp.states_enabling(ActionId(a)))
            .collect();
        let dist = (0..mdp.num_actions())
            .map(|a| restrict_blocks(mdp.dist_partition(ActionId(a)).into_blocks(), &enabled[a], false))
            .collect();
        let cost = (0..mdp.num_actions())
            .map(|a| restrict_blocks(mdp.cost_partition(ActionId(a)).into_blocks(), &enabled[a], false))
            .collect();
        SymbolicMdp {
            mdp,
            carrier,
            enabled,
            dist,
            cost,
            restricted: false,
            cache: RefCell::new(HashMap::new()),
        }
    }

    /// A view on `carrier` where action `a` is enabled exactly on `enabled[a]`.
    /// Each `enabled[a]` must be a subset of the current enabled set.
    pub fn restrict(
        &self,
        carrier: PseudoAntichain<M::Elem>,
        enabled: Vec<PseudoAntichain<M::Elem>>,
    ) -> SymbolicMdp<'m, M> {
        let dist = self
            .dist
            .iter()
            .zip(&enabled)
            .map(|(blocks, en)| restrict_blocks(blocks.clone(), en, true))
            .collect();
        let cost = self
            .cost
            .iter()
            .zip(&enabled)
            .map(|(blocks, en)| restrict_blocks(blocks.clone(), en, true))
            .collect();
        SymbolicMdp {
            mdp: self.mdp,
            carrier,
            enabled,
            dist,
            cost,
            restricted: true,
            cache: RefCell::new(self.cache.borrow().clone()),
        }
    }

    pub fn model(&self) -> &'m M {
        self.mdp
    }

    pub fn domain(&self) -> &M::Dom {
        self.mdp.domain()
    }

    pub fn num_actions(&self) -> usize {
        self.mdp.num_actions()
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> {
        (0..self.mdp.num_actions()).map(ActionId)
    }

    pub fn carrier(&self) -> &PseudoAntichain<M::Elem> {
        &self.carrier
    }

    /// `S_σ` in this view (memoized at construction).
    pub fn enabled(&self, a: ActionId) -> &PseudoAntichain<M::Elem> {
        &self.enabled[a.0]
    }

    pub fn dist_blocks(&self, a: ActionId) -> &[(PseudoAntichain<M::Elem>, Distribution)] {
        &self.dist[a.0]
    }

    pub fn cost_blocks(&self, a: ActionId) -> &[(PseudoAntichain<M::Elem>, Rational)] {
        &self.cost[a.0]
    }

    pub fn cost_partition(&self, a: ActionId) -> SymbolicPartition<M::Elem, Rational> {
        SymbolicPartition::from_blocks(self.enabled[a.0].clone(), self.cost[a.0].clone())
    }

    /// Effects with positive probability somewhere in `S_σ`.
    pub fn support(&self, a: ActionId) -> Vec<EffectId> {
        let mut ts: Vec<EffectId> = self.dist[a.0].iter().flat_map(|(_, d)| d.support()).collect();
        ts.sort();
        ts.dedup();
        ts
    }

    /// `⌈Pre_{σ,τ}(↓{x})⌉`, memoized.
    pub fn pre_max(&self, x: &M::Elem, a: ActionId, t: EffectId) -> Antichain<M::Elem> {
        let key = (x.clone(), a.0, t.0);
        if let Some(hit) = self.cache.borrow().get(&key) {
            return hit.clone();
        }
        let res = self.mdp.pre_max(x, a, t);
        self.cache.borrow_mut().insert(key, res.clone());
        res
    }

    /// `⌈Pre_{σ,τ}(↓α)⌉`.
    pub fn pre_antichain(&self, alpha: &Antichain<M::Elem>, a: ActionId, t: EffectId) -> Antichain<M::Elem> {
        let mut items = Vec::new();
        for x in alpha {
            items.extend(self.pre_max(x, a, t).iter().cloned());
        }
        Antichain::maximal(items)
    }

    /// `Pre_{σ,τ}(↕A)`: states of this view enabling `σ` whose `τ` successor
    /// lies in `↕A`.
    pub fn pre_star(&self, set: &PseudoAntichain<M::Elem>, a: ActionId, t: EffectId) -> PseudoAntichain<M::Elem> {
        let mut out = Vec::new();
        for p in set {
            let tops = self.pre_max(p.x(), a, t);
            if tops.is_empty() {
                continue;
            }
            let excl = self.pre_antichain(p.alpha(), a, t);
            for x in &tops {
                if let Some(q) = PseudoElement::make(x.clone(), excl.clone()) {
                    out.push(q);
                }
            }
        }
        let pre = PseudoAntichain::from_elements(out);
        if self.restricted {
            pre.intersect(&self.enabled[a.0])
        } else {
            pre
        }
    }

    pub fn is_enabled(&self, s: &M::Elem, a: ActionId) -> bool {
        self.enabled[a.0].contains(s)
    }

    fn check_enabled(&self, s: &M::Elem, a: ActionId) -> Result<()> {
        if self.is_enabled(s, a) {
            Ok(())
        } else {
            Err(Error::ActionDisabled {
                action: self.mdp.action_name(a),
                state: self.mdp.domain().render(s),
            })
        }
    }

    pub fn succ_value(&self, s: &M::Elem, a: ActionId, t: EffectId) -> Result<M::Elem> {
        self.check_enabled(s, a)?;
        Ok(self.mdp.succ(s, a, t))
    }

    pub fn distribution(&self, s: &M::Elem, a: ActionId) -> Result<&Distribution> {
        self.check_enabled(s, a)?;
        self.dist[a.0]
            .iter()
            .find(|(b, _)| b.contains(s))
            .map(|(_, d)| d)
            .ok_or_else(|| Error::BrokenPartition("state outside every distribution block".into()))
    }

    pub fn prob_of(&self, s: &M::Elem, a: ActionId, t: EffectId) -> Result<Rational> {
        Ok(self.distribution(s, a)?.prob(t))
    }

    pub fn cost_of(&self, s: &M::Elem, a: ActionId) -> Result<Rational> {
        self.check_enabled(s, a)?;
        self.cost[a.0]
            .iter()
            .find(|(b, _)| b.contains(s))
            .map(|(_, c)| c.clone())
            .ok_or_else(|| Error::BrokenPartition("state outside every cost block".into()))
    }

    /// Check compatibility of the order on the given comparable pairs
    /// `s ⪯ s'`: every action enabled in `s'` is enabled in `s`, and
    /// successors stay ordered.
    pub fn audit_monotonicity<I>(&self, pairs: I) -> Result<()>
    where
        I: IntoIterator<Item = (M::Elem, M::Elem)>,
    {
        let dom = self.mdp.domain();
        for (s, s2) in pairs {
            if !s.leq(&s2) || !self.carrier.contains(&s2) {
                continue;
            }
            for a in self.actions() {
                if !self.is_enabled(&s2, a) {
                    continue;
                }
                if !self.is_enabled(&s, a) {
                    return Err(Error::Monotonicity(format!(
                        "{} enabled in {} but not in the smaller state {}",
                        self.mdp.action_name(a),
                        dom.render(&s2),
                        dom.render(&s)
                    )));
                }
                for t in self.support(a) {
                    let (u, u2) = (self.mdp.succ(&s, a, t), self.mdp.succ(&s2, a, t));
                    if !u.leq(&u2) {
                        return Err(Error::Monotonicity(format!(
                            "{} / {}: successor of {} is not below successor of {}",
                            self.mdp.action_name(a),
                            self.mdp.effect_name(t),
                            dom.render(&s),
                            dom.render(&s2)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn restrict_blocks<E: Lattice, P>(
    blocks: Vec<(PseudoAntichain<E>, P)>,
    to: &PseudoAntichain<E>,
    always: bool,
) -> Vec<(PseudoAntichain<E>, P)> {
    blocks
        .into_iter()
        .filter_map(|(b, p)| {
            let b = if always || b != *to { b.intersect(to) } else { b };
            (!b.is_empty()).then_some((b, p))
        })
        .collect()
}
