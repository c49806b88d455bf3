//! Symblicit strategy iteration: lump the induced chain, solve the quotient
//! explicitly, improve the strategy symbolically, until a fixpoint.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Antichain, Domain, PseudoAntichain, PseudoElement};
use crate::lump::{explicitize, lump_until, union_all, BlockLabel};
use crate::mdp::{ActionId, EffectId, MonotonicMdp, SymbolicMdp};
use crate::numeric::{gain_bias_exact, solve_gain_bias, solve_ssp, ssp_residual, Arith, QuotientMc};
use crate::partition::{merge_equal, Strategy, SymbolicPartition};
use crate::rational::Rational;

/// Default safety net on the number of evaluations.
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

impl Direction {
    /// `a` is strictly better than `b`.
    pub fn better(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        }
    }

    /// `a` is better than `b` by more than the noise of `arith`.
    pub fn improves(self, arith: Arith, a: &Rational, b: &Rational) -> bool {
        self.better(a, b) && !arith.same(a, b)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub arith: Arith,
    pub direction: Direction,
    pub max_iter: usize,
    pub deadline: Option<Instant>,
    /// Keep every iteration's strategy, quotient and values.
    pub keep_history: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            arith: Arith::Exact,
            direction: Direction::Minimize,
            max_iter: DEFAULT_MAX_ITER,
            deadline: None,
            keep_history: false,
        }
    }
}

impl SolveOptions {
    fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IterationStats {
    pub quotient_blocks: usize,
    pub strategy_blocks: usize,
    pub splitters: usize,
    pub lump: Duration,
    pub solve: Duration,
    pub improve: Duration,
}

/// One evaluated strategy.
#[derive(Clone, Debug)]
pub struct Iteration<E> {
    pub strategy: Strategy<E>,
    pub quotient: SymbolicPartition<E, BlockLabel>,
    /// SSP values or EMP gains, per quotient block.
    pub values: Vec<Rational>,
    pub bias: Option<Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub struct SolveReport<E> {
    pub strategy: Strategy<E>,
    pub quotient: SymbolicPartition<E, BlockLabel>,
    pub chain: QuotientMc<E>,
    /// SSP values or EMP gains, per quotient block.
    pub values: Vec<Rational>,
    pub bias: Option<Vec<Rational>>,
    /// Number of strategy evaluations.
    pub iterations: usize,
    pub stats: Vec<IterationStats>,
    pub history: Vec<Iteration<E>>,
    /// Proper states (SSP only).
    pub proper: Option<PseudoAntichain<E>>,
    pub setup: Duration,
    pub total: Duration,
}

impl<E: crate::lattice::Lattice> SolveReport<E> {
    /// Value (SSP) or gain (EMP) of a state; `None` outside the carrier.
    pub fn value_of(&self, s: &E) -> Option<&Rational> {
        self.quotient.lookup(s).map(|(i, _)| &self.values[i])
    }

    pub fn bias_of(&self, s: &E) -> Option<&Rational> {
        let (i, _) = self.quotient.lookup(s)?;
        self.bias.as_ref().map(|b| &b[i])
    }

    pub fn max_quotient(&self) -> usize {
        self.stats.iter().map(|s| s.quotient_blocks).max().unwrap_or(0)
    }

    pub fn lump_time(&self) -> Duration {
        self.stats.iter().map(|s| s.lump).sum()
    }

    pub fn solve_time(&self) -> Duration {
        self.stats.iter().map(|s| s.solve).sum()
    }

    pub fn improve_time(&self) -> Duration {
        self.stats.iter().map(|s| s.improve).sum()
    }
}

/// `R(Y, X)`: states with an action whose successors all lie in `Y` and
/// one of them in `X`.
fn apre<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    y: &PseudoAntichain<M::Elem>,
    x: &PseudoAntichain<M::Elem>,
) -> PseudoAntichain<M::Elem> {
    let mut parts = Vec::new();
    for a in view.actions() {
        for (d, dist) in view.dist_blocks(a) {
            let mut all = d.clone();
            let mut some = PseudoAntichain::empty();
            for (t, _) in dist.entries() {
                if all.is_empty() {
                    break;
                }
                all = all.intersect(&view.pre_star(y, a, *t));
                some = some.union(&view.pre_star(x, a, *t));
            }
            let r = all.intersect(&some);
            if !r.is_empty() {
                parts.push(r);
            }
        }
    }
    union_all(parts)
}

/// States having a strategy that reaches `goal` with probability 1:
/// `νY. μX. (R(Y,X) ∪ G)`.
pub fn proper_states<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    goal: &PseudoAntichain<M::Elem>,
) -> PseudoAntichain<M::Elem> {
    let goal = goal.intersect(view.carrier());
    let mut y = view.carrier().clone();
    loop {
        let mut x = goal.clone();
        loop {
            let next = apre(view, &y, &x).union(&goal);
            if next.equals(&x) {
                break;
            }
            x = next;
        }
        if x.equals(&y) {
            return y;
        }
        y = x;
    }
}

/// `S_σ ∩ ⋂_{τ ∈ supp} Pre_{σ,τ}(target)`: states where `σ` surely stays in
/// `target`.
pub fn safe_set<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    a: ActionId,
    target: &PseudoAntichain<M::Elem>,
) -> PseudoAntichain<M::Elem> {
    let mut parts = Vec::new();
    for (d, dist) in view.dist_blocks(a) {
        let mut all = d.intersect(target);
        for (t, _) in dist.entries() {
            if all.is_empty() {
                break;
            }
            all = all.intersect(&view.pre_star(target, a, *t));
        }
        parts.push(all);
    }
    union_all(parts)
}

/// The view the SSP solver works on: carrier `S^P`, with `σ` enabled on
/// its safe states outside `G`.
pub fn ssp_view<'m, M: MonotonicMdp>(
    view: &SymbolicMdp<'m, M>,
    proper: &PseudoAntichain<M::Elem>,
    goal: &PseudoAntichain<M::Elem>,
) -> SymbolicMdp<'m, M> {
    let enabled = view
        .actions()
        .map(|a| safe_set(view, a, proper).difference(goal))
        .collect();
    view.restrict(proper.clone(), enabled)
}

/// Layered proper strategy on `carrier \ G`: states first reaching layer
/// `X_{i-1}` pick the first action that may step into it.
pub fn initial_strategy_ssp<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    goal: &PseudoAntichain<M::Elem>,
) -> Result<Strategy<M::Elem>> {
    let carrier = view.carrier().difference(goal);
    let mut reached = goal.clone();
    let mut blocks: Vec<(PseudoAntichain<M::Elem>, ActionId)> = Vec::new();
    loop {
        let mut layer = PseudoAntichain::empty();
        for a in view.actions() {
            let mut hit = Vec::new();
            for (d, dist) in view.dist_blocks(a) {
                for (t, _) in dist.entries() {
                    hit.push(view.pre_star(&reached, a, *t).intersect(d));
                }
            }
            let fresh = union_all(hit).difference(&reached).difference(&layer);
            if !fresh.is_empty() {
                layer = layer.union(&fresh);
                blocks.push((fresh, a));
            }
        }
        if layer.is_empty() {
            break;
        }
        reached = reached.union(&layer);
    }
    if !carrier.difference(&reached).is_empty() {
        return Err(Error::Internal("proper state without a proper action".into()));
    }
    Ok(SymbolicPartition::from_blocks(carrier, merge_equal(blocks)))
}

/// `⌈S⌉` in its serialization order; block `i` is `↓x_i \ ↓{x_1..x_{i-1}}`
/// with the first action enabled at `x_i`.
pub fn initial_strategy_emp<M: MonotonicMdp>(view: &SymbolicMdp<'_, M>) -> Result<Strategy<M::Elem>> {
    let tops: Vec<M::Elem> = view.carrier().iter().map(|p| p.x().clone()).collect();
    let tops = Antichain::maximal(tops);
    let mut blocks = Vec::new();
    let mut seen: Vec<M::Elem> = Vec::new();
    for x in tops.iter() {
        let a = view
            .actions()
            .find(|a| view.is_enabled(x, *a))
            .ok_or_else(|| Error::Validation(format!("no action enabled in {}", view.domain().render(x))))?;
        if let Some(p) = PseudoElement::make(x.clone(), Antichain::maximal(seen.clone())) {
            blocks.push((PseudoAntichain::from_element(p).intersect(view.carrier()), a));
        }
        seen.push(x.clone());
    }
    Ok(SymbolicPartition::from_blocks(
        view.carrier().clone(),
        merge_equal(blocks),
    ))
}

/// Group quotient blocks by a per-block value.
fn value_groups<E: crate::lattice::Lattice>(
    quotient: &SymbolicPartition<E, BlockLabel>,
    values: &[Rational],
) -> Vec<(Rational, PseudoAntichain<E>)> {
    let mut by: BTreeMap<Rational, Vec<PseudoAntichain<E>>> = BTreeMap::new();
    for ((b, _), v) in quotient.blocks().iter().zip(values) {
        by.entry(v.clone()).or_default().push(b.clone());
    }
    by.into_iter().map(|(v, bs)| (v, union_all(bs))).collect()
}

/// The partition of `S_σ` by `l_σ(s) = [C(s,σ)] + Σ_τ D(s,σ)(τ)·v(E(s,σ)(τ))`
/// where `v` is given on the groups of a partition of the carrier. Groups of
/// value 0 may be omitted.
pub fn l_partition<M: MonotonicMdp>(
    view: &SymbolicMdp<'_, M>,
    a: ActionId,
    groups: &[(Rational, PseudoAntichain<M::Elem>)],
    with_cost: bool,
) -> Vec<(Rational, PseudoAntichain<M::Elem>)> {
    let groups: Vec<&(Rational, PseudoAntichain<M::Elem>)> = groups.iter().filter(|(v, _)| !v.is_zero()).collect();
    let mut pres: BTreeMap<EffectId, Vec<(Rational, PseudoAntichain<M::Elem>)>> = BTreeMap::new();
    let mut out: BTreeMap<Rational, Vec<PseudoAntichain<M::Elem>>> = BTreeMap::new();
    let regions: Vec<(Rational, PseudoAntichain<M::Elem>)> = if with_cost {
        view.cost_blocks(a).to_vec().into_iter().map(|(b, c)| (c, b)).collect()
    } else {
        vec![(Rational::zero(), view.enabled(a).clone())]
    };
    for (d, dist) in view.dist_blocks(a) {
        for (c, r) in &regions {
            if !r.intersects(d) {
                continue;
            }
            let mut entries = vec![(c.clone(), r.intersect(d))];
            for (t, p) in dist.entries() {
                let pre = pres.entry(*t).or_insert_with(|| {
                    groups
                        .iter()
                        .map(|(v, g)| (v.clone(), view.pre_star(g, a, *t)))
                        .filter(|(_, g)| !g.is_empty())
                        .collect()
                });
                entries = refine_by_groups(entries, pre, p);
            }
            for (v, x) in entries {
                out.entry(v).or_default().push(x);
            }
        }
    }
    out.into_iter().map(|(v, xs)| (v, union_all(xs))).collect()
}

fn refine_by_groups<E: crate::lattice::Lattice>(
    entries: Vec<(Rational, PseudoAntichain<E>)>,
    pres: &[(Rational, PseudoAntichain<E>)],
    p: &Rational,
) -> Vec<(Rational, PseudoAntichain<E>)> {
    let mut table: BTreeMap<Rational, Vec<PseudoAntichain<E>>> = BTreeMap::new();
    for (acc, x) in entries {
        let mut rest = x;
        for (v, pre) in pres {
            if rest.is_empty() {
                break;
            }
            if !rest.intersects(pre) {
                continue;
            }
            let inside = rest.intersect(pre);
            rest = rest.difference(pre);
            table.entry(&acc + p * v).or_default().push(inside);
        }
        if !rest.is_empty() {
            table.entry(acc).or_default().push(rest);
        }
    }
    table.into_iter().map(|(v, xs)| (v, union_all(xs))).collect()
}

/// One entry of the improvement list: `σ` gives value `l` on `set`.
#[derive(Clone, Debug)]
pub struct Improvement<E> {
    pub value: Rational,
    pub action: ActionId,
    pub set: PseudoAntichain<E>,
}

/// Apply an improvement list: entries are sorted so that better values come
/// last and, among equal values, the first declared action comes last; each
/// entry then overwrites the strategy on its set.
pub fn improve_strategy<E: crate::lattice::Lattice>(
    mut list: Vec<Improvement<E>>,
    strategy: &Strategy<E>,
    direction: Direction,
) -> Strategy<E> {
    list.sort_by(|a, b| {
        let by_value = match direction {
            Direction::Minimize => b.value.cmp(&a.value),
            Direction::Maximize => a.value.cmp(&b.value),
        };
        by_value.then(b.action.cmp(&a.action))
    });
    let mut out = strategy.coarsen();
    for imp in list {
        let a = imp.action;
        out = out.refine_block(&imp.set, |_| a).coarsen();
    }
    out
}

/// Improvement list comparing `l_σ` on each `(l, X)` against the current
/// value groups `(v, U)`; only strictly better intersections are kept.
fn compare<E: crate::lattice::Lattice>(
    a: ActionId,
    lparts: &[(Rational, PseudoAntichain<E>)],
    current: &[(Rational, PseudoAntichain<E>)],
    direction: Direction,
    arith: Arith,
    list: &mut Vec<Improvement<E>>,
) {
    for (l, x) in lparts {
        let mut hits = Vec::new();
        for (v, u) in current {
            if direction.improves(arith, l, v) && x.intersects(u) {
                hits.push(x.intersect(u));
            }
        }
        let set = union_all(hits);
        if !set.is_empty() {
            list.push(Improvement {
                value: l.clone(),
                action: a,
                set,
            });
        }
    }
}

fn check_positive_costs<M: MonotonicMdp>(view: &SymbolicMdp<'_, M>) -> Result<()> {
    for a in view.actions() {
        for (_, c) in view.cost_blocks(a) {
            if !c.is_positive() {
                return Err(Error::Validation(format!(
                    "action {} has non-positive cost {c}",
                    view.model().action_name(a)
                )));
            }
        }
    }
    Ok(())
}

/// Minimal expected truncated sum to `goal`, on the proper states.
pub fn solve_ssp_symblicit<M: MonotonicMdp>(
    model: &M,
    goal: &PseudoAntichain<M::Elem>,
    opts: &SolveOptions,
) -> Result<SolveReport<M::Elem>> {
    let start = Instant::now();
    if opts.direction == Direction::Maximize {
        return Err(Error::Validation("the SSP objective only supports minimization".into()));
    }
    let full = SymbolicMdp::new(model);
    let goal = goal.intersect(full.carrier());
    if goal.is_empty() {
        return Err(Error::Unsolvable("the goal set is empty".into()));
    }
    let proper = proper_states(&full, &goal);
    let view = ssp_view(&full, &proper, &goal);
    check_positive_costs(&view)?;
    let mut strategy = initial_strategy_ssp(&view, &goal)?;
    let setup = start.elapsed();
    let mut stats = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        opts.check_deadline()?;
        if iterations >= opts.max_iter {
            return Err(Error::IterationCap(opts.max_iter));
        }
        iterations += 1;
        let mut st = IterationStats {
            strategy_blocks: strategy.len(),
            ..Default::default()
        };
        let t = Instant::now();
        let lumped = lump_until(&view, &strategy, Some(&goal), opts.deadline)?;
        st.lump = t.elapsed();
        st.splitters = lumped.stats.splitters;
        st.quotient_blocks = lumped.quotient.len();
        let t = Instant::now();
        let chain = explicitize(&view, &lumped.quotient, &strategy)?;
        let values = solve_ssp(&chain, opts.arith)?;
        if opts.arith == Arith::Exact && ssp_residual(&chain, &values).iter().any(|r| !r.is_zero()) {
            return Err(Error::Internal("non-zero SSP residual".into()));
        }
        st.solve = t.elapsed();
        opts.check_deadline()?;
        let t = Instant::now();
        let current = value_groups(&lumped.quotient, &values);
        let mut list = Vec::new();
        for a in view.actions() {
            let lparts = l_partition(&view, a, &current, true);
            compare(a, &lparts, &current, opts.direction, opts.arith, &mut list);
        }
        let done = list.is_empty();
        let next = if done {
            strategy.clone()
        } else {
            improve_strategy(list, &strategy, opts.direction)
        };
        st.improve = t.elapsed();
        stats.push(st);
        if opts.keep_history {
            history.push(Iteration {
                strategy: strategy.clone(),
                quotient: lumped.quotient.clone(),
                values: values.clone(),
                bias: None,
            });
        }
        if done {
            return Ok(SolveReport {
                strategy,
                quotient: lumped.quotient,
                chain,
                values,
                bias: None,
                iterations,
                stats,
                history,
                proper: Some(proper),
                setup,
                total: start.elapsed(),
            });
        }
        strategy = next;
    }
}

/// Optimal expected mean-payoff (gain), by multichain strategy iteration:
/// improve on the gain first and on the bias only when the gain is stable.
pub fn solve_emp_symblicit<M: MonotonicMdp>(model: &M, opts: &SolveOptions) -> Result<SolveReport<M::Elem>> {
    let start = Instant::now();
    let view = SymbolicMdp::new(model);
    let mut strategy = initial_strategy_emp(&view)?;
    let setup = start.elapsed();
    let mut stats = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    let dir = opts.direction;
    loop {
        opts.check_deadline()?;
        if iterations >= opts.max_iter {
            return Err(Error::IterationCap(opts.max_iter));
        }
        iterations += 1;
        let mut st = IterationStats {
            strategy_blocks: strategy.len(),
            ..Default::default()
        };
        let t = Instant::now();
        let lumped = lump_until(&view, &strategy, None, opts.deadline)?;
        st.lump = t.elapsed();
        st.splitters = lumped.stats.splitters;
        st.quotient_blocks = lumped.quotient.len();
        let t = Instant::now();
        let chain = explicitize(&view, &lumped.quotient, &strategy)?;
        let gb = solve_gain_bias(&chain, opts.arith)?;
        if opts.arith == Arith::Exact && !gain_bias_exact(&chain, &gb) {
            return Err(Error::Internal("non-zero gain/bias residual".into()));
        }
        st.solve = t.elapsed();
        opts.check_deadline()?;
        let t = Instant::now();
        let gains = value_groups(&lumped.quotient, &gb.gain);
        let mut list = Vec::new();
        let mut gain_parts = Vec::new();
        for a in view.actions() {
            let lg = l_partition(&view, a, &gains, false);
            compare(a, &lg, &gains, dir, opts.arith, &mut list);
            gain_parts.push(lg);
        }
        if list.is_empty() {
            let gb_sum: Vec<Rational> = gb.gain.iter().zip(&gb.bias).map(|(g, b)| g + b).collect();
            let current = value_groups(&lumped.quotient, &gb_sum);
            let biases = value_groups(&lumped.quotient, &gb.bias);
            for (a, lg) in view.actions().zip(&gain_parts) {
                // Σ̂_σ: where σ keeps the gain optimal.
                let mut hat = Vec::new();
                for (l, x) in lg {
                    for (g, u) in &gains {
                        if opts.arith.same(l, g) && x.intersects(u) {
                            hat.push(x.intersect(u));
                        }
                    }
                }
                let hat = union_all(hat);
                if hat.is_empty() {
                    continue;
                }
                let lb: Vec<_> = l_partition(&view, a, &biases, true)
                    .into_iter()
                    .filter_map(|(l, x)| {
                        let x = x.intersect(&hat);
                        (!x.is_empty()).then_some((l, x))
                    })
                    .collect();
                compare(a, &lb, &current, dir, opts.arith, &mut list);
            }
        }
        let done = list.is_empty();
        let next = if done {
            strategy.clone()
        } else {
            improve_strategy(list, &strategy, dir)
        };
        st.improve = t.elapsed();
        stats.push(st);
        if opts.keep_history {
            history.push(Iteration {
                strategy: strategy.clone(),
                quotient: lumped.quotient.clone(),
                values: gb.gain.clone(),
                bias: Some(gb.bias.clone()),
            });
        }
        if done {
            return Ok(SolveReport {
                strategy,
                quotient: lumped.quotient,
                chain,
                values: gb.gain,
                bias: Some(gb.bias),
                iterations,
                stats,
                history,
                proper: None,
                setup,
                total: start.elapsed(),
            });
        }
        strategy = next;
    }
}
