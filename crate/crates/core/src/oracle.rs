//! Explicit enumerative baseline: the state space is listed one state at a
//! time and strategy iteration runs on the full Markov chains. Used as ground
//! truth for the symbolic engine on small instances.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Domain, Lattice, PseudoAntichain};
use crate::mdp::{ActionId, MonotonicMdp, SymbolicMdp};
use crate::numeric::{gain_bias_exact, solve_gain_bias, solve_ssp, ssp_residual, Arith, GainBias, QuotientMc};
use crate::rational::Rational;
use crate::solver::{Direction, SolveOptions};

/// Default refusal threshold for enumeration.
pub const DEFAULT_CAP: u128 = 1 << 20;

/// One enabled action in one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub action: ActionId,
    pub cost: Rational,
    /// Successor indices with summed probabilities.
    pub succ: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug)]
pub struct ExplicitMdp<E> {
    pub states: Vec<E>,
    index: HashMap<E, usize>,
    /// Enabled actions per state, in declaration order.
    pub choices: Vec<Vec<Choice>>,
    pub goal: Vec<bool>,
}

impl<E: Lattice> ExplicitMdp<E> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &E) -> Option<usize> {
        self.index.get(s).copied()
    }

    fn choice(&self, s: usize, a: ActionId) -> Option<&Choice> {
        self.choices[s].iter().find(|c| c.action == a)
    }
}

/// Number of states of the model, counted without enumeration (an upper
/// bound when the carrier has several maximal elements).
pub fn state_bound<M: MonotonicMdp>(model: &M) -> u128 {
    model
        .top()
        .iter()
        .map(|x| model.domain().below_count(x))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// List every state of the model with its enabled actions.
pub fn enumerate<M: MonotonicMdp>(
    model: &M,
    goal: Option<&PseudoAntichain<M::Elem>>,
    cap: u128,
) -> Result<ExplicitMdp<M::Elem>> {
    let size = state_bound(model);
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }
    let view = SymbolicMdp::new(model);
    let states = view.carrier().enumerate(model.domain());
    let index: HashMap<M::Elem, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut choices = Vec::with_capacity(states.len());
    for s in &states {
        let mut cs = Vec::new();
        for a in view.actions() {
            if !view.is_enabled(s, a) {
                continue;
            }
            let mut succ: BTreeMap<usize, Rational> = BTreeMap::new();
            for (t, p) in view.distribution(s, a)?.entries() {
                let s2 = model.succ(s, a, *t);
                let j = *index.get(&s2).ok_or_else(|| {
                    Error::Internal(format!(
                        "successor {} of {} leaves the state space",
                        model.domain().render(&s2),
                        model.domain().render(s)
                    ))
                })?;
                *succ.entry(j).or_insert_with(Rational::zero) += p;
            }
            cs.push(Choice {
                action: a,
                cost: view.cost_of(s, a)?,
                succ: succ.into_iter().collect(),
            });
        }
        choices.push(cs);
    }
    let goal = states.iter().map(|s| goal.is_some_and(|g| g.contains(s))).collect();
    Ok(ExplicitMdp {
        states,
        index,
        choices,
        goal,
    })
}

/// `νY. μX. (APre(Y,X) ∨ G)` by direct set iteration.
pub fn explicit_proper<E: Lattice>(e: &ExplicitMdp<E>) -> Vec<bool> {
    let n = e.len();
    let mut y = vec![true; n];
    loop {
        let mut x = e.goal.clone();
        loop {
            let next: Vec<bool> = (0..n)
                .map(|s| {
                    x[s] || e.choices[s]
                        .iter()
                        .any(|c| c.succ.iter().all(|(j, _)| y[*j]) && c.succ.iter().any(|(j, _)| x[*j]))
                })
                .collect();
            if next == x {
                break;
            }
            x = next;
        }
        if x == y {
            return y;
        }
        y = x;
    }
}

/// Explicit strategy: one action per state, `None` on goal or excluded states.
pub type ExplicitStrategy = Vec<Option<ActionId>>;

#[derive(Clone, Debug)]
pub struct ExplicitSsp {
    pub proper: Vec<bool>,
    /// Optimal values on proper states.
    pub values: Vec<Option<Rational>>,
    pub strategy: ExplicitStrategy,
    pub iterations: usize,
    /// Values of every evaluated strategy.
    pub history: Vec<Vec<Option<Rational>>>,
}

#[derive(Clone, Debug)]
pub struct ExplicitEmp {
    pub gain: Vec<Rational>,
    pub bias: Vec<Rational>,
    pub strategy: Vec<ActionId>,
    pub iterations: usize,
}

/// The Markov chain induced by a strategy over the states in `keep`; goal
/// states self-loop.
pub fn induced_chain<E: Lattice>(
    e: &ExplicitMdp<E>,
    keep: &[bool],
    strategy: &[Option<ActionId>],
) -> Result<(QuotientMc<usize>, Vec<usize>)> {
    let members: Vec<usize> = (0..e.len()).filter(|&s| keep[s]).collect();
    let mut local = vec![usize::MAX; e.len()];
    for (k, &s) in members.iter().enumerate() {
        local[s] = k;
    }
    let mut rows = Vec::with_capacity(members.len());
    let mut cost = Vec::with_capacity(members.len());
    let mut goal = Vec::with_capacity(members.len());
    for (k, &s) in members.iter().enumerate() {
        match strategy[s] {
            Some(a) if !e.goal[s] => {
                let c = e
                    .choice(s, a)
                    .ok_or_else(|| Error::Internal("strategy picks a disabled action".into()))?;
                let mut row = Vec::with_capacity(c.succ.len());
                for (j, p) in &c.succ {
                    if local[*j] == usize::MAX {
                        return Err(Error::Internal("strategy leaves the kept states".into()));
                    }
                    row.push((local[*j], p.clone()));
                }
                rows.push(row);
                cost.push(c.cost.clone());
                goal.push(false);
            }
            _ => {
                rows.push(vec![(k, Rational::one())]);
                cost.push(Rational::zero());
                goal.push(true);
            }
        }
    }
    Ok((
        QuotientMc {
            rows,
            cost,
            goal,
            witness: members.clone(),
        },
        members,
    ))
}

fn lvalue(c: &Choice, v: &[Rational], with_cost: bool) -> Rational {
    let base = if with_cost { c.cost.clone() } else { Rational::zero() };
    c.succ.iter().fold(base, |acc, (j, p)| acc + p * &v[*j])
}

/// The first-declared action among the best candidates, if it is strictly
/// better than `current`.
fn pick<'a>(
    candidates: impl Iterator<Item = (&'a Choice, Rational)>,
    current: &Rational,
    dir: Direction,
    arith: Arith,
) -> Option<ActionId> {
    let mut best: Option<(ActionId, Rational)> = None;
    for (c, l) in candidates {
        match &best {
            Some((_, b)) if !dir.better(&l, b) => {}
            _ => best = Some((c.action, l)),
        }
    }
    best.filter(|(_, l)| dir.improves(arith, l, current)).map(|(a, _)| a)
}

fn check_deadline(opts: &SolveOptions) -> Result<()> {
    match opts.deadline {
        Some(d) if Instant::now() >= d => Err(Error::Timeout),
        _ => Ok(()),
    }
}

/// Explicit SSP strategy iteration on the proper states, with the same
/// initial strategy, tie rules and iteration count as the symbolic solver.
pub fn explicit_ssp<E: Lattice>(e: &ExplicitMdp<E>, opts: &SolveOptions) -> Result<ExplicitSsp> {
    let n = e.len();
    let proper = explicit_proper(e);
    let safe = |s: usize| -> Vec<&Choice> {
        e.choices[s]
            .iter()
            .filter(|c| c.succ.iter().all(|(j, _)| proper[*j]))
            .collect()
    };
    if e.choices.iter().flatten().any(|c| !c.cost.is_positive()) {
        return Err(Error::Validation("non-positive cost".into()));
    }
    // Layered initial strategy.
    let mut strategy: ExplicitStrategy = vec![None; n];
    let mut reached = e.goal.clone();
    loop {
        let mut layer = Vec::new();
        for s in 0..n {
            if reached[s] || !proper[s] {
                continue;
            }
            if let Some(c) = safe(s).into_iter().find(|c| c.succ.iter().any(|(j, _)| reached[*j])) {
                layer.push((s, c.action));
            }
        }
        if layer.is_empty() {
            break;
        }
        for (s, a) in layer {
            reached[s] = true;
            strategy[s] = Some(a);
        }
    }
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        check_deadline(opts)?;
        if iterations >= opts.max_iter {
            return Err(Error::IterationCap(opts.max_iter));
        }
        iterations += 1;
        let (chain, members) = induced_chain(e, &proper, &strategy)?;
        let local = solve_ssp(&chain, opts.arith)?;
        if opts.arith == Arith::Exact && ssp_residual(&chain, &local).iter().any(|r| !r.is_zero()) {
            return Err(Error::Internal("non-zero SSP residual".into()));
        }
        let mut v = vec![Rational::zero(); n];
        let mut values = vec![None; n];
        for (k, &s) in members.iter().enumerate() {
            v[s] = local[k].clone();
            values[s] = Some(local[k].clone());
        }
        history.push(values.clone());
        let mut changed = false;
        let mut next = strategy.clone();
        for s in 0..n {
            if !proper[s] || e.goal[s] {
                continue;
            }
            let cands = safe(s).into_iter().map(|c| (c, lvalue(c, &v, true)));
            if let Some(a) = pick(cands, &v[s], opts.direction, opts.arith) {
                next[s] = Some(a);
                changed = true;
            }
        }
        if !changed {
            return Ok(ExplicitSsp {
                proper,
                values,
                strategy,
                iterations,
                history,
            });
        }
        strategy = next;
    }
}

/// The symbolic solver's initial EMP choice replayed state by state: the
/// first maximal element above `s` decides, with its first enabled action.
pub fn initial_emp<M: MonotonicMdp>(model: &M, e: &ExplicitMdp<M::Elem>) -> Result<Vec<ActionId>> {
    let view = SymbolicMdp::new(model);
    let tops: Vec<M::Elem> = view.carrier().iter().map(|p| p.x().clone()).collect();
    let tops = crate::lattice::Antichain::maximal(tops);
    e.states
        .iter()
        .map(|s| {
            let x = tops
                .iter()
                .find(|x| s.leq(x))
                .ok_or_else(|| Error::Internal("state below no maximal element".into()))?;
            view.actions()
                .find(|a| view.is_enabled(x, *a))
                .ok_or_else(|| Error::Validation("blocking state".into()))
        })
        .collect()
}

/// Gain and bias of a complete explicit strategy.
pub fn evaluate_emp<E: Lattice>(e: &ExplicitMdp<E>, strategy: &[ActionId], arith: Arith) -> Result<GainBias> {
    let keep = vec![true; e.len()];
    let strat: ExplicitStrategy = strategy.iter().map(|a| Some(*a)).collect();
    let plain = ExplicitMdp {
        states: e.states.clone(),
        index: HashMap::new(),
        choices: e.choices.clone(),
        goal: vec![false; e.len()],
    };
    let (chain, _) = induced_chain(&plain, &keep, &strat)?;
    let gb = solve_gain_bias(&chain, arith)?;
    if arith == Arith::Exact && !gain_bias_exact(&chain, &gb) {
        return Err(Error::Internal("non-zero gain/bias residual".into()));
    }
    Ok(gb)
}

/// One multichain improvement step: gain first, then bias restricted to
/// gain-optimal actions. Returns `None` when no state can improve.
fn emp_step<E: Lattice>(
    e: &ExplicitMdp<E>,
    strategy: &[ActionId],
    gb: &GainBias,
    dir: Direction,
    arith: Arith,
) -> Option<Vec<ActionId>> {
    let n = e.len();
    let mut next = strategy.to_vec();
    let mut changed = false;
    for s in 0..n {
        let cands = e.choices[s].iter().map(|c| (c, lvalue(c, &gb.gain, false)));
        if let Some(a) = pick(cands, &gb.gain[s], dir, arith) {
            next[s] = a;
            changed = true;
        }
    }
    if changed {
        return Some(next);
    }
    for s in 0..n {
        let current = &gb.gain[s] + &gb.bias[s];
        let cands = e.choices[s]
            .iter()
            .filter(|c| arith.same(&lvalue(c, &gb.gain, false), &gb.gain[s]))
            .map(|c| (c, lvalue(c, &gb.bias, true)));
        if let Some(a) = pick(cands, &current, dir, arith) {
            next[s] = a;
            changed = true;
        }
    }
    changed.then_some(next)
}

/// Explicit multichain strategy iteration for the mean-payoff.
pub fn explicit_emp<M: MonotonicMdp>(model: &M, e: &ExplicitMdp<M::Elem>, opts: &SolveOptions) -> Result<ExplicitEmp> {
    let mut strategy = initial_emp(model, e)?;
    let mut iterations = 0;
    loop {
        check_deadline(opts)?;
        if iterations >= opts.max_iter {
            return Err(Error::IterationCap(opts.max_iter));
        }
        iterations += 1;
        let gb = evaluate_emp(e, &strategy, opts.arith)?;
        match emp_step(e, &strategy, &gb, opts.direction, opts.arith) {
            Some(next) => strategy = next,
            None => {
                return Ok(ExplicitEmp {
                    gain: gb.gain,
                    bias: gb.bias,
                    strategy,
                    iterations,
                })
            }
        }
    }
}

/// The optimality test of multichain strategy iteration: no state has an
/// action improving the gain, nor a gain-optimal action improving the bias.
pub fn audit_emp<E: Lattice>(e: &ExplicitMdp<E>, strategy: &[ActionId], dir: Direction) -> Result<bool> {
    let gb = evaluate_emp(e, strategy, Arith::Exact)?;
    Ok(emp_step(e, strategy, &gb, dir, Arith::Exact).is_none())
}

/// The largest bisimulation of an explicit chain, by iterated signature
/// refinement: states stay together while they share their block, their
/// cost and their probability into every block. Returns a block id per state.
pub fn explicit_lump(chain: &QuotientMc<usize>) -> Vec<usize> {
    let n = chain.len();
    let mut ids: BTreeMap<(bool, Rational), usize> = BTreeMap::new();
    let mut block: Vec<usize> = (0..n)
        .map(|i| {
            let k = ids.len();
            *ids.entry((chain.goal[i], chain.cost[i].clone())).or_insert(k)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut sigs: BTreeMap<(usize, Vec<(usize, Rational)>), usize> = BTreeMap::new();
        let next: Vec<usize> = (0..n)
            .map(|i| {
                let mut into: BTreeMap<usize, Rational> = BTreeMap::new();
                for (j, p) in &chain.rows[i] {
                    *into.entry(block[*j]).or_insert_with(Rational::zero) += p;
                }
                let k = sigs.len();
                *sigs.entry((block[i], into.into_iter().collect())).or_insert(k)
            })
            .collect();
        if sigs.len() == count {
            return next;
        }
        count = sigs.len();
        block = next;
    }
}

/// Number of blocks of a block assignment.
pub fn block_count(blocks: &[usize]) -> usize {
    let mut b = blocks.to_vec();
    b.sort_unstable();
    b.dedup();
    b.len()
}
