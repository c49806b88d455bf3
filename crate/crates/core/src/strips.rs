//! STRIPS frontend: monotonization, monotonic stochastic STRIPS (MSS)
//! models, their reduction to monotonic MDPs, and benchmark generators.
//!
//! States are sets of conditions ordered by `⊇`, so `∅` is the unique
//! maximal state and the goal set `{s | s ⊇ M}` is closed.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{Antichain, CondSet, Domain, PseudoAntichain, SubsetDomain};
use crate::mdp::{ActionId, Distribution, EffectId, MonotonicMdp};
use crate::partition::SymbolicPartition;
use crate::rational::{int, parse_rational, rat, Rational};

/// A deterministic STRIPS operator `((γ, θ), (α, δ))` with a cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripsOperator {
    pub name: String,
    pub guard_pos: CondSet,
    pub guard_neg: CondSet,
    pub add: CondSet,
    pub del: CondSet,
    pub cost: Rational,
}

/// A STRIPS instance `(P, I, (M, N), O)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strips {
    pub conditions: Vec<String>,
    pub init: CondSet,
    pub goal_pos: CondSet,
    pub goal_neg: CondSet,
    pub operators: Vec<StripsOperator>,
}

impl Strips {
    pub fn validate(&self) -> Result<()> {
        if self.conditions.len() > 64 {
            return Err(Error::Validation("more than 64 conditions".into()));
        }
        if self.goal_pos.intersects(self.goal_neg) {
            return Err(Error::Validation("goal requires and forbids the same condition".into()));
        }
        for o in &self.operators {
            if o.guard_pos.intersects(o.guard_neg) || o.add.intersects(o.del) {
                return Err(Error::Validation(format!("operator {} is contradictory", o.name)));
            }
        }
        Ok(())
    }

    /// Apply an operator if its guard holds.
    pub fn apply(&self, s: CondSet, o: &StripsOperator) -> Option<CondSet> {
        (s.is_superset(o.guard_pos) && !s.intersects(o.guard_neg)).then(|| s.union(o.add).minus(o.del))
    }

    pub fn is_goal(&self, s: CondSet) -> bool {
        s.is_superset(self.goal_pos) && !s.intersects(self.goal_neg)
    }
}

/// Rewrite a STRIPS instance into a monotonic one over `P ∪ P̄`, where the
/// barred copy `~p` of `p` holds exactly when `p` does not. Condition `p_i`
/// keeps index `i` and `~p_i` gets index `|P| + i`.
pub fn monotonize(st: &Strips) -> Result<Strips> {
    let n = st.conditions.len();
    if 2 * n > 64 {
        return Err(Error::Validation("monotonization needs at most 32 conditions".into()));
    }
    let bar = |c: CondSet| CondSet(c.0 << n);
    let all = if n == 0 {
        CondSet::EMPTY
    } else {
        CondSet((1u64 << n) - 1)
    };
    let mut conditions = st.conditions.clone();
    conditions.extend(st.conditions.iter().map(|p| format!("~{p}")));
    let operators = st
        .operators
        .iter()
        .map(|o| StripsOperator {
            name: o.name.clone(),
            guard_pos: o.guard_pos.union(bar(o.guard_neg)),
            guard_neg: CondSet::EMPTY,
            add: o.add.union(bar(o.del)),
            del: o.del.union(bar(o.add)),
            cost: o.cost.clone(),
        })
        .collect();
    Ok(Strips {
        conditions,
        init: st.init.union(bar(all.minus(st.init))),
        goal_pos: st.goal_pos.union(bar(st.goal_neg)),
        goal_neg: CondSet::EMPTY,
        operators,
    })
}

impl Strips {
    /// View a monotonic STRIPS instance as a deterministic MSS.
    pub fn to_mss(&self) -> Result<Mss> {
        if !self.goal_neg.is_empty() || self.operators.iter().any(|o| !o.guard_neg.is_empty()) {
            return Err(Error::Validation("negative conditions: monotonize first".into()));
        }
        let mss = Mss {
            conditions: self.conditions.clone(),
            init: self.init,
            goal: Some(self.goal_pos),
            operators: self
                .operators
                .iter()
                .map(|o| MssOperator {
                    name: o.name.clone(),
                    guard: o.guard_pos,
                    cost: o.cost.clone(),
                    effects: vec![(Rational::one(), Effect { add: o.add, del: o.del })],
                })
                .collect(),
        };
        mss.validate()?;
        Ok(mss)
    }
}

/// An effect `(α, δ)`: add `α`, then delete `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Effect {
    pub add: CondSet,
    pub del: CondSet,
}

impl Effect {
    pub fn apply(&self, s: CondSet) -> CondSet {
        s.union(self.add).minus(self.del)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MssOperator {
    pub name: String,
    pub guard: CondSet,
    pub cost: Rational,
    pub effects: Vec<(Rational, Effect)>,
}

/// A monotonic stochastic STRIPS instance with operator costs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mss {
    pub conditions: Vec<String>,
    pub init: CondSet,
    /// `M`; absent for mean-payoff models.
    pub goal: Option<CondSet>,
    pub operators: Vec<MssOperator>,
}

impl Mss {
    pub fn validate(&self) -> Result<()> {
        if self.conditions.len() > 64 {
            return Err(Error::Validation("more than 64 conditions".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.conditions {
            if !seen.insert(c) {
                return Err(Error::Validation(format!("duplicate condition {c}")));
            }
        }
        if self.operators.is_empty() {
            return Err(Error::Validation("no operators".into()));
        }
        let mut names = std::collections::HashSet::new();
        for o in &self.operators {
            if !names.insert(&o.name) {
                return Err(Error::Validation(format!("duplicate operator {}", o.name)));
            }
            if o.effects.is_empty() {
                return Err(Error::Validation(format!("operator {} has no effect", o.name)));
            }
            let mut total = Rational::zero();
            for (p, e) in &o.effects {
                if *p <= Rational::zero() {
                    return Err(Error::Validation(format!(
                        "operator {}: effect probability {p} is not positive",
                        o.name
                    )));
                }
                if e.add.intersects(e.del) {
                    return Err(Error::Validation(format!(
                        "operator {}: an effect adds and deletes the same condition",
                        o.name
                    )));
                }
                total += p;
            }
            if !total.is_one() {
                return Err(Error::Validation(format!(
                    "operator {}: effect probabilities sum to {total}, not 1",
                    o.name
                )));
            }
        }
        Ok(())
    }

    /// SSP models need strictly positive costs.
    pub fn check_positive_costs(&self) -> Result<()> {
        match self.operators.iter().find(|o| o.cost <= Rational::zero()) {
            Some(o) => Err(Error::Validation(format!(
                "operator {} has non-positive cost {}",
                o.name, o.cost
            ))),
            None => Ok(()),
        }
    }

    pub fn domain(&self) -> SubsetDomain {
        SubsetDomain::new(self.conditions.clone())
    }

    /// Parse the line-based text format.
    pub fn parse(text: &str) -> Result<Mss> {
        parse_mss(text)
    }

    /// Render in the text format accepted by [`Mss::parse`].
    pub fn to_text(&self) -> String {
        let names = |c: CondSet| {
            c.indices()
                .map(|i| self.conditions[i].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "conditions: {}", self.conditions.join(" "));
        let _ = writeln!(out, "init: {}", names(self.init));
        if let Some(g) = self.goal {
            let _ = writeln!(out, "goal: {}", names(g));
        }
        for o in &self.operators {
            let _ = writeln!(out, "operator {} cost {}", o.name, frac(&o.cost));
            let _ = writeln!(out, "  guard: {}", names(o.guard));
            for (p, e) in &o.effects {
                let _ = writeln!(out, "  effect {} add: {}  del: {}", frac(p), names(e.add), names(e.del));
            }
        }
        out
    }
}

fn frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_mss(text: &str) -> Result<Mss> {
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut conditions: Option<Vec<String>> = None;
    let mut init = None;
    let mut goal = None;
    let mut operators: Vec<MssOperator> = Vec::new();

    let lookup = |conds: &Option<Vec<String>>, line: usize, words: &[&str]| -> Result<CondSet> {
        let conds = conds
            .as_ref()
            .ok_or_else(|| err(line, "`conditions:` must come first".into()))?;
        let mut idx = Vec::new();
        for w in words {
            match conds.iter().position(|c| c == w) {
                Some(i) => idx.push(i),
                None => return Err(err(line, format!("unknown condition `{w}`"))),
            }
        }
        Ok(CondSet::from_indices(idx))
    };

    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, rest) = match content.split_once(char::is_whitespace) {
            Some((h, r)) => (h, r.trim()),
            None => (content, ""),
        };
        let words: Vec<&str> = rest.split_whitespace().collect();
        match head {
            "conditions:" => {
                if conditions.is_some() {
                    return Err(err(line, "duplicate `conditions:` line".into()));
                }
                if words.len() > 64 {
                    return Err(err(line, "at most 64 conditions are supported".into()));
                }
                conditions = Some(words.iter().map(|w| w.to_string()).collect());
            }
            "init:" => init = Some(lookup(&conditions, line, &words)?),
            "goal:" => goal = Some(lookup(&conditions, line, &words)?),
            "operator" => {
                if words.len() != 3 || words[1] != "cost" {
                    return Err(err(line, "expected `operator <name> cost <num>/<den>`".into()));
                }
                let cost = parse_rational(words[2]).ok_or_else(|| err(line, format!("bad cost `{}`", words[2])))?;
                operators.push(MssOperator {
                    name: words[0].to_string(),
                    guard: CondSet::EMPTY,
                    cost,
                    effects: Vec::new(),
                });
            }
            "guard:" => {
                let g = lookup(&conditions, line, &words)?;
                let op = operators
                    .last_mut()
                    .ok_or_else(|| err(line, "`guard:` outside an operator".into()))?;
                op.guard = g;
            }
            "effect" => {
                let prob_text = words
                    .first()
                    .ok_or_else(|| err(line, "missing effect probability".into()))?;
                let prob =
                    parse_rational(prob_text).ok_or_else(|| err(line, format!("bad probability `{prob_text}`")))?;
                let mut add = Vec::new();
                let mut del = Vec::new();
                let mut target: Option<&mut Vec<&str>> = None;
                let mut saw = (false, false);
                for w in &words[1..] {
                    match *w {
                        "add:" => {
                            saw.0 = true;
                            target = Some(&mut add);
                        }
                        "del:" => {
                            saw.1 = true;
                            target = Some(&mut del);
                        }
                        other => match target.as_mut() {
                            Some(t) => t.push(other),
                            None => return Err(err(line, format!("unexpected `{other}`"))),
                        },
                    }
                }
                if !saw.0 || !saw.1 {
                    return Err(err(line, "an effect needs both `add:` and `del:`".into()));
                }
                let add = lookup(&conditions, line, &add)?;
                let del = lookup(&conditions, line, &del)?;
                let op = operators
                    .last_mut()
                    .ok_or_else(|| err(line, "`effect` outside an operator".into()))?;
                op.effects.push((prob, Effect { add, del }));
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    let conditions = conditions.ok_or_else(|| err(0, "missing `conditions:` line".into()))?;
    let mss = Mss {
        conditions,
        init: init.unwrap_or(CondSet::EMPTY),
        goal,
        operators,
    };
    mss.validate()?;
    Ok(mss)
}

/// The monotonic MDP of an MSS, restricted to its non-blocking part.
///
/// `T` is the set of effect pairs appearing in any operator. The state space
/// is the greatest set `N` of states having an action whose positive
/// probability successors all stay in `N`; each action is enabled exactly on
/// the states of `N` from which that holds.
#[derive(Clone, Debug)]
pub struct StripsMdp {
    mss: Mss,
    domain: SubsetDomain,
    effects: Vec<Effect>,
    dists: Vec<Distribution>,
    alive: Antichain<CondSet>,
    enabled: Vec<Antichain<CondSet>>,
}

impl StripsMdp {
    pub fn new(mss: Mss) -> Result<Self> {
        mss.validate()?;
        let domain = mss.domain();
        let mut effects: Vec<Effect> = Vec::new();
        let mut dists = Vec::new();
        for o in &mss.operators {
            let mut entries = Vec::new();
            for (p, e) in &o.effects {
                let t = match effects.iter().position(|f| f == e) {
                    Some(t) => t,
                    None => {
                        effects.push(*e);
                        effects.len() - 1
                    }
                };
                entries.push((EffectId(t), p.clone()));
            }
            dists.push(Distribution::new(entries)?);
        }
        let (alive, enabled) = prune_blocking(&mss, &effects, &dists);
        if alive.is_empty() {
            return Err(Error::EmptyStateSpace);
        }
        Ok(StripsMdp {
            mss,
            domain,
            effects,
            dists,
            alive,
            enabled,
        })
    }

    pub fn mss(&self) -> &Mss {
        &self.mss
    }

    pub fn init(&self) -> CondSet {
        self.mss.init
    }

    pub fn effect(&self, t: EffectId) -> Effect {
        self.effects[t.0]
    }

    pub fn operator_dist(&self, a: ActionId) -> &Distribution {
        &self.dists[a.0]
    }

    /// `G = {s ∈ N | s ⊇ M}`.
    pub fn goal(&self) -> Option<PseudoAntichain<CondSet>> {
        let m = self.mss.goal?;
        Some(PseudoAntichain::from_antichain(&Antichain::singleton(m)).intersect(&self.states()))
    }

    /// The surviving state set `N`.
    pub fn states(&self) -> PseudoAntichain<CondSet> {
        PseudoAntichain::from_antichain(&self.alive)
    }

    /// Number of states of `2^P`, before pruning.
    pub fn full_size(&self) -> u128 {
        1u128 << self.domain.len()
    }
}

/// `⌈Pre_{σ,τ}(↓{x})⌉` over the full condition lattice.
fn raw_pre(x: CondSet, guard: CondSet, e: &Effect) -> Option<CondSet> {
    (!x.intersects(e.del)).then(|| guard.union(x.minus(e.add)))
}

fn raw_pre_closed(beta: &Antichain<CondSet>, guard: CondSet, e: &Effect) -> Antichain<CondSet> {
    Antichain::maximal(beta.iter().filter_map(|x| raw_pre(*x, guard, e)))
}

/// Greatest fixpoint `N = ⋃_σ (S_σ ∩ ⋂_{τ ∈ supp} Pre_{σ,τ}(N))`. All sets
/// involved are closed, so plain antichains suffice.
fn prune_blocking(
    mss: &Mss,
    effects: &[Effect],
    dists: &[Distribution],
) -> (Antichain<CondSet>, Vec<Antichain<CondSet>>) {
    let safe = |n: &Antichain<CondSet>| -> Vec<Antichain<CondSet>> {
        mss.operators
            .iter()
            .zip(dists)
            .map(|(o, d)| {
                let mut acc = Antichain::singleton(o.guard).intersect(n);
                for t in d.support() {
                    acc = acc.intersect(&raw_pre_closed(n, o.guard, &effects[t.0]));
                }
                acc
            })
            .collect()
    };
    let mut n = Antichain::singleton(CondSet::EMPTY);
    loop {
        let en = safe(&n);
        let next = Antichain::maximal(en.iter().flat_map(|a| a.iter().copied()));
        if next == n {
            return (n, en);
        }
        n = next;
    }
}

impl MonotonicMdp for StripsMdp {
    type Elem = CondSet;
    type Dom = SubsetDomain;

    fn domain(&self) -> &SubsetDomain {
        &self.domain
    }

    fn num_actions(&self) -> usize {
        self.mss.operators.len()
    }

    fn action_name(&self, a: ActionId) -> String {
        self.mss.operators[a.0].name.clone()
    }

    fn num_effects(&self) -> usize {
        self.effects.len()
    }

    fn effect_name(&self, t: EffectId) -> String {
        let e = &self.effects[t.0];
        format!("({}, {})", self.domain.render(&e.add), self.domain.render(&e.del))
    }

    fn top(&self) -> Antichain<CondSet> {
        self.alive.clone()
    }

    fn succ(&self, s: &CondSet, _a: ActionId, t: EffectId) -> CondSet {
        self.effects[t.0].apply(*s)
    }

    fn pre_max(&self, x: &CondSet, a: ActionId, t: EffectId) -> Antichain<CondSet> {
        let guard = self.mss.operators[a.0].guard;
        match raw_pre(*x, guard, &self.effects[t.0]) {
            Some(p) => self.enabled[a.0].below(&p),
            None => Antichain::empty(),
        }
    }

    fn dist_partition(&self, a: ActionId) -> SymbolicPartition<CondSet, Distribution> {
        SymbolicPartition::single(self.states_enabling(a), self.dists[a.0].clone())
    }

    fn cost_partition(&self, a: ActionId) -> SymbolicPartition<CondSet, Rational> {
        SymbolicPartition::single(self.states_enabling(a), self.mss.operators[a.0].cost.clone())
    }

    /// The pruned enabled set. Taking `Pre_{σ,τ}(S)` for a `τ` outside the
    /// operator's support could lose states whose `τ`-successor leaves `N`.
    fn states_enabling(&self, a: ActionId) -> PseudoAntichain<CondSet> {
        PseudoAntichain::from_antichain(&self.enabled[a.0])
    }
}

// ---------------------------------------------------------------------------
// Benchmark generators.

/// Largest condition count accepted by the generators.
pub const MAX_GENERATED_CONDITIONS: usize = 40;

struct Builder {
    conditions: Vec<String>,
    operators: Vec<MssOperator>,
}

impl Builder {
    fn cond(&mut self, name: String) -> usize {
        self.conditions.push(name);
        self.conditions.len() - 1
    }

    fn op(&mut self, name: String, guard: CondSet, cost: Rational, effects: Vec<(Rational, CondSet, CondSet)>) {
        self.operators.push(MssOperator {
            name,
            guard,
            cost,
            effects: effects
                .into_iter()
                .map(|(p, add, del)| (p, Effect { add, del }))
                .collect(),
        });
    }
}

fn one(i: usize) -> CondSet {
    CondSet::from_indices([i])
}

/// The monkey benchmark with `s` buildable sticks made of `p` pieces each.
///
/// Conditions: `bananas`, `box`, `stone`, `stick` and pieces `piece_j_k`
/// for `j ≤ s`, `k < p`; the piece set `j = s` is useless. That gives
/// `4 + (s + 1)·p` conditions.
///
/// Operators and costs:
/// * `takebox` (cost 8) and `takestone` (cost 1) are deterministic;
/// * `takepiece_j_k` costs `1 + j mod 5` and succeeds with probability 4/5;
/// * `assemble_j` (`j < s`) needs all pieces of set `j`, costs `2 + j`,
///   consumes them and yields the stick; `assemble_s` does nothing;
/// * the three banana attempts cost 2 and succeed with probability 1/4
///   (box), 1/5 (stick) and 1/2 (both);
/// * `throwstone` costs 1, loses the stone and brings the bananas down with
///   probability 1/10.
pub fn gen_monkey(s: usize, p: usize) -> Result<Mss> {
    if s == 0 || p == 0 {
        return Err(Error::Validation("monkey parameters must be at least 1".into()));
    }
    if 4 + (s + 1) * p > MAX_GENERATED_CONDITIONS {
        return Err(Error::Validation(format!(
            "monkey({s},{p}) needs {} conditions, above the cap of {MAX_GENERATED_CONDITIONS}",
            4 + (s + 1) * p
        )));
    }
    let mut b = Builder {
        conditions: Vec::new(),
        operators: Vec::new(),
    };
    let bananas = b.cond("bananas".into());
    let bx = b.cond("box".into());
    let stone = b.cond("stone".into());
    let stick = b.cond("stick".into());
    let mut sets = Vec::new();
    for j in 0..=s {
        let idx: Vec<usize> = (0..p).map(|k| b.cond(format!("piece_{j}_{k}"))).collect();
        sets.push(idx);
    }
    let none = CondSet::EMPTY;
    b.op("takebox".into(), none, int(8), vec![(int(1), one(bx), none)]);
    b.op("takestone".into(), none, int(1), vec![(int(1), one(stone), none)]);
    for (j, set) in sets.iter().enumerate() {
        for (k, &c) in set.iter().enumerate() {
            b.op(
                format!("takepiece_{j}_{k}"),
                none,
                int(1 + (j % 5) as i64),
                vec![(rat(4, 5), one(c), none), (rat(1, 5), none, none)],
            );
        }
    }
    for (j, set) in sets.iter().enumerate() {
        let pieces = CondSet::from_indices(set.iter().copied());
        let effect = if j < s {
            (int(1), one(stick), pieces)
        } else {
            (int(1), none, none)
        };
        b.op(format!("assemble_{j}"), pieces, int(2 + j as i64), vec![effect]);
    }
    let attempt = |prob: Rational| vec![(prob.clone(), one(bananas), none), (int(1) - prob, none, none)];
    b.op("takebananaswithbox".into(), one(bx), int(2), attempt(rat(1, 4)));
    b.op("takebananaswithstick".into(), one(stick), int(2), attempt(rat(1, 5)));
    b.op(
        "takebananaswithboth".into(),
        one(bx).union(one(stick)),
        int(2),
        attempt(rat(1, 2)),
    );
    b.op(
        "throwstone".into(),
        one(stone),
        int(1),
        vec![(rat(1, 10), one(bananas), one(stone)), (rat(9, 10), none, one(stone))],
    );
    let mss = Mss {
        conditions: b.conditions,
        init: none,
        goal: Some(one(bananas)),
        operators: b.operators,
    };
    mss.validate()?;
    Ok(mss)
}

/// Failure probability of building a castle behind a moat of depth `k ≥ 1`:
/// `(3/4)·(11/15)^(k-1)`, i.e. success 1/4 at depth 1 and 9/20 at depth 2.
pub fn moat_success(k: usize) -> Rational {
    if k == 0 {
        return rat(1, 10);
    }
    let mut fail = rat(3, 4);
    for _ in 1..k {
        fail *= rat(11, 15);
    }
    int(1) - fail
}

/// Moats and castles: `c` castles, each with a moat of up to `d` depths.
///
/// Conditions `moat_i_k` (`1 ≤ k ≤ d`) and `castle_i`, `c·(d + 1)` in total.
/// `dig_i_k` costs 1 and needs `moat_i_{k-1}`. `build_i_k` (`0 ≤ k ≤ d`)
/// costs 2, needs `moat_i_k` (nothing for `k = 0`) and succeeds with
/// probability [`moat_success`]`(k)`. The goal is every castle.
pub fn gen_moats(c: usize, d: usize) -> Result<Mss> {
    if c == 0 || d == 0 {
        return Err(Error::Validation("moats parameters must be at least 1".into()));
    }
    if c * (d + 1) > MAX_GENERATED_CONDITIONS {
        return Err(Error::Validation(format!(
            "moats({c},{d}) needs {} conditions, above the cap of {MAX_GENERATED_CONDITIONS}",
            c * (d + 1)
        )));
    }
    let mut b = Builder {
        conditions: Vec::new(),
        operators: Vec::new(),
    };
    let mut moats = Vec::new();
    let mut castles = Vec::new();
    for i in 0..c {
        moats.push((1..=d).map(|k| b.cond(format!("moat_{i}_{k}"))).collect::<Vec<_>>());
        castles.push(b.cond(format!("castle_{i}")));
    }
    let none = CondSet::EMPTY;
    for i in 0..c {
        for k in 1..=d {
            let guard = if k == 1 { none } else { one(moats[i][k - 2]) };
            b.op(
                format!("dig_{i}_{k}"),
                guard,
                int(1),
                vec![(int(1), one(moats[i][k - 1]), none)],
            );
        }
        for k in 0..=d {
            let guard = if k == 0 { none } else { one(moats[i][k - 1]) };
            let p = moat_success(k);
            b.op(
                format!("build_{i}_{k}"),
                guard,
                int(2),
                vec![(p.clone(), one(castles[i]), none), (int(1) - p, none, none)],
            );
        }
    }
    let mss = Mss {
        conditions: b.conditions,
        init: none,
        goal: Some(CondSet::from_indices(castles)),
        operators: b.operators,
    };
    mss.validate()?;
    Ok(mss)
}

/// Parameters of the random MSS family used for cross-validation.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub max_conditions: usize,
    pub max_operators: usize,
    pub max_effects: usize,
    pub max_denominator: i64,
    pub with_goal: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            max_conditions: 10,
            max_operators: 6,
            max_effects: 3,
            max_denominator: 20,
            with_goal: true,
        }
    }
}

fn random_subset<R: Rng>(rng: &mut R, n: usize, density: f64) -> CondSet {
    CondSet::from_indices((0..n).filter(|_| rng.gen_bool(density)))
}

/// A random MSS. The first operator has an empty guard so the model is
/// never pruned away entirely; costs are in `{1/2, 1, …, 5}`.
pub fn gen_random<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Mss {
    let n = rng.gen_range(2.min(spec.max_conditions)..=spec.max_conditions.max(1));
    let conditions: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let n_ops = rng.gen_range(1..=spec.max_operators.max(1));
    let mut operators = Vec::new();
    for o in 0..n_ops {
        let guard = if o == 0 {
            CondSet::EMPTY
        } else {
            random_subset(rng, n, 0.3)
        };
        let k = rng.gen_range(1..=spec.max_effects.max(1));
        let den = rng.gen_range(k as i64..=spec.max_denominator.max(k as i64));
        // Split `den` into `k` positive parts.
        let mut cuts: Vec<i64> = (0..k - 1).map(|_| rng.gen_range(1..den)).collect();
        cuts.sort();
        cuts.dedup();
        let mut parts = Vec::new();
        let mut last = 0;
        for c in cuts.into_iter().chain([den]) {
            parts.push(c - last);
            last = c;
        }
        let mut effects: Vec<(Rational, Effect)> = Vec::new();
        for part in parts {
            let add = random_subset(rng, n, 0.3);
            let del = random_subset(rng, n, 0.35).minus(add);
            let e = Effect { add, del };
            match effects.iter_mut().find(|(_, f)| *f == e) {
                Some((p, _)) => *p += rat(part, den),
                None => effects.push((rat(part, den), e)),
            }
        }
        let cost = if rng.gen_bool(0.2) {
            rat(1, 2)
        } else {
            int(rng.gen_range(1..=5))
        };
        operators.push(MssOperator {
            name: format!("o{o}"),
            guard,
            cost,
            effects,
        });
    }
    let goal = spec.with_goal.then(|| {
        let g = random_subset(rng, n, 0.3);
        if g.is_empty() {
            one(rng.gen_range(0..n))
        } else {
            g
        }
    });
    Mss {
        conditions,
        init: random_subset(rng, n, 0.2),
        goal,
        operators,
    }
}

/// Parse a generator spec such as `monkey:1,2`, `moats:2,3` or
/// `random:SEED` (optionally `random:SEED,emp`).
pub fn generate(spec: &str) -> Result<Mss> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<&str> = params.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let int_param = |i: usize| -> Result<usize> {
        nums.get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Validation(format!("generator `{spec}`: bad parameter {}", i + 1)))
    };
    match name {
        "monkey" => gen_monkey(int_param(0)?, int_param(1)?),
        "moats" => gen_moats(int_param(0)?, int_param(1)?),
        "random" => {
            use rand::SeedableRng;
            let seed = int_param(0)? as u64;
            let with_goal = nums.get(1).map(|s| *s != "emp").unwrap_or(true);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            Ok(gen_random(
                &mut rng,
                &RandomSpec {
                    with_goal,
                    ..RandomSpec::default()
                },
            ))
        }
        _ => Err(Error::Validation(format!("unknown generator `{name}`"))),
    }
}
