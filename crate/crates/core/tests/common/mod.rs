//! Cross-checks of the symbolic engine against the explicit oracle.
#![allow(dead_code)]

use pamdp_core::lattice::CondSet;
use pamdp_core::mdp::ActionId;
use pamdp_core::numeric::QuotientMc;
use pamdp_core::oracle::{self, ExplicitMdp};
use pamdp_core::rational::Rational;
use pamdp_core::solver::{self, SolveOptions, SolveReport};
use pamdp_core::strips::{generate, Mss, StripsMdp};
use pamdp_core::Error;

pub fn random_instance(seed: u64, with_goal: bool) -> Mss {
    let spec = if with_goal {
        format!("random:{seed}")
    } else {
        format!("random:{seed},emp")
    };
    generate(&spec).unwrap()
}

/// The model, or `None` when pruning leaves nothing.
pub fn model(mss: Mss) -> Option<StripsMdp> {
    match StripsMdp::new(mss) {
        Ok(m) => Some(m),
        Err(Error::EmptyStateSpace) => None,
        Err(e) => panic!("unexpected model error: {e}"),
    }
}

pub fn history_opts() -> SolveOptions {
    SolveOptions {
        keep_history: true,
        ..SolveOptions::default()
    }
}

/// Explicit chain induced by a symbolic strategy on the states in `keep`.
pub fn induced(
    e: &ExplicitMdp<CondSet>,
    keep: &[bool],
    strategy_of: impl Fn(&CondSet) -> Option<ActionId>,
) -> (QuotientMc<usize>, Vec<usize>) {
    let strat: Vec<Option<ActionId>> = e
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| if e.goal[i] { None } else { strategy_of(s) })
        .collect();
    oracle::induced_chain(e, keep, &strat).unwrap()
}

pub struct SspCheck {
    pub report: SolveReport<CondSet>,
    pub explicit: oracle::ExplicitSsp,
    pub e: ExplicitMdp<CondSet>,
}

/// Solve SSP both ways and compare proper sets, values and iteration counts.
pub fn check_ssp(m: &StripsMdp) -> Result<Option<SspCheck>, String> {
    let goal = m.goal().expect("goal");
    let report = match solver::solve_ssp_symblicit(m, &goal, &history_opts()) {
        Ok(r) => r,
        Err(Error::Unsolvable(_)) => return Ok(None),
        Err(e) => return Err(format!("symbolic: {e}")),
    };
    let e = oracle::enumerate(m, Some(&goal), oracle::DEFAULT_CAP).map_err(|e| e.to_string())?;
    let explicit = oracle::explicit_ssp(&e, &SolveOptions::default()).map_err(|e| format!("explicit: {e}"))?;
    let proper = report.proper.as_ref().unwrap();
    for (i, s) in e.states.iter().enumerate() {
        if proper.contains(s) != explicit.proper[i] {
            return Err(format!("proper sets differ at {s:?}"));
        }
        if explicit.proper[i] {
            let v = report.value_of(s).ok_or_else(|| format!("no value for {s:?}"))?;
            if Some(v) != explicit.values[i].as_ref() {
                return Err(format!("value differs at {s:?}: {v} vs {:?}", explicit.values[i]));
            }
        }
    }
    if report.iterations != explicit.iterations {
        return Err(format!("iterations {} vs {}", report.iterations, explicit.iterations));
    }
    Ok(Some(SspCheck { report, explicit, e }))
}

pub struct EmpCheck {
    pub report: SolveReport<CondSet>,
    pub explicit: oracle::ExplicitEmp,
    pub e: ExplicitMdp<CondSet>,
}

/// Solve EMP both ways, compare gains and audit the symbolic strategy.
pub fn check_emp(m: &StripsMdp) -> Result<EmpCheck, String> {
    let report = solver::solve_emp_symblicit(m, &history_opts()).map_err(|e| format!("symbolic: {e}"))?;
    let e = oracle::enumerate(m, None, oracle::DEFAULT_CAP).map_err(|e| e.to_string())?;
    let explicit = oracle::explicit_emp(m, &e, &SolveOptions::default()).map_err(|e| format!("explicit: {e}"))?;
    for (i, s) in e.states.iter().enumerate() {
        let g = report.value_of(s).ok_or_else(|| format!("no gain for {s:?}"))?;
        if g != &explicit.gain[i] {
            return Err(format!("gain differs at {s:?}: {g} vs {}", explicit.gain[i]));
        }
    }
    let strat: Vec<ActionId> = e
        .states
        .iter()
        .map(|s| *report.strategy.lookup(s).expect("strategy covers S").1)
        .collect();
    if !oracle::audit_emp(&e, &strat, solver::Direction::Minimize).map_err(|e| e.to_string())? {
        return Err("symbolic EMP strategy fails the optimality audit".into());
    }
    Ok(EmpCheck { report, explicit, e })
}

/// Compare every iteration's symbolic quotient with explicit lumping, and
/// verify the bisimulation conditions on up to `samples` state pairs.
pub fn check_lumping(
    report: &SolveReport<CondSet>,
    e: &ExplicitMdp<CondSet>,
    keep: &[bool],
    samples: usize,
    seed: u64,
) -> Result<(), String> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for (k, it) in report.history.iter().enumerate() {
        let (chain, members) = induced(e, keep, |s| it.strategy.lookup(s).map(|(_, a)| *a));
        let expl = oracle::block_count(&oracle::explicit_lump(&chain));
        if expl != it.quotient.len() {
            return Err(format!(
                "iteration {k}: {} symbolic blocks vs {expl} explicit",
                it.quotient.len()
            ));
        }
        let block_of: Vec<usize> = members
            .iter()
            .map(|&s| it.quotient.lookup(&e.states[s]).expect("covered").0)
            .collect();
        let into = |i: usize| -> Vec<Rational> {
            let mut v = vec![Rational::from_integer(0.into()); it.quotient.len()];
            for (j, p) in &chain.rows[i] {
                v[block_of[*j]] += p;
            }
            v
        };
        let n = members.len();
        let mut checked = 0;
        let mut tries = 0;
        while checked < samples && tries < samples * 50 && n > 1 {
            tries += 1;
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i == j || block_of[i] != block_of[j] {
                continue;
            }
            checked += 1;
            if chain.cost[i] != chain.cost[j] || into(i) != into(j) {
                return Err(format!(
                    "iteration {k}: block {} is not a bisimulation class",
                    block_of[i]
                ));
            }
        }
    }
    Ok(())
}
