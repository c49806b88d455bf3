use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use pamdp_core::lattice::{CondSet, Domain, PaRecord};
use pamdp_core::mdp::{ActionId, MonotonicMdp};
use pamdp_core::numeric::Arith;
use pamdp_core::oracle::{self, ExplicitMdp};
use pamdp_core::rational::Rational;
use pamdp_core::solver::{self, Direction, SolveOptions};
use pamdp_core::strips::{generate, StripsMdp};
use pamdp_core::Error;

use crate::model::Source;
use crate::report::{self, BlockValue, CompareReport, EngineSummary, ModelInfo, SolveReport, StrategyRecord, Timings};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Objective {
    Ssp,
    Emp,
}

impl Objective {
    fn name(self) -> &'static str {
        match self {
            Objective::Ssp => "ssp",
            Objective::Emp => "emp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    Symblicit,
    Explicit,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub objective: Objective,
    pub arith: Arith,
    pub direction: Direction,
    pub timeout: Option<Duration>,
    pub max_iter: usize,
    pub cap: u128,
    pub timings: bool,
    pub verbose: u8,
}

impl Config {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            arith: self.arith,
            direction: self.direction,
            max_iter: self.max_iter,
            deadline: self.timeout.map(|t| Instant::now() + t),
            keep_history: false,
        }
    }

    fn arith_name(&self) -> &'static str {
        match self.arith {
            Arith::Exact => "exact",
            Arith::Float => "float",
        }
    }

    fn direction_name(&self) -> &'static str {
        match self.direction {
            Direction::Minimize => "min",
            Direction::Maximize => "max",
        }
    }
}

fn model_info(source: &Source, m: &StripsMdp) -> ModelInfo {
    ModelInfo {
        source: source.describe(),
        conditions: m.mss().conditions.len(),
        operators: m.mss().operators.len(),
        states: oracle::state_bound(m),
    }
}

fn goal_of(m: &StripsMdp) -> Result<pamdp_core::lattice::PseudoAntichain<CondSet>, CliError> {
    let goal = m
        .goal()
        .ok_or_else(|| Error::Validation("the ssp objective needs a goal in the model".into()))?;
    if goal.is_empty() {
        return Err(CliError::Unsolvable("no goal state survives pruning".into()));
    }
    Ok(goal)
}

fn not_proper(m: &StripsMdp) -> CliError {
    CliError::Unsolvable(format!("initial state {} is not proper", m.domain().render(&m.init())))
}

/// A single state as a pseudo-element: `↓s` minus its lower covers.
fn state_record(m: &StripsMdp, s: CondSet) -> PaRecord {
    let dom = m.domain();
    let free = dom.full().minus(s);
    PaRecord {
        max: dom.render(&s),
        excluded: free
            .indices()
            .map(|p| dom.render(&s.union(CondSet::from_indices([p]))))
            .collect(),
    }
}

fn explicit_strategy(
    m: &StripsMdp,
    e: &ExplicitMdp<CondSet>,
    choice: impl Fn(usize) -> Option<ActionId>,
) -> Vec<StrategyRecord> {
    let mut by: BTreeMap<ActionId, Vec<PaRecord>> = BTreeMap::new();
    for (i, s) in e.states.iter().enumerate() {
        if let Some(a) = choice(i) {
            by.entry(a).or_default().push(state_record(m, *s));
        }
    }
    by.into_iter()
        .map(|(a, block)| StrategyRecord {
            block,
            action: m.action_name(a),
        })
        .collect()
}

fn symbolic_strategy(m: &StripsMdp, r: &solver::SolveReport<CondSet>) -> Vec<StrategyRecord> {
    r.strategy
        .blocks()
        .iter()
        .map(|(b, a)| StrategyRecord {
            block: b.records(m.domain()),
            action: m.action_name(*a),
        })
        .collect()
}

fn symbolic_blocks(m: &StripsMdp, r: &solver::SolveReport<CondSet>, arith: Arith) -> Vec<BlockValue> {
    r.quotient
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, (b, _))| BlockValue {
            block: b.records(m.domain()),
            value: report::value(&r.values[i], arith),
            bias: r.bias.as_ref().map(|bias| report::value(&bias[i], arith)),
        })
        .collect()
}

fn timings(r: &solver::SolveReport<CondSet>) -> Timings {
    Timings {
        setup_ms: report::ms(r.setup),
        lump_ms: report::ms(r.lump_time()),
        syst_ms: report::ms(r.solve_time()),
        impr_ms: report::ms(r.improve_time()),
        total_ms: report::ms(r.total),
    }
}

fn symblicit(cfg: &Config, m: &StripsMdp) -> Result<solver::SolveReport<CondSet>, CliError> {
    let opts = cfg.options();
    let r = match cfg.objective {
        Objective::Ssp => solver::solve_ssp_symblicit(m, &goal_of(m)?, &opts)?,
        Objective::Emp => solver::solve_emp_symblicit(m, &opts)?,
    };
    if cfg.verbose >= 2 {
        eprintln!("it\tblocks\tquotient\tsplitters\tlump_ms\tsyst_ms\timpr_ms");
        for (k, s) in r.stats.iter().enumerate() {
            eprintln!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                k + 1,
                s.strategy_blocks,
                s.quotient_blocks,
                s.splitters,
                report::ms(s.lump),
                report::ms(s.solve),
                report::ms(s.improve)
            );
        }
    }
    Ok(r)
}

pub fn solve(cfg: &Config, engine: Engine, source: &Source, m: &StripsMdp) -> Result<SolveReport, CliError> {
    let init = m.init();
    let base = |value: String, bias: Option<String>, iterations: usize| SolveReport {
        objective: cfg.objective.name(),
        engine: match engine {
            Engine::Symblicit => "symblicit",
            Engine::Explicit => "explicit",
        },
        arith: cfg.arith_name(),
        direction: cfg.direction_name(),
        model: model_info(source, m),
        initial_state: m.domain().render(&init),
        value,
        bias,
        iterations,
        max_quotient: None,
        timings: None,
        blocks: Vec::new(),
        strategy: Vec::new(),
    };
    match engine {
        Engine::Symblicit => {
            let r = symblicit(cfg, m)?;
            let value = r.value_of(&init).ok_or_else(|| not_proper(m))?;
            let bias = r.bias_of(&init).map(|b| report::value(b, cfg.arith));
            let mut out = base(report::value(value, cfg.arith), bias, r.iterations);
            out.max_quotient = Some(r.max_quotient());
            out.timings = cfg.timings.then(|| timings(&r));
            out.blocks = symbolic_blocks(m, &r, cfg.arith);
            out.strategy = symbolic_strategy(m, &r);
            Ok(out)
        }
        Engine::Explicit => {
            let opts = cfg.options();
            let start = Instant::now();
            match cfg.objective {
                Objective::Ssp => {
                    let e = oracle::enumerate(m, Some(&goal_of(m)?), cfg.cap)?;
                    let ex = oracle::explicit_ssp(&e, &opts)?;
                    let i = e.index_of(&init).ok_or_else(|| not_proper(m))?;
                    let v = ex.values[i].as_ref().ok_or_else(|| not_proper(m))?;
                    let mut out = base(report::value(v, cfg.arith), None, ex.iterations);
                    out.timings = cfg.timings.then(|| explicit_timings(start.elapsed()));
                    out.strategy = explicit_strategy(m, &e, |i| ex.strategy[i]);
                    Ok(out)
                }
                Objective::Emp => {
                    let e = oracle::enumerate(m, None, cfg.cap)?;
                    let ex = oracle::explicit_emp(m, &e, &opts)?;
                    let i = e.index_of(&init).ok_or_else(|| not_proper(m))?;
                    let mut out = base(
                        report::value(&ex.gain[i], cfg.arith),
                        Some(report::value(&ex.bias[i], cfg.arith)),
                        ex.iterations,
                    );
                    out.timings = cfg.timings.then(|| explicit_timings(start.elapsed()));
                    out.strategy = explicit_strategy(m, &e, |i| Some(ex.strategy[i]));
                    Ok(out)
                }
            }
        }
    }
}

fn explicit_timings(total: Duration) -> Timings {
    Timings {
        setup_ms: 0.0,
        lump_ms: 0.0,
        syst_ms: 0.0,
        impr_ms: 0.0,
        total_ms: report::ms(total),
    }
}

/// Run both engines and compare their values state by state.
pub fn compare(cfg: &Config, source: &Source, m: &StripsMdp) -> Result<CompareReport, CliError> {
    if cfg.arith != Arith::Exact {
        return Err(CliError::Usage(
            "compare checks exact equality and needs --arith exact".into(),
        ));
    }
    let r = symblicit(cfg, m)?;
    let symbolic = EngineSummary {
        iterations: r.iterations,
        max_quotient: Some(r.max_quotient()),
        total_ms: cfg.timings.then(|| report::ms(r.total)),
    };
    let mut out = CompareReport {
        objective: cfg.objective.name(),
        model: model_info(source, m),
        agree: true,
        first_mismatch: None,
        compared: 0,
        symblicit: symbolic,
        explicit: None,
        notice: None,
    };
    let goal = match cfg.objective {
        Objective::Ssp => Some(goal_of(m)?),
        Objective::Emp => None,
    };
    let e = match oracle::enumerate(m, goal.as_ref(), cfg.cap) {
        Ok(e) => e,
        Err(err @ Error::EnumerationCap { .. }) => {
            out.notice = Some(format!("explicit engine skipped: {err}"));
            return Ok(out);
        }
        Err(err) => return Err(err.into()),
    };
    let opts = cfg.options();
    let start = Instant::now();
    let dom = m.domain();
    let mut mismatch = None;
    let mut note = |msg: String| {
        if mismatch.is_none() {
            mismatch = Some(msg);
        }
    };
    let explicit_iterations;
    match cfg.objective {
        Objective::Ssp => {
            let ex = oracle::explicit_ssp(&e, &opts)?;
            explicit_iterations = ex.iterations;
            let proper = r.proper.as_ref().expect("ssp reports carry proper states");
            for (i, s) in e.states.iter().enumerate() {
                let state = dom.render(s);
                if proper.contains(s) != ex.proper[i] {
                    note(format!("state {state}: proper sets differ"));
                    continue;
                }
                if let Some(v) = &ex.values[i] {
                    out.compared += 1;
                    if r.value_of(s) != Some(v) {
                        note(format!("state {state}: {} vs {v}", fmt_opt(r.value_of(s))));
                    }
                }
            }
        }
        Objective::Emp => {
            let ex = oracle::explicit_emp(m, &e, &opts)?;
            explicit_iterations = ex.iterations;
            for (i, s) in e.states.iter().enumerate() {
                out.compared += 1;
                if r.value_of(s) != Some(&ex.gain[i]) {
                    note(format!(
                        "state {}: gain {} vs {}",
                        dom.render(s),
                        fmt_opt(r.value_of(s)),
                        ex.gain[i]
                    ));
                }
            }
        }
    }
    out.explicit = Some(EngineSummary {
        iterations: explicit_iterations,
        max_quotient: None,
        total_ms: cfg.timings.then(|| report::ms(start.elapsed())),
    });
    out.agree = mismatch.is_none();
    out.first_mismatch = mismatch;
    Ok(out)
}

fn fmt_opt(v: Option<&Rational>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

/// A generator family with two parameter ranges, e.g. `monkey:1-2,2-3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub family: String,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

fn parse_range(s: &str) -> Option<Vec<usize>> {
    match s.split_once('-') {
        Some((lo, hi)) => {
            let (lo, hi): (usize, usize) = (lo.trim().parse().ok()?, hi.trim().parse().ok()?);
            (lo <= hi).then(|| (lo..=hi).collect())
        }
        None => Some(vec![s.trim().parse().ok()?]),
    }
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad grid `{s}`; expected e.g. monkey:1-2,2-3");
        let (family, params) = s.split_once(':').ok_or_else(bad)?;
        let (a, b) = params.split_once(',').ok_or_else(bad)?;
        Ok(Grid {
            family: family.trim().to_string(),
            first: parse_range(a).ok_or_else(bad)?,
            second: parse_range(b).ok_or_else(bad)?,
        })
    }
}

pub const BENCH_HEADER: [&str; 9] = [
    "model", "params", "states", "it", "quotient", "lump", "syst", "impr", "total",
];

/// One row per grid cell, in grid order; times in seconds, `TO` on timeout.
pub fn bench(cfg: &Config, grid: &Grid) -> Result<String, CliError> {
    let mut out = BENCH_HEADER.join("\t");
    out.push('\n');
    for a in &grid.first {
        for b in &grid.second {
            let spec = format!("{}:{a},{b}", grid.family);
            let m = StripsMdp::new(generate(&spec)?)?;
            let mut cells = vec![
                grid.family.clone(),
                format!("({a},{b})"),
                oracle::state_bound(&m).to_string(),
            ];
            match symblicit(cfg, &m) {
                Ok(r) => {
                    let secs = |d: Duration| format!("{:.3}", d.as_secs_f64());
                    cells.extend([
                        r.iterations.to_string(),
                        r.max_quotient().to_string(),
                        secs(r.lump_time()),
                        secs(r.solve_time()),
                        secs(r.improve_time()),
                        secs(r.total),
                    ]);
                }
                Err(CliError::Core(Error::Timeout)) => cells.extend(std::iter::repeat_n("TO".to_string(), 6)),
                Err(e) => return Err(e),
            }
            if cfg.verbose >= 1 {
                eprintln!("{spec} done");
            }
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "monkey:1-2,2-3".parse().unwrap();
        assert_eq!(g.first, vec![1, 2]);
        assert_eq!(g.second, vec![2, 3]);
        let g: Grid = "moats:2,3".parse().unwrap();
        assert_eq!((g.first, g.second), (vec![2], vec![3]));
        assert!("monkey:2-1,3".parse::<Grid>().is_err());
        assert!("monkey".parse::<Grid>().is_err());
    }
}
