use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pamdp_core::lattice::{Antichain, Grid, PseudoAntichain, PseudoElement};
use pamdp_core::mdp::SymbolicMdp;
use pamdp_core::oracle::{self, DEFAULT_CAP};
use pamdp_core::solver::{self, SolveOptions};
use pamdp_core::strips::{generate, StripsMdp};

fn model(spec: &str) -> StripsMdp {
    StripsMdp::new(generate(spec).unwrap()).unwrap()
}

fn pa_algebra(c: &mut Criterion) {
    let grid = Grid::new(3, 8);
    let p = |x: [u16; 3]| grid.point(&x);
    let pe =
        |x, alpha: &[[u16; 3]]| PseudoElement::make(p(x), Antichain::maximal(alpha.iter().map(|a| p(*a)))).unwrap();
    let a = PseudoAntichain::from_elements([pe([8, 4, 6], &[[3, 3, 3], [8, 1, 0]]), pe([2, 8, 8], &[[2, 2, 2]])]);
    let b = PseudoAntichain::from_elements([pe([6, 6, 6], &[[1, 5, 2]]), pe([8, 8, 2], &[[4, 4, 1], [0, 8, 2]])]);
    c.bench_function("pa_difference_grid3", |bench| {
        bench.iter(|| black_box(&a).difference(black_box(&b)))
    });
    c.bench_function("pa_intersect_grid3", |bench| {
        bench.iter(|| black_box(&a).intersect(black_box(&b)))
    });
}

fn proper_states(c: &mut Criterion) {
    let m = model("monkey:2,3");
    let goal = m.goal().unwrap();
    c.bench_function("proper_states_monkey_2_3", |bench| {
        bench.iter(|| solver::proper_states(&SymbolicMdp::new(&m), black_box(&goal)))
    });
}

fn ssp(c: &mut Criterion) {
    let mut group = c.benchmark_group("ssp");
    group.sample_size(10);
    for spec in ["monkey:1,2", "monkey:2,3", "moats:2,3"] {
        let m = model(spec);
        let goal = m.goal().unwrap();
        group.bench_with_input(BenchmarkId::new("symblicit", spec), &m, |bench, m| {
            bench.iter(|| solver::solve_ssp_symblicit(m, &goal, &SolveOptions::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("explicit", spec), &m, |bench, m| {
            bench.iter(|| {
                let e = oracle::enumerate(m, Some(&goal), DEFAULT_CAP).unwrap();
                oracle::explicit_ssp(&e, &SolveOptions::default()).unwrap()
            })
        });
    }
    group.finish();
}

fn emp(c: &mut Criterion) {
    let mut group = c.benchmark_group("emp");
    group.sample_size(10);
    for spec in ["random:3,emp", "random:11,emp"] {
        let m = model(spec);
        group.bench_with_input(BenchmarkId::new("symblicit", spec), &m, |bench, m| {
            bench.iter(|| solver::solve_emp_symblicit(m, &SolveOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pa_algebra, proper_states, ssp, emp);
criterion_main!(benches);
