mod common;

use common::*;
use pamdp_core::strips::generate;

#[test]
fn monkey_1_2_matches_oracle() {
    let m = model(generate("monkey:1,2").unwrap()).unwrap();
    let c = check_ssp(&m).unwrap().expect("solvable");
    assert!(c.report.max_quotient() <= 64);
    check_lumping(&c.report, &c.e, &c.explicit.proper, 100, 1).unwrap();
}

#[test]
fn moats_2_2_matches_oracle() {
    let m = model(generate("moats:2,2").unwrap()).unwrap();
    check_ssp(&m).unwrap().expect("solvable");
}

#[test]
fn random_ssp_batch() {
    for seed in 0..40 {
        let Some(m) = model(random_instance(seed, true)) else {
            continue;
        };
        if let Some(c) = check_ssp(&m).unwrap_or_else(|e| panic!("seed {seed}: {e}")) {
            check_lumping(&c.report, &c.e, &c.explicit.proper, 100, seed)
                .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }
}

#[test]
fn random_emp_batch() {
    for seed in 0..40 {
        let Some(m) = model(random_instance(seed, false)) else {
            continue;
        };
        let c = check_emp(&m).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let all = vec![true; c.e.len()];
        check_lumping(&c.report, &c.e, &all, 100, seed).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}

#[test]
fn float_mode_converges_close_to_exact() {
    use pamdp_core::numeric::Arith;
    use pamdp_core::rational::to_f64;
    use pamdp_core::solver::{solve_emp_symblicit, solve_ssp_symblicit, SolveOptions};

    let float = SolveOptions {
        arith: Arith::Float,
        max_iter: 100,
        ..SolveOptions::default()
    };
    for spec in ["monkey:1,2", "moats:2,3"] {
        let m = model(generate(spec).unwrap()).unwrap();
        let goal = m.goal().unwrap();
        let exact = solve_ssp_symblicit(&m, &goal, &SolveOptions::default()).unwrap();
        let approx = solve_ssp_symblicit(&m, &goal, &float).unwrap();
        let (a, b) = (exact.value_of(&m.init()).unwrap(), approx.value_of(&m.init()).unwrap());
        assert!((to_f64(a) - to_f64(b)).abs() < 1e-9, "{spec}: {a} vs {b}");
    }
    for seed in 0..20 {
        let Some(m) = model(random_instance(seed, false)) else {
            continue;
        };
        let exact = solve_emp_symblicit(&m, &SolveOptions::default()).unwrap();
        let approx = solve_emp_symblicit(&m, &float).unwrap();
        let (a, b) = (exact.value_of(&m.init()), approx.value_of(&m.init()));
        if let (Some(a), Some(b)) = (a, b) {
            assert!((to_f64(a) - to_f64(b)).abs() < 1e-9, "seed {seed}: {a} vs {b}");
        }
    }
}
