use chargesite::model::presolve_problem;
use chargesite::toy::{toy_problem, ToyConfig};
use chargesite::solver::DEFAULT_ENUMERATION_LIMIT;
use chargesite::*;

const SEEDS: u64 = 60;
const FEASIBLE_TOYS: usize = 50;
const MAX_SEEDS: u64 = 400;

fn options(fix_y_to_x: bool) -> BuildOptions {
    BuildOptions { fix_y_to_x, ..BuildOptions::default() }
}

fn objective(r: &MipResult) -> Option<f64> {
    match r.status {
        MipStatus::Optimal => r.objective,
        MipStatus::Infeasible => None,
        s => panic!("unexpected status {s:?}"),
    }
}

#[test]
fn branch_and_bound_matches_enumeration() {
    let mut feasible = 0;
    let mut seed = 0;
    while feasible < FEASIBLE_TOYS && seed < MAX_SEEDS {
        let (inst, est) = toy_problem(seed, &ToyConfig::default());
        let mut robust_feasible = false;
        for variant in [Variant::Robust, Variant::NonRobust] {
            let model = build_model(&inst, &est, variant, options(true)).unwrap();
            let pre = presolve(&model);
            let (bnb, brute) = if pre.is_infeasible() {
                (None, None)
            } else {
                let a = solve_mip(&pre.problem, &BnBConfig::default()).unwrap();
                let b = brute_force_mip(&pre.problem, DEFAULT_ENUMERATION_LIMIT).unwrap();
                if let Some(v) = &a.values {
                    let report = verify_solution(&model.problem, &pre.expand(v));
                    assert!(report.is_feasible(1e-6), "seed {seed}: {report:?}");
                    let b_values = b.values.as_ref().unwrap();
                    assert!(verify_solution(&model.problem, &pre.expand(b_values)).is_feasible(1e-6));
                }
                (objective(&a), objective(&b))
            };
            assert_eq!(bnb, brute, "seed {seed} {variant}");
            robust_feasible |= variant == Variant::Robust && bnb.is_some();
        }
        feasible += usize::from(robust_feasible);
        seed += 1;
    }
    assert!(feasible >= FEASIBLE_TOYS, "only {feasible} feasible toys in {seed} seeds");
}

#[test]
fn presolve_does_not_change_optima() {
    for seed in 0..SEEDS {
        let (inst, est) = toy_problem(seed, &ToyConfig::default());
        let with = presolve(&build_model(&inst, &est, Variant::Robust, options(true)).unwrap());
        let without_alias = presolve(&build_model(&inst, &est, Variant::Robust, options(false)).unwrap());
        let raw_model = build_model(&inst, &est, Variant::Robust, options(false)).unwrap();
        let solve = |p: &chargesite::model::Presolved| {
            if p.is_infeasible() {
                None
            } else {
                objective(&solve_mip(&p.problem, &BnBConfig::default()).unwrap())
            }
        };
        let a = solve(&with);
        let b = solve(&without_alias);
        let c = objective(&solve_mip(&raw_model.problem, &BnBConfig::default()).unwrap());
        for other in [b, c] {
            match (a, other) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "seed {seed}: {x} vs {y}"),
                (x, y) => assert_eq!(x, y, "seed {seed}"),
            }
        }
        // The reductions alone (no aliasing) keep the enumeration optimum.
        let plain = presolve_problem(&raw_model.problem, &vec![None; raw_model.problem.num_vars()]);
        if !plain.is_infeasible() {
            assert_eq!(
                objective(&brute_force_mip(&plain.problem, DEFAULT_ENUMERATION_LIMIT).unwrap()),
                a,
                "seed {seed}"
            );
        }
    }
}

#[test]
fn solves_are_deterministic() {
    let (inst, est) = toy_problem(3, &ToyConfig { max_stations: 3, max_nodes: 4, max_types: 2, max_demand: 5 });
    let pre = presolve(&build_model(&inst, &est, Variant::Robust, BuildOptions::default()).unwrap());
    let a = solve_mip(&pre.problem, &BnBConfig::default()).unwrap();
    let b = solve_mip(&pre.problem, &BnBConfig::default()).unwrap();
    assert_eq!((a.values, a.nodes, a.log), (b.values, b.nodes, b.log));
}

#[test]
fn impossible_service_level_is_infeasible() {
    let (mut inst, mut est) = toy_problem(1, &ToyConfig::default());
    inst.params.min_service_level = 1.0;
    for s in &mut est.stations {
        s.p_hat = 0.875;
    }
    let outcome = solve_variant(&inst, &est, Variant::Robust, BuildOptions::default(), &BnBConfig::default()).unwrap();
    assert_eq!(outcome.status, MipStatus::Infeasible);
    assert!(outcome.solution.is_none());
}

#[test]
fn larger_toys_match_enumeration() {
    let cfg = ToyConfig { max_stations: 4, max_nodes: 5, max_types: 2, max_demand: 5 };
    let mut compared = 0;
    for seed in 1000..1040 {
        let (inst, est) = toy_problem(seed, &cfg);
        let model = build_model(&inst, &est, Variant::Robust, BuildOptions::default()).unwrap();
        let pre = presolve(&model);
        if pre.is_infeasible() {
            continue;
        }
        let brute = match brute_force_mip(&pre.problem, 2_000_000) {
            Ok(r) => r,
            Err(Error::EnumerationLimit { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let bnb = solve_mip(&pre.problem, &BnBConfig::default()).unwrap();
        assert_eq!(objective(&bnb), objective(&brute), "seed {seed}");
        compared += 1;
    }
    assert!(compared >= 10, "only {compared} comparisons");
}
