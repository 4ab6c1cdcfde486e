use chargesite::evaluation::{evaluate_on_scenarios, scenario_breakdowns};
use chargesite::model::model_objective;
use chargesite::reliability::DEFAULT_RHO;
use chargesite::*;

fn robust_decision() -> (Instance, SolutionSummary) {
    let inst = generate_synthetic_demand(&embedded_surabaya_parameters(), &SyntheticConfig::default(), 42).unwrap();
    let est = estimate_reliabilities(&inst, 2000, 7, EstimationMethod::Cv, DEFAULT_RHO).unwrap();
    let opts = BuildOptions { vehicle_reliability_rows: false, ..BuildOptions::default() };
    let out = solve_variant(&inst, &est, Variant::Robust, opts, &BnBConfig::default()).unwrap();
    (inst, out.solution.unwrap())
}

#[test]
fn scenario_objectives_decompose() {
    let (inst, sol) = robust_decision();
    check_solution(&inst, &sol).unwrap();
    let set = sample_paired_scenarios(&inst, 1000, 1001, DEFAULT_RHO).unwrap();
    let parts = scenario_breakdowns(&inst, &sol, &set, 1000).unwrap();
    assert_eq!(parts.len(), 1000);
    for (l, b) in parts.iter().enumerate() {
        let up: Vec<u8> = set.stations.iter().map(|s| s.z_indicators[l]).collect();
        let rel: Vec<f64> = up.iter().map(|&u| f64::from(u)).collect();
        assert_eq!(b.revenue - b.penalty - b.cost, model_objective(&inst, &rel, &sol), "scenario {l}");
        assert_eq!(*b, decompose_objective(&inst, &sol, &up).unwrap());
    }

    let all_up = decompose_objective(&inst, &sol, &vec![1; inst.num_stations()]).unwrap();
    assert_eq!(all_up.penalty, 0.0);
    assert_eq!(all_up.objective(), model_objective(&inst, &vec![1.0; inst.num_stations()], &sol));
    let all_down = decompose_objective(&inst, &sol, &vec![0; inst.num_stations()]).unwrap();
    assert_eq!(all_down.revenue, 0.0);
    assert_eq!(all_down.cost, all_up.cost);
    assert!(all_down.objective() < 0.0);
}

#[test]
fn cv_and_mc_evaluations_agree() {
    let (inst, sol) = robust_decision();
    let set = sample_paired_scenarios(&inst, 20_000, 4242, DEFAULT_RHO).unwrap();
    let mc = evaluate_on_scenarios(&inst, &sol, &set, EstimationMethod::Mc).unwrap();
    let cv = evaluate_on_scenarios(&inst, &sol, &set, EstimationMethod::Cv).unwrap();
    assert!(cv.se_objective < mc.se_objective / 5.0, "{} vs {}", cv.se_objective, mc.se_objective);
    assert!((cv.mean_objective - mc.mean_objective).abs() <= 4.0 * mc.se_objective);
    for r in [&mc, &cv] {
        assert!((r.mean_revenue - r.mean_penalty - r.fixed_cost - r.mean_objective).abs() <= 1e-6 * r.mean_objective.abs());
    }
    // The exact expectation uses the true reliabilities.
    let truth: Vec<f64> = inst.stations.iter().map(|s| analytic_reliability(&s.disruption).unwrap()).collect();
    let expected = model_objective(&inst, &truth, &sol);
    assert!((cv.mean_objective - expected).abs() <= 4.0 * cv.se_objective, "{} vs {expected}", cv.mean_objective);
    assert!(evaluate_on_scenarios(&inst, &sol, &set, EstimationMethod::Analytic).is_err());
}

#[test]
fn evaluation_is_reproducible() {
    let (inst, sol) = robust_decision();
    let a = evaluate_solution(&inst, &sol, 3000, 1001, EstimationMethod::Cv, DEFAULT_RHO).unwrap();
    let b = evaluate_solution(&inst, &sol, 3000, 1001, EstimationMethod::Cv, DEFAULT_RHO).unwrap();
    assert_eq!(a, b);
    let c = evaluate_solution(&inst, &sol, 3000, 1002, EstimationMethod::Cv, DEFAULT_RHO).unwrap();
    assert_ne!(a.mean_objective, c.mean_objective);
}
