//! Small random instances for oracle tests and benchmarks.
//!
//! All rates, times and demands are small integers and reliabilities are
//! multiples of 1/8, so every objective coefficient is exactly representable
//! and exact-equality comparisons between solvers are meaningful.

use std::collections::BTreeMap;

use rand::Rng;

use crate::instance::{DemandNode, DisruptionModel, GlobalParams, Instance, Station, VehicleType};
use crate::reliability::{EstimationMethod, ReliabilityEstimates, StationEstimate};
use crate::rng::stream_rng;

/// Stream key for toy generation, disjoint from station ids and the
/// synthetic generator.
const TOY_STREAM: u64 = 0x746f_795f_0000_0001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyConfig {
    pub max_stations: usize,
    pub max_nodes: usize,
    pub max_types: usize,
    pub max_demand: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self { max_stations: 3, max_nodes: 4, max_types: 2, max_demand: 3 }
    }
}

/// A random toy instance and matching dyadic reliability estimates.
pub fn toy_problem(seed: u64, cfg: &ToyConfig) -> (Instance, ReliabilityEstimates) {
    let mut rng = stream_rng(seed, TOY_STREAM);
    let n_j = rng.random_range(1..=cfg.max_stations);
    let n_i = rng.random_range(1..=cfg.max_nodes);
    let n_k = rng.random_range(1..=cfg.max_types);

    let vehicle_types: Vec<VehicleType> = (0..n_k)
        .map(|k| VehicleType {
            id: k as u32 + 1,
            energy_per_charge: f64::from(rng.random_range(2..=9u32)),
            charge_time: f64::from(rng.random_range(10..=30u32)),
        })
        .collect();
    let stations: Vec<Station> = (0..n_j)
        .map(|j| Station {
            id: j as u32 + 1,
            daily_cost: f64::from(rng.random_range(0..=60u32)),
            max_connectors: rng.random_range(1..=3),
            connector_throughput: 120.0,
            disruption: DisruptionModel::gaussian(0.0, 1.0, 2.0),
        })
        .collect();
    let demand_nodes: Vec<DemandNode> = (0..n_i)
        .map(|i| {
            let demand: BTreeMap<u32, u64> =
                vehicle_types.iter().map(|vt| (vt.id, rng.random_range(0..=cfg.max_demand))).collect();
            DemandNode { id: i as u32 + 1, demand }
        })
        .collect();
    let travel_time: Vec<Vec<f64>> =
        (0..n_i).map(|_| (0..n_j).map(|_| f64::from(rng.random_range(0..=36u32))).collect()).collect();
    let params = GlobalParams {
        price_rate: f64::from(rng.random_range(1..=8u32)),
        penalty_rate: f64::from(rng.random_range(0..=2u32)),
        connector_cost: f64::from(rng.random_range(0..=20u32)),
        max_stations: rng.random_range(1..=n_j as u32),
        max_travel_time: 30.0,
        min_service_level: [0.5, 0.625, 0.75][rng.random_range(0..3)],
        big_m: 1000.0,
    };
    let estimates = ReliabilityEstimates {
        method: EstimationMethod::Analytic,
        n: 0,
        seed: Some(seed),
        rho: None,
        stations: stations
            .iter()
            .map(|s| StationEstimate {
                station_id: s.id,
                p_hat: f64::from(rng.random_range(4..=8u32)) / 8.0,
                standard_error: 0.0,
                cv_coefficient: None,
            })
            .collect(),
        note: Some("toy dyadic reliabilities".into()),
    };
    let mut provenance = BTreeMap::new();
    provenance.insert("source".into(), "toy".into());
    provenance.insert("seed".into(), seed.to_string());
    (Instance { stations, demand_nodes, vehicle_types, travel_time, params, provenance }, estimates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;

    #[test]
    fn toys_are_valid_and_reproducible() {
        for seed in 0..50 {
            let (a, ea) = toy_problem(seed, &ToyConfig::default());
            let (b, eb) = toy_problem(seed, &ToyConfig::default());
            assert_eq!(a, b);
            assert_eq!(ea, eb);
            assert!(!validate_instance(&a).has_violations(), "seed {seed}");
            assert!(a.num_stations() <= 3 && a.num_nodes() <= 4 && a.num_types() <= 2);
        }
    }
}
