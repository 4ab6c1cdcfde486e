//! Seeded synthetic demand and travel-time data.
//!
//! Stations and demand nodes are scattered uniformly in a rectangle; travel
//! time is Euclidean distance times a constant pace, rounded to whole minutes.
//! Raw per-node demands are drawn, then rescaled so the total charge-minutes
//! hit a target fraction of system capacity without exceeding it.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{validate_instance, BaseInstance, DemandNode, Instance};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, GENERATOR_STREAM};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub node_count: usize,
    /// Target `Σ t_k w_i^k / Σ c_j q_j`, in (0, 1].
    pub utilization_target: f64,
    /// Width and height of the placement rectangle, in distance units.
    pub coordinate_box: (f64, f64),
    /// Minutes of travel per distance unit.
    pub speed: f64,
    /// Every node must reach at least this many stations within `d_max`.
    pub min_coverage: usize,
    pub max_retries: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            node_count: 31,
            utilization_target: 0.6,
            coordinate_box: (25.0, 25.0),
            speed: 2.0,
            min_coverage: 2,
            max_retries: 1000,
        }
    }
}

impl SyntheticConfig {
    fn check(&self, base: &BaseInstance) -> Result<()> {
        if !(self.utilization_target > 0.0 && self.utilization_target <= 1.0) {
            return Err(Error::InvalidArgument {
                name: "utilization_target",
                reason: format!("{} is outside (0, 1]", self.utilization_target),
            });
        }
        if self.node_count == 0 {
            return Err(Error::InvalidArgument { name: "node_count", reason: "must be positive".into() });
        }
        let (w, h) = self.coordinate_box;
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
            return Err(Error::InvalidArgument {
                name: "coordinate_box",
                reason: format!("{w} x {h} is not a positive box"),
            });
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::InvalidArgument { name: "speed", reason: "must be positive".into() });
        }
        if self.min_coverage > base.stations.len() {
            return Err(Error::InvalidArgument {
                name: "min_coverage",
                reason: format!("{} exceeds the {} stations", self.min_coverage, base.stations.len()),
            });
        }
        if self.max_retries == 0 {
            return Err(Error::InvalidArgument { name: "max_retries", reason: "must be positive".into() });
        }
        Ok(())
    }
}

type Point = (f64, f64);

fn draw_point(rng: &mut impl Rng, (w, h): (f64, f64)) -> Point {
    (rng.random::<f64>() * w, rng.random::<f64>() * h)
}

/// Fills in demand nodes and travel times for a base parameter set.
pub fn generate_synthetic_demand(
    base: &BaseInstance,
    config: &SyntheticConfig,
    seed: u64,
) -> Result<Instance> {
    config.check(base)?;
    let report = validate_instance(&Instance {
        stations: base.stations.clone(),
        demand_nodes: vec![DemandNode { id: 1, demand: BTreeMap::new() }],
        vehicle_types: base.vehicle_types.clone(),
        travel_time: vec![vec![0.0; base.stations.len()]],
        params: base.params.clone(),
        provenance: BTreeMap::new(),
    });
    if report.has_violations() {
        return Err(Error::Validation(report));
    }

    let mut rng = stream_rng(seed, GENERATOR_STREAM);
    let d_max = base.params.max_travel_time;
    let n_nodes = config.node_count;

    let mut placed = None;
    let mut worst_node = 0u32;
    for _ in 0..config.max_retries {
        let stations: Vec<Point> =
            base.stations.iter().map(|_| draw_point(&mut rng, config.coordinate_box)).collect();
        let nodes: Vec<Point> = (0..n_nodes).map(|_| draw_point(&mut rng, config.coordinate_box)).collect();
        let travel: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&(nx, ny)| {
                stations
                    .iter()
                    .map(|&(sx, sy)| ((nx - sx).hypot(ny - sy) * config.speed).round())
                    .collect()
            })
            .collect();
        match travel
            .iter()
            .position(|row| row.iter().filter(|&&d| d <= d_max).count() < config.min_coverage)
        {
            Some(i) => worst_node = i as u32 + 1,
            None => {
                placed = Some(travel);
                break;
            }
        }
    }
    let travel_time = placed
        .ok_or(Error::RetryExhausted { node: worst_node, attempts: config.max_retries })?;

    // Raw demand: a node size shared by all vehicle types, thinned for each
    // further type (type 1 is the most common).
    let n_types = base.vehicle_types.len();
    let mut raw = vec![vec![0.0; n_types]; n_nodes];
    for row in raw.iter_mut() {
        let size = 0.2 + 0.8 * rng.random::<f64>();
        for (k, value) in row.iter_mut().enumerate() {
            *value = size * (0.5 + rng.random::<f64>()) / (k + 1) as f64;
        }
    }

    let capacity: f64 =
        base.stations.iter().map(|s| s.connector_throughput * f64::from(s.max_connectors)).sum();
    let target = (config.utilization_target * capacity).floor();
    let raw_minutes: f64 = raw
        .iter()
        .map(|row| row.iter().zip(&base.vehicle_types).map(|(r, vt)| r * vt.charge_time).sum::<f64>())
        .sum();
    let scale = target / raw_minutes;

    let mut counts = vec![vec![0u64; n_types]; n_nodes];
    let mut remainders = Vec::with_capacity(n_nodes * n_types);
    let mut used = 0.0;
    for i in 0..n_nodes {
        for k in 0..n_types {
            let scaled = raw[i][k] * scale;
            let whole = scaled.floor();
            counts[i][k] = whole as u64;
            used += whole * base.vehicle_types[k].charge_time;
            remainders.push((scaled - whole, i, k));
        }
    }
    // Largest remainders first; stable on (node, type) for equal remainders.
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    for &(_, i, k) in &remainders {
        let t = base.vehicle_types[k].charge_time;
        if used + t <= target {
            counts[i][k] += 1;
            used += t;
        }
    }

    let demand_nodes = counts
        .iter()
        .enumerate()
        .map(|(i, row)| DemandNode {
            id: i as u32 + 1,
            demand: row.iter().zip(&base.vehicle_types).map(|(&c, vt)| (vt.id, c)).collect(),
        })
        .collect();

    let provenance = BTreeMap::from([
        ("source".to_string(), "synthetic".to_string()),
        ("seed".to_string(), seed.to_string()),
        ("node_count".to_string(), n_nodes.to_string()),
        ("utilization_target".to_string(), config.utilization_target.to_string()),
        (
            "coordinate_box".to_string(),
            format!("{}x{}", config.coordinate_box.0, config.coordinate_box.1),
        ),
        ("speed".to_string(), config.speed.to_string()),
        ("min_coverage".to_string(), config.min_coverage.to_string()),
    ]);

    Ok(Instance {
        stations: base.stations.clone(),
        demand_nodes,
        vehicle_types: base.vehicle_types.clone(),
        travel_time,
        params: base.params.clone(),
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{embedded_surabaya_parameters, instance_to_json};

    #[test]
    fn respects_utilization_budget() {
        let base = embedded_surabaya_parameters();
        let inst = generate_synthetic_demand(&base, &SyntheticConfig::default(), 42).unwrap();
        assert_eq!(inst.num_stations(), 11);
        assert_eq!(inst.num_nodes(), 31);
        assert_eq!(inst.num_types(), 2);
        assert_eq!(inst.system_capacity(), 126720.0);
        let used = inst.required_charge_minutes();
        assert!(used <= 76032.0, "{used}");
        // rounding loses less than one car's worth of minutes
        assert!(used > 76032.0 - 39.0, "{used}");
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let base = embedded_surabaya_parameters();
        let cfg = SyntheticConfig::default();
        let a = instance_to_json(&generate_synthetic_demand(&base, &cfg, 42).unwrap());
        let b = instance_to_json(&generate_synthetic_demand(&base, &cfg, 42).unwrap());
        let c = instance_to_json(&generate_synthetic_demand(&base, &cfg, 43).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn full_utilization_has_no_capacity_flag() {
        let base = embedded_surabaya_parameters();
        let cfg = SyntheticConfig { utilization_target: 1.0, ..SyntheticConfig::default() };
        let inst = generate_synthetic_demand(&base, &cfg, 5).unwrap();
        assert!(inst.required_charge_minutes() <= inst.system_capacity());
        assert!(validate_instance(&inst).capacity.is_none());
    }

    #[test]
    fn rejects_bad_utilization() {
        let base = embedded_surabaya_parameters();
        for u in [0.0, 1.5, f64::NAN] {
            let cfg = SyntheticConfig { utilization_target: u, ..SyntheticConfig::default() };
            assert!(matches!(
                generate_synthetic_demand(&base, &cfg, 1),
                Err(Error::InvalidArgument { name: "utilization_target", .. })
            ));
        }
    }

    #[test]
    fn coverage_requirement_and_exhaustion() {
        let base = embedded_surabaya_parameters();
        let inst = generate_synthetic_demand(&base, &SyntheticConfig::default(), 42).unwrap();
        for row in &inst.travel_time {
            assert!(row.iter().filter(|&&d| d <= 35.0).count() >= 2);
            assert!(row.iter().all(|d| d.fract() == 0.0));
        }
        // A huge box with fast-growing travel times cannot cover every node.
        let cfg = SyntheticConfig {
            coordinate_box: (1e4, 1e4),
            max_retries: 5,
            ..SyntheticConfig::default()
        };
        assert!(matches!(
            generate_synthetic_demand(&base, &cfg, 1),
            Err(Error::RetryExhausted { attempts: 5, .. })
        ));
    }
}
