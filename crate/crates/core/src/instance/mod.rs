//! Problem data: candidate stations, demand nodes, vehicle types, travel
//! times and the global economic parameters.

mod surabaya;
mod synthetic;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use surabaya::embedded_surabaya_parameters;
pub use synthetic::{generate_synthetic_demand, SyntheticConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleType {
    pub id: u32,
    /// kWh per full charge.
    pub energy_per_charge: f64,
    /// Minutes per full charge.
    pub charge_time: f64,
}

/// Distribution family of a station's disruption driver. Only Gaussian is
/// implemented; the tag is kept in the file format for future kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    #[default]
    Gaussian,
}

impl DistributionKind {
    fn is_default(&self) -> bool {
        *self == DistributionKind::Gaussian
    }
}

/// `Z_j ~ N(mean, std_dev²)`; the station is up on a day iff `Z_j ≤ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisruptionModel {
    pub mean: f64,
    pub std_dev: f64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "DistributionKind::is_default")]
    pub distribution: DistributionKind,
}

impl DisruptionModel {
    pub fn gaussian(mean: f64, std_dev: f64, threshold: f64) -> Self {
        Self { mean, std_dev, threshold, distribution: DistributionKind::Gaussian }
    }

    /// Threshold in standard-normal units, `(z - μ) / σ`.
    pub fn scaled_threshold(&self) -> f64 {
        (self.threshold - self.mean) / self.std_dev
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub id: u32,
    /// Operating plus investment cost per day when opened.
    pub daily_cost: f64,
    pub max_connectors: u32,
    /// Charging minutes per connector per day.
    pub connector_throughput: f64,
    pub disruption: DisruptionModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandNode {
    pub id: u32,
    /// Vehicle count keyed by vehicle type id.
    pub demand: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalParams {
    /// Electricity price per kWh.
    pub price_rate: f64,
    /// Penalty per minute of travel per unserved vehicle.
    pub penalty_rate: f64,
    /// Daily cost of one connector.
    pub connector_cost: f64,
    pub max_stations: u32,
    /// Minutes.
    pub max_travel_time: f64,
    pub min_service_level: f64,
    pub big_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub stations: Vec<Station>,
    pub demand_nodes: Vec<DemandNode>,
    pub vehicle_types: Vec<VehicleType>,
    /// Minutes, row-major: one row per demand node, one column per station.
    pub travel_time: Vec<Vec<f64>>,
    pub params: GlobalParams,
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

/// Stations, vehicle types and parameters without demand or travel data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseInstance {
    pub stations: Vec<Station>,
    pub vehicle_types: Vec<VehicleType>,
    pub params: GlobalParams,
}

impl Instance {
    pub fn num_stations(&self) -> usize {
        self.stations.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.demand_nodes.len()
    }

    pub fn num_types(&self) -> usize {
        self.vehicle_types.len()
    }

    /// `w_i^k` by positional indices.
    pub fn demand(&self, node: usize, vtype: usize) -> u64 {
        let id = self.vehicle_types[vtype].id;
        self.demand_nodes[node].demand.get(&id).copied().unwrap_or(0)
    }

    /// Total charge-minutes requested, `Σ_i Σ_k t_k w_i^k`.
    pub fn required_charge_minutes(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.num_nodes() {
            for (k, vt) in self.vehicle_types.iter().enumerate() {
                total += vt.charge_time * self.demand(i, k) as f64;
            }
        }
        total
    }

    /// Total connector-minutes available, `Σ_j c_j q_j`.
    pub fn system_capacity(&self) -> f64 {
        self.stations.iter().map(|s| s.connector_throughput * f64::from(s.max_connectors)).sum()
    }

    pub fn base(&self) -> BaseInstance {
        BaseInstance {
            stations: self.stations.clone(),
            vehicle_types: self.vehicle_types.clone(),
            params: self.params.clone(),
        }
    }

    /// SHA-256 of the canonical compact JSON encoding, hex encoded.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("instance serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityShortfall {
    pub required_minutes: f64,
    pub available_minutes: f64,
}

/// Invariant violations plus the (non-fatal) system capacity flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub capacity: Option<CapacityShortfall>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty() && self.capacity.is_none()
    }

    pub fn has_violations(&self) -> bool {
        !self.violations.is_empty()
    }

    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { field: field.into(), message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.violations {
            if !first {
                f.write_str("; ")?;
            }
            write!(f, "`{}` {}", v.field, v.message)?;
            first = false;
        }
        if let Some(c) = &self.capacity {
            if !first {
                f.write_str("; ")?;
            }
            write!(
                f,
                "required charge-minutes {} exceed system capacity {}",
                c.required_minutes, c.available_minutes
            )?;
        }
        Ok(())
    }
}

fn check_unique_ids<'a>(
    report: &mut ValidationReport,
    what: &str,
    ids: impl Iterator<Item = &'a u32>,
) {
    let mut seen = BTreeSet::new();
    for (pos, id) in ids.enumerate() {
        if !seen.insert(*id) {
            report.push(format!("{what}[{pos}].id"), format!("duplicate id {id}"));
        }
    }
}

/// Lists every invariant violation and flags system-level capacity shortfall.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut report = ValidationReport::default();

    if inst.stations.is_empty() {
        report.push("stations", "at least one station is required");
    }
    if inst.demand_nodes.is_empty() {
        report.push("demand_nodes", "at least one demand node is required");
    }
    if inst.vehicle_types.is_empty() {
        report.push("vehicle_types", "at least one vehicle type is required");
    }
    check_unique_ids(&mut report, "stations", inst.stations.iter().map(|s| &s.id));
    check_unique_ids(&mut report, "demand_nodes", inst.demand_nodes.iter().map(|d| &d.id));
    check_unique_ids(&mut report, "vehicle_types", inst.vehicle_types.iter().map(|v| &v.id));

    for (k, vt) in inst.vehicle_types.iter().enumerate() {
        if !(vt.energy_per_charge > 0.0 && vt.energy_per_charge.is_finite()) {
            report.push(format!("vehicle_types[{k}].energy_per_charge"), "must be positive");
        }
        if !(vt.charge_time > 0.0 && vt.charge_time.is_finite()) {
            report.push(format!("vehicle_types[{k}].charge_time"), "must be positive");
        }
    }

    for (j, s) in inst.stations.iter().enumerate() {
        if !(s.daily_cost >= 0.0 && s.daily_cost.is_finite()) {
            report.push(format!("stations[{j}].daily_cost"), "must be non-negative");
        }
        if s.max_connectors < 1 {
            report.push(format!("stations[{j}].max_connectors"), "must be at least 1");
        }
        if !(s.connector_throughput > 0.0 && s.connector_throughput.is_finite()) {
            report.push(format!("stations[{j}].connector_throughput"), "must be positive");
        }
        let d = &s.disruption;
        if !(d.std_dev > 0.0 && d.std_dev.is_finite()) {
            report.push(format!("stations[{j}].disruption.std_dev"), "must be positive");
        }
        if !d.mean.is_finite() {
            report.push(format!("stations[{j}].disruption.mean"), "must be finite");
        }
        if !d.threshold.is_finite() {
            report.push(format!("stations[{j}].disruption.threshold"), "must be finite");
        }
    }

    let type_ids: BTreeSet<u32> = inst.vehicle_types.iter().map(|v| v.id).collect();
    for (i, node) in inst.demand_nodes.iter().enumerate() {
        for key in node.demand.keys() {
            if !type_ids.contains(key) {
                report.push(
                    format!("demand_nodes[{i}].demand.{key}"),
                    "refers to an unknown vehicle type",
                );
            }
        }
    }

    if inst.travel_time.len() != inst.demand_nodes.len() {
        report.push(
            "travel_time",
            format!(
                "has {} rows, expected one per demand node ({})",
                inst.travel_time.len(),
                inst.demand_nodes.len()
            ),
        );
    }
    for (i, row) in inst.travel_time.iter().enumerate() {
        if row.len() != inst.stations.len() {
            report.push(
                format!("travel_time[{i}]"),
                format!("has {} columns, expected {}", row.len(), inst.stations.len()),
            );
        }
        for (j, &d) in row.iter().enumerate() {
            if !(d >= 0.0 && d.is_finite()) {
                report.push(format!("travel_time[{i}][{j}]"), "must be non-negative and finite");
            }
        }
    }

    let p = &inst.params;
    if !(p.min_service_level > 0.0 && p.min_service_level <= 1.0) {
        report.push("params.min_service_level", "must lie in (0, 1]");
    }
    for (name, value) in [
        ("price_rate", p.price_rate),
        ("penalty_rate", p.penalty_rate),
        ("connector_cost", p.connector_cost),
        ("max_travel_time", p.max_travel_time),
    ] {
        if !(value >= 0.0 && value.is_finite()) {
            report.push(format!("params.{name}"), "must be non-negative");
        }
    }
    if !(p.big_m > 0.0 && p.big_m.is_finite()) {
        report.push("params.big_m", "must be positive");
    }
    if p.max_stations < 1 {
        report.push("params.max_stations", "must be at least 1");
    }

    if report.violations.is_empty() {
        let required = inst.required_charge_minutes();
        let available = inst.system_capacity();
        if required > available {
            report.capacity =
                Some(CapacityShortfall { required_minutes: required, available_minutes: available });
        }
    }
    report
}

/// `mask[i][j]` is true iff `d_ij ≤ d_max`.
pub fn eligible_pairs(inst: &Instance) -> Vec<Vec<bool>> {
    let d_max = inst.params.max_travel_time;
    inst.travel_time.iter().map(|row| row.iter().map(|&d| d <= d_max).collect()).collect()
}

/// Parses an instance from JSON text and validates it.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let inst: Instance = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let report = validate_instance(&inst);
    if report.has_violations() {
        return Err(Error::Validation(report));
    }
    Ok(inst)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_instance(&text)
}

pub fn instance_to_json(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(inst).expect("instance serializes");
    s.push('\n');
    s
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(inst))
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn tiny_instance() -> Instance {
        Instance {
            stations: vec![Station {
                id: 1,
                daily_cost: 100.0,
                max_connectors: 2,
                connector_throughput: 60.0,
                disruption: DisruptionModel::gaussian(10.0, 2.0, 14.0),
            }],
            demand_nodes: vec![DemandNode { id: 1, demand: BTreeMap::from([(1, 3)]) }],
            vehicle_types: vec![VehicleType { id: 1, energy_per_charge: 10.0, charge_time: 20.0 }],
            travel_time: vec![vec![5.0]],
            params: GlobalParams {
                price_rate: 2.0,
                penalty_rate: 1.0,
                connector_cost: 10.0,
                max_stations: 1,
                max_travel_time: 35.0,
                min_service_level: 0.95,
                big_m: 1e8,
            },
            provenance: BTreeMap::new(),
        }
    }

    #[test]
    fn smallest_instance_is_valid() {
        let inst = tiny_instance();
        assert!(validate_instance(&inst).is_empty());
        let back = parse_instance(&instance_to_json(&inst)).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn zero_sigma_names_std_dev() {
        let mut inst = tiny_instance();
        inst.stations[0].disruption.std_dev = 0.0;
        match parse_instance(&instance_to_json(&inst)) {
            Err(Error::Validation(r)) => {
                assert!(r.violations.iter().any(|v| v.field.ends_with("std_dev")), "{r}");
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn negative_travel_time_is_reported() {
        let mut inst = tiny_instance();
        inst.travel_time[0][0] = -1.0;
        let r = validate_instance(&inst);
        assert!(r.violations.iter().any(|v| v.field.starts_with("travel_time")));
    }

    #[test]
    fn capacity_flag_at_boundary() {
        let mut inst = tiny_instance();
        // capacity = 60 * 2 = 120 charge-minutes; 6 vehicles * 20 = 120.
        inst.demand_nodes[0].demand.insert(1, 6);
        assert!(validate_instance(&inst).is_empty());
        // one more charge-minute than available
        inst.vehicle_types[0].charge_time = 121.0 / 6.0;
        let r = validate_instance(&inst);
        assert!(r.violations.is_empty());
        let cap = r.capacity.expect("capacity flag");
        assert!(cap.required_minutes > cap.available_minutes);
    }

    #[test]
    fn fractional_demand_is_a_schema_error() {
        let text = instance_to_json(&tiny_instance()).replace("\"1\": 3", "\"1\": 2.5");
        match parse_instance(&text) {
            Err(Error::Schema { field, .. }) => assert!(field.contains("demand"), "{field}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn missing_field_is_a_schema_error() {
        let text = instance_to_json(&tiny_instance()).replace("\"price_rate\"", "\"price\"");
        match parse_instance(&text) {
            Err(Error::Schema { field, message }) => {
                assert!(field.contains("params"), "{field}");
                assert!(message.contains("price_rate"), "{message}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load_instance("/nonexistent/instance.json"), Err(Error::Io { .. })));
    }

    #[test]
    fn eligibility_boundary_is_inclusive() {
        let mut inst = tiny_instance();
        inst.travel_time[0][0] = 35.0;
        assert_eq!(eligible_pairs(&inst), vec![vec![true]]);
        inst.travel_time[0][0] = 36.0;
        assert_eq!(eligible_pairs(&inst), vec![vec![false]]);
        inst.travel_time[0][0] = 0.0;
        assert_eq!(eligible_pairs(&inst), vec![vec![true]]);
    }
}
