//! Published parameter set for the 11 candidate stations of the Surabaya
//! case: disruption models (masked cumulative electricity demand), daily
//! station costs, tariffs and vehicle characteristics.

use super::{BaseInstance, DisruptionModel, GlobalParams, Station, VehicleType};

/// (mean, std_dev, threshold, daily_cost) per station, stations 1..=11.
const STATIONS: [(f64, f64, f64, f64); 11] = [
    (28979.0, 3622.0, 36224.0, 4602739.0),
    (11590.0, 1440.0, 14490.0, 1586301.0),
    (5795.0, 722.0, 7250.0, 1068493.0),
    (5789.0, 715.0, 7245.0, 1150684.0),
    (17387.0, 2180.0, 21750.0, 1068493.0),
    (17385.0, 2169.0, 21730.0, 1586301.0),
    (11590.0, 1442.0, 14475.0, 2794520.0),
    (11595.0, 1435.0, 14481.0, 1972602.0),
    (5797.0, 720.0, 7246.0, 2054794.0),
    (5785.0, 731.0, 7241.0, 1643835.0),
    (11600.0, 1450.0, 14500.0, 1643835.0),
];

const CONNECTOR_MINUTES_PER_DAY: f64 = 1440.0;
const MAX_CONNECTORS: u32 = 8;

pub fn embedded_surabaya_parameters() -> BaseInstance {
    let stations = STATIONS
        .iter()
        .enumerate()
        .map(|(j, &(mean, std_dev, threshold, daily_cost))| Station {
            id: j as u32 + 1,
            daily_cost,
            max_connectors: MAX_CONNECTORS,
            connector_throughput: CONNECTOR_MINUTES_PER_DAY,
            disruption: DisruptionModel::gaussian(mean, std_dev, threshold),
        })
        .collect();
    let vehicle_types = vec![
        // motorcycle
        VehicleType { id: 1, energy_per_charge: 90.0, charge_time: 20.0 },
        // car
        VehicleType { id: 2, energy_per_charge: 133.0, charge_time: 39.0 },
    ];
    let params = GlobalParams {
        price_rate: 2467.0,
        penalty_rate: 50000.0,
        connector_cost: 479285.0,
        max_stations: 11,
        max_travel_time: 35.0,
        min_service_level: 0.95,
        big_m: 99999999.0,
    };
    BaseInstance { stations, vehicle_types, params }
}
