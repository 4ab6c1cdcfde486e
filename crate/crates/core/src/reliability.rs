//! Station reliability `p_j = P(Z_j ≤ z_j)`: paired scenario simulation,
//! Monte Carlo and control-variate estimators, and Hoeffding sample sizing.
//!
//! For every station the simulator draws independent standard normals
//! `X_jl` and `ε_jl` and sets
//!
//! ```text
//! Z_jl = μ_j + σ_j (ρ X_jl + √(1 − ρ²) ε_jl)
//! ```
//!
//! so `Z_jl ~ N(μ_j, σ_j²)` marginally while `I(X_jl ≤ z̄_j)` with
//! `z̄_j = (z_j − μ_j)/σ_j` is a control variate with known mean `Φ(z̄_j)`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{DisruptionModel, Instance};
use crate::normal::standard_normal_cdf;
use crate::rng::stream_rng;
use crate::stats::{compensated_sum, sample_covariance, sample_variance};

/// Latent correlation used when none is given.
pub const DEFAULT_RHO: f64 = 0.99999;

/// Below this sample variance the control variate carries no information.
const DEGENERATE_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimationMethod {
    Mc,
    Cv,
    Analytic,
}

impl fmt::Display for EstimationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimationMethod::Mc => "mc",
            EstimationMethod::Cv => "cv",
            EstimationMethod::Analytic => "analytic",
        })
    }
}

impl FromStr for EstimationMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(EstimationMethod::Mc),
            "cv" => Ok(EstimationMethod::Cv),
            "analytic" => Ok(EstimationMethod::Analytic),
            other => Err(format!("unknown estimation method `{other}` (expected mc, cv or analytic)")),
        }
    }
}

/// Disruption indicator: 1 when the station is up (`z_value ≤ threshold`).
pub fn disruption_indicator(z_value: f64, threshold: f64) -> u8 {
    u8::from(z_value <= threshold)
}

/// Closed-form reliability `Φ((z − μ)/σ)`.
pub fn analytic_reliability(model: &DisruptionModel) -> Result<f64> {
    if !(model.std_dev > 0.0) {
        return Err(Error::NonPositiveSigma(model.std_dev));
    }
    Ok(standard_normal_cdf(model.scaled_threshold()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationScenarios {
    pub station_id: u32,
    pub z_samples: Vec<f64>,
    pub x_samples: Vec<f64>,
    pub z_indicators: Vec<u8>,
    pub x_indicators: Vec<u8>,
    pub scaled_threshold: f64,
}

impl StationScenarios {
    /// Known mean of the control indicator, `Φ(z̄_j)`.
    pub fn control_mean(&self) -> f64 {
        standard_normal_cdf(self.scaled_threshold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedScenarioSet {
    pub n: usize,
    pub rho: f64,
    pub seed: u64,
    pub stations: Vec<StationScenarios>,
}

fn sample_station(model: &DisruptionModel, station_id: u32, n: usize, seed: u64, rho: f64) -> StationScenarios {
    let mut rng = stream_rng(seed, u64::from(station_id));
    let noise_weight = (1.0 - rho * rho).max(0.0).sqrt();
    let scaled_threshold = model.scaled_threshold();
    let mut z_samples = Vec::with_capacity(n);
    let mut x_samples = Vec::with_capacity(n);
    let mut z_indicators = Vec::with_capacity(n);
    let mut x_indicators = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = StandardNormal.sample(&mut rng);
        let eps: f64 = StandardNormal.sample(&mut rng);
        let z = model.mean + model.std_dev * (rho * x + noise_weight * eps);
        z_indicators.push(disruption_indicator(z, model.threshold));
        x_indicators.push(disruption_indicator(x, scaled_threshold));
        z_samples.push(z);
        x_samples.push(x);
    }
    StationScenarios { station_id, z_samples, x_samples, z_indicators, x_indicators, scaled_threshold }
}

/// Draws `n` paired samples per station. Each station uses its own stream
/// keyed by `(seed, station id)`, so stations are sampled in parallel without
/// affecting the result.
pub fn sample_paired_scenarios(inst: &Instance, n: usize, seed: u64, rho: f64) -> Result<PairedScenarioSet> {
    if n < 1 {
        return Err(Error::SampleTooSmall { required: 1, actual: n });
    }
    if !(rho.abs() <= 1.0) {
        return Err(Error::InvalidArgument { name: "rho", reason: format!("{rho} is outside [-1, 1]") });
    }
    let stations = inst
        .stations
        .par_iter()
        .map(|s| sample_station(&s.disruption, s.id, n, seed, rho))
        .collect();
    Ok(PairedScenarioSet { n, rho, seed, stations })
}

/// Writes the audit CSV `station,l,z,x,z_ind,x_ind` (l is 1-based).
pub fn write_scenarios_csv(set: &PairedScenarioSet, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "station,l,z,x,z_ind,x_ind")?;
    for s in &set.stations {
        for l in 0..set.n {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.station_id,
                l + 1,
                s.z_samples[l],
                s.x_samples[l],
                s.z_indicators[l],
                s.x_indicators[l]
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationEstimate {
    #[serde(rename = "id")]
    pub station_id: u32,
    pub p_hat: f64,
    #[serde(rename = "se")]
    pub standard_error: f64,
    #[serde(rename = "pi", default, skip_serializing_if = "Option::is_none")]
    pub cv_coefficient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityEstimates {
    pub method: EstimationMethod,
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub rho: Option<f64>,
    pub stations: Vec<StationEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReliabilityEstimates {
    pub fn get(&self, station_id: u32) -> Option<&StationEstimate> {
        self.stations.iter().find(|s| s.station_id == station_id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("estimates serialize");
        s.push('\n');
        s
    }
}

fn indicator_values(ind: &[u8]) -> Vec<f64> {
    ind.iter().map(|&b| f64::from(b)).collect()
}

/// Plain Monte Carlo: `(p̂, √(p̂(1 − p̂)/n))`.
pub fn mc_from_indicators(z_ind: &[u8]) -> Result<(f64, f64)> {
    let n = z_ind.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { required: 2, actual: n });
    }
    let hits: u64 = z_ind.iter().map(|&b| u64::from(b)).sum();
    let p = hits as f64 / n as f64;
    Ok((p, (p * (1.0 - p) / n as f64).sqrt()))
}

/// `π = −Cov(z_ind, x_ind) / Var(x_ind)` from (n − 1)-normalised sample
/// moments; zero when the control is (numerically) constant.
pub fn optimal_cv_coefficient(z_ind: &[u8], x_ind: &[u8]) -> Result<f64> {
    if z_ind.len() != x_ind.len() {
        return Err(Error::LengthMismatch { left: z_ind.len(), right: x_ind.len() });
    }
    if z_ind.len() < 2 {
        return Err(Error::SampleTooSmall { required: 2, actual: z_ind.len() });
    }
    let z = indicator_values(z_ind);
    let x = indicator_values(x_ind);
    let var_x = sample_variance(&x);
    if var_x < DEGENERATE_VARIANCE {
        return Ok(0.0);
    }
    Ok(-sample_covariance(&z, &x) / var_x)
}

/// Control-variate estimate with a given coefficient. Returns the clamped
/// estimate and the standard error of the adjusted per-sample values
/// `z_l + π (x_l − control_mean)`.
pub fn cv_with_coefficient(z_ind: &[u8], x_ind: &[u8], control_mean: f64, pi: f64) -> Result<(f64, f64)> {
    if z_ind.len() != x_ind.len() {
        return Err(Error::LengthMismatch { left: z_ind.len(), right: x_ind.len() });
    }
    let n = z_ind.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { required: 2, actual: n });
    }
    let adjusted: Vec<f64> = z_ind
        .iter()
        .zip(x_ind)
        .map(|(&z, &x)| f64::from(z) + pi * (f64::from(x) - control_mean))
        .collect();
    let p = compensated_sum(adjusted.iter().copied()) / n as f64;
    let se = (sample_variance(&adjusted) / n as f64).sqrt();
    Ok((p.clamp(0.0, 1.0), se))
}

/// `(p̂, se, π)` with the variance-optimal coefficient.
pub fn cv_from_indicators(z_ind: &[u8], x_ind: &[u8], control_mean: f64) -> Result<(f64, f64, f64)> {
    let pi = optimal_cv_coefficient(z_ind, x_ind)?;
    let (p, se) = cv_with_coefficient(z_ind, x_ind, control_mean, pi)?;
    Ok((p, se, pi))
}

pub fn mc_estimate(set: &PairedScenarioSet) -> Result<ReliabilityEstimates> {
    let stations = set
        .stations
        .iter()
        .map(|s| {
            let (p_hat, standard_error) = mc_from_indicators(&s.z_indicators)?;
            Ok(StationEstimate { station_id: s.station_id, p_hat, standard_error, cv_coefficient: None })
        })
        .collect::<Result<_>>()?;
    Ok(ReliabilityEstimates {
        method: EstimationMethod::Mc,
        n: set.n,
        seed: Some(set.seed),
        rho: Some(set.rho),
        stations,
        note: None,
    })
}

pub fn cv_estimate(set: &PairedScenarioSet) -> Result<ReliabilityEstimates> {
    let stations = set
        .stations
        .iter()
        .map(|s| {
            let (p_hat, standard_error, pi) =
                cv_from_indicators(&s.z_indicators, &s.x_indicators, s.control_mean())?;
            Ok(StationEstimate { station_id: s.station_id, p_hat, standard_error, cv_coefficient: Some(pi) })
        })
        .collect::<Result<_>>()?;
    Ok(ReliabilityEstimates {
        method: EstimationMethod::Cv,
        n: set.n,
        seed: Some(set.seed),
        rho: Some(set.rho),
        stations,
        note: None,
    })
}

/// Exact reliabilities `Φ(z̄_j)` with zero standard error.
pub fn analytic_estimates(inst: &Instance) -> Result<ReliabilityEstimates> {
    let stations = inst
        .stations
        .iter()
        .map(|s| {
            Ok(StationEstimate {
                station_id: s.id,
                p_hat: analytic_reliability(&s.disruption)?,
                standard_error: 0.0,
                cv_coefficient: None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ReliabilityEstimates { method: EstimationMethod::Analytic, n: 0, seed: None, rho: None, stations, note: None })
}

/// Samples scenarios and applies the chosen estimator.
pub fn estimate_reliabilities(
    inst: &Instance,
    n: usize,
    seed: u64,
    method: EstimationMethod,
    rho: f64,
) -> Result<ReliabilityEstimates> {
    match method {
        EstimationMethod::Analytic => analytic_estimates(inst),
        EstimationMethod::Mc => {
            if n < 2 {
                return Err(Error::SampleTooSmall { required: 2, actual: n });
            }
            mc_estimate(&sample_paired_scenarios(inst, n, seed, rho)?)
        }
        EstimationMethod::Cv => {
            if n < 2 {
                return Err(Error::SampleTooSmall { required: 2, actual: n });
            }
            cv_estimate(&sample_paired_scenarios(inst, n, seed, rho)?)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub delta: f64,
    pub alpha: f64,
    pub n: u64,
}

/// Smallest `n` with `2 exp(−2 n δ²) ≤ α`, i.e. `⌈ln(2/α) / (2δ²)⌉`.
/// `α = 2` is accepted and yields 0.
pub fn hoeffding_sample_size(delta: f64, alpha: f64) -> Result<u64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument { name: "delta", reason: format!("{delta} must be positive") });
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidArgument { name: "alpha", reason: format!("{alpha} is outside (0, 2]") });
    }
    let raw = (2.0 / alpha).ln() / (2.0 * delta * delta);
    if !raw.is_finite() || raw > u64::MAX as f64 {
        return Err(Error::InvalidArgument { name: "delta", reason: "sample size overflows".into() });
    }
    // Absorb representation error so exact integers are not bumped up.
    let nearest = raw.round();
    if (raw - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        return Ok(nearest as u64);
    }
    Ok(raw.ceil() as u64)
}

pub fn sampling_plan(delta: f64, alpha: f64) -> Result<SamplingPlan> {
    Ok(SamplingPlan { delta, alpha, n: hoeffding_sample_size(delta, alpha)? })
}
