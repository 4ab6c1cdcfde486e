//! Declarative experiment configuration (TOML).

use std::path::{Path, PathBuf};

use chargesite::reliability::DEFAULT_RHO;
use chargesite::{BnBConfig, BuildOptions, EstimationMethod, SyntheticConfig, Variant};
use serde::{Deserialize, Serialize};

use crate::artifacts::read_to_string;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Relative paths are resolved against the config file's directory.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub instance: InstanceSource,
    #[serde(default)]
    pub estimation: EstimationConfig,
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub model: BuildOptions,
    #[serde(default)]
    pub solver: BnBConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
}

/// Either a file or generator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<GenerateConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub seed: u64,
    #[serde(flatten)]
    pub synthetic: SyntheticConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimationConfig {
    pub n: usize,
    pub seed: u64,
    pub method: EstimationMethod,
    pub rho: f64,
    /// Sample sizes for the estimate and standard-error traces.
    pub sweep: Vec<usize>,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self { n: 10_000, seed: 7, method: EstimationMethod::Cv, rho: DEFAULT_RHO, sweep: vec![10, 100, 1000, 10_000] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub n_eval: usize,
    pub eval_seed: u64,
    pub methods: Vec<EstimationMethod>,
    /// Variant label the comparison table is relative to.
    pub baseline: String,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            n_eval: 10_000,
            eval_seed: 1001,
            methods: vec![EstimationMethod::Mc, EstimationMethod::Cv],
            baseline: "nonrobust".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::config(format!("invalid experiment config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let mut cfg = Self::parse(&read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(p) = &mut self.instance.path {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(p) = &mut self.output_dir {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn check(&self) -> CliResult<()> {
        if self.variants.is_empty() {
            return Err(CliError::config("config lists no variants"));
        }
        for v in &self.variants {
            if let Variant::Misspecified { factor } = v {
                if !(*factor > 0.0 && factor.is_finite()) {
                    return Err(CliError::config(format!("misspecification factor {factor} must be positive")));
                }
            }
        }
        match (&self.instance.path, &self.instance.generate) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err(CliError::config("[instance] needs exactly one of `path` or `generate`")),
        }
        let e = &self.estimation;
        if e.method == EstimationMethod::Analytic {
            return Err(CliError::config("estimation.method must be mc or cv"));
        }
        if e.n < 2 || e.sweep.iter().any(|&n| n < 2) {
            return Err(CliError::config("estimation sample sizes must be at least 2"));
        }
        if !(e.rho.abs() <= 1.0) {
            return Err(CliError::config(format!("estimation.rho = {} is outside [-1, 1]", e.rho)));
        }
        let ev = &self.evaluation;
        if ev.n_eval < 2 {
            return Err(CliError::config("evaluation.n_eval must be at least 2"));
        }
        if ev.methods.is_empty() || ev.methods.contains(&EstimationMethod::Analytic) {
            return Err(CliError::config("evaluation.methods must list mc and/or cv"));
        }
        if !self.variants.iter().any(|v| v.label() == ev.baseline) {
            return Err(CliError::config(format!("baseline `{}` is not among the variants", ev.baseline)));
        }
        self.solver.check().map_err(|e| CliError::config(e.to_string()))?;
        if ev.eval_seed == e.seed {
            log::warn!("evaluation seed equals the estimation seed ({})", e.seed);
        }
        Ok(())
    }

    /// Sweep points up to and including the largest configured size, sorted.
    pub fn sweep(&self) -> Vec<usize> {
        let mut s = self.estimation.sweep.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}
