//! The single-step subcommands.

use std::path::{Path, PathBuf};

use chargesite::instance::instance_to_json;
use chargesite::mps::write_mps;
use chargesite::reliability::DEFAULT_RHO;
use chargesite::{
    build_model, embedded_surabaya_parameters, estimate_reliabilities, evaluate_solution, generate_synthetic_demand,
    load_instance, solve_variant, validate_instance, BnBConfig, BranchingRule, BuildOptions, EstimationMethod,
    EvaluationReport, Instance, MipStatus, ReliabilityEstimates, SolutionSummary, SolveOutcome, SyntheticConfig,
    Variant,
};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::artifacts::{csv_text, pretty_json, read_to_string, write_atomic};
use crate::error::{CliError, CliResult};

pub const BUNDLED_SEED: u64 = 42;

/// Writes to stdout; a closed pipe is not an error.
pub fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

/// The bundled instance: the embedded station data with seed-42 synthetic
/// demand.
pub fn bundled_instance() -> CliResult<Instance> {
    Ok(generate_synthetic_demand(&embedded_surabaya_parameters(), &SyntheticConfig::default(), BUNDLED_SEED)?)
}

pub fn read_instance(path: Option<&Path>) -> CliResult<Instance> {
    let inst = match path {
        Some(p) => load_instance(p)?,
        None => bundled_instance()?,
    };
    let report = validate_instance(&inst);
    if report.has_violations() {
        return Err(CliError::config(format!("instance fails validation: {report:?}")));
    }
    Ok(inst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Mc,
    Cv,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<EstimationMethod> {
        match self {
            MethodChoice::Mc => vec![EstimationMethod::Mc],
            MethodChoice::Cv => vec![EstimationMethod::Cv],
            MethodChoice::Both => vec![EstimationMethod::Mc, EstimationMethod::Cv],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantKind {
    Robust,
    Nonrobust,
    Misspecified,
}

// ---------------------------------------------------------------- gen-instance

#[derive(Debug, Args)]
pub struct GenInstanceArgs {
    #[arg(long, default_value_t = BUNDLED_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 31)]
    pub nodes: usize,
    /// Target ratio of requested to available charge-minutes, in (0, 1].
    #[arg(long, default_value_t = 0.6)]
    pub utilization: f64,
    #[arg(long, default_value_t = 2)]
    pub min_coverage: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn gen_instance(args: &GenInstanceArgs) -> CliResult<()> {
    let cfg = SyntheticConfig {
        node_count: args.nodes,
        utilization_target: args.utilization,
        min_coverage: args.min_coverage,
        ..SyntheticConfig::default()
    };
    let inst = generate_synthetic_demand(&embedded_surabaya_parameters(), &cfg, args.seed).map_err(|e| CliError::from(e).at("generate"))?;
    write_atomic(&args.output, instance_to_json(&inst).as_bytes())?;
    emit(&format!("{} nodes, sha256 {}\n", inst.num_nodes(), inst.content_hash()));
    Ok(())
}

// ---------------------------------------------------------------- estimate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub station: u32,
    pub n: usize,
    pub method: EstimationMethod,
    pub p_hat: f64,
    pub se: f64,
}

/// One row per station, sample size and method.
pub fn estimate_sweep(
    inst: &Instance,
    sweep: &[usize],
    methods: &[EstimationMethod],
    seed: u64,
    rho: f64,
) -> CliResult<(Vec<EstimateRow>, Vec<ReliabilityEstimates>)> {
    let mut rows = Vec::new();
    let mut last = Vec::new();
    for &n in sweep {
        last.clear();
        for &m in methods {
            let est = estimate_reliabilities(inst, n, seed, m, rho)?;
            rows.extend(est.stations.iter().map(|s| EstimateRow {
                station: s.station_id,
                n,
                method: m,
                p_hat: s.p_hat,
                se: s.standard_error,
            }));
            last.push(est);
        }
    }
    Ok((rows, last))
}

pub const DEFAULT_SWEEP: [usize; 4] = [10, 100, 1000, 10_000];

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Instance JSON; the bundled instance when omitted.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub method: MethodChoice,
    /// Single sample size instead of the sweep.
    #[arg(long, conflicts_with = "sweep")]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SWEEP)]
    pub sweep: Vec<usize>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_RHO, allow_hyphen_values = true)]
    pub rho: f64,
    /// Estimates at the largest sample size, one entry per method.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// `station,n,method,p_hat,se` trace.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn estimate(args: &EstimateArgs) -> CliResult<()> {
    let inst = read_instance(args.instance.as_deref()).map_err(|e| e.at("instance"))?;
    let mut sweep = match args.n {
        Some(n) => vec![n],
        None => args.sweep.clone(),
    };
    sweep.sort_unstable();
    sweep.dedup();
    if sweep.is_empty() {
        return Err(CliError::config("empty sample-size sweep"));
    }
    let (rows, last) =
        estimate_sweep(&inst, &sweep, &args.method.methods(), args.seed, args.rho).map_err(|e| e.at("estimation"))?;
    if let Some(p) = &args.json {
        write_atomic(p, pretty_json(&last)?.as_bytes())?;
    }
    if let Some(p) = &args.csv {
        write_atomic(p, csv_text(&rows)?.as_bytes())?;
    }
    let mut text = String::new();
    for est in &last {
        text += &format!("{} n={}\n", est.method, est.n);
        for s in &est.stations {
            text += &format!("  station {:>2}  p_hat {:.6}  se {:.3e}\n", s.station_id, s.p_hat, s.standard_error);
        }
    }
    emit(&text);
    Ok(())
}

/// Reads a single estimate set or picks `method` out of a list.
pub fn read_estimates(path: &Path, method: EstimationMethod) -> CliResult<ReliabilityEstimates> {
    let text = read_to_string(path)?;
    let bad = |e: serde_json::Error| CliError::config(format!("{}: {e}", path.display()));
    if text.trim_start().starts_with('[') {
        let all: Vec<ReliabilityEstimates> = serde_json::from_str(&text).map_err(bad)?;
        all.into_iter()
            .find(|e| e.method == method)
            .ok_or_else(|| CliError::config(format!("{} holds no {method} estimates", path.display())))
    } else {
        serde_json::from_str(&text).map_err(bad)
    }
}

// ---------------------------------------------------------------- solve

/// What `solve` writes and `evaluate` reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub instance_sha256: String,
    pub estimates: EstimateSettings,
    pub model: BuildOptions,
    pub status: MipStatus,
    pub objective: Option<f64>,
    /// Absent when infinite.
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub columns: usize,
    pub rows: usize,
    pub presolved_columns: usize,
    pub presolved_rows: usize,
    pub max_violation: Option<f64>,
    pub solution: Option<SolutionSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSettings {
    pub method: EstimationMethod,
    pub n: usize,
    pub seed: Option<u64>,
    pub rho: Option<f64>,
}

impl EstimateSettings {
    pub fn of(est: &ReliabilityEstimates) -> Self {
        Self { method: est.method, n: est.n, seed: est.seed, rho: est.rho }
    }
}

impl SolutionFile {
    pub fn new(inst: &Instance, est: &ReliabilityEstimates, model: BuildOptions, out: SolveOutcome) -> Self {
        Self {
            instance_sha256: inst.content_hash(),
            estimates: EstimateSettings::of(est),
            model,
            status: out.status,
            objective: out.objective,
            bound: Some(out.bound).filter(|b| b.is_finite()),
            gap: Some(out.gap).filter(|g| g.is_finite()),
            nodes: out.nodes,
            lp_iterations: out.lp_iterations,
            columns: out.columns,
            rows: out.rows,
            presolved_columns: out.presolved_columns,
            presolved_rows: out.presolved_rows,
            max_violation: out.max_violation,
            solution: out.solution,
        }
    }
}

pub const SOLVE_LOG_HEADER: &str = "node,depth,bound,incumbent,gap";

pub fn solve_log_text(log: &[String]) -> String {
    let mut s = String::from(SOLVE_LOG_HEADER);
    s.push('\n');
    for l in log {
        s.push_str(l);
        s.push('\n');
    }
    s
}

/// Turns non-optimal outcomes into the matching error.
pub fn require_solution(variant: Variant, out: &SolveOutcome) -> CliResult<()> {
    match out.status {
        MipStatus::Optimal => Ok(()),
        MipStatus::Feasible => {
            log::warn!("{variant}: stopped with gap {:.3e}", out.gap);
            Ok(())
        }
        MipStatus::Infeasible => Err(CliError::infeasible(format!("{variant}: model is infeasible"))),
        MipStatus::Unbounded => Err(CliError::internal(format!("{variant}: model is unbounded"))),
        MipStatus::LimitReached => {
            Err(CliError::internal(format!("{variant}: limit reached before any feasible decision was found")))
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Emit the per-vehicle reliability rows.
    #[arg(long)]
    pub vehicle_rows: bool,
    /// Use the single global big-M.
    #[arg(long)]
    pub loose_big_m: bool,
    /// Keep `y_ij` separate from `x_j`.
    #[arg(long)]
    pub no_alias: bool,
}

impl ModelArgs {
    pub fn options(&self) -> BuildOptions {
        BuildOptions {
            tight_big_m: !self.loose_big_m,
            fix_y_to_x: !self.no_alias,
            vehicle_reliability_rows: self.vehicle_rows,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub gap: f64,
    #[arg(long, value_enum, default_value = "most-fractional")]
    pub branching: BranchingArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchingArg {
    MostFractional,
    PseudoCost,
}

impl SolverArgs {
    pub fn config(&self) -> CliResult<BnBConfig> {
        let cfg = BnBConfig {
            node_limit: self.node_limit,
            time_limit: self.time_limit,
            relative_gap_tolerance: self.gap,
            branching: match self.branching {
                BranchingArg::MostFractional => BranchingRule::MostFractional,
                BranchingArg::PseudoCost => BranchingRule::PseudoCost,
            },
            ..BnBConfig::default()
        };
        cfg.check()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "robust")]
    pub variant: VariantKind,
    /// Reliability scale for the misspecified variant.
    #[arg(long, default_value_t = 0.95)]
    pub factor: f64,
    /// Estimates JSON from `estimate`; sampled afresh when omitted.
    #[arg(long)]
    pub estimates: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cv")]
    pub method: EstimateMethodArg,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_RHO, allow_hyphen_values = true)]
    pub rho: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Branch-and-bound progress as CSV.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Also export the built model.
    #[arg(long)]
    pub mps: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimateMethodArg {
    Mc,
    Cv,
    Analytic,
}

impl From<EstimateMethodArg> for EstimationMethod {
    fn from(m: EstimateMethodArg) -> Self {
        match m {
            EstimateMethodArg::Mc => EstimationMethod::Mc,
            EstimateMethodArg::Cv => EstimationMethod::Cv,
            EstimateMethodArg::Analytic => EstimationMethod::Analytic,
        }
    }
}

pub fn variant_of(kind: VariantKind, factor: f64) -> CliResult<Variant> {
    Ok(match kind {
        VariantKind::Robust => Variant::Robust,
        VariantKind::Nonrobust => Variant::NonRobust,
        VariantKind::Misspecified => {
            if !(factor > 0.0 && factor.is_finite()) {
                return Err(CliError::config(format!("--factor {factor} must be positive")));
            }
            Variant::Misspecified { factor }
        }
    })
}

pub fn solve(args: &SolveArgs) -> CliResult<()> {
    let inst = read_instance(args.instance.as_deref()).map_err(|e| e.at("instance"))?;
    let variant = variant_of(args.variant, args.factor)?;
    let method = EstimationMethod::from(args.method);
    let est = match &args.estimates {
        Some(p) => read_estimates(p, method)?,
        None => estimate_reliabilities(&inst, args.n, args.seed, method, args.rho).map_err(|e| CliError::from(e).at("estimation"))?,
    };
    let options = args.model.options();
    let cfg = args.solver.config()?;
    if let Some(p) = &args.mps {
        let model = build_model(&inst, &est, variant, options).map_err(|e| CliError::from(e).at("model"))?;
        write_atomic(p, write_mps(&model.problem).as_bytes())?;
    }
    let out = solve_variant(&inst, &est, variant, options, &cfg).map_err(|e| CliError::from(e).at("solve"))?;
    if let Some(p) = &args.log {
        write_atomic(p, solve_log_text(&out.log).as_bytes())?;
    }
    let mut text = format!(
        "{variant}: {:?} objective {} bound {} nodes {} ({} rows x {} columns after presolve)\n",
        out.status,
        out.objective.map_or("-".into(), |o| format!("{o:.3}")),
        out.bound,
        out.nodes,
        out.presolved_rows,
        out.presolved_columns
    );
    if let Some(sol) = &out.solution {
        text += &format!("  open stations {:?}\n  connectors    {:?}\n", sol.open_stations, sol.connectors);
    }
    emit(&text);
    let status = require_solution(variant, &out);
    let file = SolutionFile::new(&inst, &est, options, out);
    if let Some(p) = &args.output {
        write_atomic(p, pretty_json(&file)?.as_bytes())?;
    }
    status.map_err(|e| e.at("solve"))
}

// ---------------------------------------------------------------- evaluate

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub n_eval: usize,
    #[arg(long, default_value_t = 1001)]
    pub eval_seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    pub method: MethodChoice,
    #[arg(long, default_value_t = DEFAULT_RHO, allow_hyphen_values = true)]
    pub rho: f64,
    /// Reports, one per method.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// One CSV per method, named `<stem>_<method>.csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn with_method(path: &Path, method: EstimationMethod) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("evaluation");
    path.with_file_name(format!("{stem}_{method}.csv"))
}

pub fn reports_csv(reports: &[EvaluationReport]) -> String {
    let mut s = String::from(EvaluationReport::CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let inst = read_instance(args.instance.as_deref()).map_err(|e| e.at("instance"))?;
    let text = read_to_string(&args.solution)?;
    let file: SolutionFile = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", args.solution.display())))?;
    let hash = inst.content_hash();
    if file.instance_sha256 != hash {
        return Err(CliError::config(format!(
            "solution was computed for instance {} but this instance is {hash}",
            file.instance_sha256
        )));
    }
    let Some(sol) = &file.solution else {
        return Err(CliError::config(format!("{} holds no decision (status {:?})", args.solution.display(), file.status)));
    };
    let reports = args
        .method
        .methods()
        .into_iter()
        .map(|m| evaluate_solution(&inst, sol, args.n_eval, args.eval_seed, m, args.rho))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::from(e).at("evaluation"))?;
    if let Some(p) = &args.json {
        write_atomic(p, pretty_json(&reports)?.as_bytes())?;
    }
    let mut text = String::new();
    for r in &reports {
        if let Some(p) = &args.csv {
            write_atomic(&with_method(p, r.method), reports_csv(std::slice::from_ref(r)).as_bytes())?;
        }
        text += &format!(
            "{} {:<2} n={} seed={}  mean {:.1}  se {:.1}  revenue {:.1}  penalty {:.1}  cost {:.1}\n",
            r.solution_id, r.method, r.n_eval, r.eval_seed, r.mean_objective, r.se_objective, r.mean_revenue, r.mean_penalty, r.fixed_cost
        );
    }
    emit(&text);
    Ok(())
}
