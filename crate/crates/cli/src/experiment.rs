//! Full experiment: estimate, solve every variant, evaluate, tabulate.

use std::path::{Path, PathBuf};

use chargesite::instance::instance_to_json;
use chargesite::{
    build_model, compare_models, coverage_statistics, estimate_reliabilities, evaluate_solution,
    generate_synthetic_demand, embedded_surabaya_parameters, load_instance, solve_variant, validate_instance,
    EstimationMethod, EvaluationReport, Instance, MipProblem, SolveOutcome, Variant,
};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifacts::{csv_text, pretty_json, read_to_string, sha256_hex, ArtifactDir};
use crate::commands::{emit, estimate_sweep, reports_csv, require_solution, solve_log_text, SolutionFile};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";
const INSTANCE_COPY: &str = "instance.json";
const MANIFEST_FORMAT: u32 = 1;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment TOML.
    #[arg(required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    pub config: Option<PathBuf>,
    /// Re-run the experiment recorded in a manifest.
    #[arg(long)]
    pub from_manifest: Option<PathBuf>,
    /// Output directory; overrides the configured one.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_eval: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub eval_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub tool_version: String,
    /// Resolved configuration; the instance points at the copy next to the
    /// manifest.
    pub config: ExperimentConfig,
    pub config_sha256: String,
    pub instance_sha256: String,
    pub estimation_seed: u64,
    pub evaluation_seed: u64,
    pub artifacts: Vec<ArtifactEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub path: String,
    pub sha256: String,
}

impl Manifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_to_string(path)?;
        let m: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        if m.format != MANIFEST_FORMAT {
            return Err(CliError::config(format!("unsupported manifest format {}", m.format)));
        }
        m.config.check()?;
        Ok(m)
    }

    pub fn checksum(&self, path: &str) -> Option<&str> {
        self.artifacts.iter().find(|a| a.path == path).map(|a| a.sha256.as_str())
    }
}

#[derive(Debug, Serialize)]
struct TraceRow<'a> {
    variant: &'a str,
    method: EstimationMethod,
    n: usize,
    mean_obj: f64,
    se_obj: f64,
    ci_low: f64,
    ci_high: f64,
}

#[derive(Debug, Serialize)]
struct SeRow<'a> {
    variant: &'a str,
    method: EstimationMethod,
    n: usize,
    se_obj: f64,
}

#[derive(Debug, Serialize)]
struct CoverageRow<'a> {
    variant: &'a str,
    node: u32,
    open_in_reach: usize,
}

#[derive(Debug, Serialize)]
struct SolveRow<'a> {
    variant: &'a str,
    status: String,
    objective: Option<f64>,
    bound: f64,
    gap: f64,
    nodes: u64,
    lp_iterations: u64,
    columns: usize,
    rows: usize,
    presolved_columns: usize,
    presolved_rows: usize,
    open_stations: String,
    connectors: u64,
}

fn stage<T, E: Into<CliError>>(name: &'static str, r: Result<T, E>) -> CliResult<T> {
    r.map_err(|e| e.into().at(name))
}

fn problem_key(p: &MipProblem) -> MipProblem {
    MipProblem { name: String::new(), ..p.clone() }
}

fn load_config(args: &ExperimentArgs) -> CliResult<(ExperimentConfig, Option<String>)> {
    let (mut cfg, expect_hash) = match (&args.config, &args.from_manifest) {
        (Some(p), None) => (ExperimentConfig::load(p)?, None),
        (None, Some(p)) => {
            let m = Manifest::load(p)?;
            let mut cfg = m.config;
            cfg.resolve_paths(p.parent().unwrap_or(Path::new(".")));
            (cfg, Some(m.instance_sha256))
        }
        _ => return Err(CliError::config("give either a config file or --from-manifest")),
    };
    if let Some(o) = &args.output {
        cfg.output_dir = Some(o.clone());
    }
    if let Some(n) = args.n {
        cfg.estimation.n = n;
    }
    if let Some(n) = args.n_eval {
        cfg.evaluation.n_eval = n;
    }
    if let Some(s) = args.seed {
        cfg.estimation.seed = s;
    }
    if let Some(s) = args.eval_seed {
        cfg.evaluation.eval_seed = s;
    }
    cfg.check()?;
    Ok((cfg, expect_hash))
}

fn load_experiment_instance(cfg: &ExperimentConfig) -> CliResult<Instance> {
    let inst = match (&cfg.instance.path, &cfg.instance.generate) {
        (Some(p), _) => load_instance(p)?,
        (None, Some(g)) => generate_synthetic_demand(&embedded_surabaya_parameters(), &g.synthetic, g.seed)?,
        (None, None) => return Err(CliError::config("no instance source")),
    };
    let report = validate_instance(&inst);
    if report.has_violations() {
        return Err(CliError::config(format!("instance fails validation: {report:?}")));
    }
    Ok(inst)
}

/// Solves each distinct model once, in parallel.
fn solve_all(
    inst: &Instance,
    est: &chargesite::ReliabilityEstimates,
    cfg: &ExperimentConfig,
) -> CliResult<Vec<SolveOutcome>> {
    let keys = cfg
        .variants
        .par_iter()
        .map(|&v| build_model(inst, est, v, cfg.model).map(|m| problem_key(&m.problem)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut first_with: Vec<usize> = Vec::with_capacity(keys.len());
    for (i, k) in keys.iter().enumerate() {
        first_with.push(keys[..i].iter().position(|o| o == k).unwrap_or(i));
    }
    let unique: Vec<usize> = (0..keys.len()).filter(|&i| first_with[i] == i).collect();
    let solved = unique
        .par_iter()
        .map(|&i| solve_variant(inst, est, cfg.variants[i], cfg.model, &cfg.solver).map(|o| (i, o)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::with_capacity(keys.len());
    for (i, &v) in cfg.variants.iter().enumerate() {
        let src = &solved.iter().find(|(j, _)| *j == first_with[i]).expect("solved").1;
        let mut o = src.clone();
        if first_with[i] != i {
            log::info!("{v}: model identical to {}, reusing its solve", cfg.variants[first_with[i]]);
            o.variant = v;
            if let Some(s) = &mut o.solution {
                s.variant = v;
            }
        }
        out.push(o);
    }
    Ok(out)
}

fn variant_file(v: Variant) -> String {
    v.label()
}

/// Runs the experiment and returns the manifest it wrote.
pub fn run(args: &ExperimentArgs) -> CliResult<Manifest> {
    let (cfg, expect_hash) = stage("config", load_config(args))?;
    let out_dir = cfg
        .output_dir
        .clone()
        .ok_or_else(|| CliError::config("no output directory; set output_dir or pass -o").at("config"))?;
    let mut dir = stage("config", ArtifactDir::new(&out_dir))?;

    let inst = stage("instance", load_experiment_instance(&cfg))?;
    let inst_hash = inst.content_hash();
    if let Some(h) = expect_hash {
        if h != inst_hash {
            return Err(CliError::config(format!("instance hash {inst_hash} differs from the manifest's {h}")).at("instance"));
        }
    }
    stage("instance", dir.write(INSTANCE_COPY, &instance_to_json(&inst)))?;
    log::info!("instance {inst_hash}");

    let e = &cfg.estimation;
    let est = stage("estimation", estimate_reliabilities(&inst, e.n, e.seed, e.method, e.rho))?;
    stage("estimation", dir.write("estimates.json", &est.to_json()))?;
    let sweep = cfg.sweep();
    let (rows, _) = stage(
        "estimation",
        estimate_sweep(&inst, &sweep, &[EstimationMethod::Mc, EstimationMethod::Cv], e.seed, e.rho),
    )?;
    stage("estimation", csv_text(&rows).and_then(|t| dir.write("estimates.csv", &t)))?;

    let outcomes = stage("solve", solve_all(&inst, &est, &cfg))?;
    let mut solve_rows = Vec::new();
    for o in &outcomes {
        let label = variant_file(o.variant);
        stage("solve", dir.write(&format!("solutions/{label}.log"), &solve_log_text(&o.log)))?;
        let file = SolutionFile::new(&inst, &est, cfg.model, o.clone());
        stage("solve", pretty_json(&file).and_then(|t| dir.write(&format!("solutions/{label}.json"), &t)))?;
        stage("solve", require_solution(o.variant, o))?;
        let sol = o.solution.as_ref().expect("checked");
        solve_rows.push((label, o, sol));
    }
    let summary: Vec<SolveRow> = solve_rows
        .iter()
        .map(|(label, o, sol)| SolveRow {
            variant: label,
            status: format!("{:?}", o.status),
            objective: o.objective,
            bound: o.bound,
            gap: o.gap,
            nodes: o.nodes,
            lp_iterations: o.lp_iterations,
            columns: o.columns,
            rows: o.rows,
            presolved_columns: o.presolved_columns,
            presolved_rows: o.presolved_rows,
            open_stations: sol.open_stations.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
            connectors: sol.connectors.iter().map(|&c| u64::from(c)).sum(),
        })
        .collect();
    stage("solve", csv_text(&summary).and_then(|t| dir.write("solutions/summary.csv", &t)))?;

    let ev = &cfg.evaluation;
    let mut eval_n: Vec<usize> = sweep.iter().copied().filter(|&n| n < ev.n_eval).collect();
    eval_n.push(ev.n_eval);
    let mut cells: Vec<(usize, EstimationMethod, usize)> = Vec::new();
    for v in 0..solve_rows.len() {
        for &m in &ev.methods {
            cells.extend(eval_n.iter().map(|&n| (v, m, n)));
        }
    }
    let evaluated = stage(
        "evaluation",
        cells
            .par_iter()
            .map(|&(v, m, n)| evaluate_solution(&inst, solve_rows[v].2, n, ev.eval_seed, m, e.rho))
            .collect::<Result<Vec<_>, _>>(),
    )?;
    let mut trace = Vec::new();
    let mut se_trace = Vec::new();
    let mut finals: Vec<EvaluationReport> = Vec::new();
    for (&(v, m, n), r) in cells.iter().zip(&evaluated) {
        let label = &solve_rows[v].0;
        trace.push(TraceRow {
            variant: label,
            method: m,
            n,
            mean_obj: r.mean_objective,
            se_obj: r.se_objective,
            ci_low: r.mean_objective - Z95 * r.se_objective,
            ci_high: r.mean_objective + Z95 * r.se_objective,
        });
        se_trace.push(SeRow { variant: label, method: m, n, se_obj: r.se_objective });
        if n == ev.n_eval {
            let mut r = r.clone();
            r.solution_id = label.clone();
            finals.push(r);
        }
    }
    stage("evaluation", csv_text(&trace).and_then(|t| dir.write("objective_trace.csv", &t)))?;
    stage("evaluation", csv_text(&se_trace).and_then(|t| dir.write("se_trace.csv", &t)))?;
    for &m in &ev.methods {
        let of_method: Vec<EvaluationReport> = finals.iter().filter(|r| r.method == m).cloned().collect();
        stage("evaluation", dir.write(&format!("evaluation_{m}.csv"), &reports_csv(&of_method)))?;
    }
    stage("evaluation", pretty_json(&finals).and_then(|t| dir.write("evaluation.json", &t)))?;

    let table = stage("comparison", compare_models(&finals, &ev.baseline))?;
    stage("comparison", dir.write("comparison.csv", &table.to_csv()))?;
    let coverage: Vec<CoverageRow> = solve_rows
        .iter()
        .flat_map(|(label, _, sol)| {
            let stats = coverage_statistics(&inst, sol);
            inst.demand_nodes
                .iter()
                .zip(stats.per_node)
                .map(|(node, c)| CoverageRow { variant: label, node: node.id, open_in_reach: c })
                .collect::<Vec<_>>()
        })
        .collect();
    stage("comparison", csv_text(&coverage).and_then(|t| dir.write("coverage.csv", &t)))?;

    let mut recorded = cfg.clone();
    recorded.output_dir = None;
    recorded.instance.path = Some(PathBuf::from(INSTANCE_COPY));
    recorded.instance.generate = None;
    let config_sha256 = sha256_hex(stage("manifest", pretty_json(&recorded))?.as_bytes());
    let manifest = Manifest {
        format: MANIFEST_FORMAT,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: recorded,
        config_sha256,
        instance_sha256: inst_hash,
        estimation_seed: e.seed,
        evaluation_seed: ev.eval_seed,
        artifacts: dir.written.iter().map(|(p, s)| ArtifactEntry { path: p.clone(), sha256: s.clone() }).collect(),
    };
    stage("manifest", pretty_json(&manifest).and_then(|t| dir.write(MANIFEST, &t)))?;

    let mut text = String::new();
    for r in &table.rows {
        text += &format!(
            "{:<20} {:<3} mean {:>16.1} se {:>10.1} rel {:>+8.4}\n",
            r.variant, r.method, r.mean_objective, r.se_objective, r.relative_difference
        );
    }
    text += &format!("wrote {} artifacts to {}\n", manifest.artifacts.len() + 1, dir.root().display());
    emit(&text);
    Ok(manifest)
}
