use std::path::{Path, PathBuf};

use falqon_core::algorithms::{run, Algorithm, RunConfig, Trajectory};
use falqon_core::experiments::{
    default_workers, geometric_grid, initial_bound, layer_stats_csv, run_comparison, run_scaling,
    run_svp_example, tune_dt as tune, ExperimentPlan, Family, SvpVariant, COMPARISON_HEADER,
    GRID_LEN, GRID_RATIO,
};
use falqon_core::observable::beta_upper_bound;
use falqon_core::oracle::{brute_force, resource_estimate};
use falqon_core::pauli::qubo_to_hamiltonian;
use falqon_core::problem::{inequality_to_equality, to_qubo, QcboProblem, QuboProblem};
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{
    apply_overrides, emit, from_value, read_text, read_value, CliError, CliResult, Outputs,
};
use crate::WORKERS_ENV;

fn load_problem(path: &Path) -> CliResult<QcboProblem> {
    QcboProblem::from_json(&read_text(path)?).map_err(|e| CliError::from(e).at(path))
}

fn load_with_overrides(path: &Path, overrides: &[String]) -> CliResult<Value> {
    let mut v = read_value(path)?;
    apply_overrides(&mut v, overrides).map_err(|e| e.at(path))?;
    Ok(v)
}

fn workers_from_env() -> CliResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                CliError::new(
                    "config",
                    format!("{WORKERS_ENV} must be a positive integer, got `{s}`"),
                )
            }),
        Err(_) => Ok(None),
    }
}

fn manifest(command: &str, inputs: Value, overrides: &[String], resolved: Value) -> Value {
    json!({
        "tool": "falqon",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "inputs": inputs,
        "overrides": overrides,
        "resolved": resolved,
    })
}

fn print_written(files: &[PathBuf]) {
    let list: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    println!("{}", json!({ "written": list }));
}

#[derive(Serialize)]
struct HistogramFile<'a> {
    shots: u64,
    argmax: String,
    decoded: Vec<u8>,
    counts: &'a std::collections::BTreeMap<String, u64>,
}

fn histogram_file(t: &Trajectory) -> HistogramFile<'_> {
    HistogramFile {
        shots: t.histogram.total(),
        argmax: t.argmax_bits(),
        decoded: t.decoded(),
        counts: &t.histogram.counts,
    }
}

pub fn solve(problem: &Path, config: &Path, out: &Path, overrides: &[String]) -> CliResult<()> {
    let p = load_problem(problem)?;
    let cfg: RunConfig = from_value(load_with_overrides(config, overrides)?, config)?;
    cfg.validate().map_err(|e| CliError::from(e).at(config))?;
    let t = run(&p, &cfg)?;

    let mut files = Outputs::default();
    files.add("trajectory.csv", t.to_csv());
    files.json("histogram.json", &histogram_file(&t));
    files.json(
        "manifest.json",
        &manifest(
            "solve",
            json!({ "problem": problem.display().to_string(), "config": config.display().to_string() }),
            overrides,
            json!({ "problem": p, "config": cfg, "seed": cfg.seed, "qubits": t.n_qubits }),
        ),
    );
    print_written(&files.write_under(out)?);
    Ok(())
}

#[derive(Serialize)]
struct ConvertedFile {
    #[serde(flatten)]
    qubo: QuboProblem,
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

pub fn convert(problem: &Path, gammas: &[f64], betas: &[f64], out: Option<&Path>) -> CliResult<()> {
    let p = inequality_to_equality(&load_problem(problem)?)?;
    // Unset weights default to the spectral-width bound plus one.
    let default = beta_upper_bound(&qubo_to_hamiltonian(&p.objective, false)) + 1.0;
    let pick = |given: &[f64], count: usize| {
        if given.is_empty() {
            vec![default; count]
        } else {
            given.to_vec()
        }
    };
    let (gammas, betas) = (pick(gammas, p.n_ic()), pick(betas, p.equalities.len()));
    let qubo = to_qubo(&p, &gammas, &betas)?;
    emit(
        &ConvertedFile {
            qubo,
            gammas,
            betas,
        },
        out,
    )
}

pub fn spectrum(problem: &Path, out: Option<&Path>) -> CliResult<()> {
    emit(&brute_force(&load_problem(problem)?)?, out)
}

pub fn resources(problem: &Path, algorithm: Algorithm, out: Option<&Path>) -> CliResult<()> {
    emit(&resource_estimate(&load_problem(problem)?, algorithm)?, out)
}

fn load_plan(path: &Path, overrides: &[String]) -> CliResult<ExperimentPlan> {
    let mut plan: ExperimentPlan = from_value(load_with_overrides(path, overrides)?, path)?;
    if plan.workers.is_none() {
        plan.workers = Some(workers_from_env()?.unwrap_or_else(default_workers));
    }
    plan.validate().map_err(|e| CliError::from(e).at(path))?;
    Ok(plan)
}

#[derive(Serialize)]
struct SvpSummary {
    variant: SvpVariant,
    config: RunConfig,
    qubits: usize,
    argmax: String,
    decoded: Vec<u8>,
    decodes_optimum: bool,
    final_success_prob: f64,
    max_lyapunov_increase: f64,
    monotone: bool,
}

pub fn experiment(plan_path: &Path, out: &Path, overrides: &[String]) -> CliResult<()> {
    let plan = load_plan(plan_path, overrides)?;
    let mut files = Outputs::default();
    match plan.family {
        Family::SvpExample => {
            let runs = run_svp_example(&SvpVariant::ALL, plan.layers)?;
            let mut summary = Vec::new();
            for r in runs {
                let name = serde_json::to_value(r.variant).expect("variant serializes");
                files.add(
                    format!("svp_{}.csv", name.as_str().unwrap_or("run")),
                    r.trajectory.to_csv(),
                );
                summary.push(SvpSummary {
                    variant: r.variant,
                    qubits: r.trajectory.n_qubits,
                    config: r.config,
                    argmax: r.argmax,
                    decoded: r.decoded,
                    decodes_optimum: r.decodes_optimum,
                    final_success_prob: r.final_success_prob,
                    max_lyapunov_increase: r.max_lyapunov_increase,
                    monotone: r.monotone,
                });
            }
            files.json("summary.json", &summary);
        }
        Family::RandomScaling => {
            let results = run_scaling(&plan)?;
            let mut summary = Vec::new();
            for r in results {
                let dir = PathBuf::from(format!("n{}", r.summary.n));
                for (i, t) in r.trajectories.iter().enumerate() {
                    files.add(dir.join(format!("instance_{i:03}.csv")), t.to_csv());
                }
                files.add(dir.join("layer_stats.csv"), layer_stats_csv(&r.stats));
                summary.push(r.summary);
            }
            files.json("summary.json", &summary);
        }
        Family::FalqonComparison => {
            let rows = run_comparison(&plan)?;
            let mut table = String::from(COMPARISON_HEADER);
            table.push('\n');
            for r in &rows {
                table.push_str(&r.csv_line());
                table.push('\n');
            }
            files.add("comparison.csv", table);
            files.json("summary.json", &rows);
        }
    }
    // The worker count never changes results, so it stays out of the manifest.
    let mut resolved = plan.clone();
    resolved.workers = None;
    files.json(
        "manifest.json",
        &manifest(
            "experiment",
            json!({ "plan": plan_path.display().to_string() }),
            overrides,
            serde_json::to_value(&resolved).expect("plan serializes"),
        ),
    );
    print_written(&files.write_under(out)?);
    Ok(())
}

#[derive(Serialize)]
struct TunedSize {
    n: usize,
    dt: f64,
    instances: usize,
    layers: usize,
    grid: Vec<f64>,
}

pub fn tune_dt(
    plan_path: &Path,
    grid: &[f64],
    out: Option<&Path>,
    overrides: &[String],
) -> CliResult<()> {
    let plan = load_plan(plan_path, overrides)?;
    let workers = plan.workers.unwrap_or(1);
    let mut rows = Vec::new();
    for &n in &plan.sizes {
        let (_, problems) = plan.instances(n)?;
        if problems.is_empty() {
            return Err(
                CliError::new("config", "tuning needs at least one instance").at(plan_path),
            );
        }
        let cfg = plan.run_config(Algorithm::FalqonIc, 1.0);
        let candidates = if grid.is_empty() {
            geometric_grid(initial_bound(&problems)?, GRID_RATIO, GRID_LEN)
        } else {
            grid.to_vec()
        };
        let dt = tune(&problems, &cfg, &candidates, workers)?;
        rows.push(TunedSize {
            n,
            dt,
            instances: problems.len(),
            layers: plan.layers,
            grid: candidates,
        });
    }
    emit(&rows, out)
}
