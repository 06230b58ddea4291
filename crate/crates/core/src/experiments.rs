//! Benchmark protocols: the SVP walkthrough, random-instance scaling sweeps,
//! layers-to-threshold statistics and the FALQON vs FALQON-IC comparison.

use serde::{Deserialize, Serialize};

use crate::algorithms::{run, run_sweep, Algorithm, RunConfig, Trajectory};
use crate::control::FeedbackLaw;
use crate::error::{Error, Result};
use crate::observable::{problem_diagonal, ObservableSpec};
use crate::problem::{random_instance, svp_instance, QcboProblem};

/// Step tolerance for the Lyapunov non-increase check.
pub const MONOTONE_TOL: f64 = 1e-9;
/// Ratio of the automatic Δt grid.
pub const GRID_RATIO: f64 = 0.8;
pub const GRID_LEN: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    SvpExample,
    RandomScaling,
    FalqonComparison,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub r_a_target: f64,
    pub sp_target: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            r_a_target: 0.98,
            sp_target: 0.25,
        }
    }
}

fn default_instances() -> usize {
    50
}
fn default_layers() -> usize {
    2000
}
fn default_gamma() -> f64 {
    8.0
}
fn default_kappa() -> f64 {
    1.0
}

/// A reproducible experiment; every instance seed derives from `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub family: Family,
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default = "default_instances")]
    pub instances_per_size: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Per-size Δt for FALQON-IC; empty means tune automatically.
    #[serde(default)]
    pub dt: Vec<f64>,
    /// Per-size Δt for FALQON in the comparison family.
    #[serde(default)]
    pub falqon_dt: Vec<f64>,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `None` lets the caller decide.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl ExperimentPlan {
    pub fn new(family: Family, sizes: Vec<usize>) -> Self {
        Self {
            family,
            sizes,
            instances_per_size: default_instances(),
            thresholds: Thresholds::default(),
            dt: Vec::new(),
            falqon_dt: Vec::new(),
            layers: default_layers(),
            gamma: default_gamma(),
            kappa: default_kappa(),
            seed: 0,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.thresholds;
        let inside = |v: f64| v > 0.0 && v < 1.0;
        if !inside(t.r_a_target) || !inside(t.sp_target) {
            return Err(Error::Config("thresholds must lie in (0, 1)".into()));
        }
        if self.family != Family::SvpExample && self.sizes.is_empty() {
            return Err(Error::Config("sizes must not be empty".into()));
        }
        if self.layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        for (name, table) in [("dt", &self.dt), ("falqon_dt", &self.falqon_dt)] {
            if !table.is_empty() && table.len() != self.sizes.len() {
                return Err(Error::Config(format!(
                    "{name} has {} entries for {} sizes",
                    table.len(),
                    self.sizes.len()
                )));
            }
            if table.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Config(format!("{name} entries must be positive")));
            }
        }
        if self.family == Family::FalqonComparison && self.falqon_dt.is_empty() {
            return Err(Error::Config("comparison plans need falqon_dt".into()));
        }
        if !(self.gamma > 0.0) || !(self.kappa > 0.0) {
            return Err(Error::Config("gamma and kappa must be positive".into()));
        }
        Ok(())
    }

    /// Seed of instance `i` at size `n`.
    pub fn instance_seed(&self, n: usize, i: usize) -> u64 {
        self.seed
            .wrapping_mul(1_000_003)
            .wrapping_add((n as u64) << 32)
            .wrapping_add(i as u64)
    }

    pub fn instances(&self, n: usize) -> Result<(Vec<u64>, Vec<QcboProblem>)> {
        let seeds: Vec<u64> = (0..self.instances_per_size)
            .map(|i| self.instance_seed(n, i))
            .collect();
        let problems = seeds
            .iter()
            .map(|&s| random_instance(n, 1, s))
            .collect::<Result<_>>()?;
        Ok((seeds, problems))
    }

    /// Run settings shared by every instance of `algorithm` in this plan.
    pub fn run_config(&self, algorithm: Algorithm, dt: f64) -> RunConfig {
        let observable = match algorithm {
            Algorithm::FalqonIc => ObservableSpec::deflation(vec![self.gamma]),
            _ => ObservableSpec::penalty_ic(vec![self.gamma], vec![]),
        };
        let mut cfg = RunConfig::new(algorithm, observable, dt, self.layers);
        cfg.law = FeedbackLaw::Identity { kappa: self.kappa };
        cfg.seed = self.seed;
        cfg
    }

    fn workers(&self) -> usize {
        self.workers.unwrap_or_else(default_workers)
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

// ---------------------------------------------------------------- SVP

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvpVariant {
    Falqon,
    FalqonC,
    Deflation,
    FoldedSpectrum,
}

impl SvpVariant {
    pub const ALL: [SvpVariant; 4] = [
        SvpVariant::Falqon,
        SvpVariant::FalqonC,
        SvpVariant::Deflation,
        SvpVariant::FoldedSpectrum,
    ];

    /// Run settings of the walkthrough: `κ = 1`, `θ₁ = 0`, `|+⟩` start.
    pub fn config(self, layers: usize) -> RunConfig {
        let (alg, spec, dt) = match self {
            SvpVariant::Falqon => (
                Algorithm::Falqon,
                ObservableSpec::penalty_ic(vec![3.0], vec![]),
                0.08,
            ),
            SvpVariant::FalqonC => (
                Algorithm::FalqonC,
                ObservableSpec::penalty_ic(vec![3.0], vec![]),
                0.08,
            ),
            SvpVariant::Deflation => (
                Algorithm::FalqonIc,
                ObservableSpec::deflation(vec![3.0]),
                0.1,
            ),
            SvpVariant::FoldedSpectrum => (
                Algorithm::FalqonIc,
                ObservableSpec::folded_spectrum(1.3),
                0.03,
            ),
        };
        RunConfig::new(alg, spec, dt, layers)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvpOutcome {
    pub variant: SvpVariant,
    pub config: RunConfig,
    pub argmax: String,
    pub decoded: Vec<u8>,
    pub decodes_optimum: bool,
    pub final_success_prob: f64,
    pub max_lyapunov_increase: f64,
    pub monotone: bool,
    pub trajectory: Trajectory,
}

/// Runs the SVP walkthrough for the chosen variants.
pub fn run_svp_example(variants: &[SvpVariant], layers: usize) -> Result<Vec<SvpOutcome>> {
    let p = svp_instance();
    variants
        .iter()
        .map(|&v| {
            let cfg = v.config(layers);
            let t = run(&p, &cfg)?;
            let decoded = t.decoded();
            Ok(SvpOutcome {
                variant: v,
                argmax: t.argmax_bits(),
                decodes_optimum: decoded == [1, 0, 0],
                decoded,
                final_success_prob: t.final_record().success_prob,
                max_lyapunov_increase: t.max_lyapunov_increase(),
                monotone: t.is_monotone(MONOTONE_TOL),
                config: cfg,
                trajectory: t,
            })
        })
        .collect()
}

// ---------------------------------------------------------------- statistics

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Standard error of the mean (sample standard deviation over `√N`).
pub fn standard_error(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Trailing moving average over `window` samples (shorter at the start).
pub fn moving_average(v: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let mut out = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    for i in 0..v.len() {
        acc += v[i];
        if i >= w {
            acc -= v[i - w];
        }
        out.push(acc / (i + 1).min(w) as f64);
    }
    out
}

/// First recorded layer whose metric reaches `target`.
pub fn layers_to_threshold(values: impl IntoIterator<Item = f64>, target: f64) -> Option<usize> {
    values.into_iter().position(|v| v >= target).map(|i| i + 1)
}

/// Layers-to-threshold over a set of instances, with explicit censoring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdStat {
    pub target: f64,
    pub reached: usize,
    pub censored: usize,
    /// Per instance; `None` when the threshold was never reached.
    pub layers: Vec<Option<usize>>,
    /// Mean over instances that reached the target.
    pub mean_reached: Option<f64>,
    /// Mean with censored instances counted at the full depth.
    pub mean_censored_at_depth: f64,
}

impl ThresholdStat {
    fn new(target: f64, layers: Vec<Option<usize>>, depth: usize) -> Self {
        let hit: Vec<f64> = layers.iter().flatten().map(|&k| k as f64).collect();
        let all: Vec<f64> = layers.iter().map(|k| k.unwrap_or(depth) as f64).collect();
        Self {
            target,
            reached: hit.len(),
            censored: layers.len() - hit.len(),
            mean_reached: (!hit.is_empty()).then(|| mean_std(&hit).0),
            mean_censored_at_depth: mean_std(&all).0,
            layers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerStat {
    pub layer: usize,
    pub theta_mean: f64,
    pub theta_std: f64,
    pub ra_mean: f64,
    pub ra_std: f64,
    pub sp_mean: f64,
    pub sp_std: f64,
}

pub const LAYER_STAT_HEADER: &str = "layer,theta_mean,theta_std,ra_mean,ra_std,sp_mean,sp_std";

pub fn layer_stats(ts: &[Trajectory]) -> Vec<LayerStat> {
    let depth = ts.iter().map(|t| t.records.len()).min().unwrap_or(0);
    (0..depth)
        .map(|k| {
            let col = |f: &dyn Fn(&Trajectory) -> Option<f64>| -> Vec<f64> {
                ts.iter().filter_map(f).collect()
            };
            let (theta_mean, theta_std) = mean_std(&col(&|t| Some(t.records[k].theta)));
            let (ra_mean, ra_std) = mean_std(&col(&|t| t.records[k].approx_ratio));
            let (sp_mean, sp_std) = mean_std(&col(&|t| Some(t.records[k].success_prob)));
            LayerStat {
                layer: k + 1,
                theta_mean,
                theta_std,
                ra_mean,
                ra_std,
                sp_mean,
                sp_std,
            }
        })
        .collect()
}

pub fn layer_stats_csv(stats: &[LayerStat]) -> String {
    let mut out = String::from(LAYER_STAT_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.layer, s.theta_mean, s.theta_std, s.ra_mean, s.ra_std, s.sp_mean, s.sp_std
        ));
    }
    out
}

// ---------------------------------------------------------------- Δt tuning

/// `r, r·ratio, r·ratio², …` (`len` values).
pub fn geometric_grid(start: f64, ratio: f64, len: usize) -> Vec<f64> {
    std::iter::successors(Some(start), |v| Some(v * ratio))
        .take(len)
        .collect()
}

/// Supremum of the stability bound at `θ = 0` over the commutator value:
/// `1 / (2‖H_P‖)`, minimized over the sample.
pub fn initial_bound(problems: &[QcboProblem]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for p in problems {
        let norm = problem_diagonal(p, p.n)?.norm();
        if norm > 0.0 {
            best = best.min(0.5 / norm);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Config("every sampled Hamiltonian is zero".into()))
    }
}

/// Largest grid value whose trajectories are all Lyapunov non-increasing.
pub fn tune_dt(
    problems: &[QcboProblem],
    cfg: &RunConfig,
    grid: &[f64],
    workers: usize,
) -> Result<f64> {
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("Δt grid must be strictly descending".into()));
    }
    for &dt in grid {
        let mut c = cfg.clone();
        c.dt = dt;
        let ts = run_sweep(problems, &c, workers)?;
        if ts.iter().all(|t| t.is_monotone(MONOTONE_TOL)) {
            return Ok(dt);
        }
    }
    Err(Error::Tuning(grid.to_vec()))
}

/// Geometric grid starting at [`initial_bound`], then [`tune_dt`].
pub fn auto_tune_dt(problems: &[QcboProblem], cfg: &RunConfig, workers: usize) -> Result<f64> {
    let grid = geometric_grid(initial_bound(problems)?, GRID_RATIO, GRID_LEN);
    tune_dt(problems, cfg, &grid, workers)
}

// ---------------------------------------------------------------- scaling

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub dt: f64,
    pub dt_tuned: bool,
    pub seeds: Vec<u64>,
    pub layers_to_ra: ThresholdStat,
    pub layers_to_sp: ThresholdStat,
    pub final_sp_mean: f64,
    pub final_ra_mean: f64,
    pub monotone_instances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeResult {
    pub summary: SizeSummary,
    pub stats: Vec<LayerStat>,
    /// Per-instance trajectories (final amplitudes dropped to bound memory).
    pub trajectories: Vec<Trajectory>,
}

fn slim(mut t: Trajectory) -> Trajectory {
    t.final_probabilities = Vec::new();
    t
}

/// Random instances with one IC constraint, FALQON-IC deflation.
pub fn run_scaling(plan: &ExperimentPlan) -> Result<Vec<SizeResult>> {
    plan.validate()?;
    let workers = plan.workers();
    plan.sizes
        .iter()
        .enumerate()
        .map(|(si, &n)| {
            let (seeds, problems) = plan.instances(n)?;
            let mut cfg = plan.run_config(Algorithm::FalqonIc, 1.0);
            let (dt, tuned) = match plan.dt.get(si) {
                Some(&dt) => (dt, false),
                None if problems.is_empty() => (f64::NAN, false),
                None => (auto_tune_dt(&problems, &cfg, workers)?, true),
            };
            cfg.dt = dt;
            let ts = if problems.is_empty() {
                Vec::new()
            } else {
                run_sweep(&problems, &cfg, workers)?
            };
            let t = plan.thresholds;
            let ra = ts
                .iter()
                .map(|tr| {
                    layers_to_threshold(
                        tr.records.iter().map(|r| r.approx_ratio.unwrap_or(0.0)),
                        t.r_a_target,
                    )
                })
                .collect();
            let sp = ts
                .iter()
                .map(|tr| {
                    layers_to_threshold(tr.records.iter().map(|r| r.success_prob), t.sp_target)
                })
                .collect();
            let finals = |f: &dyn Fn(&Trajectory) -> Option<f64>| {
                mean_std(&ts.iter().filter_map(f).collect::<Vec<_>>()).0
            };
            let summary = SizeSummary {
                n,
                dt,
                dt_tuned: tuned,
                seeds,
                layers_to_ra: ThresholdStat::new(t.r_a_target, ra, plan.layers),
                layers_to_sp: ThresholdStat::new(t.sp_target, sp, plan.layers),
                final_sp_mean: finals(&|tr| Some(tr.final_record().success_prob)),
                final_ra_mean: finals(&|tr| tr.final_record().approx_ratio),
                monotone_instances: ts.iter().filter(|tr| tr.is_monotone(MONOTONE_TOL)).count(),
            };
            Ok(SizeResult {
                stats: layer_stats(&ts),
                summary,
                trajectories: ts.into_iter().map(slim).collect(),
            })
        })
        .collect()
}

// ---------------------------------------------------------------- comparison

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub instances: usize,
    pub qubits_ic: usize,
    pub qubits_falqon: usize,
    pub dt_ic: f64,
    pub dt_falqon: f64,
    pub sp_ic_mean: f64,
    pub sp_ic_se: f64,
    pub sp_falqon_mean: f64,
    pub sp_falqon_se: f64,
    pub seeds: Vec<u64>,
    pub sp_ic: Vec<f64>,
    pub sp_falqon: Vec<f64>,
}

pub const COMPARISON_HEADER: &str =
    "n,instances,qubits_ic,qubits_falqon,dt_ic,dt_falqon,sp_ic_mean,sp_ic_se,sp_falqon_mean,sp_falqon_se";

impl ComparisonRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.instances,
            self.qubits_ic,
            self.qubits_falqon,
            self.dt_ic,
            self.dt_falqon,
            self.sp_ic_mean,
            self.sp_ic_se,
            self.sp_falqon_mean,
            self.sp_falqon_se
        )
    }
}

/// FALQON-IC (deflation) against FALQON on the slack-based QUBO.
pub fn run_comparison(plan: &ExperimentPlan) -> Result<Vec<ComparisonRow>> {
    plan.validate()?;
    if plan.dt.is_empty() {
        return Err(Error::Config(
            "comparison plans need dt for FALQON-IC".into(),
        ));
    }
    let workers = plan.workers();
    let mut rows = Vec::new();
    for (si, &n) in plan.sizes.iter().enumerate() {
        if plan.instances_per_size == 0 {
            continue;
        }
        let (seeds, problems) = plan.instances(n)?;
        let ic = run_sweep(
            &problems,
            &plan.run_config(Algorithm::FalqonIc, plan.dt[si]),
            workers,
        )?;
        let fq = run_sweep(
            &problems,
            &plan.run_config(Algorithm::Falqon, plan.falqon_dt[si]),
            workers,
        )?;
        let sp = |ts: &[Trajectory]| -> Vec<f64> {
            ts.iter().map(|t| t.final_record().success_prob).collect()
        };
        let (sp_ic, sp_fq) = (sp(&ic), sp(&fq));
        rows.push(ComparisonRow {
            n,
            instances: problems.len(),
            qubits_ic: ic[0].n_qubits,
            qubits_falqon: fq[0].n_qubits,
            dt_ic: plan.dt[si],
            dt_falqon: plan.falqon_dt[si],
            sp_ic_mean: mean_std(&sp_ic).0,
            sp_ic_se: standard_error(&sp_ic),
            sp_falqon_mean: mean_std(&sp_fq).0,
            sp_falqon_se: standard_error(&sp_fq),
            seeds,
            sp_ic,
            sp_falqon: sp_fq,
        });
    }
    Ok(rows)
}

/// The comparison protocol with the paper's step sizes.
pub fn paper_comparison_plan(
    sizes: &[usize],
    instances: usize,
    layers: usize,
) -> Result<ExperimentPlan> {
    const IC: [(usize, f64, f64); 4] = [
        (7, 0.008, 0.0058),
        (8, 0.0048, 0.0035),
        (9, 0.0048, 0.003),
        (10, 0.004, 0.0025),
    ];
    let mut plan = ExperimentPlan::new(Family::FalqonComparison, sizes.to_vec());
    plan.instances_per_size = instances;
    plan.layers = layers;
    for &n in sizes {
        let (_, a, b) = IC
            .iter()
            .find(|r| r.0 == n)
            .ok_or_else(|| Error::Config(format!("no published step size for n = {n}")))?;
        plan.dt.push(*a);
        plan.falqon_dt.push(*b);
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistics_helpers() {
        assert_eq!(mean_std(&[1.0, 3.0]), (2.0, 1.0));
        assert!((standard_error(&[1.0, 3.0]) - 1.0).abs() < 1e-15);
        assert_eq!(
            moving_average(&[1.0, 2.0, 3.0, 4.0], 2),
            vec![1.0, 1.5, 2.5, 3.5]
        );
        assert_eq!(layers_to_threshold([0.1, 0.2, 0.3], 0.25), Some(3));
        assert_eq!(layers_to_threshold([0.1, 0.2], 0.25), None);
        let s = ThresholdStat::new(0.25, vec![Some(4), None, Some(2)], 10);
        assert_eq!((s.reached, s.censored), (2, 1));
        assert_eq!(s.mean_reached, Some(3.0));
        assert!((s.mean_censored_at_depth - 16.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn grid_shape() {
        let g = geometric_grid(1.0, 0.8, 3);
        assert_eq!(g.len(), 3);
        assert!((g[2] - 0.64).abs() < 1e-15);
    }

    #[test]
    fn tune_picks_largest_passing_value() {
        let p = svp_instance();
        let cfg = SvpVariant::Deflation.config(200);
        assert_eq!(
            tune_dt(std::slice::from_ref(&p), &cfg, &[0.1, 0.05, 0.01], 1).unwrap(),
            0.1
        );
        assert!(tune_dt(std::slice::from_ref(&p), &cfg, &[0.01, 0.1], 1).is_err());
        // A step this large overshoots immediately.
        match tune_dt(&[p], &cfg, &[5.0, 3.0], 1) {
            Err(Error::Tuning(g)) => assert_eq!(g, vec![5.0, 3.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singleton_summary_matches_trajectory() {
        let mut plan = ExperimentPlan::new(Family::RandomScaling, vec![5]);
        plan.instances_per_size = 1;
        plan.layers = 60;
        plan.dt = vec![0.01];
        plan.workers = Some(1);
        let r = run_scaling(&plan).unwrap();
        let t = &r[0].trajectories[0];
        let last = r[0].stats.last().unwrap();
        assert_eq!(last.sp_mean, t.final_record().success_prob);
        assert_eq!(last.sp_std, 0.0);
        assert_eq!(r[0].summary.seeds, vec![plan.instance_seed(5, 0)]);
    }

    #[test]
    fn plan_validation() {
        let mut plan = ExperimentPlan::new(Family::RandomScaling, vec![]);
        assert!(plan.validate().is_err());
        plan.sizes = vec![6];
        plan.dt = vec![0.1, 0.2];
        assert!(plan.validate().is_err());
        plan.dt.clear();
        plan.thresholds.sp_target = 1.0;
        assert!(plan.validate().is_err());
        let js = r#"{"family":"random_scaling","sizes":[8,10],"layers":100}"#;
        let plan: ExperimentPlan = serde_json::from_str(js).unwrap();
        assert_eq!(plan.instances_per_size, 50);
        assert_eq!(plan.gamma, 8.0);
    }

    #[test]
    fn comparison_qubit_counts() {
        let plan = paper_comparison_plan(&[7], 1, 5).unwrap();
        let rows = run_comparison(&plan).unwrap();
        assert_eq!((rows[0].qubits_ic, rows[0].qubits_falqon), (7, 12));
        let mut empty = paper_comparison_plan(&[7], 0, 5).unwrap();
        empty.workers = Some(1);
        assert!(run_comparison(&empty).unwrap().is_empty());
    }
}
