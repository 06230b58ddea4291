//! Layer-by-layer drivers for FALQON, FALQON-C and FALQON-IC.
//!
//! Each layer is `V(θ_k) = V_P V_M(θ_k)`: the mixer `e^{-iθ_kΔt H_M}` acts
//! first, then `V_P = e^{-iH_PΔt}`. The commutator expectation
//! `w = ⟨i[H_M, Q_c]⟩` measured on the new state gives `θ_{k+1} = Λ(w)`.
//!
//! With `θ₁ = 0` the first mixer is the identity, so the circuit equals the
//! product `∏ V_M(θ_k) V_P` followed by one extra `V_P`, which changes no
//! probability and no `⟨Q_c⟩`. Measuring after `V_P` is what makes the first
//! order change of `⟨Q_c⟩` equal to `θ Δt w`, so descent holds for small `Δt`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::control::{dt_bound, finite_diff_controller, FeedbackLaw, DEFAULT_FD_STEP};
use crate::error::{Error, Result};
use crate::observable::{build_qc, problem_diagonal, ObservableSpec, QcObservable, Variant};
use crate::oracle::{Landscape, MetricContext};
use crate::pauli::DiagonalObservable;
use crate::problem::{inequality_to_equality, to_qubo, QcboProblem};
use crate::simulator::{Histogram, InitKind, MixerSpec, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Plain FALQON on the penalized QUBO, `Q = Ĥ_P`.
    Falqon,
    /// Constraints enter the observable through penalty Hamiltonians.
    FalqonC,
    /// IC constraints enter the observable directly, without slack qubits.
    FalqonIc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerMode {
    Analytic,
    FiniteDiff,
    ExpectationSplit,
}

fn default_shots() -> u64 {
    10_000
}

fn default_fd_step() -> f64 {
    DEFAULT_FD_STEP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub observable: ObservableSpec,
    #[serde(default)]
    pub law: FeedbackLaw,
    pub dt: f64,
    /// Number of recorded layers `p`.
    pub layers: usize,
    #[serde(default)]
    pub theta_init: f64,
    #[serde(default)]
    pub mixer: MixerSpec,
    #[serde(default)]
    pub initial_state: InitKind,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to `expectation_split` for deflation and `analytic` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controller_mode: Option<ControllerMode>,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    /// Clamp each step to the stability bound instead of using `dt` as is.
    #[serde(default)]
    pub adaptive_dt: bool,
    #[serde(default = "default_shots")]
    pub shots: u64,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, observable: ObservableSpec, dt: f64, layers: usize) -> Self {
        Self {
            algorithm,
            observable,
            law: FeedbackLaw::default(),
            dt,
            layers,
            theta_init: 0.0,
            mixer: MixerSpec::TransverseX,
            initial_state: InitKind::PlusSuperposition,
            seed: 0,
            controller_mode: None,
            fd_step: DEFAULT_FD_STEP,
            adaptive_dt: false,
            shots: default_shots(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        if !self.theta_init.is_finite() {
            return Err(Error::Config("theta_init must be finite".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        self.law.validate()?;
        let v = self.observable.variant;
        let ok = match self.algorithm {
            Algorithm::Falqon | Algorithm::FalqonC => {
                matches!(v, Variant::Penalty | Variant::PenaltyIc)
            }
            Algorithm::FalqonIc => matches!(v, Variant::Deflation | Variant::FoldedSpectrum),
        };
        if !ok {
            return Err(Error::Config(format!(
                "observable variant {v:?} cannot be used with {:?}",
                self.algorithm
            )));
        }
        if self.controller_mode() == ControllerMode::ExpectationSplit && v != Variant::Deflation {
            return Err(Error::Config(
                "expectation_split needs the deflation observable".into(),
            ));
        }
        Ok(())
    }

    pub fn controller_mode(&self) -> ControllerMode {
        self.controller_mode
            .unwrap_or(match self.observable.variant {
                Variant::Deflation => ControllerMode::ExpectationSplit,
                _ => ControllerMode::Analytic,
            })
    }
}

/// Everything a run needs, compiled once from problem and config.
#[derive(Clone, Debug)]
pub struct Compiled {
    /// Generator of the problem layer.
    pub generator: DiagonalObservable,
    pub q: QcObservable,
    pub n_total: usize,
    /// Decision variables of the source problem (the leading qubits).
    pub n_decision: usize,
    costs: Vec<f64>,
    metrics: MetricContext,
}

impl Compiled {
    pub fn new(p: &QcboProblem, cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let landscape = Landscape::new(p)?;
        let spectrum = landscape.summary(p)?;
        let metrics = MetricContext::new(&landscape, &spectrum);

        let conv = inequality_to_equality(p)?;
        let (generator, q) = match cfg.algorithm {
            Algorithm::Falqon => {
                let qubo = to_qubo(&conv, &cfg.observable.gammas, &cfg.observable.betas)?;
                let d = DiagonalObservable::new(qubo.form.diagonal())?;
                let q = QcObservable {
                    variant: cfg.observable.variant,
                    diag: d.clone(),
                    pauli: Some(crate::pauli::qubo_to_hamiltonian(&qubo.form, true)),
                    deflation_projectors: Vec::new(),
                };
                (d, q)
            }
            Algorithm::FalqonC | Algorithm::FalqonIc => {
                let q = build_qc(&conv, &cfg.observable)?;
                (problem_diagonal(&conv, q.n())?, q)
            }
        };
        let n_total = q.n();
        cfg.mixer.check(n_total)?;
        Ok(Self {
            generator,
            q,
            n_total,
            n_decision: p.n,
            costs: landscape.costs,
            metrics,
        })
    }

    /// Marginal distribution over the decision variables.
    pub fn marginal(&self, s: &StateVector) -> Vec<f64> {
        let shift = self.n_total - self.n_decision;
        let mut out = vec![0.0; 1 << self.n_decision];
        for (j, a) in s.amplitudes().iter().enumerate() {
            out[j >> shift] += a.norm_sqr();
        }
        out
    }

    /// `w = ⟨i[H_M, Q_c]⟩` by the configured route.
    pub fn measure(&self, s: &StateVector, cfg: &RunConfig, dt: f64) -> Result<f64> {
        match cfg.controller_mode() {
            ControllerMode::Analytic => s.commutator_expectation(&self.q.diag, &cfg.mixer),
            ControllerMode::ExpectationSplit => s.split_commutator_expectation(
                &self.q.unshifted(),
                &self.q.deflation_projectors,
                &cfg.mixer,
            ),
            ControllerMode::FiniteDiff => {
                finite_diff_controller(s, &self.q.diag, &cfg.mixer, dt, cfg.fd_step, 1.0)
                    .map(|u| -u)
            }
        }
    }

    fn record(&self, s: &StateVector, layer: usize, theta: f64, dt: f64) -> Result<LayerRecord> {
        let marg = self.marginal(s);
        Ok(LayerRecord {
            layer,
            theta,
            lyapunov: s.expectation_diag(&self.q.diag)?,
            energy: self.costs.iter().zip(&marg).map(|(c, p)| c * p).sum(),
            approx_ratio: self.metrics.approximation_ratio(&marg),
            success_prob: self.metrics.success_probability(&marg),
            dt,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub layer: usize,
    pub theta: f64,
    /// `⟨Q_c⟩`.
    pub lyapunov: f64,
    /// `⟨H_P⟩`.
    pub energy: f64,
    /// `None` when every feasible outcome has the same cost.
    pub approx_ratio: Option<f64>,
    pub success_prob: f64,
    /// Step used for the layer that produced this state (0 for the initial state).
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub algorithm: Algorithm,
    pub n_qubits: usize,
    pub n_decision: usize,
    pub records: Vec<LayerRecord>,
    /// Stability bound at each recorded state (0 where the controller stalls).
    pub dt_bounds: Vec<f64>,
    pub final_probabilities: Vec<f64>,
    pub histogram: Histogram,
}

pub const CSV_HEADER: &str = "layer,theta,lyapunov,energy,approx_ratio,success_prob";

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let ra = r.approx_ratio.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.layer, r.theta, r.lyapunov, r.energy, ra, r.success_prob
            );
        }
        out
    }

    /// Most probable outcome over all qubits.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, &p) in self.final_probabilities.iter().enumerate() {
            if p > self.final_probabilities[best] {
                best = j;
            }
        }
        best
    }

    pub fn argmax_bits(&self) -> String {
        bits::bitstring(self.argmax(), self.n_qubits)
    }

    /// Decision-variable part of the most probable outcome.
    pub fn decoded(&self) -> Vec<u8> {
        bits::bits_of(self.argmax(), self.n_qubits)[..self.n_decision].to_vec()
    }

    pub fn lyapunov(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.lyapunov)
    }

    /// Largest single-step increase of `⟨Q_c⟩` (negative when strictly decreasing).
    pub fn max_lyapunov_increase(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| w[1].lyapunov - w[0].lyapunov)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.records.len() < 2 || self.max_lyapunov_increase() <= tol
    }

    pub fn final_record(&self) -> &LayerRecord {
        self.records.last().expect("at least one record")
    }
}

/// Runs Algorithm 1 for `cfg.layers` recorded layers.
///
/// Record 1 holds the initial state and `θ₁ = theta_init`; record `k` holds
/// the state after `k - 1` layers and the parameter `θ_k` measured on it.
pub fn run(p: &QcboProblem, cfg: &RunConfig) -> Result<Trajectory> {
    let c = Compiled::new(p, cfg)?;
    run_compiled(&c, cfg)
}

pub fn run_compiled(c: &Compiled, cfg: &RunConfig) -> Result<Trajectory> {
    let mut s = StateVector::new(c.n_total, cfg.initial_state)?;
    let norm_hm = cfg.mixer.norm(c.n_total);
    let norm_hp = c.generator.norm();

    let mut theta = cfg.theta_init;
    let mut theta_prev = 0.0;
    let mut records = Vec::with_capacity(cfg.layers);
    let mut bounds = Vec::with_capacity(cfg.layers);
    let mut dt_next = cfg.dt;

    records.push(c.record(&s, 1, theta, 0.0)?);
    let w0 = s.commutator_expectation(&c.q.diag, &cfg.mixer)?;
    bounds.push(dt_bound(w0, norm_hm, norm_hp, theta_prev).dt);

    for k in 1..cfg.layers {
        let dt = dt_next;
        s.apply_mixer_layer(&cfg.mixer, theta, dt)?;
        s.apply_problem_layer(&c.generator, dt)?;
        let w = c.measure(&s, cfg, dt)?;
        theta_prev = theta;
        theta = cfg.law.apply(w);
        let bound = dt_bound(w, norm_hm, norm_hp, theta_prev).dt;
        bounds.push(bound);
        if cfg.adaptive_dt && bound > 0.0 {
            dt_next = cfg.dt.min(bound);
        }
        records.push(c.record(&s, k + 1, theta, dt)?);
    }

    Ok(Trajectory {
        algorithm: cfg.algorithm,
        n_qubits: c.n_total,
        n_decision: c.n_decision,
        records,
        dt_bounds: bounds,
        histogram: s.sample(cfg.shots, cfg.seed)?,
        final_probabilities: s.probabilities(),
    })
}

/// Independent runs over many problems; results are in input order and do
/// not depend on `workers`. Instance `i` samples with seed `cfg.seed + i`.
pub fn run_sweep(
    problems: &[QcboProblem],
    cfg: &RunConfig,
    workers: usize,
) -> Result<Vec<Trajectory>> {
    if let Some(first) = problems.first() {
        if let Some((i, _)) = problems.iter().enumerate().find(|(_, p)| p.n != first.n) {
            return Err(Error::Instance {
                index: i,
                source: Box::new(Error::Dimension {
                    expected: first.n,
                    got: problems[i].n,
                }),
            });
        }
    }
    let job = |(i, p): (usize, &QcboProblem)| {
        let mut c = cfg.clone();
        c.seed = cfg.seed.wrapping_add(i as u64);
        run(p, &c).map_err(|e| Error::Instance {
            index: i,
            source: Box::new(e),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| problems.par_iter().enumerate().map(job).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{random_instance, svp_instance};

    fn deflation_cfg(layers: usize) -> RunConfig {
        RunConfig::new(
            Algorithm::FalqonIc,
            ObservableSpec::deflation(vec![3.0]),
            0.1,
            layers,
        )
    }

    #[test]
    fn single_layer_is_initial_state() {
        let t = run(&svp_instance(), &deflation_cfg(1)).unwrap();
        assert_eq!(t.records.len(), 1);
        let r = &t.records[0];
        assert_eq!(r.theta, 0.0);
        assert!((r.lyapunov - 39.0 / 8.0).abs() < 1e-12);
        assert!((r.success_prob - 0.125).abs() < 1e-12);
        assert!(t
            .final_probabilities
            .iter()
            .all(|p| (p - 0.125).abs() < 1e-12));
    }

    #[test]
    fn svp_deflation_converges() {
        let t = run(&svp_instance(), &deflation_cfg(400)).unwrap();
        assert_eq!(t.argmax_bits(), "100");
        assert!(t.is_monotone(1e-9), "{}", t.max_lyapunov_increase());
    }

    #[test]
    fn controller_modes_agree() {
        let p = svp_instance();
        let mut a = deflation_cfg(60);
        a.controller_mode = Some(ControllerMode::Analytic);
        let b = deflation_cfg(60);
        let ta = run(&p, &a).unwrap();
        let tb = run(&p, &b).unwrap();
        for (x, y) in ta.records.iter().zip(&tb.records) {
            assert!((x.theta - y.theta).abs() < 1e-10);
        }
        let mut f = deflation_cfg(60);
        f.controller_mode = Some(ControllerMode::FiniteDiff);
        let tf = run(&p, &f).unwrap();
        for (x, y) in ta.records.iter().zip(&tf.records) {
            assert!((x.theta - y.theta).abs() < 1e-4);
        }
    }

    #[test]
    fn pairing_errors() {
        let p = svp_instance();
        let bad = RunConfig::new(
            Algorithm::Falqon,
            ObservableSpec::deflation(vec![3.0]),
            0.1,
            5,
        );
        assert!(matches!(run(&p, &bad), Err(Error::Config(_))));
        let mut split = RunConfig::new(
            Algorithm::FalqonIc,
            ObservableSpec::folded_spectrum(1.3),
            0.03,
            5,
        );
        split.controller_mode = Some(ControllerMode::ExpectationSplit);
        assert!(matches!(run(&p, &split), Err(Error::Config(_))));
        assert!(run(
            &p,
            &RunConfig::new(
                Algorithm::FalqonIc,
                ObservableSpec::deflation(vec![3.0]),
                0.1,
                0
            )
        )
        .is_err());
    }

    #[test]
    fn csv_layout() {
        let t = run(&svp_instance(), &deflation_cfg(3)).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn sweep_is_worker_independent() {
        let problems: Vec<_> = (0..6).map(|s| random_instance(5, 1, s).unwrap()).collect();
        let cfg = RunConfig::new(
            Algorithm::FalqonIc,
            ObservableSpec::deflation(vec![8.0]),
            0.01,
            40,
        );
        let a = run_sweep(&problems, &cfg, 1).unwrap();
        let b = run_sweep(&problems, &cfg, 4).unwrap();
        assert_eq!(a, b);
        assert!(run_sweep(&[], &cfg, 2).unwrap().is_empty());
        let mixed = vec![problems[0].clone(), random_instance(4, 1, 0).unwrap()];
        assert!(matches!(
            run_sweep(&mixed, &cfg, 2),
            Err(Error::Instance { index: 1, .. })
        ));
    }
}
