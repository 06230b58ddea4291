//! Brute-force ground truth, performance metrics and per-layer resource counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::Algorithm;
use crate::bits;
use crate::error::{check_len, Error, Result};
use crate::pauli::{qubo_to_hamiltonian, PauliSum};
use crate::problem::{inequality_to_equality, to_qubo_counted, QcboProblem, SlackOrigin};
use crate::simulator::StateVector;

/// Costs closer than this are treated as degenerate.
pub const COST_TOL: f64 = 1e-9;

/// Extreme and reference eigenvalues of `H_P`, plus the optimal feasible set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub e_min: f64,
    pub e_max: f64,
    pub e_f_min: f64,
    pub e_f_max: f64,
    /// Smallest feasible cost strictly above `e_f_min`.
    pub e_bar: Option<f64>,
    /// Largest cost over IC configurations.
    pub e_n1: Option<f64>,
    pub e_g: f64,
    pub optimal_set: Vec<Vec<u8>>,
}

/// Cost and feasibility of every basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct Landscape {
    pub n: usize,
    pub costs: Vec<f64>,
    pub feasible: Vec<bool>,
}

impl Landscape {
    pub fn new(p: &QcboProblem) -> Result<Self> {
        bits::check_cap(p.n)?;
        let n = p.n;
        let costs = p.objective.diagonal();
        let feasible = (0..1usize << n)
            .into_par_iter()
            .map(|j| p.feasible_unchecked(&bits::bits_of(j, n)))
            .collect();
        Ok(Self { n, costs, feasible })
    }

    pub fn summary(&self, p: &QcboProblem) -> Result<SpectrumSummary> {
        let mut e_min = f64::INFINITY;
        let mut e_max = f64::NEG_INFINITY;
        let mut e_f_min = f64::INFINITY;
        let mut e_f_max = f64::NEG_INFINITY;
        for (&c, &f) in self.costs.iter().zip(&self.feasible) {
            e_min = e_min.min(c);
            e_max = e_max.max(c);
            if f {
                e_f_min = e_f_min.min(c);
                e_f_max = e_f_max.max(c);
            }
        }
        if !e_f_min.is_finite() {
            return Err(Error::Infeasible(
                "no bit string satisfies every constraint".into(),
            ));
        }
        let e_bar = self
            .feasible_costs()
            .filter(|&c| c > e_f_min + COST_TOL)
            .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.min(c))));
        let e_n1 = p
            .invalid_indices()
            .into_iter()
            .map(|j| self.costs[j])
            .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.max(c))));
        let optimal_set = self
            .optimal_indices(e_f_min)
            .into_iter()
            .map(|j| bits::bits_of(j, self.n))
            .collect();
        Ok(SpectrumSummary {
            e_min,
            e_max,
            e_f_min,
            e_f_max,
            e_bar,
            e_n1,
            e_g: e_max - e_min,
            optimal_set,
        })
    }

    fn feasible_costs(&self) -> impl Iterator<Item = f64> + '_ {
        self.costs
            .iter()
            .zip(&self.feasible)
            .filter(|(_, &f)| f)
            .map(|(&c, _)| c)
    }

    pub fn optimal_indices(&self, e_f_min: f64) -> Vec<usize> {
        (0..self.costs.len())
            .filter(|&j| self.feasible[j] && self.costs[j] <= e_f_min + COST_TOL)
            .collect()
    }
}

pub fn brute_force(p: &QcboProblem) -> Result<SpectrumSummary> {
    Landscape::new(p)?.summary(p)
}

/// Precomputed weights for evaluating `r_a` and `S_p` once per layer.
#[derive(Clone, Debug)]
pub struct MetricContext {
    /// Per-index `r_a` weight, zero outside the feasible set.
    ratio_weight: Option<Vec<f64>>,
    optimal: Vec<usize>,
}

impl MetricContext {
    pub fn new(land: &Landscape, spec: &SpectrumSummary) -> Self {
        let span = spec.e_f_min - spec.e_f_max;
        let ratio_weight = (span.abs() > COST_TOL).then(|| {
            land.costs
                .iter()
                .zip(&land.feasible)
                .map(|(&c, &f)| if f { (c - spec.e_f_max) / span } else { 0.0 })
                .collect()
        });
        let optimal = spec.optimal_set.iter().map(|x| bits::index_of(x)).collect();
        Self {
            ratio_weight,
            optimal,
        }
    }

    /// `r_a`, or `None` when the feasible spectrum is degenerate.
    pub fn approximation_ratio(&self, probs: &[f64]) -> Option<f64> {
        self.ratio_weight
            .as_ref()
            .map(|w| w.iter().zip(probs).map(|(w, p)| w * p).sum())
    }

    pub fn success_probability(&self, probs: &[f64]) -> f64 {
        self.optimal.iter().map(|&j| probs[j]).sum()
    }
}

/// `Σ_{j∈F} p_j (cost_j - e^f_max) / (e^f_min - e^f_max)`.
pub fn approximation_ratio(
    s: &StateVector,
    p: &QcboProblem,
    spec: &SpectrumSummary,
) -> Result<f64> {
    check_len(p.n, s.n())?;
    let land = Landscape::new(p)?;
    MetricContext::new(&land, spec)
        .approximation_ratio(&s.probabilities())
        .ok_or_else(|| Error::UndefinedMetric("every feasible outcome has the same cost".into()))
}

/// Probability mass on the optimal feasible set.
pub fn success_probability(s: &StateVector, spec: &SpectrumSummary) -> Result<f64> {
    if let Some(x) = spec.optimal_set.first() {
        check_len(x.len(), s.n())?;
    }
    Ok(spec
        .optimal_set
        .iter()
        .map(|x| s.probability(bits::index_of(x)))
        .sum())
}

/// Gate and term counts for one layer with the transverse mixer and a `|+⟩`
/// initial state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub algorithm: Algorithm,
    pub qubits: usize,
    pub rx_gates: usize,
    pub rz_gates: usize,
    pub cnot_gates: usize,
    pub hadamard_gates: usize,
    /// Slack qubits from inequality conversion.
    pub n_s1: usize,
    /// `Z` terms of the generator on decision variables.
    pub l1: usize,
    /// `ZZ` terms of the generator among decision variables.
    pub l2: usize,
    /// `Z` contributions on IC slack qubits, one per `s_q·h_j` product.
    pub l3: usize,
    /// `ZZ` terms coupling a decision variable to an IC slack qubit.
    pub l4: usize,
    /// `Z` terms on inequality slack qubits.
    pub l5: usize,
    /// `ZZ` terms touching an inequality slack qubit.
    pub l6: usize,
    /// Distinct IC slack qubits carrying a `Z` term after like terms merge.
    pub l3_distinct: usize,
}

/// Counts terms of the layer generator as constructed.
///
/// FALQON uses the penalized QUBO Hamiltonian with unit weights; FALQON-C
/// and FALQON-IC keep constraints in the observable, so their generator is
/// the objective alone.
pub fn resource_estimate(p: &QcboProblem, algorithm: Algorithm) -> Result<ResourceEstimate> {
    let converted = inequality_to_equality(p)?;
    let n_s1: usize = converted
        .slack
        .iter()
        .filter(|b| matches!(b.origin, SlackOrigin::Inequality(_)))
        .map(|b| b.len)
        .sum();
    let n_dec = converted.n_original();
    let n_ic_slack = if converted.n_ic() > 0 {
        converted.n_ic() * n_dec.saturating_sub(2)
    } else {
        0
    };

    let (generator, products) = match algorithm {
        Algorithm::Falqon => {
            let gammas = vec![1.0; converted.n_ic()];
            let betas = vec![1.0; converted.equalities.len()];
            let (q, products) = to_qubo_counted(&converted, &gammas, &betas)?;
            (qubo_to_hamiltonian(&q.form, false), products)
        }
        Algorithm::FalqonC | Algorithm::FalqonIc => {
            (qubo_to_hamiltonian(&converted.objective, false), 0)
        }
    };
    let qubits = match algorithm {
        Algorithm::Falqon | Algorithm::FalqonC => converted.n + n_ic_slack,
        Algorithm::FalqonIc => converted.n,
    };

    // Qubit classes: decision [0, n_dec), inequality slack [n_dec, n), IC slack beyond.
    let class = |q: usize| {
        if q < n_dec {
            0
        } else if q < converted.n {
            1
        } else {
            2
        }
    };
    let mut r = ResourceEstimate {
        algorithm,
        qubits,
        rx_gates: qubits,
        rz_gates: 0,
        cnot_gates: 0,
        hadamard_gates: qubits,
        n_s1,
        l1: 0,
        l2: 0,
        l3: products,
        l4: 0,
        l5: 0,
        l6: 0,
        l3_distinct: 0,
    };
    for (s, _) in generator.terms() {
        let support: Vec<usize> = (0..s.n())
            .filter(|&q| s.letter(q) != crate::pauli::Pauli::I)
            .collect();
        match support[..] {
            [q] => match class(q) {
                0 => r.l1 += 1,
                1 => r.l5 += 1,
                _ => r.l3_distinct += 1,
            },
            [a, b] => match (class(a), class(b)) {
                (0, 0) => r.l2 += 1,
                (1, _) | (_, 1) => r.l6 += 1,
                _ => r.l4 += 1,
            },
            _ => {}
        }
    }
    r.rz_gates = r.l1 + r.l2 + r.l3 + r.l4 + r.l5 + r.l6;
    r.cnot_gates = 2 * bilinear_terms(&generator);
    Ok(r)
}

fn bilinear_terms(h: &PauliSum) -> usize {
    h.weight_counts().get(2).copied().unwrap_or(0)
}

/// `n₁(n+3)(n-2)/2`.
pub fn ic_term_closed_form(n: usize, n_ic: usize) -> usize {
    if n < 2 {
        return 0;
    }
    n_ic * (n + 3) * (n - 2) / 2
}
