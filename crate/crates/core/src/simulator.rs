//! Dense statevector engine for layered `V_M(θ) V_P` evolution.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{check_len, Error, Result};
use crate::pauli::{commutator_with_transverse_mixer, DiagonalObservable, PauliSum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pure state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum InitKind {
    #[default]
    PlusSuperposition,
    Basis(usize),
}

/// Drive Hamiltonian `H_M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "terms", rename_all = "snake_case")]
pub enum MixerSpec {
    /// `Σ_q X_q`.
    #[default]
    TransverseX,
    /// General real-weighted Pauli sum, evolved as a first-order Trotter
    /// product in lexicographic term order.
    PauliSum(PauliSum),
}

impl MixerSpec {
    /// Upper bound on the operator norm (`n` for the transverse mixer).
    pub fn norm(&self, n: usize) -> f64 {
        match self {
            MixerSpec::TransverseX => n as f64,
            MixerSpec::PauliSum(h) => h.terms().map(|(_, c)| c.abs()).sum(),
        }
    }

    pub fn as_pauli(&self, n: usize) -> PauliSum {
        match self {
            MixerSpec::TransverseX => PauliSum::transverse_x(n),
            MixerSpec::PauliSum(h) => h.clone(),
        }
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if let MixerSpec::PauliSum(h) = self {
            check_len(n, h.n())?;
        }
        Ok(())
    }
}

impl StateVector {
    pub fn new(n: usize, kind: InitKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("state needs at least one qubit".into()));
        }
        bits::check_cap(n)?;
        let dim = 1usize << n;
        let amps = match kind {
            InitKind::PlusSuperposition => {
                vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim]
            }
            InitKind::Basis(j) => {
                if j >= dim {
                    return Err(Error::Input(format!(
                        "basis index {j} out of range for {n} qubits"
                    )));
                }
                let mut v = vec![ZERO; dim];
                v[j] = Complex64::new(1.0, 0.0);
                v
            }
        };
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes after normalizing them.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Input(format!(
                "{len} amplitudes is not a qubit register"
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Input("amplitudes have zero or invalid norm".into()));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probability(&self, j: usize) -> f64 {
        self.amps[j].norm_sqr()
    }

    /// Most probable basis index (lowest index on ties).
    pub fn argmax(&self) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (j, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > best.1 {
                best = (j, p);
            }
        }
        best.0
    }

    /// `amps_j ← e^{-i d_j Δt} amps_j`.
    pub fn apply_problem_layer(&mut self, d: &DiagonalObservable, dt: f64) -> Result<()> {
        check_len(self.amps.len(), d.len())?;
        for (a, &e) in self.amps.iter_mut().zip(&d.diag) {
            let (s, c) = (-e * dt).sin_cos();
            *a *= Complex64::new(c, s);
        }
        Ok(())
    }

    /// `V_M(θ) = e^{-iθΔt H_M}`.
    pub fn apply_mixer_layer(&mut self, m: &MixerSpec, theta: f64, dt: f64) -> Result<()> {
        m.check(self.n)?;
        let angle = theta * dt;
        if angle == 0.0 {
            return Ok(());
        }
        match m {
            MixerSpec::TransverseX => {
                let (s, c) = angle.sin_cos();
                let ms = Complex64::new(0.0, -s);
                for q in 0..self.n {
                    let bit = bits::mask(self.n, q);
                    for j in 0..self.amps.len() {
                        if j & bit == 0 {
                            let a = self.amps[j];
                            let b = self.amps[j | bit];
                            self.amps[j] = a * c + b * ms;
                            self.amps[j | bit] = b * c + a * ms;
                        }
                    }
                }
            }
            MixerSpec::PauliSum(h) => {
                let mut scratch = vec![ZERO; self.amps.len()];
                for (s, coeff) in h.terms() {
                    let (sn, cs) = (angle * coeff).sin_cos();
                    scratch.iter_mut().for_each(|v| *v = ZERO);
                    s.masks().apply_into(1.0, &self.amps, &mut scratch);
                    let ms = Complex64::new(0.0, -sn);
                    for (a, p) in self.amps.iter_mut().zip(&scratch) {
                        *a = *a * cs + *p * ms;
                    }
                }
            }
        }
        Ok(())
    }

    /// `Σ_j d_j |amps_j|²`.
    pub fn expectation_diag(&self, d: &DiagonalObservable) -> Result<f64> {
        check_len(self.amps.len(), d.len())?;
        Ok(self
            .amps
            .iter()
            .zip(&d.diag)
            .map(|(a, &e)| e * a.norm_sqr())
            .sum())
    }

    /// `H_M ψ`.
    pub fn apply_mixer(&self, m: &MixerSpec) -> Result<Vec<Complex64>> {
        m.check(self.n)?;
        Ok(match m {
            MixerSpec::TransverseX => {
                let mut out = vec![ZERO; self.amps.len()];
                for q in 0..self.n {
                    let bit = bits::mask(self.n, q);
                    for (j, o) in out.iter_mut().enumerate() {
                        *o += self.amps[j ^ bit];
                    }
                }
                out
            }
            MixerSpec::PauliSum(h) => h.apply(&self.amps),
        })
    }

    /// `⟨ψ| i[H_M, D] |ψ⟩ = -2 Im⟨H_M ψ | D ψ⟩` for diagonal `D`.
    pub fn commutator_expectation(&self, d: &DiagonalObservable, m: &MixerSpec) -> Result<f64> {
        check_len(self.amps.len(), d.len())?;
        let hm = self.apply_mixer(m)?;
        let inner: Complex64 = hm
            .iter()
            .zip(&self.amps)
            .zip(&d.diag)
            .map(|((h, a), &e)| h.conj() * a * e)
            .sum();
        Ok(-2.0 * inner.im)
    }

    /// Controller for `Q = D + Σ γ_r |z_r⟩⟨z_r|`, split into the commutator
    /// with `D` plus `2 Re{ i γ ⟨ψ|H_M|z⟩⟨z|ψ⟩ }` per projector.
    pub fn split_commutator_expectation(
        &self,
        d: &DiagonalObservable,
        projectors: &[(usize, f64)],
        m: &MixerSpec,
    ) -> Result<f64> {
        check_len(self.amps.len(), d.len())?;
        let hm = self.apply_mixer(m)?;
        let inner: Complex64 = hm
            .iter()
            .zip(&self.amps)
            .zip(&d.diag)
            .map(|((h, a), &e)| h.conj() * a * e)
            .sum();
        let mut w = -2.0 * inner.im;
        for &(z, g) in projectors {
            let a = hm[z].conj() * self.amps[z];
            w += 2.0 * (Complex64::i() * g * a).re;
        }
        Ok(w)
    }

    /// Multinomial draw of `shots` outcomes.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::Input("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0u64; self.amps.len()];
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * total;
            let j = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            counts[j] += 1;
        }
        Ok(Histogram {
            counts: counts
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c > 0)
                .map(|(j, c)| (bits::bitstring(j, self.n), c))
                .collect(),
        })
    }
}

pub fn init_state(n: usize, kind: InitKind) -> Result<StateVector> {
    StateVector::new(n, kind)
}

/// Controller value `Σ_r a_r ⟨R_r⟩` from the Pauli expansion of `i[Σ_q X_q, Q]`.
pub fn pauli_controller_expectation(s: &StateVector, q_obs: &PauliSum) -> Result<f64> {
    check_len(s.n(), q_obs.n())?;
    let comm = commutator_with_transverse_mixer(q_obs)?;
    Ok(comm.expectation(s.amplitudes()))
}

/// Measurement counts keyed by bitstring `x₁…x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Histogram {
    pub counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Exact probabilities written as a histogram over `shots` (rounded).
    pub fn from_probabilities(s: &StateVector, shots: u64) -> Self {
        Histogram {
            counts: s
                .probabilities()
                .into_iter()
                .enumerate()
                .map(|(j, p)| (bits::bitstring(j, s.n()), (p * shots as f64).round() as u64))
                .filter(|(_, c)| *c > 0)
                .collect(),
        }
    }
}
