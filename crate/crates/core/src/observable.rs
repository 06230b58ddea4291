//! Lyapunov observables `Q_c` and their hyperparameter strategies.
//!
//! Four variants are supported, all diagonal in the computational basis so
//! that `Q_c` commutes with the problem Hamiltonian:
//!
//! * `penalty`: `H_P + Σ β_q G_q²`
//! * `penalty_ic`: additionally `Σ γ_r H_IC^{(r)}` on IC slack qubits
//! * `deflation`: `H_P + Σ β_q G_q² + Σ γ_r |z_r⟩⟨z_r|`
//! * `folded_spectrum`: `(H_P + Σ β_q G_q² - α)^{2m}`

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::oracle::{SpectrumSummary, COST_TOL};
use crate::pauli::{pauli_of_diagonal, qubo_to_hamiltonian, DiagonalObservable, PauliSum};
use crate::problem::{
    add_ic_penalties, ic_slack_layout, ConstraintKind, QcboProblem, QuadraticConstraint,
    QuboBuilder,
};

/// Largest folded-spectrum register for which a Pauli expansion is kept.
const FS_PAULI_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Penalty,
    PenaltyIc,
    Deflation,
    FoldedSpectrum,
}

fn default_m() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub variant: Variant,
    #[serde(default, alias = "beta")]
    pub betas: Vec<f64>,
    #[serde(default, alias = "gamma")]
    pub gammas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "default_m")]
    pub m: u32,
    /// Skip the check that IC configurations are the lowest-cost outcomes.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub assume_fs_applicable: bool,
}

impl ObservableSpec {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            betas: Vec::new(),
            gammas: Vec::new(),
            alpha: None,
            m: 1,
            assume_fs_applicable: false,
        }
    }

    pub fn penalty(betas: Vec<f64>) -> Self {
        Self {
            betas,
            ..Self::new(Variant::Penalty)
        }
    }

    pub fn penalty_ic(gammas: Vec<f64>, betas: Vec<f64>) -> Self {
        Self {
            gammas,
            betas,
            ..Self::new(Variant::PenaltyIc)
        }
    }

    pub fn deflation(gammas: Vec<f64>) -> Self {
        Self {
            gammas,
            ..Self::new(Variant::Deflation)
        }
    }

    pub fn folded_spectrum(alpha: f64) -> Self {
        Self {
            alpha: Some(alpha),
            ..Self::new(Variant::FoldedSpectrum)
        }
    }

    fn check(&self, p: &QcboProblem) -> Result<()> {
        let weights = |name: &str, ws: &[f64], expected: usize| -> Result<()> {
            if ws.len() != expected {
                let err = format!("{name}: expected {expected} values, got {}", ws.len());
                return Err(if ws.is_empty() {
                    Error::MissingHyperparameter(err)
                } else {
                    Error::InvalidHyperparameter(err)
                });
            }
            match ws.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
                Some(w) => Err(Error::InvalidHyperparameter(format!(
                    "{name} must be positive, got {w}"
                ))),
                None => Ok(()),
            }
        };
        weights("betas", &self.betas, p.equalities.len())?;
        match self.variant {
            Variant::Penalty => {
                if p.n_ic() > 0 {
                    return Err(Error::Config(
                        "the penalty variant cannot encode IC constraints; use penalty_ic, deflation or folded_spectrum".into(),
                    ));
                }
            }
            Variant::PenaltyIc | Variant::Deflation => weights("gammas", &self.gammas, p.n_ic())?,
            Variant::FoldedSpectrum => {
                let a = self
                    .alpha
                    .ok_or_else(|| Error::MissingHyperparameter("alpha".into()))?;
                if !a.is_finite() {
                    return Err(Error::InvalidHyperparameter(format!("alpha = {a}")));
                }
                if self.m == 0 {
                    return Err(Error::InvalidHyperparameter("m must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// A diagonal Lyapunov observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcObservable {
    pub variant: Variant,
    /// Full diagonal, including any deflation shifts.
    pub diag: DiagonalObservable,
    /// Z-basis expansion; absent for deflation and for large folded spectra.
    pub pauli: Option<PauliSum>,
    /// `(basis index, γ)` shifts of the deflation variant.
    pub deflation_projectors: Vec<(usize, f64)>,
}

impl QcObservable {
    pub fn n(&self) -> usize {
        self.diag.n
    }

    /// Diagonal without the deflation shifts.
    pub fn unshifted(&self) -> DiagonalObservable {
        let mut d = self.diag.clone();
        for &(j, g) in &self.deflation_projectors {
            d.diag[j] -= g;
        }
        d
    }
}

fn require_equality(c: &QuadraticConstraint) -> Result<()> {
    if c.kind == ConstraintKind::Inequality {
        return Err(Error::MustConvert(
            "inequality constraints need slack conversion first".into(),
        ));
    }
    Ok(())
}

/// Diagonal of `G(x)²` for an equality constraint.
pub fn constraint_hamiltonian(c: &QuadraticConstraint) -> Result<DiagonalObservable> {
    require_equality(c)?;
    bits::check_cap(c.form.dim())?;
    let d = c.form.diagonal().into_iter().map(|g| g * g).collect();
    DiagonalObservable::new(d)
}

/// Diagonal of `H_P` on `n_total ≥ p.n` qubits (identity on extra qubits).
pub fn problem_diagonal(p: &QcboProblem, n_total: usize) -> Result<DiagonalObservable> {
    bits::check_cap(n_total)?;
    DiagonalObservable::new(p.objective.padded(n_total).diagonal())
}

/// `H_P + Σ β_q G_q²` on the problem's own register.
fn penalized_diagonal(p: &QcboProblem, betas: &[f64]) -> Result<DiagonalObservable> {
    let mut d = problem_diagonal(p, p.n)?;
    for (c, &b) in p.equalities.iter().zip(betas) {
        d.add_scaled(&constraint_hamiltonian(c)?, b)?;
    }
    Ok(d)
}

/// The same operator as a Pauli sum, when every equality is linear.
fn penalized_pauli(p: &QcboProblem, betas: &[f64], n_total: usize) -> Option<PauliSum> {
    let mut b = QuboBuilder::new(n_total);
    b.form = p.objective.padded(n_total);
    for (c, &beta) in p.equalities.iter().zip(betas) {
        b.squared_linear(beta, &c.form.padded(n_total)).ok()?;
    }
    Some(qubo_to_hamiltonian(&b.form, true))
}

pub fn build_qc(p: &QcboProblem, spec: &ObservableSpec) -> Result<QcObservable> {
    if !p.inequalities.is_empty() {
        return Err(Error::MustConvert(
            "apply inequality_to_equality before building Q_c".into(),
        ));
    }
    spec.check(p)?;
    bits::check_cap(p.n)?;
    let out = match spec.variant {
        Variant::Penalty => {
            let diag = penalized_diagonal(p, &spec.betas)?;
            let pauli = penalized_pauli(p, &spec.betas, p.n).or_else(|| {
                (p.n <= FS_PAULI_LIMIT)
                    .then(|| pauli_of_diagonal(&diag).ok())
                    .flatten()
            });
            QcObservable {
                variant: spec.variant,
                diag,
                pauli,
                deflation_projectors: Vec::new(),
            }
        }
        Variant::PenaltyIc => {
            let layout = ic_slack_layout(p)?;
            let n_total = p.n + layout.iter().map(|b| b.len).sum::<usize>();
            bits::check_cap(n_total)?;
            let mut b = QuboBuilder::new(n_total);
            b.form = p.objective.padded(n_total);
            for (c, &beta) in p.equalities.iter().zip(&spec.betas) {
                b.squared_linear(beta, &c.form.padded(n_total))?;
            }
            add_ic_penalties(&mut b, p, &spec.gammas, &layout);
            QcObservable {
                variant: spec.variant,
                diag: DiagonalObservable::new(b.form.diagonal())?,
                pauli: Some(qubo_to_hamiltonian(&b.form, true)),
                deflation_projectors: Vec::new(),
            }
        }
        Variant::Deflation => {
            let mut diag = penalized_diagonal(p, &spec.betas)?;
            let slack = p.slack_count();
            let mut projectors = Vec::new();
            for (z, &g) in p.invalid_configs.iter().zip(&spec.gammas) {
                let base = bits::index_of(z) << slack;
                for s in 0..1usize << slack {
                    diag.diag[base | s] += g;
                    projectors.push((base | s, g));
                }
            }
            QcObservable {
                variant: spec.variant,
                diag,
                pauli: None,
                deflation_projectors: projectors,
            }
        }
        Variant::FoldedSpectrum => {
            let pre = penalized_diagonal(p, &spec.betas)?;
            if !spec.assume_fs_applicable {
                check_fs_applicable(p, &pre)?;
            }
            let alpha = spec.alpha.expect("checked");
            let e = 2 * spec.m as i32;
            let diag = pre.map(|v| (v - alpha).powi(e));
            let pauli = (p.n <= FS_PAULI_LIMIT)
                .then(|| pauli_of_diagonal(&diag))
                .transpose()?;
            QcObservable {
                variant: spec.variant,
                diag,
                pauli,
                deflation_projectors: Vec::new(),
            }
        }
    };
    Ok(out)
}

/// IC configurations must be strictly cheaper than every other outcome.
fn check_fs_applicable(p: &QcboProblem, pre: &DiagonalObservable) -> Result<()> {
    let invalid = p.invalid_indices();
    if invalid.is_empty() {
        return Ok(());
    }
    let worst_ic = invalid
        .iter()
        .map(|&j| pre.diag[j])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut is_ic = vec![false; pre.len()];
    for &j in &invalid {
        is_ic[j] = true;
    }
    let best_other = (0..pre.len())
        .filter(|&j| !is_ic[j])
        .map(|j| pre.diag[j])
        .fold(f64::INFINITY, f64::min);
    if worst_ic < best_other {
        Ok(())
    } else {
        Err(Error::FsInapplicable(format!(
            "an IC configuration costs {worst_ic}, not below the cheapest other outcome {best_other}"
        )))
    }
}

/// `2 Σ_r |c_r|` over the non-identity terms; bounds the spectral width.
pub fn beta_upper_bound(h: &PauliSum) -> f64 {
    2.0 * h.l1_norm_without_identity()
}

/// Smallest safe `γ` from a known feasible reference outcome, plus a margin of 1.
pub fn gamma_by_reference(p: &QcboProblem, x_ref: &[u8], z: &[u8]) -> Result<f64> {
    if !p.is_feasible(x_ref)? {
        return Err(Error::Input("reference outcome is not feasible".into()));
    }
    let j_ref = p.evaluate_cost(x_ref)?;
    let mut full = z.to_vec();
    full.resize(p.n, 0);
    let j_z = p.evaluate_cost(&full)?;
    Ok(if j_ref <= j_z { 0.0 } else { j_ref - j_z + 1.0 })
}

/// Doubles `initial` until `accept` returns true.
///
/// `accept(v)` runs the algorithm with hyperparameter `v` and reports whether
/// it converged to a valid (non-IC) outcome.
pub fn iterative_hyperparameter<F>(mut accept: F, initial: f64, max_doublings: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !(initial > 0.0) {
        return Err(Error::InvalidHyperparameter(format!(
            "initial value must be positive, got {initial}"
        )));
    }
    let mut trace = Vec::new();
    let mut v = initial;
    for _ in 0..=max_doublings {
        trace.push(v);
        if accept(v)? {
            return Ok(v);
        }
        v *= 2.0;
    }
    Err(Error::NonConvergence { trace })
}

/// Open interval of `α` for which the folded ground state is the optimum.
pub fn alpha_interval(spec: &SpectrumSummary) -> Result<(f64, f64)> {
    let e_n1 = spec
        .e_n1
        .ok_or_else(|| Error::FsInapplicable("problem has no IC configurations".into()))?;
    if e_n1 >= spec.e_f_min - COST_TOL {
        return Err(Error::FsInapplicable(format!(
            "IC costs (max {e_n1}) are not the lowest outcomes below e_f_min = {}",
            spec.e_f_min
        )));
    }
    let lo = 0.5 * (spec.e_f_min + e_n1);
    let hi = match spec.e_bar {
        Some(e) => 0.5 * (spec.e_f_min + e),
        None => f64::INFINITY,
    };
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force;
    use crate::pauli::diagonal_of;
    use crate::problem::{svp_instance, to_qubo, QuadraticForm};

    #[test]
    fn constraint_examples() {
        let c = QuadraticConstraint::linear(vec![1.0, 1.0], -1.0, ConstraintKind::Equality);
        assert_eq!(
            constraint_hamiltonian(&c).unwrap().diag,
            vec![1.0, 0.0, 0.0, 1.0]
        );
        let zero = QuadraticConstraint::linear(vec![0.0; 3], 0.0, ConstraintKind::Equality);
        assert_eq!(constraint_hamiltonian(&zero).unwrap().diag, vec![0.0; 8]);
        let ineq = QuadraticConstraint::linear(vec![1.0, 1.0], -1.0, ConstraintKind::Inequality);
        assert!(matches!(
            constraint_hamiltonian(&ineq),
            Err(Error::MustConvert(_))
        ));
    }

    #[test]
    fn svp_variants() {
        let p = svp_instance();
        let d = build_qc(&p, &ObservableSpec::deflation(vec![3.0])).unwrap();
        assert_eq!(d.diag.diag, vec![3., 5., 2., 9., 1., 6., 3., 10.]);
        assert_eq!(d.deflation_projectors, vec![(0, 3.0)]);
        assert!(d.pauli.is_none());
        assert_eq!(d.unshifted().diag, vec![0., 5., 2., 9., 1., 6., 3., 10.]);

        let fs = build_qc(&p, &ObservableSpec::folded_spectrum(1.3)).unwrap();
        let want = [1.69, 13.69, 0.49, 59.29, 0.09, 22.09, 2.89, 75.69];
        for (a, b) in fs.diag.diag.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let back = diagonal_of(fs.pauli.as_ref().unwrap()).unwrap();
        for (a, b) in back.diag.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }

        let pic = build_qc(&p, &ObservableSpec::penalty_ic(vec![3.0], vec![])).unwrap();
        let want = [
            3., 3., 5., 8., 2., 5., 9., 15., 4., 1., 6., 6., 3., 3., 10., 13.,
        ];
        assert_eq!(pic.diag.diag, want);
        let back = diagonal_of(pic.pauli.as_ref().unwrap()).unwrap();
        for (a, b) in back.diag.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
        let q = to_qubo(&p, &[3.0], &[]).unwrap();
        assert_eq!(q.form.diagonal(), want.to_vec());
    }

    #[test]
    fn spec_errors() {
        let p = svp_instance();
        assert!(matches!(
            build_qc(&p, &ObservableSpec::deflation(vec![])),
            Err(Error::MissingHyperparameter(_))
        ));
        assert!(matches!(
            build_qc(&p, &ObservableSpec::deflation(vec![-1.0])),
            Err(Error::InvalidHyperparameter(_))
        ));
        assert!(matches!(
            build_qc(&p, &ObservableSpec::new(Variant::FoldedSpectrum)),
            Err(Error::MissingHyperparameter(_))
        ));
        assert!(matches!(
            build_qc(&p, &ObservableSpec::penalty(vec![])),
            Err(Error::Config(_))
        ));
        // z = 111 is the most expensive outcome, so folding cannot isolate the optimum.
        let q = QcboProblem::new(p.objective.clone())
            .unwrap()
            .with_invalid_config(vec![1, 1, 1])
            .unwrap();
        assert!(matches!(
            build_qc(&q, &ObservableSpec::folded_spectrum(1.0)),
            Err(Error::FsInapplicable(_))
        ));
    }

    #[test]
    fn spec_json() {
        let s: ObservableSpec =
            serde_json::from_str(r#"{"variant":"deflation","gamma":[3.0]}"#).unwrap();
        assert_eq!(s, ObservableSpec::deflation(vec![3.0]));
        let s: ObservableSpec =
            serde_json::from_str(r#"{"variant":"folded_spectrum","alpha":1.3}"#).unwrap();
        assert_eq!(s.m, 1);
    }

    #[test]
    fn beta_bound_examples() {
        let h = qubo_to_hamiltonian(&svp_instance().objective, true);
        assert_eq!(beta_upper_bound(&h), 11.0);
        assert_eq!(beta_upper_bound(&PauliSum::zero(3)), 0.0);
    }

    #[test]
    fn gamma_examples() {
        let p = svp_instance();
        assert_eq!(gamma_by_reference(&p, &[0, 1, 0], &[0, 0, 0]).unwrap(), 3.0);
        assert_eq!(gamma_by_reference(&p, &[1, 0, 0], &[0, 1, 0]).unwrap(), 0.0);
        assert!(gamma_by_reference(&p, &[0, 0, 0], &[0, 0, 0]).is_err());
        let flat = QcboProblem::new(QuadraticForm::zeros(3))
            .unwrap()
            .with_invalid_config(vec![0, 0, 0])
            .unwrap();
        assert_eq!(
            gamma_by_reference(&flat, &[1, 0, 0], &[0, 0, 0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn doubling_schedule() {
        assert_eq!(
            iterative_hyperparameter(|v| Ok(v >= 5.0), 1.0, 10).unwrap(),
            8.0
        );
        assert_eq!(iterative_hyperparameter(|_| Ok(true), 0.3, 0).unwrap(), 0.3);
        match iterative_hyperparameter(|_| Ok(false), 1.0, 3) {
            Err(Error::NonConvergence { trace }) => assert_eq!(trace, vec![1.0, 2.0, 4.0, 8.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alpha_examples() {
        let spec = brute_force(&svp_instance()).unwrap();
        let (lo, hi) = alpha_interval(&spec).unwrap();
        assert_eq!((lo, hi), (0.5, 1.5));
        assert!(lo < 1.3 && 1.3 < hi);

        let two = QcboProblem::new(QuadraticForm {
            t: vec![vec![0.0]],
            c: vec![2.0],
            a: 0.0,
        });
        // A single variable has no IC penalty, but deflation-style spectra still apply.
        let two = two.unwrap().with_invalid_config(vec![0]).unwrap();
        let spec = brute_force(&two).unwrap();
        assert_eq!(alpha_interval(&spec).unwrap(), (1.0, f64::INFINITY));
    }
}
