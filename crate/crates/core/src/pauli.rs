//! Pauli strings, real-weighted Pauli sums and dense diagonal observables.
//!
//! Strings are written left to right from qubit 1, so `"IZ"` acts with `Z` on
//! qubit 2. Qubit 1 is the most significant bit of a basis index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits;
use crate::error::{Error, Result};
use crate::problem::QuadraticForm;

/// Coefficients at or below this magnitude are dropped.
pub const PRUNE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n],
        }
    }

    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    /// `Z` on the listed (0-based) qubits.
    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        let mut s = Self::identity(n);
        for &q in qubits {
            s.letters[q] = Pauli::Z;
        }
        s
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q]
    }

    pub fn with_letter(&self, q: usize, p: Pauli) -> Self {
        let mut s = self.clone();
        s.letters[q] = p;
        s
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_z_type(&self) -> bool {
        self.letters
            .iter()
            .all(|&p| matches!(p, Pauli::I | Pauli::Z))
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Index-space action: `P|j⟩ = i^{#Y} (-1)^{|j ∧ sign|} |j ⊕ flip⟩`.
    pub fn masks(&self) -> StringMasks {
        let n = self.n();
        let mut m = StringMasks::default();
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = bits::mask(n, q);
            match p {
                Pauli::I => {}
                Pauli::X => m.flip |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.y_count += 1;
                }
                Pauli::Z => m.sign |= bit,
            }
        }
        m
    }
}

/// Bit masks describing how a Pauli string acts on basis indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StringMasks {
    pub flip: usize,
    pub sign: usize,
    pub y_count: u32,
}

impl StringMasks {
    /// Phase `i^{#Y}` as a complex number.
    pub fn global_phase(&self) -> Complex64 {
        match self.y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Adds `coeff · P ψ` into `out`.
    pub fn apply_into(&self, coeff: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let phase = self.global_phase() * coeff;
        for (j, &a) in psi.iter().enumerate() {
            let s = if (j & self.sign).count_ones().is_multiple_of(2) {
                phase
            } else {
                -phase
            };
            out[j ^ self.flip] += s * a;
        }
    }

    /// `⟨ψ|P|ψ⟩`, real because `P` is Hermitian.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let phase = self.global_phase();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &a) in psi.iter().enumerate() {
            let s = if (j & self.sign).count_ones().is_multiple_of(2) {
                phase
            } else {
                -phase
            };
            acc += psi[j ^ self.flip].conj() * s * a;
        }
        acc.re
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters
            .iter()
            .try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Input(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { letters })
    }
}

/// Real-weighted sum of Pauli strings on `n` qubits, kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (PauliString, f64)>>(
        n: usize,
        terms: I,
    ) -> Result<Self> {
        let mut out = Self::zero(n);
        for (s, c) in terms {
            if s.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: s.n(),
                });
            }
            out.add_term(s, c);
        }
        Ok(out)
    }

    /// Parses `[("IZ", 0.5), ...]`.
    pub fn parse(n: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|(s, c)| s.parse::<PauliString>().map(|p| (p, *c)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, parsed)
    }

    /// `Σ_q X_q`.
    pub fn transverse_x(n: usize) -> Self {
        let mut out = Self::zero(n);
        for q in 0..n {
            out.add_term(PauliString::identity(n).with_letter(q, Pauli::X), 1.0);
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn coeff(&self, s: &PauliString) -> f64 {
        self.terms.get(s).copied().unwrap_or(0.0)
    }

    pub fn coeff_of(&self, s: &str) -> f64 {
        s.parse().map(|p| self.coeff(&p)).unwrap_or(0.0)
    }

    pub fn add_term(&mut self, s: PauliString, c: f64) {
        let total = self.coeff(&s) + c;
        if total.abs() <= PRUNE_TOL {
            self.terms.remove(&s);
        } else {
            self.terms.insert(s, total);
        }
    }

    pub fn add(&mut self, other: &PauliSum) {
        for (s, c) in other.terms() {
            self.add_term(s.clone(), c);
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut out = Self::zero(self.n);
        for (s, c) in self.terms() {
            out.add_term(s.clone(), k * c);
        }
        out
    }

    /// Coefficient of the identity string.
    pub fn offset(&self) -> f64 {
        self.coeff(&PauliString::identity(self.n))
    }

    pub fn without_identity(&self) -> Self {
        let id = PauliString::identity(self.n);
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| **s != id)
                .map(|(s, &c)| (s.clone(), c))
                .collect(),
        }
    }

    pub fn is_z_type(&self) -> bool {
        self.terms.keys().all(PauliString::is_z_type)
    }

    /// Number of non-identity terms of each weight (index = weight).
    pub fn weight_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.n + 1];
        for s in self.terms.keys() {
            out[s.weight()] += 1;
        }
        out
    }

    /// `Σ_r |c_r|` over non-identity strings.
    pub fn l1_norm_without_identity(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(s, _)| !s.is_identity())
            .map(|(_, c)| c.abs())
            .sum()
    }

    /// `H ψ`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (s, c) in self.terms() {
            s.masks().apply_into(c, psi, &mut out);
        }
        out
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        self.terms()
            .map(|(s, c)| c * s.masks().expectation(psi))
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    string: String,
    coeff: f64,
}

impl Serialize for PauliSum {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms()
            .map(|(s, c)| TermRecord {
                string: s.to_string(),
                coeff: c,
            })
            .collect();
        records.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let records = Vec::<TermRecord>::deserialize(de)?;
        let n = records.first().map_or(0, |r| r.string.len());
        let terms = records
            .into_iter()
            .map(|r| r.string.parse::<PauliString>().map(|s| (s, r.coeff)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        PauliSum::from_terms(n, terms).map_err(D::Error::custom)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            write!(f, "{}·{}", c.abs(), s)?;
        }
        Ok(())
    }
}

/// Dense diagonal of a Z-type operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalObservable {
    pub n: usize,
    pub diag: Vec<f64>,
}

impl DiagonalObservable {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        let len = diag.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Input(format!(
                "diagonal length {len} is not a power of two"
            )));
        }
        if diag.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("diagonal has non-finite entries".into()));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            diag,
        })
    }

    pub fn constant(n: usize, v: f64) -> Self {
        Self {
            n,
            diag: vec![v; 1 << n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Operator norm `max_j |d_j|`.
    pub fn norm(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First index attaining the minimum.
    pub fn argmin(&self) -> usize {
        self.diag
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
            )
            .0
    }

    /// All indices within `tol` of the minimum.
    pub fn argmin_set(&self, tol: f64) -> Vec<usize> {
        let m = self.min();
        (0..self.len())
            .filter(|&j| self.diag[j] <= m + tol)
            .collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            diag: self.diag.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &DiagonalObservable, k: f64) -> Result<()> {
        crate::error::check_len(self.len(), other.len())?;
        for (a, b) in self.diag.iter_mut().zip(&other.diag) {
            *a += k * b;
        }
        Ok(())
    }
}

/// Maps `x_q ↦ (I - Z_q)/2` so that `H|x⟩ = J(x)|x⟩` (with the offset kept).
pub fn qubo_to_hamiltonian(form: &QuadraticForm, keep_offset: bool) -> PauliSum {
    let n = form.dim();
    let mut h = PauliSum::zero(n);
    let mut offset = form.a;
    for q in 0..n {
        let row_sum: f64 = form.t[q].iter().sum();
        h.add_term(PauliString::z_on(n, &[q]), -0.5 * (form.c[q] + row_sum));
        offset += 0.5 * form.c[q] + 0.25 * row_sum + 0.25 * form.t[q][q];
        for j in q + 1..n {
            let w = 0.25 * (form.t[q][j] + form.t[j][q]);
            if w != 0.0 {
                h.add_term(PauliString::z_on(n, &[q, j]), w);
            }
        }
    }
    if keep_offset {
        h.add_term(PauliString::identity(n), offset);
    }
    h
}

/// Dense diagonal of a Z-type Pauli sum.
pub fn diagonal_of(h: &PauliSum) -> Result<DiagonalObservable> {
    if let Some((s, _)) = h.terms().find(|(s, _)| !s.is_z_type()) {
        return Err(Error::NotDiagonal(format!("term {s} has X or Y letters")));
    }
    let n = h.n();
    crate::bits::check_cap(n)?;
    let mut diag = vec![0.0; 1 << n];
    for (s, c) in h.terms() {
        let sign = s.masks().sign;
        for (j, d) in diag.iter_mut().enumerate() {
            if (j & sign).count_ones() % 2 == 0 {
                *d += c;
            } else {
                *d -= c;
            }
        }
    }
    Ok(DiagonalObservable { n, diag })
}

/// Exact Z-basis expansion of a diagonal via the fast Walsh–Hadamard transform.
pub fn pauli_of_diagonal(d: &DiagonalObservable) -> Result<PauliSum> {
    let len = d.diag.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Input(format!(
            "diagonal length {len} is not a power of two"
        )));
    }
    let n = len.trailing_zeros() as usize;
    let mut w = d.diag.clone();
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for j in block..block + half {
                let (a, b) = (w[j], w[j + half]);
                w[j] = a + b;
                w[j + half] = a - b;
            }
        }
        half *= 2;
    }
    let scale = 1.0 / len as f64;
    let mut out = PauliSum::zero(n);
    for (m, v) in w.into_iter().enumerate() {
        let c = v * scale;
        if c.abs() > PRUNE_TOL {
            let qubits: Vec<usize> = (0..n).filter(|&q| m & bits::mask(n, q) != 0).collect();
            out.add_term(PauliString::z_on(n, &qubits), c);
        }
    }
    Ok(out)
}

/// `i[X_q, Q]` for Z-type `Q`: every term with `Z` on qubit `q` becomes
/// `2c` times the string with that `Z` replaced by `Y`.
pub fn commutator_with_x_mixer(q_obs: &PauliSum, mixer_qubit: usize) -> Result<PauliSum> {
    if !q_obs.is_z_type() {
        return Err(Error::NotDiagonal(
            "commutator expansion needs a Z-type observable".into(),
        ));
    }
    if mixer_qubit >= q_obs.n() {
        return Err(Error::Input(format!(
            "qubit {mixer_qubit} out of range for {} qubits",
            q_obs.n()
        )));
    }
    let mut out = PauliSum::zero(q_obs.n());
    for (s, c) in q_obs.terms() {
        if s.letter(mixer_qubit) == Pauli::Z {
            out.add_term(s.with_letter(mixer_qubit, Pauli::Y), 2.0 * c);
        }
    }
    Ok(out)
}

/// `i[Σ_q X_q, Q]` as a Pauli sum.
pub fn commutator_with_transverse_mixer(q_obs: &PauliSum) -> Result<PauliSum> {
    let mut out = PauliSum::zero(q_obs.n());
    for q in 0..q_obs.n() {
        out.add(&commutator_with_x_mixer(q_obs, q)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{random_instance, svp_instance};

    #[test]
    fn svp_hamiltonian() {
        let h = qubo_to_hamiltonian(&svp_instance().objective, true);
        let want = PauliSum::parse(
            3,
            &[
                ("III", 4.5),
                ("ZII", -0.5),
                ("IZI", -1.5),
                ("IIZ", -3.0),
                ("IZZ", 0.5),
            ],
        )
        .unwrap();
        assert_eq!(h.len(), want.len());
        for (s, c) in want.terms() {
            assert!((h.coeff(s) - c).abs() < 1e-15, "{s}");
        }
        let d = diagonal_of(&h).unwrap();
        assert_eq!(d.diag, vec![0.0, 5.0, 2.0, 9.0, 1.0, 6.0, 3.0, 10.0]);
        let no_offset = qubo_to_hamiltonian(&svp_instance().objective, false);
        assert_eq!(no_offset.offset(), 0.0);
        assert_eq!(no_offset.len(), 4);
    }

    #[test]
    fn zero_cost_maps_to_offset_only() {
        let mut f = QuadraticForm::zeros(3);
        assert!(qubo_to_hamiltonian(&f, true).is_empty());
        f.a = 2.5;
        let h = qubo_to_hamiltonian(&f, true);
        assert_eq!(h.len(), 1);
        assert_eq!(h.offset(), 2.5);
    }

    #[test]
    fn identity_is_constant_diagonal() {
        let h = PauliSum::parse(3, &[("III", 1.25)]).unwrap();
        assert_eq!(diagonal_of(&h).unwrap().diag, vec![1.25; 8]);
    }

    #[test]
    fn diagonal_rejects_x() {
        let h = PauliSum::parse(2, &[("XZ", 1.0)]).unwrap();
        assert!(matches!(diagonal_of(&h), Err(Error::NotDiagonal(_))));
    }

    #[test]
    fn walsh_round_trip_svp() {
        let h = qubo_to_hamiltonian(&svp_instance().objective, true);
        let back = pauli_of_diagonal(&diagonal_of(&h).unwrap()).unwrap();
        assert_eq!(back.len(), h.len());
        for (s, c) in h.terms() {
            assert!((back.coeff(s) - c).abs() < 1e-12);
        }
    }

    #[test]
    fn folded_spectrum_expansion() {
        let d = DiagonalObservable::new(vec![1.69, 13.69, 0.49, 59.29, 0.09, 22.09, 2.89, 75.69])
            .unwrap();
        let p = pauli_of_diagonal(&d).unwrap();
        let want = [
            ("III", 21.99),
            ("ZII", -3.2),
            ("IZI", -12.6),
            ("IIZ", -20.7),
            ("ZZI", 1.5),
            ("ZIZ", 3.0),
            ("IZZ", 12.2),
            ("ZZZ", -0.5),
        ];
        assert_eq!(p.len(), want.len());
        for (s, c) in want {
            assert!((p.coeff_of(s) - c).abs() < 1e-10, "{s}: {}", p.coeff_of(s));
        }
    }

    #[test]
    fn constant_diagonal_is_identity() {
        let p = pauli_of_diagonal(&DiagonalObservable::constant(4, -3.0)).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.offset() + 3.0).abs() < 1e-15);
        assert!(pauli_of_diagonal(&DiagonalObservable {
            n: 0,
            diag: vec![1.0; 3]
        })
        .is_err());
    }

    #[test]
    fn commutator_examples() {
        let z1 = PauliSum::parse(1, &[("Z", 1.0)]).unwrap();
        let c = commutator_with_x_mixer(&z1, 0).unwrap();
        assert_eq!(c.coeff_of("Y"), 2.0);
        assert_eq!(c.len(), 1);

        let z2 = PauliSum::parse(2, &[("IZ", 1.0)]).unwrap();
        assert!(commutator_with_x_mixer(&z2, 0).unwrap().is_empty());

        let q = PauliSum::parse(3, &[("IZZ", 0.5)]).unwrap();
        let c = commutator_with_x_mixer(&q, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.coeff_of("IYZ"), 1.0);

        let x = PauliSum::parse(1, &[("X", 1.0)]).unwrap();
        assert!(commutator_with_x_mixer(&x, 0).is_err());
    }

    #[test]
    fn quadratic_source_term_bound() {
        for n in 2..=8 {
            let p = random_instance(n, 0, n as u64).unwrap();
            let d = diagonal_of(&qubo_to_hamiltonian(&p.objective, true)).unwrap();
            let terms = pauli_of_diagonal(&d).unwrap();
            assert!(terms.len() <= 1 + n + n * (n - 1) / 2);
            assert!(terms.weight_counts()[3..].iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn pruning_and_json() {
        let mut h = PauliSum::parse(2, &[("ZI", 1.0)]).unwrap();
        h.add_term("ZI".parse().unwrap(), -1.0);
        assert!(h.is_empty());
        let h = PauliSum::parse(2, &[("ZI", 1.0), ("IZ", -0.5)]).unwrap();
        let js = serde_json::to_string(&h).unwrap();
        assert_eq!(
            js,
            r#"[{"string":"IZ","coeff":-0.5},{"string":"ZI","coeff":1.0}]"#
        );
        let back: PauliSum = serde_json::from_str(&js).unwrap();
        assert_eq!(back, h);
    }
}
