//! Quadratic constrained binary optimization problems.
//!
//! A [`QcboProblem`] holds a quadratic objective together with equality,
//! inequality and invalid-configuration (IC) constraints. Inequalities are
//! turned into equalities with binary slack variables, and IC constraints are
//! turned into quadratic penalties with `n - 2` slack variables each, which
//! yields an equivalent unconstrained [`QuboProblem`].

use num_integer::lcm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{self, validate_bits};
use crate::error::{check_len, Error, Result};

/// Residual tolerance for equality and inequality feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const MAX_DENOMINATOR: u64 = 10_000;
/// Above this size the slack count uses a coefficient bound instead of enumeration.
const EXACT_RANGE_LIMIT: usize = 20;

/// `xᵀTx + cᵀx + a` over binary `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    #[serde(rename = "T", default)]
    pub t: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    #[serde(default)]
    pub a: f64,
}

impl QuadraticForm {
    pub fn zeros(n: usize) -> Self {
        Self {
            t: vec![vec![0.0; n]; n],
            c: vec![0.0; n],
            a: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Value at `x`, which must already be validated.
    pub fn value(&self, x: &[u8]) -> f64 {
        let mut acc = self.a;
        for (q, &xq) in x.iter().enumerate() {
            if xq == 0 {
                continue;
            }
            acc += self.c[q];
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0 {
                    acc += self.t[q][j];
                }
            }
        }
        acc
    }

    /// Value at every basis index, x₁ as the most significant bit.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; 1 << n];
        let mut x = vec![0u8; n];
        for (j, slot) in out.iter_mut().enumerate() {
            for (q, b) in x.iter_mut().enumerate() {
                *b = bits::bit(j, n, q);
            }
            *slot = self.value(&x);
        }
        out
    }

    fn validate(&mut self, n: usize, what: &str) -> Result<()> {
        check_len(n, self.c.len())?;
        if self.t.is_empty() {
            self.t = vec![vec![0.0; n]; n];
        }
        check_len(n, self.t.len())?;
        for row in &self.t {
            check_len(n, row.len())?;
        }
        for q in 0..n {
            for j in 0..n {
                if (self.t[q][j] - self.t[j][q]).abs() > SYMMETRY_TOL {
                    return Err(Error::Input(format!(
                        "{what}: T is not symmetric at ({q}, {j})"
                    )));
                }
            }
        }
        let finite = self.a.is_finite()
            && self.c.iter().all(|v| v.is_finite())
            && self.t.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Input(format!("{what}: non-finite coefficient")));
        }
        Ok(())
    }

    pub(crate) fn padded(&self, n: usize) -> Self {
        let mut out = Self::zeros(n);
        let m = self.dim();
        for q in 0..m {
            out.c[q] = self.c[q];
            out.t[q][..m].copy_from_slice(&self.t[q]);
        }
        out.a = self.a;
        out
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            t: self
                .t
                .iter()
                .map(|r| r.iter().map(|v| v * k).collect())
                .collect(),
            c: self.c.iter().map(|v| v * k).collect(),
            a: self.a * k,
        }
    }

    fn coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        self.t
            .iter()
            .flatten()
            .copied()
            .chain(self.c.iter().copied())
            .chain(std::iter::once(self.a))
    }

    /// Upper bound on the form over binary inputs from the positive coefficients.
    fn upper_bound(&self) -> f64 {
        let n = self.dim();
        let mut bound = self.a;
        for q in 0..n {
            bound += (self.c[q] + self.t[q][q]).max(0.0);
            for j in q + 1..n {
                bound += (self.t[q][j] + self.t[j][q]).max(0.0);
            }
        }
        bound
    }

    fn max_value(&self) -> f64 {
        if self.dim() <= EXACT_RANGE_LIMIT {
            self.diagonal()
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max)
        } else {
            self.upper_bound()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    #[default]
    Equality,
    Inequality,
}

/// `G(x) = xᵀT_Gx + c_Gᵀx + a_G`, feasible when `G = 0` or `G ≤ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticConstraint {
    #[serde(flatten)]
    pub form: QuadraticForm,
    #[serde(skip)]
    pub kind: ConstraintKind,
}

impl QuadraticConstraint {
    pub fn equality(form: QuadraticForm) -> Self {
        Self {
            form,
            kind: ConstraintKind::Equality,
        }
    }

    pub fn inequality(form: QuadraticForm) -> Self {
        Self {
            form,
            kind: ConstraintKind::Inequality,
        }
    }

    /// Linear constraint `cᵀx + a ⋆ 0`.
    pub fn linear(c: Vec<f64>, a: f64, kind: ConstraintKind) -> Self {
        let n = c.len();
        Self {
            form: QuadraticForm {
                t: vec![vec![0.0; n]; n],
                c,
                a,
            },
            kind,
        }
    }

    pub fn residual(&self, x: &[u8]) -> Result<f64> {
        validate_bits(x, self.form.dim())?;
        Ok(self.form.value(x))
    }

    pub fn is_satisfied(&self, x: &[u8]) -> Result<bool> {
        let g = self.residual(x)?;
        Ok(satisfied(self.kind, g))
    }
}

fn satisfied(kind: ConstraintKind, g: f64) -> bool {
    match kind {
        ConstraintKind::Equality => g.abs() <= FEASIBILITY_TOL,
        ConstraintKind::Inequality => g <= FEASIBILITY_TOL,
    }
}

/// Where a block of slack variables came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "origin", content = "constraint", rename_all = "snake_case")]
pub enum SlackOrigin {
    Inequality(usize),
    InvalidConfig(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackBlock {
    #[serde(flatten)]
    pub origin: SlackOrigin,
    pub start: usize,
    pub len: usize,
}

/// A QCBO instance.
///
/// `n` counts every binary variable, including slack variables introduced by
/// [`inequality_to_equality`]. IC configurations always refer to the
/// original decision variables, which occupy the first `n - slack_count()`
/// positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemFile", into = "ProblemFile")]
pub struct QcboProblem {
    pub n: usize,
    pub objective: QuadraticForm,
    pub equalities: Vec<QuadraticConstraint>,
    pub inequalities: Vec<QuadraticConstraint>,
    pub invalid_configs: Vec<Vec<u8>>,
    pub slack: Vec<SlackBlock>,
}

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    n: usize,
    #[serde(flatten)]
    objective: QuadraticForm,
    #[serde(default)]
    equalities: Vec<QuadraticConstraint>,
    #[serde(default)]
    inequalities: Vec<QuadraticConstraint>,
    #[serde(default)]
    invalid_configs: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    slack: Vec<SlackBlock>,
}

impl TryFrom<ProblemFile> for QcboProblem {
    type Error = Error;

    fn try_from(f: ProblemFile) -> Result<Self> {
        let mut p = QcboProblem {
            n: f.n,
            objective: f.objective,
            equalities: f.equalities,
            inequalities: f.inequalities,
            invalid_configs: f.invalid_configs,
            slack: f.slack,
        };
        for c in &mut p.equalities {
            c.kind = ConstraintKind::Equality;
        }
        for c in &mut p.inequalities {
            c.kind = ConstraintKind::Inequality;
        }
        p.validate()?;
        Ok(p)
    }
}

impl From<QcboProblem> for ProblemFile {
    fn from(p: QcboProblem) -> Self {
        ProblemFile {
            n: p.n,
            objective: p.objective,
            equalities: p.equalities,
            inequalities: p.inequalities,
            invalid_configs: p.invalid_configs,
            slack: p.slack,
        }
    }
}

impl QcboProblem {
    /// Unconstrained problem with the given objective.
    pub fn new(objective: QuadraticForm) -> Result<Self> {
        let mut p = Self {
            n: objective.dim(),
            objective,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            invalid_configs: Vec::new(),
            slack: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_constraint(mut self, c: QuadraticConstraint) -> Result<Self> {
        match c.kind {
            ConstraintKind::Equality => self.equalities.push(c),
            ConstraintKind::Inequality => self.inequalities.push(c),
        }
        self.validate()?;
        Ok(self)
    }

    pub fn with_invalid_config(mut self, z: Vec<u8>) -> Result<Self> {
        self.invalid_configs.push(z);
        self.validate()?;
        Ok(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    /// Checks shapes and symmetry, and drops duplicate IC configurations.
    pub fn validate(&mut self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Input("problem needs at least one variable".into()));
        }
        let n = self.n;
        self.objective.validate(n, "objective")?;
        for (i, c) in self.equalities.iter_mut().enumerate() {
            c.form.validate(n, &format!("equality {i}"))?;
        }
        for (i, c) in self.inequalities.iter_mut().enumerate() {
            c.form.validate(n, &format!("inequality {i}"))?;
        }
        let slack = self.slack_count();
        if slack >= n {
            return Err(Error::Input("slack blocks cover every variable".into()));
        }
        let n_orig = n - slack;
        let mut seen: Vec<Vec<u8>> = Vec::with_capacity(self.invalid_configs.len());
        for z in self.invalid_configs.drain(..) {
            validate_bits(&z, n_orig)?;
            if !seen.contains(&z) {
                seen.push(z);
            }
        }
        self.invalid_configs = seen;
        Ok(())
    }

    pub fn slack_count(&self) -> usize {
        self.slack.iter().map(|b| b.len).sum()
    }

    /// Number of original decision variables (IC configurations live here).
    pub fn n_original(&self) -> usize {
        self.n - self.slack_count()
    }

    pub fn n_ic(&self) -> usize {
        self.invalid_configs.len()
    }

    pub fn is_unconstrained(&self) -> bool {
        self.equalities.is_empty()
            && self.inequalities.is_empty()
            && self.invalid_configs.is_empty()
    }

    pub fn evaluate_cost(&self, x: &[u8]) -> Result<f64> {
        validate_bits(x, self.n)?;
        Ok(self.objective.value(x))
    }

    pub fn is_feasible(&self, x: &[u8]) -> Result<bool> {
        validate_bits(x, self.n)?;
        Ok(self.feasible_unchecked(x))
    }

    pub(crate) fn feasible_unchecked(&self, x: &[u8]) -> bool {
        let n_orig = self.n_original();
        self.equalities
            .iter()
            .all(|c| satisfied(ConstraintKind::Equality, c.form.value(x)))
            && self
                .inequalities
                .iter()
                .all(|c| satisfied(ConstraintKind::Inequality, c.form.value(x)))
            && !self.invalid_configs.iter().any(|z| z[..] == x[..n_orig])
    }

    /// Basis indices (over all `n` variables) of every IC configuration.
    ///
    /// When inequality slack is present each configuration covers all slack
    /// assignments.
    pub fn invalid_indices(&self) -> Vec<usize> {
        let slack = self.slack_count();
        let mut out = Vec::new();
        for z in &self.invalid_configs {
            let base = bits::index_of(z) << slack;
            out.extend((0..1usize << slack).map(|s| base | s));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// The SVP instance `min x₁ + 2x₂ + 5x₃ + 2x₂x₃` s.t. `x ≠ 000`.
pub fn svp_instance() -> QcboProblem {
    let objective = QuadraticForm {
        t: vec![
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ],
        c: vec![1.0, 2.0, 5.0],
        a: 0.0,
    };
    QcboProblem::new(objective)
        .and_then(|p| p.with_invalid_config(vec![0, 0, 0]))
        .expect("SVP instance is valid")
}

pub fn evaluate_cost(p: &QcboProblem, x: &[u8]) -> Result<f64> {
    p.evaluate_cost(x)
}

pub fn constraint_residual(c: &QuadraticConstraint, x: &[u8]) -> Result<f64> {
    c.residual(x)
}

pub fn is_feasible(p: &QcboProblem, x: &[u8]) -> Result<bool> {
    p.is_feasible(x)
}

fn denominator(v: f64) -> Option<u64> {
    (1..=MAX_DENOMINATOR).find(|&d| {
        let s = v * d as f64;
        (s - s.round()).abs() <= 1e-9 * s.abs().max(1.0)
    })
}

/// Smallest positive integer that makes every coefficient integral.
fn integer_scale(form: &QuadraticForm) -> Result<u64> {
    form.coefficients().try_fold(1u64, |acc, v| {
        denominator(v)
            .map(|d| lcm(acc, d))
            .ok_or_else(|| Error::Input(format!("coefficient {v} is not a small rational")))
    })
}

/// Number of binary slack variables needed to absorb a non-negative integer
/// range `[0, max]`.
pub fn slack_bits(max: f64) -> Result<usize> {
    if max < -FEASIBILITY_TOL {
        return Err(Error::Infeasible(format!(
            "inequality cannot be satisfied (max of -G is {max})"
        )));
    }
    let max = max.round();
    if max < 1.0 {
        return Ok(0);
    }
    Ok((max.log2() + 1.0).floor() as usize)
}

/// Replaces each inequality `G(x) ≤ 0` with `-kG(x) - Σ 2^j s_j = 0`, where `k`
/// clears coefficient denominators and the slack register covers the range
/// of `-kG`.
pub fn inequality_to_equality(p: &QcboProblem) -> Result<QcboProblem> {
    if p.inequalities.is_empty() {
        return Ok(p.clone());
    }
    let mut plans = Vec::with_capacity(p.inequalities.len());
    for c in &p.inequalities {
        let k = integer_scale(&c.form)? as f64;
        let neg = c.form.scaled(-k);
        let bits = slack_bits(neg.max_value())?;
        plans.push((neg, bits));
    }
    let added: usize = plans.iter().map(|(_, b)| b).sum();
    let n_new = p.n + added;
    crate::bits::check_cap(n_new)?;

    let mut out = QcboProblem {
        n: n_new,
        objective: p.objective.padded(n_new),
        equalities: p
            .equalities
            .iter()
            .map(|c| QuadraticConstraint::equality(c.form.padded(n_new)))
            .collect(),
        inequalities: Vec::new(),
        invalid_configs: p.invalid_configs.clone(),
        slack: p.slack.clone(),
    };
    let mut next = p.n;
    for (i, (neg, bits)) in plans.into_iter().enumerate() {
        let mut form = neg.padded(n_new);
        for j in 0..bits {
            form.c[next + j] = -((1u64 << j) as f64);
        }
        out.equalities.push(QuadraticConstraint::equality(form));
        if bits > 0 {
            out.slack.push(SlackBlock {
                origin: SlackOrigin::Inequality(i),
                start: next,
                len: bits,
            });
        }
        next += bits;
    }
    out.validate()?;
    Ok(out)
}

/// Upper-triangular matrix with `-1` on the diagonal and `+1` above it.
fn ic_matrix_row_dot(h: &[u8], q: usize) -> i64 {
    -(h[q] as i64) + h[q + 1..].iter().map(|&b| b as i64).sum::<i64>()
}

/// IC penalty `g(x, s) = 1 + vᵀAh` with `h = x ⊕ z` and
/// `v = [s₁, …, s_{n-2}, 1 - h_n, 1]`.
pub fn ic_penalty_g(z: &[u8], x: &[u8], s: &[u8]) -> Result<i64> {
    let n = z.len();
    if n < 2 {
        return Err(Error::UnsupportedSize(
            "IC penalty needs at least 2 variables".into(),
        ));
    }
    validate_bits(z, n)?;
    validate_bits(x, n)?;
    validate_bits(s, n - 2)?;
    let h: Vec<u8> = x.iter().zip(z).map(|(a, b)| a ^ b).collect();
    let mut v: Vec<i64> = s.iter().map(|&b| b as i64).collect();
    v.push(1 - h[n - 1] as i64);
    v.push(1);
    let vah: i64 = (0..n).map(|q| v[q] * ic_matrix_row_dot(&h, q)).sum();
    Ok(1 + vah)
}

/// `∏ (1 - (z_q(1-x_q) + (1-z_q)x_q))`: 1 when `x = z`, else 0.
pub fn ic_indicator(z: &[u8], x: &[u8]) -> Result<i64> {
    validate_bits(x, z.len())?;
    Ok(z.iter()
        .zip(x)
        .map(|(&zq, &xq)| {
            let (zq, xq) = (zq as i64, xq as i64);
            1 - (zq * (1 - xq) + (1 - zq) * xq)
        })
        .product())
}

/// Dense QUBO accumulator; every write keeps `T` symmetric.
#[derive(Clone, Debug)]
pub(crate) struct QuboBuilder {
    pub form: QuadraticForm,
    /// Number of `s_q·h_j` products emitted by [`QuboBuilder::ic_penalty`].
    pub slack_products: usize,
}

/// `constant + coef · y_var`, the affine shape of `h_q = z_q + (1 - 2z_q)x_q`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Affine {
    pub constant: f64,
    pub coef: f64,
    pub var: usize,
}

impl Affine {
    fn var(var: usize) -> Self {
        Self {
            constant: 0.0,
            coef: 1.0,
            var,
        }
    }

    fn xor(var: usize, z: u8) -> Self {
        Self {
            constant: z as f64,
            coef: 1.0 - 2.0 * z as f64,
            var,
        }
    }
}

impl QuboBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            form: QuadraticForm::zeros(n),
            slack_products: 0,
        }
    }

    pub fn constant(&mut self, v: f64) {
        self.form.a += v;
    }

    pub fn linear(&mut self, i: usize, v: f64) {
        self.form.c[i] += v;
    }

    /// Adds `v · y_i · y_j`.
    pub fn pair(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.form.c[i] += v;
        } else {
            self.form.t[i][j] += 0.5 * v;
            self.form.t[j][i] += 0.5 * v;
        }
    }

    pub fn affine(&mut self, w: f64, a: Affine) {
        self.constant(w * a.constant);
        self.linear(a.var, w * a.coef);
    }

    pub fn affine_product(&mut self, w: f64, a: Affine, b: Affine) {
        self.constant(w * a.constant * b.constant);
        self.linear(a.var, w * a.coef * b.constant);
        self.linear(b.var, w * a.constant * b.coef);
        self.pair(a.var, b.var, w * a.coef * b.coef);
    }

    /// Adds `w · g(x, s)` expanded into constant, linear and bilinear terms.
    ///
    /// `vars[q]` is the position of `x_q`, `slack[q]` the position of `s_q`.
    pub fn ic_penalty(&mut self, w: f64, z: &[u8], vars: &[usize], slack: &[usize]) {
        let n = z.len();
        let h = |q: usize| Affine::xor(vars[q], z[q]);
        self.constant(w);
        for (q, &sq) in slack.iter().enumerate() {
            let s = Affine::var(sq);
            self.affine_product(-w, s, h(q));
            for k in q + 1..n {
                self.affine_product(w, s, h(k));
            }
            self.slack_products += n - q;
        }
        self.affine(-w, h(n - 2));
        self.affine(-w, h(n - 1));
        self.affine_product(w, h(n - 1), h(n - 2));
    }

    /// Adds `w · G(x)²` for a constraint whose off-diagonal quadratic part is zero.
    pub fn squared_linear(&mut self, w: f64, g: &QuadraticForm) -> Result<()> {
        let n = g.dim();
        let mut lin = g.c.clone();
        for q in 0..n {
            for j in 0..n {
                if q != j && g.t[q][j].abs() > 0.0 {
                    return Err(Error::Input(
                        "squaring a constraint with bilinear terms is not quadratic".into(),
                    ));
                }
            }
            lin[q] += g.t[q][q];
        }
        self.constant(w * g.a * g.a);
        for q in 0..n {
            if lin[q] == 0.0 {
                continue;
            }
            self.linear(q, w * (lin[q] * lin[q] + 2.0 * g.a * lin[q]));
            for j in q + 1..n {
                if lin[j] != 0.0 {
                    self.pair(q, j, 2.0 * w * lin[q] * lin[j]);
                }
            }
        }
        Ok(())
    }
}

/// Unconstrained problem over original plus slack variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    pub n: usize,
    #[serde(flatten)]
    pub form: QuadraticForm,
    /// Leading variables that belong to the source problem.
    pub n_original: usize,
    pub slack: Vec<SlackBlock>,
}

impl QuboProblem {
    pub fn evaluate_cost(&self, x: &[u8]) -> Result<f64> {
        validate_bits(x, self.n)?;
        Ok(self.form.value(x))
    }

    pub fn slack_count(&self) -> usize {
        self.n - self.n_original
    }

    /// As a constraint-free problem, keeping the slack bookkeeping.
    pub fn as_problem(&self) -> QcboProblem {
        QcboProblem {
            n: self.n,
            objective: self.form.clone(),
            equalities: Vec::new(),
            inequalities: Vec::new(),
            invalid_configs: Vec::new(),
            slack: Vec::new(),
        }
    }
}

fn check_weights(name: &str, ws: &[f64], expected: usize) -> Result<()> {
    if ws.len() != expected {
        return Err(Error::InvalidHyperparameter(format!(
            "expected {expected} {name} values, got {}",
            ws.len()
        )));
    }
    if let Some(w) = ws.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::InvalidHyperparameter(format!(
            "{name} must be positive, got {w}"
        )));
    }
    Ok(())
}

/// Layout of the slack-based conversion: IC slack blocks follow all
/// existing variables, `n_original - 2` per configuration.
pub(crate) fn ic_slack_layout(p: &QcboProblem) -> Result<Vec<SlackBlock>> {
    let n_orig = p.n_original();
    if p.n_ic() > 0 && n_orig < 2 {
        return Err(Error::UnsupportedSize(
            "IC penalty needs at least 2 decision variables".into(),
        ));
    }
    let len = n_orig.saturating_sub(2);
    Ok((0..p.n_ic())
        .map(|r| SlackBlock {
            origin: SlackOrigin::InvalidConfig(r),
            start: p.n + r * len,
            len,
        })
        .collect())
}

/// Adds `Σ_r γ_r g^{(r)}` to a builder laid out per [`ic_slack_layout`].
pub(crate) fn add_ic_penalties(
    b: &mut QuboBuilder,
    p: &QcboProblem,
    gammas: &[f64],
    layout: &[SlackBlock],
) {
    let vars: Vec<usize> = (0..p.n_original()).collect();
    for ((z, &g), block) in p.invalid_configs.iter().zip(gammas).zip(layout) {
        let slack: Vec<usize> = (block.start..block.start + block.len).collect();
        b.ic_penalty(g, z, &vars, &slack);
    }
}

/// Penalized unconstrained problem
/// `F(x) + Σ_r γ_r g^{(r)}(x, s^{(r)}) + Σ_q β_q G_q(x)²`.
pub fn to_qubo(p: &QcboProblem, gammas: &[f64], betas: &[f64]) -> Result<QuboProblem> {
    to_qubo_counted(p, gammas, betas).map(|(q, _)| q)
}

/// [`to_qubo`] plus the number of slack-variable products in the IC penalties.
pub(crate) fn to_qubo_counted(
    p: &QcboProblem,
    gammas: &[f64],
    betas: &[f64],
) -> Result<(QuboProblem, usize)> {
    if !p.inequalities.is_empty() {
        return Err(Error::MustConvert(
            "apply inequality_to_equality before to_qubo".into(),
        ));
    }
    check_weights("gamma", gammas, p.n_ic())?;
    check_weights("beta", betas, p.equalities.len())?;
    let layout = ic_slack_layout(p)?;
    let n_total = p.n + layout.iter().map(|b| b.len).sum::<usize>();
    crate::bits::check_cap(n_total)?;

    let mut b = QuboBuilder::new(n_total);
    b.form = p.objective.padded(n_total);
    for (c, &beta) in p.equalities.iter().zip(betas) {
        b.squared_linear(beta, &c.form.padded(n_total))?;
    }
    add_ic_penalties(&mut b, p, gammas, &layout);

    let mut slack = p.slack.clone();
    slack.extend(layout.into_iter().filter(|b| b.len > 0));
    let products = b.slack_products;
    Ok((
        QuboProblem {
            n: n_total,
            form: b.form,
            n_original: p.n_original(),
            slack,
        },
        products,
    ))
}

/// Random instance: `T`, `c`, `a` i.i.d. uniform on `[-5, 5]`, `T` symmetrized
/// as `(T + Tᵀ)/2`, and `n_ic` distinct uniformly drawn IC configurations.
pub fn random_instance(n: usize, n_ic: usize, seed: u64) -> Result<QcboProblem> {
    if n < 2 {
        return Err(Error::Input("random instances need n >= 2".into()));
    }
    if n < 63 && n_ic > (1usize << n) {
        return Err(Error::Input(format!(
            "cannot draw {n_ic} distinct configurations over {n} bits"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-5.0..=5.0)).collect())
        .collect();
    for q in 0..n {
        for j in q + 1..n {
            let m = 0.5 * (t[q][j] + t[j][q]);
            t[q][j] = m;
            t[j][q] = m;
        }
    }
    let c = (0..n).map(|_| rng.gen_range(-5.0..=5.0)).collect();
    let a = rng.gen_range(-5.0..=5.0);
    let mut configs: Vec<Vec<u8>> = Vec::with_capacity(n_ic);
    while configs.len() < n_ic {
        let z: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
        if !configs.contains(&z) {
            configs.push(z);
        }
    }
    let mut p = QcboProblem {
        n,
        objective: QuadraticForm { t, c, a },
        equalities: Vec::new(),
        inequalities: Vec::new(),
        invalid_configs: configs,
        slack: Vec::new(),
    };
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_bits(n: usize) -> impl Iterator<Item = Vec<u8>> {
        (0..1usize << n).map(move |j| bits::bits_of(j, n))
    }

    /// Term-by-term sum, written independently of `QuadraticForm::value`.
    fn cost_oracle(f: &QuadraticForm, x: &[u8]) -> f64 {
        let n = x.len();
        let mut total = f.a;
        for q in 0..n {
            total += f.c[q] * x[q] as f64;
        }
        for q in 0..n {
            for j in 0..n {
                total += f.t[q][j] * (x[q] * x[j]) as f64;
            }
        }
        total
    }

    #[test]
    fn svp_cost_values() {
        let p = svp_instance();
        assert_eq!(p.evaluate_cost(&[1, 0, 0]).unwrap(), 1.0);
        assert_eq!(p.evaluate_cost(&[0, 0, 0]).unwrap(), 0.0);
        let diag: Vec<f64> = all_bits(3).map(|x| p.evaluate_cost(&x).unwrap()).collect();
        assert_eq!(diag, vec![0.0, 5.0, 2.0, 9.0, 1.0, 6.0, 3.0, 10.0]);
    }

    #[test]
    fn zero_input_gives_offset() {
        let p = random_instance(5, 0, 3).unwrap();
        assert_eq!(p.evaluate_cost(&[0; 5]).unwrap(), p.objective.a);
    }

    #[test]
    fn cost_matches_oracle_exhaustively() {
        let p = random_instance(6, 1, 11).unwrap();
        for x in all_bits(6) {
            let got = p.evaluate_cost(&x).unwrap();
            assert!((got - cost_oracle(&p.objective, &x)).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_errors() {
        let p = svp_instance();
        assert!(matches!(
            p.evaluate_cost(&[1, 0]),
            Err(Error::Dimension {
                expected: 3,
                got: 2
            })
        ));
        assert!(matches!(
            p.is_feasible(&[1, 0, 0, 0]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(p.evaluate_cost(&[1, 2, 0]), Err(Error::Input(_))));
    }

    #[test]
    fn residual_examples() {
        let c = QuadraticConstraint::linear(vec![1.0, 1.0], -1.0, ConstraintKind::Equality);
        assert_eq!(c.residual(&[1, 0]).unwrap(), 0.0);
        assert_eq!(c.residual(&[1, 1]).unwrap(), 1.0);
        assert!(c.residual(&[1]).is_err());
    }

    #[test]
    fn residual_matches_polynomial() {
        let p = random_instance(5, 0, 21).unwrap();
        let c = QuadraticConstraint::inequality(p.objective.clone());
        for x in all_bits(5) {
            let g = c.residual(&x).unwrap();
            assert!((g - cost_oracle(&p.objective, &x)).abs() < 1e-12);
        }
    }

    #[test]
    fn feasibility_examples() {
        let p = svp_instance();
        assert!(!p.is_feasible(&[0, 0, 0]).unwrap());
        assert!(p.is_feasible(&[1, 0, 0]).unwrap());
        let free = random_instance(4, 0, 1).unwrap();
        assert!(all_bits(4).all(|x| free.is_feasible(&x).unwrap()));
    }

    #[test]
    fn duplicate_configs_are_dropped() {
        let p = svp_instance().with_invalid_config(vec![0, 0, 0]).unwrap();
        assert_eq!(p.n_ic(), 1);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let mut f = QuadraticForm::zeros(2);
        f.t[0][1] = 1.0;
        assert!(matches!(QcboProblem::new(f), Err(Error::Input(_))));
    }

    #[test]
    fn slack_conversion_example() {
        // x1 + x2 <= 1, i.e. G = x1 + x2 - 1 <= 0.
        let p = QcboProblem::new(QuadraticForm::zeros(2))
            .unwrap()
            .with_constraint(QuadraticConstraint::linear(
                vec![1.0, 1.0],
                -1.0,
                ConstraintKind::Inequality,
            ))
            .unwrap();
        let q = inequality_to_equality(&p).unwrap();
        assert_eq!(q.n, 3);
        assert!(q.inequalities.is_empty());
        let eq = &q.equalities[0].form;
        assert_eq!(eq.c, vec![-1.0, -1.0, -1.0]);
        assert_eq!(eq.a, 1.0);
        assert_eq!(
            q.slack,
            vec![SlackBlock {
                origin: SlackOrigin::Inequality(0),
                start: 2,
                len: 1
            }]
        );
    }

    #[test]
    fn slack_conversion_identity_without_inequalities() {
        let p = svp_instance();
        assert_eq!(inequality_to_equality(&p).unwrap(), p);
    }

    #[test]
    fn slack_conversion_rejects_infeasible() {
        // x1 + 2 <= 0 never holds.
        let p = QcboProblem::new(QuadraticForm::zeros(1))
            .unwrap()
            .with_constraint(QuadraticConstraint::linear(
                vec![1.0],
                2.0,
                ConstraintKind::Inequality,
            ))
            .unwrap();
        assert!(matches!(
            inequality_to_equality(&p),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn slack_conversion_scales_fractions() {
        // 0.5 x1 + 0.5 x2 + 0.5 x3 - 1 <= 0 -> at most two ones.
        let p = QcboProblem::new(QuadraticForm::zeros(3))
            .unwrap()
            .with_constraint(QuadraticConstraint::linear(
                vec![0.5, 0.5, 0.5],
                -1.0,
                ConstraintKind::Inequality,
            ))
            .unwrap();
        let q = inequality_to_equality(&p).unwrap();
        assert_eq!(q.slack_count(), 2);
        for x in all_bits(3) {
            let orig = p.is_feasible(&x).unwrap();
            let lifted = all_bits(2).any(|s| {
                let y: Vec<u8> = x.iter().chain(&s).copied().collect();
                q.is_feasible(&y).unwrap()
            });
            assert_eq!(orig, lifted, "x = {x:?}");
        }
    }

    #[test]
    fn slack_bit_counts() {
        assert_eq!(slack_bits(0.0).unwrap(), 0);
        assert_eq!(slack_bits(1.0).unwrap(), 1);
        assert_eq!(slack_bits(3.0).unwrap(), 2);
        assert_eq!(slack_bits(4.0).unwrap(), 3);
        assert!(slack_bits(-1.0).is_err());
    }

    #[test]
    fn penalty_examples() {
        for s in [[0u8], [1u8]] {
            assert_eq!(ic_penalty_g(&[0, 0, 0], &[0, 0, 0], &s).unwrap(), 1);
        }
        assert_eq!(ic_penalty_g(&[0, 0, 0], &[1, 0, 0], &[1]).unwrap(), 0);
        assert!(matches!(
            ic_penalty_g(&[0], &[1], &[]),
            Err(Error::UnsupportedSize(_))
        ));
    }

    #[test]
    fn svp_penalty_closed_form() {
        // g = 1 - s x1 + s x2 + s x3 - x2 - x3 + x2 x3
        for x in all_bits(3) {
            for s in [0u8, 1] {
                let (x1, x2, x3, s1) = (x[0] as i64, x[1] as i64, x[2] as i64, s as i64);
                let want = 1 - s1 * x1 + s1 * x2 + s1 * x3 - x2 - x3 + x2 * x3;
                assert_eq!(ic_penalty_g(&[0, 0, 0], &x, &[s]).unwrap(), want);
            }
        }
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(ic_indicator(&[1, 0, 1], &[1, 0, 1]).unwrap(), 1);
        assert_eq!(ic_indicator(&[1, 0, 1], &[1, 1, 1]).unwrap(), 0);
    }

    #[test]
    fn expanded_penalty_matches_definition() {
        for n in 2..=6 {
            for zi in 0..1usize << n {
                let z = bits::bits_of(zi, n);
                let mut b = QuboBuilder::new(2 * n - 2);
                let vars: Vec<usize> = (0..n).collect();
                let slack: Vec<usize> = (n..2 * n - 2).collect();
                b.ic_penalty(1.0, &z, &vars, &slack);
                for y in all_bits(2 * n - 2) {
                    let g = ic_penalty_g(&z, &y[..n], &y[n..]).unwrap() as f64;
                    assert!((b.form.value(&y) - g).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn svp_conversion_matches_closed_form() {
        let q = to_qubo(&svp_instance(), &[3.0], &[]).unwrap();
        assert_eq!(q.n, 4);
        assert_eq!(q.n_original, 3);
        for y in all_bits(4) {
            let [y1, y2, y3, y4] = [y[0], y[1], y[2], y[3]].map(|v| v as f64);
            let want = y1
                + 2.0 * y2
                + 5.0 * y3
                + 2.0 * y2 * y3
                + 3.0 * (1.0 - y2 - y3 + y2 * y3 - y1 * y4 + y2 * y4 + y3 * y4);
            assert!((q.evaluate_cost(&y).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn conversion_of_unconstrained_is_identity() {
        let p = random_instance(4, 0, 5).unwrap();
        let q = to_qubo(&p, &[], &[]).unwrap();
        assert_eq!(q.n, 4);
        assert_eq!(q.form, p.objective);
        assert!(q.slack.is_empty());
    }

    #[test]
    fn conversion_rejects_bad_weights() {
        let p = svp_instance();
        assert!(matches!(
            to_qubo(&p, &[0.0], &[]),
            Err(Error::InvalidHyperparameter(_))
        ));
        assert!(matches!(
            to_qubo(&p, &[], &[]),
            Err(Error::InvalidHyperparameter(_))
        ));
    }

    #[test]
    fn equality_penalty_is_squared_residual() {
        let g = QuadraticConstraint::linear(vec![1.0, 2.0, -1.0], -1.0, ConstraintKind::Equality);
        let p = QcboProblem::new(QuadraticForm::zeros(3))
            .unwrap()
            .with_constraint(g.clone())
            .unwrap();
        let q = to_qubo(&p, &[], &[2.5]).unwrap();
        for x in all_bits(3) {
            let r = g.residual(&x).unwrap();
            assert!((q.evaluate_cost(&x).unwrap() - 2.5 * r * r).abs() < 1e-12);
        }
    }

    #[test]
    fn random_instance_contract() {
        let a = random_instance(4, 1, 7).unwrap();
        assert_eq!(a, random_instance(4, 1, 7).unwrap());
        let b = random_instance(10, 1, 99).unwrap();
        for q in 0..10 {
            assert!(b.objective.c[q].abs() <= 5.0);
            for j in 0..10 {
                assert!(b.objective.t[q][j].abs() <= 5.0);
                assert_eq!(b.objective.t[q][j], b.objective.t[j][q]);
            }
        }
        assert!(b.objective.a.abs() <= 5.0);
        assert!(random_instance(2, 5, 0).is_err());
        assert_eq!(random_instance(2, 4, 0).unwrap().n_ic(), 4);
    }

    #[test]
    fn random_instance_moments() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..1000 {
            let p = random_instance(6, 1, seed).unwrap();
            sum += p.objective.t.iter().flatten().sum::<f64>();
            count += 36;
        }
        assert!((sum / count as f64).abs() < 0.3);
    }

    #[test]
    fn json_round_trip() {
        let p = svp_instance();
        let back = QcboProblem::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        let raw = r#"{"n":2,"c":[1,1],"a":0,"inequalities":[{"c":[1,1],"a":-1}],"invalid_configs":[[1,1],[1,1]]}"#;
        let q = QcboProblem::from_json(raw).unwrap();
        assert_eq!(q.inequalities[0].kind, ConstraintKind::Inequality);
        assert_eq!(q.n_ic(), 1);
        assert!(QcboProblem::from_json(r#"{"n":2,"c":[1],"a":0}"#).is_err());
    }
}
