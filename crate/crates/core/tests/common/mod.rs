//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<Complex64>>;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|q| ((index >> (n - 1 - q)) & 1) as u8).collect()
}

/// `xᵀTx + cᵀx + a` written out term by term.
pub fn cost(t: &[Vec<f64>], c: &[f64], a: f64, x: &[u8]) -> f64 {
    let n = c.len();
    let mut v = a;
    for q in 0..n {
        v += c[q] * x[q] as f64;
        for j in 0..n {
            v += t[q][j] * (x[q] * x[j]) as f64;
        }
    }
    v
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

pub fn random_diag(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..1usize << n).map(|_| rng.gen_range(-5.0..5.0)).collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Complex64::new((i == j) as u8 as f64, 0.0))
                .collect()
        })
        .collect()
}

fn pauli_x() -> Matrix {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    vec![vec![z, o], vec![o, z]]
}

/// `X` on qubit `q` (qubit 0 is the most significant factor).
pub fn x_on(n: usize, q: usize) -> Matrix {
    (0..n).fold(vec![vec![Complex64::new(1.0, 0.0)]], |acc, k| {
        kron(&acc, &if k == q { pauli_x() } else { identity(2) })
    })
}

/// `Σ_q X_q` as a dense matrix.
pub fn dense_mixer(n: usize) -> Matrix {
    let dim = 1 << n;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for q in 0..n {
        let x = x_on(n, q);
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] += x[i][j];
            }
        }
    }
    m
}

/// `exp(-iφ Σ X_q) = ⊗ (cos φ I - i sin φ X)`.
pub fn dense_mixer_unitary(n: usize, phi: f64) -> Matrix {
    let (c, s) = (Complex64::new(phi.cos(), 0.0), -I * phi.sin());
    let one = vec![vec![c, s], vec![s, c]];
    (0..n).fold(vec![vec![Complex64::new(1.0, 0.0)]], |acc, _| {
        kron(&acc, &one)
    })
}

pub fn matvec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let dim = a.len();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (0..dim).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn diag_matrix(d: &[f64]) -> Matrix {
    let dim = d.len();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Complex64::new(if i == j { d[i] } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

/// `⟨ψ| i[H_M, Q] |ψ⟩` with every operator formed densely.
pub fn dense_commutator_expectation(psi: &[Complex64], q: &[f64]) -> f64 {
    let hm = dense_mixer(bits_of_len(psi.len()));
    let qm = diag_matrix(q);
    let (a, b) = (matmul(&hm, &qm), matmul(&qm, &hm));
    let comm: Matrix = a
        .iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| I * (x - y)).collect())
        .collect();
    let v = matvec(&comm, psi);
    psi.iter().zip(&v).map(|(p, w)| (p.conj() * w).re).sum()
}

pub fn expectation(psi: &[Complex64], q: &[f64]) -> f64 {
    psi.iter().zip(q).map(|(a, d)| a.norm_sqr() * d).sum()
}

fn bits_of_len(len: usize) -> usize {
    len.trailing_zeros() as usize
}
