//! Dense state vectors and density matrices for small qubit counts.
//!
//! These are the brute-force substrate against which every analytic formula
//! in the crate is checked. Qubit 0 is Alice, qubit `k` (for `k >= 1`) is Bob
//! `k`; qubit 0 is the most significant bit of a basis index, so the index of
//! `|a⟩|j⟩` is `a * 2^(n-1) + j`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on dense simulations, in qubits.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// Tolerance used when validating user supplied states.
pub const STATE_TOL: f64 = 1e-12;

/// Smallest eigenvalue accepted for a density matrix.
pub const EIGEN_TOL: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Qubit cap for dense oracles, overridable through `NQKD_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var("NQKD_DENSE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

pub(crate) fn check_cap(n: usize) -> Result<()> {
    let cap = dense_cap();
    if n > cap {
        Err(Error::DenseCapExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// Bit of qubit `q` in basis index `i` of an `n`-qubit register.
#[inline]
pub fn qubit_bit(i: usize, n: usize, q: usize) -> usize {
    (i >> (n - 1 - q)) & 1
}

#[inline]
fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Single-qubit Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// Action on a computational basis state: `P|b⟩ = phase |b'⟩`.
    #[inline]
    fn act(self, b: usize) -> (usize, Complex64) {
        match self {
            Pauli::I => (b, ONE),
            Pauli::X => (b ^ 1, ONE),
            Pauli::Y => (b ^ 1, if b == 0 { I } else { -I }),
            Pauli::Z => (b, if b == 0 { ONE } else { -ONE }),
        }
    }
}

pub type Gate1 = [[Complex64; 2]; 2];

pub fn hadamard() -> Gate1 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

/// Basis change that maps the eigenbasis of `pauli` onto the Z basis, so that
/// measuring Z afterwards measures `pauli` (outcome bit 0 ↔ eigenvalue +1).
pub fn to_z_basis(pauli: Pauli) -> Gate1 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match pauli {
        Pauli::X => hadamard(),
        // H·S†
        Pauli::Y => [
            [Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
        ],
        Pauli::Z | Pauli::I => Pauli::I.matrix(),
    }
}

/// Pure state on `n` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        check_cap(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_cap(n)?;
        if amps.len() != 1 << n {
            return Err(Error::NonPhysicalState(format!(
                "expected {} amplitudes for {n} qubits, got {}",
                1usize << n,
                amps.len()
            )));
        }
        let state = Self { n, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NonPhysicalState(format!("norm² = {norm}")));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= c);
    }

    pub fn apply_1q(&mut self, q: usize, u: &Gate1) {
        let m = qubit_mask(self.n, q);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | m] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        self.apply_1q(q, &p.matrix());
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let (ma, mb) = (qubit_mask(self.n, a), qubit_mask(self.n, b));
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & ma != 0 && i & mb != 0 {
                *amp = -*amp;
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (mc, mt) = (qubit_mask(self.n, control), qubit_mask(self.n, target));
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    /// Multiplies amplitude `i` by `phase(i)`.
    pub fn apply_diagonal(&mut self, phase: impl Fn(usize) -> Complex64) {
        for (i, amp) in self.amps.iter_mut().enumerate() {
            *amp *= phase(i);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Projects qubit `q` onto the single-qubit state `onto` and removes it
    /// from the register. Returns the outcome probability and the normalised
    /// post-measurement state of the remaining qubits.
    pub fn measure_qubit(&self, q: usize, onto: [Complex64; 2]) -> (f64, StateVector) {
        let n = self.n;
        let m = qubit_mask(n, q);
        let low = m - 1;
        let mut out = vec![ZERO; 1 << (n - 1)];
        for (r, slot) in out.iter_mut().enumerate() {
            // reinsert a zero bit at q's position
            let i0 = ((r & !low) << 1) | (r & low);
            *slot = onto[0].conj() * self.amps[i0] + onto[1].conj() * self.amps[i0 | m];
        }
        let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        if p > 0.0 {
            let s = 1.0 / p.sqrt();
            out.iter_mut().for_each(|a| *a *= s);
        }
        (p, StateVector { n: n - 1, amps: out })
    }

    /// `⟨ψ|P|ψ⟩` for a Pauli string given as (qubit, operator) pairs.
    pub fn expectation(&self, paulis: &[(usize, Pauli)]) -> f64 {
        let mut acc = ZERO;
        for (i, a) in self.amps.iter().enumerate() {
            let (k, phase) = pauli_string_act(i, self.n, paulis);
            acc += self.amps[k].conj() * phase * a;
        }
        acc.re
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.amps.len();
        let mut data = vec![ZERO; dim * dim];
        for (r, ar) in self.amps.iter().enumerate() {
            for (c, ac) in self.amps.iter().enumerate() {
                data[r * dim + c] = ar * ac.conj();
            }
        }
        DensityMatrix { n: self.n, dim, data }
    }
}

/// Applies a Pauli string to basis state `i`: returns `(k, phase)` with
/// `P|i⟩ = phase |k⟩`.
fn pauli_string_act(i: usize, n: usize, paulis: &[(usize, Pauli)]) -> (usize, Complex64) {
    let mut k = i;
    let mut phase = ONE;
    for &(q, p) in paulis {
        let m = qubit_mask(n, q);
        let b = usize::from(k & m != 0);
        let (b2, ph) = p.act(b);
        phase *= ph;
        if b2 != b {
            k ^= m;
        }
    }
    (k, phase)
}

/// Mixed state on `n` qubits, row-major `2^n × 2^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    n: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_cap(n)?;
        let dim = 1 << n;
        let mut data = vec![ZERO; dim * dim];
        let v = Complex64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            data[i * dim + i] = v;
        }
        Ok(Self { n, dim, data })
    }

    /// Builds a density matrix from row-major entries, checking Hermiticity,
    /// unit trace and positivity.
    pub fn from_matrix(n: usize, data: Vec<Complex64>) -> Result<Self> {
        check_cap(n)?;
        let dim = 1 << n;
        if data.len() != dim * dim {
            return Err(Error::NonPhysicalState(format!(
                "expected {} entries for {n} qubits, got {}",
                dim * dim,
                data.len()
            )));
        }
        let rho = Self { n, dim, data };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(n: usize, data: Vec<Complex64>) -> Self {
        let dim = 1 << n;
        debug_assert_eq!(data.len(), dim * dim);
        Self { n, dim, data }
    }

    pub(crate) fn zeros(n: usize) -> Self {
        let dim = 1 << n;
        Self {
            n,
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::NonPhysicalState(format!("trace = {tr}")));
        }
        let herm = self.hermiticity_defect();
        if herm > STATE_TOL {
            return Err(Error::NonPhysicalState(format!(
                "not Hermitian (max |ρ - ρ†| = {herm:e})"
            )));
        }
        let min_eig = self
            .eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < EIGEN_TOL {
            return Err(Error::NonPhysicalState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    fn at(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the (Hermitian part of the) matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(self.dim, self.dim, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&l| l > 1e-15)
            .map(|l| -l * l.log2())
            .sum()
    }

    /// `ρ → p·ρ + (1-p)·σ`.
    pub fn mix(&mut self, p: f64, other: &DensityMatrix) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a * p + *b * (1.0 - p);
        }
    }

    pub(crate) fn add_scaled(&mut self, w: f64, other: &DensityMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b * w;
        }
    }

    /// `ρ → U ρ U†` for a single-qubit unitary on qubit `q`.
    pub fn apply_1q(&mut self, q: usize, u: &Gate1) {
        let m = qubit_mask(self.n, q);
        let dim = self.dim;
        // left multiply: rows
        for c in 0..dim {
            for r in 0..dim {
                if r & m == 0 {
                    let (a0, a1) = (self.get(r, c), self.get(r | m, c));
                    *self.at(r, c) = u[0][0] * a0 + u[0][1] * a1;
                    *self.at(r | m, c) = u[1][0] * a0 + u[1][1] * a1;
                }
            }
        }
        // right multiply by U†: columns
        for r in 0..dim {
            for c in 0..dim {
                if c & m == 0 {
                    let (a0, a1) = (self.get(r, c), self.get(r, c | m));
                    *self.at(r, c) = a0 * u[0][0].conj() + a1 * u[0][1].conj();
                    *self.at(r, c | m) = a0 * u[1][0].conj() + a1 * u[1][1].conj();
                }
            }
        }
    }

    /// `ρ → D ρ D†` for a diagonal unitary `D|i⟩ = phase(i)|i⟩`.
    pub fn apply_diagonal(&mut self, phase: impl Fn(usize) -> Complex64) {
        let phases: Vec<Complex64> = (0..self.dim).map(phase).collect();
        for r in 0..self.dim {
            for c in 0..self.dim {
                *self.at(r, c) *= phases[r] * phases[c].conj();
            }
        }
    }

    /// `ρ → P ρ P†` for a permutation unitary `P|i⟩ = |perm(i)⟩`.
    pub fn apply_permutation(&mut self, perm: impl Fn(usize) -> usize) {
        let dim = self.dim;
        let map: Vec<usize> = (0..dim).map(perm).collect();
        let mut out = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                out[map[r] * dim + map[c]] = self.get(r, c);
            }
        }
        self.data = out;
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (mc, mt) = (qubit_mask(self.n, control), qubit_mask(self.n, target));
        self.apply_permutation(|i| if i & mc != 0 { i ^ mt } else { i });
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let (ma, mb) = (qubit_mask(self.n, a), qubit_mask(self.n, b));
        self.apply_diagonal(|i| if i & ma != 0 && i & mb != 0 { -ONE } else { ONE });
    }

    /// Replaces qubit `q` by the maximally mixed state (`tr_q(ρ) ⊗ 1/2`).
    pub fn depolarize_qubit(&mut self, q: usize) {
        let m = qubit_mask(self.n, q);
        for r in 0..self.dim {
            if r & m != 0 {
                continue;
            }
            for c in 0..self.dim {
                if c & m != 0 {
                    continue;
                }
                let avg = (self.get(r, c) + self.get(r | m, c | m)) * 0.5;
                *self.at(r, c) = avg;
                *self.at(r | m, c | m) = avg;
                *self.at(r | m, c) = ZERO;
                *self.at(r, c | m) = ZERO;
            }
        }
    }

    /// Single-qubit depolarising channel: with probability `p` qubit `q` is
    /// replaced by the maximally mixed state.
    pub fn depolarizing_channel(&mut self, q: usize, p: f64) {
        let mut dep = self.clone();
        dep.depolarize_qubit(q);
        self.mix(1.0 - p, &dep);
    }

    /// Traces out qubit `q`.
    pub fn partial_trace(&self, q: usize) -> DensityMatrix {
        let n = self.n;
        let m = qubit_mask(n, q);
        let low = m - 1;
        let lift = |r: usize| ((r & !low) << 1) | (r & low);
        let mut out = DensityMatrix::zeros(n - 1);
        for r in 0..out.dim {
            for c in 0..out.dim {
                let (rr, cc) = (lift(r), lift(c));
                *out.at(r, c) = self.get(rr, cc) + self.get(rr | m, cc | m);
            }
        }
        out
    }

    /// `tr(ρ P)` for a Pauli string.
    pub fn expectation(&self, paulis: &[(usize, Pauli)]) -> f64 {
        // tr(ρP) = Σ_i ⟨i|ρ P|i⟩ = Σ_i phase_i ρ[k_i][i]
        let mut acc = ZERO;
        for i in 0..self.dim {
            let (k, phase) = pauli_string_act(i, self.n, paulis);
            acc += phase * self.get(i, k);
        }
        acc.re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> f64 {
        let a = psi.amplitudes();
        let mut acc = ZERO;
        for r in 0..self.dim {
            if a[r] == ZERO {
                continue;
            }
            for c in 0..self.dim {
                acc += a[r].conj() * self.get(r, c) * a[c];
            }
        }
        acc.re
    }

    /// Computational-basis outcome probabilities.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// Probability that at least one Bob's Z outcome differs from Alice's.
    pub fn prob_any_bob_differs(&self) -> f64 {
        let all = self.dim - 1;
        self.diagonal()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != 0 && i != all)
            .map(|(_, p)| p)
            .sum()
    }

    /// Probability that Bob `bob`'s Z outcome differs from Alice's.
    pub fn prob_bob_differs(&self, bob: usize) -> f64 {
        self.diagonal()
            .iter()
            .enumerate()
            .filter(|&(i, _)| qubit_bit(i, self.n, 0) != qubit_bit(i, self.n, bob))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A pure or mixed dense state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DenseState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl DenseState {
    pub fn n_qubits(&self) -> usize {
        match self {
            DenseState::Pure(s) => s.n_qubits(),
            DenseState::Mixed(m) => m.n_qubits(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            DenseState::Pure(s) => s.to_density(),
            DenseState::Mixed(m) => m.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DenseState::Pure(s) => {
                let norm = s.norm_sqr();
                if (norm - 1.0).abs() > STATE_TOL {
                    return Err(Error::NonPhysicalState(format!("norm² = {norm}")));
                }
                Ok(())
            }
            DenseState::Mixed(m) => m.validate(),
        }
    }
}

impl From<StateVector> for DenseState {
    fn from(s: StateVector) -> Self {
        DenseState::Pure(s)
    }
}

impl From<DensityMatrix> for DenseState {
    fn from(m: DensityMatrix) -> Self {
        DenseState::Mixed(m)
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gaussian_pair(rng: &mut ChaCha8Rng) -> Complex64 {
        // Box-Muller
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(r * t.cos(), r * t.sin())
    }

    pub fn random_pure(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..1 << n).map(|_| gaussian_pair(&mut rng)).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_raw(n, amps)
    }

    /// `G G† / tr(G G†)` with a Gaussian `G`.
    pub fn random_mixed(n: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1 << n;
        let g: Vec<Complex64> = (0..dim * dim).map(|_| gaussian_pair(&mut rng)).collect();
        let mut out = DensityMatrix::zeros(n);
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = ZERO;
                for k in 0..dim {
                    acc += g[r * dim + k] * g[c * dim + k].conj();
                }
                *out.at(r, c) = acc;
            }
        }
        let tr = out.trace().re;
        out.data.iter_mut().for_each(|a| *a /= tr);
        out
    }
}
