//! GHZ basis, GHZ-diagonal states and the extended depolarisation twirl.
//!
//! The GHZ basis of `N` qubits is `|ψ_j^±⟩ = (|0⟩|j⟩ ± |1⟩|j̄⟩)/√2` with `j`
//! an `(N-1)`-bit string. Bit convention: the most significant bit of `j`
//! belongs to Bob 1 and the least significant bit to Bob `N-1`, matching the
//! dense register layout where Bob `k` is qubit `k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{check_cap, DenseState, DensityMatrix, Pauli, StateVector, STATE_TOL};
use crate::error::{Error, Result};

/// Tolerance for the `λ_j^+ = λ_j^-` symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Index `(j, σ)` of a GHZ basis vector of `n` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GhzBasisIndex {
    n: usize,
    j: usize,
    sign: Sign,
}

impl GhzBasisIndex {
    pub fn new(n: usize, j: usize, sign: Sign) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", n, "at least two parties are required"));
        }
        if n > usize::BITS as usize {
            return Err(Error::param("n", n, "too many parties for a bit-string index"));
        }
        let limit = 1usize << (n - 1);
        if j >= limit {
            return Err(Error::IndexOutOfRange { index: j, limit });
        }
        Ok(Self { n, j, sign })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Binary negation of `j` on `n - 1` bits.
    pub fn j_bar(&self) -> usize {
        !self.j & ((1usize << (self.n - 1)) - 1)
    }

    /// Bit `j^(k)` for Bob `k` in `1..n`.
    pub fn bit(&self, k: usize) -> usize {
        bob_bit(self.j, self.n, k)
    }

    /// Register indices of `|0⟩|j⟩` and `|1⟩|j̄⟩`.
    pub(crate) fn support(&self) -> (usize, usize) {
        ghz_support(self.n, self.j)
    }
}

#[inline]
pub(crate) fn bob_bit(j: usize, n: usize, k: usize) -> usize {
    debug_assert!((1..n).contains(&k));
    (j >> (n - 1 - k)) & 1
}

#[inline]
fn ghz_support(n: usize, j: usize) -> (usize, usize) {
    let half = 1usize << (n - 1);
    (j, half | (!j & (half - 1)))
}

/// `|ψ_j^σ⟩` as a dense state vector.
pub fn ghz_basis_vector(idx: GhzBasisIndex) -> Result<StateVector> {
    check_cap(idx.n)?;
    let (p, q) = idx.support();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << idx.n];
    amps[p] = Complex64::new(h, 0.0);
    amps[q] = Complex64::new(h * idx.sign.value(), 0.0);
    Ok(StateVector::from_raw(idx.n, amps))
}

/// The `N`-qubit GHZ state `|ψ_0^+⟩`.
pub fn ghz_state(n: usize) -> Result<StateVector> {
    ghz_basis_vector(GhzBasisIndex::new(n, 0, Sign::Plus)?)
}

/// Local operators of the extended depolarisation procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwirlOp {
    /// `X^⊗N`
    XAll,
    /// `Z_A Z_{B_k}`
    ZZ(usize),
    /// `R_k = diag(1, i)_A ⊗ diag(1, -i)_{B_k}`
    R(usize),
}

impl TwirlOp {
    /// All `2N - 1` operators in application order.
    pub fn all(n: usize) -> Vec<TwirlOp> {
        let mut ops = vec![TwirlOp::XAll];
        ops.extend((1..n).map(TwirlOp::ZZ));
        ops.extend((1..n).map(TwirlOp::R));
        ops
    }

    fn check(self, n: usize) -> Result<()> {
        match self {
            TwirlOp::XAll => Ok(()),
            TwirlOp::ZZ(k) | TwirlOp::R(k) if (1..n).contains(&k) => Ok(()),
            TwirlOp::ZZ(k) | TwirlOp::R(k) => Err(Error::IndexOutOfRange { index: k, limit: n }),
        }
    }

    /// Diagonal phase of `ZZ(k)` or `R(k)` on basis index `i`.
    fn phase(self, n: usize, i: usize) -> Complex64 {
        let a = crate::dense::qubit_bit(i, n, 0);
        match self {
            TwirlOp::XAll => unreachable!("X^⊗N is not diagonal"),
            TwirlOp::ZZ(k) => {
                let b = crate::dense::qubit_bit(i, n, k);
                if a ^ b == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
            TwirlOp::R(k) => {
                let b = crate::dense::qubit_bit(i, n, k);
                let mut ph = Complex64::new(1.0, 0.0);
                if a == 1 {
                    ph *= Complex64::new(0.0, 1.0);
                }
                if b == 1 {
                    ph *= Complex64::new(0.0, -1.0);
                }
                ph
            }
        }
    }
}

/// `ρ → U ρ U†` for one twirl operator.
pub fn apply_twirl_operator(rho: &DensityMatrix, op: TwirlOp) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    op.check(n)?;
    let mut out = rho.clone();
    apply_op_in_place(&mut out, op);
    Ok(out)
}

/// `|ψ⟩ → U|ψ⟩` for one twirl operator.
pub fn apply_twirl_operator_pure(psi: &StateVector, op: TwirlOp) -> Result<StateVector> {
    let n = psi.n_qubits();
    op.check(n)?;
    let mut out = psi.clone();
    match op {
        TwirlOp::XAll => (0..n).for_each(|q| out.apply_pauli(q, Pauli::X)),
        _ => out.apply_diagonal(|i| op.phase(n, i)),
    }
    Ok(out)
}

fn apply_op_in_place(rho: &mut DensityMatrix, op: TwirlOp) {
    let n = rho.n_qubits();
    match op {
        TwirlOp::XAll => {
            let all = (1usize << n) - 1;
            rho.apply_permutation(|i| i ^ all);
        }
        _ => rho.apply_diagonal(|i| op.phase(n, i)),
    }
}

/// Applies every operator of the twirl with probability 1/2, as the exact
/// sequential average `ρ → (ρ + UρU†)/2`.
pub fn twirl(rho: &DensityMatrix) -> DensityMatrix {
    let mut out = rho.clone();
    for op in TwirlOp::all(rho.n_qubits()) {
        let mut rotated = out.clone();
        apply_op_in_place(&mut rotated, op);
        out.mix(0.5, &rotated);
    }
    out
}

/// A state diagonal in the GHZ basis.
///
/// `lambda_plus[j]` and `lambda_minus[j]` are the weights of `|ψ_j^+⟩` and
/// `|ψ_j^-⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GhzDiagonalRepr", into = "GhzDiagonalRepr")]
pub struct GhzDiagonalState {
    n: usize,
    lambda_plus: Vec<f64>,
    lambda_minus: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GhzDiagonalRepr {
    n: usize,
    lambda_plus: Vec<f64>,
    lambda_minus: Vec<f64>,
}

impl TryFrom<GhzDiagonalRepr> for GhzDiagonalState {
    type Error = Error;

    fn try_from(r: GhzDiagonalRepr) -> Result<Self> {
        GhzDiagonalState::new(r.n, r.lambda_plus, r.lambda_minus)
    }
}

impl From<GhzDiagonalState> for GhzDiagonalRepr {
    fn from(s: GhzDiagonalState) -> Self {
        GhzDiagonalRepr {
            n: s.n,
            lambda_plus: s.lambda_plus,
            lambda_minus: s.lambda_minus,
        }
    }
}

impl GhzDiagonalState {
    pub fn new(n: usize, lambda_plus: Vec<f64>, lambda_minus: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", n, "at least two parties are required"));
        }
        if n > 40 {
            return Err(Error::param("n", n, "coefficient storage of 2^(n-1) entries is too large"));
        }
        let len = 1usize << (n - 1);
        if lambda_plus.len() != len || lambda_minus.len() != len {
            return Err(Error::NonPhysicalState(format!(
                "expected {len} coefficients per sign, got {} and {}",
                lambda_plus.len(),
                lambda_minus.len()
            )));
        }
        if let Some(bad) = lambda_plus
            .iter()
            .chain(&lambda_minus)
            .find(|&&l| l.is_nan() || l < -STATE_TOL)
        {
            return Err(Error::NonPhysicalState(format!("negative coefficient {bad}")));
        }
        let total: f64 = lambda_plus.iter().chain(&lambda_minus).sum();
        // rounding of the sum itself grows with the number of terms
        let tol = STATE_TOL + (2 * len) as f64 * f64::EPSILON;
        if (total - 1.0).abs() > tol {
            return Err(Error::NonPhysicalState(format!("coefficients sum to {total}")));
        }
        Ok(Self {
            n,
            lambda_plus,
            lambda_minus,
        })
    }

    pub fn pure_ghz(n: usize) -> Result<Self> {
        let len = 1usize << (n.max(2) - 1);
        let mut plus = vec![0.0; len];
        plus[0] = 1.0;
        Self::new(n, plus, vec![0.0; len])
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let len = 1usize << (n.max(2) - 1);
        let w = 1.0 / (2 * len) as f64;
        Self::new(n, vec![w; len], vec![w; len])
    }

    pub fn n_parties(&self) -> usize {
        self.n
    }

    pub fn lambda_plus(&self) -> &[f64] {
        &self.lambda_plus
    }

    pub fn lambda_minus(&self) -> &[f64] {
        &self.lambda_minus
    }

    pub fn lambda(&self, j: usize, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.lambda_plus[j],
            Sign::Minus => self.lambda_minus[j],
        }
    }

    /// Largest `|λ_j^+ - λ_j^-|` over `j > 0`, with its index.
    pub fn symmetry_defect(&self) -> (usize, f64) {
        self.lambda_plus
            .iter()
            .zip(&self.lambda_minus)
            .enumerate()
            .skip(1)
            .map(|(j, (p, m))| (j, (p - m).abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    pub fn is_depolarised(&self) -> bool {
        self.symmetry_defect().1 <= SYMMETRY_TOL
    }

    /// Coefficient-level effect of the `R_k` twirls: averages `λ_j^±` for every
    /// `j > 0`.
    pub fn depolarised(&self) -> Self {
        let mut out = self.clone();
        for j in 1..out.lambda_plus.len() {
            let avg = 0.5 * (out.lambda_plus[j] + out.lambda_minus[j]);
            out.lambda_plus[j] = avg;
            out.lambda_minus[j] = avg;
        }
        out
    }

    /// `⟨X^⊗N⟩ = Σ_j (λ_j^+ - λ_j^-)`.
    pub fn x_expectation(&self) -> f64 {
        self.lambda_plus
            .iter()
            .zip(&self.lambda_minus)
            .map(|(p, m)| p - m)
            .sum()
    }

    /// Probability that at least one Bob's Z outcome differs from Alice's.
    pub fn qber_z(&self) -> f64 {
        (1.0 - self.lambda_plus[0] - self.lambda_minus[0]).clamp(0.0, 1.0)
    }

    /// Probability of an `X^⊗N` outcome incompatible with the noiseless state.
    pub fn qber_x(&self) -> f64 {
        ((1.0 - self.x_expectation()) / 2.0).clamp(0.0, 1.0)
    }

    /// Bipartite error rate `Q_{AB_i}` for Bob `i` in `1..N`. Requires the
    /// depolarised symmetry `λ_j^+ = λ_j^-` for `j > 0`.
    pub fn qber_pairwise(&self, bob: usize) -> Result<f64> {
        if !(1..self.n).contains(&bob) {
            return Err(Error::IndexOutOfRange {
                index: bob,
                limit: self.n,
            });
        }
        let (j, diff) = self.symmetry_defect();
        if diff > SYMMETRY_TOL {
            return Err(Error::NotDepolarised { j, diff });
        }
        let sum: f64 = (0..self.lambda_plus.len())
            .filter(|&j| bob_bit(j, self.n, bob) == 1)
            .map(|j| 0.5 * (self.lambda_plus[j] + self.lambda_minus[j]))
            .sum();
        Ok((2.0 * sum).clamp(0.0, 1.0))
    }

    /// `Q_{AB_i}` for every Bob, in order.
    pub fn qber_pairwise_all(&self) -> Result<Vec<f64>> {
        (1..self.n).map(|i| self.qber_pairwise(i)).collect()
    }

    /// Dense embedding `Σ λ_j^σ |ψ_j^σ⟩⟨ψ_j^σ|`.
    pub fn to_dense(&self) -> Result<DensityMatrix> {
        check_cap(self.n)?;
        let dim = 1usize << self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..self.lambda_plus.len() {
            let (p, q) = ghz_support(self.n, j);
            let sum = 0.5 * (self.lambda_plus[j] + self.lambda_minus[j]);
            let diff = 0.5 * (self.lambda_plus[j] - self.lambda_minus[j]);
            data[p * dim + p] += sum;
            data[q * dim + q] += sum;
            data[p * dim + q] += diff;
            data[q * dim + p] += diff;
        }
        Ok(DensityMatrix::from_raw(self.n, data))
    }

    pub fn max_abs_diff(&self, other: &GhzDiagonalState) -> f64 {
        self.lambda_plus
            .iter()
            .zip(&other.lambda_plus)
            .chain(self.lambda_minus.iter().zip(&other.lambda_minus))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// GHZ-basis weight `⟨ψ_j^σ|ρ|ψ_j^σ⟩`.
pub fn ghz_overlap(rho: &DensityMatrix, idx: GhzBasisIndex) -> f64 {
    let (p, q) = idx.support();
    let s = idx.sign.value();
    0.5 * (rho.get(p, p) + rho.get(q, q) + (rho.get(p, q) + rho.get(q, p)) * s).re
}

/// Depolarises a dense state with the full twirl and reads off its GHZ
/// coefficients.
pub fn ghz_diagonal_from_dense(state: &DenseState) -> Result<GhzDiagonalState> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    check_cap(n)?;
    state.validate()?;
    let twirled = twirl(&state.to_density());
    let len = 1usize << (n - 1);
    let read = |sign| -> Vec<f64> {
        (0..len)
            .map(|j| ghz_overlap(&twirled, GhzBasisIndex { n, j, sign }).max(0.0))
            .collect()
    };
    let (plus, minus) = (read(Sign::Plus), read(Sign::Minus));
    GhzDiagonalState::new(n, plus, minus)
}

/// Pauli axis for correlator queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

/// Two-party correlator `⟨σ_i^α ⊗ σ_j^β⟩` on a pure state.
pub fn pairwise_correlator(
    psi: &StateVector,
    alpha: Axis,
    beta: Axis,
    i: usize,
    j: usize,
) -> Result<f64> {
    let n = psi.n_qubits();
    for q in [i, j] {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, limit: n });
        }
    }
    if i == j {
        return Err(Error::param("j", j, "the two parties must differ"));
    }
    Ok(psi.expectation(&[(i, alpha.pauli()), (j, beta.pauli())]))
}

/// `a|0...0⟩ + b|1...1⟩`, normalised.
pub fn correlated_state(n: usize, a: Complex64, b: Complex64) -> Result<StateVector> {
    check_cap(n)?;
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::param("a, b", "0", "both amplitudes vanish"));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = a / norm;
    amps[(1 << n) - 1] = b / norm;
    StateVector::from_amplitudes(n, amps)
}
