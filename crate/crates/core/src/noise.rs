//! Noise models: white noise on the GHZ state, imperfect two-qubit gates in
//! the preparation circuit, and per-qubit depolarising channels.
//!
//! The gate model replaces both processed qubits by the maximally mixed state
//! with probability `f_G`. Closed forms give `λ_0^±` and the averaged
//! `Q_{AB_i}`; a dense simulation of the CNOT preparation circuit, enumerating
//! every success/failure pattern, serves as the oracle for them.

use serde::{Deserialize, Serialize};

use crate::dense::{check_cap, hadamard, DenseState, DensityMatrix, StateVector};
use crate::error::{check_probability, Error, Result};
use crate::ghz::{ghz_diagonal_from_dense, GhzDiagonalState};

/// Network in which the GHZ state is prepared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Alice prepares the state herself and sends one qubit to each Bob.
    #[default]
    Star,
    /// A central router entangles the Bobs' qubits with one qubit from Alice.
    Router,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateNoise {
    pub f_g: f64,
    pub topology: Topology,
}

impl GateNoise {
    pub fn new(f_g: f64, topology: Topology) -> Result<Self> {
        check_probability("f_G", f_g)?;
        Ok(Self { f_g, topology })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelNoise {
    pub f_c: f64,
}

impl ChannelNoise {
    pub fn new(f_c: f64) -> Result<Self> {
        check_probability("f_C", f_c)?;
        Ok(Self { f_c })
    }
}

/// Noise configuration as read from JSON:
/// `{"model": "gate", "fG": 0.05, "topology": "router"}` or
/// `{"model": "channel", "fC": 0.02}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum NoiseConfig {
    Gate {
        #[serde(rename = "fG")]
        f_g: f64,
        #[serde(default)]
        topology: Topology,
    },
    Channel {
        #[serde(rename = "fC")]
        f_c: f64,
        #[serde(default)]
        topology: Topology,
    },
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseConfig::Gate { f_g, .. } => check_probability("fG", f_g),
            NoiseConfig::Channel { f_c, .. } => check_probability("fC", f_c),
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            NoiseConfig::Gate { f_g, .. } => f_g,
            NoiseConfig::Channel { f_c, .. } => f_c,
        }
    }

    pub fn topology(&self) -> Topology {
        match *self {
            NoiseConfig::Gate { topology, .. } | NoiseConfig::Channel { topology, .. } => topology,
        }
    }
}

/// Largest admissible QBER of the white-noise family, `(2^N-2)/(2^N-1)`.
pub fn max_depolarized_qber(n: usize) -> f64 {
    let t = (-(n as f64)).exp2();
    (1.0 - 2.0 * t) / (1.0 - t)
}

/// GHZ state mixed with white noise, parametrised by its QBER `Q`:
/// `λ_0^+ = 1 - Q(2^N-1)/(2^N-2)` and every other coefficient `Q/(2^N-2)`.
pub fn depolarized_state(n: usize, q: f64) -> Result<GhzDiagonalState> {
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    if !(0.0..=max_depolarized_qber(n)).contains(&q) {
        return Err(Error::param(
            "Q",
            q,
            format!("must lie in [0, {}] for N = {n}", max_depolarized_qber(n)),
        ));
    }
    let d = 2f64.powi(n as i32);
    let other = q / (d - 2.0);
    let len = 1usize << (n - 1);
    let mut plus = vec![other; len];
    plus[0] = 1.0 - q * (d - 1.0) / (d - 2.0);
    GhzDiagonalState::new(n, plus, vec![other; len])
}

/// Success/failure pattern of the `N-1` preparation gates, in the order they
/// are applied; `true` means the gate worked.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GatePattern {
    bits: Vec<bool>,
}

impl GatePattern {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Pattern number `x` of `len` gates; the first gate is the most
    /// significant bit.
    pub fn from_index(x: usize, len: usize) -> Self {
        Self {
            bits: (0..len).map(|t| (x >> (len - 1 - t)) & 1 == 1).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn all_succeeded(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    /// `b(x1)`: see [`block_count`].
    pub fn block_count(&self) -> Result<usize> {
        block_count(&self.bits)
    }

    /// Prefactor `c_x` of this pattern's term in the output state:
    /// 1 when every gate worked, `2^{-b(x1)}` otherwise.
    pub fn coefficient(&self) -> Result<f64> {
        if self.all_succeeded() {
            return Ok(1.0);
        }
        Ok(2f64.powi(-(self.block_count()? as i32)))
    }

    /// Probability of this pattern when each gate fails with `f_g`.
    pub fn probability(&self, f_g: f64) -> f64 {
        let w = self.weight() as i32;
        let fails = self.bits.len() as i32 - w;
        f_g.powi(fails) * (1.0 - f_g).powi(w)
    }
}

impl std::str::FromStr for GatePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::param("pattern", s, "only 0 and 1 are allowed")),
            })
            .collect::<Result<Vec<_>>>()
            .map(GatePattern::new)
    }
}

/// Number of maximal runs of ones plus the number of zeros in the string `x`
/// with a trailing `1` appended.
pub fn block_count(x: &[bool]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::param("x", "\"\"", "the gate pattern is empty"));
    }
    let mut runs = 0;
    let mut zeros = 0;
    let mut prev = false;
    for &b in x.iter().chain(std::iter::once(&true)) {
        if b && !prev {
            runs += 1;
        }
        if !b {
            zeros += 1;
        }
        prev = b;
    }
    Ok(runs + zeros)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `c'(w) = Σ_{β=N-w}^{N} C(w, N-β) C(N-w-1, β-N+w) 2^{-β}`, the summed
/// prefactor of all failure patterns with `w` successful gates.
pub fn c_prime(n: usize, w: usize) -> f64 {
    debug_assert!(w + 1 < n + 1);
    (n - w..=n)
        .map(|beta| {
            binomial(w, n - beta) * binomial(n - w - 1, beta + w - n) * 2f64.powi(-(beta as i32))
        })
        .sum()
}

fn check_gate_args(n: usize, f_g: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    check_probability("f_G", f_g)
}

/// `λ_0^-` as an explicit sum over all `2^{N-1}` gate patterns.
pub fn lambda0_minus_pattern_sum(n: usize, f_g: f64) -> Result<f64> {
    check_gate_args(n, f_g)?;
    if n > 31 {
        return Err(Error::param("n", n, "pattern enumeration is limited to N <= 31"));
    }
    let gates = n - 1;
    let mut sum = 0.0;
    for x in 0..(1usize << gates) - 1 {
        let pattern = GatePattern::from_index(x, gates);
        sum += pattern.coefficient()? * pattern.probability(f_g);
    }
    Ok(sum)
}

/// `λ_0^-` from the compact `c'(w)` form.
pub fn lambda0_minus_binomial(n: usize, f_g: f64) -> Result<f64> {
    check_gate_args(n, f_g)?;
    Ok((0..n - 1)
        .map(|w| c_prime(n, w) * f_g.powi((n - 1 - w) as i32) * (1.0 - f_g).powi(w as i32))
        .sum())
}

/// `(λ_0^+, λ_0^-)` of the state prepared with `N-1` noisy CNOTs at Alice.
pub fn lambda0_star(n: usize, f_g: f64) -> Result<(f64, f64)> {
    let minus = lambda0_minus_binomial(n, f_g)?;
    Ok(((1.0 - f_g).powi(n as i32 - 1) + minus, minus))
}

/// `(λ_0^+, λ_0^-)` when one extra noisy gate at Alice precedes the `N-1`
/// gates at the router. Its failure only adds a phase error, so the QBER is
/// the same as in the star network.
pub fn lambda0_router(n: usize, f_g: f64) -> Result<(f64, f64)> {
    let (plus, minus) = lambda0_star(n, f_g)?;
    let mixed = 0.5 * f_g * (plus + minus);
    Ok(((1.0 - f_g) * plus + mixed, (1.0 - f_g) * minus + mixed))
}

/// `(λ_0^+, λ_0^-)` for the given topology.
pub fn lambda0(noise: &GateNoise, n: usize) -> Result<(f64, f64)> {
    match noise.topology {
        Topology::Star => lambda0_star(n, noise.f_g),
        Topology::Router => lambda0_router(n, noise.f_g),
    }
}

/// `Q_{AB_i}` averaged over a random gate order:
/// `(1/(N-1)) Σ_{k=1}^{N-1} (1 - (1-f_G)^k)/2`, which equals
/// `((1-f_G)^N + f_G N - 1) / (2 f_G (N-1))`. The sum is evaluated directly
/// since the closed form cancels catastrophically for small `f_G`; at
/// `f_G = 0` both give 0.
pub fn qab_average(n: usize, f_g: f64) -> Result<f64> {
    check_gate_args(n, f_g)?;
    if f_g == 0.0 {
        return Ok(0.0);
    }
    let ln_keep = (-f_g).ln_1p();
    let sum: f64 = (1..n)
        .map(|k| -0.5 * (k as f64 * ln_keep).exp_m1())
        .sum();
    Ok(sum / (n - 1) as f64)
}

/// QBER caused by a depolarising channel of strength `f_C` on every qubit:
/// `((2^N-2)/2^N)(1 - (1-f_C)^N)`.
pub fn channel_qber(n: usize, f_c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    check_probability("f_C", f_c)?;
    let prefactor = 1.0 - 2f64.powi(1 - n as i32);
    let hit = if f_c == 1.0 {
        1.0
    } else {
        -(n as f64 * (-f_c).ln_1p()).exp_m1()
    };
    Ok(prefactor * hit)
}

/// QBER of the GHZ state after independent depolarising channels of strength
/// `f_C` on all `N` qubits: `k ≥ 1` hits leave all outcomes equal with
/// probability `2^{-k}` (`2^{1-N}` when every qubit is hit).
///
/// Agrees with [`channel_qber`] for `N = 2` only; for larger `N` the latter
/// is the QBER of global white noise with survival probability `(1-f_C)^N`.
pub fn channel_qber_per_qubit(n: usize, f_c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    check_probability("f_C", f_c)?;
    let mut q = 0.0;
    for k in 1..=n {
        let p_k = binomial(n, k) * f_c.powi(k as i32) * (1.0 - f_c).powi((n - k) as i32);
        let differ = if k == n {
            1.0 - 2f64.powi(1 - n as i32)
        } else {
            1.0 - 2f64.powi(-(k as i32))
        };
        q += p_k * differ;
    }
    Ok(q)
}

/// GHZ state under global white noise: with probability `(1-f_C)^N` the
/// state is untouched, otherwise it is maximally mixed. Its QBER is
/// [`channel_qber`].
pub fn channel_white_noise_state(n: usize, f_c: f64) -> Result<GhzDiagonalState> {
    depolarized_state(n, channel_qber(n, f_c)?)
}

/// Applies a depolarising channel of strength `f_C` to every qubit.
pub fn apply_channel_noise(state: &DenseState, f_c: f64) -> Result<DensityMatrix> {
    check_probability("f_C", f_c)?;
    check_cap(state.n_qubits())?;
    let mut rho = state.to_density();
    for q in 0..rho.n_qubits() {
        rho.depolarizing_channel(q, f_c);
    }
    Ok(rho)
}

/// Which failure patterns the preparation-circuit oracle simulates.
#[derive(Clone, Debug, PartialEq)]
pub enum PatternChoice {
    /// Every pattern, weighted by its probability.
    Exhaustive,
    /// A single deterministic pattern; `router_gate_ok` is ignored for the
    /// star topology.
    Fixed {
        pattern: GatePattern,
        router_gate_ok: bool,
    },
}

/// Order in which Alice's CNOTs reach the Bobs.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOrder {
    /// Bob 1 first, then Bob 2, ...
    Natural,
    /// Uniform average over all `(N-1)!` orders.
    AllOrders,
    /// Uniform average over the listed orders (each a permutation of `1..N`).
    Orders(Vec<Vec<usize>>),
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

fn plus_zero_state(n: usize) -> Result<DensityMatrix> {
    let mut psi = StateVector::zero(n)?;
    psi.apply_1q(0, &hadamard());
    Ok(psi.to_density())
}

/// Output of the preparation circuit for one order and one fixed pattern.
fn run_pattern(
    n: usize,
    topology: Topology,
    order: &[usize],
    pattern: &GatePattern,
    router_gate_ok: bool,
) -> Result<DensityMatrix> {
    let mut rho = plus_zero_state(n)?;
    if topology == Topology::Router && !router_gate_ok {
        rho.depolarize_qubit(0);
    }
    for (&target, &ok) in order.iter().zip(pattern.bits()) {
        if ok {
            rho.cnot(0, target);
        } else {
            rho.depolarize_qubit(0);
            rho.depolarize_qubit(target);
        }
    }
    Ok(rho)
}

/// Dense simulation of the GHZ preparation circuit (`|+⟩|0...0⟩` followed by
/// a CNOT from Alice to every Bob) under gate noise.
pub fn simulate_prep_circuit(
    noise: &GateNoise,
    n: usize,
    patterns: &PatternChoice,
    order: &GateOrder,
) -> Result<DensityMatrix> {
    check_gate_args(n, noise.f_g)?;
    check_cap(n)?;
    let bobs: Vec<usize> = (1..n).collect();
    let orders = match order {
        GateOrder::Natural => vec![bobs.clone()],
        GateOrder::AllOrders => permutations(&bobs),
        GateOrder::Orders(list) => {
            for o in list {
                let mut sorted = o.clone();
                sorted.sort_unstable();
                if sorted != bobs {
                    return Err(Error::param("order", format!("{o:?}"), "not a permutation of the Bobs"));
                }
            }
            if list.is_empty() {
                return Err(Error::param("order", "[]", "no gate order given"));
            }
            list.clone()
        }
    };

    let gates = n - 1;
    let router_branches: &[bool] = match noise.topology {
        Topology::Star => &[true],
        Topology::Router => &[true, false],
    };
    let mut acc = DensityMatrix::zeros(n);
    let order_weight = 1.0 / orders.len() as f64;
    for o in &orders {
        match patterns {
            PatternChoice::Fixed {
                pattern,
                router_gate_ok,
            } => {
                if pattern.bits().len() != gates {
                    return Err(Error::param(
                        "pattern",
                        pattern.bits().len(),
                        format!("expected {gates} gate outcomes"),
                    ));
                }
                let rho = run_pattern(n, noise.topology, o, pattern, *router_gate_ok)?;
                acc.add_scaled(order_weight, &rho);
            }
            PatternChoice::Exhaustive => {
                for x in 0..1usize << gates {
                    let pattern = GatePattern::from_index(x, gates);
                    for &a_ok in router_branches {
                        let mut w = pattern.probability(noise.f_g) * order_weight;
                        if noise.topology == Topology::Router {
                            w *= if a_ok { 1.0 - noise.f_g } else { noise.f_g };
                        }
                        if w == 0.0 {
                            continue;
                        }
                        let rho = run_pattern(n, noise.topology, o, &pattern, a_ok)?;
                        acc.add_scaled(w, &rho);
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// Noisy preparation as a sequence of channels `(1-f) CρC + f D_{A,B}(ρ)`;
/// mathematically identical to the pattern sum for the natural order.
pub fn prep_circuit_channels(noise: &GateNoise, n: usize) -> Result<DensityMatrix> {
    check_gate_args(n, noise.f_g)?;
    let mut rho = plus_zero_state(n)?;
    let f = noise.f_g;
    if noise.topology == Topology::Router {
        rho.depolarizing_channel(0, f);
    }
    for target in 1..n {
        let mut failed = rho.clone();
        failed.depolarize_qubit(0);
        failed.depolarize_qubit(target);
        rho.cnot(0, target);
        rho.mix(1.0 - f, &failed);
    }
    Ok(rho)
}

/// GHZ-diagonal state produced under gate noise with a random gate order.
///
/// Averaging over gate orders mixes the coefficients of all `j` with equal
/// Hamming weight, so the natural-order state is twirled and then averaged
/// within each weight class instead of simulating all `(N-1)!` orders.
pub fn gate_noise_state(noise: &GateNoise, n: usize) -> Result<GhzDiagonalState> {
    let rho = prep_circuit_channels(noise, n)?;
    let st = ghz_diagonal_from_dense(&rho.into())?;
    Ok(average_weight_classes(&st))
}

fn average_weight_classes(st: &GhzDiagonalState) -> GhzDiagonalState {
    let n = st.n_parties();
    let len = 1usize << (n - 1);
    let mut sums = vec![(0.0, 0.0, 0usize); n];
    for j in 0..len {
        let w = j.count_ones() as usize;
        sums[w].0 += st.lambda_plus()[j];
        sums[w].1 += st.lambda_minus()[j];
        sums[w].2 += 1;
    }
    let plus = (0..len)
        .map(|j| {
            let s = sums[j.count_ones() as usize];
            s.0 / s.2 as f64
        })
        .collect();
    let minus = (0..len)
        .map(|j| {
            let s = sums[j.count_ones() as usize];
            s.1 / s.2 as f64
        })
        .collect();
    GhzDiagonalState::new(n, plus, minus).expect("class averages of a valid state are valid")
}
