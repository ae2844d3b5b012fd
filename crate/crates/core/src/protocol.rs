//! Monte Carlo simulation of the GHZ conference key protocol.
//!
//! Each round is either a key round (everyone measures Z) or, with
//! probability `p_p`, a test round in which every party measures X or Y.
//! Test rounds with an odd number of Y measurements are discarded; the rest
//! estimate `⟨X^⊗N⟩` of the depolarised state. Key rounds get a common random
//! flip, a random subset of them is announced to estimate `Q_Z` and `Q_AB_i`,
//! and the key length follows from the asymptotic secret fraction.
//!
//! Outcomes of GHZ-diagonal states are sampled exactly without a dense
//! embedding. Given a basis state `|ψ_j^σ⟩` and an X/Y product basis with
//! `κ̃` Y's, every proper subset of outcomes is uniform and the product of all
//! outcomes has mean `σ f(κ̃) (-1)^{κ₁}`, where `κ₁` counts Y-measuring Bobs
//! whose bit of `j` is 1 (the all-flip operator maps `|1 j̄⟩` to `|0 j⟩` with
//! phase `i^{κ̃} (-1)^{κ̃ - κ₁}`). Dense sources use the Born rule directly.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{check_cap, qubit_bit, to_z_basis, DenseState, DensityMatrix, Pauli};
use crate::error::{Error, Result};
use crate::ghz::{bob_bit, GhzDiagonalState};
use crate::keyrate::{h, secret_fraction, RateInput, RateReport};
use crate::noise::{channel_white_noise_state, depolarized_state, gate_noise_state, GateNoise, Topology};
use crate::toeplitz::{BitVec, ToeplitzHash};

pub const DEFAULT_P_P: f64 = 0.05;

/// Largest party count for the white-noise sampler (indices fit in `u64`).
pub const MAX_ANALYTIC_PARTIES: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundType {
    Z,
    Xy,
}

/// How test-round bases are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisRule {
    /// Everyone picks X or Y at random; odd-`κ̃` rounds are discarded.
    #[default]
    Independent,
    /// Bobs pick at random; Alice measures X for an even number of Y-Bobs and
    /// Y otherwise, so no round is discarded. The sign of her basis
    /// (X, -Y, -X, Y for `κ mod 4 = 0..3`) is applied by [`f_sign`].
    AliceRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub index: u64,
    pub round_type: RoundType,
    /// Alice first, then Bob 1..N-1.
    pub bases: Vec<Basis>,
    /// `+1` or `-1` per party.
    pub outcomes: Vec<i8>,
    /// Number of parties measuring Y.
    pub kappa_tilde: usize,
    /// False only for test rounds with odd `κ̃`.
    pub kept: bool,
    /// Key round whose outcomes were flipped by every party.
    #[serde(default)]
    pub flipped: bool,
    /// Key round disclosed for error estimation.
    #[serde(default)]
    pub announced: bool,
}

impl RoundRecord {
    fn new(round_type: RoundType, bases: Vec<Basis>, bits: &[bool]) -> Self {
        let kappa_tilde = bases.iter().filter(|&&b| b == Basis::Y).count();
        Self {
            index: 0,
            round_type,
            kept: round_type == RoundType::Z || kappa_tilde % 2 == 0,
            bases,
            outcomes: bits.iter().map(|&b| if b { -1 } else { 1 }).collect(),
            kappa_tilde,
            flipped: false,
            announced: false,
        }
    }

    /// Outcome of party `p` as a bit (`+1 ↔ 0`).
    pub fn bit(&self, p: usize) -> bool {
        self.outcomes[p] < 0
    }

    pub fn product(&self) -> i8 {
        self.outcomes.iter().product()
    }

    fn flip(&mut self) {
        for o in &mut self.outcomes {
            *o = -*o;
        }
        self.flipped = !self.flipped;
    }
}

/// `0` for odd `κ̃`, `+1` for `κ̃ ≡ 0 (mod 4)`, `-1` otherwise.
pub fn f_sign(kappa_tilde: usize) -> i8 {
    if kappa_tilde % 2 == 1 {
        0
    } else if kappa_tilde.is_multiple_of(4) {
        1
    } else {
        -1
    }
}

/// Where the per-round state comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSource {
    /// White-noise GHZ state with the given QBER.
    Depolarized { qber: f64 },
    GhzDiagonal {
        lambda_plus: Vec<f64>,
        lambda_minus: Vec<f64>,
    },
    Dense { state: DenseState },
    /// State prepared by noisy gates in a random order.
    Gate {
        #[serde(rename = "fG")]
        f_g: f64,
        #[serde(default)]
        topology: Topology,
    },
    /// White-noise state with the QBER of transmission noise of strength `fC`.
    Channel {
        #[serde(rename = "fC")]
        f_c: f64,
    },
}

fn default_p_p() -> f64 {
    DEFAULT_P_P
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n: usize,
    /// Total number of rounds `L`.
    pub rounds: u64,
    #[serde(default = "default_p_p")]
    pub p_p: f64,
    pub state: StateSource,
    /// Size of the announced key-round subset; defaults to the number of
    /// test rounds.
    #[serde(default)]
    pub announced_z: Option<u64>,
    #[serde(default)]
    pub basis_rule: BasisRule,
    /// Hash Alice's key string down to the secure length.
    #[serde(default)]
    pub privacy_amplification: bool,
    #[serde(default)]
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(n: usize, rounds: u64, state: StateSource, seed: u64) -> Self {
        Self {
            n,
            rounds,
            p_p: DEFAULT_P_P,
            state,
            announced_z: None,
            basis_rule: BasisRule::default(),
            privacy_amplification: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", self.n, "at least two parties are required"));
        }
        if self.rounds == 0 {
            return Err(Error::param("rounds", 0, "at least one round is required"));
        }
        if !(self.p_p > 0.0 && self.p_p < 1.0) {
            return Err(Error::param("p_p", self.p_p, "must lie strictly between 0 and 1"));
        }
        Ok(())
    }
}

enum Source {
    WhiteNoise {
        n: usize,
        lambda0_plus: f64,
        lambda0_minus: f64,
    },
    Diagonal {
        // index 2j for (j, +), 2j+1 for (j, -)
        dist: WeightedIndex<f64>,
    },
    Dense {
        rho: DensityMatrix,
        cache: HashMap<Option<u64>, WeightedIndex<f64>>,
    },
}

/// Draws measurement outcomes of one state preparation.
pub struct RoundSampler {
    n: usize,
    source: Source,
}

impl RoundSampler {
    pub fn from_source(n: usize, source: &StateSource) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", n, "at least two parties are required"));
        }
        match source {
            StateSource::Depolarized { qber } => {
                if n > MAX_ANALYTIC_PARTIES {
                    return Err(Error::param(
                        "n",
                        n,
                        format!("the sampler supports at most {MAX_ANALYTIC_PARTIES} parties"),
                    ));
                }
                if n <= 20 {
                    // validates the range of Q
                    depolarized_state(n, *qber)?;
                }
                let t = (-(n as f64)).exp2();
                let other = qber * t / (1.0 - 2.0 * t);
                let lambda0_plus = 1.0 - qber * (1.0 - t) / (1.0 - 2.0 * t);
                if !(0.0..=1.0).contains(qber) || lambda0_plus < -1e-12 {
                    return Err(Error::param("qber", qber, "outside the white-noise range"));
                }
                Ok(Self {
                    n,
                    source: Source::WhiteNoise {
                        n,
                        lambda0_plus: lambda0_plus.max(0.0),
                        lambda0_minus: other,
                    },
                })
            }
            StateSource::GhzDiagonal {
                lambda_plus,
                lambda_minus,
            } => {
                let st = GhzDiagonalState::new(n, lambda_plus.clone(), lambda_minus.clone())?;
                Self::from_ghz_diagonal(st)
            }
            StateSource::Dense { state } => {
                if state.n_qubits() != n {
                    return Err(Error::param(
                        "state",
                        state.n_qubits(),
                        format!("dense state has the wrong number of qubits for N = {n}"),
                    ));
                }
                Self::from_dense(state)
            }
            StateSource::Gate { f_g, topology } => {
                Self::from_ghz_diagonal(gate_noise_state(&GateNoise::new(*f_g, *topology)?, n)?)
            }
            StateSource::Channel { f_c } => {
                let st = channel_white_noise_state(n, *f_c)?;
                let qber = st.qber_z();
                Self::from_source(n, &StateSource::Depolarized { qber })
            }
        }
    }

    pub fn from_ghz_diagonal(state: GhzDiagonalState) -> Result<Self> {
        let weights: Vec<f64> = state
            .lambda_plus()
            .iter()
            .zip(state.lambda_minus())
            .flat_map(|(&p, &m)| [p.max(0.0), m.max(0.0)])
            .collect();
        let dist = WeightedIndex::new(&weights)
            .map_err(|e| Error::NonPhysicalState(format!("cannot sample coefficients: {e}")))?;
        Ok(Self {
            n: state.n_parties(),
            source: Source::Diagonal { dist },
        })
    }

    pub fn from_dense(state: &DenseState) -> Result<Self> {
        check_cap(state.n_qubits())?;
        state.validate()?;
        Ok(Self {
            n: state.n_qubits(),
            source: Source::Dense {
                rho: state.to_density(),
                cache: HashMap::new(),
            },
        })
    }

    pub fn n_parties(&self) -> usize {
        self.n
    }

    fn choose_bases<R: Rng>(&self, round_type: RoundType, rule: BasisRule, rng: &mut R) -> Vec<Basis> {
        let n = self.n;
        match round_type {
            RoundType::Z => vec![Basis::Z; n],
            RoundType::Xy => {
                let mut bases: Vec<Basis> = (0..n)
                    .map(|_| if rng.random() { Basis::Y } else { Basis::X })
                    .collect();
                if rule == BasisRule::AliceRule {
                    let kappa = bases[1..].iter().filter(|&&b| b == Basis::Y).count();
                    bases[0] = if kappa % 2 == 0 { Basis::X } else { Basis::Y };
                }
                bases
            }
        }
    }

    /// Draws `(j, σ)` with probability `λ_j^σ`; `true` means `σ = -`.
    fn draw_index<R: Rng>(&self, rng: &mut R) -> (u64, bool) {
        match &self.source {
            Source::WhiteNoise {
                n,
                lambda0_plus,
                lambda0_minus,
            } => {
                let u: f64 = rng.random();
                if u < *lambda0_plus {
                    (0, false)
                } else if u < lambda0_plus + lambda0_minus {
                    (0, true)
                } else {
                    // uniform over the 2^N - 2 remaining (j, σ)
                    let code = rng.random_range(0..(1u64 << n) - 2) + 2;
                    (code >> 1, code & 1 == 1)
                }
            }
            Source::Diagonal { dist, .. } => {
                let code = dist.sample(rng) as u64;
                (code >> 1, code & 1 == 1)
            }
            Source::Dense { .. } => unreachable!("dense sources are sampled by the Born rule"),
        }
    }

    fn sample_diagonal<R: Rng>(&self, bases: &[Basis], rng: &mut R) -> Vec<bool> {
        let n = self.n;
        let (j, minus) = self.draw_index(rng);
        let j_bit = |k: usize| bob_bit(j as usize, n, k) == 1;
        if bases[0] == Basis::Z {
            let a: bool = rng.random();
            let mut bits = Vec::with_capacity(n);
            bits.push(a);
            bits.extend((1..n).map(|k| a ^ j_bit(k)));
            return bits;
        }
        let kappa_tilde = bases.iter().filter(|&&b| b == Basis::Y).count();
        let kappa1 = (1..n).filter(|&k| bases[k] == Basis::Y && j_bit(k)).count();
        let mut mean = f64::from(f_sign(kappa_tilde));
        if minus {
            mean = -mean;
        }
        if kappa1 % 2 == 1 {
            mean = -mean;
        }
        // parity bit 1 ⇔ product of outcomes is -1
        let parity = rng.random::<f64>() < 0.5 * (1.0 - mean);
        let mut bits: Vec<bool> = (0..n - 1).map(|_| rng.random()).collect();
        let rest = bits.iter().fold(false, |acc, &b| acc ^ b);
        bits.push(parity ^ rest);
        bits
    }

    fn sample_dense<R: Rng>(&mut self, bases: &[Basis], rng: &mut R) -> Vec<bool> {
        let n = self.n;
        let Source::Dense { rho, cache } = &mut self.source else {
            unreachable!()
        };
        let key = if bases[0] == Basis::Z {
            None
        } else {
            Some(
                bases
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b == Basis::Y)
                    .fold(0u64, |acc, (q, _)| acc | (1 << q)),
            )
        };
        let dist = cache.entry(key).or_insert_with(|| {
            let mut rotated = rho.clone();
            for (q, &b) in bases.iter().enumerate() {
                if b != Basis::Z {
                    rotated.apply_1q(q, &to_z_basis(b.pauli()));
                }
            }
            let probs: Vec<f64> = rotated.diagonal().into_iter().map(|p| p.max(0.0)).collect();
            WeightedIndex::new(&probs).expect("a valid state has a normalised diagonal")
        });
        let i = dist.sample(rng);
        (0..n).map(|q| qubit_bit(i, n, q) == 1).collect()
    }

    /// Chooses bases for the round type and draws the outcomes.
    pub fn sample_round<R: Rng>(&mut self, round_type: RoundType, rule: BasisRule, rng: &mut R) -> RoundRecord {
        let bases = self.choose_bases(round_type, rule, rng);
        self.sample_with_bases(round_type, bases, rng)
    }

    /// Draws outcomes for explicit bases (all Z, or all X/Y).
    pub fn sample_with_bases<R: Rng>(&mut self, round_type: RoundType, bases: Vec<Basis>, rng: &mut R) -> RoundRecord {
        debug_assert_eq!(bases.len(), self.n);
        debug_assert!(match round_type {
            RoundType::Z => bases.iter().all(|&b| b == Basis::Z),
            RoundType::Xy => bases.iter().all(|&b| b != Basis::Z),
        });
        let bits = match self.source {
            Source::Dense { .. } => self.sample_dense(&bases, rng),
            _ => self.sample_diagonal(&bases, rng),
        };
        RoundRecord::new(round_type, bases, &bits)
    }
}

/// Running estimate of `⟨X^⊗N⟩` from kept test rounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QxTally {
    pub n_plus: u64,
    pub n_minus: u64,
    pub discarded: u64,
}

impl QxTally {
    pub fn add(&mut self, r: &RoundRecord) {
        if r.round_type != RoundType::Xy {
            return;
        }
        match f_sign(r.kappa_tilde) * r.product() {
            1 => self.n_plus += 1,
            -1 => self.n_minus += 1,
            _ => self.discarded += 1,
        }
    }

    pub fn kept(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    pub fn x_expectation(&self) -> Result<f64> {
        if self.kept() == 0 {
            return Err(Error::EmptySample("the X/Y test rounds"));
        }
        Ok((self.n_plus as f64 - self.n_minus as f64) / self.kept() as f64)
    }

    pub fn qber_x(&self) -> Result<f64> {
        Ok(0.5 * (1.0 - self.x_expectation()?))
    }
}

/// Running disagreement counts over announced key rounds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QzTally {
    pub samples: u64,
    pub any_differs: u64,
    /// Per Bob.
    pub differs: Vec<u64>,
}

impl QzTally {
    pub fn new(n: usize) -> Self {
        Self {
            samples: 0,
            any_differs: 0,
            differs: vec![0; n - 1],
        }
    }

    pub fn add(&mut self, r: &RoundRecord) {
        if r.round_type != RoundType::Z {
            return;
        }
        let alice = r.outcomes[0];
        if self.differs.len() + 1 != r.outcomes.len() {
            self.differs = vec![0; r.outcomes.len() - 1];
        }
        let mut any = false;
        for (k, &o) in r.outcomes[1..].iter().enumerate() {
            if o != alice {
                self.differs[k] += 1;
                any = true;
            }
        }
        self.any_differs += u64::from(any);
        self.samples += 1;
    }

    pub fn estimates(&self) -> Result<(f64, Vec<f64>)> {
        if self.samples == 0 {
            return Err(Error::EmptySample("the announced key rounds"));
        }
        let s = self.samples as f64;
        Ok((
            self.any_differs as f64 / s,
            self.differs.iter().map(|&d| d as f64 / s).collect(),
        ))
    }
}

/// `(Q_X estimate, n_+, n_-)` from the kept test rounds in `records`; other
/// rounds are ignored.
pub fn estimate_qx(records: &[RoundRecord]) -> Result<(f64, u64, u64)> {
    let mut t = QxTally::default();
    records.iter().for_each(|r| t.add(r));
    Ok((t.qber_x()?, t.n_plus, t.n_minus))
}

/// `(Q_Z estimate, Q_AB_i estimates)` from the key rounds in `records`.
pub fn estimate_qz(records: &[RoundRecord]) -> Result<(f64, Vec<f64>)> {
    let n = records.first().map_or(2, |r| r.outcomes.len());
    let mut t = QzTally::new(n);
    records.iter().for_each(|r| t.add(r));
    t.estimates()
}

/// Flips every party's outcome in a uniformly random subset of the key
/// rounds, which applies `X^⊗N` with probability 1/2. Returns the announced
/// flip mask (one entry per record; test rounds are never flipped).
pub fn classical_depolarize<R: Rng>(records: &mut [RoundRecord], rng: &mut R) -> Vec<bool> {
    records
        .iter_mut()
        .map(|r| {
            let flip = r.round_type == RoundType::Z && rng.random::<bool>();
            if flip {
                r.flip();
            }
            flip
        })
        .collect()
}

/// Expected resource use before running.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedAccounting {
    /// `L h(p_p)`: cost of marking the test rounds.
    pub preshared_key_bits: f64,
    pub expected_test_rounds: f64,
    pub expected_announced_rounds: f64,
    pub expected_key_rounds: f64,
}

pub fn planned_accounting(config: &ProtocolConfig) -> Result<PlannedAccounting> {
    config.validate()?;
    let l = config.rounds as f64;
    let test = l * config.p_p;
    let announced = config.announced_z.map_or(test, |a| a as f64).min(l - test);
    Ok(PlannedAccounting {
        preshared_key_bits: l * h(config.p_p),
        expected_test_rounds: test,
        expected_announced_rounds: announced,
        expected_key_rounds: l - test - announced,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub rounds: u64,
    pub preshared_key_bits: f64,
    pub test_rounds: u64,
    pub test_rounds_kept: u64,
    pub test_rounds_discarded: u64,
    pub z_rounds: u64,
    pub announced_rounds: u64,
    pub key_rounds: u64,
    /// `key_rounds · h(max_i Q_AB_i)`.
    pub error_correction_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub q_z_hat: f64,
    pub q_x_hat: f64,
    pub q_ab_hat: Vec<f64>,
    pub n_plus: u64,
    pub n_minus: u64,
    pub z_samples: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSummary {
    pub n: usize,
    pub estimation: EstimationResult,
    /// `Q_X` after clamping into `[Q_Z/2, 1 - Q_Z/2]`, where the secret
    /// fraction is defined.
    pub q_x_used: f64,
    pub rate: RateReport,
    /// `key_rounds · max(r_inf, 0)`.
    pub key_length_estimate: f64,
    pub key_bits: u64,
    pub ledger: Ledger,
    /// Alice's hashed key, when privacy amplification is enabled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_key_hex: Option<String>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs the protocol, passing every round to `on_round` after flips and
/// announcements are applied.
///
/// Privacy amplification costs `O(key_rounds · key_bits / 64)`.
pub fn run_protocol(config: &ProtocolConfig, mut on_round: impl FnMut(&RoundRecord)) -> Result<ProtocolSummary> {
    config.validate()?;
    let n = config.n;
    let mut sampler = RoundSampler::from_source(n, &config.state)?;
    let l = config.rounds;

    // which rounds are tests stands in for the pre-shared marking key
    let mut schedule_rng = stream(config.seed, 0);
    let is_test: Vec<bool> = (0..l).map(|_| schedule_rng.random_bool(config.p_p)).collect();
    let test_rounds = is_test.iter().filter(|&&t| t).count() as u64;
    let z_rounds = l - test_rounds;

    let wanted = config.announced_z.unwrap_or(test_rounds).min(z_rounds);
    let mut announce_rng = stream(config.seed, 1);
    let mut announced = vec![false; z_rounds as usize];
    for i in index::sample(&mut announce_rng, z_rounds as usize, wanted as usize).iter() {
        announced[i] = true;
    }

    let mut rng = stream(config.seed, 2);
    let mut qx = QxTally::default();
    let mut qz = QzTally::new(n);
    let mut alice_key = Vec::new();
    let mut z_seen = 0;
    for (idx, &test) in is_test.iter().enumerate() {
        let round_type = if test { RoundType::Xy } else { RoundType::Z };
        let mut rec = sampler.sample_round(round_type, config.basis_rule, &mut rng);
        rec.index = idx as u64;
        if test {
            qx.add(&rec);
        } else {
            if rng.random::<bool>() {
                rec.flip();
            }
            rec.announced = announced[z_seen];
            z_seen += 1;
            if rec.announced {
                qz.add(&rec);
            } else if config.privacy_amplification {
                alice_key.push(rec.bit(0));
            }
        }
        on_round(&rec);
    }

    let (q_z_hat, q_ab_hat) = qz.estimates()?;
    let q_x_hat = qx.qber_x()?;
    let q_x_used = q_x_hat.clamp(0.5 * q_z_hat, 1.0 - 0.5 * q_z_hat);
    let rate = secret_fraction(&RateInput::new(n, q_z_hat, q_x_used, q_ab_hat.clone(), 1.0)?)?;
    let key_rounds = z_rounds - wanted;
    let key_length_estimate = key_rounds as f64 * rate.r_inf_clamped;
    let key_bits = key_length_estimate.floor() as u64;
    let max_qab = q_ab_hat.iter().copied().fold(0.0, f64::max);

    let final_key_hex = if config.privacy_amplification {
        let hash = ToeplitzHash::new(alice_key.len(), key_bits as usize, config.seed ^ 0x5eed_7091)?;
        Some(hash.hash(&BitVec::from_bools(&alice_key))?.to_hex())
    } else {
        None
    };

    Ok(ProtocolSummary {
        n,
        estimation: EstimationResult {
            q_z_hat,
            q_x_hat,
            q_ab_hat,
            n_plus: qx.n_plus,
            n_minus: qx.n_minus,
            z_samples: qz.samples,
        },
        q_x_used,
        rate,
        key_length_estimate,
        key_bits,
        ledger: Ledger {
            rounds: l,
            preshared_key_bits: l as f64 * h(config.p_p),
            test_rounds,
            test_rounds_kept: qx.kept(),
            test_rounds_discarded: qx.discarded,
            z_rounds,
            announced_rounds: wanted,
            key_rounds,
            error_correction_bits: key_rounds as f64 * h(max_qab),
        },
        final_key_hex,
    })
}
