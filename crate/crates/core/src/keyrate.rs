//! Asymptotic secret fractions and key rates, for the GHZ-based conference
//! protocol and for the baseline built from bipartite six-state links, plus
//! the threshold solvers that compare them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::ghz::GhzDiagonalState;
use crate::noise::{
    channel_qber, channel_white_noise_state, lambda0, max_depolarized_qber, qab_average,
    GateNoise, Topology,
};

/// Slack allowed on the log arguments before estimates count as inconsistent.
pub const LOG_DOMAIN_TOL: f64 = 1e-9;

/// Binary Shannon entropy in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(h(p))
}

/// `h` without the range check; arguments are clamped into `[0, 1]`.
pub(crate) fn h(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// `x log₂ x`, continuous at 0.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Measured error rates feeding the secret fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateInput {
    pub n: usize,
    pub q_z: f64,
    pub q_x: f64,
    /// One entry per Bob.
    pub q_ab: Vec<f64>,
    /// Seconds per protocol round.
    pub t_rep: f64,
}

impl RateInput {
    pub fn new(n: usize, q_z: f64, q_x: f64, q_ab: Vec<f64>, t_rep: f64) -> Result<Self> {
        let input = Self {
            n,
            q_z,
            q_x,
            q_ab,
            t_rep,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", self.n, "at least two parties are required"));
        }
        check_probability("Q_Z", self.q_z)?;
        check_probability("Q_X", self.q_x)?;
        if self.q_ab.len() != self.n - 1 {
            return Err(Error::param(
                "Q_AB",
                format!("{} entries", self.q_ab.len()),
                format!("expected one per Bob ({})", self.n - 1),
            ));
        }
        for &q in &self.q_ab {
            check_probability("Q_AB", q)?;
        }
        if !(self.t_rep > 0.0 && self.t_rep.is_finite()) {
            return Err(Error::param("t_rep", self.t_rep, "must be positive and finite"));
        }
        Ok(())
    }

    /// Error rates of a GHZ-diagonal state with `λ_j^+ = λ_j^-` for `j ≠ 0`.
    pub fn from_state(state: &GhzDiagonalState, t_rep: f64) -> Result<Self> {
        Self::new(
            state.n_parties(),
            state.qber_z(),
            state.qber_x(),
            state.qber_pairwise_all()?,
            t_rep,
        )
    }
}

/// The four summands of the secret fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateComponents {
    /// `x log₂ x` at `x = 1 - Q_Z/2 - Q_X`.
    pub phase_plus: f64,
    /// `x log₂ x` at `x = Q_X - Q_Z/2`.
    pub phase_minus: f64,
    /// `(1 - Q_Z)(1 - log₂(1 - Q_Z))`.
    pub z_term: f64,
    /// `-h(max_i Q_AB_i)`, the error-correction cost.
    pub error_correction: f64,
}

impl RateComponents {
    pub fn sum(&self) -> f64 {
        self.phase_plus + self.phase_minus + self.z_term + self.error_correction
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Secret bits per round; may be negative.
    pub r_inf: f64,
    pub r_inf_clamped: f64,
    /// Secret bits per second, `r_inf / t_rep`.
    pub rate: f64,
    pub rate_clamped: f64,
    pub t_rep: f64,
    /// Zero-based index of the Bob (or link) that limits the rate.
    pub limiting_bob: usize,
    pub components: Option<RateComponents>,
}

impl RateReport {
    fn new(r_inf: f64, t_rep: f64, limiting_bob: usize, components: Option<RateComponents>) -> Self {
        let r_inf_clamped = r_inf.max(0.0);
        Self {
            r_inf,
            r_inf_clamped,
            rate: r_inf / t_rep,
            rate_clamped: r_inf_clamped / t_rep,
            t_rep,
            limiting_bob,
            components,
        }
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn log_argument(name: &str, x: f64) -> Result<f64> {
    if x < -LOG_DOMAIN_TOL {
        return Err(Error::LogDomain(format!("{name} = {x:e} is negative")));
    }
    Ok(x.max(0.0))
}

/// Asymptotic secret fraction of the GHZ protocol from its error rates.
/// Small negative log arguments (within [`LOG_DOMAIN_TOL`]) are clamped to 0.
pub fn secret_fraction(input: &RateInput) -> Result<RateReport> {
    input.validate()?;
    let RateInput { q_z, q_x, .. } = *input;
    let plus = log_argument("1 - Q_Z/2 - Q_X", 1.0 - q_z / 2.0 - q_x)?;
    let minus = log_argument("Q_X - Q_Z/2", q_x - q_z / 2.0)?;
    let keep = 1.0 - q_z;
    let limiting_bob = argmax(&input.q_ab);
    let components = RateComponents {
        phase_plus: xlog2x(plus),
        phase_minus: xlog2x(minus),
        z_term: keep - xlog2x(keep),
        error_correction: -h(input.q_ab[limiting_bob]),
    };
    Ok(RateReport::new(
        components.sum(),
        input.t_rep,
        limiting_bob,
        Some(components),
    ))
}

/// Number of parties, possibly the infinite-party limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartyCount {
    Finite(usize),
    Infinite,
}

impl fmt::Display for PartyCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyCount::Finite(n) => write!(f, "{n}"),
            PartyCount::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for PartyCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(PartyCount::Infinite);
        }
        let n: usize = s
            .parse()
            .map_err(|_| Error::param("N", s, "expected an integer or `inf`"))?;
        if n < 2 {
            return Err(Error::param("N", n, "at least two parties are required"));
        }
        Ok(PartyCount::Finite(n))
    }
}

impl From<usize> for PartyCount {
    fn from(n: usize) -> Self {
        PartyCount::Finite(n)
    }
}

impl Serialize for PartyCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PartyCount::Finite(n) => s.serialize_u64(*n as u64),
            PartyCount::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Secret fraction of the white-noise GHZ family as a function of its QBER.
///
/// The `2^N`-dependent coefficients are written in terms of `t = 2^{-N}` so
/// that large `N` neither overflows nor loses precision.
pub fn rate_depolarized(q: f64, parties: PartyCount) -> Result<f64> {
    match parties {
        PartyCount::Infinite => {
            check_probability("Q", q)?;
            Ok(1.0 - h(q / 2.0) - q)
        }
        PartyCount::Finite(n) => {
            if n < 2 {
                return Err(Error::param("N", n, "at least two parties are required"));
            }
            let q_max = max_depolarized_qber(n);
            if !(0.0..=q_max).contains(&q) {
                return Err(Error::param("Q", q, format!("must lie in [0, {q_max}] for N = {n}")));
            }
            let t = (-(n as f64)).exp2();
            let a = (1.0 - t) / (1.0 - 2.0 * t);
            let c = 0.5 / (1.0 - 2.0 * t);
            let log2_1p = |x: f64| x.ln_1p() / std::f64::consts::LN_2;
            let linear = -1.0 + log2_1p(-2.0 * t) - n as f64 * t / (1.0 - 2.0 * t) - a * log2_1p(-t);
            Ok(1.0 + h(q) - h(q * a) - h(q * c) + linear * q)
        }
    }
}

/// Six-state protocol secret fraction `1 - h(3Q/2) - (3/2) log₂3 · Q`.
pub fn six_state_rate(q: f64) -> Result<f64> {
    if !(0.0..=2.0 / 3.0).contains(&q) {
        return Err(Error::param("Q", q, "must lie in [0, 2/3]"));
    }
    Ok(1.0 - h(1.5 * q) - 1.5 * 3f64.log2() * q)
}

/// Bisection for a sign change of `f` on `[lo, hi]` down to width `tol`.
pub fn bisect(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64, what: &str) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoSignChange {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scans `[lo, hi]` in `steps` intervals for the first sign change of `f`,
/// then bisects inside it.
fn first_root(
    f: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    steps: usize,
    tol: f64,
    what: &str,
) -> Result<f64> {
    let width = (hi - lo) / steps as f64;
    let mut a = lo;
    let mut f_a = f(a)?;
    for i in 1..=steps {
        let b = if i == steps { hi } else { lo + width * i as f64 };
        let f_b = f(b)?;
        if f_a == 0.0 {
            return Ok(a);
        }
        if f_a.signum() != f_b.signum() {
            return bisect(&f, a, b, tol, what);
        }
        a = b;
        f_a = f_b;
    }
    Err(Error::NoSignChange {
        what: what.to_string(),
        lo,
        hi,
    })
}

/// QBER below which the white-noise GHZ state yields a positive key.
pub fn threshold_qber(parties: PartyCount) -> Result<f64> {
    if let PartyCount::Finite(n) = parties {
        if n < 2 {
            return Err(Error::param("N", n, "at least two parties are required"));
        }
    }
    bisect(
        |q| rate_depolarized(q, parties),
        1e-9,
        0.45,
        1e-9,
        &format!("the white-noise rate at N = {parties}"),
    )
}

/// Conference key from bipartite six-state links relayed by one-time pad: the
/// worst link fixes the secret fraction.
pub fn twoqkd_conference_rate(q_links: &[f64], t_rep: f64) -> Result<RateReport> {
    if q_links.is_empty() {
        return Err(Error::param("Q_links", "[]", "at least one link is required"));
    }
    if !(t_rep > 0.0 && t_rep.is_finite()) {
        return Err(Error::param("t_rep", t_rep, "must be positive and finite"));
    }
    let rates = q_links
        .iter()
        .map(|&q| six_state_rate(q))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0;
    for (i, &r) in rates.iter().enumerate() {
        if r < rates[worst] {
            worst = i;
        }
    }
    Ok(RateReport::new(rates[worst], t_rep, worst, None))
}

/// Error rates of the GHZ protocol when the state is prepared with noisy
/// gates in a random order.
pub fn nqkd_gate_input(noise: &GateNoise, n: usize, t_rep: f64) -> Result<RateInput> {
    let (plus, minus) = lambda0(noise, n)?;
    let q_z = 1.0 - plus - minus;
    let q_x = 0.5 * (1.0 - plus + minus);
    let q_ab = qab_average(n, noise.f_g)?;
    RateInput::new(n, q_z.max(0.0), q_x.clamp(0.0, 1.0), vec![q_ab; n - 1], t_rep)
}

/// Link QBERs of the six-state baseline when each Bell pair is made with one
/// noisy two-qubit gate.
pub fn twoqkd_gate_links(f_g: f64, n: usize) -> Result<Vec<f64>> {
    check_probability("f_G", f_g)?;
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    Ok(vec![f_g / 2.0; n - 1])
}

/// Error rates of the GHZ protocol under transmission noise.
pub fn nqkd_channel_input(f_c: f64, n: usize, t_rep: f64) -> Result<RateInput> {
    RateInput::from_state(&channel_white_noise_state(n, f_c)?, t_rep)
}

/// Link QBERs of the six-state baseline under the same transmission noise.
pub fn twoqkd_channel_links(f_c: f64, n: usize) -> Result<Vec<f64>> {
    Ok(vec![channel_qber(2, f_c)?; n - 1])
}

/// Gate failure probability below which the GHZ protocol on the router
/// network (one network use per round) beats the six-state baseline (`N-1`
/// uses per round).
pub fn nqkd_gate_threshold(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::param("N", n, "a rate advantage needs at least three parties"));
    }
    let diff = |f: f64| -> Result<f64> {
        let noise = GateNoise::new(f, Topology::Router)?;
        let nqkd = secret_fraction(&nqkd_gate_input(&noise, n, 1.0)?)?;
        let two = twoqkd_conference_rate(&twoqkd_gate_links(f, n)?, (n - 1) as f64)?;
        Ok(nqkd.rate - two.rate)
    };
    first_root(diff, 1e-9, 0.5, 500, 1e-7, &format!("the gate-noise rate advantage at N = {n}"))
}

/// Transmission-noise probability below which the GHZ protocol beats the
/// six-state baseline.
pub fn nqkd_channel_threshold(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::param("N", n, "a rate advantage needs at least three parties"));
    }
    let diff = |f: f64| -> Result<f64> {
        let nqkd = rate_depolarized(channel_qber(n, f)?, PartyCount::Finite(n))?;
        let two = twoqkd_conference_rate(&twoqkd_channel_links(f, n)?, (n - 1) as f64)?;
        Ok(nqkd - two.rate)
    };
    first_root(diff, 1e-9, 1.0, 1000, 1e-7, &format!("the channel-noise rate advantage at N = {n}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::depolarized_state;

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let direct = -0.11 * 0.11f64.log2() - 0.89 * 0.89f64.log2();
        assert!((binary_entropy(0.11).unwrap() - direct).abs() < 1e-15);
        assert!((binary_entropy(0.11).unwrap() - 0.499_915_958).abs() < 1e-8);
        assert!(binary_entropy(1.2).is_err());
        for p in [0.01, 0.2, 0.37] {
            assert!((h(p) - h(1.0 - p)).abs() < 1e-15);
        }
    }

    #[test]
    fn perfect_inputs_give_one() {
        let input = RateInput::new(4, 0.0, 0.0, vec![0.0; 3], 1.0).unwrap();
        let report = secret_fraction(&input).unwrap();
        assert_eq!(report.r_inf, 1.0);
        assert_eq!(report.rate, 1.0);
        let c = report.components.unwrap();
        assert_eq!((c.phase_plus, c.phase_minus, c.z_term, c.error_correction), (0.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn rate_report_fields() {
        let input = RateInput::new(3, 0.3, 0.3, vec![0.05, 0.2], 2.0).unwrap();
        let r = secret_fraction(&input).unwrap();
        assert_eq!(r.limiting_bob, 1);
        assert!(r.r_inf < 0.0);
        assert_eq!(r.r_inf_clamped, 0.0);
        assert_eq!(r.rate, r.r_inf / 2.0);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["phase_plus", "phase_minus", "z_term", "error_correction"] {
            assert!(json["components"].get(key).is_some());
        }
    }

    #[test]
    fn log_domain_handling() {
        // Q_X slightly below Q_Z/2 within tolerance is clamped
        let ok = RateInput::new(3, 0.2, 0.1 - 1e-12, vec![0.1; 2], 1.0).unwrap();
        let r = secret_fraction(&ok).unwrap();
        assert_eq!(r.components.unwrap().phase_minus, 0.0);
        let bad = RateInput::new(3, 0.2, 0.05, vec![0.1; 2], 1.0).unwrap();
        let err = secret_fraction(&bad).unwrap_err();
        assert!(err.is_numeric());
    }

    #[test]
    fn continuous_at_log_boundary() {
        let at = |qx: f64| {
            secret_fraction(&RateInput::new(3, 0.2, qx, vec![0.1; 2], 1.0).unwrap())
                .unwrap()
                .r_inf
        };
        let edge = at(0.1);
        for eps in [1e-6, 1e-9, 1e-12] {
            assert!((at(0.1 + eps) - edge).abs() < 50.0 * eps.sqrt());
        }
    }

    #[test]
    fn input_validation() {
        assert!(RateInput::new(3, 0.1, 0.1, vec![0.1], 1.0).is_err());
        assert!(RateInput::new(3, 0.1, 0.1, vec![0.1; 2], 0.0).is_err());
        assert!(RateInput::new(3, 1.1, 0.1, vec![0.1; 2], 1.0).is_err());
        assert!(RateInput::new(1, 0.1, 0.1, vec![], 1.0).is_err());
    }

    #[test]
    fn general_form_equals_closed_form() {
        for n in 2..=16 {
            let q_max = max_depolarized_qber(n).min(0.5);
            for i in 0..100 {
                let q = q_max * i as f64 / 99.0;
                let st = depolarized_state(n, q).unwrap();
                let general = secret_fraction(&RateInput::from_state(&st, 1.0).unwrap())
                    .unwrap()
                    .r_inf;
                let closed = rate_depolarized(q, PartyCount::Finite(n)).unwrap();
                assert!((general - closed).abs() <= 1e-10, "n={n} q={q}: {general} vs {closed}");
            }
        }
    }

    #[test]
    fn six_state_special_case() {
        for i in 0..=100 {
            let q = 0.6 * i as f64 / 100.0;
            let a = rate_depolarized(q, PartyCount::Finite(2)).unwrap();
            let b = six_state_rate(q).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn closed_form_range_and_limits() {
        for n in [2, 5, 30] {
            assert_eq!(rate_depolarized(0.0, PartyCount::Finite(n)).unwrap(), 1.0);
        }
        assert_eq!(rate_depolarized(0.0, PartyCount::Infinite).unwrap(), 1.0);
        assert!(rate_depolarized(0.7, PartyCount::Finite(2)).is_err());
        assert!(rate_depolarized(-0.1, PartyCount::Infinite).is_err());
        assert!(rate_depolarized(0.1, PartyCount::Finite(1)).is_err());
    }

    #[test]
    fn closed_form_increases_with_n_and_converges() {
        for i in 1..40 {
            let q = 0.01 * i as f64;
            let mut prev = rate_depolarized(q, PartyCount::Finite(2)).unwrap();
            for n in 3..=64 {
                let r = rate_depolarized(q, PartyCount::Finite(n)).unwrap();
                assert!(r >= prev - 1e-15, "q={q} n={n}");
                prev = r;
            }
            let inf = rate_depolarized(q, PartyCount::Infinite).unwrap();
            assert!((prev - inf).abs() <= 1e-6);
        }
        // far beyond f64's 2^N range
        let big = rate_depolarized(0.2, PartyCount::Finite(5000)).unwrap();
        assert!((big - rate_depolarized(0.2, PartyCount::Infinite).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn party_count_parsing() {
        assert_eq!("inf".parse::<PartyCount>().unwrap(), PartyCount::Infinite);
        assert_eq!(" 7 ".parse::<PartyCount>().unwrap(), PartyCount::Finite(7));
        assert!("1".parse::<PartyCount>().is_err());
        assert!("x".parse::<PartyCount>().is_err());
        assert_eq!(serde_json::to_string(&PartyCount::Infinite).unwrap(), "\"inf\"");
        assert_eq!(PartyCount::Finite(4).to_string(), "4");
    }

    #[test]
    fn thresholds_increase_with_n() {
        let mut prev = 0.0;
        for n in 2..=20 {
            let t = threshold_qber(PartyCount::Finite(n)).unwrap();
            assert!(t > prev);
            assert!(rate_depolarized(t, PartyCount::Finite(n)).unwrap().abs() < 1e-8);
            prev = t;
        }
        assert!(threshold_qber(PartyCount::Infinite).unwrap() > prev);
    }

    #[test]
    fn twoqkd_examples() {
        let r = twoqkd_conference_rate(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(r.rate, 1.0);
        let r = twoqkd_conference_rate(&[0.0, 0.126193], 1.0).unwrap();
        assert!(r.r_inf.abs() < 1e-5);
        assert_eq!(r.limiting_bob, 1);
        let n = 5;
        let r = twoqkd_conference_rate(&vec![0.05; n - 1], (n - 1) as f64).unwrap();
        assert!((r.rate - six_state_rate(0.05).unwrap() / 4.0).abs() < 1e-15);
        assert!(twoqkd_conference_rate(&[], 1.0).is_err());
        assert!(twoqkd_conference_rate(&[0.8], 1.0).is_err());
    }

    #[test]
    fn gate_input_matches_state_route() {
        // full twirled state from the circuit gives the same error rates as
        // the λ_0 closed forms
        use crate::noise::gate_noise_state;
        for topology in [Topology::Star, Topology::Router] {
            let noise = GateNoise::new(0.08, topology).unwrap();
            let n = 5;
            let fast = nqkd_gate_input(&noise, n, 1.0).unwrap();
            let st = gate_noise_state(&noise, n).unwrap();
            let slow = RateInput::from_state(&st, 1.0).unwrap();
            assert!((fast.q_z - slow.q_z).abs() < 1e-12);
            assert!((fast.q_x - slow.q_x).abs() < 1e-12);
            for (a, b) in fast.q_ab.iter().zip(&slow.q_ab) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gate_threshold_advantage_flips() {
        for n in [3, 6, 12] {
            let t = nqkd_gate_threshold(n).unwrap();
            assert!(t > 0.0 && t < 0.5);
        }
        assert!(nqkd_gate_threshold(2).is_err());
    }

    #[test]
    fn channel_threshold_properties() {
        let mut values = Vec::new();
        for n in 3..=10 {
            let t = nqkd_channel_threshold(n).unwrap();
            assert!(t > 0.0 && t < 1.0, "n={n}: {t}");
            values.push(t);
        }
        // ideal advantage: ratio N-1 at zero noise
        for n in 3..=10 {
            let nq = secret_fraction(&nqkd_channel_input(0.0, n, 1.0).unwrap()).unwrap();
            let two = twoqkd_conference_rate(&twoqkd_channel_links(0.0, n).unwrap(), (n - 1) as f64)
                .unwrap();
            assert!((nq.rate / two.rate - (n - 1) as f64).abs() < 1e-12);
        }
        let peak = values
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
        for w in values[peak..].windows(2) {
            assert!(w[1] < w[0]);
        }
    }
}
