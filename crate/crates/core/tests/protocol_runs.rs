use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nqkd::keyrate::{rate_depolarized, PartyCount};
use nqkd::noise::{channel_qber, gate_noise_state, GateNoise, Topology};
use nqkd::protocol::{
    run_protocol, BasisRule, ProtocolConfig, QxTally, RoundSampler, RoundType, StateSource,
};

fn qx_tally(source: &StateSource, n: usize, rule: BasisRule, rounds: usize, seed: u64) -> QxTally {
    let mut sampler = RoundSampler::from_source(n, source).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = QxTally::default();
    for _ in 0..rounds {
        t.add(&sampler.sample_round(RoundType::Xy, rule, &mut rng));
    }
    t
}

#[test]
fn basis_rules_estimate_the_same_qx() {
    let n = 4;
    let st = gate_noise_state(&GateNoise::new(0.08, Topology::Star).unwrap(), n).unwrap();
    let source = StateSource::GhzDiagonal {
        lambda_plus: st.lambda_plus().to_vec(),
        lambda_minus: st.lambda_minus().to_vec(),
    };
    let a = qx_tally(&source, n, BasisRule::Independent, 200_000, 1);
    let b = qx_tally(&source, n, BasisRule::AliceRule, 200_000, 2);
    assert_eq!(b.discarded, 0);
    assert!(a.discarded > 90_000 && a.discarded < 110_000);

    let (qa, qb) = (a.qber_x().unwrap(), b.qber_x().unwrap());
    let var = |q: f64, k: u64| q * (1.0 - q) / k as f64;
    let sd = (var(qa, a.kept()) + var(qb, b.kept())).sqrt();
    assert!((qa - qb).abs() < 4.0 * sd, "{qa} vs {qb}");
    let exact = st.qber_x();
    assert!((qb - exact).abs() < 4.0 * var(exact, b.kept()).sqrt());
}

#[test]
fn gate_source_estimates_converge() {
    let n = 5;
    let noise = GateNoise::new(0.04, Topology::Router).unwrap();
    let st = gate_noise_state(&noise, n).unwrap();
    let mut cfg = ProtocolConfig::new(
        n,
        400_000,
        StateSource::Gate {
            f_g: 0.04,
            topology: Topology::Router,
        },
        11,
    );
    cfg.p_p = 0.2;
    let s = run_protocol(&cfg, |_| {}).unwrap();
    let e = &s.estimation;
    let band = |p: f64, k: u64| 4.0 * (p * (1.0 - p) / k as f64).sqrt();
    assert!((e.q_z_hat - st.qber_z()).abs() < band(st.qber_z(), e.z_samples));
    assert!((e.q_x_hat - st.qber_x()).abs() < band(st.qber_x(), e.n_plus + e.n_minus));
    for (got, want) in e.q_ab_hat.iter().zip(st.qber_pairwise_all().unwrap()) {
        assert!((got - want).abs() < band(want, e.z_samples));
    }
}

#[test]
fn channel_source_uses_the_white_noise_qber() {
    let (n, f) = (3, 0.03);
    let q = channel_qber(n, f).unwrap();
    let cfg = ProtocolConfig::new(n, 300_000, StateSource::Channel { f_c: f }, 5);
    let s = run_protocol(&cfg, |_| {}).unwrap();
    let k = s.estimation.z_samples as f64;
    assert!((s.estimation.q_z_hat - q).abs() < 4.0 * (q * (1.0 - q) / k).sqrt());
}

#[test]
fn key_length_tracks_the_asymptotic_rate() {
    let q = 0.08;
    let cfg = ProtocolConfig::new(3, 500_000, StateSource::Depolarized { qber: q }, 3);
    let s = run_protocol(&cfg, |_| {}).unwrap();
    let analytic = rate_depolarized(q, PartyCount::Finite(3)).unwrap();
    let per_round = s.key_length_estimate / s.ledger.key_rounds as f64;
    assert!((per_round - analytic).abs() < 0.03, "{per_round} vs {analytic}");
}

#[test]
fn transcript_matches_the_ledger() {
    let mut cfg = ProtocolConfig::new(3, 20_000, StateSource::Depolarized { qber: 0.05 }, 8);
    cfg.announced_z = Some(700);
    let mut rounds = Vec::new();
    let s = run_protocol(&cfg, |r| rounds.push(r.clone())).unwrap();
    assert_eq!(rounds.len(), 20_000);
    assert!(rounds.iter().enumerate().all(|(i, r)| r.index == i as u64));
    let announced = rounds.iter().filter(|r| r.announced).count() as u64;
    assert_eq!(announced, 700);
    let tests = rounds.iter().filter(|r| r.round_type == RoundType::Xy).count() as u64;
    assert_eq!(tests, s.ledger.test_rounds);
    let discarded = rounds.iter().filter(|r| !r.kept).count() as u64;
    assert_eq!(discarded, s.ledger.test_rounds_discarded);
    // flips hit key rounds only, about half of them
    assert!(rounds.iter().all(|r| !r.flipped || r.round_type == RoundType::Z));
    let flipped = rounds.iter().filter(|r| r.flipped).count() as f64;
    let z = s.ledger.z_rounds as f64;
    assert!((flipped / z - 0.5).abs() < 4.0 * (0.25 / z).sqrt());
}

#[test]
fn privacy_amplification_is_seeded() {
    let mut cfg = ProtocolConfig::new(3, 30_000, StateSource::Depolarized { qber: 0.02 }, 21);
    cfg.privacy_amplification = true;
    let a = run_protocol(&cfg, |_| {}).unwrap();
    let b = run_protocol(&cfg, |_| {}).unwrap();
    assert_eq!(a.final_key_hex, b.final_key_hex);
    let hex = a.final_key_hex.clone().unwrap();
    assert_eq!(hex.len() as u64, a.key_bits.div_ceil(8) * 2);
    cfg.seed = 22;
    assert_ne!(run_protocol(&cfg, |_| {}).unwrap().final_key_hex, a.final_key_hex);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ledger_invariants(
        n in 2usize..6,
        rounds in 2_000u64..6_000,
        p_p in 0.05f64..0.5,
        q in 0.0f64..0.2,
        seed in any::<u64>(),
        alice_rule in any::<bool>(),
    ) {
        let mut cfg = ProtocolConfig::new(n, rounds, StateSource::Depolarized { qber: q }, seed);
        cfg.p_p = p_p;
        if alice_rule {
            cfg.basis_rule = BasisRule::AliceRule;
        }
        let s = run_protocol(&cfg, |_| {}).unwrap();
        let l = &s.ledger;
        prop_assert_eq!(l.test_rounds + l.z_rounds, rounds);
        prop_assert_eq!(l.test_rounds_kept + l.test_rounds_discarded, l.test_rounds);
        prop_assert_eq!(l.announced_rounds + l.key_rounds, l.z_rounds);
        prop_assert_eq!(s.estimation.z_samples, l.announced_rounds);
        prop_assert!(s.key_bits <= l.key_rounds);
        prop_assert!(s.q_x_used >= s.estimation.q_z_hat / 2.0 - 1e-15);
        if alice_rule {
            prop_assert_eq!(l.test_rounds_discarded, 0);
        }
        prop_assert_eq!(s.estimation.q_ab_hat.len(), n - 1);
    }
}
