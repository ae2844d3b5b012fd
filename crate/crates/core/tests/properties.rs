use proptest::prelude::*;

use nqkd::dense::DensityMatrix;
use nqkd::ghz::{ghz_diagonal_from_dense, twirl, GhzDiagonalState};
use nqkd::keyrate::{
    binary_entropy, rate_depolarized, secret_fraction, threshold_qber, PartyCount, RateInput,
};
use nqkd::network::{compare_rates, NetworkModel};
use nqkd::noise::{
    channel_qber, depolarized_state, gate_noise_state, lambda0_minus_binomial,
    lambda0_minus_pattern_sum, lambda0_router, lambda0_star, max_depolarized_qber, qab_average,
    GateNoise, Topology,
};
use nqkd::toeplitz::{BitVec, ToeplitzHash};

/// With `symmetric`, `λ_j^+ = λ_j^-` for every `j ≠ 0`, the form the twirl
/// produces.
fn diagonal_state(n: usize, symmetric: bool) -> impl Strategy<Value = GhzDiagonalState> {
    let len = 1usize << (n - 1);
    prop::collection::vec(0.0f64..1.0, 2 * len).prop_filter_map("all weights zero", move |mut w| {
        if symmetric {
            for j in 1..len {
                w[len + j] = w[j];
            }
        }
        let total: f64 = w.iter().sum();
        if total < 1e-6 {
            return None;
        }
        let plus = w[..len].iter().map(|x| x / total).collect();
        let minus = w[len..].iter().map(|x| x / total).collect();
        GhzDiagonalState::new(n, plus, minus).ok()
    })
}

fn sized_state() -> impl Strategy<Value = GhzDiagonalState> {
    (2usize..=5).prop_flat_map(|n| diagonal_state(n, false))
}

fn twirled_state() -> impl Strategy<Value = GhzDiagonalState> {
    (2usize..=5).prop_flat_map(|n| diagonal_state(n, true))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn error_rates_are_probabilities(st in sized_state()) {
        for q in [st.qber_z(), st.qber_x()] {
            prop_assert!((0.0..=1.0).contains(&q));
        }
        prop_assert!(st.qber_pairwise_all().is_err() == !st.is_depolarised());
        let twirled = st.depolarised();
        prop_assert!((twirled.qber_z() - st.qber_z()).abs() < 1e-15);
        let st = twirled;
        for q in st.qber_pairwise_all().unwrap() {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&q));
            prop_assert!(q <= st.qber_z() + 1e-12);
        }
    }

    #[test]
    fn dense_round_trip(st in twirled_state()) {
        let rho = st.to_dense().unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let back = ghz_diagonal_from_dense(&rho.clone().into()).unwrap();
        prop_assert!(back.max_abs_diff(&st) < 1e-12);
        // the twirl fixes GHZ-diagonal states
        prop_assert!(twirl(&rho).max_abs_diff(&rho) < 1e-12);
    }

    #[test]
    fn dense_z_statistics_match(st in twirled_state()) {
        let rho: DensityMatrix = st.to_dense().unwrap();
        prop_assert!((rho.prob_any_bob_differs() - st.qber_z()).abs() < 1e-12);
        for (k, q) in st.qber_pairwise_all().unwrap().into_iter().enumerate() {
            prop_assert!((rho.prob_bob_differs(k + 1) - q).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_is_symmetric(p in 0.0f64..=1.0) {
        let a = binary_entropy(p).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - binary_entropy(1.0 - p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rate_decreases_with_qber(n in 2usize..40, a in 0.0f64..0.34, b in 0.0f64..0.34) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let p = PartyCount::Finite(n);
        prop_assert!(rate_depolarized(lo, p).unwrap() >= rate_depolarized(hi, p).unwrap() - 1e-12);
        prop_assert!(rate_depolarized(lo, p).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn rate_grows_with_parties(n in 2usize..60, q in 0.0f64..0.5) {
        let small = rate_depolarized(q, PartyCount::Finite(n)).unwrap();
        let large = rate_depolarized(q, PartyCount::Finite(n + 1)).unwrap();
        prop_assert!(large >= small - 1e-12);
        prop_assert!(rate_depolarized(q, PartyCount::Infinite).unwrap() >= large - 1e-12);
    }

    #[test]
    fn general_rate_matches_closed_form(n in 2usize..12, u in 0.0f64..1.0) {
        let q = u * max_depolarized_qber(n).min(0.45);
        let input = RateInput::from_state(&depolarized_state(n, q).unwrap(), 1.0).unwrap();
        let general = secret_fraction(&input).unwrap().r_inf;
        prop_assert!((general - rate_depolarized(q, PartyCount::Finite(n)).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn worse_pairwise_error_lowers_the_rate(q in 0.0f64..0.2, extra in 0.0f64..0.2) {
        let base = RateInput::new(3, q, q / 2.0 + 0.01, vec![q / 2.0, q / 2.0], 1.0).unwrap();
        let mut worse = base.clone();
        worse.q_ab[1] = (q / 2.0 + extra).min(0.5);
        let r0 = secret_fraction(&base).unwrap().r_inf;
        let r1 = secret_fraction(&worse).unwrap().r_inf;
        prop_assert!(r1 <= r0 + 1e-12);
    }

    #[test]
    fn slower_rounds_scale_the_rate(t in 1.0f64..10.0, q in 0.0f64..0.1) {
        let a = RateInput::new(2, q, q, vec![q], 1.0).unwrap();
        let b = RateInput { t_rep: t, ..a.clone() };
        let (ra, rb) = (secret_fraction(&a).unwrap(), secret_fraction(&b).unwrap());
        prop_assert!((rb.rate * t - ra.rate).abs() < 1e-12);
    }

    #[test]
    fn gate_noise_coefficients(n in 2usize..18, f in 0.0f64..=1.0) {
        let a = lambda0_minus_pattern_sum(n, f).unwrap();
        let b = lambda0_minus_binomial(n, f).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        for (p, m) in [lambda0_star(n, f).unwrap(), lambda0_router(n, f).unwrap()] {
            prop_assert!(p >= -1e-15 && m >= -1e-15 && p + m <= 1.0 + 1e-12);
        }
        let q = qab_average(n, f).unwrap();
        prop_assert!((0.0..=0.5).contains(&q));
    }

    #[test]
    fn gate_noise_monotone(n in 2usize..10, a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(qab_average(n, lo).unwrap() <= qab_average(n, hi).unwrap() + 1e-15);
        let fid = |f| lambda0_star(n, f).unwrap().0;
        prop_assert!(fid(lo) >= fid(hi) - 1e-15);
        prop_assert!(channel_qber(n, lo).unwrap() <= channel_qber(n, hi).unwrap() + 1e-15);
    }

    #[test]
    fn gate_noise_state_is_consistent(n in 2usize..7, f in 0.0f64..0.3) {
        let st = gate_noise_state(&GateNoise::new(f, Topology::Star).unwrap(), n).unwrap();
        let (p, m) = lambda0_star(n, f).unwrap();
        prop_assert!((st.lambda_plus()[0] - p).abs() < 1e-12);
        prop_assert!((st.lambda_minus()[0] - m).abs() < 1e-12);
        prop_assert!((st.qber_z() - (1.0 - p - m)).abs() < 1e-12);
    }

    #[test]
    fn toeplitz_is_linear(
        seed in any::<u64>(),
        bits in prop::collection::vec((any::<bool>(), any::<bool>()), 1..300),
        frac in 0.0f64..=1.0,
    ) {
        let n = bits.len();
        let m = ((n as f64) * frac) as usize;
        let t = ToeplitzHash::new(n, m, seed).unwrap();
        let x: Vec<bool> = bits.iter().map(|b| b.0).collect();
        let y: Vec<bool> = bits.iter().map(|b| b.1).collect();
        let xy: Vec<bool> = bits.iter().map(|b| b.0 ^ b.1).collect();
        let hx = t.hash(&BitVec::from_bools(&x)).unwrap().to_bools();
        let hy = t.hash(&BitVec::from_bools(&y)).unwrap().to_bools();
        let hxy = t.hash(&BitVec::from_bools(&xy)).unwrap().to_bools();
        let sum: Vec<bool> = hx.iter().zip(&hy).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(hxy, sum);
    }

    #[test]
    fn router_ratio_is_n_minus_1(n in 2usize..=12) {
        let c = compare_rates(&NetworkModel::router(n).unwrap(), None).unwrap();
        prop_assert_eq!(c.ratio, Some((n - 1) as f64));
        prop_assert!(c.nqkd_schedule.respects_capacity());
        prop_assert!(c.twoqkd_schedule.respects_capacity());
        let (cut, size) = NetworkModel::router(n).unwrap().bipartite_rate().unwrap();
        prop_assert_eq!((cut, size), (1, (n - 1) as u64));
    }

    #[test]
    fn star_network_has_no_bottleneck(n in 2usize..=12) {
        let net = NetworkModel::star(n).unwrap();
        prop_assert_eq!(net.multicast_capacity().unwrap(), 1);
        let c = compare_rates(&net, None).unwrap();
        prop_assert_eq!(c.nqkd.rate, c.twoqkd.rate);
    }
}

#[test]
fn thresholds_increase_with_parties() {
    let mut last = 0.0;
    for n in 2..=17 {
        let t = threshold_qber(PartyCount::Finite(n)).unwrap();
        assert!(t > last);
        assert!(rate_depolarized(t, PartyCount::Finite(n)).unwrap().abs() < 1e-8);
        last = t;
    }
    assert!(threshold_qber(PartyCount::Infinite).unwrap() > last);
}
