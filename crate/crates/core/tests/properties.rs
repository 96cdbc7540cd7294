use proptest::prelude::*;
use sdof::binning::{
    build_codebook, exact_equivocation, subset_secrecy_check, verify_bound_chain, CodebookSpec, DiscreteChannel,
    MessageJoint,
};
use sdof::mi::{gaussian_mi, EffectiveChannelSet, MessageId, MessageSet, MiQuery};
use sdof::netmodel::{allocate_power, compute_dimensions, draw_extended_channel, NetworkConfig, DEFAULT_MAGNITUDE_RANGE};
use sdof::rates::{closed_form_dof, finite_m_dof, rate_split, SecrecyScenario, Theorem};
use sdof::{build_precoders, Rational};

proptest! {
    #[test]
    fn dimension_identity(m_tx in 2usize..6, n_rx in 2usize..6, m in 1u32..4) {
        let d = compute_dimensions(m_tx, n_rx, m).unwrap();
        let gamma = ((n_rx - 1) * (m_tx - 1)) as u32;
        prop_assert_eq!(d.gamma, gamma);
        let f = n_rx as u128 * (m as u128 + 1).pow(gamma) + (m_tx as u128 - 1) * (m as u128).pow(gamma);
        prop_assert_eq!(d.extension as u128, f);
        prop_assert_eq!(d.desired_dim() + d.interference_dim(), d.extension);
    }

    #[test]
    fn per_transmitter_power_budget(m_tx in 2usize..5, n_rx in 2usize..5, m in 1u32..3, p in 1e-3f64..1e9) {
        let d = compute_dimensions(m_tx, n_rx, m).unwrap();
        let alloc = allocate_power(p, &d).unwrap();
        for tx in 0..m_tx {
            prop_assert!((alloc.transmit_power(tx, &d) - p).abs() <= 1e-12 * p);
        }
    }

    #[test]
    fn rate_split_identities(
        penalties in prop::collection::vec(0.0f64..200.0, 2..5),
        extra in 0.0f64..100.0,
        m_tx in 2usize..4,
        eps in 0.0f64..1e-3,
    ) {
        let n = penalties.len();
        let d = compute_dimensions(m_tx, n, 1).unwrap();
        let f = d.extension as f64;
        let max = penalties.iter().copied().fold(0.0, f64::max);
        let desired = max + extra;
        let split = rate_split(&penalties, desired, &d, eps).unwrap();
        prop_assert!((split.total() - (desired / f - eps)).abs() < 1e-9);
        prop_assert!(split.layer_rates.iter().all(|r| *r >= 0.0));
        let msgs = (m_tx * (n - 1)) as f64;
        for rank in 1..=n {
            let pen = penalties[split.ordering[rank - 1]];
            // the same split applies to every one of the M(N-1) messages
            let lhs = msgs * split.secured_sum(rank);
            let rhs = msgs * split.rate + pen / f - msgs * eps;
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
        let zero = rate_split(&penalties, desired, &d, 0.0).unwrap();
        prop_assert!(zero.r_dagger >= 0.0);
    }

    #[test]
    fn subset_lemma_on_independent_joints(
        alphabets in prop::collection::vec(2usize..4, 1..4),
        obs in 2usize..4,
        weights in prop::collection::vec(0.05f64..1.0, 64),
        eps in 0.0f64..0.5,
    ) {
        let joint = random_product_joint(&alphabets, obs, &weights);
        let out = subset_secrecy_check(&joint, eps).unwrap();
        prop_assert!(out.lemma_holds);
        if out.premise_holds {
            prop_assert!(out.worst_slack >= -1e-12);
        }
    }

    #[test]
    fn finite_m_sequence_decreases_for_primary_transmitter(m_tx in 2usize..4, n_rx in 2usize..4) {
        let sc = SecrecyScenario::all_unintended();
        let limit = closed_form_dof(Theorem::XAllUnintended, m_tx, n_rx, 0, 0).unwrap().per_message;
        let mut prev: Option<Rational> = None;
        for m in 1..=4 {
            let q = finite_m_dof(&sc, m_tx, n_rx, m, 0).unwrap();
            prop_assert!(q > limit);
            if let Some(p) = prev {
                prop_assert!(q < p);
            }
            prev = Some(q);
        }
    }

    #[test]
    fn closed_form_consistency(m_tx in 2usize..6, n_rx in 2usize..6) {
        let t1 = closed_form_dof(Theorem::XAllUnintended, m_tx, n_rx, 0, 0).unwrap();
        let t2 = closed_form_dof(Theorem::XAllButOne, m_tx, n_rx, 0, 0).unwrap();
        prop_assert_eq!(closed_form_dof(Theorem::XCompromised, m_tx, n_rx, 0, 0).unwrap(), t1);
        prop_assert_eq!(closed_form_dof(Theorem::XCompromisedAllButOne, m_tx, n_rx, 0, 0).unwrap(), t2);
        let (m, n) = (m_tx as i128, n_rx as i128);
        prop_assert_eq!(t2.total, Rational::new(m * n, m + n - 1));
        prop_assert_eq!(t1.total, t1.per_message * Rational::from(m * n));
    }
}

fn random_product_joint(alphabets: &[usize], obs: usize, weights: &[f64]) -> MessageJoint {
    let mut w = weights.iter().cycle();
    let marginals: Vec<Vec<f64>> = alphabets
        .iter()
        .map(|&a| {
            let raw: Vec<f64> = (0..a).map(|_| *w.next().unwrap()).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let size: usize = alphabets.iter().product();
    // observation channel from the full message tuple
    let channel: Vec<Vec<f64>> = (0..size)
        .map(|_| {
            let raw: Vec<f64> = (0..obs).map(|_| *w.next().unwrap()).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let mut probs = Vec::with_capacity(size * obs);
    for flat in 0..size {
        let mut rest = flat;
        let mut p = 1.0;
        for (a, marg) in alphabets.iter().zip(&marginals).rev() {
            p *= marg[rest % a];
            rest /= a;
        }
        for y in 0..obs {
            probs.push(p * channel[flat][y]);
        }
    }
    MessageJoint::new(alphabets.to_vec(), obs, probs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mi_chain_rule_and_monotonicity(seed in 0u64..1000, split in 0usize..4, power_db in 20.0f64..60.0) {
        let cfg = NetworkConfig::from_db(2, 2, 1, seed, &[power_db], DEFAULT_MAGNITUDE_RANGE).unwrap();
        let d = cfg.dimensions();
        let h = draw_extended_channel(&cfg);
        let v = build_precoders(&h, &d).unwrap();
        let eff = EffectiveChannelSet::new(&h, &v, &d).unwrap();
        let all: Vec<MessageId> = eff.all_messages().into_iter().collect();
        let a: MessageSet = all[..split].iter().copied().collect();
        let b: MessageSet = all[split..].iter().copied().collect();
        let p = allocate_power(cfg.snr_list()[0], &d).unwrap();
        let mi = |t: &MessageSet, c: &MessageSet, power| {
            gaussian_mi(&MiQuery { receiver: 0, target: t.clone(), conditioned: c.clone(), power }, &eff)
                .unwrap()
                .value_bits
        };
        let none = MessageSet::new();
        let ab: MessageSet = a.union(&b).copied().collect();
        let whole = mi(&ab, &none, p.clone());
        let parts = mi(&a, &none, p.clone()) + mi(&b, &a, p.clone());
        prop_assert!((whole - parts).abs() < 1e-6 * whole.max(1.0));
        prop_assert!(whole + 1e-9 >= mi(&b, &none, p.clone()));
        let louder = allocate_power(cfg.snr_list()[0] * 10.0, &d).unwrap();
        prop_assert!(mi(&ab, &none, louder) + 1e-9 >= whole);
    }

    #[test]
    fn bound_chain_on_random_codebooks(
        seed in 0u64..10_000,
        bins in 1usize..4,
        layer in 1usize..3,
        leaves in 1usize..3,
        n in 1usize..3,
        own in 1usize..3,
        crossover in 0.0f64..0.5,
    ) {
        let spec = CodebookSpec {
            bins,
            layers: vec![layer, 2],
            leaves,
            n,
            input_alphabet: 2,
            output_alphabet: 2,
            own_codewords: own,
            own_alphabet: 2,
            input_distribution: None,
            distinct: false,
            seed,
        };
        let cb = build_codebook(&spec).unwrap();
        let rows = (0..4)
            .map(|i| {
                let flip = if i % 2 == 0 { crossover } else { 1.0 - crossover };
                let q = if i >= 2 { 0.5 * (1.0 - flip) + 0.25 } else { flip };
                vec![1.0 - q, q]
            })
            .collect();
        let ch = DiscreteChannel::new(rows).unwrap();
        let rep = exact_equivocation(&cb, &ch).unwrap();
        let verdict = verify_bound_chain(&rep);
        prop_assert!(verdict.passed, "{:?}", verdict.failures().collect::<Vec<_>>());
    }
}
