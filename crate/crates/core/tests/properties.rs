use proptest::prelude::*;

use concat_astar::astar::{
    astar_decode, correlation_discrepancy, ml_threshold_codeword, osd_decode, Constraint,
    DecoderConfig, StackPolicy, Stopping,
};
use concat_astar::bits::Bits;
use concat_astar::codes::{GeneratorMatrix, InnerCodeKind, MembershipTest, Scheme};
use concat_astar::gf::{FieldSpec, RsSpec};
use concat_astar::mrip::FrameBuilder;

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

fn block16() -> GeneratorMatrix {
    InnerCodeKind::Block16_8.block_generator().unwrap()
}

fn brute_ml(g: &GeneratorMatrix, r: &[f64]) -> f64 {
    let z: Vec<u8> = r.iter().map(|&x| (x < 0.0) as u8).collect();
    (0..1u128 << g.k())
        .map(|m| correlation_discrepancy(r, &g.encode_packed(m).to_vec(g.n()), &z).unwrap())
        .fold(f64::INFINITY, f64::min)
}

fn config_strategy() -> impl Strategy<Value = DecoderConfig> {
    (
        0usize..=8,
        prop_oneof![
            Just(Constraint::None),
            Just(Constraint::Pc),
            Just(Constraint::PcOut)
        ],
        prop_oneof![Just(StackPolicy::Ordered), Just(StackPolicy::AppendBottom)],
        prop_oneof![Just(usize::MAX), 2usize..50],
        prop_oneof![
            Just(Stopping::None),
            Just(Stopping::CodewordThreshold { d_min: 5 }),
            (0.0f64..0.2).prop_map(|alpha| Stopping::AlphaThreshold { alpha }),
        ],
        any::<bool>(),
    )
        .prop_map(
            |(lambda, constraint, stack_policy, stack_capacity, stopping, pruning)| {
                DecoderConfig {
                    lambda,
                    constraint,
                    stack_policy,
                    stack_capacity,
                    stopping,
                    pruning,
                    trace: false,
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn decoded_word_is_a_codeword_with_consistent_metric(
        r in samples(16),
        cfg in config_strategy(),
    ) {
        let g = block16();
        let frame = FrameBuilder::new(g.clone()).build(&r, &r).unwrap();
        let res = astar_decode(&frame, &cfg).unwrap();
        prop_assert!(MembershipTest::new(&g).contains(&res.codeword));
        let z: Vec<u8> = r.iter().map(|&x| (x < 0.0) as u8).collect();
        let m = correlation_discrepancy(&r, &res.codeword.to_vec(16), &z).unwrap();
        prop_assert!((m - res.metric).abs() < 1e-12);
        prop_assert!(res.edges_visited >= 8);
        prop_assert!(res.metric >= brute_ml(&g, &r) - 1e-12);
    }

    #[test]
    fn certified_results_are_ml(r in samples(16)) {
        let g = block16();
        let frame = FrameBuilder::new(g.clone()).build(&r, &r).unwrap();
        let cfg = DecoderConfig {
            lambda: 1,
            constraint: Constraint::PcOut,
            stopping: Stopping::CodewordThreshold { d_min: 5 },
            ..DecoderConfig::default()
        };
        let res = astar_decode(&frame, &cfg).unwrap();
        if res.ml_certified {
            prop_assert!((res.metric - brute_ml(&g, &r)).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_is_sufficient_for_ml(r in samples(16), m in 0u128..256) {
        let g = block16();
        let z: Vec<u8> = r.iter().map(|&x| (x < 0.0) as u8).collect();
        let c = g.encode_packed(m).to_vec(16);
        let metric = correlation_discrepancy(&r, &c, &z).unwrap();
        if metric <= ml_threshold_codeword(&r, &c, &z, 5) {
            prop_assert!((metric - brute_ml(&g, &r)).abs() < 1e-12);
        }
    }

    #[test]
    fn policies_agree_without_limits(r in samples(16), lambda in 0usize..=8) {
        let g = block16();
        let frame = FrameBuilder::new(g).build(&r, &r).unwrap();
        let run = |stack_policy| {
            astar_decode(&frame, &DecoderConfig {
                lambda,
                constraint: Constraint::Pc,
                stack_policy,
                ..DecoderConfig::default()
            })
            .unwrap()
        };
        let a = run(StackPolicy::Ordered);
        let b = run(StackPolicy::AppendBottom);
        prop_assert_eq!(a.metric, b.metric);
        prop_assert_eq!(a.metric, osd_decode(&frame, lambda).unwrap().metric);
    }

    #[test]
    fn discrepancy_is_additive(r in samples(12), c in prop::collection::vec(0u8..2, 12), j in 0usize..12) {
        let z: Vec<u8> = r.iter().map(|&x| (x < 0.0) as u8).collect();
        let mut c = c;
        c[j] = z[j];
        let base = correlation_discrepancy(&r, &c, &z).unwrap();
        c[j] ^= 1;
        let more = correlation_discrepancy(&r, &c, &z).unwrap();
        prop_assert!((more - base - r[j].abs()).abs() < 1e-12);
    }

    #[test]
    fn frame_generator_spans_the_code(rel in samples(128)) {
        let g = Scheme::ebch(22).generator().unwrap();
        let membership = MembershipTest::new(&g);
        let frame = FrameBuilder::new(g).build(&rel, &rel).unwrap();
        for i in 0..frame.k() {
            prop_assert!(membership.contains(&frame.unpermute(frame.g_sys.row(i))));
        }
    }

    #[test]
    fn hex_text_round_trips(rows in prop::collection::vec(any::<u32>(), 1..8)) {
        let rows: Vec<Bits> = rows
            .iter()
            .map(|&w| Bits::from_bits(&(0..32).map(|j| (w >> j & 1) as u8).collect::<Vec<_>>()))
            .collect();
        if let Ok(g) = GeneratorMatrix::new(32, rows) {
            let back = GeneratorMatrix::from_hex_text(&g.to_hex_text()).unwrap();
            prop_assert_eq!(back, g);
        }
    }

    #[test]
    fn rs_encoding_is_linear(
        a in prop::collection::vec(0u16..16, 9),
        b in prop::collection::vec(0u16..16, 9),
    ) {
        let rs = RsSpec::rs16_9();
        let sum: Vec<u16> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ea = rs.encode(&a).unwrap();
        let eb = rs.encode(&b).unwrap();
        let es = rs.encode(&sum).unwrap();
        for j in 0..ea.len() {
            prop_assert_eq!(es[j], ea[j] ^ eb[j]);
        }
    }

    #[test]
    fn gf_inverse(a in 1u16..128) {
        let f = FieldSpec::gf128();
        prop_assert_eq!(f.mul(a, f.inv(a).unwrap()).unwrap(), 1);
    }
}
