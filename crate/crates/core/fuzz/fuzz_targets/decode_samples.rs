#![no_main]

//! Received-vector text as accepted by `decode-one`, decoded with the
//! (16,8,5) code when long enough.

use concat_astar::astar::{astar_decode, DecoderConfig, StackPolicy};
use concat_astar::channel::parse_samples;
use concat_astar::codes::{InnerCodeKind, MembershipTest};
use concat_astar::mrip::FrameBuilder;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(samples) = parse_samples(text) else {
        return;
    };
    if samples.len() < 16 {
        return;
    }
    let r = &samples[..16];
    let g = InnerCodeKind::Block16_8.block_generator().unwrap();
    let membership = MembershipTest::new(&g);
    let frame = FrameBuilder::new(g).build(r, r).unwrap();
    for policy in [StackPolicy::Ordered, StackPolicy::AppendBottom] {
        let cfg = DecoderConfig {
            stack_policy: policy,
            ..DecoderConfig::default()
        };
        let res = astar_decode(&frame, &cfg).unwrap();
        assert!(membership.contains(&res.codeword));
        assert!(res.metric >= 0.0);
    }
});
