#![no_main]

//! Arbitrary decoder settings and received samples on the (16,8,5) code.

use concat_astar::astar::{
    astar_decode, osd_decode, Constraint, DecoderConfig, StackPolicy, Stopping,
};
use concat_astar::codes::{InnerCodeKind, MembershipTest};
use concat_astar::mrip::FrameBuilder;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() < 4 + 16 {
        return;
    }
    let (head, body) = data.split_at(4);
    let r: Vec<f64> = body[..16].iter().map(|&b| (b as i8) as f64 / 32.0).collect();
    let constraint = [Constraint::None, Constraint::Pc, Constraint::PcOut][head[0] as usize % 3];
    let cfg = DecoderConfig {
        lambda: head[1] as usize % 9,
        constraint,
        stack_policy: if head[2] & 1 == 0 {
            StackPolicy::Ordered
        } else {
            StackPolicy::AppendBottom
        },
        stack_capacity: 2 + (head[3] as usize % 64),
        stopping: match head[2] >> 1 & 3 {
            0 => Stopping::None,
            1 => Stopping::CodewordThreshold { d_min: 5 },
            _ => Stopping::AlphaThreshold { alpha: 0.05 },
        },
        pruning: head[2] & 8 == 0,
        trace: true,
    };
    let g = InnerCodeKind::Block16_8.block_generator().unwrap();
    let membership = MembershipTest::new(&g);
    let frame = FrameBuilder::new(g).build(&r, &r).unwrap();
    let res = astar_decode(&frame, &cfg).unwrap();
    assert!(membership.contains(&res.codeword));
    assert_eq!(res.goal_sequence.len() as u64, res.candidates);
    if constraint == Constraint::Pc && res.nodes_dropped == 0 {
        let osd = osd_decode(&frame, cfg.lambda).unwrap();
        if cfg.stopping == Stopping::None {
            assert_eq!(res.metric, osd.metric);
        } else {
            assert!(res.metric >= osd.metric);
        }
    }
});
