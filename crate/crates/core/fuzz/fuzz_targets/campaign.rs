#![no_main]

use concat_astar::sim::parse_campaign;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(runs) = parse_campaign(text) {
        for run in runs {
            assert!(run.max_trials >= 1);
            run.validate().expect("parsed campaigns are valid");
        }
    }
});
