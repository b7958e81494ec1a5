#![no_main]

use concat_astar::codes::GeneratorMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = GeneratorMatrix::from_hex_text(text) {
        assert_eq!(g.rank(), g.k());
        let again = GeneratorMatrix::from_hex_text(&g.to_hex_text()).expect("round trip");
        assert_eq!(again, g);
    }
});
