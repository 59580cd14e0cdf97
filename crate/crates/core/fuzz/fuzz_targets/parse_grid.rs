#![no_main]

use libfuzzer_sys::fuzz_target;
use polycensus::text::parse_grid;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_grid(s) {
        if let Ok(grid) = spec.resolve(Some(1 << 20)) {
            assert!(grid.windows(2).all(|w| w[0] < w[1]));
            assert!(grid.iter().all(|&h| h >= 2));
        }
    }
});
