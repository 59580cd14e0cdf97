#![no_main]

use libfuzzer_sys::fuzz_target;
use polycensus::text::parse_poly;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_poly(s) {
        // printing and re-parsing is the identity
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }
});
