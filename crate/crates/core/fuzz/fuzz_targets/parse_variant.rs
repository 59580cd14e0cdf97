#![no_main]

use libfuzzer_sys::fuzz_target;
use polycensus::text::{parse_split, parse_variant};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(split) = parse_split(s) {
        assert!(split.outer >= 2 && split.inner >= 2);
    }
    if let Ok(v) = parse_variant(s) {
        assert_eq!(parse_variant(&v.to_string()).unwrap(), v);
    }
});
