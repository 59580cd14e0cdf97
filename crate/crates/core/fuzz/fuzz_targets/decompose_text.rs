#![no_main]

use libfuzzer_sys::fuzz_target;
use polycensus::decompose::full_decomposition;
use polycensus::poly::compose;
use polycensus::text::parse_poly;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(f) = parse_poly(s) else { return };
    if f.is_zero() || f.degree().unwrap_or(0) > 16 {
        return;
    }
    if let Ok(chain) = full_decomposition(&f) {
        let mut back = chain[0].clone();
        for p in &chain[1..] {
            // intermediate Horner values may leave i128 even when f fits
            let Ok(next) = compose(&back, p) else { return };
            back = next;
        }
        assert_eq!(back, f);
    }
});
