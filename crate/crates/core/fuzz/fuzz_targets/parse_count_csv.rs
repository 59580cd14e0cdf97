#![no_main]

use libfuzzer_sys::fuzz_target;
use polycensus::report::{parse_count_csv, rows_to_string, Format};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_count_csv(s) {
        let text = rows_to_string(&rows, Format::Csv).unwrap();
        if !rows.is_empty() {
            assert_eq!(parse_count_csv(&text).unwrap(), rows);
        }
        let _ = rows_to_string(&rows, Format::Json).unwrap();
    }
});
