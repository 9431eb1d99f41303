#![no_main]

use libfuzzer_sys::fuzz_target;
use nosub::harness::report::{parse_rows, rows_to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_rows(text) {
        let csv = rows_to_csv(&rows).expect("rows serialize");
        let again = parse_rows(&csv).expect("serialized rows reparse");
        assert_eq!(rows.len(), again.len());
    }
});
