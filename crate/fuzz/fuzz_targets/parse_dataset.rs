#![no_main]

use libfuzzer_sys::fuzz_target;
use nosub::Dataset;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ds) = Dataset::parse(text) {
        // accepted input must round-trip exactly
        let again = Dataset::parse(&ds.to_text()).expect("serialized dataset reparses");
        assert_eq!(ds, again);
    }
});
