#![no_main]

use libfuzzer_sys::fuzz_target;
use nosub::instances::InstanceMetadata;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(meta) = InstanceMetadata::from_json(text) {
        InstanceMetadata::from_json(&meta.to_json()).expect("metadata round-trips");
    }
});
