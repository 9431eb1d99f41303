#![no_main]

use libfuzzer_sys::fuzz_target;
use nosub::harness::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_json_str(text) {
        let echo = cfg.to_json_value().to_string();
        assert_eq!(ExperimentConfig::from_json_str(&echo).expect("echo reparses"), cfg);
    }
});
