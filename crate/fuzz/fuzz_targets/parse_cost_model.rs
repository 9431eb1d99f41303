#![no_main]

use libfuzzer_sys::fuzz_target;
use nosub::{CostKind, CostModel};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(kind) = text.parse::<CostKind>() {
        assert_eq!(kind.to_string().parse::<CostKind>().expect("display reparses"), kind);
        let model = CostModel::new(kind).expect("parsed kinds are valid");
        assert!(model.triangle_constant() >= 1.0);
    }
});
