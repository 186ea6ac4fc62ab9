#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(c) = fuselage::compile(src) {
        assert!(fuselage::model::validate(&c.graph).is_empty());
        let bytes = fuselage::model::encode(&c.graph).expect("compiled graphs encode");
        assert_eq!(fuselage::model::decode(&bytes).expect("round trip"), c.graph);
    }
});
