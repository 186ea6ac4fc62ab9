#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(graph) = fuselage::model::decode(data) {
        let bytes = fuselage::model::encode(&graph).expect("decoded graphs are valid");
        assert_eq!(fuselage::model::decode(&bytes).unwrap(), graph);
    }
});
