#![no_main]

use fuselage::runtime::Event;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(value) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    if let Ok(event) = Event::from_json(&value) {
        assert_eq!(Event::from_json(&event.to_json()).unwrap(), event);
    }
});
