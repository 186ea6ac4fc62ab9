#![no_main]

use std::sync::{Arc, OnceLock};

use fuselage::runtime::{SaveState, Session};
use fuselage::StoryGraph;
use libfuzzer_sys::fuzz_target;

fn mask() -> Arc<StoryGraph> {
    static GRAPH: OnceLock<Arc<StoryGraph>> = OnceLock::new();
    GRAPH.get_or_init(|| Arc::new(fuselage::compile(fuselage::assets::MASK_STORY).unwrap().graph)).clone()
}

fuzz_target!(|data: &[u8]| {
    let Ok(save) = SaveState::from_json(data) else { return };
    if let Ok(session) = Session::restore(mask(), &save) {
        let _ = session.view();
        assert_eq!(Session::restore(mask(), &session.save()).unwrap(), session);
    }
});
