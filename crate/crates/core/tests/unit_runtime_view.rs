use std::sync::Arc;

use fuselage::model::Cell;
use fuselage::runtime::*;

#[test]
fn biolink_view_respects_visibility() {
    let src = r#"story "t" start B
meter fw min 0 max 100 init 100
node B minigame biolink { params { creature "toad" row "S......" row "......." row "......T" meter fw required-trash 1 visibility 2 } success -> E failure -> E }
node E ending main { text "e" }"#;
    let g = Arc::new(fuselage::compile(src).unwrap().graph);
    let mut s = Session::new(g, 0);
    s.apply(&Event::handset(Payload::Mini(MiniAction::Move(fuselage::runtime::Direction::East)))).unwrap();
    let v = s.view();
    let Some(MiniView::Biolink { cells, position, .. }) = v.mini else { panic!() };
    assert_eq!(position, Cell::new(1, 0));
    assert_eq!(cells.len(), 4 * 3);
    assert!(cells.iter().all(|c| Cell::new(c.x, c.y).chebyshev(position) <= 2));
    assert_eq!(v.meters["fw"].value, 95);
}

#[test]
fn options_keep_original_indices() {
    let src = r#"story "t" start A
flag f
node A choice { prompt "?" option "hidden" if flag f -> E option "x" -> E option "y" -> E }
node E ending main { text "e" }"#;
    let s = Session::new(Arc::new(fuselage::compile(src).unwrap().graph), 0);
    let v = s.view();
    let pairs: Vec<(usize, usize)> = v.options.iter().map(|o| (o.index, o.original_index)).collect();
    assert_eq!(pairs, vec![(0, 1), (1, 2)]);
}
