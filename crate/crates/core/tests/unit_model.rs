use fuselage::model::*;

#[test]
fn identifiers_admit_figure_labels() {
    for id in ["A-2", "C-1-1", "C-3-1", "C-4", "END-SUB-LEAVE", "B"] {
        assert!(is_identifier(id), "{id}");
    }
    for id in ["", "1A", "-A", "A_1", "A 1", "Å"] {
        assert!(!is_identifier(id), "{id}");
    }
}

#[test]
fn channel_defaults_by_kind() {
    assert_eq!(NodeKind::Narration.default_channel(), Channel::Touch);
    assert_eq!(NodeKind::Choice.default_channel(), Channel::Touch);
    assert_eq!(NodeKind::Ending(EndingKind::Sub).default_channel(), Channel::Touch);
    assert_eq!(NodeKind::MiniGame(MiniGameKind::Biolink).default_channel(), Channel::Handset);
    assert_eq!(NodeKind::MiniGame(MiniGameKind::Scan).default_channel(), Channel::Handset);
    assert_eq!(NodeKind::MiniGame(MiniGameKind::Coord).default_channel(), Channel::Any);
    assert_eq!(NodeKind::MiniGame(MiniGameKind::Sequence).default_channel(), Channel::Any);
}

#[test]
fn coord_normalization() {
    assert_eq!(normalize_coord("  n37.2   e126.9 "), "N37.2 E126.9");
    assert_eq!(normalize_coord(""), "");
}

#[test]
fn chebyshev_distance() {
    assert_eq!(Cell::new(0, 0).chebyshev(Cell::new(2, 1)), 2);
    assert_eq!(Cell::new(3, 3).chebyshev(Cell::new(3, 3)), 0);
}
