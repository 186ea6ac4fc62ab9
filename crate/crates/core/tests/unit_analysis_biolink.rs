use fuselage::analysis::*;
use fuselage::model::{BiolinkParams, MeterDef};
use fuselage::runtime::minigame::{BiolinkAction, Outcome};

fn params(rows: &[&str], required: u32, c: u32, r: u32) -> BiolinkParams {
    BiolinkParams {
        creature: "toad".into(),
        grid: rows.iter().map(|s| s.to_string()).collect(),
        command_cost: c,
        idle_regen: r,
        loss_threshold: 0,
        meter: "fw".into(),
        required_trash: required,
        visibility: 2,
    }
}

fn meter(init: i64) -> MeterDef {
    MeterDef { name: "fw".into(), min: 0, max: 100, init }
}

#[test]
fn three_by_three_needs_five_actions() {
    let p = params(&["S.T", "###", "..."], 1, 5, 2);
    let Feasibility::Winnable(w) = biolink_feasible(&p, &meter(12)) else { panic!() };
    assert_eq!(w.len(), 5);
    assert_eq!(w.iter().filter(|a| **a == BiolinkAction::Wait).count(), 2);
    assert_eq!(w.last(), Some(&BiolinkAction::Grab));
}

#[test]
fn zero_required_is_trivially_winnable() {
    let p = params(&["S.T"], 0, 5, 2);
    assert_eq!(biolink_feasible(&p, &meter(12)), Feasibility::Winnable(vec![]));
}

#[test]
fn no_regen_and_no_slack_is_unwinnable() {
    let p = params(&["S.T"], 1, 5, 0);
    assert_eq!(biolink_feasible(&p, &meter(5)), Feasibility::Unwinnable);
}

#[test]
fn lossy_only_when_nothing_can_stall() {
    // Waiting loops forever unless it, too, drops below the threshold.
    let p = params(&["S#T"], 1, 5, 1);
    let m = MeterDef { name: "fw".into(), min: 0, max: 10, init: 5 };
    assert_eq!(biolink_feasible(&p, &m), Feasibility::Unwinnable);
    let mut p = params(&["S.T"], 1, 5, 1);
    p.loss_threshold = 10;
    assert_eq!(biolink_feasible(&p, &m), Feasibility::LossyOnly);
}

#[test]
fn failure_witness() {
    let p = params(&["S.T"], 1, 5, 2);
    let w = biolink_shortest(&p, &meter(10), 10, Outcome::Failure).unwrap();
    assert_eq!(w.len(), 2);
    assert!(w.iter().all(|a| matches!(a, BiolinkAction::Move(_) | BiolinkAction::Grab)));
}
