use std::collections::BTreeSet;
use std::sync::Arc;

use fuselage::analysis::{
    biolink_feasible, biolink_shortest, dead_nodes, ending_coverage, exact_reachable, overapprox_reachable, replay,
    trace_to, Feasibility,
};
use fuselage::assets::MASK_STORY;
use fuselage::dsl::{check, parse};
use fuselage::model::{self, EndingKind, MiniGame, NodeBody, StoryGraph};
use fuselage::runtime::{EngineNote, Event, MiniAction, Outcome, Payload, Session};

fn graph() -> Arc<StoryGraph> {
    Arc::new(fuselage::compile(MASK_STORY).unwrap().graph)
}

fn at(g: &Arc<StoryGraph>, node: &str) -> Session {
    let trace = trace_to(g, node).unwrap();
    let s = replay(g.clone(), &trace).unwrap();
    assert_eq!(s.current(), node);
    s
}

#[test]
fn asset_is_diagnostic_clean() {
    let ast = parse(MASK_STORY).unwrap();
    assert_eq!(ast.nodes.len(), 15);
    assert!(check(&ast).is_empty());
    let c = fuselage::compile(MASK_STORY).unwrap();
    assert!(c.warnings.is_empty());
    assert!(model::validate(&c.graph).is_empty());
    assert_eq!(c.graph.nodes.len(), 15);
    assert_eq!(c.graph.start, "A-1");
    let endings: Vec<(&str, EndingKind)> = c.graph.endings().into_iter().collect();
    assert_eq!(
        endings,
        vec![("END-MAIN", EndingKind::Main), ("END-SUB-LEAVE", EndingKind::Sub), ("END-SUB-STOP", EndingKind::Sub)]
    );
}

#[test]
fn canonical_bytes_decode_to_start_a1() {
    let g = graph();
    let bytes = model::encode(&g).unwrap();
    let back = model::decode(&bytes).unwrap();
    assert_eq!(back.start, "A-1");
    assert_eq!(back, *g);
}

#[test]
fn new_session_starts_full() {
    let s = Session::new(graph(), 0);
    assert_eq!(s.current(), "A-1");
    assert_eq!(s.meter("freewill"), Some(100));
    assert_eq!(Session::new(graph(), 0), s);
}

#[test]
fn the_first_branch() {
    let g = graph();
    let a2 = at(&g, "A-2");
    let v = a2.view();
    assert_eq!(v.prompt.as_deref(), Some("The mask is down there. What do you do?"));
    let labels: Vec<&str> = v.options.iter().map(|o| o.label.as_str()).collect();
    assert_eq!(labels, ["leave the mask", "recover the mask"]);

    let (leave, _) = a2.apply_event(&Event::touch(Payload::Choose(0))).unwrap();
    assert_eq!(leave.current(), "END-SUB-LEAVE");
    let (recover, _) = a2.apply_event(&Event::touch(Payload::Choose(1))).unwrap();
    assert_eq!(recover.current(), "B-1");
    assert!(recover.flags().contains("recover"));

    let (same, notes) = a2.apply_event(&Event::handset(Payload::Choose(1))).unwrap();
    assert_eq!(notes, vec![EngineNote::WrongChannel]);
    assert_eq!(same, a2);
}

#[test]
fn stopping_at_c11() {
    let g = graph();
    let s = at(&g, "C-1-1");
    let (s, _) = s.apply_event(&Event::touch(Payload::Choose(0))).unwrap();
    assert_eq!(s.current(), "END-SUB-STOP");
    let (s, _) = s.apply_event(&Event::touch(Payload::Ack)).unwrap();
    assert_eq!(s.finished(), Some("END-SUB-STOP"));
}

#[test]
fn seat_table_and_override_sequences() {
    let g = graph();
    let mut s = at(&g, "B-2");
    for step in ["open-table", "take-usb", "insert-usb", "run-driver"] {
        s.apply(&Event::touch(Payload::Mini(MiniAction::Do(step.into())))).unwrap();
    }
    assert_eq!(s.current(), "B-3");
    assert_eq!(s.inventory().keys().map(String::as_str).collect::<Vec<_>>(), ["notebook", "usb"]);

    let mut s = at(&g, "C-4");
    let before = s.clone();
    assert_eq!(s.apply(&Event::touch(Payload::Mini(MiniAction::Do("stabilize".into())))).unwrap(), vec![EngineNote::NotYet]);
    assert_eq!(s, before);
    s.apply(&Event::handset(Payload::Mini(MiniAction::Do("stabilize".into())))).unwrap();
    let notes = s.apply(&Event::touch(Payload::Mini(MiniAction::Do("override".into())))).unwrap();
    assert_eq!(notes, vec![EngineNote::MiniSuccess]);
    assert_eq!(s.current(), "END-MAIN");
}

#[test]
fn analyses_agree_on_the_asset() {
    let g = graph();
    let all: BTreeSet<String> = g.nodes.keys().cloned().collect();
    assert_eq!(overapprox_reachable(&g), all);
    assert_eq!(exact_reachable(&g).unwrap(), all);
    assert!(dead_nodes(&g).unwrap().is_empty());
    assert!(ending_coverage(&g).unwrap().values().all(|r| *r));
}

#[test]
fn leave_trace_is_three_events() {
    let g = graph();
    let t = trace_to(&g, "END-SUB-LEAVE").unwrap();
    let events: Vec<&Payload> = t.iter().map(|s| &s.event.payload).collect();
    assert_eq!(events, [&Payload::Advance, &Payload::Advance, &Payload::Choose(0)]);
    assert_eq!(t[2].node, "A-2");
}

#[test]
fn main_trace_finishes_the_story() {
    let g = graph();
    let t = trace_to(&g, "END-MAIN").unwrap();
    let mut s = replay(g.clone(), &t).unwrap();
    s.apply(&Event::touch(Payload::Ack)).unwrap();
    assert_eq!(s.finished(), Some("END-MAIN"));
    let devices: BTreeSet<_> = t.iter().map(|s| s.event.channel).collect();
    assert_eq!(devices.len(), 2, "the main path needs both devices");
}

#[test]
fn shipped_bioboards_are_winnable_and_lossable() {
    let g = graph();
    let mut boards = 0;
    for node in g.nodes.values() {
        if let NodeBody::MiniGame { game: MiniGame::Biolink(p), .. } = &node.body {
            let def = g.meter(&p.meter).unwrap();
            assert!(matches!(biolink_feasible(p, def), Feasibility::Winnable(_)), "{}", node.id);
            assert!(biolink_shortest(p, def, def.init, Outcome::Failure).is_some(), "{}", node.id);
            boards += 1;
        }
    }
    assert_eq!(boards, 2);
}
