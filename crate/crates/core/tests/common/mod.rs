//! Random valid graphs and event streams shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fuselage::model::{
    BiolinkParams, Cell, Channel, ChoiceOption, Cmp, CoordParams, Device, Effect, EndingKind, Guard, ItemDef,
    MeterDef, MiniGame, Node, NodeBody, ScanParams, SequenceParams, SequenceStep, StoryGraph, KEYPAD_SUBMIT,
};
use fuselage::runtime::{Direction, Event, MiniAction, Payload, Session};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy)]
pub struct Shape {
    pub max_nodes: usize,
    pub max_flags: usize,
    pub max_items: usize,
    pub max_meters: usize,
}

pub const SMALL: Shape = Shape { max_nodes: 12, max_flags: 4, max_items: 3, max_meters: 2 };

fn pick<'a, T>(rng: &mut StdRng, v: &'a [T]) -> &'a T {
    v.choose(rng).expect("nonempty")
}

fn guard(rng: &mut StdRng, flags: &[String], items: &[String], meters: &[MeterDef]) -> Option<Guard> {
    match rng.gen_range(0..4) {
        0 if !flags.is_empty() => Some(Guard::FlagSet { flag: pick(rng, flags).clone() }),
        1 if !flags.is_empty() => Some(Guard::FlagClear { flag: pick(rng, flags).clone() }),
        2 if !items.is_empty() => Some(Guard::ItemHeld { item: pick(rng, items).clone() }),
        3 if !meters.is_empty() => {
            let m = pick(rng, meters);
            let cmp = *pick(rng, &[Cmp::Lt, Cmp::Le, Cmp::Eq, Cmp::Ge, Cmp::Gt]);
            Some(Guard::Meter { meter: m.name.clone(), cmp, value: rng.gen_range(m.min..=m.max) })
        }
        _ => None,
    }
}

fn effect(rng: &mut StdRng, flags: &[String], items: &[String], meters: &[MeterDef]) -> Option<Effect> {
    match rng.gen_range(0..5) {
        0 if !flags.is_empty() => Some(Effect::SetFlag { flag: pick(rng, flags).clone() }),
        1 if !flags.is_empty() => Some(Effect::ClearFlag { flag: pick(rng, flags).clone() }),
        2 if !items.is_empty() => Some(Effect::GiveItem { item: pick(rng, items).clone() }),
        3 if !items.is_empty() => Some(Effect::TakeItem { item: pick(rng, items).clone() }),
        4 if !meters.is_empty() => Some(Effect::MeterDelta { meter: pick(rng, meters).name.clone(), delta: rng.gen_range(-15..=15) }),
        _ => None,
    }
}

/// A random rectangular grid with exactly one start and at least `trash`
/// trash cells.
pub fn grid(rng: &mut StdRng, w: usize, h: usize, trash: usize) -> Vec<String> {
    let mut cells: Vec<char> = (0..w * h).map(|_| *pick(rng, &['.', '.', '.', '#', 'T'])).collect();
    let mut idx: Vec<usize> = (0..w * h).collect();
    idx.shuffle(rng);
    cells[idx[0]] = 'S';
    for &i in idx.iter().skip(1).take(trash) {
        cells[i] = 'T';
    }
    cells.chunks(w).map(|r| r.iter().collect()).collect()
}

fn minigame(rng: &mut StdRng, meters: &[MeterDef]) -> MiniGame {
    match rng.gen_range(0..4) {
        0 if !meters.is_empty() => {
            let (w, h) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let required = rng.gen_range(0..=(w * h - 1).min(2));
            MiniGame::Biolink(BiolinkParams {
                creature: "newt".into(),
                grid: grid(rng, w, h, required),
                command_cost: rng.gen_range(0..=6),
                idle_regen: rng.gen_range(0..=4),
                loss_threshold: rng.gen_range(-2..=3),
                meter: pick(rng, meters).name.clone(),
                required_trash: required as u32,
                visibility: rng.gen_range(1..=2),
            })
        }
        1 => {
            let (w, h) = (rng.gen_range(1..=3u32), rng.gen_range(1..=3u32));
            let target = Cell::new(rng.gen_range(0..w), rng.gen_range(0..h));
            let decoys = (0..rng.gen_range(0..3))
                .map(|_| Cell::new(rng.gen_range(0..w), rng.gen_range(0..h)))
                .filter(|c| *c != target)
                .collect();
            let budget = rng.gen_bool(0.6).then(|| rng.gen_range(1..=3));
            MiniGame::Scan(ScanParams { width: w, height: h, target, decoys, budget })
        }
        2 => MiniGame::Coord(CoordParams {
            expected: pick(rng, &["12", "N1 E2", "-3.5", "s 9"]).to_string(),
            max_attempts: rng.gen_bool(0.7).then(|| rng.gen_range(1..=3)),
        }),
        _ => MiniGame::Sequence(SequenceParams {
            steps: (0..rng.gen_range(1..=3))
                .map(|i| SequenceStep { id: format!("s{i}"), channel: *pick(rng, &[Device::Touch, Device::Handset]) })
                .collect(),
        }),
    }
}

fn candidate(rng: &mut StdRng, shape: Shape) -> StoryGraph {
    let n = rng.gen_range(1..=shape.max_nodes);
    let ids: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
    let flags: Vec<String> = (0..rng.gen_range(0..=shape.max_flags)).map(|i| format!("f{i}")).collect();
    let items: Vec<String> = (0..rng.gen_range(0..=shape.max_items)).map(|i| format!("i{i}")).collect();
    let meters: Vec<MeterDef> = (0..rng.gen_range(0..=shape.max_meters))
        .map(|i| {
            let min = rng.gen_range(-5..=0);
            let max = min + rng.gen_range(1..=30);
            MeterDef { name: format!("m{i}"), min, max, init: rng.gen_range(min..=max) }
        })
        .collect();
    let mut nodes = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let target = |rng: &mut StdRng| pick(rng, &ids).clone();
        let effects = |rng: &mut StdRng| (0..rng.gen_range(0..=2)).filter_map(|_| effect(rng, &flags, &items, &meters)).collect();
        let kind = if i == n - 1 { 3 } else { rng.gen_range(0..4) };
        let body = match kind {
            0 => NodeBody::Narration {
                pages: (0..rng.gen_range(1..=3)).map(|p| format!("page {p}")).collect(),
                next: target(rng),
                effects: effects(rng),
            },
            1 => NodeBody::Choice {
                prompt: "?".into(),
                options: (0..rng.gen_range(2..=3))
                    .map(|k| ChoiceOption {
                        label: format!("o{k}"),
                        guards: (0..rng.gen_range(0..=2)).filter_map(|_| guard(rng, &flags, &items, &meters)).collect(),
                        target: target(rng),
                        effects: effects(rng),
                    })
                    .collect(),
            },
            2 => NodeBody::MiniGame { prompt: None, game: minigame(rng, &meters), success: target(rng), failure: target(rng) },
            _ => NodeBody::Ending {
                ending: if rng.gen_bool(0.5) { EndingKind::Main } else { EndingKind::Sub },
                text: "end".into(),
            },
        };
        let default = match &body {
            NodeBody::MiniGame { game, .. } => game.kind().default_channel(),
            _ => Channel::Touch,
        };
        let channel = if rng.gen_bool(0.8) { default } else { *pick(rng, &[Channel::Touch, Channel::Handset, Channel::Any]) };
        nodes.insert(id.clone(), Node { id: id.clone(), channel, body });
    }
    StoryGraph {
        version: 1,
        title: "random".into(),
        start: pick(rng, &ids).clone(),
        meters,
        items: items.iter().map(|i| ItemDef { name: i.clone(), label: None }).collect(),
        flags,
        nodes,
    }
}

/// A random graph that passes validation.
pub fn random_graph(rng: &mut StdRng, shape: Shape) -> StoryGraph {
    loop {
        let g = candidate(rng, shape);
        if fuselage::model::validate(&g).is_empty() {
            return g;
        }
    }
}

/// A random event, biased towards ones the current node can take.
pub fn random_event(rng: &mut StdRng, s: &Session) -> Event {
    let node = s.node();
    let devices = node.channel.devices();
    let dev = if rng.gen_bool(0.85) { *pick(rng, &devices) } else { *pick(rng, &[Device::Touch, Device::Handset]) };
    let dir = *pick(rng, &Direction::ALL);
    let payload = if rng.gen_bool(0.15) {
        match rng.gen_range(0..5) {
            0 => Payload::Advance,
            1 => Payload::Ack,
            2 => Payload::Choose(rng.gen_range(0..4)),
            3 => Payload::Key(*pick(rng, &['1', 'N', ' ', KEYPAD_SUBMIT])),
            _ => Payload::Mini(MiniAction::Move(dir)),
        }
    } else {
        match &node.body {
            NodeBody::Narration { .. } => Payload::Advance,
            NodeBody::Choice { .. } => Payload::Choose(rng.gen_range(0..3)),
            NodeBody::Ending { .. } => Payload::Ack,
            NodeBody::MiniGame { game, .. } => match game {
                MiniGame::Biolink(_) => Payload::Mini(match rng.gen_range(0..6) {
                    0..=3 => MiniAction::Move(dir),
                    4 => MiniAction::Grab,
                    _ => MiniAction::Wait,
                }),
                MiniGame::Scan(p) => Payload::Mini(MiniAction::Scan {
                    x: rng.gen_range(-1..=i64::from(p.width)),
                    y: rng.gen_range(-1..=i64::from(p.height)),
                }),
                MiniGame::Coord(p) => {
                    let mut symbols: Vec<char> = p.expected.chars().collect();
                    symbols.extend([KEYPAD_SUBMIT, KEYPAD_SUBMIT, '7']);
                    if rng.gen_bool(0.1) {
                        Payload::Mini(MiniAction::Backspace)
                    } else {
                        Payload::Key(*pick(rng, &symbols))
                    }
                }
                MiniGame::Sequence(p) => {
                    let step = pick(rng, &p.steps);
                    let id = if rng.gen_bool(0.1) { "nope".to_string() } else { step.id.clone() };
                    return Event::new(if rng.gen_bool(0.8) { step.channel } else { dev }, Payload::Mini(MiniAction::Do(id)));
                }
            },
        }
    };
    Event::new(dev, payload)
}

/// Up to `len` random events, stopping once the session finishes.
pub fn random_run(rng: &mut StdRng, start: &Session, len: usize) -> Vec<Event> {
    let mut s = start.clone();
    let mut events = Vec::new();
    for _ in 0..len {
        if s.is_finished() {
            break;
        }
        let e = random_event(rng, &s);
        s.apply(&e).expect("random events are well-formed");
        events.push(e);
    }
    events
}
