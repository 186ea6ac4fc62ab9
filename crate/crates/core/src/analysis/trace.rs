use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use super::biolink::biolink_shortest;
use super::AnalysisError;
use crate::model::{Channel, Device, MiniGame, Node, NodeBody, StoryGraph, KEYPAD_SUBMIT};
use crate::runtime::{BiolinkAction, Event, MiniAction, Outcome, Payload, Session};

/// One trace entry: the node the event is sent at, and the event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub node: String,
    pub event: Event,
}

impl Serialize for TraceStep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            node: &'a str,
            event: Value,
        }
        Wire { node: &self.node, event: self.event.to_json() }.serialize(s)
    }
}

pub type Trace = Vec<TraceStep>;

/// Device used for a node's non-step input.
fn device_for(node: &Node) -> Device {
    match node.channel {
        Channel::Touch => Device::Touch,
        Channel::Handset => Device::Handset,
        Channel::Any if matches!(node.body, NodeBody::MiniGame { .. }) => Device::Handset,
        Channel::Any => Device::Touch,
    }
}

/// Concrete input that ends the mini-game at the session's current node
/// with `goal`, computed from the live session (the bio-link meter carries
/// over from earlier play).
fn mini_witness(session: &Session, game: &MiniGame, goal: Outcome) -> Option<Vec<Event>> {
    let node = session.node();
    let dev = device_for(node);
    let ev = |p: Payload| Event::new(dev, p);
    match game {
        MiniGame::Biolink(p) => {
            let def = session.graph().meter(&p.meter)?;
            let actions = biolink_shortest(p, def, session.meter(&p.meter)?, goal)?;
            Some(
                actions
                    .into_iter()
                    .map(|a| {
                        ev(Payload::Mini(match a {
                            BiolinkAction::Move(d) => MiniAction::Move(d),
                            BiolinkAction::Grab => MiniAction::Grab,
                            BiolinkAction::Wait => MiniAction::Wait,
                        }))
                    })
                    .collect(),
            )
        }
        MiniGame::Scan(p) => match goal {
            Outcome::Success => Some(vec![ev(Payload::Mini(MiniAction::Scan { x: p.target.x.into(), y: p.target.y.into() }))]),
            _ => {
                let need = p.budget? as usize + 1;
                let cells: Vec<Event> = (0..p.height)
                    .flat_map(|y| (0..p.width).map(move |x| (x, y)))
                    .filter(|&(x, y)| (x, y) != (p.target.x, p.target.y))
                    .take(need)
                    .map(|(x, y)| ev(Payload::Mini(MiniAction::Scan { x: x.into(), y: y.into() })))
                    .collect();
                (cells.len() == need).then_some(cells)
            }
        },
        MiniGame::Coord(p) => match goal {
            Outcome::Success => {
                let mut keys: Vec<Event> = p.expected.chars().map(|c| ev(Payload::Key(c))).collect();
                keys.push(ev(Payload::Key(KEYPAD_SUBMIT)));
                Some(keys)
            }
            _ => Some(vec![ev(Payload::Key(KEYPAD_SUBMIT)); p.max_attempts? as usize]),
        },
        MiniGame::Sequence(p) => match goal {
            Outcome::Success if p.steps.iter().all(|s| node.channel.accepts(s.channel)) => Some(
                p.steps.iter().map(|s| Event::new(s.channel, Payload::Mini(MiniAction::Do(s.id.clone())))).collect(),
            ),
            _ => None,
        },
    }
}

/// Successors of a session that has just entered its node: every way of
/// leaving the node, as the events that do it.
fn macro_steps(session: &Session) -> Vec<Vec<Event>> {
    let node = session.node();
    let dev = device_for(node);
    match &node.body {
        NodeBody::Narration { pages, .. } => vec![vec![Event::new(dev, Payload::Advance); pages.len()]],
        NodeBody::Choice { .. } => {
            (0..session.visible_options().len()).map(|i| vec![Event::new(dev, Payload::Choose(i))]).collect()
        }
        NodeBody::MiniGame { game, .. } => [Outcome::Success, Outcome::Failure]
            .into_iter()
            .filter_map(|goal| mini_witness(session, game, goal))
            .collect(),
        NodeBody::Ending { .. } => Vec::new(),
    }
}

type Key = (String, BTreeSet<String>, BTreeSet<String>, BTreeMap<String, i64>);

/// What matters for the future of a session sitting at a node entry. Item
/// counts reduce to presence: an item that can be taken is held at most
/// once, and otherwise only presence is ever tested.
fn key(s: &Session) -> Key {
    (s.current().to_string(), s.flags().clone(), s.inventory().keys().cloned().collect(), s.meters().clone())
}

/// Shortest event sequence (by count) that, replayed from a new session,
/// lands on `target`. Mini-games are played out concretely. The trace ends
/// on arrival; an ending still needs an `ack` to finish.
pub fn trace_to_with(graph: &StoryGraph, target: &str, budget: usize) -> Result<Trace, AnalysisError> {
    if graph.node(target).is_none() {
        return Err(AnalysisError::Unreachable(target.to_string()));
    }
    let start = Session::new(Arc::new(graph.clone()), 0);
    let mut seen: HashSet<Key> = HashSet::new();
    let mut heap = BinaryHeap::new();
    let mut entries: Vec<(Session, Trace)> = vec![(start, Vec::new())];
    heap.push(Reverse((0usize, 0usize)));
    while let Some(Reverse((cost, idx))) = heap.pop() {
        let (session, trace) = entries[idx].clone();
        if session.current() == target {
            return Ok(trace);
        }
        if !seen.insert(key(&session)) {
            continue;
        }
        if seen.len() > budget {
            return Err(AnalysisError::StateBudgetExceeded(budget));
        }
        for events in macro_steps(&session) {
            let mut next = session.clone();
            let mut t = trace.clone();
            let mut ok = true;
            for e in &events {
                let at = next.current().to_string();
                match next.apply(e) {
                    Ok(notes) if notes.iter().all(|n| !n.is_rejection()) => t.push(TraceStep { node: at, event: e.clone() }),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && !seen.contains(&key(&next)) {
                entries.push((next, t));
                heap.push(Reverse((cost + events.len(), entries.len() - 1)));
            }
        }
    }
    Err(AnalysisError::Unreachable(target.to_string()))
}

pub fn trace_to(graph: &StoryGraph, target: &str) -> Result<Trace, AnalysisError> {
    trace_to_with(graph, target, super::DEFAULT_STATE_BUDGET)
}

/// Replays a trace on a fresh session, failing on any rejected event.
pub fn replay(graph: Arc<StoryGraph>, trace: &[TraceStep]) -> Result<Session, String> {
    let mut s = Session::new(graph, 0);
    for (i, step) in trace.iter().enumerate() {
        if s.current() != step.node {
            return Err(format!("step {i}: expected to be at `{}`, at `{}`", step.node, s.current()));
        }
        let notes = s.apply(&step.event).map_err(|e| format!("step {i}: {e}"))?;
        if let Some(n) = notes.iter().find(|n| n.is_rejection()) {
            return Err(format!("step {i}: {} rejected ({n})", step.event));
        }
    }
    Ok(s)
}
