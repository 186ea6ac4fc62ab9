//! Deterministic session runtime.
//!
//! A [`Session`] is a plain value. [`Session::apply_event`] returns the
//! successor and leaves the receiver alone; [`Session::apply`] is the
//! in-place form. Events the current node cannot take are answered with an
//! [`EngineNote`] and change nothing.

mod event;
pub mod minigame;
mod save;
mod view;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

pub use event::{Direction, EngineNote, Event, EventError, MiniAction, Payload};
pub use minigame::{BiolinkAction, MiniState, Outcome};
pub use save::{SaveError, SaveState, SAVE_VERSION};
pub use view::{MiniView, View, ViewOption};

use crate::model::{
    is_keypad_symbol, ChoiceOption, Effect, Guard, MiniGame, Node, NodeBody, StoryGraph, KEYPAD_SUBMIT,
};
use minigame::{biolink_update, coord_update, scan_update, sequence_update, CoordAction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("session already finished at `{0}`")]
    SessionFinished(String),
    #[error("malformed event: {0}")]
    MalformedEvent(String),
}

/// One live playthrough of a story.
#[derive(Debug, Clone)]
pub struct Session {
    graph: Arc<StoryGraph>,
    current: String,
    flags: BTreeSet<String>,
    inventory: BTreeMap<String, u32>,
    meters: BTreeMap<String, i64>,
    page: usize,
    mini: Option<MiniState>,
    seed: u64,
    event_count: u64,
    finished: Option<String>,
}

impl PartialEq for Session {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.graph, &other.graph) || *self.graph == *other.graph)
            && self.current == other.current
            && self.flags == other.flags
            && self.inventory == other.inventory
            && self.meters == other.meters
            && self.page == other.page
            && self.mini == other.mini
            && self.seed == other.seed
            && self.event_count == other.event_count
            && self.finished == other.finished
    }
}

impl Eq for Session {}

impl Session {
    /// Starts at the graph's start node with every meter at its initial
    /// value. The graph must be valid. The seed is carried along but no
    /// mechanic reads it.
    pub fn new(graph: Arc<StoryGraph>, seed: u64) -> Self {
        let meters = graph.meters.iter().map(|m| (m.name.clone(), m.init)).collect();
        let start = graph.start.clone();
        let mut s = Session {
            graph,
            current: String::new(),
            flags: BTreeSet::new(),
            inventory: BTreeMap::new(),
            meters,
            page: 0,
            mini: None,
            seed,
            event_count: 0,
            finished: None,
        };
        s.enter(&start);
        s
    }

    pub fn graph(&self) -> &Arc<StoryGraph> {
        &self.graph
    }

    pub fn current(&self) -> &str {
        &self.current
    }

    pub fn node(&self) -> &Node {
        self.graph.node(&self.current).expect("current node exists")
    }

    pub fn flags(&self) -> &BTreeSet<String> {
        &self.flags
    }

    /// Item counts; items with count zero are absent.
    pub fn inventory(&self) -> &BTreeMap<String, u32> {
        &self.inventory
    }

    pub fn meters(&self) -> &BTreeMap<String, i64> {
        &self.meters
    }

    pub fn meter(&self, name: &str) -> Option<i64> {
        self.meters.get(name).copied()
    }

    pub fn page(&self) -> usize {
        self.page
    }

    pub fn mini(&self) -> Option<&MiniState> {
        self.mini.as_ref()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn event_count(&self) -> u64 {
        self.event_count
    }

    /// The acknowledged ending, once the session is over.
    pub fn finished(&self) -> Option<&str> {
        self.finished.as_deref()
    }

    pub fn is_finished(&self) -> bool {
        self.finished.is_some()
    }

    pub fn guard_holds(&self, guard: &Guard) -> bool {
        match guard {
            Guard::FlagSet { flag } => self.flags.contains(flag),
            Guard::FlagClear { flag } => !self.flags.contains(flag),
            Guard::ItemHeld { item } => self.inventory.contains_key(item),
            Guard::Meter { meter, cmp, value } => self.meter(meter).is_some_and(|m| cmp.holds(m, *value)),
        }
    }

    /// Options at the current choice node whose guards all pass, paired with
    /// their authored index. Empty anywhere else.
    pub fn visible_options(&self) -> Vec<(usize, &ChoiceOption)> {
        match &self.node().body {
            NodeBody::Choice { options, .. } => options
                .iter()
                .enumerate()
                .filter(|(_, o)| o.guards.iter().all(|g| self.guard_holds(g)))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Pure transition: returns the successor session and the notes.
    pub fn apply_event(&self, event: &Event) -> Result<(Session, Vec<EngineNote>), RuntimeError> {
        let mut next = self.clone();
        let notes = next.apply(event)?;
        Ok((next, notes))
    }

    /// Applies `event` in place. On a rejection note the session is left
    /// exactly as it was.
    pub fn apply(&mut self, event: &Event) -> Result<Vec<EngineNote>, RuntimeError> {
        if let Some(end) = &self.finished {
            return Err(RuntimeError::SessionFinished(end.clone()));
        }
        if let Payload::Key(c) = event.payload {
            if c != KEYPAD_SUBMIT && !is_keypad_symbol(c) {
                return Err(RuntimeError::MalformedEvent(format!("`{c}` is not a keypad symbol")));
            }
        }
        let graph = Arc::clone(&self.graph);
        let node = graph.node(&self.current).expect("current node exists");
        if !node.channel.accepts(event.channel) {
            return Ok(vec![EngineNote::WrongChannel]);
        }
        let result = match (&node.body, &event.payload) {
            (NodeBody::Narration { pages, next, effects }, Payload::Advance) => {
                if self.page + 1 < pages.len() {
                    self.page += 1;
                } else {
                    self.apply_effects(effects);
                    self.enter(next);
                }
                Ok(Vec::new())
            }
            (NodeBody::Choice { .. }, Payload::Choose(i)) => match self.visible_options().get(*i).map(|(_, o)| (*o).clone()) {
                Some(option) => {
                    self.apply_effects(&option.effects);
                    self.enter(&option.target);
                    Ok(Vec::new())
                }
                None => Err(EngineNote::BadChoice),
            },
            (NodeBody::MiniGame { game, success, failure, .. }, payload) => {
                self.mini_event(game, event.channel, payload).map(|(outcome, mut notes)| {
                    match outcome {
                        Outcome::Continue => {}
                        Outcome::Success => {
                            notes.push(EngineNote::MiniSuccess);
                            self.enter(success);
                        }
                        Outcome::Failure => {
                            notes.push(EngineNote::MiniFailure);
                            self.enter(failure);
                        }
                    }
                    notes
                })
            }
            (NodeBody::Ending { .. }, Payload::Ack) => {
                self.finished = Some(self.current.clone());
                Ok(Vec::new())
            }
            _ => Err(EngineNote::UnexpectedEvent),
        };
        match result {
            Ok(notes) => {
                self.event_count += 1;
                Ok(notes)
            }
            Err(note) => Ok(vec![note]),
        }
    }

    /// Runs one mini-game input. Only the mini-game state and meters are
    /// touched, and only when the input is accepted.
    fn mini_event(&mut self, game: &MiniGame, channel: crate::model::Device, payload: &Payload) -> Result<(Outcome, Vec<EngineNote>), EngineNote> {
        let mini = self.mini.clone().expect("mini-game node has state");
        match (game, &mini, payload) {
            (MiniGame::Biolink(p), MiniState::Biolink(s), Payload::Mini(a)) => {
                let action = match a {
                    MiniAction::Move(d) => BiolinkAction::Move(*d),
                    MiniAction::Grab => BiolinkAction::Grab,
                    MiniAction::Wait => BiolinkAction::Wait,
                    _ => return Err(EngineNote::UnexpectedEvent),
                };
                let def = self.graph.meter(&p.meter).expect("biolink meter declared").clone();
                let value = self.meters[&p.meter];
                let step = biolink_update(p, &def, s, value, action);
                let mut notes = Vec::new();
                if step.blocked {
                    notes.push(EngineNote::Blocked);
                }
                if step.outcome == Outcome::Failure {
                    notes.push(EngineNote::ControlLost);
                }
                self.meters.insert(p.meter.clone(), step.meter);
                self.mini = Some(MiniState::Biolink(step.state));
                Ok((step.outcome, notes))
            }
            (MiniGame::Scan(p), MiniState::Scan(s), Payload::Mini(MiniAction::Scan { x, y })) => {
                let (state, outcome, note) = scan_update(p, s, *x, *y)?;
                self.mini = Some(MiniState::Scan(state));
                Ok((outcome, note.into_iter().collect()))
            }
            (MiniGame::Coord(p), MiniState::Coord(s), payload) => {
                let action = match payload {
                    Payload::Key(KEYPAD_SUBMIT) | Payload::Mini(MiniAction::Submit) => CoordAction::Submit,
                    Payload::Key(c) => CoordAction::Key(*c),
                    Payload::Mini(MiniAction::Backspace) => CoordAction::Backspace,
                    _ => return Err(EngineNote::UnexpectedEvent),
                };
                let (state, outcome, note) = coord_update(p, s, action)?;
                self.mini = Some(MiniState::Coord(state));
                Ok((outcome, note.into_iter().collect()))
            }
            (MiniGame::Sequence(p), MiniState::Sequence(s), Payload::Mini(MiniAction::Do(step))) => {
                let (state, outcome) = sequence_update(p, s, step, channel)?;
                self.mini = Some(MiniState::Sequence(state));
                Ok((outcome, Vec::new()))
            }
            _ => Err(EngineNote::UnexpectedEvent),
        }
    }

    fn apply_effects(&mut self, effects: &[Effect]) {
        for e in effects {
            match e {
                Effect::SetFlag { flag } => {
                    self.flags.insert(flag.clone());
                }
                Effect::ClearFlag { flag } => {
                    self.flags.remove(flag);
                }
                Effect::GiveItem { item } => *self.inventory.entry(item.clone()).or_insert(0) += 1,
                Effect::TakeItem { item } => {
                    if let Some(n) = self.inventory.get_mut(item) {
                        *n -= 1;
                        if *n == 0 {
                            self.inventory.remove(item);
                        }
                    }
                }
                Effect::MeterDelta { meter, delta } => {
                    if let (Some(def), Some(v)) = (self.graph.meter(meter), self.meters.get_mut(meter)) {
                        *v = def.clamp(v.saturating_add(*delta));
                    }
                }
            }
        }
    }

    fn enter(&mut self, id: &str) {
        let node = self.graph.node(id).expect("edge targets exist");
        self.mini = match &node.body {
            NodeBody::MiniGame { game, .. } => Some(MiniState::fresh(game)),
            _ => None,
        };
        self.current = id.to_string();
        self.page = 0;
    }
}
