//! The four mini-game engines. Each update is a pure function of the node's
//! parameters and the current mini-game state.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::event::{Direction, EngineNote};
use crate::model::{
    normalize_coord, BiolinkParams, Cell, CoordParams, Device, MeterDef, MiniGame, ScanParams, SequenceParams, Tile,
};

/// Longest coordinate the keypad buffer holds.
pub const COORD_BUFFER_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Continue,
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiolinkState {
    pub position: Cell,
    pub collected: BTreeSet<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanState {
    pub revealed: BTreeSet<Cell>,
    pub scans_used: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordState {
    pub attempts_used: u32,
    pub buffer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceState {
    pub next_step: usize,
}

/// Progress inside the current mini-game node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MiniState {
    Biolink(BiolinkState),
    Scan(ScanState),
    Coord(CoordState),
    Sequence(SequenceState),
}

impl MiniState {
    /// State on entering a node with this game.
    pub fn fresh(game: &MiniGame) -> Self {
        match game {
            MiniGame::Biolink(p) => MiniState::Biolink(BiolinkState {
                position: p.start().unwrap_or(Cell::new(0, 0)),
                collected: BTreeSet::new(),
            }),
            MiniGame::Scan(_) => MiniState::Scan(ScanState { revealed: BTreeSet::new(), scans_used: 0 }),
            MiniGame::Coord(_) => MiniState::Coord(CoordState { attempts_used: 0, buffer: String::new() }),
            MiniGame::Sequence(_) => MiniState::Sequence(SequenceState { next_step: 0 }),
        }
    }

    /// Whether this state could have been produced by playing `game`.
    pub fn consistent_with(&self, game: &MiniGame) -> bool {
        match (self, game) {
            (MiniState::Biolink(s), MiniGame::Biolink(p)) => {
                let trash: BTreeSet<Cell> = p.trash_cells().into_iter().collect();
                matches!(p.tile(s.position), Some(t) if t != Tile::Wall) && s.collected.is_subset(&trash)
            }
            (MiniState::Scan(s), MiniGame::Scan(p)) => {
                s.revealed.iter().all(|c| p.in_bounds(c.x.into(), c.y.into()) && *c != p.target)
                    && s.scans_used as usize == s.revealed.len()
                    && p.budget.is_none_or(|b| s.scans_used <= b)
            }
            (MiniState::Coord(s), MiniGame::Coord(p)) => {
                s.buffer.chars().count() <= COORD_BUFFER_CAP
                    && s.buffer.chars().all(crate::model::is_keypad_symbol)
                    && p.max_attempts.is_none_or(|m| s.attempts_used < m)
            }
            (MiniState::Sequence(s), MiniGame::Sequence(p)) => s.next_step < p.steps.len(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BiolinkAction {
    Move(Direction),
    Grab,
    Wait,
}

impl BiolinkAction {
    pub const ALL: [BiolinkAction; 6] = [
        BiolinkAction::Move(Direction::North),
        BiolinkAction::Move(Direction::South),
        BiolinkAction::Move(Direction::East),
        BiolinkAction::Move(Direction::West),
        BiolinkAction::Grab,
        BiolinkAction::Wait,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiolinkStep {
    pub state: BiolinkState,
    pub meter: i64,
    pub outcome: Outcome,
    /// The move hit a wall or the grid edge.
    pub blocked: bool,
}

/// One bio-link command. Moves and grabs cost `command_cost`, waiting
/// regains `idle_regen`; the meter is clamped to its declared range and then
/// checked against the loss threshold before the trash count.
pub fn biolink_update(
    params: &BiolinkParams,
    meter_def: &MeterDef,
    state: &BiolinkState,
    meter: i64,
    action: BiolinkAction,
) -> BiolinkStep {
    let cost = i64::from(params.command_cost);
    let mut next = state.clone();
    let mut blocked = false;
    let raw = match action {
        BiolinkAction::Move(d) => {
            let (dx, dy) = d.delta();
            let (x, y) = (i64::from(state.position.x) + dx, i64::from(state.position.y) + dy);
            let target = (x >= 0 && y >= 0).then(|| Cell::new(x as u32, y as u32));
            match target.and_then(|c| params.tile(c).map(|t| (c, t))) {
                Some((c, t)) if t != Tile::Wall => next.position = c,
                _ => blocked = true,
            }
            meter - cost
        }
        BiolinkAction::Grab => {
            if params.tile(state.position) == Some(Tile::Trash) {
                next.collected.insert(state.position);
            }
            meter - cost
        }
        BiolinkAction::Wait => meter + i64::from(params.idle_regen),
    };
    let meter = meter_def.clamp(raw);
    let outcome = if meter <= params.loss_threshold {
        Outcome::Failure
    } else if next.collected.len() as u64 >= u64::from(params.required_trash) {
        Outcome::Success
    } else {
        Outcome::Continue
    };
    BiolinkStep { state: next, meter, outcome, blocked }
}

/// Scans one cell. Out-of-bounds and repeated cells are rejected with the
/// state untouched; a fresh non-target cell uses up one scan.
pub fn scan_update(params: &ScanParams, state: &ScanState, x: i64, y: i64) -> Result<(ScanState, Outcome, Option<EngineNote>), EngineNote> {
    if !params.in_bounds(x, y) {
        return Err(EngineNote::OutOfBounds);
    }
    let cell = Cell::new(x as u32, y as u32);
    if state.revealed.contains(&cell) {
        return Err(EngineNote::AlreadyScanned);
    }
    if cell == params.target {
        return Ok((state.clone(), Outcome::Success, None));
    }
    let mut next = state.clone();
    next.revealed.insert(cell);
    next.scans_used += 1;
    let note = params.decoys.contains(&cell).then_some(EngineNote::Decoy);
    let outcome = match params.budget {
        Some(b) if next.scans_used > b => Outcome::Failure,
        _ => Outcome::Continue,
    };
    Ok((next, outcome, note))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordAction {
    Key(char),
    Submit,
    Backspace,
}

/// One keypad press. A full buffer rejects further symbols.
pub fn coord_update(params: &CoordParams, state: &CoordState, action: CoordAction) -> Result<(CoordState, Outcome, Option<EngineNote>), EngineNote> {
    let mut next = state.clone();
    match action {
        CoordAction::Key(c) => {
            if state.buffer.chars().count() >= COORD_BUFFER_CAP {
                return Err(EngineNote::BufferFull);
            }
            next.buffer.push(c);
            Ok((next, Outcome::Continue, None))
        }
        CoordAction::Backspace => {
            next.buffer.pop();
            Ok((next, Outcome::Continue, None))
        }
        CoordAction::Submit => {
            if normalize_coord(&state.buffer) == normalize_coord(&params.expected) {
                return Ok((next, Outcome::Success, None));
            }
            next.attempts_used += 1;
            next.buffer.clear();
            let outcome = match params.max_attempts {
                Some(m) if next.attempts_used >= m => Outcome::Failure,
                _ => Outcome::Continue,
            };
            Ok((next, outcome, Some(EngineNote::Mismatch)))
        }
    }
}

/// Performs a named step from the given device. Only the next authored
/// step on its authored device advances.
pub fn sequence_update(params: &SequenceParams, state: &SequenceState, step: &str, channel: Device) -> Result<(SequenceState, Outcome), EngineNote> {
    if !params.steps.iter().any(|s| s.id == step) {
        return Err(EngineNote::UnknownStep);
    }
    match params.steps.get(state.next_step) {
        Some(s) if s.id == step && s.channel == channel => {
            let next = SequenceState { next_step: state.next_step + 1 };
            let outcome = if next.next_step == params.steps.len() { Outcome::Success } else { Outcome::Continue };
            Ok((next, outcome))
        }
        _ => Err(EngineNote::NotYet),
    }
}
