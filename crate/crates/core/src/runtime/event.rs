use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::model::{is_keypad_symbol, Device, KEYPAD_SUBMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::South, Direction::East, Direction::West];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
        }
    }

    fn letter(self) -> char {
        match self {
            Direction::North => 'n',
            Direction::South => 's',
            Direction::East => 'e',
            Direction::West => 'w',
        }
    }
}

/// Player command inside a mini-game.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MiniAction {
    Move(Direction),
    Grab,
    Wait,
    Scan { x: i64, y: i64 },
    Submit,
    Backspace,
    Do(String),
}

impl MiniAction {
    pub fn wire_name(&self) -> String {
        match self {
            MiniAction::Move(d) => format!("move-{}", d.letter()),
            MiniAction::Grab => "grab".into(),
            MiniAction::Wait => "wait".into(),
            MiniAction::Scan { .. } => "scan".into(),
            MiniAction::Submit => "submit".into(),
            MiniAction::Backspace => "backspace".into(),
            MiniAction::Do(_) => "do".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Payload {
    Advance,
    /// Index into the guard-filtered option list the player was shown.
    Choose(usize),
    Key(char),
    Mini(MiniAction),
    Ack,
}

/// One player input, tagged with the device it came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub channel: Device,
    pub payload: Payload,
}

impl Event {
    pub fn new(channel: Device, payload: Payload) -> Self {
        Self { channel, payload }
    }

    pub fn touch(payload: Payload) -> Self {
        Self::new(Device::Touch, payload)
    }

    pub fn handset(payload: Payload) -> Self {
        Self::new(Device::Handset, payload)
    }

    pub fn on(self, channel: Device) -> Self {
        Self { channel, ..self }
    }

    /// The wire form used by the HTTP API and scripted play:
    /// `{channel, type, ...payload}`.
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "channel": self.channel.as_str() });
        let obj = v.as_object_mut().expect("object literal");
        match &self.payload {
            Payload::Advance => {
                obj.insert("type".into(), "advance".into());
            }
            Payload::Ack => {
                obj.insert("type".into(), "ack".into());
            }
            Payload::Choose(i) => {
                obj.insert("type".into(), "choose".into());
                obj.insert("index".into(), (*i as u64).into());
            }
            Payload::Key(c) => {
                obj.insert("type".into(), "key".into());
                obj.insert("symbol".into(), c.to_string().into());
            }
            Payload::Mini(a) => {
                obj.insert("type".into(), "mini".into());
                obj.insert("action".into(), a.wire_name().into());
                match a {
                    MiniAction::Scan { x, y } => {
                        obj.insert("x".into(), (*x).into());
                        obj.insert("y".into(), (*y).into());
                    }
                    MiniAction::Do(step) => {
                        obj.insert("step".into(), step.clone().into());
                    }
                    _ => {}
                }
            }
        }
        v
    }

    /// Parses the wire form. Unknown fields, missing payload fields and key
    /// symbols outside the handset keypad are rejected.
    pub fn from_json(value: &Value) -> Result<Self, EventError> {
        let wire: WireEvent = serde_json::from_value(value.clone()).map_err(|e| EventError(e.to_string()))?;
        let need = |field: &str| EventError(format!("`{}` event needs `{field}`", wire.kind));
        let payload = match wire.kind.as_str() {
            "advance" => Payload::Advance,
            "ack" => Payload::Ack,
            "choose" => {
                let i = wire.index.ok_or_else(|| need("index"))?;
                Payload::Choose(usize::try_from(i).map_err(|_| EventError("index too large".into()))?)
            }
            "key" => {
                let sym = wire.symbol.as_deref().ok_or_else(|| need("symbol"))?;
                let mut chars = sym.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c == KEYPAD_SUBMIT || is_keypad_symbol(c) => Payload::Key(c),
                    _ => return Err(EventError(format!("`{sym}` is not a keypad symbol"))),
                }
            }
            "mini" => {
                let action = wire.action.as_deref().ok_or_else(|| need("action"))?;
                Payload::Mini(match action {
                    "move-n" => MiniAction::Move(Direction::North),
                    "move-s" => MiniAction::Move(Direction::South),
                    "move-e" => MiniAction::Move(Direction::East),
                    "move-w" => MiniAction::Move(Direction::West),
                    "grab" => MiniAction::Grab,
                    "wait" => MiniAction::Wait,
                    "submit" => MiniAction::Submit,
                    "backspace" => MiniAction::Backspace,
                    "scan" => MiniAction::Scan { x: wire.x.ok_or_else(|| need("x"))?, y: wire.y.ok_or_else(|| need("y"))? },
                    "do" => MiniAction::Do(wire.step.clone().ok_or_else(|| need("step"))?),
                    other => return Err(EventError(format!("unknown mini action `{other}`"))),
                })
            }
            other => return Err(EventError(format!("unknown event type `{other}`"))),
        };
        Ok(Event { channel: wire.channel, payload })
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.channel)?;
        match &self.payload {
            Payload::Advance => write!(f, "advance"),
            Payload::Ack => write!(f, "ack"),
            Payload::Choose(i) => write!(f, "choose({i})"),
            Payload::Key(c) => write!(f, "key({c})"),
            Payload::Mini(MiniAction::Scan { x, y }) => write!(f, "scan({x},{y})"),
            Payload::Mini(MiniAction::Do(s)) => write!(f, "do({s})"),
            Payload::Mini(a) => write!(f, "{}", a.wire_name()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireEvent {
    channel: Device,
    #[serde(rename = "type")]
    kind: String,
    index: Option<u64>,
    symbol: Option<String>,
    action: Option<String>,
    x: Option<i64>,
    y: Option<i64>,
    step: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed event: {0}")]
pub struct EventError(pub String);

/// Engine feedback attached to a transition.
///
/// Rejections leave the session untouched (the event is not counted);
/// the rest accompany an accepted event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineNote {
    WrongChannel,
    BadChoice,
    UnexpectedEvent,
    OutOfBounds,
    AlreadyScanned,
    NotYet,
    UnknownStep,
    BufferFull,
    Blocked,
    ControlLost,
    Decoy,
    Mismatch,
    MiniSuccess,
    MiniFailure,
}

impl EngineNote {
    pub fn code(self) -> &'static str {
        match self {
            EngineNote::WrongChannel => "wrong-channel",
            EngineNote::BadChoice => "bad-choice",
            EngineNote::UnexpectedEvent => "unexpected-event",
            EngineNote::OutOfBounds => "out-of-bounds",
            EngineNote::AlreadyScanned => "already-scanned",
            EngineNote::NotYet => "not-yet",
            EngineNote::UnknownStep => "unknown-step",
            EngineNote::BufferFull => "buffer-full",
            EngineNote::Blocked => "blocked",
            EngineNote::ControlLost => "control-lost",
            EngineNote::Decoy => "decoy",
            EngineNote::Mismatch => "mismatch",
            EngineNote::MiniSuccess => "mini-success",
            EngineNote::MiniFailure => "mini-failure",
        }
    }

    pub fn is_rejection(self) -> bool {
        matches!(
            self,
            EngineNote::WrongChannel
                | EngineNote::BadChoice
                | EngineNote::UnexpectedEvent
                | EngineNote::OutOfBounds
                | EngineNote::AlreadyScanned
                | EngineNote::NotYet
                | EngineNote::UnknownStep
                | EngineNote::BufferFull
        )
    }
}

impl fmt::Display for EngineNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}
