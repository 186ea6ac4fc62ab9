//! The compiled story graph.
//!
//! A [`StoryGraph`] is the only thing the runtime and the analyses consume.
//! It is produced by [`crate::compile`] or by [`decode`] from its canonical
//! JSON form, and is immutable afterwards.

mod codec;
pub(crate) mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use codec::{canonical_bytes, content_hash, decode, encode, ModelError};
pub use validate::{minigame_problems, validate};

/// Version number written to, and required from, the canonical graph format.
pub const FORMAT_VERSION: u32 = 1;

/// Channel a node accepts input from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Touch,
    Handset,
    Any,
}

impl Channel {
    pub fn accepts(self, device: Device) -> bool {
        match self {
            Channel::Any => true,
            Channel::Touch => device == Device::Touch,
            Channel::Handset => device == Device::Handset,
        }
    }

    pub fn devices(self) -> Vec<Device> {
        match self {
            Channel::Touch => vec![Device::Touch],
            Channel::Handset => vec![Device::Handset],
            Channel::Any => vec![Device::Touch, Device::Handset],
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "touch" => Some(Channel::Touch),
            "handset" => Some(Channel::Handset),
            "any" => Some(Channel::Any),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Touch => "touch",
            Channel::Handset => "handset",
            Channel::Any => "any",
        }
    }
}

/// The physical input device an event came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Touch,
    Handset,
}

impl Device {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "touch" => Some(Device::Touch),
            "handset" => Some(Device::Handset),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Device::Touch => "touch",
            Device::Handset => "handset",
        }
    }

    pub fn other(self) -> Self {
        match self {
            Device::Touch => Device::Handset,
            Device::Handset => Device::Touch,
        }
    }
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndingKind {
    Main,
    Sub,
}

impl EndingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EndingKind::Main => "main",
            EndingKind::Sub => "sub",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Cmp {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Eq => lhs == rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Gt => lhs > rhs,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeterDef {
    pub name: String,
    pub min: i64,
    pub max: i64,
    pub init: i64,
}

impl MeterDef {
    pub fn clamp(&self, value: i64) -> i64 {
        value.clamp(self.min, self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemDef {
    pub name: String,
    #[serde(default)]
    pub label: Option<String>,
}

/// Predicate controlling whether a choice option is offered.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Guard {
    FlagSet { flag: String },
    FlagClear { flag: String },
    ItemHeld { item: String },
    Meter { meter: String, cmp: Cmp, value: i64 },
}

/// State change applied when leaving a narration node or taking an option.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Effect {
    SetFlag { flag: String },
    ClearFlag { flag: String },
    GiveItem { item: String },
    TakeItem { item: String },
    MeterDelta { meter: String, delta: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceOption {
    pub label: String,
    #[serde(default)]
    pub guards: Vec<Guard>,
    pub target: String,
    #[serde(default)]
    pub effects: Vec<Effect>,
}

/// Grid coordinate; `x` is the column, `y` the row, both from the top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn chebyshev(self, other: Cell) -> u32 {
        self.x.abs_diff(other.x).max(self.y.abs_diff(other.y))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Biolink terrain tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tile {
    Open,
    Trash,
    Wall,
    Start,
}

impl Tile {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '.' => Some(Tile::Open),
            'T' => Some(Tile::Trash),
            '#' => Some(Tile::Wall),
            'S' => Some(Tile::Start),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Tile::Open => '.',
            Tile::Trash => 'T',
            Tile::Wall => '#',
            Tile::Start => 'S',
        }
    }
}

/// Parameters of a bio-link mini-game: steer a creature over a grid to
/// collect trash while a free-will meter drains with each command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiolinkParams {
    pub creature: String,
    /// Row strings over `.` (open), `T` (trash), `#` (wall), `S` (start).
    pub grid: Vec<String>,
    pub command_cost: u32,
    pub idle_regen: u32,
    pub loss_threshold: i64,
    pub meter: String,
    pub required_trash: u32,
    pub visibility: u32,
}

impl BiolinkParams {
    pub const DEFAULT_COMMAND_COST: u32 = 5;
    pub const DEFAULT_IDLE_REGEN: u32 = 2;
    pub const DEFAULT_LOSS_THRESHOLD: i64 = 0;
    pub const DEFAULT_VISIBILITY: u32 = 2;

    pub fn height(&self) -> u32 {
        self.grid.len() as u32
    }

    pub fn width(&self) -> u32 {
        self.grid.first().map_or(0, |r| r.chars().count() as u32)
    }

    pub fn tile(&self, cell: Cell) -> Option<Tile> {
        self.grid
            .get(cell.y as usize)
            .and_then(|row| row.chars().nth(cell.x as usize))
            .and_then(Tile::from_char)
    }

    pub fn start(&self) -> Option<Cell> {
        self.cells().find(|(_, t)| *t == Tile::Start).map(|(c, _)| c)
    }

    pub fn trash_cells(&self) -> Vec<Cell> {
        self.cells().filter(|(_, t)| *t == Tile::Trash).map(|(c, _)| c).collect()
    }

    /// Every cell with its tile, row-major. Unknown characters are skipped.
    pub fn cells(&self) -> impl Iterator<Item = (Cell, Tile)> + '_ {
        self.grid.iter().enumerate().flat_map(|(y, row)| {
            row.chars()
                .enumerate()
                .filter_map(move |(x, c)| Tile::from_char(c).map(|t| (Cell::new(x as u32, y as u32), t)))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    pub width: u32,
    pub height: u32,
    pub target: Cell,
    #[serde(default)]
    pub decoys: Vec<Cell>,
    #[serde(default)]
    pub budget: Option<u32>,
}

impl ScanParams {
    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < i64::from(self.width) && y < i64::from(self.height)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordParams {
    pub expected: String,
    #[serde(default)]
    pub max_attempts: Option<u32>,
}

/// Handset key that submits the coordinate buffer.
pub const KEYPAD_SUBMIT: char = '\u{23ce}';

/// Whether `c` can be typed on the handset keypad: digits, `.`, `-`, the
/// compass letters (either case) and space. [`KEYPAD_SUBMIT`] is handled
/// separately.
pub fn is_keypad_symbol(c: char) -> bool {
    c.is_ascii_digit() || matches!(c.to_ascii_uppercase(), '.' | '-' | 'N' | 'S' | 'E' | 'W' | ' ')
}

/// Coordinate comparison form: trimmed, internal whitespace collapsed to one
/// space, uppercased.
pub fn normalize_coord(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_uppercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceStep {
    pub id: String,
    pub channel: Device,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceParams {
    pub steps: Vec<SequenceStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MiniGameKind {
    Biolink,
    Scan,
    Coord,
    Sequence,
}

impl MiniGameKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "biolink" => Some(Self::Biolink),
            "scan" => Some(Self::Scan),
            "coord" => Some(Self::Coord),
            "sequence" => Some(Self::Sequence),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Biolink => "biolink",
            Self::Scan => "scan",
            Self::Coord => "coord",
            Self::Sequence => "sequence",
        }
    }

    pub fn default_channel(self) -> Channel {
        match self {
            Self::Biolink | Self::Scan => Channel::Handset,
            Self::Coord | Self::Sequence => Channel::Any,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MiniGame {
    Biolink(BiolinkParams),
    Scan(ScanParams),
    Coord(CoordParams),
    Sequence(SequenceParams),
}

impl MiniGame {
    pub fn kind(&self) -> MiniGameKind {
        match self {
            MiniGame::Biolink(_) => MiniGameKind::Biolink,
            MiniGame::Scan(_) => MiniGameKind::Scan,
            MiniGame::Coord(_) => MiniGameKind::Coord,
            MiniGame::Sequence(_) => MiniGameKind::Sequence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NodeBody {
    Narration {
        pages: Vec<String>,
        next: String,
        #[serde(default)]
        effects: Vec<Effect>,
    },
    Choice {
        prompt: String,
        options: Vec<ChoiceOption>,
    },
    #[serde(rename = "minigame")]
    MiniGame {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prompt: Option<String>,
        game: MiniGame,
        success: String,
        failure: String,
    },
    Ending {
        ending: EndingKind,
        text: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Narration,
    Choice,
    MiniGame(MiniGameKind),
    Ending(EndingKind),
}

impl NodeKind {
    pub fn default_channel(self) -> Channel {
        match self {
            NodeKind::Narration | NodeKind::Choice | NodeKind::Ending(_) => Channel::Touch,
            NodeKind::MiniGame(k) => k.default_channel(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Narration => "narration",
            NodeKind::Choice => "choice",
            NodeKind::MiniGame(_) => "minigame",
            NodeKind::Ending(_) => "ending",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub channel: Channel,
    #[serde(flatten)]
    pub body: NodeBody,
}

impl Node {
    pub fn kind(&self) -> NodeKind {
        match &self.body {
            NodeBody::Narration { .. } => NodeKind::Narration,
            NodeBody::Choice { .. } => NodeKind::Choice,
            NodeBody::MiniGame { game, .. } => NodeKind::MiniGame(game.kind()),
            NodeBody::Ending { ending, .. } => NodeKind::Ending(*ending),
        }
    }

    /// Outgoing edge targets in authored order (duplicates kept).
    pub fn targets(&self) -> Vec<&str> {
        match &self.body {
            NodeBody::Narration { next, .. } => vec![next.as_str()],
            NodeBody::Choice { options, .. } => options.iter().map(|o| o.target.as_str()).collect(),
            NodeBody::MiniGame { success, failure, .. } => vec![success.as_str(), failure.as_str()],
            NodeBody::Ending { .. } => Vec::new(),
        }
    }

    pub fn is_ending(&self) -> bool {
        matches!(self.body, NodeBody::Ending { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoryGraph {
    pub version: u32,
    pub title: String,
    pub start: String,
    #[serde(default)]
    pub meters: Vec<MeterDef>,
    #[serde(default)]
    pub items: Vec<ItemDef>,
    #[serde(default)]
    pub flags: Vec<String>,
    pub nodes: BTreeMap<String, Node>,
}

impl StoryGraph {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn meter(&self, name: &str) -> Option<&MeterDef> {
        self.meters.iter().find(|m| m.name == name)
    }

    pub fn item(&self, name: &str) -> Option<&ItemDef> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn has_flag(&self, name: &str) -> bool {
        self.flags.iter().any(|f| f == name)
    }

    /// Ending node ids with their kinds, in id order.
    pub fn endings(&self) -> BTreeMap<&str, EndingKind> {
        self.nodes
            .values()
            .filter_map(|n| match &n.body {
                NodeBody::Ending { ending, .. } => Some((n.id.as_str(), *ending)),
                _ => None,
            })
            .collect()
    }

    /// Ids of nodes that are targeted by at least one edge.
    pub fn targeted(&self) -> BTreeSet<&str> {
        self.nodes.values().flat_map(|n| n.targets()).collect()
    }
}

/// Whether `s` is a legal node id or declaration name: `[A-Za-z][A-Za-z0-9-]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '-')
}
