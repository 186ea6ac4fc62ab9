use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::minigame::MiniState;
use super::Session;
use crate::model::{Cell, Device, MiniGame, NodeBody, Tile};

/// What the player sees at the current node. This is the wire view too.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct View {
    pub node: String,
    /// `narration`, `choice`, `minigame` or `ending`.
    pub kind: String,
    /// Devices the node takes input from.
    pub channels: Vec<Device>,
    /// Current narration page or ending text.
    pub text: Option<String>,
    pub page: usize,
    pub page_count: usize,
    pub prompt: Option<String>,
    pub options: Vec<ViewOption>,
    pub meters: BTreeMap<String, MeterReading>,
    pub inventory: Vec<ItemReading>,
    pub mini: Option<MiniView>,
    /// `main` or `sub` at an ending node.
    pub ending: Option<String>,
    pub finished: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewOption {
    /// What to send in a `choose` event.
    pub index: usize,
    /// Position in the authored option list.
    pub original_index: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeterReading {
    pub value: i64,
    pub min: i64,
    pub max: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemReading {
    pub item: String,
    pub label: Option<String>,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibleCell {
    pub x: u32,
    pub y: u32,
    /// Grid character; collected trash shows as open ground.
    pub tile: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScannedCell {
    pub x: u32,
    pub y: u32,
    /// `decoy` or `empty`.
    pub marker: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MiniView {
    Biolink {
        creature: String,
        meter: String,
        position: Cell,
        visibility: u32,
        width: u32,
        height: u32,
        /// Only cells within `visibility` (Chebyshev) of the creature.
        cells: Vec<VisibleCell>,
        collected: usize,
        required: u32,
    },
    Scan {
        width: u32,
        height: u32,
        revealed: Vec<ScannedCell>,
        scans_used: u32,
        budget: Option<u32>,
    },
    Coord {
        /// One `*` per buffered symbol.
        masked: String,
        attempts_used: u32,
        max_attempts: Option<u32>,
    },
    Sequence {
        progress: usize,
        total: usize,
        /// Device the next step is expected on. Which step comes next is
        /// not revealed.
        next_channel: Option<Device>,
        /// Step names in alphabetical order.
        steps: Vec<String>,
    },
}

impl Session {
    pub fn view(&self) -> View {
        let node = self.node();
        let graph = self.graph();
        let mut v = View {
            node: node.id.clone(),
            kind: node.kind().name().to_string(),
            channels: node.channel.devices(),
            text: None,
            page: self.page(),
            page_count: 0,
            prompt: None,
            options: Vec::new(),
            meters: graph
                .meters
                .iter()
                .map(|m| {
                    let value = self.meter(&m.name).unwrap_or(m.init);
                    (m.name.clone(), MeterReading { value, min: m.min, max: m.max })
                })
                .collect(),
            inventory: self
                .inventory()
                .iter()
                .map(|(item, count)| ItemReading {
                    item: item.clone(),
                    label: graph.item(item).and_then(|i| i.label.clone()),
                    count: *count,
                })
                .collect(),
            mini: None,
            ending: None,
            finished: self.is_finished(),
        };
        match &node.body {
            NodeBody::Narration { pages, .. } => {
                v.text = pages.get(self.page()).cloned();
                v.page_count = pages.len();
            }
            NodeBody::Choice { prompt, .. } => {
                v.prompt = Some(prompt.clone());
                v.options = self
                    .visible_options()
                    .into_iter()
                    .enumerate()
                    .map(|(index, (original_index, o))| ViewOption { index, original_index, label: o.label.clone() })
                    .collect();
            }
            NodeBody::MiniGame { prompt, game, .. } => {
                v.prompt = prompt.clone();
                v.mini = self.mini().map(|m| mini_view(game, m));
            }
            NodeBody::Ending { ending, text } => {
                v.text = Some(text.clone());
                v.ending = Some(ending.as_str().to_string());
            }
        }
        v
    }
}

fn mini_view(game: &MiniGame, state: &MiniState) -> MiniView {
    match (game, state) {
        (MiniGame::Biolink(p), MiniState::Biolink(s)) => MiniView::Biolink {
            creature: p.creature.clone(),
            meter: p.meter.clone(),
            position: s.position,
            visibility: p.visibility,
            width: p.width(),
            height: p.height(),
            cells: p
                .cells()
                .filter(|(c, _)| c.chebyshev(s.position) <= p.visibility)
                .map(|(c, t)| {
                    let shown = match t {
                        Tile::Trash if s.collected.contains(&c) => Tile::Open,
                        t => t,
                    };
                    VisibleCell { x: c.x, y: c.y, tile: shown.as_char().to_string() }
                })
                .collect(),
            collected: s.collected.len(),
            required: p.required_trash,
        },
        (MiniGame::Scan(p), MiniState::Scan(s)) => MiniView::Scan {
            width: p.width,
            height: p.height,
            revealed: s
                .revealed
                .iter()
                .map(|c| ScannedCell {
                    x: c.x,
                    y: c.y,
                    marker: if p.decoys.contains(c) { "decoy" } else { "empty" }.to_string(),
                })
                .collect(),
            scans_used: s.scans_used,
            budget: p.budget,
        },
        (MiniGame::Coord(p), MiniState::Coord(s)) => MiniView::Coord {
            masked: "*".repeat(s.buffer.chars().count()),
            attempts_used: s.attempts_used,
            max_attempts: p.max_attempts,
        },
        (MiniGame::Sequence(p), MiniState::Sequence(s)) => {
            let mut steps: Vec<String> = p.steps.iter().map(|s| s.id.clone()).collect();
            steps.sort();
            steps.dedup();
            MiniView::Sequence {
                progress: s.next_step,
                total: p.steps.len(),
                next_channel: p.steps.get(s.next_step).map(|s| s.channel),
                steps,
            }
        }
        _ => unreachable!("mini-game state follows the node's game"),
    }
}
