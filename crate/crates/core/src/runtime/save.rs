use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::minigame::MiniState;
use super::Session;
use crate::json::to_canonical_pretty;
use crate::model::{content_hash, NodeBody, StoryGraph};

pub const SAVE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SaveError {
    #[error("save belongs to a different story (hash {saved}, story is {actual})")]
    HashMismatch { saved: String, actual: String },
    #[error("unsupported save version {0}")]
    UnsupportedVersion(u64),
    #[error("malformed save: {0}")]
    MalformedSave(String),
}

/// Everything in a [`Session`] except the graph, plus the story's content
/// hash (SHA-256 of its canonical bytes, lowercase hex).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaveState {
    pub version: u32,
    pub story_hash: String,
    pub node: String,
    pub flags: Vec<String>,
    /// One entry per held copy, sorted.
    pub inventory: Vec<String>,
    pub meters: BTreeMap<String, i64>,
    pub page: usize,
    /// `{}` outside mini-games.
    pub mini: Value,
    pub seed: u64,
    pub event_count: u64,
    pub finished: Option<String>,
}

impl SaveState {
    pub fn to_json(&self) -> String {
        to_canonical_pretty(self).expect("save state serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, SaveError> {
        let value: Value = serde_json::from_slice(bytes).map_err(|e| SaveError::MalformedSave(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self, SaveError> {
        match value.get("version") {
            Some(Value::Number(n)) if n.as_u64() == Some(u64::from(SAVE_VERSION)) => {}
            Some(Value::Number(n)) if n.as_u64().is_some() => {
                return Err(SaveError::UnsupportedVersion(n.as_u64().unwrap_or_default()))
            }
            _ => return Err(SaveError::MalformedSave("missing or non-integer `version`".into())),
        }
        serde_json::from_value(value).map_err(|e| SaveError::MalformedSave(e.to_string()))
    }
}

impl Session {
    pub fn save(&self) -> SaveState {
        SaveState {
            version: SAVE_VERSION,
            story_hash: content_hash(self.graph()),
            node: self.current().to_string(),
            flags: self.flags().iter().cloned().collect(),
            inventory: self
                .inventory()
                .iter()
                .flat_map(|(item, n)| std::iter::repeat_n(item.clone(), *n as usize))
                .collect(),
            meters: self.meters().clone(),
            page: self.page(),
            mini: match self.mini() {
                Some(m) => serde_json::to_value(m).expect("mini state serializes"),
                None => Value::Object(Default::default()),
            },
            seed: self.seed(),
            event_count: self.event_count(),
            finished: self.finished().map(str::to_string),
        }
    }

    /// Rebuilds a session from a save. The save must come from this exact
    /// story and describe a state the story can be in.
    pub fn restore(graph: Arc<StoryGraph>, save: &SaveState) -> Result<Session, SaveError> {
        if save.version != SAVE_VERSION {
            return Err(SaveError::UnsupportedVersion(save.version.into()));
        }
        let actual = content_hash(&graph);
        if save.story_hash != actual {
            return Err(SaveError::HashMismatch { saved: save.story_hash.clone(), actual });
        }
        let bad = |m: String| Err(SaveError::MalformedSave(m));
        let Some(node) = graph.node(&save.node) else {
            return bad(format!("unknown node `{}`", save.node));
        };
        let flags: BTreeSet<String> = save.flags.iter().cloned().collect();
        if flags.len() != save.flags.len() || !flags.iter().all(|f| graph.has_flag(f)) {
            return bad("flags must be distinct declared flags".into());
        }
        let mut inventory = BTreeMap::new();
        for item in &save.inventory {
            if graph.item(item).is_none() {
                return bad(format!("undeclared item `{item}`"));
            }
            *inventory.entry(item.clone()).or_insert(0u32) += 1;
        }
        let declared: BTreeSet<&str> = graph.meters.iter().map(|m| m.name.as_str()).collect();
        if save.meters.keys().map(String::as_str).collect::<BTreeSet<_>>() != declared {
            return bad("meters must match the story's declarations".into());
        }
        for m in &graph.meters {
            let v = save.meters[&m.name];
            if v < m.min || v > m.max {
                return bad(format!("meter `{}` = {v} outside [{}, {}]", m.name, m.min, m.max));
            }
        }
        let page_ok = match &node.body {
            NodeBody::Narration { pages, .. } => save.page < pages.len(),
            _ => save.page == 0,
        };
        if !page_ok {
            return bad(format!("page {} out of range", save.page));
        }
        let empty = save.mini.as_object().is_some_and(|o| o.is_empty());
        let mini = match &node.body {
            NodeBody::MiniGame { game, .. } => {
                let m: MiniState =
                    serde_json::from_value(save.mini.clone()).map_err(|e| SaveError::MalformedSave(e.to_string()))?;
                if !m.consistent_with(game) {
                    return bad("mini-game state does not fit the node".into());
                }
                Some(m)
            }
            _ if empty => None,
            _ => return bad("mini-game state outside a mini-game".into()),
        };
        match &save.finished {
            Some(f) if f != &save.node || !node.is_ending() => return bad(format!("finished at `{f}` but current is `{}`", save.node)),
            _ => {}
        }
        let mut s = Session::new(graph, save.seed);
        s.current = save.node.clone();
        s.flags = flags;
        s.inventory = inventory;
        s.meters = save.meters.clone();
        s.page = save.page;
        s.mini = mini;
        s.event_count = save.event_count;
        s.finished = save.finished.clone();
        Ok(s)
    }
}
