use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::*;
use crate::diag::Diagnostic;

/// Checks every structural rule of a story graph.
///
/// Returns an empty list iff the graph is valid. Findings are sorted by
/// subject (graph-level findings first, then by node or declaration id) and
/// then by rule code, so equal graphs always yield equal lists.
pub fn validate(graph: &StoryGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut v = Validator { graph, out: &mut out };
    v.header();
    v.declarations();
    for (key, node) in &graph.nodes {
        v.node(key, node);
    }
    v.item_multiplicity();
    out.sort_by(|a, b| (&a.subject, a.code).cmp(&(&b.subject, b.code)));
    out
}

struct Validator<'g, 'o> {
    graph: &'g StoryGraph,
    out: &'o mut Vec<Diagnostic>,
}

impl Validator<'_, '_> {
    fn push(&mut self, d: Diagnostic) {
        self.out.push(d);
    }

    fn header(&mut self) {
        let g = self.graph;
        if g.version != FORMAT_VERSION {
            self.push(Diagnostic::error("unsupported-version", format!("unsupported graph version {}", g.version)));
        }
        if !g.nodes.contains_key(&g.start) {
            self.push(Diagnostic::error("unknown-start", format!("unknown start node `{}`", g.start)).on(&g.start));
        }
        if !g.nodes.values().any(Node::is_ending) {
            self.push(Diagnostic::error("no-ending", "story has no ending node"));
        }
    }

    fn declarations(&mut self) {
        let g = self.graph;
        let names = g
            .meters
            .iter()
            .map(|m| ("meter", m.name.as_str()))
            .chain(g.items.iter().map(|i| ("item", i.name.as_str())))
            .chain(g.flags.iter().map(|f| ("flag", f.as_str())));
        let mut seen = BTreeSet::new();
        for (ns, name) in names {
            if !is_identifier(name) {
                self.push(Diagnostic::error("bad-identifier", format!("{ns} name `{name}` is not an identifier")).on(name));
            }
            if !seen.insert((ns, name)) {
                self.push(Diagnostic::error("duplicate-decl", format!("{ns} `{name}` declared more than once")).on(name));
            }
        }
        for m in &g.meters {
            if m.max <= m.min || m.init < m.min || m.init > m.max {
                self.push(
                    Diagnostic::error(
                        "meter-range",
                        format!("meter `{}` needs min < max and min <= init <= max (got {}..{} init {})", m.name, m.min, m.max, m.init),
                    )
                    .on(&m.name),
                );
            }
        }
    }

    fn node(&mut self, key: &str, node: &Node) {
        let id = key;
        if !is_identifier(&node.id) {
            self.push(Diagnostic::error("bad-node-id", format!("node id `{}` is not an identifier", node.id)).on(id));
        }
        if node.id != key {
            self.push(Diagnostic::error("node-key-mismatch", format!("node stored under `{key}` has id `{}`", node.id)).on(id));
        }
        for target in node.targets() {
            if !self.graph.nodes.contains_key(target) {
                self.push(Diagnostic::error("unknown-target", format!("edge to unknown node `{target}`")).on(id));
            }
        }
        match &node.body {
            NodeBody::Narration { pages, effects, .. } => {
                if pages.is_empty() {
                    self.push(Diagnostic::error("empty-narration", "narration needs at least one text page").on(id));
                }
                for e in effects {
                    self.effect(id, e);
                }
            }
            NodeBody::Choice { options, .. } => {
                if options.len() < 2 {
                    self.push(Diagnostic::error("choice-options", "choice requires ≥ 2 options").on(id));
                }
                for o in options {
                    for g in &o.guards {
                        self.guard(id, g);
                    }
                    for e in &o.effects {
                        self.effect(id, e);
                    }
                }
            }
            NodeBody::MiniGame { game, .. } => self.minigame(id, game),
            NodeBody::Ending { .. } => {}
        }
    }

    fn require_flag(&mut self, id: &str, flag: &str) {
        if !self.graph.has_flag(flag) {
            self.push(Diagnostic::error("unknown-flag", format!("undeclared flag `{flag}`")).on(id));
        }
    }

    fn require_item(&mut self, id: &str, item: &str) {
        if self.graph.item(item).is_none() {
            self.push(Diagnostic::error("unknown-item", format!("undeclared item `{item}`")).on(id));
        }
    }

    fn require_meter(&mut self, id: &str, meter: &str) {
        if self.graph.meter(meter).is_none() {
            self.push(Diagnostic::error("unknown-meter", format!("undeclared meter `{meter}`")).on(id));
        }
    }

    fn guard(&mut self, id: &str, guard: &Guard) {
        match guard {
            Guard::FlagSet { flag } | Guard::FlagClear { flag } => self.require_flag(id, flag),
            Guard::ItemHeld { item } => self.require_item(id, item),
            Guard::Meter { meter, .. } => self.require_meter(id, meter),
        }
    }

    fn effect(&mut self, id: &str, effect: &Effect) {
        match effect {
            Effect::SetFlag { flag } | Effect::ClearFlag { flag } => self.require_flag(id, flag),
            Effect::GiveItem { item } | Effect::TakeItem { item } => self.require_item(id, item),
            Effect::MeterDelta { meter, .. } => self.require_meter(id, meter),
        }
    }

    fn minigame(&mut self, id: &str, game: &MiniGame) {
        for (code, msg) in minigame_problems(game) {
            self.push(Diagnostic::error(code, msg).on(id));
        }
        if let MiniGame::Biolink(p) = game {
            self.require_meter(id, &p.meter);
        }
    }

    /// Inventory is a multiset at runtime but the analyses track presence
    /// only. That is exact as long as an item that can be taken is never held
    /// twice, i.e. it has at most one `give` site and that site is not on a
    /// cycle.
    fn item_multiplicity(&mut self) {
        let mut gives: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut taken: BTreeSet<&str> = BTreeSet::new();
        for node in self.graph.nodes.values() {
            for e in node_effects(node) {
                match e {
                    Effect::GiveItem { item } => gives.entry(item).or_default().push(&node.id),
                    Effect::TakeItem { item } => {
                        taken.insert(item);
                    }
                    _ => {}
                }
            }
        }
        for item in taken {
            let sites = gives.get(item).map(Vec::as_slice).unwrap_or_default();
            let bad = sites.len() > 1 || sites.iter().any(|n| on_cycle(self.graph, n));
            if bad {
                self.push(
                    Diagnostic::error(
                        "item-multiplicity",
                        format!("item `{item}` is taken somewhere but could be given more than once"),
                    )
                    .on(item),
                );
            }
        }
    }
}

fn node_effects(node: &Node) -> Vec<&Effect> {
    match &node.body {
        NodeBody::Narration { effects, .. } => effects.iter().collect(),
        NodeBody::Choice { options, .. } => options.iter().flat_map(|o| o.effects.iter()).collect(),
        _ => Vec::new(),
    }
}

/// Whether `id` can reach itself through one or more edges.
fn on_cycle(graph: &StoryGraph, id: &str) -> bool {
    let Some(node) = graph.node(id) else { return false };
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<&str> = node.targets().into_iter().collect();
    while let Some(cur) = queue.pop_front() {
        if cur == id {
            return true;
        }
        if !seen.insert(cur) {
            continue;
        }
        if let Some(n) = graph.node(cur) {
            queue.extend(n.targets());
        }
    }
    false
}

/// Parameter-level invariants of a mini-game, as `(rule code, message)`.
/// Shared with the compiler so that source diagnostics use the same codes.
pub fn minigame_problems(game: &MiniGame) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    match game {
        MiniGame::Biolink(p) => {
            if p.grid.is_empty() {
                out.push(("biolink-grid-empty", "biolink grid has no rows".to_string()));
            }
            let width = p.width();
            if width == 0 || p.grid.iter().any(|r| r.chars().count() as u32 != width) {
                out.push(("biolink-grid-ragged", "biolink grid rows must all have the same nonzero length".to_string()));
            }
            if let Some(c) = p.grid.iter().flat_map(|r| r.chars()).find(|c| Tile::from_char(*c).is_none()) {
                out.push(("biolink-grid-tile", format!("unknown biolink tile `{c}` (expected one of . T # S)")));
            }
            let starts = p.grid.iter().flat_map(|r| r.chars()).filter(|c| *c == 'S').count();
            if starts != 1 {
                out.push(("biolink-start", format!("biolink grid needs exactly one `S`, found {starts}")));
            }
            let trash = p.grid.iter().flat_map(|r| r.chars()).filter(|c| *c == 'T').count();
            if trash < p.required_trash as usize {
                out.push((
                    "biolink-trash",
                    format!("biolink requires {} trash but the grid holds {trash}", p.required_trash),
                ));
            }
            if p.visibility < 1 {
                out.push(("biolink-visibility", "biolink visibility must be at least 1".to_string()));
            }
        }
        MiniGame::Scan(p) => {
            if p.width < 1 || p.height < 1 {
                out.push(("scan-size", "scan area needs width and height of at least 1".to_string()));
            }
            let inside = |c: &Cell| c.x < p.width && c.y < p.height;
            if !inside(&p.target) {
                out.push(("scan-bounds", format!("scan target {} is outside the area", p.target)));
            }
            if let Some(d) = p.decoys.iter().find(|d| !inside(d)) {
                out.push(("scan-bounds", format!("scan decoy {d} is outside the area")));
            }
            if p.decoys.contains(&p.target) {
                out.push(("scan-target-decoy", "scan target is also listed as a decoy".to_string()));
            }
            if p.budget == Some(0) {
                out.push(("scan-budget", "scan budget must be at least 1".to_string()));
            }
        }
        MiniGame::Coord(p) => {
            let norm = normalize_coord(&p.expected);
            if norm.is_empty() {
                out.push(("coord-expected", "expected coordinate is empty".to_string()));
            } else if let Some(c) = norm.chars().find(|c| *c != ' ' && !is_keypad_symbol(*c)) {
                out.push(("coord-expected", format!("expected coordinate uses `{c}`, which the keypad cannot type")));
            }
            if p.max_attempts == Some(0) {
                out.push(("coord-attempts", "max attempts must be at least 1".to_string()));
            }
        }
        MiniGame::Sequence(p) => {
            if p.steps.is_empty() {
                out.push(("sequence-empty", "sequence needs at least one step".to_string()));
            }
            if let Some(s) = p.steps.iter().find(|s| !is_identifier(&s.id)) {
                out.push(("sequence-step-id", format!("step id `{}` is not an identifier", s.id)));
            }
        }
    }
    out
}
