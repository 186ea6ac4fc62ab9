use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::AnalysisError;
use crate::model::{Effect, Guard, NodeBody, StoryGraph};

/// Nodes reachable from start by following edges, ignoring guards.
pub fn overapprox_reachable(graph: &StoryGraph) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    if graph.node(&graph.start).is_some() {
        seen.insert(graph.start.clone());
        queue.push_back(graph.start.as_str());
    }
    while let Some(id) = queue.pop_front() {
        for t in graph.node(id).map(|n| n.targets()).unwrap_or_default() {
            if seen.insert(t.to_string()) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Flag and item presence bits. Flags come first, then items, in
/// declaration order.
struct Layout<'g> {
    bit: BTreeMap<(&'static str, &'g str), usize>,
    words: usize,
}

impl<'g> Layout<'g> {
    fn new(graph: &'g StoryGraph) -> Self {
        let mut bit = BTreeMap::new();
        for f in &graph.flags {
            let n = bit.len();
            bit.entry(("flag", f.as_str())).or_insert(n);
        }
        for i in &graph.items {
            let n = bit.len();
            bit.entry(("item", i.name.as_str())).or_insert(n);
        }
        let words = bit.len().div_ceil(64).max(1);
        Layout { bit, words }
    }

    fn get(&self, bits: &[u64], ns: &'static str, name: &str) -> bool {
        self.bit.get(&(ns, name)).is_some_and(|&b| bits[b / 64] >> (b % 64) & 1 == 1)
    }

    fn set(&self, bits: &mut [u64], ns: &'static str, name: &str, on: bool) {
        if let Some(&b) = self.bit.get(&(ns, name)) {
            if on {
                bits[b / 64] |= 1 << (b % 64);
            } else {
                bits[b / 64] &= !(1 << (b % 64));
            }
        }
    }

    fn guard(&self, bits: &[u64], g: &Guard) -> bool {
        match g {
            Guard::FlagSet { flag } => self.get(bits, "flag", flag),
            Guard::FlagClear { flag } => !self.get(bits, "flag", flag),
            Guard::ItemHeld { item } => self.get(bits, "item", item),
            Guard::Meter { .. } => true,
        }
    }

    fn effects(&self, bits: &[u64], effects: &[Effect]) -> Box<[u64]> {
        let mut out: Box<[u64]> = bits.into();
        for e in effects {
            match e {
                Effect::SetFlag { flag } => self.set(&mut out, "flag", flag, true),
                Effect::ClearFlag { flag } => self.set(&mut out, "flag", flag, false),
                Effect::GiveItem { item } => self.set(&mut out, "item", item, true),
                Effect::TakeItem { item } => self.set(&mut out, "item", item, false),
                Effect::MeterDelta { .. } => {}
            }
        }
        out
    }
}

/// Breadth-first search over (node, flags, held items). Meter guards count
/// as satisfied and every mini-game may end either way. Item counts are
/// reduced to presence, which validation keeps exact.
pub fn exact_reachable_with(graph: &StoryGraph, budget: usize) -> Result<BTreeSet<String>, AnalysisError> {
    let layout = Layout::new(graph);
    let mut seen: HashSet<(&str, Box<[u64]>)> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut nodes = BTreeSet::new();
    let Some(start) = graph.node(&graph.start) else { return Ok(nodes) };
    let init: Box<[u64]> = vec![0; layout.words].into();
    seen.insert((start.id.as_str(), init.clone()));
    queue.push_back((start.id.as_str(), init));
    while let Some((id, bits)) = queue.pop_front() {
        nodes.insert(id.to_string());
        let node = &graph.nodes[id];
        let succ: Vec<(&str, Box<[u64]>)> = match &node.body {
            NodeBody::Narration { next, effects, .. } => vec![(next.as_str(), layout.effects(&bits, effects))],
            NodeBody::Choice { options, .. } => options
                .iter()
                .filter(|o| o.guards.iter().all(|g| layout.guard(&bits, g)))
                .map(|o| (o.target.as_str(), layout.effects(&bits, &o.effects)))
                .collect(),
            NodeBody::MiniGame { success, failure, .. } => {
                vec![(success.as_str(), bits.clone()), (failure.as_str(), bits.clone())]
            }
            NodeBody::Ending { .. } => Vec::new(),
        };
        for (t, b) in succ {
            let Some(target) = graph.node(t) else { continue };
            let key = (target.id.as_str(), b);
            if !seen.contains(&key) {
                if seen.len() >= budget {
                    return Err(AnalysisError::StateBudgetExceeded(budget));
                }
                seen.insert(key.clone());
                queue.push_back(key);
            }
        }
    }
    Ok(nodes)
}

pub fn exact_reachable(graph: &StoryGraph) -> Result<BTreeSet<String>, AnalysisError> {
    exact_reachable_with(graph, super::DEFAULT_STATE_BUDGET)
}

/// Reachability of each ending node under [`exact_reachable`].
pub fn ending_coverage(graph: &StoryGraph) -> Result<BTreeMap<String, bool>, AnalysisError> {
    let reach = exact_reachable(graph)?;
    Ok(graph.endings().into_keys().map(|id| (id.to_string(), reach.contains(id))).collect())
}

pub fn ending_coverage_with(graph: &StoryGraph, budget: usize) -> Result<BTreeMap<String, bool>, AnalysisError> {
    let reach = exact_reachable_with(graph, budget)?;
    Ok(graph.endings().into_keys().map(|id| (id.to_string(), reach.contains(id))).collect())
}

/// Nodes no play can visit.
pub fn dead_nodes(graph: &StoryGraph) -> Result<BTreeSet<String>, AnalysisError> {
    dead_nodes_with(graph, super::DEFAULT_STATE_BUDGET)
}

pub fn dead_nodes_with(graph: &StoryGraph, budget: usize) -> Result<BTreeSet<String>, AnalysisError> {
    let reach = exact_reachable_with(graph, budget)?;
    Ok(graph.nodes.keys().filter(|id| !reach.contains(*id)).cloned().collect())
}
