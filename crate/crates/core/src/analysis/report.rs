use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use super::{dead_nodes_with, exact_reachable_with, overapprox_reachable, trace_to_with, AnalysisError, Trace};
use crate::model::{NodeBody, StoryGraph};

/// Whole-story analysis summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub reachable: Vec<String>,
    pub dead: Vec<String>,
    /// Ending id → `reachable` or `unreachable`.
    pub endings: BTreeMap<String, String>,
    /// Witness trace per ending; `null` when no concrete play gets there.
    pub traces: BTreeMap<String, Option<Trace>>,
}

impl Report {
    pub fn build(graph: &StoryGraph, budget: usize) -> Result<Report, AnalysisError> {
        let reach = exact_reachable_with(graph, budget)?;
        let dead = dead_nodes_with(graph, budget)?;
        let mut endings = BTreeMap::new();
        let mut traces = BTreeMap::new();
        for id in graph.endings().into_keys() {
            let ok = reach.contains(id);
            endings.insert(id.to_string(), if ok { "reachable" } else { "unreachable" }.to_string());
            let trace = match trace_to_with(graph, id, budget) {
                Ok(t) => Some(t),
                Err(AnalysisError::Unreachable(_)) => None,
                Err(e) => return Err(e),
            };
            traces.insert(id.to_string(), trace);
        }
        Ok(Report { reachable: reach.into_iter().collect(), dead: dead.into_iter().collect(), endings, traces })
    }

    /// Clean means every ending is reachable and nothing is dead.
    pub fn is_clean(&self) -> bool {
        self.dead.is_empty() && self.endings.values().all(|v| v == "reachable")
    }

    pub fn to_json(&self) -> String {
        crate::json::to_canonical_compact(self).expect("report serializes")
    }

    pub fn to_table(&self, graph: &StoryGraph) -> String {
        let mut out = String::new();
        writeln!(out, "{}", graph.title).unwrap();
        writeln!(out, "reachable {} / {} nodes", self.reachable.len(), graph.nodes.len()).unwrap();
        let dead = if self.dead.is_empty() { "none".to_string() } else { self.dead.join(", ") };
        writeln!(out, "dead      {dead}").unwrap();
        writeln!(out).unwrap();
        let width = self.endings.keys().map(|k| k.len()).max().unwrap_or(0).max(6);
        writeln!(out, "{:<width$}  {:<4}  {:<11}  trace", "ending", "kind", "status").unwrap();
        let kinds = graph.endings();
        for (id, status) in &self.endings {
            let trace = match &self.traces[id] {
                Some(t) => format!("{} events", t.len()),
                None => "-".into(),
            };
            writeln!(out, "{id:<width$}  {:<4}  {status:<11}  {trace}", kinds[id.as_str()].as_str()).unwrap();
        }
        out
    }
}

/// Graphviz rendering of the story graph. Nodes outside the guard-blind
/// reachable set are drawn dashed.
pub fn to_dot(graph: &StoryGraph) -> String {
    let reach = overapprox_reachable(graph);
    let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
    let mut out = format!("digraph \"{}\" {{\n  rankdir=TB;\n", esc(&graph.title));
    for (id, node) in &graph.nodes {
        let shape = match &node.body {
            NodeBody::Narration { .. } => "box",
            NodeBody::Choice { .. } => "diamond",
            NodeBody::MiniGame { .. } => "hexagon",
            NodeBody::Ending { .. } => "doublecircle",
        };
        let style = if reach.contains(id) { "solid" } else { "dashed" };
        let label = match &node.body {
            NodeBody::MiniGame { game, .. } => format!("{id}\\n{}", game.kind().as_str()),
            _ => id.clone(),
        };
        writeln!(out, "  \"{}\" [shape={shape}, style={style}, label=\"{label}\"];", esc(id)).unwrap();
    }
    for (id, node) in &graph.nodes {
        match &node.body {
            NodeBody::Narration { next, .. } => writeln!(out, "  \"{}\" -> \"{}\";", esc(id), esc(next)).unwrap(),
            NodeBody::Choice { options, .. } => {
                for o in options {
                    writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\"];", esc(id), esc(&o.target), esc(&o.label)).unwrap();
                }
            }
            NodeBody::MiniGame { success, failure, .. } => {
                writeln!(out, "  \"{}\" -> \"{}\" [label=\"success\"];", esc(id), esc(success)).unwrap();
                writeln!(out, "  \"{}\" -> \"{}\" [label=\"failure\", style=dotted];", esc(id), esc(failure)).unwrap();
            }
            NodeBody::Ending { .. } => {}
        }
    }
    out.push_str("}\n");
    out
}
