//! Source → [`StoryGraph`] pipeline: parse, check, lower, validate.

pub mod params;

use std::collections::BTreeMap;

use crate::diag::{has_errors, Diagnostic, SourceSpan};
use crate::dsl::ast::*;
use crate::dsl::{check, parse_named};
use crate::model::{
    self, Channel, ChoiceOption, EndingKind, ItemDef, MeterDef, Node, NodeBody, NodeKind, StoryGraph, FORMAT_VERSION,
};

/// A successfully compiled story and any warnings produced on the way.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub graph: StoryGraph,
    pub warnings: Vec<Diagnostic>,
}

/// Compiles story source. See [`compile_named`].
pub fn compile(source: &str) -> Result<Compiled, Vec<Diagnostic>> {
    compile_named("<input>", source)
}

/// Compiles story source, attributing diagnostics to `file`.
///
/// On success the graph always passes [`model::validate`]. On failure every
/// diagnostic from the failing stage is returned (warnings included).
pub fn compile_named(file: &str, source: &str) -> Result<Compiled, Vec<Diagnostic>> {
    let ast = parse_named(file, source)?;
    let diags = check(&ast);
    if has_errors(&diags) {
        return Err(diags);
    }
    let graph = lower(&ast);
    let problems = model::validate(&graph);
    if !problems.is_empty() {
        let mut out = diags;
        out.extend(problems.into_iter().map(|d| anchor(d, &ast)));
        return Err(out);
    }
    Ok(Compiled { graph, warnings: diags })
}

/// Points a graph-level finding at the node or declaration it names.
fn anchor(d: Diagnostic, ast: &Ast) -> Diagnostic {
    let span = d.subject.as_deref().and_then(|s| {
        ast.nodes
            .iter()
            .find(|n| n.id.value == s)
            .map(|n| n.id.span.clone())
            .or_else(|| ast.decls.iter().find(|x| x.name().value == s).map(|x| x.name().span.clone()))
    });
    let span: SourceSpan = span.unwrap_or_else(|| ast.title.span.clone());
    d.at(span)
}

/// Lowers a checked AST. Callers must have run [`check`] without errors.
pub fn lower(ast: &Ast) -> StoryGraph {
    let mut meters = Vec::new();
    let mut items = Vec::new();
    let mut flags = Vec::new();
    for d in &ast.decls {
        match d {
            Decl::Meter { name, min, max, init } => meters.push(MeterDef {
                name: name.value.clone(),
                min: min.value,
                max: max.value,
                init: init.value,
            }),
            Decl::Item { name, label } => {
                items.push(ItemDef { name: name.value.clone(), label: label.as_ref().map(|l| l.value.clone()) })
            }
            Decl::Flag { name } => flags.push(name.value.clone()),
        }
    }
    let nodes: BTreeMap<String, Node> = ast.nodes.iter().map(|n| (n.id.value.clone(), lower_node(n))).collect();
    StoryGraph {
        version: FORMAT_VERSION,
        title: ast.title.value.clone(),
        start: ast.start.value.clone(),
        meters,
        items,
        flags,
        nodes,
    }
}

fn values<T: Clone>(v: &[Spanned<T>]) -> Vec<T> {
    v.iter().map(|s| s.value.clone()).collect()
}

fn lower_node(n: &NodeDef) -> Node {
    let kind = match n.kind.value {
        NodeKindAst::Narration => NodeKind::Narration,
        NodeKindAst::Choice => NodeKind::Choice,
        NodeKindAst::MiniGame(k) => NodeKind::MiniGame(k),
        NodeKindAst::Ending(e) => NodeKind::Ending(e),
    };
    let channel = n
        .channel
        .as_ref()
        .and_then(|c| Channel::parse(&c.value))
        .unwrap_or_else(|| kind.default_channel());
    let body = match &n.body {
        BodyAst::Narration { pages, next, effects } => NodeBody::Narration {
            pages: values(pages),
            next: next.value.clone(),
            effects: values(effects),
        },
        BodyAst::Choice { prompt, options } => NodeBody::Choice {
            prompt: prompt.value.clone(),
            options: options
                .iter()
                .map(|o| ChoiceOption {
                    label: o.label.value.clone(),
                    guards: values(&o.guards),
                    target: o.target.value.clone(),
                    effects: values(&o.effects),
                })
                .collect(),
        },
        BodyAst::MiniGame { params, success, failure } => {
            let NodeKind::MiniGame(k) = kind else { unreachable!("body follows kind") };
            let (prompt, game) = params::lower_params(k, params, &n.kind.span).expect("checked before lowering");
            NodeBody::MiniGame { prompt, game, success: success.value.clone(), failure: failure.value.clone() }
        }
        BodyAst::Ending { text } => NodeBody::Ending {
            ending: match kind {
                NodeKind::Ending(e) => e,
                _ => EndingKind::Sub,
            },
            text: text.value.clone(),
        },
    };
    Node { id: n.id.value.clone(), channel, body }
}
