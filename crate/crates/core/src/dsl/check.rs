use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use crate::compile::params::lower_params;
use crate::diag::{Diagnostic, SourceSpan};
use crate::model::{Channel, Effect, Guard, MiniGameKind};

/// Resolves names and checks semantic rules on a parsed story.
///
/// Returns errors for unresolved targets and names, duplicate ids and
/// declarations, bad channel keywords and ill-typed mini-game parameters,
/// plus warnings for nodes no edge leads to. Ordered by source position.
pub fn check(ast: &Ast) -> Vec<Diagnostic> {
    let mut c = Checker::default();
    c.declarations(ast);
    c.node_ids(ast);
    if !c.nodes.contains_key(ast.start.value.as_str()) {
        c.diags.push(
            Diagnostic::error("unknown-start", format!("unknown start node `{}`", ast.start.value)).at(ast.start.span.clone()),
        );
    }
    if !ast.nodes.iter().any(|n| matches!(n.kind.value, NodeKindAst::Ending(_))) {
        c.diags.push(Diagnostic::error("no-ending", "story has no ending node").at(ast.title.span.clone()));
    }
    for node in &ast.nodes {
        c.node(node);
    }
    c.syntactic_reachability(ast);
    c.diags.sort_by_key(|d| d.span.as_ref().map(|s| (s.line, s.column)));
    c.diags
}

#[derive(Default)]
struct Checker<'a> {
    meters: BTreeSet<&'a str>,
    items: BTreeSet<&'a str>,
    flags: BTreeSet<&'a str>,
    nodes: BTreeMap<&'a str, &'a NodeDef>,
    diags: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn declarations(&mut self, ast: &'a Ast) {
        for d in &ast.decls {
            let name = d.name();
            let table = match d {
                Decl::Meter { .. } => &mut self.meters,
                Decl::Item { .. } => &mut self.items,
                Decl::Flag { .. } => &mut self.flags,
            };
            if !table.insert(name.value.as_str()) {
                self.diags.push(
                    Diagnostic::error("duplicate-decl", format!("{} `{}` declared more than once", d.namespace(), name.value))
                        .at(name.span.clone()),
                );
            }
            if let Decl::Meter { min, max, init, .. } = d {
                if max.value <= min.value || init.value < min.value || init.value > max.value {
                    self.diags.push(
                        Diagnostic::error("meter-range", format!("meter `{}` needs min < max and min <= init <= max", name.value))
                            .at(name.span.clone()),
                    );
                }
            }
        }
    }

    fn node_ids(&mut self, ast: &'a Ast) {
        for n in &ast.nodes {
            if self.nodes.contains_key(n.id.value.as_str()) {
                self.diags.push(
                    Diagnostic::error("duplicate-node-id", format!("node `{}` is already defined", n.id.value)).at(n.id.span.clone()),
                );
            } else {
                self.nodes.insert(&n.id.value, n);
            }
        }
    }

    fn target(&mut self, t: &Spanned<String>) {
        if !self.nodes.contains_key(t.value.as_str()) {
            self.diags.push(Diagnostic::error("unknown-target", format!("no node named `{}`", t.value)).at(t.span.clone()));
        }
    }

    fn name(&mut self, ns: &str, name: &str, span: &SourceSpan) {
        let (table, code) = match ns {
            "flag" => (&self.flags, "unknown-flag"),
            "item" => (&self.items, "unknown-item"),
            _ => (&self.meters, "unknown-meter"),
        };
        if !table.contains(name) {
            self.diags.push(Diagnostic::error(code, format!("undeclared {ns} `{name}`")).at(span.clone()));
        }
    }

    fn guard(&mut self, g: &Spanned<Guard>) {
        match &g.value {
            Guard::FlagSet { flag } | Guard::FlagClear { flag } => self.name("flag", flag, &g.span),
            Guard::ItemHeld { item } => self.name("item", item, &g.span),
            Guard::Meter { meter, .. } => self.name("meter", meter, &g.span),
        }
    }

    fn effect(&mut self, e: &Spanned<Effect>) {
        match &e.value {
            Effect::SetFlag { flag } | Effect::ClearFlag { flag } => self.name("flag", flag, &e.span),
            Effect::GiveItem { item } | Effect::TakeItem { item } => self.name("item", item, &e.span),
            Effect::MeterDelta { meter, .. } => self.name("meter", meter, &e.span),
        }
    }

    fn node(&mut self, node: &NodeDef) {
        if let Some(ch) = &node.channel {
            if Channel::parse(&ch.value).is_none() {
                self.diags.push(
                    Diagnostic::error("bad-channel", format!("`{}` is not a channel (touch, handset, any)", ch.value))
                        .at(ch.span.clone()),
                );
            }
        }
        match &node.body {
            BodyAst::Narration { next, effects, .. } => {
                self.target(next);
                effects.iter().for_each(|e| self.effect(e));
            }
            BodyAst::Choice { options, .. } => {
                for o in options {
                    o.guards.iter().for_each(|g| self.guard(g));
                    self.target(&o.target);
                    o.effects.iter().for_each(|e| self.effect(e));
                }
            }
            BodyAst::MiniGame { params, success, failure } => {
                let NodeKindAst::MiniGame(kind) = node.kind.value else { return };
                if let Err(mut d) = lower_params(kind, params, &node.kind.span) {
                    self.diags.append(&mut d);
                }
                if kind == MiniGameKind::Biolink {
                    for p in params.iter().filter(|p| p.key.value == "meter") {
                        if let ParamValue::Ident(m) = &p.value.value {
                            self.name("meter", m, &p.value.span);
                        }
                    }
                }
                self.target(success);
                self.target(failure);
            }
            BodyAst::Ending { .. } => {}
        }
    }

    /// Warnings for nodes nothing points at, and for sequence failure
    /// targets that only a sequence failure (which cannot happen) reaches.
    fn syntactic_reachability(&mut self, ast: &Ast) {
        let mut incoming: BTreeSet<&str> = BTreeSet::new();
        let mut via_sequence_failure: Vec<(&str, &Spanned<String>)> = Vec::new();
        for n in &ast.nodes {
            let id = n.id.value.as_str();
            let targets: Vec<&Spanned<String>> = match &n.body {
                BodyAst::Narration { next, .. } => vec![next],
                BodyAst::Choice { options, .. } => options.iter().map(|o| &o.target).collect(),
                BodyAst::MiniGame { success, failure, .. } => {
                    if matches!(n.kind.value, NodeKindAst::MiniGame(MiniGameKind::Sequence)) {
                        via_sequence_failure.push((id, failure));
                        vec![success]
                    } else {
                        vec![success, failure]
                    }
                }
                BodyAst::Ending { .. } => vec![],
            };
            for t in targets {
                if t.value != id {
                    incoming.insert(t.value.as_str());
                }
            }
        }
        let start = ast.start.value.as_str();
        for (from, failure) in &via_sequence_failure {
            let target = failure.value.as_str();
            if target != start && !incoming.contains(target) && self.nodes.contains_key(target) {
                self.diags.push(
                    Diagnostic::warning(
                        "sequence-failure-unreachable",
                        format!("sequence `{from}` never fails, so nothing else leads to `{target}`"),
                    )
                    .at(failure.span.clone()),
                );
            }
        }
        for (from, failure) in via_sequence_failure {
            if failure.value != from {
                incoming.insert(failure.value.as_str());
            }
        }
        for n in &ast.nodes {
            let id = n.id.value.as_str();
            if id != start && !incoming.contains(id) {
                self.diags.push(
                    Diagnostic::warning("unreachable-by-syntax", format!("no edge leads to node `{id}`")).at(n.id.span.clone()),
                );
            }
        }
    }
}
