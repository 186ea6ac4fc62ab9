//! Prints an [`Ast`] back as story source. Parsing the output yields the
//! same AST up to spans.

use std::fmt::Write;

use super::ast::*;
use crate::model::{Effect, EndingKind, Guard};

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn guard(g: &Guard) -> String {
    match g {
        Guard::FlagSet { flag } => format!("if flag {flag}"),
        Guard::FlagClear { flag } => format!("if !flag {flag}"),
        Guard::ItemHeld { item } => format!("if item {item}"),
        Guard::Meter { meter, cmp, value } => format!("if meter {meter} {} {value}", cmp.as_str()),
    }
}

fn effect(e: &Effect) -> String {
    match e {
        Effect::SetFlag { flag } => format!("set {flag}"),
        Effect::ClearFlag { flag } => format!("clear {flag}"),
        Effect::GiveItem { item } => format!("give {item}"),
        Effect::TakeItem { item } => format!("take {item}"),
        Effect::MeterDelta { meter, delta } if *delta < 0 => format!("meter {meter} - {}", delta.unsigned_abs()),
        Effect::MeterDelta { meter, delta } => format!("meter {meter} + {delta}"),
    }
}

pub fn print(ast: &Ast) -> String {
    let mut out = String::new();
    writeln!(out, "story {} start {}", quote(&ast.title.value), ast.start.value).unwrap();
    for d in &ast.decls {
        match d {
            Decl::Meter { name, min, max, init } => {
                writeln!(out, "meter {} min {} max {} init {}", name.value, min.value, max.value, init.value).unwrap()
            }
            Decl::Item { name, label } => match label {
                Some(l) => writeln!(out, "item {} {}", name.value, quote(&l.value)).unwrap(),
                None => writeln!(out, "item {}", name.value).unwrap(),
            },
            Decl::Flag { name } => writeln!(out, "flag {}", name.value).unwrap(),
        }
    }
    for n in &ast.nodes {
        let kind = match n.kind.value {
            NodeKindAst::Narration => "narration".to_string(),
            NodeKindAst::Choice => "choice".to_string(),
            NodeKindAst::MiniGame(k) => format!("minigame {}", k.as_str()),
            NodeKindAst::Ending(EndingKind::Main) => "ending main".to_string(),
            NodeKindAst::Ending(EndingKind::Sub) => "ending sub".to_string(),
        };
        write!(out, "\nnode {} {kind}", n.id.value).unwrap();
        if let Some(ch) = &n.channel {
            write!(out, " channel {}", ch.value).unwrap();
        }
        out.push_str(" {\n");
        match &n.body {
            BodyAst::Narration { pages, next, effects } => {
                for p in pages {
                    writeln!(out, "  text {}", quote(&p.value)).unwrap();
                }
                write!(out, "  next {}", next.value).unwrap();
                for e in effects {
                    write!(out, " {}", effect(&e.value)).unwrap();
                }
                out.push('\n');
            }
            BodyAst::Choice { prompt, options } => {
                writeln!(out, "  prompt {}", quote(&prompt.value)).unwrap();
                for o in options {
                    write!(out, "  option {}", quote(&o.label.value)).unwrap();
                    for g in &o.guards {
                        write!(out, " {}", guard(&g.value)).unwrap();
                    }
                    write!(out, " -> {}", o.target.value).unwrap();
                    for e in &o.effects {
                        write!(out, " {}", effect(&e.value)).unwrap();
                    }
                    out.push('\n');
                }
            }
            BodyAst::MiniGame { params, success, failure } => {
                out.push_str("  params {\n");
                for p in params {
                    let v = match &p.value.value {
                        ParamValue::Str(s) => quote(s),
                        ParamValue::Int(i) => i.to_string(),
                        ParamValue::Ident(s) => s.clone(),
                    };
                    writeln!(out, "    {} {v}", p.key.value).unwrap();
                }
                writeln!(out, "  }}\n  success -> {}\n  failure -> {}", success.value, failure.value).unwrap();
            }
            BodyAst::Ending { text } => writeln!(out, "  text {}", quote(&text.value)).unwrap(),
        }
        out.push_str("}\n");
    }
    out
}
