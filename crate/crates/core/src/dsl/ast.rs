//! Syntax tree of a `.story` file. Names are unresolved here; see
//! [`super::check`].

use crate::diag::SourceSpan;
use crate::model::{EndingKind, Guard, Effect, MiniGameKind};

/// A value with the source span it came from.
///
/// Equality ignores the span, so two trees parsed from differently laid out
/// but equivalent sources compare equal.
#[derive(Debug, Clone)]
pub struct Spanned<T> {
    pub value: T,
    pub span: SourceSpan,
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: SourceSpan) -> Self {
        Self { value, span }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T: Eq> Eq for Spanned<T> {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ast {
    pub title: Spanned<String>,
    pub start: Spanned<String>,
    pub decls: Vec<Decl>,
    pub nodes: Vec<NodeDef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Meter { name: Spanned<String>, min: Spanned<i64>, max: Spanned<i64>, init: Spanned<i64> },
    Item { name: Spanned<String>, label: Option<Spanned<String>> },
    Flag { name: Spanned<String> },
}

impl Decl {
    pub fn name(&self) -> &Spanned<String> {
        match self {
            Decl::Meter { name, .. } | Decl::Item { name, .. } | Decl::Flag { name } => name,
        }
    }

    pub fn namespace(&self) -> &'static str {
        match self {
            Decl::Meter { .. } => "meter",
            Decl::Item { .. } => "item",
            Decl::Flag { .. } => "flag",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKindAst {
    Narration,
    Choice,
    MiniGame(MiniGameKind),
    Ending(EndingKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeDef {
    pub id: Spanned<String>,
    pub kind: Spanned<NodeKindAst>,
    /// Raw channel keyword; validity is checked later.
    pub channel: Option<Spanned<String>>,
    pub body: BodyAst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BodyAst {
    Narration { pages: Vec<Spanned<String>>, next: Spanned<String>, effects: Vec<Spanned<Effect>> },
    Choice { prompt: Spanned<String>, options: Vec<OptionAst> },
    MiniGame { params: Vec<Param>, success: Spanned<String>, failure: Spanned<String> },
    Ending { text: Spanned<String> },
}

/// Guards and effects are spanned by the name they reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionAst {
    pub label: Spanned<String>,
    pub guards: Vec<Spanned<Guard>>,
    pub target: Spanned<String>,
    pub effects: Vec<Spanned<Effect>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub key: Spanned<String>,
    pub value: Spanned<ParamValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamValue {
    Str(String),
    Int(i64),
    Ident(String),
}

impl ParamValue {
    pub fn type_name(&self) -> &'static str {
        match self {
            ParamValue::Str(_) => "string",
            ParamValue::Int(_) => "integer",
            ParamValue::Ident(_) => "identifier",
        }
    }
}
