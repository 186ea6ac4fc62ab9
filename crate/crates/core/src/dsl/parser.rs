use std::sync::Arc;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use crate::diag::{Diagnostic, SourceSpan};
use crate::model::{Cmp, Effect, EndingKind, Guard, MiniGameKind};

/// Maximum number of errors reported for one file.
pub const MAX_ERRORS: usize = 20;

/// Parses a `.story` source. See [`parse_named`].
pub fn parse(source: &str) -> Result<Ast, Vec<Diagnostic>> {
    parse_named("<input>", source)
}

/// Parses a `.story` source, attributing spans to `file`.
///
/// Never panics. On failure returns at least one error, ordered by position
/// and capped at [`MAX_ERRORS`]; the parser resynchronizes at each `node`
/// keyword so later nodes are still checked.
pub fn parse_named(file: &str, source: &str) -> Result<Ast, Vec<Diagnostic>> {
    let file: Arc<str> = Arc::from(file);
    let (tokens, mut diags) = lex(&file, source);
    let mut p = Parser { tokens, pos: 0, diags: Vec::new() };
    let ast = p.story();
    diags.append(&mut p.diags);
    if diags.is_empty() {
        if let Some(ast) = ast {
            return Ok(ast);
        }
        diags.push(Diagnostic::error("parse-incomplete", "source is not a complete story").at(p.eof_span()));
    }
    diags.sort_by_key(|d| d.span.as_ref().map(|s| (s.line, s.column)));
    diags.truncate(MAX_ERRORS);
    Err(diags)
}

/// Marker for "a diagnostic has been recorded".
struct Reported;

type PResult<T> = Result<T, Reported>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

const EFFECT_KEYWORDS: [&str; 5] = ["set", "clear", "give", "take", "meter"];
const DECL_KEYWORDS: [&str; 3] = ["meter", "item", "flag"];

impl Parser {
    fn peek(&self) -> &Token {
        // lex always appends Eof, and bump never moves past it
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eof_span(&self) -> SourceSpan {
        self.tokens.last().expect("eof token").span.clone()
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn at_any_kw(&self, kws: &[&str]) -> bool {
        kws.iter().any(|k| self.at_kw(k))
    }

    fn too_many(&self) -> bool {
        self.diags.len() >= MAX_ERRORS
    }

    fn error_here(&mut self, expected: &str) -> Reported {
        let t = self.peek().clone();
        self.diags.push(
            Diagnostic::error("parse-expected", format!("expected {expected}, found {}", t.tok.describe())).at(t.span),
        );
        Reported
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.error_here(&format!("`{kw}`")))
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            Err(self.error_here(&tok.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Spanned<String>> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok(Spanned::new(s, self.bump().span))
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn string(&mut self, what: &str) -> PResult<Spanned<String>> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                Ok(Spanned::new(s, self.bump().span))
            }
            _ => Err(self.error_here(what)),
        }
    }

    /// INT with an optional leading `-`.
    fn int(&mut self, what: &str) -> PResult<Spanned<i64>> {
        let negative = self.peek().tok == Tok::Minus;
        let sign_span = negative.then(|| self.bump().span);
        match self.peek().tok {
            Tok::Int(n) => {
                let t = self.bump();
                let span = match sign_span {
                    Some(s) => SourceSpan::new(s.file, s.line, s.column, t.span.length + 1),
                    None => t.span,
                };
                Ok(Spanned::new(if negative { -n } else { n }, span))
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn sync_to(&mut self, kws: &[&str]) {
        while !self.at_eof() && !self.at_any_kw(kws) {
            self.bump();
        }
    }

    fn story(&mut self) -> Option<Ast> {
        let header = self.header();
        if header.is_err() {
            self.sync_to(&["node", "meter", "item", "flag"]);
        }
        let mut decls = Vec::new();
        while self.at_any_kw(&DECL_KEYWORDS) && !self.too_many() {
            match self.decl() {
                Ok(d) => decls.push(d),
                Err(Reported) => self.sync_to(&["node", "meter", "item", "flag"]),
            }
        }
        let mut nodes = Vec::new();
        while !self.at_eof() && !self.too_many() {
            if !self.at_kw("node") {
                self.error_here("`node`");
                self.bump();
                self.sync_to(&["node"]);
                continue;
            }
            match self.node() {
                Ok(n) => nodes.push(n),
                Err(Reported) => self.sync_to(&["node"]),
            }
        }
        if nodes.is_empty() && self.diags.is_empty() {
            self.error_here("at least one `node`");
        }
        let (title, start) = header.ok()?;
        Some(Ast { title, start, decls, nodes })
    }

    fn header(&mut self) -> PResult<(Spanned<String>, Spanned<String>)> {
        self.expect_kw("story")?;
        let title = self.string("story title string")?;
        self.expect_kw("start")?;
        let start = self.ident("start node id")?;
        Ok((title, start))
    }

    fn decl(&mut self) -> PResult<Decl> {
        let kw = self.ident("declaration")?;
        match kw.value.as_str() {
            "meter" => {
                let name = self.ident("meter name")?;
                self.expect_kw("min")?;
                let min = self.int("integer")?;
                self.expect_kw("max")?;
                let max = self.int("integer")?;
                self.expect_kw("init")?;
                let init = self.int("integer")?;
                Ok(Decl::Meter { name, min, max, init })
            }
            "item" => {
                let name = self.ident("item name")?;
                let label = match self.peek().tok {
                    Tok::Str(_) => Some(self.string("label")?),
                    _ => None,
                };
                Ok(Decl::Item { name, label })
            }
            _ => {
                let name = self.ident("flag name")?;
                Ok(Decl::Flag { name })
            }
        }
    }

    fn node(&mut self) -> PResult<NodeDef> {
        self.expect_kw("node")?;
        let id = self.ident("node id")?;
        let kind_tok = self.ident("node kind (narration, choice, minigame, ending)")?;
        let kind = match kind_tok.value.as_str() {
            "narration" => NodeKindAst::Narration,
            "choice" => NodeKindAst::Choice,
            "minigame" => {
                let mg = self.ident("mini-game kind (biolink, scan, coord, sequence)")?;
                match MiniGameKind::parse(&mg.value) {
                    Some(k) => NodeKindAst::MiniGame(k),
                    None => return Err(self.report_at(&mg.span, "mini-game kind (biolink, scan, coord, sequence)", &mg.value)),
                }
            }
            "ending" => {
                let e = self.ident("ending kind (main, sub)")?;
                match e.value.as_str() {
                    "main" => NodeKindAst::Ending(EndingKind::Main),
                    "sub" => NodeKindAst::Ending(EndingKind::Sub),
                    _ => return Err(self.report_at(&e.span, "ending kind (main, sub)", &e.value)),
                }
            }
            other => {
                let other = other.to_string();
                return Err(self.report_at(&kind_tok.span, "node kind (narration, choice, minigame, ending)", &other));
            }
        };
        let kind = Spanned::new(kind, kind_tok.span);
        let channel = if self.at_kw("channel") {
            self.bump();
            Some(self.ident("channel (touch, handset, any)")?)
        } else {
            None
        };
        self.expect(Tok::LBrace)?;
        let body = match kind.value {
            NodeKindAst::Narration => self.narration()?,
            NodeKindAst::Choice => self.choice(&id)?,
            NodeKindAst::MiniGame(_) => self.minigame()?,
            NodeKindAst::Ending(_) => {
                self.expect_kw("text")?;
                BodyAst::Ending { text: self.string("ending text string")? }
            }
        };
        self.expect(Tok::RBrace)?;
        Ok(NodeDef { id, kind, channel, body })
    }

    fn report_at(&mut self, span: &SourceSpan, expected: &str, found: &str) -> Reported {
        self.diags
            .push(Diagnostic::error("parse-expected", format!("expected {expected}, found `{found}`")).at(span.clone()));
        Reported
    }

    fn narration(&mut self) -> PResult<BodyAst> {
        let mut pages = Vec::new();
        self.expect_kw("text")?;
        pages.push(self.string("page text string")?);
        while self.at_kw("text") {
            self.bump();
            pages.push(self.string("page text string")?);
        }
        self.expect_kw("next")?;
        let next = self.ident("next node id")?;
        let effects = self.effects()?;
        Ok(BodyAst::Narration { pages, next, effects })
    }

    fn choice(&mut self, id: &Spanned<String>) -> PResult<BodyAst> {
        self.expect_kw("prompt")?;
        let prompt = self.string("prompt string")?;
        let mut options = Vec::new();
        while self.at_kw("option") {
            options.push(self.option()?);
        }
        if options.len() < 2 {
            if options.is_empty() && !self.at_kw("option") && self.peek().tok != Tok::RBrace {
                return Err(self.error_here("`option`"));
            }
            self.diags.push(Diagnostic::error("choice-options", "choice requires ≥ 2 options").at(id.span.clone()));
            return Err(Reported);
        }
        Ok(BodyAst::Choice { prompt, options })
    }

    fn option(&mut self) -> PResult<OptionAst> {
        self.expect_kw("option")?;
        let label = self.string("option label string")?;
        let mut guards = Vec::new();
        while self.at_kw("if") {
            guards.push(self.guard()?);
        }
        self.expect(Tok::Arrow)?;
        let target = self.ident("target node id")?;
        let effects = self.effects()?;
        Ok(OptionAst { label, guards, target, effects })
    }

    fn guard(&mut self) -> PResult<Spanned<Guard>> {
        self.expect_kw("if")?;
        if self.peek().tok == Tok::Bang {
            self.bump();
            self.expect_kw("flag")?;
            let name = self.ident("flag name")?;
            return Ok(Spanned::new(Guard::FlagClear { flag: name.value }, name.span));
        }
        let kw = self.ident("`flag`, `item`, `meter` or `!`")?;
        match kw.value.as_str() {
            "flag" => {
                let name = self.ident("flag name")?;
                Ok(Spanned::new(Guard::FlagSet { flag: name.value }, name.span))
            }
            "item" => {
                let name = self.ident("item name")?;
                Ok(Spanned::new(Guard::ItemHeld { item: name.value }, name.span))
            }
            "meter" => {
                let name = self.ident("meter name")?;
                let cmp = match self.peek().tok {
                    Tok::Lt => Cmp::Lt,
                    Tok::Le => Cmp::Le,
                    Tok::Eq => Cmp::Eq,
                    Tok::Ge => Cmp::Ge,
                    Tok::Gt => Cmp::Gt,
                    _ => return Err(self.error_here("comparison (<, <=, =, >=, >)")),
                };
                self.bump();
                let value = self.int("integer")?;
                Ok(Spanned::new(Guard::Meter { meter: name.value, cmp, value: value.value }, name.span))
            }
            other => {
                let other = other.to_string();
                Err(self.report_at(&kw.span, "`flag`, `item`, `meter` or `!`", &other))
            }
        }
    }

    fn effects(&mut self) -> PResult<Vec<Spanned<Effect>>> {
        let mut out = Vec::new();
        while self.at_any_kw(&EFFECT_KEYWORDS) {
            let kw = self.bump();
            let Tok::Ident(kw) = kw.tok else { unreachable!("checked by at_any_kw") };
            let name = self.ident("name")?;
            let effect = match kw.as_str() {
                "set" => Effect::SetFlag { flag: name.value },
                "clear" => Effect::ClearFlag { flag: name.value },
                "give" => Effect::GiveItem { item: name.value },
                "take" => Effect::TakeItem { item: name.value },
                _ => {
                    let sign = match self.peek().tok {
                        Tok::Plus => 1,
                        Tok::Minus => -1,
                        _ => return Err(self.error_here("`+` or `-`")),
                    };
                    self.bump();
                    let amount = match self.peek().tok {
                        Tok::Int(n) => {
                            self.bump();
                            n
                        }
                        _ => return Err(self.error_here("integer")),
                    };
                    Effect::MeterDelta { meter: name.value, delta: sign * amount }
                }
            };
            out.push(Spanned::new(effect, name.span));
        }
        Ok(out)
    }

    fn minigame(&mut self) -> PResult<BodyAst> {
        self.expect_kw("params")?;
        self.expect(Tok::LBrace)?;
        let mut params = Vec::new();
        while self.peek().tok != Tok::RBrace {
            let key = self.ident("parameter name or `}`")?;
            let value = match self.peek().tok.clone() {
                Tok::Str(s) => Spanned::new(ParamValue::Str(s), self.bump().span),
                Tok::Ident(s) => Spanned::new(ParamValue::Ident(s), self.bump().span),
                Tok::Int(_) | Tok::Minus => {
                    let n = self.int("integer")?;
                    Spanned::new(ParamValue::Int(n.value), n.span)
                }
                _ => return Err(self.error_here("parameter value (string, integer or identifier)")),
            };
            params.push(Param { key, value });
        }
        self.bump();
        self.expect_kw("success")?;
        self.expect(Tok::Arrow)?;
        let success = self.ident("success node id")?;
        self.expect_kw("failure")?;
        self.expect(Tok::Arrow)?;
        let failure = self.ident("failure node id")?;
        Ok(BodyAst::MiniGame { params, success, failure })
    }
}
