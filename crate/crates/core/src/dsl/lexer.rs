use std::sync::Arc;

use crate::diag::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifiers and keywords alike; keywords are recognized by the parser.
    Ident(String),
    Str(String),
    Int(i64),
    LBrace,
    RBrace,
    Arrow,
    Bang,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Plus,
    Minus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::Int(n) => format!("integer {n}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Splits `source` into tokens. Always ends with an [`Tok::Eof`] token;
/// malformed input produces diagnostics and is skipped.
pub fn lex(file: &Arc<str>, source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lx = Lexer { file: file.clone(), chars: source.chars().collect(), pos: 0, line: 1, col: 1, tokens: vec![], diags: vec![] };
    lx.run();
    (lx.tokens, lx.diags)
}

struct Lexer {
    file: Arc<str>,
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    tokens: Vec<Token>,
    diags: Vec<Diagnostic>,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self, line: u32, col: u32, len: u32) -> SourceSpan {
        SourceSpan::new(self.file.clone(), line, col, len)
    }

    fn push(&mut self, tok: Tok, line: u32, col: u32, len: usize) {
        let span = self.span(line, col, len as u32);
        self.tokens.push(Token { tok, span });
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let (line, col, start) = (self.line, self.col, self.pos);
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '"' => self.string(line, col),
                c if c.is_ascii_alphabetic() => {
                    while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '-') {
                        self.bump();
                    }
                    let text: String = self.chars[start..self.pos].iter().collect();
                    let len = self.pos - start;
                    self.push(Tok::Ident(text), line, col, len);
                }
                c if c.is_ascii_digit() => {
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.bump();
                    }
                    let text: String = self.chars[start..self.pos].iter().collect();
                    let len = self.pos - start;
                    match text.parse::<i64>() {
                        Ok(n) => self.push(Tok::Int(n), line, col, len),
                        Err(_) => self.diags.push(
                            Diagnostic::error("lex-int-overflow", format!("integer `{text}` is too large"))
                                .at(self.span(line, col, len as u32)),
                        ),
                    }
                }
                '-' if self.peek2() == Some('>') => {
                    self.bump();
                    self.bump();
                    self.push(Tok::Arrow, line, col, 2);
                }
                '<' | '>' if self.peek2() == Some('=') => {
                    self.bump();
                    self.bump();
                    self.push(if c == '<' { Tok::Le } else { Tok::Ge }, line, col, 2);
                }
                _ => {
                    self.bump();
                    let tok = match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '!' => Tok::Bang,
                        '<' => Tok::Lt,
                        '>' => Tok::Gt,
                        '=' => Tok::Eq,
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        other => {
                            self.diags.push(
                                Diagnostic::error("lex-unexpected-char", format!("unexpected character {other:?}"))
                                    .at(self.span(line, col, 1)),
                            );
                            continue;
                        }
                    };
                    self.push(tok, line, col, 1);
                }
            }
        }
        let (line, col) = (self.line, self.col);
        self.push(Tok::Eof, line, col, 0);
    }

    /// Double-quoted, single-line, with `\"` and `\\` as the only escapes.
    fn string(&mut self, line: u32, col: u32) {
        let start = self.pos;
        self.bump();
        let mut value = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.diags.push(
                        Diagnostic::error("lex-unterminated-string", "string is not closed before the end of the line")
                            .at(self.span(line, col, 1)),
                    );
                    // keep the partial string so the parser does not cascade
                    let len = self.pos - start;
                    self.push(Tok::Str(value), line, col, len);
                    return;
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    let (el, ec) = (self.line, self.col);
                    self.bump();
                    match self.peek() {
                        Some(c @ ('"' | '\\')) => {
                            self.bump();
                            value.push(c);
                        }
                        other => {
                            let shown = other.map_or_else(|| "end of input".to_string(), |c| format!("{c:?}"));
                            self.diags.push(
                                Diagnostic::error("lex-bad-escape", format!("unsupported escape before {shown}"))
                                    .at(self.span(el, ec, 1)),
                            );
                        }
                    }
                }
                Some(c) => {
                    self.bump();
                    value.push(c);
                }
            }
        }
        let len = self.pos - start;
        self.push(Tok::Str(value), line, col, len);
    }
}
