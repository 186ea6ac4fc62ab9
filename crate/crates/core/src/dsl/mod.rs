//! The `.story` language: lexer, parser and name/semantic checks.
//!
//! ```text
//! story "Title" start A-1
//! meter freewill min 0 max 100 init 100
//! item usb "USB drive"
//! flag recover
//!
//! node A-1 narration { text "page one" text "page two" next A-2 }
//! node A-2 choice {
//!   prompt "What now?"
//!   option "leave it" -> END
//!   option "go back" if !flag recover -> A-1 set recover
//! }
//! node END ending sub { text "The end." }
//! ```

pub mod ast;
mod check;
mod lexer;
mod parser;
pub mod pretty;

pub use check::check;
pub use lexer::{lex, Tok, Token};
pub use parser::{parse, parse_named, MAX_ERRORS};
