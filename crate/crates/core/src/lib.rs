//! Branching-narrative engine: a small story DSL, a compiler to a canonical
//! story graph, a deterministic session runtime with channel-gated input and
//! mini-games, and static analyses over compiled graphs.
//!
//! The usual pipeline is [`compile::compile`] → [`runtime::Session::new`] →
//! [`runtime::Session::apply_event`], with [`analysis`] run over the same
//! [`model::StoryGraph`].

pub mod analysis;
pub mod assets;
pub mod compile;
pub mod diag;
pub mod dsl;
pub mod json;
pub mod model;
pub mod runtime;

pub use compile::{compile, Compiled};
pub use diag::{Diagnostic, Severity, SourceSpan};
pub use model::StoryGraph;
pub use runtime::{Event, Session};
