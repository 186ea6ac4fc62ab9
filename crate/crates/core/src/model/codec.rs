use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{validate, StoryGraph, FORMAT_VERSION};
use crate::diag::Diagnostic;
use crate::json;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed graph: {0}")]
    MalformedInput(String),
    #[error("invalid graph ({} problem(s)): {}", .0.len(), .0.first().map(ToString::to_string).unwrap_or_default())]
    InvalidGraph(Vec<Diagnostic>),
    #[error("unsupported graph version {0}")]
    UnsupportedVersion(u64),
}

/// Canonical JSON bytes of `graph` without validating it first.
pub fn canonical_bytes(graph: &StoryGraph) -> Vec<u8> {
    json::to_canonical_pretty(graph)
        .expect("story graphs always serialize")
        .into_bytes()
}

/// Encodes a valid graph into its canonical `.storyc.json` form.
pub fn encode(graph: &StoryGraph) -> Result<Vec<u8>, ModelError> {
    let diags = validate(graph);
    if !diags.is_empty() {
        return Err(ModelError::InvalidGraph(diags));
    }
    Ok(canonical_bytes(graph))
}

/// Decodes canonical (or any semantically equal) graph JSON and validates it.
pub fn decode(bytes: &[u8]) -> Result<StoryGraph, ModelError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ModelError::MalformedInput(e.to_string()))?;
    let value: Value = serde_json::from_str(text).map_err(|e| ModelError::MalformedInput(e.to_string()))?;
    let version = value
        .get("version")
        .ok_or_else(|| ModelError::MalformedInput("missing `version`".into()))?;
    match version.as_u64() {
        Some(v) if v == u64::from(FORMAT_VERSION) => {}
        Some(v) => return Err(ModelError::UnsupportedVersion(v)),
        None => return Err(ModelError::MalformedInput("`version` must be a positive integer".into())),
    }
    let graph: StoryGraph = serde_json::from_value(value).map_err(|e| ModelError::MalformedInput(e.to_string()))?;
    let diags = validate(&graph);
    if diags.is_empty() {
        Ok(graph)
    } else {
        Err(ModelError::InvalidGraph(diags))
    }
}

/// SHA-256 over the canonical bytes, as 64 lowercase hex characters.
pub fn content_hash(graph: &StoryGraph) -> String {
    hex::encode(Sha256::digest(canonical_bytes(graph)))
}
