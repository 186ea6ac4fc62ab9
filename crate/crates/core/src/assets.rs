//! Story sources shipped with the engine.

/// Source of the bundled `mask.story`: the mask-retrieval flight narrative.
pub const MASK_STORY: &str = include_str!("../../../assets/mask.story");
