//! Suspense Forge: an iterative planning engine for suspenseful story
//! generation on top of chat-completion LLMs.
//!
//! The engine decomposes a story into three stages: background setup,
//! adversarial outline planning (the protagonist repeatedly acts, an
//! opposing reason makes the action fail), and chapter-by-chapter detail
//! elaboration. Every prompt sent to the model comes from a fixed,
//! versioned template registry, and every completion can be recorded to a
//! cassette and replayed deterministically.
//!
//! The crate is organized as a library first; see the `examples/`
//! directory for one runnable program per capability, and the
//! `suspense-forge` binary for the batch CLI.

pub mod cli;
pub mod eval;
pub mod gateway;
pub mod pipeline;
pub mod prompt;
pub mod story;
pub mod variants;

pub use gateway::{CompletionParams, Gateway, SessionHandle};
pub use pipeline::{GenerationOutcome, StoryEngine};
pub use story::{Background, Chapter, GenerationConfig, Genre, Outline, StoryArtifact};
