//! Generate a complete three-chapter story offline by replaying the
//! bundled reference cassette — no network, no credentials.
//!
//! ```sh
//! cargo run -p suspense-forge --example replay_story
//! ```

use std::path::PathBuf;

use suspense_forge::gateway::Gateway;
use suspense_forge::pipeline::StoryEngine;
use suspense_forge::story::{GenerationConfig, Genre};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cassette = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/reference_thriller.cassette.jsonl");

    // A gateway routes prompts to a backend; loading a cassette
    // registers the offline "replay" backend, which answers every
    // prompt from the recording and fails on anything unrecorded.
    let mut gateway = Gateway::new();
    gateway.load_cassette(&cassette)?;

    // The same configuration the cassette was recorded under: three
    // planned actions, a fixed genre, and the default flags (clues on,
    // failure reasons revealed before each chapter).
    let config = GenerationConfig {
        iterations: 3,
        seed: 7,
        backend: "replay".to_owned(),
        genre_override: Some(Genre::new("spy thriller")),
        ..GenerationConfig::default()
    };

    let engine = StoryEngine::new(&gateway);
    let outcome = engine.generate_story(&config)?;
    let story = &outcome.artifact;

    println!("genre:     {}", story.background.genre.label());
    println!("templates: {}", story.provenance.template_set_version);
    println!("chapters:  {}", story.chapters.len());
    println!();
    println!("== protagonist ==\n{}\n", story.background.name_occupation);
    println!("== goal ==\n{}\n", story.background.goal);
    println!("== outline ==");
    for (i, action) in story.outline.actions.iter().enumerate() {
        println!("action {}: {action}", i + 1);
        if let Some(reason) = story.outline.reasons.get(i) {
            println!("  fails because: {reason}");
        }
    }
    println!();
    let first = &story.chapters[0];
    println!(
        "== chapter 1 (body: {} chars, {} events, clue: {}) ==",
        first.body.len(),
        first.events.len(),
        first.clue_present
    );
    let preview: String = first.body.chars().take(300).collect();
    println!("{preview}…");

    // The paired trace logs every prompt/response exchange by stage,
    // which is what record/replay and the validation suite key off.
    println!();
    println!("trace stages:");
    for stage in &outcome.trace.stages {
        println!("  {:<10} {} exchange(s)", stage.stage.to_string(), stage.exchanges.len());
    }
    Ok(())
}
