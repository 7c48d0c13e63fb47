//! Run the full pipeline against a deterministic in-memory backend and
//! inspect the prompt flow — useful for understanding the three stages
//! without any recorded data.
//!
//! ```sh
//! cargo run -p suspense-forge --example scripted_pipeline
//! ```

use suspense_forge::gateway::{Gateway, ScriptedBackend};
use suspense_forge::pipeline::StoryEngine;
use suspense_forge::story::{GenerationConfig, Genre, RevelationMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The scripted backend answers "mock reply 1", "mock reply 2", …
    // so every response is distinct and the conversation structure is
    // easy to follow.
    let mut gateway = Gateway::new();
    gateway.register("mock", Box::new(ScriptedBackend::sequential("mock")));

    let config = GenerationConfig {
        iterations: 4,
        backend: "mock".to_owned(),
        genre_override: Some(Genre::new("heist caper")),
        revelation_mode: RevelationMode::AfterTheFact,
        ..GenerationConfig::default()
    };

    let engine = StoryEngine::new(&gateway);
    let outcome = engine.generate_story(&config)?;

    // Stage 1 asks four background questions in one session; stage 2
    // alternates k actions with k−1 failure reasons in the same
    // session; stage 3 elaborates each chapter in a fresh session.
    println!(
        "k = {} → {} chapters, {} total exchanges\n",
        config.iterations,
        outcome.artifact.chapters.len(),
        outcome.trace.all_exchanges().count()
    );
    for stage in &outcome.trace.stages {
        println!("[{}]", stage.stage);
        for exchange in &stage.exchanges {
            let prompt_preview: String = exchange.prompt.chars().take(68).collect();
            println!("  {:<24} {prompt_preview}…", exchange.template.name());
        }
    }

    // Each chapter records what the trace produced for it.
    println!();
    for chapter in &outcome.artifact.chapters {
        println!(
            "chapter {}: revelation {:?}, clue {}, {} events",
            chapter.index,
            chapter.revelation,
            chapter.clue_present,
            chapter.events.len()
        );
    }
    Ok(())
}
