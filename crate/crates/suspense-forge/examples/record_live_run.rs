//! Generate a story against a live, OpenAI-compatible chat endpoint and
//! record every exchange to a cassette for later offline replay.
//!
//! Credentials come from the environment only:
//!
//! ```sh
//! export SUSPENSE_FORGE_API_KEY=…        # required
//! export SUSPENSE_FORGE_API_URL=…        # optional endpoint override
//! export SUSPENSE_FORGE_MODEL=…          # optional model override
//! cargo run -p suspense-forge --example record_live_run
//! ```
//!
//! Without credentials the example explains what it would do and exits
//! successfully, so it is safe to run in offline checkouts.

use suspense_forge::gateway::{Gateway, GatewayError, LiveBackend};
use suspense_forge::pipeline::StoryEngine;
use suspense_forge::story::GenerationConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let backend = match LiveBackend::from_env() {
        Ok(backend) => backend,
        Err(GatewayError::MissingCredentials(var)) => {
            println!("no live credentials: set {var} to run this example against a real endpoint.");
            println!("it would then:");
            println!("  1. generate a story with sampled genre (seed 11, k = 3),");
            println!("  2. record every prompt/response pair,");
            println!("  3. save recorded.cassette.jsonl for offline replay.");
            return Ok(());
        }
        Err(other) => return Err(other.into()),
    };

    let mut gateway = Gateway::new();
    gateway.register("live", Box::new(backend));
    gateway.enable_recording();

    let config = GenerationConfig {
        iterations: 3,
        seed: 11,
        backend: "live".to_owned(),
        ..GenerationConfig::default()
    };
    let outcome = {
        let engine = StoryEngine::new(&gateway);
        engine.generate_story(&config)?
    };
    println!(
        "generated {} chapters in genre {:?}",
        outcome.artifact.chapters.len(),
        outcome.artifact.background.genre.label()
    );

    // The recording contains one (fingerprint → response) record per
    // completed exchange; replaying it reproduces this exact run.
    let cassette = gateway.take_recording()?;
    let path = std::path::Path::new("recorded.cassette.jsonl");
    cassette.save(path)?;
    println!("recorded {} exchanges to {}", cassette.len(), path.display());
    println!("replay with: suspense-forge generate --iterations 3 --seed 11 --backend replay --cassette {}", path.display());
    Ok(())
}
