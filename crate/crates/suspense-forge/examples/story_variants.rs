//! Build the three single-prompt comparison variants from the bundled
//! reference story: the direct baseline, the outline-without-elaboration
//! variant (ablation1), and the no-outline variant (ablation2).
//!
//! All three reuse the reference story's background (and, for
//! ablation1, its outline), which is how controlled comparisons keep
//! the premise fixed while changing the generation strategy.
//!
//! ```sh
//! cargo run -p suspense-forge --example story_variants
//! ```

use std::path::PathBuf;

use suspense_forge::gateway::Gateway;
use suspense_forge::pipeline::StoryEngine;
use suspense_forge::story::{GenerationConfig, StoryArtifact};
use suspense_forge::variants::{
    ablation_one_prompt, ablation_two_prompt, baseline_prompt, generate_baseline, ArityPolicy,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let story = StoryArtifact::from_json(&std::fs::read_to_string(
        fixtures.join("reference_thriller.story.json"),
    )?)?;

    // The prompt builders are pure: inspect the exact text each
    // variant sends before spending any model call on it.
    let baseline = baseline_prompt(&story.background)?;
    println!("== baseline prompt ==\n{baseline}\n");

    let ablation1 = ablation_one_prompt(&story.background, &story.outline, ArityPolicy::Generalize)?;
    println!(
        "== ablation1 prompt (embeds the {}-action outline) ==\n{}…\n",
        story.outline.actions.len(),
        ablation1.chars().take(400).collect::<String>()
    );

    let ablation2 = ablation_two_prompt(&story.background)?;
    println!("== ablation2 prompt ==\n{ablation2}\n");

    // Running a variant is a single exchange; here it replays the
    // bundled cassette, so the output is deterministic and offline.
    let mut gateway = Gateway::new();
    gateway.load_cassette(&fixtures.join("reference_thriller.cassette.jsonl"))?;
    let config = GenerationConfig {
        backend: "replay".to_owned(),
        ..story.config_snapshot.clone()
    };
    let engine = StoryEngine::new(&gateway);
    let mut session = gateway.open_session("replay")?;
    let outcome = generate_baseline(&engine, &mut session, &story.background, &config)?;

    let chapter = &outcome.artifact.chapters[0];
    println!(
        "baseline story: 1 call, {} chapters, variant = {:?}",
        outcome.artifact.chapters.len(),
        outcome.artifact.provenance.variant
    );
    println!(
        "body preview: {}…",
        chapter.body.chars().take(200).collect::<String>()
    );
    Ok(())
}
