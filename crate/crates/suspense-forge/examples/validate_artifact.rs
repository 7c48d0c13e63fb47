//! Validate story artifacts: a clean pass over the bundled reference
//! story, then a tour of the violations the checker reports when an
//! artifact's structure breaks its own configuration.
//!
//! ```sh
//! cargo run -p suspense-forge --example validate_artifact
//! ```

use std::path::PathBuf;

use suspense_forge::story::{Revelation, StoryArtifact};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let story = StoryArtifact::from_json(&std::fs::read_to_string(
        fixtures.join("reference_thriller.story.json"),
    )?)?;

    let report = story.validate();
    println!(
        "reference story: {} chapter(s), {} violation(s)",
        story.chapters.len(),
        report.violations.len()
    );
    assert!(report.is_empty());

    // Break the artifact three different ways and show how every
    // violation is reported in a single pass, not one at a time.
    let mut broken = story.clone();
    broken.chapters[0].revelation = Revelation::None; // non-final chapter can't be the success
    broken.chapters[2].revelation = Revelation::Beforehand; // final chapter must be the success
    broken.outline.reasons.pop(); // outline arity no longer k−1
    broken.config_snapshot.sentence_cap = 9; // out of the {3,4,5} domain

    let report = broken.validate();
    println!("\nbroken copy: {} violation(s)", report.violations.len());
    for violation in &report.violations {
        println!("  [{:?}] {}", violation.code, violation.message);
    }
    assert!(!report.is_empty());
    Ok(())
}
