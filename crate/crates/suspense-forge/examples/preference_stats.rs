//! The evaluation workflow end to end: blind two stories into a rater
//! bundle, collect preference responses, tally them with exact sign
//! tests, and summarize agreement and rating distributions.
//!
//! ```sh
//! cargo run -p suspense-forge --example preference_stats
//! ```

use std::path::PathBuf;

use suspense_forge::eval::io::{render_heatmap, render_tally_table};
use suspense_forge::eval::{
    build_bundle, empathy_heatmap, fleiss_kappa, sign_test, tally, Choice, LevelPair, MethodSide,
    PreferenceResponse, QuestionId, RatingMatrix,
};
use suspense_forge::story::{placeholder_artifact, StoryArtifact};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two artifacts to compare: the bundled reference story (the
    // method) and a placeholder standing in for a baseline story.
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let method = StoryArtifact::from_json(&std::fs::read_to_string(
        fixtures.join("reference_thriller.story.json"),
    )?)?;
    let comparison = placeholder_artifact(3);

    // Blinding: the bundle shows raters two content hashes in a
    // seed-determined left/right order; the key that says which side
    // is the method is stored separately.
    let (bundle, key) = build_bundle(&method, &comparison, 42)?;
    println!("bundle {}", bundle.id);
    println!("  left:  {}", bundle.story_left);
    println!("  right: {}", bundle.story_right);
    println!("  method is on the {:?} side (from the private key)\n", key.method_side);
    for question in &bundle.questions {
        println!("  Q: {question}");
    }

    // Simulated raters: 9 prefer the method on suspense, 2 the
    // comparison, 1 cannot decide. The tally maps left/right choices
    // back through the key, drops ties from the test, and stars
    // significant dimensions (* p < 0.05, ** p < 0.01).
    let method_choice = match key.method_side {
        MethodSide::Left => Choice::Left,
        MethodSide::Right => Choice::Right,
    };
    let other_choice = match key.method_side {
        MethodSide::Left => Choice::Right,
        MethodSide::Right => Choice::Left,
    };
    let mut responses = Vec::new();
    for rater in 0..12u32 {
        let choice = match rater {
            0..=8 => method_choice,
            9 | 10 => other_choice,
            _ => Choice::Tie,
        };
        for question in QuestionId::ALL {
            responses.push(PreferenceResponse {
                bundle_id: bundle.id.clone(),
                rater_id: format!("rater-{rater}"),
                question,
                choice,
            });
        }
    }
    let table = tally(&responses, &[key])?;
    println!("\n{}", render_tally_table(&table));

    // The same split as a standalone exact sign test.
    println!("sign test 9 wins / 2 losses: p = {}\n", sign_test(9, 2)?);

    // Agreement: how often 6 raters put 4 subjects in the same of two
    // categories, chance-corrected.
    let matrix = RatingMatrix::new(vec![
        vec![5, 1],
        vec![6, 0],
        vec![1, 5],
        vec![6, 0],
    ])?;
    let kappa = fleiss_kappa(&matrix);
    println!("Fleiss kappa over {} subjects: {:.4}\n", matrix.subjects(), kappa.value);

    // Rating distributions: paired 1–5 empathy/suspense levels.
    let pairs = [
        (4, 5), (5, 5), (3, 4), (4, 4), (5, 4), (2, 2), (4, 5), (3, 3), (5, 5), (1, 2),
    ]
    .into_iter()
    .map(|(e, s)| LevelPair::new(e, s))
    .collect::<Result<Vec<_>, _>>()?;
    println!("{}", render_heatmap(&empathy_heatmap(&pairs)));
    Ok(())
}
