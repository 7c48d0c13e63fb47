//! Keeps the bundled reference fixtures in sync with the engine.
//!
//! `fixtures/reference_thriller.responses.json` is the source of
//! truth: an ordered list of scripted model replies for one full
//! three-action pipeline run plus the three variant replies. From it
//! this test derives, deterministically:
//!
//! - `reference_thriller.cassette.jsonl` — a merged replay cassette
//!   covering (a) the pipeline run with the genre fixed to the
//!   reference genre, (b) the same run with the genre sampled from the
//!   bundled catalog by the reference seed, and (c) the three variant
//!   prompts built from the run's background and outline;
//! - `reference_thriller.story.json` — the artifact of run (a).
//!
//! Run `REGEN_FIXTURES=1 cargo test --test fixtures` after changing
//! templates or the responses file to rewrite the derived fixtures.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use suspense_forge::gateway::{Cassette, CassetteRecord, Gateway, ScriptedBackend};
use suspense_forge::pipeline::StoryEngine;
use suspense_forge::story::{GenerationConfig, Genre, StoryArtifact};
use suspense_forge::variants::{self, ArityPolicy};

#[derive(Debug, Deserialize)]
struct ResponsesFile {
    #[allow(dead_code)]
    description: String,
    genre: String,
    seed: u64,
    iterations: u32,
    pipeline_replies: Vec<String>,
    variant_replies: BTreeMap<String, String>,
}

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn load_responses() -> ResponsesFile {
    let path = fixture_path("reference_thriller.responses.json");
    let text = fs::read_to_string(&path).expect("responses fixture readable");
    serde_json::from_str(&text).expect("responses fixture parses")
}

fn scripted_gateway(replies: &[String]) -> Gateway {
    let mut gateway = Gateway::new();
    gateway.register(
        "script",
        Box::new(ScriptedBackend::from_responses(replies.iter().cloned())),
    );
    gateway.enable_recording();
    gateway
}

fn run_pipeline(replies: &[String], config: &GenerationConfig) -> (StoryArtifact, Cassette) {
    let mut gateway = scripted_gateway(replies);
    let artifact = {
        let engine = StoryEngine::new(&gateway);
        engine
            .generate_story(config)
            .expect("scripted pipeline run succeeds")
            .artifact
    };
    (artifact, gateway.take_recording().expect("recording"))
}

/// Merges record streams, dropping exact duplicates and refusing
/// conflicting responses for the same fingerprint.
fn merge_records(sources: Vec<Cassette>) -> Cassette {
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    let mut merged: Vec<CassetteRecord> = Vec::new();
    for cassette in sources {
        for record in cassette.records() {
            match seen.get(&record.fingerprint) {
                Some(existing) => assert_eq!(
                    existing, &record.response,
                    "conflicting responses recorded for one fingerprint"
                ),
                None => {
                    seen.insert(record.fingerprint.clone(), record.response.clone());
                    merged.push(record.clone());
                }
            }
        }
    }
    Cassette::from_records(merged).expect("merged records are unique")
}

/// Derives (cassette JSONL, story JSON) from the responses fixture.
fn build_reference_fixtures() -> (String, String) {
    let responses = load_responses();

    let fixed_config = GenerationConfig {
        iterations: responses.iterations,
        seed: responses.seed,
        backend: "script".to_owned(),
        genre_override: Some(Genre::new(responses.genre.as_str())),
        ..GenerationConfig::default()
    };
    let (mut artifact, fixed_records) = run_pipeline(&responses.pipeline_replies, &fixed_config);
    // The committed story fixture documents the replay-backend run, so
    // that replaying the cassette through the CLI reproduces the file
    // byte for byte.
    artifact.config_snapshot.backend = "replay".to_owned();
    artifact.provenance.backend = "replay".to_owned();

    let sampled_config = GenerationConfig {
        genre_override: None,
        ..fixed_config.clone()
    };
    let (_, sampled_records) = run_pipeline(&responses.pipeline_replies, &sampled_config);

    let mut variant_sources = Vec::new();
    for (name, reply) in &responses.variant_replies {
        let mut gateway = scripted_gateway(std::slice::from_ref(reply));
        {
            let engine = StoryEngine::new(&gateway);
            let mut session = gateway.open_session("script").expect("session");
            let config = fixed_config.clone();
            let outcome = match name.as_str() {
                "baseline" => variants::generate_baseline(
                    &engine,
                    &mut session,
                    &artifact.background,
                    &config,
                ),
                "ablation1" => variants::generate_ablation1(
                    &engine,
                    &mut session,
                    &artifact.background,
                    &artifact.outline,
                    ArityPolicy::Generalize,
                    &config,
                ),
                "ablation2" => variants::generate_ablation2(
                    &engine,
                    &mut session,
                    &artifact.background,
                    &config,
                ),
                other => panic!("unknown variant reply key {other:?}"),
            };
            outcome.expect("scripted variant run succeeds");
        }
        variant_sources.push(gateway.take_recording().expect("recording"));
    }

    let mut sources = vec![fixed_records, sampled_records];
    sources.extend(variant_sources);
    let merged = merge_records(sources);
    (merged.to_jsonl(), artifact.to_json())
}

#[test]
fn reference_fixtures_match_the_committed_files() {
    let (cassette, story) = build_reference_fixtures();
    let cassette_path = fixture_path("reference_thriller.cassette.jsonl");
    let story_path = fixture_path("reference_thriller.story.json");

    if std::env::var("REGEN_FIXTURES").as_deref() == Ok("1") {
        fs::write(&cassette_path, &cassette).expect("write cassette fixture");
        fs::write(&story_path, &story).expect("write story fixture");
        return;
    }

    let committed_cassette = fs::read_to_string(&cassette_path)
        .expect("cassette fixture exists; run REGEN_FIXTURES=1 cargo test --test fixtures");
    let committed_story = fs::read_to_string(&story_path)
        .expect("story fixture exists; run REGEN_FIXTURES=1 cargo test --test fixtures");
    assert_eq!(
        committed_cassette, cassette,
        "cassette fixture is stale; run REGEN_FIXTURES=1 cargo test --test fixtures"
    );
    assert_eq!(
        committed_story, story,
        "story fixture is stale; run REGEN_FIXTURES=1 cargo test --test fixtures"
    );
}

#[test]
fn reference_cassette_loads_cleanly() {
    let cassette =
        Cassette::load(&fixture_path("reference_thriller.cassette.jsonl")).expect("loads");
    assert!(
        cassette.len() >= 22,
        "expected at least one full pipeline run of records, got {}",
        cassette.len()
    );
}

#[test]
fn reference_story_is_a_valid_artifact() {
    let text =
        fs::read_to_string(fixture_path("reference_thriller.story.json")).expect("readable");
    let artifact = StoryArtifact::from_json(&text).expect("parses");
    let report = artifact.validate();
    assert!(report.is_empty(), "violations: {report}");
    assert_eq!(artifact.chapters.len(), 3);
    assert_eq!(artifact.outline.actions.len(), 3);
}
