//! Blinded pairwise evaluation bundles and the statistics used to score
//! them: win/lose/tie tallies with exact sign-test p-values, Fleiss's
//! kappa for inter-rater agreement, and the empathy×suspense count
//! matrix.
//!
//! The workflow: [`build_bundle`] pairs a story from the method under
//! test with a comparison story and hides which is which behind a
//! seed-determined left/right assignment (the de-blinding key is a
//! separate value so the rater-facing bundle never reveals it). Raters
//! answer the five fixed questions; [`tally`] folds their
//! [`PreferenceResponse`]s back through the key into per-question
//! win/lose/tie counts from the method's perspective.

pub mod io;
pub mod stats;

pub use stats::{fleiss_kappa, sign_test, Kappa, RatingMatrix};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::story::StoryArtifact;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("the two stories of a pair must be distinct")]
    SameArtifact,
    #[error("response references unknown bundle {bundle_id}")]
    UnknownBundle { bundle_id: String },
    #[error("rater {rater_id} answered {question} twice for bundle {bundle_id}")]
    DuplicateRater {
        rater_id: String,
        bundle_id: String,
        question: QuestionId,
    },
    #[error("no informative pairs: wins and losses are both zero")]
    NoInformativePairs,
    #[error("invalid rating matrix: {0}")]
    InvalidMatrix(String),
    #[error("{field} level must be in 1..=5, got {value}")]
    InvalidLevel { field: &'static str, value: u64 },
    #[error("row {line}: {detail}")]
    Parse { line: u64, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The five preference questions, in their fixed reporting order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum QuestionId {
    Suspense,
    Novelty,
    Enjoyment,
    LogicalSense,
    Naturalness,
}

impl QuestionId {
    pub const ALL: [QuestionId; 5] = [
        QuestionId::Suspense,
        QuestionId::Novelty,
        QuestionId::Enjoyment,
        QuestionId::LogicalSense,
        QuestionId::Naturalness,
    ];

    /// The dimension label used in reports.
    pub fn dimension(self) -> &'static str {
        match self {
            QuestionId::Suspense => "Suspense",
            QuestionId::Novelty => "Novelty",
            QuestionId::Enjoyment => "Enjoyment",
            QuestionId::LogicalSense => "Logical Sense",
            QuestionId::Naturalness => "Naturalness",
        }
    }

    /// The question text a rater sees.
    pub fn text(self) -> &'static str {
        match self {
            QuestionId::Suspense => "Which story makes you feel a higher level of suspense?",
            QuestionId::Novelty => "Which story do you find to be more novel?",
            QuestionId::Enjoyment => "Which story is more enjoyable to read?",
            QuestionId::LogicalSense => "Which story logically makes more sense?",
            QuestionId::Naturalness => {
                "Which story is more likely to have been written by a human?"
            }
        }
    }

    /// Accepts the dimension label, the snake_case id, or the 1-based
    /// position, case-insensitively.
    pub fn parse(text: &str) -> Option<QuestionId> {
        let normalized = text.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        match normalized.as_str() {
            "suspense" | "1" => Some(QuestionId::Suspense),
            "novelty" | "2" => Some(QuestionId::Novelty),
            "enjoyment" | "3" => Some(QuestionId::Enjoyment),
            "logical_sense" | "4" => Some(QuestionId::LogicalSense),
            "naturalness" | "5" => Some(QuestionId::Naturalness),
            _ => None,
        }
    }
}

impl std::fmt::Display for QuestionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.dimension())
    }
}

/// Which side of the pair a rater preferred (or neither).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    Left,
    Right,
    Tie,
}

impl Choice {
    pub fn parse(text: &str) -> Option<Choice> {
        match text.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Some(Choice::Left),
            "right" | "r" => Some(Choice::Right),
            "tie" | "t" | "equal" => Some(Choice::Tie),
            _ => None,
        }
    }
}

/// Which side of a blinded pair holds the method-under-test's story.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSide {
    Left,
    Right,
}

/// The rater-facing pair: two story references (content hashes, not
/// revealing provenance) and the five questions. Contains nothing that
/// identifies which side is which method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalBundle {
    pub id: String,
    pub story_left: String,
    pub story_right: String,
    pub questions: Vec<String>,
}

/// The de-blinding key for one bundle; persisted separately from the
/// bundle itself so raters never see it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlindingKey {
    pub bundle_id: String,
    pub method_side: MethodSide,
}

/// One rater's answer to one question of one bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceResponse {
    pub bundle_id: String,
    pub rater_id: String,
    pub question: QuestionId,
    pub choice: Choice,
}

/// Short content hash identifying an artifact in bundles and keys.
pub fn artifact_ref(artifact: &StoryArtifact) -> String {
    let digest = Sha256::digest(artifact.to_json().as_bytes());
    hex::encode(digest)[..12].to_owned()
}

/// Builds a blinded bundle pairing `method` (the story whose wins we
/// count) against `comparison`. The left/right assignment is a
/// deterministic function of the seed and the pair's content hashes, so
/// a study seed reproduces the same blinding while still varying it
/// across pairs.
pub fn build_bundle(
    method: &StoryArtifact,
    comparison: &StoryArtifact,
    seed: u64,
) -> Result<(EvalBundle, BlindingKey), EvalError> {
    let method_ref = artifact_ref(method);
    let comparison_ref = artifact_ref(comparison);
    if method_ref == comparison_ref {
        return Err(EvalError::SameArtifact);
    }

    let mut hasher = Sha256::new();
    hasher.update(method_ref.as_bytes());
    hasher.update(b":");
    hasher.update(comparison_ref.as_bytes());
    let pair_digest = hasher.finalize();
    let mix = u64::from_le_bytes(pair_digest[..8].try_into().expect("8 bytes"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ mix);
    let method_side = if rng.gen_bool(0.5) {
        MethodSide::Left
    } else {
        MethodSide::Right
    };

    let (story_left, story_right) = match method_side {
        MethodSide::Left => (method_ref.clone(), comparison_ref.clone()),
        MethodSide::Right => (comparison_ref.clone(), method_ref.clone()),
    };
    let id_digest = Sha256::digest(format!("{method_ref}:{comparison_ref}:{seed}").as_bytes());
    let id = format!("pair-{}", &hex::encode(id_digest)[..12]);

    let bundle = EvalBundle {
        id: id.clone(),
        story_left,
        story_right,
        questions: QuestionId::ALL.iter().map(|q| q.text().to_owned()).collect(),
    };
    let key = BlindingKey {
        bundle_id: id,
        method_side,
    };
    Ok((bundle, key))
}

/// Win/lose/tie counts for one question, from the method-under-test's
/// perspective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionTally {
    pub question: QuestionId,
    pub wins: u64,
    pub losses: u64,
    pub ties: u64,
}

impl QuestionTally {
    pub fn total(&self) -> u64 {
        self.wins + self.losses + self.ties
    }

    fn pct(&self, count: u64) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        let raw = 100.0 * count as f64 / self.total() as f64;
        (raw * 10.0).round() / 10.0
    }

    /// Win percentage, rounded to one decimal place.
    pub fn win_pct(&self) -> f64 {
        self.pct(self.wins)
    }

    pub fn lose_pct(&self) -> f64 {
        self.pct(self.losses)
    }

    pub fn tie_pct(&self) -> f64 {
        self.pct(self.ties)
    }

    /// Two-sided exact sign test over wins vs. losses, ties dropped.
    /// `None` when every response was a tie (or there were none).
    pub fn p_value(&self) -> Option<f64> {
        sign_test(self.wins, self.losses).ok()
    }

    /// Conventional significance stars: `**` below 0.01, `*` below 0.05.
    pub fn significance(&self) -> &'static str {
        match self.p_value() {
            Some(p) if p < 0.01 => "**",
            Some(p) if p < 0.05 => "*",
            _ => "",
        }
    }
}

/// Per-question tallies in the fixed question order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceTally {
    pub questions: Vec<QuestionTally>,
}

impl PreferenceTally {
    pub fn question(&self, id: QuestionId) -> &QuestionTally {
        self.questions
            .iter()
            .find(|t| t.question == id)
            .expect("tally always carries all five questions")
    }

    pub fn total_responses(&self) -> u64 {
        self.questions.iter().map(QuestionTally::total).sum()
    }
}

/// Folds rater responses through the de-blinding key into per-question
/// win/lose/tie counts for the method under test.
pub fn tally(
    responses: &[PreferenceResponse],
    keys: &[BlindingKey],
) -> Result<PreferenceTally, EvalError> {
    let sides: BTreeMap<&str, MethodSide> = keys
        .iter()
        .map(|k| (k.bundle_id.as_str(), k.method_side))
        .collect();

    let mut counts: BTreeMap<QuestionId, (u64, u64, u64)> = QuestionId::ALL
        .iter()
        .map(|&q| (q, (0, 0, 0)))
        .collect();
    let mut seen: BTreeSet<(&str, &str, QuestionId)> = BTreeSet::new();

    for response in responses {
        let side = *sides.get(response.bundle_id.as_str()).ok_or_else(|| {
            EvalError::UnknownBundle {
                bundle_id: response.bundle_id.clone(),
            }
        })?;
        if !seen.insert((
            response.rater_id.as_str(),
            response.bundle_id.as_str(),
            response.question,
        )) {
            return Err(EvalError::DuplicateRater {
                rater_id: response.rater_id.clone(),
                bundle_id: response.bundle_id.clone(),
                question: response.question,
            });
        }
        let entry = counts.get_mut(&response.question).expect("all questions seeded");
        match (response.choice, side) {
            (Choice::Tie, _) => entry.2 += 1,
            (Choice::Left, MethodSide::Left) | (Choice::Right, MethodSide::Right) => entry.0 += 1,
            (Choice::Left, MethodSide::Right) | (Choice::Right, MethodSide::Left) => entry.1 += 1,
        }
    }

    Ok(PreferenceTally {
        questions: QuestionId::ALL
            .iter()
            .map(|&question| {
                let (wins, losses, ties) = counts[&question];
                QuestionTally {
                    question,
                    wins,
                    losses,
                    ties,
                }
            })
            .collect(),
    })
}

/// A validated (empathy, suspense) level pair, both in 1..=5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLevelPair")]
pub struct LevelPair {
    empathy: u8,
    suspense: u8,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevelPair {
    empathy: u8,
    suspense: u8,
}

impl TryFrom<RawLevelPair> for LevelPair {
    type Error = EvalError;

    fn try_from(raw: RawLevelPair) -> Result<Self, Self::Error> {
        LevelPair::new(raw.empathy, raw.suspense)
    }
}

impl LevelPair {
    pub fn new(empathy: u8, suspense: u8) -> Result<Self, EvalError> {
        if !(1..=5).contains(&empathy) {
            return Err(EvalError::InvalidLevel {
                field: "empathy",
                value: empathy as u64,
            });
        }
        if !(1..=5).contains(&suspense) {
            return Err(EvalError::InvalidLevel {
                field: "suspense",
                value: suspense as u64,
            });
        }
        Ok(LevelPair { empathy, suspense })
    }

    pub fn empathy(&self) -> u8 {
        self.empathy
    }

    pub fn suspense(&self) -> u8 {
        self.suspense
    }
}

/// 5×5 count matrix over (empathy level, suspense level) observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Heatmap {
    counts: [[u64; 5]; 5],
}

impl Heatmap {
    /// Count at 1-based (empathy, suspense) levels.
    ///
    /// # Panics
    /// When either level is outside 1..=5.
    pub fn cell(&self, empathy: u8, suspense: u8) -> u64 {
        assert!((1..=5).contains(&empathy), "empathy level out of range");
        assert!((1..=5).contains(&suspense), "suspense level out of range");
        self.counts[empathy as usize - 1][suspense as usize - 1]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Row-major counts, empathy level 1..5 outermost.
    pub fn counts(&self) -> &[[u64; 5]; 5] {
        &self.counts
    }
}

/// Counts how often each (empathy, suspense) level combination occurs.
pub fn empathy_heatmap(pairs: &[LevelPair]) -> Heatmap {
    let mut counts = [[0u64; 5]; 5];
    for pair in pairs {
        counts[pair.empathy as usize - 1][pair.suspense as usize - 1] += 1;
    }
    Heatmap { counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::story::placeholder_artifact;
    use proptest::prelude::*;

    fn two_artifacts() -> (StoryArtifact, StoryArtifact) {
        let a = placeholder_artifact(3);
        let mut b = placeholder_artifact(3);
        b.background.goal.push_str(" with a twist");
        (a, b)
    }

    #[test]
    fn bundle_carries_the_five_questions_verbatim_in_order() {
        let (a, b) = two_artifacts();
        let (bundle, _) = build_bundle(&a, &b, 0).unwrap();
        assert_eq!(
            bundle.questions,
            vec![
                "Which story makes you feel a higher level of suspense?",
                "Which story do you find to be more novel?",
                "Which story is more enjoyable to read?",
                "Which story logically makes more sense?",
                "Which story is more likely to have been written by a human?",
            ]
        );
        assert_eq!(
            bundle.questions[4],
            QuestionId::Naturalness.text(),
        );
    }

    #[test]
    fn blinding_is_seed_deterministic_but_varies_across_seeds() {
        let (a, b) = two_artifacts();
        let (bundle0, key0) = build_bundle(&a, &b, 0).unwrap();
        let (bundle0_again, key0_again) = build_bundle(&a, &b, 0).unwrap();
        assert_eq!(bundle0, bundle0_again);
        assert_eq!(key0, key0_again);

        let mut sides = BTreeSet::new();
        for seed in 0..32 {
            let (_, key) = build_bundle(&a, &b, seed).unwrap();
            sides.insert(format!("{:?}", key.method_side));
        }
        assert_eq!(sides.len(), 2, "both assignments must occur across seeds");
    }

    #[test]
    fn bundle_ids_differ_per_seed_and_reference_both_stories() {
        let (a, b) = two_artifacts();
        let (bundle0, _) = build_bundle(&a, &b, 0).unwrap();
        let (bundle1, _) = build_bundle(&a, &b, 1).unwrap();
        assert_ne!(bundle0.id, bundle1.id);
        assert!(bundle0.id.starts_with("pair-"));

        let refs = [artifact_ref(&a), artifact_ref(&b)];
        assert!(refs.contains(&bundle0.story_left));
        assert!(refs.contains(&bundle0.story_right));
        assert_ne!(bundle0.story_left, bundle0.story_right);
    }

    #[test]
    fn identical_artifacts_are_rejected() {
        let a = placeholder_artifact(3);
        assert!(matches!(
            build_bundle(&a, &a.clone(), 7),
            Err(EvalError::SameArtifact)
        ));
    }

    fn respond(
        bundle_id: &str,
        rater: &str,
        question: QuestionId,
        choice: Choice,
    ) -> PreferenceResponse {
        PreferenceResponse {
            bundle_id: bundle_id.to_owned(),
            rater_id: rater.to_owned(),
            question,
            choice,
        }
    }

    #[test]
    fn unanimous_preference_tallies_to_100_0_0() {
        let key = BlindingKey {
            bundle_id: "pair-x".to_owned(),
            method_side: MethodSide::Left,
        };
        let responses: Vec<PreferenceResponse> = (0..30)
            .map(|i| respond("pair-x", &format!("r{i}"), QuestionId::Suspense, Choice::Left))
            .collect();
        let tally = tally(&responses, &[key]).unwrap();
        let suspense = tally.question(QuestionId::Suspense);
        assert_eq!(suspense.wins, 30);
        assert_eq!(
            (suspense.win_pct(), suspense.lose_pct(), suspense.tie_pct()),
            (100.0, 0.0, 0.0)
        );
    }

    #[test]
    fn mixed_responses_round_to_one_decimal() {
        let key = BlindingKey {
            bundle_id: "pair-x".to_owned(),
            method_side: MethodSide::Right,
        };
        // 6 wins (Right), 3 losses (Left), 1 tie, on the method=Right key.
        let mut responses = Vec::new();
        for i in 0..6 {
            responses.push(respond("pair-x", &format!("w{i}"), QuestionId::Novelty, Choice::Right));
        }
        for i in 0..3 {
            responses.push(respond("pair-x", &format!("l{i}"), QuestionId::Novelty, Choice::Left));
        }
        responses.push(respond("pair-x", "t0", QuestionId::Novelty, Choice::Tie));

        let tally = tally(&responses, &[key]).unwrap();
        let novelty = tally.question(QuestionId::Novelty);
        assert_eq!((novelty.wins, novelty.losses, novelty.ties), (6, 3, 1));
        assert_eq!(
            (novelty.win_pct(), novelty.lose_pct(), novelty.tie_pct()),
            (60.0, 30.0, 10.0)
        );
    }

    #[test]
    fn unknown_bundles_and_duplicate_raters_are_rejected() {
        let key = BlindingKey {
            bundle_id: "pair-x".to_owned(),
            method_side: MethodSide::Left,
        };
        let err = tally(
            &[respond("pair-y", "r0", QuestionId::Suspense, Choice::Left)],
            std::slice::from_ref(&key),
        )
        .unwrap_err();
        assert!(matches!(err, EvalError::UnknownBundle { bundle_id } if bundle_id == "pair-y"));

        let twice = vec![
            respond("pair-x", "r0", QuestionId::Suspense, Choice::Left),
            respond("pair-x", "r0", QuestionId::Suspense, Choice::Right),
        ];
        let err = tally(&twice, &[key]).unwrap_err();
        assert!(matches!(err, EvalError::DuplicateRater { .. }));
    }

    #[test]
    fn same_rater_may_answer_different_questions_and_bundles() {
        let keys = vec![
            BlindingKey {
                bundle_id: "pair-x".to_owned(),
                method_side: MethodSide::Left,
            },
            BlindingKey {
                bundle_id: "pair-y".to_owned(),
                method_side: MethodSide::Right,
            },
        ];
        let responses = vec![
            respond("pair-x", "r0", QuestionId::Suspense, Choice::Left),
            respond("pair-x", "r0", QuestionId::Novelty, Choice::Left),
            respond("pair-y", "r0", QuestionId::Suspense, Choice::Right),
        ];
        let tally = tally(&responses, &keys).unwrap();
        assert_eq!(tally.question(QuestionId::Suspense).wins, 2);
        assert_eq!(tally.question(QuestionId::Novelty).wins, 1);
        assert_eq!(tally.total_responses(), 3);
    }

    #[test]
    fn percentages_sum_to_one_hundred_within_rounding() {
        let key = BlindingKey {
            bundle_id: "pair-x".to_owned(),
            method_side: MethodSide::Left,
        };
        // 3-way split that does not divide evenly: 1/1/1 of 3.
        let responses = vec![
            respond("pair-x", "a", QuestionId::Enjoyment, Choice::Left),
            respond("pair-x", "b", QuestionId::Enjoyment, Choice::Right),
            respond("pair-x", "c", QuestionId::Enjoyment, Choice::Tie),
        ];
        let tally = tally(&responses, &[key]).unwrap();
        let q = tally.question(QuestionId::Enjoyment);
        let sum = q.win_pct() + q.lose_pct() + q.tie_pct();
        assert!((sum - 100.0).abs() <= 0.1 + 1e-9, "sum = {sum}");
    }

    #[test]
    fn blinding_then_deblinding_is_the_identity_on_tallies() {
        // Raters always prefer the method story, wherever it landed.
        let (a, b) = two_artifacts();
        let mut responses = Vec::new();
        let mut keys = Vec::new();
        for seed in 0..16 {
            let (bundle, key) = build_bundle(&a, &b, seed).unwrap();
            let method_choice = match key.method_side {
                MethodSide::Left => Choice::Left,
                MethodSide::Right => Choice::Right,
            };
            responses.push(respond(&bundle.id, "r", QuestionId::Suspense, method_choice));
            keys.push(key);
        }
        let tally = tally(&responses, &keys).unwrap();
        let suspense = tally.question(QuestionId::Suspense);
        assert_eq!(suspense.wins, 16);
        assert_eq!(suspense.losses, 0);
    }

    #[test]
    fn tally_significance_stars_follow_the_thresholds() {
        let strong = QuestionTally {
            question: QuestionId::Suspense,
            wins: 10,
            losses: 0,
            ties: 0,
        };
        assert_eq!(strong.significance(), "**");
        let weak = QuestionTally {
            question: QuestionId::Suspense,
            wins: 8,
            losses: 2,
            ties: 0,
        };
        assert_eq!(weak.p_value().unwrap(), 0.109375);
        assert_eq!(weak.significance(), "");
        let moderate = QuestionTally {
            question: QuestionId::Suspense,
            wins: 9,
            losses: 1,
            ties: 0,
        };
        assert_eq!(moderate.significance(), "*");
        let all_ties = QuestionTally {
            question: QuestionId::Suspense,
            wins: 0,
            losses: 0,
            ties: 5,
        };
        assert_eq!(all_ties.p_value(), None);
        assert_eq!(all_ties.significance(), "");
    }

    #[test]
    fn empty_heatmap_is_all_zero() {
        let map = empathy_heatmap(&[]);
        assert_eq!(map.total(), 0);
        for e in 1..=5 {
            for s in 1..=5 {
                assert_eq!(map.cell(e, s), 0);
            }
        }
    }

    #[test]
    fn heatmap_counts_cells() {
        let pairs = vec![
            LevelPair::new(5, 5).unwrap(),
            LevelPair::new(5, 5).unwrap(),
            LevelPair::new(1, 1).unwrap(),
        ];
        let map = empathy_heatmap(&pairs);
        assert_eq!(map.cell(5, 5), 2);
        assert_eq!(map.cell(1, 1), 1);
        assert_eq!(map.cell(3, 3), 0);
        assert_eq!(map.total(), 3);
    }

    #[test]
    fn level_pairs_validate_their_range() {
        assert!(matches!(
            LevelPair::new(0, 3),
            Err(EvalError::InvalidLevel { field: "empathy", .. })
        ));
        assert!(matches!(
            LevelPair::new(3, 6),
            Err(EvalError::InvalidLevel { field: "suspense", .. })
        ));
        assert!(serde_json::from_str::<LevelPair>(r#"{"empathy":6,"suspense":1}"#).is_err());
        let ok: LevelPair = serde_json::from_str(r#"{"empathy":2,"suspense":4}"#).unwrap();
        assert_eq!((ok.empathy(), ok.suspense()), (2, 4));
    }

    #[test]
    fn question_parsing_accepts_labels_ids_and_positions() {
        assert_eq!(QuestionId::parse("Suspense"), Some(QuestionId::Suspense));
        assert_eq!(QuestionId::parse("logical sense"), Some(QuestionId::LogicalSense));
        assert_eq!(QuestionId::parse("logical_sense"), Some(QuestionId::LogicalSense));
        assert_eq!(QuestionId::parse("5"), Some(QuestionId::Naturalness));
        assert_eq!(QuestionId::parse("sadness"), None);
    }

    proptest! {
        #[test]
        fn heatmap_total_equals_input_length(levels in proptest::collection::vec((1u8..=5, 1u8..=5), 0..900)) {
            let pairs: Vec<LevelPair> = levels
                .iter()
                .map(|&(e, s)| LevelPair::new(e, s).unwrap())
                .collect();
            let map = empathy_heatmap(&pairs);
            prop_assert_eq!(map.total(), pairs.len() as u64);
        }

        #[test]
        fn tally_is_invariant_under_response_reordering(
            choices in proptest::collection::vec(0u8..3, 1..40),
            side_left in any::<bool>(),
        ) {
            let key = BlindingKey {
                bundle_id: "pair-x".to_owned(),
                method_side: if side_left { MethodSide::Left } else { MethodSide::Right },
            };
            let responses: Vec<PreferenceResponse> = choices
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let choice = match c {
                        0 => Choice::Left,
                        1 => Choice::Right,
                        _ => Choice::Tie,
                    };
                    respond("pair-x", &format!("r{i}"), QuestionId::Suspense, choice)
                })
                .collect();
            let forward = tally(&responses, std::slice::from_ref(&key)).unwrap();
            let mut shuffled = responses.clone();
            shuffled.reverse();
            let backward = tally(&shuffled, std::slice::from_ref(&key)).unwrap();
            prop_assert_eq!(forward, backward);
        }
    }
}
