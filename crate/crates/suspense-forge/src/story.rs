//! Core narrative data model: genres, backgrounds, outlines, chapters, and
//! the story artifact that ties a finished run together.
//!
//! Artifacts are plain data. Nothing in this module talks to a model; the
//! one piece of behavior is [`validate_artifact`], which checks structural
//! consistency and reports *all* violations instead of stopping at the
//! first one, so a caller can show a complete diagnosis for a hand-edited
//! or corrupted file.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Version tag for the prompt template set an artifact was produced with.
/// Recorded in provenance so old artifacts stay interpretable if templates
/// ever change.
pub const TEMPLATE_SET_VERSION: &str = "1.0.0";

/// A story genre. Either one of the bundled catalog entries or free text
/// supplied by the user.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genre(pub String);

impl Genre {
    pub fn new(label: impl Into<String>) -> Self {
        Genre(label.into())
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Stage-one output: who the protagonist is, what they want, what happens
/// if they fail, and the opening paragraph woven from those answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub genre: Genre,
    pub name_occupation: String,
    pub goal: String,
    pub dire_situation: String,
    pub intro_paragraph: String,
}

/// Stage-two output: the planned actions and, for every action but the
/// last, the reason it fails. The final action succeeds, so there are
/// always exactly `actions.len() - 1` reasons in a well-formed outline.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outline {
    pub actions: Vec<String>,
    pub reasons: Vec<String>,
}

impl Outline {
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty() && self.reasons.is_empty()
    }
}

/// When the reader learns that a chapter's plan is doomed: before reading
/// the chapter, after it, or never (the final, successful chapter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Revelation {
    Beforehand,
    AfterTheFact,
    None,
}

/// Revelation policy for a run. Unlike [`Revelation`] this has no `None`:
/// the final chapter always gets `Revelation::None` regardless of policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RevelationMode {
    Beforehand,
    AfterTheFact,
}

impl RevelationMode {
    pub fn as_revelation(self) -> Revelation {
        match self {
            RevelationMode::Beforehand => Revelation::Beforehand,
            RevelationMode::AfterTheFact => Revelation::AfterTheFact,
        }
    }
}

/// One elaborated chapter of the finished story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chapter {
    /// 1-based position within the story.
    pub index: u32,
    pub summary: String,
    /// The planned sequence of events, one entry per event.
    pub events: Vec<String>,
    /// Full chapter text, including the failure revelation when one was
    /// generated for this chapter.
    pub body: String,
    /// Whether a clue foreshadowing the failure was requested while this
    /// chapter was elaborated.
    pub clue_present: bool,
    pub revelation: Revelation,
}

/// Identifies which single-prompt variant produced an artifact, if any.
/// `None` in provenance means the full iterative pipeline was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariantId {
    Baseline,
    Ablation1,
    Ablation2,
}

impl VariantId {
    pub fn as_str(self) -> &'static str {
        match self {
            VariantId::Baseline => "Baseline",
            VariantId::Ablation1 => "Ablation1",
            VariantId::Ablation2 => "Ablation2",
        }
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything that parameterizes a generation run. A snapshot of this is
/// embedded in each artifact so a run can be reproduced exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    /// Number of planned actions (k). Must be at least 2 so that at least
    /// one action fails before the final one succeeds.
    pub iterations: u32,
    /// Whether to request a foreshadowing clue for each failing chapter.
    pub clue_setup: bool,
    pub revelation_mode: RevelationMode,
    /// Sentence budget appended to interim planning prompts: 3, 4, or 5.
    pub sentence_cap: u8,
    /// Seed for all engine-side randomness (genre sampling).
    pub seed: u64,
    /// Registry id of the chat backend to run against.
    pub backend: String,
    /// Skip genre sampling and use this genre instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genre_override: Option<Genre>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            iterations: 3,
            clue_setup: true,
            revelation_mode: RevelationMode::Beforehand,
            sentence_cap: 3,
            seed: 0,
            backend: "live".to_owned(),
            genre_override: None,
        }
    }
}

/// Provenance for a persisted artifact: enough to re-run it, but nothing
/// that varies between byte-identical runs (no wall-clock timestamps —
/// those live in the run manifest, not the artifact).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub backend: String,
    pub seed: u64,
    pub template_set_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<VariantId>,
    pub temperature: f64,
    pub max_tokens: u32,
}

/// A complete generated story plus the plan and configuration behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoryArtifact {
    pub background: Background,
    pub outline: Outline,
    pub chapters: Vec<Chapter>,
    pub config_snapshot: GenerationConfig,
    pub provenance: Provenance,
}

impl StoryArtifact {
    /// Serializes to pretty JSON with a trailing newline. The output is
    /// byte-deterministic for a given artifact: map keys are ordered and
    /// no timestamps or pointers are embedded.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_artifact(self)
    }
}

/// Stable machine-readable codes for artifact violations. The code set is
/// append-only; tooling may match on these strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EmptyGenre,
    EmptyBackgroundField,
    ActionCount,
    ReasonCount,
    ChapterCount,
    ChapterIndex,
    EventsEmpty,
    RevelationFinal,
    RevelationNonfinal,
    ConfigIterations,
    ConfigSentenceCap,
    VariantOutline,
    VariantChapterCount,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyGenre => "EMPTY_GENRE",
            ViolationCode::EmptyBackgroundField => "EMPTY_BACKGROUND_FIELD",
            ViolationCode::ActionCount => "ACTION_COUNT",
            ViolationCode::ReasonCount => "REASON_COUNT",
            ViolationCode::ChapterCount => "CHAPTER_COUNT",
            ViolationCode::ChapterIndex => "CHAPTER_INDEX",
            ViolationCode::EventsEmpty => "EVENTS_EMPTY",
            ViolationCode::RevelationFinal => "REVELATION_FINAL",
            ViolationCode::RevelationNonfinal => "REVELATION_NONFINAL",
            ViolationCode::ConfigIterations => "CONFIG_ITERATIONS",
            ViolationCode::ConfigSentenceCap => "CONFIG_SENTENCE_CAP",
            ViolationCode::VariantOutline => "VARIANT_OUTLINE",
            ViolationCode::VariantChapterCount => "VARIANT_CHAPTER_COUNT",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One violation found by [`validate_artifact`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

/// All violations found in one pass. An empty report means the artifact is
/// structurally consistent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: ViolationCode, message: impl Into<String>) {
        self.violations.push(Violation {
            code,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("artifact is valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.code, v.message)?;
        }
        Ok(())
    }
}

/// Checks a story artifact for structural consistency and returns every
/// violation found, never just the first.
///
/// Two schemas apply. The iterative-pipeline schema (provenance has no
/// variant) requires a populated outline whose counts line up: at least 2
/// actions, exactly one fewer reason than actions, exactly one chapter per
/// action, chapter indices running 1..=n in order, a revelation on every
/// chapter except the last and none on the last, and non-empty events
/// behind every non-empty chapter body. The single-prompt variant schema
/// (provenance names a variant) requires an empty outline and exactly one
/// chapter, since those generators skip planning entirely. Background
/// completeness and config ranges are checked under both schemas.
pub fn validate_artifact(artifact: &StoryArtifact) -> ValidationReport {
    let mut report = ValidationReport::default();

    if artifact.background.genre.label().trim().is_empty() {
        report.push(ViolationCode::EmptyGenre, "background.genre is empty");
    }
    let text_fields: [(&str, &str); 4] = [
        ("name_occupation", &artifact.background.name_occupation),
        ("goal", &artifact.background.goal),
        ("dire_situation", &artifact.background.dire_situation),
        ("intro_paragraph", &artifact.background.intro_paragraph),
    ];
    for (name, value) in text_fields {
        if value.trim().is_empty() {
            report.push(
                ViolationCode::EmptyBackgroundField,
                format!("background.{name} is empty"),
            );
        }
    }

    let config = &artifact.config_snapshot;
    if config.iterations < 2 {
        report.push(
            ViolationCode::ConfigIterations,
            format!("config.iterations is {}, minimum is 2", config.iterations),
        );
    }
    if !matches!(config.sentence_cap, 3..=5) {
        report.push(
            ViolationCode::ConfigSentenceCap,
            format!(
                "config.sentence_cap is {}, allowed values are 3, 4, 5",
                config.sentence_cap
            ),
        );
    }

    match artifact.provenance.variant {
        Some(variant) => validate_variant_shape(artifact, variant, &mut report),
        None => validate_pipeline_shape(artifact, &mut report),
    }

    validate_chapter_sequence(&artifact.chapters, &mut report);

    report
}

fn validate_pipeline_shape(artifact: &StoryArtifact, report: &mut ValidationReport) {
    let actions = artifact.outline.actions.len();
    let reasons = artifact.outline.reasons.len();
    let chapters = artifact.chapters.len();

    if actions < 2 {
        report.push(
            ViolationCode::ActionCount,
            format!("outline has {actions} action(s), minimum is 2"),
        );
    }
    if actions > 0 && reasons != actions - 1 {
        report.push(
            ViolationCode::ReasonCount,
            format!(
                "outline has {reasons} reason(s) for {actions} action(s); expected {}",
                actions - 1
            ),
        );
    }
    if chapters != actions {
        report.push(
            ViolationCode::ChapterCount,
            format!("artifact has {chapters} chapter(s) for {actions} action(s)"),
        );
    }
    for chapter in &artifact.chapters {
        if !chapter.body.trim().is_empty() && chapter.events.is_empty() {
            report.push(
                ViolationCode::EventsEmpty,
                format!("chapter {} has a body but no events", chapter.index),
            );
        }
    }
}

fn validate_variant_shape(
    artifact: &StoryArtifact,
    variant: VariantId,
    report: &mut ValidationReport,
) {
    if !artifact.outline.is_empty() {
        report.push(
            ViolationCode::VariantOutline,
            format!("{variant} artifact must have an empty outline"),
        );
    }
    if artifact.chapters.len() != 1 {
        report.push(
            ViolationCode::VariantChapterCount,
            format!(
                "{variant} artifact has {} chapter(s); expected exactly 1",
                artifact.chapters.len()
            ),
        );
    }
}

fn validate_chapter_sequence(chapters: &[Chapter], report: &mut ValidationReport) {
    for (pos, chapter) in chapters.iter().enumerate() {
        let expected = (pos + 1) as u32;
        if chapter.index != expected {
            report.push(
                ViolationCode::ChapterIndex,
                format!(
                    "chapter at position {pos} has index {}; expected {expected}",
                    chapter.index
                ),
            );
        }
        let is_final = pos + 1 == chapters.len();
        if is_final && chapter.revelation != Revelation::None {
            report.push(
                ViolationCode::RevelationFinal,
                format!(
                    "final chapter {} has revelation {:?}; the successful chapter has none",
                    chapter.index, chapter.revelation
                ),
            );
        }
        if !is_final && chapter.revelation == Revelation::None {
            report.push(
                ViolationCode::RevelationNonfinal,
                format!(
                    "chapter {} is not final but has no revelation",
                    chapter.index
                ),
            );
        }
    }
}

/// Convenience constructor used by tests and examples: a structurally
/// valid artifact with `k` placeholder actions.
#[doc(hidden)]
pub fn placeholder_artifact(k: usize) -> StoryArtifact {
    let actions: Vec<String> = (1..=k).map(|i| format!("planned action {i}")).collect();
    let reasons: Vec<String> = (1..k).map(|i| format!("failure reason {i}")).collect();
    let chapters: Vec<Chapter> = (1..=k)
        .map(|i| Chapter {
            index: i as u32,
            summary: format!("chapter {i} summary"),
            events: vec![format!("chapter {i} event")],
            body: format!("chapter {i} body"),
            clue_present: i < k,
            revelation: if i < k {
                Revelation::Beforehand
            } else {
                Revelation::None
            },
        })
        .collect();
    StoryArtifact {
        background: Background {
            genre: Genre::new("placeholder genre"),
            name_occupation: "A placeholder protagonist, a test fixture".to_owned(),
            goal: "To exercise the validator".to_owned(),
            dire_situation: "The test suite fails".to_owned(),
            intro_paragraph: "Once upon a test run.".to_owned(),
        },
        outline: Outline { actions, reasons },
        chapters,
        config_snapshot: GenerationConfig {
            iterations: k as u32,
            backend: "replay".to_owned(),
            ..GenerationConfig::default()
        },
        provenance: Provenance {
            backend: "replay".to_owned(),
            seed: 0,
            template_set_version: TEMPLATE_SET_VERSION.to_owned(),
            variant: None,
            temperature: 1.0,
            max_tokens: 1024,
        },
    }
}
