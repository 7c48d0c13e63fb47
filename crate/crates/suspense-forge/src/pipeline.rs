//! The three-stage story engine: background setup, iterative outline
//! planning, and chapter-by-chapter detail elaboration.
//!
//! Stage one asks who the protagonist is, what they want, what happens on
//! failure, and for an opening paragraph. Stage two alternates action and
//! failure-reason prompts for `k` iterations — every action prompt after
//! the first restates all prior actions, and the final action gets no
//! failure reason so the protagonist can succeed. Stage three turns each
//! (action, reason) pair into a chapter: summary, event sequence,
//! optional foreshadowing clue, a failure revelation placed before or
//! after the chapter text, and the full elaboration.
//!
//! One dialogue session spans stages one and two (the planning prompts
//! build on the session context); each chapter is elaborated in a fresh
//! session so long stories cannot overflow the context window. Every
//! exchange is captured in a [`StageTrace`] for audit and testing.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

use crate::gateway::{CompletionParams, Gateway, GatewayError, SessionHandle};
use crate::prompt::{
    render, render_actions_list, sentence_cap_suffix, BindingMap, PromptError, TemplateId,
    TEMPLATE_SET_VERSION,
};
use crate::story::{
    Background, Chapter, GenerationConfig, Genre, Outline, Provenance, Revelation, RevelationMode,
    StoryArtifact,
};

/// Raw bundled genre catalog, one genre per line.
static GENRES_RAW: &str = include_str!("../data/genres.txt");

/// The bundled catalog of suspenseful story genres.
pub fn bundled_genres() -> &'static [&'static str] {
    static GENRES: OnceLock<Vec<&'static str>> = OnceLock::new();
    GENRES.get_or_init(|| {
        GENRES_RAW
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .collect()
    })
}

/// Uniform, seed-determined draw from a genre catalog.
pub fn sample_genre<S: AsRef<str>>(seed: u64, catalog: &[S]) -> Result<Genre, PipelineError> {
    if catalog.is_empty() {
        return Err(PipelineError::EmptyCatalog);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index = rng.gen_range(0..catalog.len());
    Ok(Genre::new(catalog[index].as_ref()))
}

/// One prompt/response exchange, tagged with the template that produced
/// the prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exchange {
    pub template: TemplateId,
    pub prompt: String,
    pub response: String,
}

/// Which pipeline stage a trace entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageKind {
    Background,
    Outline,
    Chapter { index: u32 },
    Variant,
}

impl std::fmt::Display for StageKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StageKind::Background => f.write_str("background"),
            StageKind::Outline => f.write_str("outline"),
            StageKind::Chapter { index } => write!(f, "chapter-{index}"),
            StageKind::Variant => f.write_str("variant"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageLog {
    pub stage: StageKind,
    pub exchanges: Vec<Exchange>,
}

/// The full prompt/response record of a run, stage by stage, in
/// execution order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageTrace {
    pub stages: Vec<StageLog>,
}

impl StageTrace {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn stage(&self, kind: StageKind) -> Option<&StageLog> {
        self.stages.iter().find(|s| s.stage == kind)
    }

    pub fn all_exchanges(&self) -> impl Iterator<Item = &Exchange> {
        self.stages.iter().flat_map(|s| s.exchanges.iter())
    }

    /// Count of exchanges using a given template across all stages.
    pub fn count_template(&self, template: TemplateId) -> usize {
        self.all_exchanges()
            .filter(|e| e.template == template)
            .count()
    }
}

/// Result of a full generation run: the artifact plus its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOutcome {
    pub artifact: StoryArtifact,
    pub trace: StageTrace,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("genre catalog is empty")]
    EmptyCatalog,
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error("model returned an empty response for {step}, even after a retry")]
    EmptyResponse { step: String },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("{stage} stage failed after {completed} exchange(s): {source}")]
    Stage {
        stage: String,
        completed: usize,
        #[source]
        source: Box<PipelineError>,
    },
}

fn stage_failure(stage: StageKind, completed: usize, source: PipelineError) -> PipelineError {
    PipelineError::Stage {
        stage: stage.to_string(),
        completed,
        source: Box::new(source),
    }
}

/// Checks the fields a run cannot proceed without. The same rules are
/// enforced post-hoc by artifact validation; checking up front gives the
/// caller a config error instead of a half-finished run.
pub fn validate_config(config: &GenerationConfig) -> Result<(), PipelineError> {
    if config.iterations < 2 {
        return Err(PipelineError::InvalidConfig(format!(
            "iterations must be at least 2, got {}",
            config.iterations
        )));
    }
    if !matches!(config.sentence_cap, 3..=5) {
        return Err(PipelineError::InvalidConfig(format!(
            "sentence cap must be 3, 4, or 5, got {}",
            config.sentence_cap
        )));
    }
    if config.backend.trim().is_empty() {
        return Err(PipelineError::InvalidConfig(
            "backend id must not be empty".to_owned(),
        ));
    }
    if let Some(genre) = &config.genre_override {
        if genre.label().trim().is_empty() {
            return Err(PipelineError::InvalidConfig(
                "genre override must not be empty".to_owned(),
            ));
        }
    }
    Ok(())
}

/// Drives the staged generation against a [`Gateway`].
pub struct StoryEngine<'g> {
    gateway: &'g Gateway,
    params: CompletionParams,
}

impl<'g> StoryEngine<'g> {
    pub fn new(gateway: &'g Gateway) -> Self {
        StoryEngine {
            gateway,
            params: CompletionParams::default(),
        }
    }

    pub fn with_params(gateway: &'g Gateway, params: CompletionParams) -> Self {
        StoryEngine { gateway, params }
    }

    pub fn params(&self) -> &CompletionParams {
        &self.params
    }

    pub fn gateway(&self) -> &Gateway {
        self.gateway
    }

    /// Sends one templated prompt, optionally suffixed with the sentence
    /// cap, and logs the exchange. A blank response is retried once with
    /// the identical prompt before giving up.
    fn ask(
        &self,
        session: &mut SessionHandle,
        template: TemplateId,
        bindings: &BindingMap,
        cap: Option<u8>,
        step: &str,
        log: &mut Vec<Exchange>,
    ) -> Result<String, PipelineError> {
        let mut prompt = render(template, bindings)?;
        if let Some(n) = cap {
            prompt.push(' ');
            prompt.push_str(&sentence_cap_suffix(n)?);
        }
        let response = self.gateway.complete(session, &prompt, &self.params)?;
        log.push(Exchange {
            template,
            prompt: prompt.clone(),
            response: response.clone(),
        });
        if !response.trim().is_empty() {
            return Ok(response);
        }
        let retry = self.gateway.complete(session, &prompt, &self.params)?;
        log.push(Exchange {
            template,
            prompt,
            response: retry.clone(),
        });
        if retry.trim().is_empty() {
            return Err(PipelineError::EmptyResponse {
                step: step.to_owned(),
            });
        }
        Ok(retry)
    }

    /// Stage one: four prompts (name/occupation, goal, dire situation,
    /// introductory paragraph) on a fresh session. The first three are
    /// interim information and carry the sentence cap; the intro prompt
    /// does not.
    pub fn background_setup(
        &self,
        session: &mut SessionHandle,
        genre: &Genre,
        cap: u8,
        log: &mut Vec<Exchange>,
    ) -> Result<Background, PipelineError> {
        let mut bindings = BindingMap::new();
        bindings.insert("genre", genre.label())?;
        let name_occupation = self.ask(
            session,
            TemplateId::BackgroundNameOccupation,
            &bindings,
            Some(cap),
            "name_occupation",
            log,
        )?;
        let empty = BindingMap::new();
        let goal = self.ask(
            session,
            TemplateId::BackgroundGoal,
            &empty,
            Some(cap),
            "goal",
            log,
        )?;
        let dire_situation = self.ask(
            session,
            TemplateId::BackgroundDireSituation,
            &empty,
            Some(cap),
            "dire_situation",
            log,
        )?;
        let intro_paragraph = self.ask(
            session,
            TemplateId::BackgroundIntro,
            &empty,
            None,
            "intro",
            log,
        )?;
        Ok(Background {
            genre: genre.clone(),
            name_occupation,
            goal,
            dire_situation,
            intro_paragraph,
        })
    }

    /// Stage two: k action prompts interleaved with k−1 failure-reason
    /// prompts (the final action succeeds, so it gets no reason). The
    /// first action prompt restates the background header; every later
    /// action prompt embeds the bracketed list of all prior actions.
    pub fn plan_outline(
        &self,
        session: &mut SessionHandle,
        background: &Background,
        k: u32,
        cap: u8,
        log: &mut Vec<Exchange>,
    ) -> Result<Outline, PipelineError> {
        if k < 2 {
            return Err(PipelineError::InvalidConfig(format!(
                "iterations must be at least 2, got {k}"
            )));
        }
        let mut actions: Vec<String> = Vec::with_capacity(k as usize);
        let mut reasons: Vec<String> = Vec::with_capacity(k as usize - 1);
        for i in 1..=k {
            let action = if i == 1 {
                let mut bindings = BindingMap::new();
                bindings.insert("name_occupation", &background.name_occupation)?;
                bindings.insert("goal", &background.goal)?;
                bindings.insert("dire_situation", &background.dire_situation)?;
                self.ask(
                    session,
                    TemplateId::OutlineFirstAction,
                    &bindings,
                    Some(cap),
                    "action_1",
                    log,
                )?
            } else {
                let mut bindings = BindingMap::new();
                bindings.insert("actions_so_far", render_actions_list(&actions)?)?;
                self.ask(
                    session,
                    TemplateId::OutlineNextAction,
                    &bindings,
                    Some(cap),
                    &format!("action_{i}"),
                    log,
                )?
            };
            actions.push(action);
            if i < k {
                let mut bindings = BindingMap::new();
                bindings.insert("action", actions.last().expect("just pushed"))?;
                let reason = self.ask(
                    session,
                    TemplateId::OutlineFailureReason,
                    &bindings,
                    Some(cap),
                    &format!("reason_{i}"),
                    log,
                )?;
                reasons.push(reason);
            }
        }
        Ok(Outline { actions, reasons })
    }

    /// Stage three for one chapter, on a fresh session. `reason` is
    /// present for every chapter except the final, successful one.
    ///
    /// Exchange order for a failing chapter: summary → events → clue
    /// (when enabled) → revelation and elaboration in the order given by
    /// `config.revelation_mode`. The final chapter issues only summary,
    /// events, and elaboration.
    pub fn elaborate_chapter(
        &self,
        session: &mut SessionHandle,
        action: &str,
        reason: Option<&str>,
        index: u32,
        config: &GenerationConfig,
        log: &mut Vec<Exchange>,
    ) -> Result<Chapter, PipelineError> {
        let cap = config.sentence_cap;
        let summary = match reason {
            Some(reason) => {
                let mut bindings = BindingMap::new();
                bindings.insert("action", action)?;
                bindings.insert("reason", reason)?;
                self.ask(
                    session,
                    TemplateId::DetailSummary,
                    &bindings,
                    Some(cap),
                    "summary",
                    log,
                )?
            }
            None => {
                let mut bindings = BindingMap::new();
                bindings.insert("action", action)?;
                self.ask(
                    session,
                    TemplateId::DetailSummarySuccess,
                    &bindings,
                    Some(cap),
                    "summary",
                    log,
                )?
            }
        };

        let events_template = if reason.is_some() {
            TemplateId::DetailEvents
        } else {
            TemplateId::DetailEventsSuccess
        };
        let mut bindings = BindingMap::new();
        bindings.insert("summary", &summary)?;
        let events_text = self.ask(session, events_template, &bindings, None, "events", log)?;
        let events: Vec<String> = events_text
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .map(str::to_owned)
            .collect();

        let clue_present = config.clue_setup && reason.is_some();
        if clue_present {
            self.ask(
                session,
                TemplateId::DetailClue,
                &BindingMap::new(),
                None,
                "clue",
                log,
            )?;
        }

        let mut elaborate_bindings = BindingMap::new();
        elaborate_bindings.insert("events", &events_text)?;
        let empty = BindingMap::new();

        let (body, revelation) = match reason {
            None => {
                let body = self.ask(
                    session,
                    TemplateId::DetailElaborate,
                    &elaborate_bindings,
                    None,
                    "elaborate",
                    log,
                )?;
                (body, Revelation::None)
            }
            Some(_) => match config.revelation_mode {
                RevelationMode::Beforehand => {
                    let reveal = self.ask(
                        session,
                        TemplateId::DetailRevealBefore,
                        &empty,
                        None,
                        "reveal",
                        log,
                    )?;
                    let elaborated = self.ask(
                        session,
                        TemplateId::DetailElaborate,
                        &elaborate_bindings,
                        None,
                        "elaborate",
                        log,
                    )?;
                    (format!("{reveal}\n\n{elaborated}"), Revelation::Beforehand)
                }
                RevelationMode::AfterTheFact => {
                    let elaborated = self.ask(
                        session,
                        TemplateId::DetailElaborate,
                        &elaborate_bindings,
                        None,
                        "elaborate",
                        log,
                    )?;
                    let reveal = self.ask(
                        session,
                        TemplateId::DetailRevealAfter,
                        &empty,
                        None,
                        "reveal",
                        log,
                    )?;
                    (
                        format!("{elaborated}\n\n{reveal}"),
                        Revelation::AfterTheFact,
                    )
                }
            },
        };

        Ok(Chapter {
            index,
            summary,
            events,
            body,
            clue_present,
            revelation,
        })
    }

    /// A complete run: genre (sampled or overridden) → background →
    /// outline → one chapter per action. Returns the artifact and the
    /// full trace; the artifact always passes validation by construction.
    pub fn generate_story(
        &self,
        config: &GenerationConfig,
    ) -> Result<GenerationOutcome, PipelineError> {
        validate_config(config)?;
        let genre = match &config.genre_override {
            Some(genre) => genre.clone(),
            None => sample_genre(config.seed, bundled_genres())?,
        };

        let mut trace = StageTrace::default();

        let mut session = self.gateway.open_session(&config.backend)?;
        let mut log = Vec::new();
        let background =
            match self.background_setup(&mut session, &genre, config.sentence_cap, &mut log) {
                Ok(background) => background,
                Err(err) => return Err(stage_failure(StageKind::Background, log.len(), err)),
            };
        trace.stages.push(StageLog {
            stage: StageKind::Background,
            exchanges: log,
        });

        let mut log = Vec::new();
        let outline = match self.plan_outline(
            &mut session,
            &background,
            config.iterations,
            config.sentence_cap,
            &mut log,
        ) {
            Ok(outline) => outline,
            Err(err) => return Err(stage_failure(StageKind::Outline, log.len(), err)),
        };
        trace.stages.push(StageLog {
            stage: StageKind::Outline,
            exchanges: log,
        });

        let mut chapters = Vec::with_capacity(outline.actions.len());
        for (i, action) in outline.actions.iter().enumerate() {
            let index = (i + 1) as u32;
            let reason = outline.reasons.get(i).map(String::as_str);
            let stage = StageKind::Chapter { index };
            let mut chapter_session = self.gateway.open_session(&config.backend)?;
            let mut log = Vec::new();
            let chapter = match self.elaborate_chapter(
                &mut chapter_session,
                action,
                reason,
                index,
                config,
                &mut log,
            ) {
                Ok(chapter) => chapter,
                Err(err) => return Err(stage_failure(stage, log.len(), err)),
            };
            trace.stages.push(StageLog {
                stage,
                exchanges: log,
            });
            chapters.push(chapter);
        }

        let artifact = StoryArtifact {
            background,
            outline,
            chapters,
            config_snapshot: config.clone(),
            provenance: Provenance {
                backend: config.backend.clone(),
                seed: config.seed,
                template_set_version: TEMPLATE_SET_VERSION.to_owned(),
                variant: None,
                temperature: self.params.temperature,
                max_tokens: self.params.max_tokens,
            },
        };
        debug_assert!(
            artifact.validate().is_empty(),
            "freshly generated artifact must validate: {}",
            artifact.validate()
        );
        Ok(GenerationOutcome { artifact, trace })
    }
}
