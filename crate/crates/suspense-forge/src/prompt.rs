//! Versioned prompt template registry with strict `$variable` substitution.
//!
//! Every prompt the engine sends comes from this registry; nothing is
//! assembled ad hoc. Templates are identified by dotted names grouped by
//! pipeline stage (`background.*`, `outline.*`, `detail.*`, variants,
//! `misc.*`). Rendering substitutes `$name` placeholders from a
//! [`BindingMap`] and fails on any missing binding, so a template change
//! that introduces a new variable cannot silently produce a prompt with a
//! bare placeholder in it.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Version of the template set. Bump on any byte change to any template;
/// recorded in artifact provenance.
pub const TEMPLATE_SET_VERSION: &str = "1.0.0";

/// The system prompt that opens every dialogue session.
pub const SYSTEM_PROMPT: &str = "You are a creative storyteller.";

/// Identifier for one registered template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateId {
    BackgroundNameOccupation,
    BackgroundGoal,
    BackgroundDireSituation,
    BackgroundIntro,
    OutlineFirstAction,
    OutlineFailureReason,
    OutlineNextAction,
    DetailSummary,
    DetailSummarySuccess,
    DetailEvents,
    DetailEventsSuccess,
    DetailClue,
    DetailRevealBefore,
    DetailRevealAfter,
    DetailElaborate,
    BaselineDirect,
    AblationOne,
    AblationTwo,
    MiscSentenceCap,
    MiscSystem,
}

impl TemplateId {
    /// Every template, in catalog order.
    pub const ALL: [TemplateId; 20] = [
        TemplateId::BackgroundNameOccupation,
        TemplateId::BackgroundGoal,
        TemplateId::BackgroundDireSituation,
        TemplateId::BackgroundIntro,
        TemplateId::OutlineFirstAction,
        TemplateId::OutlineFailureReason,
        TemplateId::OutlineNextAction,
        TemplateId::DetailSummary,
        TemplateId::DetailSummarySuccess,
        TemplateId::DetailEvents,
        TemplateId::DetailEventsSuccess,
        TemplateId::DetailClue,
        TemplateId::DetailRevealBefore,
        TemplateId::DetailRevealAfter,
        TemplateId::DetailElaborate,
        TemplateId::BaselineDirect,
        TemplateId::AblationOne,
        TemplateId::AblationTwo,
        TemplateId::MiscSentenceCap,
        TemplateId::MiscSystem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemplateId::BackgroundNameOccupation => "background.name_occupation",
            TemplateId::BackgroundGoal => "background.goal",
            TemplateId::BackgroundDireSituation => "background.dire_situation",
            TemplateId::BackgroundIntro => "background.intro",
            TemplateId::OutlineFirstAction => "outline.first_action",
            TemplateId::OutlineFailureReason => "outline.failure_reason",
            TemplateId::OutlineNextAction => "outline.next_action",
            TemplateId::DetailSummary => "detail.summary",
            TemplateId::DetailSummarySuccess => "detail.summary_success",
            TemplateId::DetailEvents => "detail.events",
            TemplateId::DetailEventsSuccess => "detail.events_success",
            TemplateId::DetailClue => "detail.clue",
            TemplateId::DetailRevealBefore => "detail.reveal_before",
            TemplateId::DetailRevealAfter => "detail.reveal_after",
            TemplateId::DetailElaborate => "detail.elaborate",
            TemplateId::BaselineDirect => "baseline.direct",
            TemplateId::AblationOne => "ablation.one",
            TemplateId::AblationTwo => "ablation.two",
            TemplateId::MiscSentenceCap => "misc.sentence_cap",
            TemplateId::MiscSystem => "misc.system",
        }
    }

    pub fn parse(name: &str) -> Result<TemplateId, PromptError> {
        TemplateId::ALL
            .into_iter()
            .find(|id| id.name() == name)
            .ok_or_else(|| PromptError::UnknownTemplate(name.to_owned()))
    }

    /// The registered template text, verbatim.
    pub fn text(self) -> &'static str {
        match self {
            TemplateId::BackgroundNameOccupation => {
                "Tell me about the name and the occupation of a protagonist of a $genre."
            }
            TemplateId::BackgroundGoal => {
                "Tell me about a very concrete goal the protagonist wants to achieve."
            }
            TemplateId::BackgroundDireSituation => {
                "Tell me about a dire situation that the protagonist would be put in, \
                 if the protagonist couldn't achieve the goal."
            }
            TemplateId::BackgroundIntro => {
                "Write an introductory paragraph of a story that covers all the above information."
            }
            TemplateId::OutlineFirstAction => {
                "Protagonist's Name and Occupation: $name_occupation\n\
                 Protagonist's Goal: $goal\n\
                 Protagonist's Dire Situation (if the goal is not achieved): $dire_situation\n\
                 Tell me about a concrete action the protagonist is most likely to take, \
                 in order to achieve the goal."
            }
            TemplateId::OutlineFailureReason => {
                "The protagonist tries to perform the following action: $action. \
                 But the protagonist still fails to achieve the goal for a reason. \
                 Tell me about what this reason could be."
            }
            TemplateId::OutlineNextAction => {
                "The protagonist has taken all the following actions: $actions_so_far. \
                 But it turns out that those actions are not effective in helping the \
                 protagonist to achieve the goal, so the goal is still not achieved yet. \
                 Tell me about a concrete new action the protagonist is most likely to \
                 take next, in order to achieve the goal."
            }
            TemplateId::DetailSummary => {
                "Action: $action\n\
                 Reason: $reason\n\
                 Write a short summary for a story chapter in which the protagonist tries \
                 to perform the given action, but the action turns out to be ineffective \
                 due to the given reason."
            }
            TemplateId::DetailSummarySuccess => {
                "Action: $action\n\
                 Write a short summary for a story chapter in which the protagonist \
                 performs the given action, and this time the action succeeds and the \
                 goal is achieved."
            }
            TemplateId::DetailEvents => {
                "Story Chapter Summary: $summary\n\
                 Tell me about a sequence of events that could serve as an outline for \
                 this story chapter, one event per line. Make sure that the protagonist \
                 is not aware that their plan will fail."
            }
            TemplateId::DetailEventsSuccess => {
                "Story Chapter Summary: $summary\n\
                 Tell me about a sequence of events that could serve as an outline for \
                 this story chapter, one event per line."
            }
            TemplateId::DetailClue => {
                "Set up some small clues in the events that hint at the upcoming failure \
                 of the protagonist's action, so that readers can anticipate the failure. \
                 Tell me about those clues."
            }
            TemplateId::DetailRevealBefore => {
                "Before the chapter is told, reveal to the readers the reason why the \
                 protagonist's action is going to fail, while the protagonist remains \
                 unaware of it. Write this revelation as a short passage addressed to \
                 the readers."
            }
            TemplateId::DetailRevealAfter => {
                "Now that the chapter has been told, reveal to the readers the reason \
                 why the protagonist's action was doomed to fail from the beginning. \
                 Write this revelation as a short passage addressed to the readers."
            }
            TemplateId::DetailElaborate => {
                "Sequence of Events: $events\n\
                 Write the full text of this story chapter by elaborating on the details \
                 of every event in the sequence."
            }
            TemplateId::BaselineDirect => {
                "Story Background: $name_occupation. $goal. \
                 Write a full suspenseful story based on the story background."
            }
            TemplateId::AblationOne => {
                "Story Background: $name_occupation. $goal.\n\
                 Action #1: $action1\n\
                 Reason #1: $reason1\n\
                 Action #2: $action2\n\
                 Reason #2: $reason2\n\
                 Action #3: $action3\n\
                 Story Summary: Aiming to achieve the goal: $goal, the protagonist first \
                 tries to take Action #1, but fails due to Reason #1; then tries to take \
                 Action #2, but fails due to Reason #2; finally tries to take Action #3 \
                 and this time the protagonist successfully achieves the goal.\n\
                 Write a full suspenseful story based on the story summary."
            }
            TemplateId::AblationTwo => {
                "Story Background: $name_occupation. $goal.\n\
                 Story Summary: Aiming to achieve the goal: $goal, the protagonist first \
                 tries to take a first action, but fails due to a reason; then tries to \
                 take another new action, but fails due to another reason; finally tries \
                 to take a new action and this time the protagonist successfully achieves \
                 the goal.\n\
                 Write a full suspenseful story based on the story summary."
            }
            TemplateId::MiscSentenceCap => "Use no more than $n sentences in your answer.",
            TemplateId::MiscSystem => SYSTEM_PROMPT,
        }
    }

    /// Names of the variables referenced by this template, in order of
    /// first appearance.
    pub fn variables(self) -> Vec<String> {
        let mut seen = Vec::new();
        let text = self.text();
        let mut rest = text;
        while let Some(pos) = rest.find('$') {
            rest = &rest[pos + 1..];
            let end = rest
                .find(|c: char| !(c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'))
                .unwrap_or(rest.len());
            if end > 0 {
                let name = &rest[..end];
                if !seen.iter().any(|s| s == name) {
                    seen.push(name.to_owned());
                }
                rest = &rest[end..];
            }
        }
        seen
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for TemplateId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for TemplateId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        TemplateId::parse(&name).map_err(D::Error::custom)
    }
}

/// Everything that can go wrong while rendering a template.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("unknown template: {0}")]
    UnknownTemplate(String),
    #[error("template {template} references ${variable} but no binding was supplied")]
    MissingBinding {
        template: &'static str,
        variable: String,
    },
    #[error("{0} is not a recognized template variable")]
    UnknownVariable(String),
    #[error("binding for {0} must not be empty")]
    EmptyValue(String),
    #[error("sentence cap must be 3, 4, or 5; got {0}")]
    UnsupportedCap(u8),
    #[error("cannot render an empty actions list")]
    EmptyActions,
}

/// Whether `name` belongs to the fixed template variable vocabulary.
/// Indexed forms `action1`, `reason2`, … are accepted for any index.
fn is_known_variable(name: &str) -> bool {
    const BASE: [&str; 10] = [
        "genre",
        "name_occupation",
        "goal",
        "dire_situation",
        "action",
        "reason",
        "actions_so_far",
        "summary",
        "events",
        "n",
    ];
    if BASE.contains(&name) {
        return true;
    }
    for prefix in ["action", "reason"] {
        if let Some(rest) = name.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return true;
            }
        }
    }
    false
}

/// Variable bindings for one render call. Insertion validates that the
/// variable name belongs to the vocabulary and the value is non-empty;
/// both rules catch wiring bugs long before a prompt reaches a model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BindingMap {
    values: BTreeMap<String, String>,
}

impl BindingMap {
    pub fn new() -> Self {
        BindingMap::default()
    }

    pub fn insert(
        &mut self,
        name: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<&mut Self, PromptError> {
        let name = name.into();
        let value = value.into();
        if !is_known_variable(&name) {
            return Err(PromptError::UnknownVariable(name));
        }
        if value.is_empty() {
            return Err(PromptError::EmptyValue(name));
        }
        self.values.insert(name, value);
        Ok(self)
    }

    /// Builder-style insert that panics on invalid input; intended for
    /// call sites where the variable name is a literal.
    pub fn with(mut self, name: &str, value: impl Into<String>) -> Self {
        self.insert(name, value).expect("valid binding");
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Renders a template by substituting every `$variable` placeholder from
/// `bindings`. Substitution is strict (a missing binding is an error) and
/// single-pass (binding values are never re-scanned, so a value containing
/// `$` renders literally).
pub fn render(id: TemplateId, bindings: &BindingMap) -> Result<String, PromptError> {
    let text = id.text();
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find('$') {
        out.push_str(&rest[..pos]);
        rest = &rest[pos + 1..];
        let end = rest
            .find(|c: char| !(c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'))
            .unwrap_or(rest.len());
        if end == 0 {
            out.push('$');
            continue;
        }
        let name = &rest[..end];
        match bindings.get(name) {
            Some(value) => out.push_str(value),
            None => {
                return Err(PromptError::MissingBinding {
                    template: id.name(),
                    variable: name.to_owned(),
                })
            }
        }
        rest = &rest[end..];
    }
    out.push_str(rest);
    Ok(out)
}

/// The sentence-budget suffix appended to interim-information prompts.
/// Only 3, 4, and 5 are supported, spelled out as words.
pub fn sentence_cap_suffix(n: u8) -> Result<String, PromptError> {
    let word = match n {
        3 => "three",
        4 => "four",
        5 => "five",
        other => return Err(PromptError::UnsupportedCap(other)),
    };
    let bindings = BindingMap::new().with("n", word);
    render(TemplateId::MiscSentenceCap, &bindings)
}

/// Formats prior actions as the bracketed, comma-separated list embedded
/// in the next-action prompt: `[first action, second action]`.
pub fn render_actions_list<S: AsRef<str>>(actions: &[S]) -> Result<String, PromptError> {
    if actions.is_empty() {
        return Err(PromptError::EmptyActions);
    }
    let mut out = String::from("[");
    for (i, action) in actions.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(action.as_ref());
    }
    out.push(']');
    Ok(out)
}

/// Human-readable dump of the whole template set, used by the CLI's
/// `templates` subcommand and by audits.
pub fn catalog() -> String {
    let mut out = format!("template set {TEMPLATE_SET_VERSION}\n");
    out.push_str(&format!("{} templates\n", TemplateId::ALL.len()));
    for id in TemplateId::ALL {
        out.push_str("\n== ");
        out.push_str(id.name());
        out.push_str(" ==\n");
        out.push_str(id.text());
        out.push('\n');
    }
    out
}
