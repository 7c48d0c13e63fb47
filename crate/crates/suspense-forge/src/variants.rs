//! Single-prompt comparison variants: the direct baseline and two
//! ablations.
//!
//! Each variant turns the engine's planning products into exactly one
//! completion call, so preference studies compare story *construction*
//! strategies while holding the underlying model and the background
//! conditioning fixed:
//!
//! * **Baseline** — background only, "write a full suspenseful story".
//! * **Ablation #1** — background plus the concrete outline (every
//!   action and failure reason), collapsed into a single story-summary
//!   prompt instead of chapter-by-chapter elaboration.
//! * **Ablation #2** — background plus an *abstract* try-fail-try-fail-
//!   succeed summary that names no concrete action, isolating the value
//!   of real outline content.
//!
//! The prompts embed the same `name_occupation` and `goal` strings the
//! main pipeline used, byte for byte, which keeps comparisons fair.
//! Variant artifacts reuse [`StoryArtifact`] with an empty outline and a
//! single chapter; provenance records which variant produced them.

use thiserror::Error;

use crate::gateway::{GatewayError, SessionHandle};
use crate::pipeline::{Exchange, GenerationOutcome, StageKind, StageLog, StageTrace, StoryEngine};
use crate::prompt::{render, BindingMap, PromptError, TemplateId, TEMPLATE_SET_VERSION};
use crate::story::{
    Background, Chapter, GenerationConfig, Outline, Provenance, Revelation, StoryArtifact,
    VariantId,
};

/// How strictly ablation #1 holds the outline to the three-action shape
/// its canonical template enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArityPolicy {
    /// Require exactly 3 actions / 2 reasons and render the canonical
    /// registry template verbatim.
    Strict3,
    /// Accept any outline with `k ≥ 2` actions and `k − 1` reasons by
    /// repeating the "tries … but fails due to" clause. At `k = 3` the
    /// generalized prompt is byte-identical to the canonical template.
    #[default]
    Generalize,
}

#[derive(Debug, Error)]
pub enum VariantError {
    #[error("outline arity mismatch: {detail}")]
    ArityMismatch { detail: String },
    #[error("model returned an empty response for the {variant} variant, even after a retry")]
    EmptyResponse { variant: VariantId },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

fn arity_mismatch(detail: impl Into<String>) -> VariantError {
    VariantError::ArityMismatch {
        detail: detail.into(),
    }
}

/// Renders the direct-baseline prompt from a background.
pub fn baseline_prompt(background: &Background) -> Result<String, VariantError> {
    let mut bindings = BindingMap::new();
    bindings.insert("name_occupation", &background.name_occupation)?;
    bindings.insert("goal", &background.goal)?;
    Ok(render(TemplateId::BaselineDirect, &bindings)?)
}

/// Renders the ablation #1 prompt: background plus the full outline,
/// folded into one story summary.
pub fn ablation_one_prompt(
    background: &Background,
    outline: &Outline,
    policy: ArityPolicy,
) -> Result<String, VariantError> {
    let k = outline.actions.len();
    if k < 2 {
        return Err(arity_mismatch(format!(
            "outline has {k} action(s); the summary needs at least 2"
        )));
    }
    if outline.reasons.len() != k - 1 {
        return Err(arity_mismatch(format!(
            "outline has {} reason(s) for {k} action(s); expected {}",
            outline.reasons.len(),
            k - 1
        )));
    }

    match policy {
        ArityPolicy::Strict3 => {
            if k != 3 {
                return Err(arity_mismatch(format!(
                    "strict policy renders the canonical 3-action template, got {k} action(s)"
                )));
            }
            let mut bindings = BindingMap::new();
            bindings.insert("name_occupation", &background.name_occupation)?;
            bindings.insert("goal", &background.goal)?;
            bindings.insert("action1", &outline.actions[0])?;
            bindings.insert("reason1", &outline.reasons[0])?;
            bindings.insert("action2", &outline.actions[1])?;
            bindings.insert("reason2", &outline.reasons[1])?;
            bindings.insert("action3", &outline.actions[2])?;
            Ok(render(TemplateId::AblationOne, &bindings)?)
        }
        ArityPolicy::Generalize => {
            let mut prompt = format!(
                "Story Background: {}. {}.\n",
                background.name_occupation, background.goal
            );
            for (i, action) in outline.actions.iter().enumerate() {
                prompt.push_str(&format!("Action #{}: {action}\n", i + 1));
                if let Some(reason) = outline.reasons.get(i) {
                    prompt.push_str(&format!("Reason #{}: {reason}\n", i + 1));
                }
            }
            prompt.push_str(&format!(
                "Story Summary: Aiming to achieve the goal: {}, the protagonist first \
                 tries to take Action #1, but fails due to Reason #1",
                background.goal
            ));
            for i in 2..k {
                prompt.push_str(&format!(
                    "; then tries to take Action #{i}, but fails due to Reason #{i}"
                ));
            }
            prompt.push_str(&format!(
                "; finally tries to take Action #{k} and this time the protagonist \
                 successfully achieves the goal.\n"
            ));
            prompt.push_str("Write a full suspenseful story based on the story summary.");
            Ok(prompt)
        }
    }
}

/// Renders the ablation #2 prompt: background plus the abstract summary
/// that names no concrete action.
pub fn ablation_two_prompt(background: &Background) -> Result<String, VariantError> {
    let mut bindings = BindingMap::new();
    bindings.insert("name_occupation", &background.name_occupation)?;
    bindings.insert("goal", &background.goal)?;
    Ok(render(TemplateId::AblationTwo, &bindings)?)
}

/// Sends the single variant prompt, retrying once if the reply is blank,
/// and wraps the response into a one-chapter artifact.
fn run_variant(
    engine: &StoryEngine<'_>,
    session: &mut SessionHandle,
    background: &Background,
    variant: VariantId,
    template: TemplateId,
    prompt: String,
    config: &GenerationConfig,
) -> Result<GenerationOutcome, VariantError> {
    let gateway = engine.gateway();
    let params = engine.params();
    let mut exchanges = Vec::new();

    let response = gateway.complete(session, &prompt, params)?;
    exchanges.push(Exchange {
        template,
        prompt: prompt.clone(),
        response: response.clone(),
    });
    let body = if response.trim().is_empty() {
        let retry = gateway.complete(session, &prompt, params)?;
        exchanges.push(Exchange {
            template,
            prompt,
            response: retry.clone(),
        });
        if retry.trim().is_empty() {
            return Err(VariantError::EmptyResponse { variant });
        }
        retry
    } else {
        response
    };

    let artifact = StoryArtifact {
        background: background.clone(),
        outline: Outline::default(),
        chapters: vec![Chapter {
            index: 1,
            summary: String::new(),
            events: Vec::new(),
            body,
            clue_present: false,
            revelation: Revelation::None,
        }],
        config_snapshot: config.clone(),
        provenance: Provenance {
            backend: session.backend().to_owned(),
            seed: config.seed,
            template_set_version: TEMPLATE_SET_VERSION.to_owned(),
            variant: Some(variant),
            temperature: params.temperature,
            max_tokens: params.max_tokens,
        },
    };
    debug_assert!(
        artifact.validate().is_empty(),
        "variant artifact must validate: {}",
        artifact.validate()
    );

    let trace = StageTrace {
        stages: vec![StageLog {
            stage: StageKind::Variant,
            exchanges,
        }],
    };
    Ok(GenerationOutcome { artifact, trace })
}

/// Direct baseline: one prompt from the background alone.
pub fn generate_baseline(
    engine: &StoryEngine<'_>,
    session: &mut SessionHandle,
    background: &Background,
    config: &GenerationConfig,
) -> Result<GenerationOutcome, VariantError> {
    let prompt = baseline_prompt(background)?;
    run_variant(
        engine,
        session,
        background,
        VariantId::Baseline,
        TemplateId::BaselineDirect,
        prompt,
        config,
    )
}

/// Ablation #1: one prompt from the background plus the concrete outline.
pub fn generate_ablation1(
    engine: &StoryEngine<'_>,
    session: &mut SessionHandle,
    background: &Background,
    outline: &Outline,
    policy: ArityPolicy,
    config: &GenerationConfig,
) -> Result<GenerationOutcome, VariantError> {
    let prompt = ablation_one_prompt(background, outline, policy)?;
    run_variant(
        engine,
        session,
        background,
        VariantId::Ablation1,
        TemplateId::AblationOne,
        prompt,
        config,
    )
}

/// Ablation #2: one prompt from the background plus the abstract
/// try-fail summary.
pub fn generate_ablation2(
    engine: &StoryEngine<'_>,
    session: &mut SessionHandle,
    background: &Background,
    config: &GenerationConfig,
) -> Result<GenerationOutcome, VariantError> {
    let prompt = ablation_two_prompt(background)?;
    run_variant(
        engine,
        session,
        background,
        VariantId::Ablation2,
        TemplateId::AblationTwo,
        prompt,
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{Gateway, ScriptedBackend};
    use crate::story::Genre;

    fn background() -> Background {
        Background {
            genre: Genre::new("spy thriller"),
            name_occupation: "Max Sterling, a highly skilled agent".to_owned(),
            goal: "Recover the stolen plans".to_owned(),
            dire_situation: "The city will fall".to_owned(),
            intro_paragraph: "An opening paragraph.".to_owned(),
        }
    }

    fn outline(k: usize) -> Outline {
        Outline {
            actions: (1..=k).map(|i| format!("do thing {i}")).collect(),
            reasons: (1..k).map(|i| format!("setback {i}")).collect(),
        }
    }

    fn mock_gateway() -> Gateway {
        let mut gateway = Gateway::new();
        gateway.register("mock", Box::new(ScriptedBackend::sequential("variant")));
        gateway
    }

    #[test]
    fn baseline_prompt_is_the_golden_string() {
        let prompt = baseline_prompt(&background()).unwrap();
        assert_eq!(
            prompt,
            "Story Background: Max Sterling, a highly skilled agent. Recover the stolen \
             plans. Write a full suspenseful story based on the story background."
        );
        assert!(prompt.starts_with("Story Background: Max Sterling, a highly skilled"));
    }

    #[test]
    fn baseline_makes_exactly_one_call_and_validates() {
        let gateway = mock_gateway();
        let engine = StoryEngine::new(&gateway);
        let mut session = gateway.open_session("mock").unwrap();
        let config = GenerationConfig::default();
        let outcome = generate_baseline(&engine, &mut session, &background(), &config).unwrap();

        assert_eq!(outcome.trace.all_exchanges().count(), 1);
        let artifact = &outcome.artifact;
        assert!(artifact.outline.is_empty());
        assert_eq!(artifact.chapters.len(), 1);
        assert_eq!(artifact.chapters[0].body, "variant reply 1");
        assert_eq!(artifact.provenance.variant, Some(VariantId::Baseline));
        assert!(artifact.validate().is_empty());
    }

    #[test]
    fn generalized_ablation_one_matches_the_canonical_template_at_k3() {
        let bg = background();
        let ol = outline(3);
        let strict = ablation_one_prompt(&bg, &ol, ArityPolicy::Strict3).unwrap();
        let general = ablation_one_prompt(&bg, &ol, ArityPolicy::Generalize).unwrap();
        assert_eq!(strict, general);
        assert!(strict.contains("but fails due to Reason #1"));
        assert!(strict.contains("Reason #1: setback 1"));
        assert!(strict.contains("Action #3: do thing 3"));
        assert!(strict.ends_with("Write a full suspenseful story based on the story summary."));
    }

    #[test]
    fn ablation_one_k3_lists_three_actions_and_two_reasons() {
        let prompt = ablation_one_prompt(&background(), &outline(3), ArityPolicy::Strict3).unwrap();
        let action_lines = prompt.lines().filter(|l| l.starts_with("Action #")).count();
        let reason_lines = prompt.lines().filter(|l| l.starts_with("Reason #")).count();
        assert_eq!(action_lines, 3);
        assert_eq!(reason_lines, 2);
    }

    #[test]
    fn strict_policy_rejects_other_arities() {
        let err = ablation_one_prompt(&background(), &outline(2), ArityPolicy::Strict3).unwrap_err();
        assert!(matches!(err, VariantError::ArityMismatch { .. }), "{err:?}");
    }

    #[test]
    fn generalized_policy_handles_k2_and_k5() {
        let p2 = ablation_one_prompt(&background(), &outline(2), ArityPolicy::Generalize).unwrap();
        assert!(p2.contains("first tries to take Action #1, but fails due to Reason #1; \
                             finally tries to take Action #2"));
        assert!(!p2.contains("then tries"));

        let p5 = ablation_one_prompt(&background(), &outline(5), ArityPolicy::Generalize).unwrap();
        for i in 2..=4 {
            assert!(p5.contains(&format!(
                "then tries to take Action #{i}, but fails due to Reason #{i}"
            )));
        }
        assert!(p5.contains("finally tries to take Action #5"));
        assert_eq!(p5.lines().filter(|l| l.starts_with("Action #")).count(), 5);
    }

    #[test]
    fn mismatched_reason_count_is_rejected_under_both_policies() {
        let mut ol = outline(3);
        ol.reasons.pop();
        for policy in [ArityPolicy::Strict3, ArityPolicy::Generalize] {
            let err = ablation_one_prompt(&background(), &ol, policy).unwrap_err();
            assert!(matches!(err, VariantError::ArityMismatch { .. }));
        }
    }

    #[test]
    fn ablation_two_names_no_concrete_action() {
        let ol = outline(3);
        let prompt = ablation_two_prompt(&background()).unwrap();
        for action in &ol.actions {
            assert!(!prompt.contains(action.as_str()));
        }
        for reason in &ol.reasons {
            assert!(!prompt.contains(reason.as_str()));
        }
        assert!(prompt.contains(
            "finally tries to take a new action and this time the protagonist \
             successfully achieves the goal"
        ));
    }

    #[test]
    fn variant_prompts_embed_the_exact_background_strings() {
        let bg = background();
        for prompt in [
            baseline_prompt(&bg).unwrap(),
            ablation_one_prompt(&bg, &outline(3), ArityPolicy::Strict3).unwrap(),
            ablation_two_prompt(&bg).unwrap(),
        ] {
            assert!(prompt.contains(&bg.name_occupation));
            assert!(prompt.contains(&bg.goal));
            assert!(!prompt.contains(&bg.dire_situation));
        }
    }

    #[test]
    fn blank_variant_reply_is_retried_then_reported() {
        let mut gateway = Gateway::new();
        gateway.register(
            "queue",
            Box::new(ScriptedBackend::from_responses(["", "   "])),
        );
        let engine = StoryEngine::new(&gateway);
        let mut session = gateway.open_session("queue").unwrap();
        let config = GenerationConfig::default();
        let err =
            generate_baseline(&engine, &mut session, &background(), &config).unwrap_err();
        assert!(matches!(
            err,
            VariantError::EmptyResponse {
                variant: VariantId::Baseline
            }
        ));
    }

    #[test]
    fn each_variant_records_its_identity_and_template() {
        let gateway = mock_gateway();
        let engine = StoryEngine::new(&gateway);
        let config = GenerationConfig::default();
        let bg = background();
        let ol = outline(3);

        let mut session = gateway.open_session("mock").unwrap();
        let a1 = generate_ablation1(
            &engine,
            &mut session,
            &bg,
            &ol,
            ArityPolicy::Generalize,
            &config,
        )
        .unwrap();
        assert_eq!(a1.artifact.provenance.variant, Some(VariantId::Ablation1));
        assert_eq!(
            a1.trace.stages[0].exchanges[0].template,
            TemplateId::AblationOne
        );

        let mut session = gateway.open_session("mock").unwrap();
        let a2 = generate_ablation2(&engine, &mut session, &bg, &config).unwrap();
        assert_eq!(a2.artifact.provenance.variant, Some(VariantId::Ablation2));
        assert!(a2.artifact.validate().is_empty());
        assert_eq!(a2.trace.all_exchanges().count(), 1);
    }
}
