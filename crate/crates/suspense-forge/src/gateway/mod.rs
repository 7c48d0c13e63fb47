//! Provider-agnostic gateway for chat-completion backends.
//!
//! The gateway owns a registry of named backends (live HTTP, cassette
//! replay, scripted mocks) and hands out dialogue sessions. Every
//! completion flows through [`Gateway::complete`], which maintains the
//! session history, logs to the transcript, and — when recording is on —
//! captures a (fingerprint, response) cassette record. Because the
//! fingerprint covers the system prompt, the full message history, and
//! the sampling params, a recorded run replays only against byte-identical
//! requests: any drift in prompts or config is caught as a cassette miss
//! instead of silently answering the wrong question.

pub mod cassette;
pub mod live;
pub mod transcript;

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::prompt::SYSTEM_PROMPT;
pub use cassette::{Cassette, CassetteRecord, ReplayBackend};
pub use live::{LiveBackend, LiveConfig};
pub use transcript::TranscriptWriter;

/// Backend id under which [`Gateway::load_cassette`] registers replays.
pub const REPLAY_BACKEND_ID: &str = "replay";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Message {
    pub role: Role,
    pub text: String,
}

impl Message {
    pub fn new(role: Role, text: impl Into<String>) -> Self {
        Message {
            role,
            text: text.into(),
        }
    }
}

/// Sampling parameters sent with every completion. `extra` carries
/// provider-specific knobs opaquely; it participates in fingerprints and
/// is serialized in key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompletionParams {
    pub temperature: f64,
    pub max_tokens: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl Default for CompletionParams {
    fn default() -> Self {
        CompletionParams {
            temperature: 1.0,
            max_tokens: 1024,
            extra: BTreeMap::new(),
        }
    }
}

impl CompletionParams {
    fn validate(&self) -> Result<(), GatewayError> {
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(GatewayError::InvalidParams(format!(
                "temperature must be finite and non-negative, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// The complete request a backend sees: the message list as it would go
/// over the wire (system prompt first, the pending user prompt last) plus
/// sampling params.
#[derive(Debug, Clone, Copy)]
pub struct CompletionRequest<'a> {
    pub messages: &'a [Message],
    pub params: &'a CompletionParams,
}

impl CompletionRequest<'_> {
    /// Hex SHA-256 over the canonical JSON of the request. The system
    /// prompt is `messages[0]`, so system prompt, full history, and
    /// params are all covered.
    pub fn fingerprint(&self) -> String {
        #[derive(Serialize)]
        struct Canon<'a> {
            messages: &'a [Message],
            params: &'a CompletionParams,
        }
        let canonical = serde_json::to_vec(&Canon {
            messages: self.messages,
            params: self.params,
        })
        .expect("request serializes");
        let digest = Sha256::digest(&canonical);
        hex::encode(digest)
    }
}

/// A single dialogue session. Single-owner: completions mutate the
/// history, and the alternating user/assistant discipline is maintained
/// by the gateway, never by callers.
#[derive(Debug, Clone)]
pub struct SessionHandle {
    id: u64,
    backend: String,
    history: Vec<Message>,
}

impl SessionHandle {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn backend(&self) -> &str {
        &self.backend
    }

    pub fn history(&self) -> &[Message] {
        &self.history
    }
}

/// One pluggable completion provider. Implementations must be safe to
/// share across sessions; any interior state needs its own locking.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, GatewayError>;
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("no backend registered under id {0:?}")]
    UnknownBackend(String),
    #[error("prompt must not be empty")]
    EmptyPrompt,
    #[error("invalid completion params: {0}")]
    InvalidParams(String),
    #[error("provider returned status {status} after {attempts} attempt(s): {body}")]
    Provider {
        status: u16,
        body: String,
        attempts: u32,
    },
    #[error("transport failure after {attempts} attempt(s): {detail}")]
    Transport { detail: String, attempts: u32 },
    #[error("missing credentials: set the {0} environment variable")]
    MissingCredentials(&'static str),
    #[error("cassette has no record for fingerprint {fingerprint}")]
    CassetteMiss { fingerprint: String },
    #[error("malformed cassette {path}, line {line}: {detail}")]
    MalformedCassette {
        path: String,
        line: usize,
        detail: String,
    },
    #[error("duplicate fingerprint in cassette: {0}")]
    DuplicateFingerprint(String),
    #[error("scripted backend exhausted after {0} response(s)")]
    ScriptExhausted(usize),
    #[error("recording is not enabled on this gateway")]
    RecordingDisabled,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Registry of backends plus the cross-cutting machinery: session ids,
/// transcript logging, and cassette recording.
#[derive(Default)]
pub struct Gateway {
    backends: BTreeMap<String, Box<dyn ChatBackend>>,
    transcript: Option<TranscriptWriter>,
    recorder: Option<Mutex<Vec<CassetteRecord>>>,
    next_session_id: AtomicU64,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway")
            .field("backends", &self.backends.keys().collect::<Vec<_>>())
            .field("recording", &self.recorder.is_some())
            .finish()
    }
}

impl Gateway {
    pub fn new() -> Self {
        Gateway::default()
    }

    pub fn register(&mut self, id: impl Into<String>, backend: Box<dyn ChatBackend>) {
        self.backends.insert(id.into(), backend);
    }

    pub fn backend_ids(&self) -> Vec<&str> {
        self.backends.keys().map(String::as_str).collect()
    }

    /// Loads a cassette file and registers a replay backend serving it.
    /// Returns the backend id the replay was registered under.
    pub fn load_cassette(&mut self, path: &Path) -> Result<String, GatewayError> {
        let cassette = Cassette::load(path)?;
        self.register(REPLAY_BACKEND_ID, Box::new(ReplayBackend::new(cassette)));
        Ok(REPLAY_BACKEND_ID.to_owned())
    }

    pub fn set_transcript(&mut self, writer: TranscriptWriter) {
        self.transcript = Some(writer);
    }

    /// Starts capturing (fingerprint, response) records for every
    /// successful completion on this gateway.
    pub fn enable_recording(&mut self) {
        self.recorder = Some(Mutex::new(Vec::new()));
    }

    /// Finishes recording and packages the captured records as a
    /// cassette, in call order.
    pub fn take_recording(&mut self) -> Result<Cassette, GatewayError> {
        match self.recorder.take() {
            Some(records) => Cassette::from_records(records.into_inner().expect("recorder lock")),
            None => Err(GatewayError::RecordingDisabled),
        }
    }

    /// Opens a fresh session against a registered backend. The history
    /// starts with exactly one entry: the system prompt.
    pub fn open_session(&self, backend: &str) -> Result<SessionHandle, GatewayError> {
        if !self.backends.contains_key(backend) {
            return Err(GatewayError::UnknownBackend(backend.to_owned()));
        }
        let id = self.next_session_id.fetch_add(1, Ordering::Relaxed);
        let session = SessionHandle {
            id,
            backend: backend.to_owned(),
            history: vec![Message::new(Role::System, SYSTEM_PROMPT)],
        };
        self.log(id, "system", SYSTEM_PROMPT);
        Ok(session)
    }

    /// Sends one user prompt on a session and returns the completion.
    ///
    /// On success the (user, assistant) pair is appended to the session
    /// history; on failure the history is left untouched so the session
    /// stays well-formed for a retry. The outbound prompt is logged to
    /// the transcript before the backend is called, so even a failed run
    /// leaves a complete record of what was asked.
    pub fn complete(
        &self,
        session: &mut SessionHandle,
        prompt: &str,
        params: &CompletionParams,
    ) -> Result<String, GatewayError> {
        if prompt.trim().is_empty() {
            return Err(GatewayError::EmptyPrompt);
        }
        params.validate()?;
        let backend = self
            .backends
            .get(session.backend())
            .ok_or_else(|| GatewayError::UnknownBackend(session.backend().to_owned()))?;

        self.log(session.id, "user", prompt);

        let mut messages = session.history.clone();
        messages.push(Message::new(Role::User, prompt));
        let request = CompletionRequest {
            messages: &messages,
            params,
        };
        let fingerprint = request.fingerprint();

        match backend.complete(&request) {
            Ok(response) => {
                self.log(session.id, "assistant", &response);
                if let Some(recorder) = &self.recorder {
                    recorder.lock().expect("recorder lock").push(CassetteRecord {
                        fingerprint,
                        response: response.clone(),
                    });
                }
                session.history.push(Message::new(Role::User, prompt));
                session
                    .history
                    .push(Message::new(Role::Assistant, response.clone()));
                Ok(response)
            }
            Err(err) => {
                self.log(session.id, "error", &err.to_string());
                Err(err)
            }
        }
    }

    fn log(&self, session: u64, role: &str, text: &str) {
        if let Some(transcript) = &self.transcript {
            // Best-effort: a transcript write failure must not abort a run.
            let _ = transcript.record(session, role, text);
        }
    }
}

/// Deterministic in-memory backend for tests, examples, and fixture
/// construction.
pub struct ScriptedBackend {
    state: Mutex<Script>,
}

enum Script {
    /// Produces "`prefix` reply N" forever, N counting from 1.
    Sequential { prefix: String, served: usize },
    /// Serves a fixed response list in order, then errors.
    Queue {
        responses: VecDeque<String>,
        served: usize,
    },
}

impl ScriptedBackend {
    pub fn sequential(prefix: impl Into<String>) -> Self {
        ScriptedBackend {
            state: Mutex::new(Script::Sequential {
                prefix: prefix.into(),
                served: 0,
            }),
        }
    }

    pub fn from_responses<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedBackend {
            state: Mutex::new(Script::Queue {
                responses: responses.into_iter().map(Into::into).collect(),
                served: 0,
            }),
        }
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(&self, _request: &CompletionRequest<'_>) -> Result<String, GatewayError> {
        match &mut *self.state.lock().expect("script lock") {
            Script::Sequential { prefix, served } => {
                *served += 1;
                Ok(format!("{prefix} reply {served}"))
            }
            Script::Queue { responses, served } => match responses.pop_front() {
                Some(response) => {
                    *served += 1;
                    Ok(response)
                }
                None => Err(GatewayError::ScriptExhausted(*served)),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scripted_gateway() -> Gateway {
        let mut gateway = Gateway::new();
        gateway.register("mock", Box::new(ScriptedBackend::sequential("mock")));
        gateway
    }

    #[test]
    fn fresh_session_holds_only_the_system_entry() {
        let gateway = scripted_gateway();
        let session = gateway.open_session("mock").unwrap();
        assert_eq!(
            session.history(),
            &[Message::new(Role::System, "You are a creative storyteller.")]
        );
    }

    #[test]
    fn sessions_get_distinct_ids_but_identical_initial_history() {
        let gateway = scripted_gateway();
        let a = gateway.open_session("mock").unwrap();
        let b = gateway.open_session("mock").unwrap();
        assert_ne!(a.id(), b.id());
        assert_eq!(a.history(), b.history());
    }

    #[test]
    fn unknown_backend_is_an_error() {
        let gateway = scripted_gateway();
        let err = gateway.open_session("nope").unwrap_err();
        assert!(matches!(err, GatewayError::UnknownBackend(id) if id == "nope"));
    }

    #[test]
    fn history_grows_by_a_pair_per_completion() {
        let gateway = scripted_gateway();
        let mut session = gateway.open_session("mock").unwrap();
        let params = CompletionParams::default();
        for n in 1..=3u64 {
            gateway
                .complete(&mut session, &format!("prompt {n}"), &params)
                .unwrap();
            assert_eq!(session.history().len() as u64, 1 + 2 * n);
        }
        assert_eq!(session.history()[1].role, Role::User);
        assert_eq!(session.history()[2].role, Role::Assistant);
        assert_eq!(session.history()[2].text, "mock reply 1");
    }

    #[test]
    fn failed_completion_leaves_history_untouched() {
        let mut gateway = Gateway::new();
        gateway.register(
            "short",
            Box::new(ScriptedBackend::from_responses(["only one"])),
        );
        let mut session = gateway.open_session("short").unwrap();
        let params = CompletionParams::default();
        gateway.complete(&mut session, "first", &params).unwrap();
        let before = session.history().to_vec();
        let err = gateway.complete(&mut session, "second", &params).unwrap_err();
        assert!(matches!(err, GatewayError::ScriptExhausted(1)));
        assert_eq!(session.history(), &before[..]);
    }

    #[test]
    fn empty_prompt_and_bad_params_are_rejected() {
        let gateway = scripted_gateway();
        let mut session = gateway.open_session("mock").unwrap();
        let err = gateway
            .complete(&mut session, "  \n", &CompletionParams::default())
            .unwrap_err();
        assert!(matches!(err, GatewayError::EmptyPrompt));

        let bad = CompletionParams {
            temperature: -0.5,
            ..CompletionParams::default()
        };
        let err = gateway.complete(&mut session, "hi", &bad).unwrap_err();
        assert!(matches!(err, GatewayError::InvalidParams(_)));
    }

    #[test]
    fn fingerprint_covers_history_and_params() {
        let params = CompletionParams::default();
        let base = vec![
            Message::new(Role::System, SYSTEM_PROMPT),
            Message::new(Role::User, "question"),
        ];
        let fp = CompletionRequest {
            messages: &base,
            params: &params,
        }
        .fingerprint();
        assert_eq!(fp.len(), 64);
        assert!(fp.bytes().all(|b| b.is_ascii_hexdigit()));

        let mut longer = base.clone();
        longer.insert(1, Message::new(Role::User, "earlier turn"));
        let fp_history = CompletionRequest {
            messages: &longer,
            params: &params,
        }
        .fingerprint();
        assert_ne!(fp, fp_history);

        let hotter = CompletionParams {
            temperature: 0.2,
            ..CompletionParams::default()
        };
        let fp_params = CompletionRequest {
            messages: &base,
            params: &hotter,
        }
        .fingerprint();
        assert_ne!(fp, fp_params);
    }

    #[test]
    fn record_then_replay_round_trips() {
        let mut gateway = Gateway::new();
        gateway.register("mock", Box::new(ScriptedBackend::sequential("take")));
        gateway.enable_recording();
        let params = CompletionParams::default();

        let mut session = gateway.open_session("mock").unwrap();
        let first = gateway.complete(&mut session, "alpha", &params).unwrap();
        let second = gateway.complete(&mut session, "beta", &params).unwrap();
        let cassette = gateway.take_recording().unwrap();
        assert_eq!(cassette.len(), 2);

        let mut replay_gateway = Gateway::new();
        replay_gateway.register(REPLAY_BACKEND_ID, Box::new(ReplayBackend::new(cassette)));
        let mut replay_session = replay_gateway.open_session(REPLAY_BACKEND_ID).unwrap();
        assert_eq!(
            replay_gateway
                .complete(&mut replay_session, "alpha", &params)
                .unwrap(),
            first
        );
        assert_eq!(
            replay_gateway
                .complete(&mut replay_session, "beta", &params)
                .unwrap(),
            second
        );
        assert_eq!(replay_session.history(), session.history());
    }

    #[test]
    fn replay_misses_name_the_fingerprint() {
        let cassette = Cassette::from_records(vec![]).unwrap();
        let mut gateway = Gateway::new();
        gateway.register(REPLAY_BACKEND_ID, Box::new(ReplayBackend::new(cassette)));
        let mut session = gateway.open_session(REPLAY_BACKEND_ID).unwrap();
        let err = gateway
            .complete(&mut session, "unrecorded", &CompletionParams::default())
            .unwrap_err();
        match err {
            GatewayError::CassetteMiss { fingerprint } => assert_eq!(fingerprint.len(), 64),
            other => panic!("expected CassetteMiss, got {other:?}"),
        }
    }

    #[test]
    fn every_outbound_prompt_lands_in_the_transcript_once() {
        let (writer, buffer) = TranscriptWriter::in_memory();
        let mut gateway = Gateway::new();
        gateway.register(
            "short",
            Box::new(ScriptedBackend::from_responses(["one"])),
        );
        gateway.set_transcript(writer);
        let params = CompletionParams::default();
        let mut session = gateway.open_session("short").unwrap();
        gateway.complete(&mut session, "works", &params).unwrap();
        let _ = gateway.complete(&mut session, "fails", &params);

        let logged = String::from_utf8(buffer.lock().unwrap().clone()).unwrap();
        assert_eq!(logged.matches("\"works\"").count(), 1);
        assert_eq!(logged.matches("\"fails\"").count(), 1);
        assert!(logged.contains("\"error\""));
    }

    #[test]
    fn take_recording_requires_recording() {
        let mut gateway = scripted_gateway();
        assert!(matches!(
            gateway.take_recording().unwrap_err(),
            GatewayError::RecordingDisabled
        ));
    }
}
