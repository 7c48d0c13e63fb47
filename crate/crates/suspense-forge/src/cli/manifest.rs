//! Run directories and the manifest that makes every run replayable.
//!
//! A run directory is append-only: it is created once, named
//! `run-<unix-seconds>-<seed>` (with a `-2`, `-3`, … suffix on
//! collision), and never modified by later commands. The manifest is
//! written atomically — serialized to a temporary file and renamed into
//! place — at the end of the run, whether it succeeded or failed, so a
//! partially written manifest can never be observed.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::story::{GenerationConfig, VariantId};

/// File names within a run directory.
pub const STORY_FILE: &str = "story.json";
pub const TRACE_FILE: &str = "trace.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRANSCRIPT_FILE: &str = "transcript.jsonl";

/// Everything needed to reproduce a run: the effective config, the
/// input/output paths, and how the run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub run_id: String,
    /// Which command produced the run: "generate" or "variant".
    pub command: String,
    pub created_unix: u64,
    /// The effective generation config after flag/file/default merging.
    pub config: GenerationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<VariantId>,
    /// Source story for `variant --from` runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cassette: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<PathBuf>,
    pub template_set_version: String,
    pub exit_status: i32,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        json
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        RunManifest::from_json(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

/// Writes the manifest atomically into `run_dir`: the JSON is written
/// to a temporary sibling and renamed over the final name.
pub fn write_manifest(run_dir: &Path, manifest: &RunManifest) -> io::Result<()> {
    let tmp = run_dir.join(format!("{MANIFEST_FILE}.tmp"));
    let target = run_dir.join(MANIFEST_FILE);
    fs::write(&tmp, manifest.to_json())?;
    fs::rename(&tmp, &target)
}

/// Creates a fresh uniquely named run directory under `parent` and
/// returns its path together with the run id.
pub fn create_run_dir(parent: &Path, seed: u64) -> io::Result<(PathBuf, String)> {
    fs::create_dir_all(parent)?;
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let base = format!("run-{unix}-{seed}");
    let mut candidate = base.clone();
    let mut counter = 2u32;
    loop {
        let path = parent.join(&candidate);
        match fs::create_dir(&path) {
            Ok(()) => return Ok((path, candidate)),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                candidate = format!("{base}-{counter}");
                counter += 1;
            }
            Err(e) => return Err(e),
        }
    }
}
