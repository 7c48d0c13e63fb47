//! Cassettes: recorded (fingerprint → response) logs that make any run
//! replayable offline, byte for byte.
//!
//! A cassette file is UTF-8 JSON lines, one `{"fingerprint", "response"}`
//! record per line, in the order the completions happened. Replay does
//! not depend on that order — lookups go through the fingerprint — but
//! keeping it makes cassettes diffable and auditable.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ChatBackend, CompletionRequest, GatewayError};

/// One recorded completion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CassetteRecord {
    pub fingerprint: String,
    pub response: String,
}

/// An ordered, immutable set of recorded completions with unique
/// fingerprints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cassette {
    records: Vec<CassetteRecord>,
    index: BTreeMap<String, usize>,
}

impl Cassette {
    pub fn from_records(records: Vec<CassetteRecord>) -> Result<Self, GatewayError> {
        let mut index = BTreeMap::new();
        for (i, record) in records.iter().enumerate() {
            if index.insert(record.fingerprint.clone(), i).is_some() {
                return Err(GatewayError::DuplicateFingerprint(
                    record.fingerprint.clone(),
                ));
            }
        }
        Ok(Cassette { records, index })
    }

    pub fn records(&self) -> &[CassetteRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, fingerprint: &str) -> Option<&str> {
        self.index
            .get(fingerprint)
            .map(|&i| self.records[i].response.as_str())
    }

    pub fn load(path: &Path) -> Result<Self, GatewayError> {
        let text = fs::read_to_string(path).map_err(|e| GatewayError::MalformedCassette {
            path: path.display().to_string(),
            line: 0,
            detail: e.to_string(),
        })?;
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                return Err(GatewayError::MalformedCassette {
                    path: path.display().to_string(),
                    line: i + 1,
                    detail: "blank line inside cassette".to_owned(),
                });
            }
            let record: CassetteRecord =
                serde_json::from_str(line).map_err(|e| GatewayError::MalformedCassette {
                    path: path.display().to_string(),
                    line: i + 1,
                    detail: e.to_string(),
                })?;
            records.push(record);
        }
        Cassette::from_records(records)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), GatewayError> {
        fs::write(path, self.to_jsonl())?;
        Ok(())
    }
}

/// A backend that answers every request from a cassette and nothing else.
#[derive(Debug)]
pub struct ReplayBackend {
    cassette: Cassette,
}

impl ReplayBackend {
    pub fn new(cassette: Cassette) -> Self {
        ReplayBackend { cassette }
    }

    pub fn cassette(&self) -> &Cassette {
        &self.cassette
    }
}

impl ChatBackend for ReplayBackend {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, GatewayError> {
        let fingerprint = request.fingerprint();
        match self.cassette.get(&fingerprint) {
            Some(response) => Ok(response.to_owned()),
            None => Err(GatewayError::CassetteMiss { fingerprint }),
        }
    }
}
