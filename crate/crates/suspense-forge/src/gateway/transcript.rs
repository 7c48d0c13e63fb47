//! Append-only transcript log for every prompt and completion that passes
//! through a gateway, successes and failures alike.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

/// Writes one JSON object per line: `{"ts_ms", "session", "role", "text"}`.
///
/// The writer is internally synchronized so independent sessions on the
/// same gateway can log concurrently. Logging is best-effort by design: a
/// full disk must not abort a generation run, so callers ignore the
/// result of [`TranscriptWriter::record`] unless they specifically care.
pub struct TranscriptWriter {
    sink: Mutex<Box<dyn Write + Send>>,
}

impl std::fmt::Debug for TranscriptWriter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("TranscriptWriter")
    }
}

impl TranscriptWriter {
    pub fn to_file(path: &Path) -> io::Result<Self> {
        let file = File::create(path)?;
        Ok(TranscriptWriter {
            sink: Mutex::new(Box::new(BufWriter::new(file))),
        })
    }

    pub fn from_writer(writer: Box<dyn Write + Send>) -> Self {
        TranscriptWriter {
            sink: Mutex::new(writer),
        }
    }

    /// A writer backed by a shared buffer, for tests and examples that
    /// want to inspect what was logged.
    pub fn in_memory() -> (Self, Arc<Mutex<Vec<u8>>>) {
        let buffer = Arc::new(Mutex::new(Vec::new()));
        let writer = TranscriptWriter::from_writer(Box::new(SharedBuffer(buffer.clone())));
        (writer, buffer)
    }

    pub fn record(&self, session: u64, role: &str, text: &str) -> io::Result<()> {
        let ts_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        let line = serde_json::json!({
            "ts_ms": ts_ms,
            "session": session,
            "role": role,
            "text": text,
        });
        let mut sink = self.sink.lock().expect("transcript lock");
        writeln!(sink, "{line}")?;
        sink.flush()
    }
}

struct SharedBuffer(Arc<Mutex<Vec<u8>>>);

impl Write for SharedBuffer {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.lock().expect("buffer lock").extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}
