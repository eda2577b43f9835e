//! Record/replay transcripts: one JSON object per line with
//! `{request_hash, prompt, response_text}`.
//!
//! Replay keys on the hash of the prompt bytes and verifies the stored
//! prompt matches, so a replayed run either reproduces the recorded run
//! exactly or fails loudly.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::harness::{Corrector, CorrectorError, HarnessError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub request_hash: String,
    pub prompt: String,
    pub response_text: String,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Stable 16-hex-digit hash of the prompt bytes.
pub fn request_hash(prompt: &str) -> String {
    format!("{:016x}", fnv1a64(prompt.as_bytes()))
}

/// Serves completions from a recorded transcript; any prompt absent from the
/// transcript aborts the batch.
#[derive(Debug)]
pub struct ReplayCorrector {
    entries: HashMap<String, TranscriptEntry>,
    path: PathBuf,
}

impl ReplayCorrector {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::TranscriptIo {
            path: path.to_path_buf(),
            source,
        })?;
        let mut entries = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: TranscriptEntry =
                serde_json::from_str(line).map_err(|e| HarnessError::TranscriptParse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            entries.insert(entry.request_hash.clone(), entry);
        }
        Ok(ReplayCorrector {
            entries,
            path: path.to_path_buf(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Corrector for ReplayCorrector {
    fn name(&self) -> &str {
        "replay"
    }

    fn complete(&self, prompt: &str) -> Result<String, CorrectorError> {
        let hash = request_hash(prompt);
        match self.entries.get(&hash) {
            Some(entry) if entry.prompt == prompt => Ok(entry.response_text.clone()),
            Some(_) => Err(CorrectorError::Fatal(format!(
                "transcript {} entry {hash} stores a different prompt (hash collision or drift)",
                self.path.display()
            ))),
            None => Err(CorrectorError::Fatal(format!(
                "transcript {} has no entry for request {hash}",
                self.path.display()
            ))),
        }
    }
}

/// Wraps a corrector and appends every successful completion to a transcript
/// file, deduplicated by request hash.
pub struct RecordingCorrector<C> {
    inner: C,
    sink: Mutex<RecorderState>,
}

struct RecorderState {
    writer: BufWriter<File>,
    seen: std::collections::HashSet<String>,
}

impl<C: Corrector> RecordingCorrector<C> {
    pub fn create(inner: C, path: &Path) -> Result<Self, HarnessError> {
        let file = File::create(path).map_err(|source| HarnessError::TranscriptIo {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(RecordingCorrector {
            inner,
            sink: Mutex::new(RecorderState {
                writer: BufWriter::new(file),
                seen: std::collections::HashSet::new(),
            }),
        })
    }
}

impl<C: Corrector> Corrector for RecordingCorrector<C> {
    fn name(&self) -> &str {
        "record"
    }

    fn complete(&self, prompt: &str) -> Result<String, CorrectorError> {
        let response = self.inner.complete(prompt)?;
        let entry = TranscriptEntry {
            request_hash: request_hash(prompt),
            prompt: prompt.to_string(),
            response_text: response.clone(),
        };
        let mut sink = self.sink.lock().expect("recorder lock");
        if sink.seen.insert(entry.request_hash.clone()) {
            let line = serde_json::to_string(&entry)
                .map_err(|e| CorrectorError::Fatal(format!("cannot encode transcript entry: {e}")))?;
            sink.writer
                .write_all(line.as_bytes())
                .and_then(|_| sink.writer.write_all(b"\n"))
                .and_then(|_| sink.writer.flush())
                .map_err(|e| CorrectorError::Fatal(format!("cannot write transcript: {e}")))?;
        }
        Ok(response)
    }
}
