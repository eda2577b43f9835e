//! Bounded-parallelism batch runner with retry, identity fallback, and
//! crash-safe checkpointing.
//!
//! Every sentence is processed exactly once with at most `max_in_flight`
//! outstanding requests.  Transient corrector errors retry with exponential
//! backoff (plus deterministic jitter); sentences that still fail fall back
//! to the identity hypothesis with status `failed`.  Fatal errors abort the
//! whole run after flushing completed records, and a rerun against the same
//! checkpoint file skips them, so an interrupted run plus a rerun produces
//! the same record set as an uninterrupted one.

use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::harness::{
    build_prompt, parse_completion, Corrector, CorrectorError, HarnessError, ParsedCompletion,
    PromptConfig,
};
use crate::m2::M2Sentence;

#[derive(Debug, Clone)]
pub struct BatchOptions {
    /// Upper bound on concurrent in-flight requests (≥ 1).
    pub max_in_flight: usize,
    /// Attempts per sentence including the first (≥ 1).
    pub max_attempts: usize,
    /// Base of the exponential backoff between attempts.
    pub backoff_base: Duration,
    /// Completed records are appended here as JSON lines; an existing file
    /// is loaded and its records skipped.
    pub checkpoint: Option<PathBuf>,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            max_in_flight: 4,
            max_attempts: 3,
            backoff_base: Duration::from_millis(200),
            checkpoint: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Ok,
    /// The completion parsed to nothing; hypothesis fell back to the source.
    Empty,
    /// All attempts failed; hypothesis fell back to the source.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub index: usize,
    pub source: String,
    pub prompt: String,
    pub raw_completion: Option<String>,
    pub hypothesis: String,
    pub status: RecordStatus,
    pub shots_used: usize,
    pub truncated: bool,
}

/// One full batch: records in input order plus the configuration snapshot.
#[derive(Debug, Clone)]
pub struct CorrectionRun {
    pub records: Vec<SentenceRecord>,
    pub corrector: String,
    pub config: PromptConfig,
    pub elapsed: Duration,
    /// Records loaded from the checkpoint rather than recomputed.
    pub resumed: usize,
}

impl CorrectionRun {
    /// `(ok, empty, failed)` record counts; the three statuses partition the
    /// record set.
    pub fn status_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for record in &self.records {
            match record.status {
                RecordStatus::Ok => counts.0 += 1,
                RecordStatus::Empty => counts.1 += 1,
                RecordStatus::Failed => counts.2 += 1,
            }
        }
        counts
    }

    pub fn hypotheses(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.hypothesis.as_str()).collect()
    }
}

fn load_checkpoint(
    path: &Path,
    corpus: &[M2Sentence],
) -> Result<Vec<Option<SentenceRecord>>, HarnessError> {
    let mut slots: Vec<Option<SentenceRecord>> = vec![None; corpus.len()];
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(slots),
        Err(source) => {
            return Err(HarnessError::CheckpointIo {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let complete_final_line = text.ends_with('\n');
    let lines: Vec<&str> = text.lines().collect();
    for (idx, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: SentenceRecord = match serde_json::from_str(line) {
            Ok(record) => record,
            // a torn final line from a crash is dropped, anything else is corrupt
            Err(_) if idx + 1 == lines.len() && !complete_final_line => continue,
            Err(e) => {
                return Err(HarnessError::TranscriptParse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: e.to_string(),
                })
            }
        };
        if record.index >= corpus.len() || corpus[record.index].source_text() != record.source {
            return Err(HarnessError::CheckpointMismatch {
                path: path.to_path_buf(),
                index: record.index,
            });
        }
        let index = record.index;
        slots[index] = Some(record);
    }
    Ok(slots)
}

fn jitter(index: usize, attempt: usize, base: Duration) -> Duration {
    if base.is_zero() {
        return Duration::ZERO;
    }
    let mut hash = 0xcbf2_9ce4_8422_2325u64 ^ (index as u64) << 17 ^ attempt as u64;
    hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    Duration::from_millis(hash % (base.as_millis().max(1) as u64 / 2 + 1))
}

/// Runs the corrector over the whole corpus.  See the module docs for the
/// concurrency and failure contract.
pub fn run_batch(
    corpus: &[M2Sentence],
    corrector: &dyn Corrector,
    cfg: &PromptConfig,
    opts: &BatchOptions,
) -> Result<CorrectionRun, HarnessError> {
    if opts.max_in_flight < 1 {
        return Err(HarnessError::BadBatchOptions(
            "max_in_flight must be at least 1".to_string(),
        ));
    }
    if opts.max_attempts < 1 {
        return Err(HarnessError::BadBatchOptions(
            "max_attempts must be at least 1".to_string(),
        ));
    }
    cfg.validate()?;
    let started = Instant::now();

    let mut slots: Vec<Option<SentenceRecord>> = match &opts.checkpoint {
        Some(path) => load_checkpoint(path, corpus)?,
        None => vec![None; corpus.len()],
    };
    let resumed = slots.iter().filter(|s| s.is_some()).count();

    let mut prompts: Vec<Option<crate::harness::RenderedPrompt>> = Vec::with_capacity(corpus.len());
    for (idx, sentence) in corpus.iter().enumerate() {
        if slots[idx].is_some() {
            prompts.push(None);
        } else {
            prompts.push(Some(build_prompt(cfg, &sentence.source_tokens)?));
        }
    }

    let writer = match &opts.checkpoint {
        Some(path) => {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|source| HarnessError::CheckpointIo {
                    path: path.clone(),
                    source,
                })?;
            Some(BufWriter::new(file))
        }
        None => None,
    };

    let pending: Vec<usize> = (0..corpus.len()).filter(|i| slots[*i].is_none()).collect();
    let cursor = AtomicUsize::new(0);
    let aborted = AtomicBool::new(false);
    let abort_message: Mutex<Option<String>> = Mutex::new(None);
    let results: Mutex<&mut Vec<Option<SentenceRecord>>> = Mutex::new(&mut slots);
    let sink: Mutex<Option<BufWriter<std::fs::File>>> = Mutex::new(writer);

    let workers = opts.max_in_flight.min(pending.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                loop {
                    if aborted.load(Ordering::SeqCst) {
                        return;
                    }
                    let slot = cursor.fetch_add(1, Ordering::SeqCst);
                    let Some(&index) = pending.get(slot) else { return };
                    let sentence = &corpus[index];
                    let prompt = prompts[index].as_ref().expect("pending prompt exists");

                    let mut outcome: Option<Result<String, ()>> = None;
                    for attempt in 1..=opts.max_attempts {
                        match corrector.complete(&prompt.text) {
                            Ok(raw) => {
                                outcome = Some(Ok(raw));
                                break;
                            }
                            Err(CorrectorError::Transient(_)) if attempt < opts.max_attempts => {
                                let backoff = opts
                                    .backoff_base
                                    .saturating_mul(1 << (attempt - 1).min(16))
                                    + jitter(index, attempt, opts.backoff_base);
                                std::thread::sleep(backoff);
                            }
                            Err(CorrectorError::Transient(_)) => {
                                outcome = Some(Err(()));
                                break;
                            }
                            Err(CorrectorError::Fatal(message)) => {
                                let mut slot = abort_message.lock().expect("abort lock");
                                slot.get_or_insert(message);
                                aborted.store(true, Ordering::SeqCst);
                                return;
                            }
                        }
                    }

                    let source = sentence.source_text();
                    let record = match outcome.expect("attempt loop always sets an outcome") {
                        Ok(raw) => {
                            let (hypothesis, status) = match parse_completion(&raw, cfg) {
                                ParsedCompletion::Delimited(tokens)
                                | ParsedCompletion::Fallback(tokens) => {
                                    (tokens.join(" "), RecordStatus::Ok)
                                }
                                ParsedCompletion::Empty => (source.clone(), RecordStatus::Empty),
                            };
                            SentenceRecord {
                                index,
                                source,
                                prompt: prompt.text.clone(),
                                raw_completion: Some(raw),
                                hypothesis,
                                status,
                                shots_used: prompt.shots_used,
                                truncated: prompt.truncated,
                            }
                        }
                        Err(()) => SentenceRecord {
                            index,
                            source: source.clone(),
                            prompt: prompt.text.clone(),
                            raw_completion: None,
                            hypothesis: source,
                            status: RecordStatus::Failed,
                            shots_used: prompt.shots_used,
                            truncated: prompt.truncated,
                        },
                    };

                    {
                        let mut sink = sink.lock().expect("checkpoint lock");
                        if let Some(writer) = sink.as_mut() {
                            // flushed per record so a crash loses at most one line
                            let line = serde_json::to_string(&record)
                                .expect("sentence record serializes");
                            let _ = writer
                                .write_all(line.as_bytes())
                                .and_then(|_| writer.write_all(b"\n"))
                                .and_then(|_| writer.flush());
                        }
                    }
                    let index = record.index;
                    results.lock().expect("results lock")[index] = Some(record);
                }
            });
        }
    });

    if aborted.load(Ordering::SeqCst) {
        let message = abort_message
            .lock()
            .expect("abort lock")
            .take()
            .unwrap_or_else(|| "unknown fatal error".to_string());
        let completed = slots.iter().filter(|s| s.is_some()).count();
        return Err(HarnessError::Aborted { message, completed });
    }

    let records: Vec<SentenceRecord> = slots
        .into_iter()
        .map(|slot| slot.expect("every sentence processed exactly once"))
        .collect();
    Ok(CorrectionRun {
        records,
        corrector: corrector.name().to_string(),
        config: cfg.clone(),
        elapsed: started.elapsed(),
        resumed,
    })
}
