//! Deterministic mock correctors for offline testing.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::harness::{input_from_prompt, Corrector, CorrectorError, HarnessError, PromptConfig};
use crate::m2::{apply_edits, M2Sentence};

fn wrap(cfg: &PromptConfig, text: &str) -> String {
    format!("{}{}{}", cfg.delimiter_left, text, cfg.delimiter_right)
}

fn input_or_fatal(prompt: &str, cfg: &PromptConfig) -> Result<String, CorrectorError> {
    input_from_prompt(prompt, cfg)
        .ok_or_else(|| CorrectorError::Fatal("prompt has no recoverable input line".to_string()))
}

/// Returns the input sentence unchanged.
pub struct IdentityCorrector {
    cfg: PromptConfig,
}

impl IdentityCorrector {
    pub fn new(cfg: &PromptConfig) -> Self {
        IdentityCorrector { cfg: cfg.clone() }
    }
}

impl Corrector for IdentityCorrector {
    fn name(&self) -> &str {
        "identity"
    }

    fn complete(&self, prompt: &str) -> Result<String, CorrectorError> {
        let input = input_or_fatal(prompt, &self.cfg)?;
        Ok(wrap(&self.cfg, &input))
    }
}

/// Returns the gold correction of the lowest annotator, so downstream
/// evaluation scores a perfect 1.0.
pub struct EchoReferenceCorrector {
    cfg: PromptConfig,
    corrections: HashMap<String, String>,
}

impl EchoReferenceCorrector {
    pub fn from_corpus(corpus: &[M2Sentence], cfg: &PromptConfig) -> Result<Self, HarnessError> {
        let mut corrections = HashMap::new();
        for sentence in corpus {
            let corrected = match sentence.lowest_annotator() {
                Some(annotator) => {
                    let edits: Vec<_> = sentence
                        .reference_edits(annotator)
                        .into_iter()
                        .cloned()
                        .collect();
                    apply_edits(&sentence.source_tokens, &edits)?.join(" ")
                }
                None => sentence.source_text(),
            };
            corrections.insert(sentence.source_text(), corrected);
        }
        Ok(EchoReferenceCorrector {
            cfg: cfg.clone(),
            corrections,
        })
    }
}

impl Corrector for EchoReferenceCorrector {
    fn name(&self) -> &str {
        "echo_reference"
    }

    fn complete(&self, prompt: &str) -> Result<String, CorrectorError> {
        let input = input_or_fatal(prompt, &self.cfg)?;
        match self.corrections.get(&input) {
            Some(corrected) => Ok(wrap(&self.cfg, corrected)),
            None => Err(CorrectorError::Fatal(format!(
                "no reference for input {input:?}"
            ))),
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Deletes one token per sentence, chosen deterministically from the seed
/// and the sentence text, producing exactly one unnecessary-word edit per
/// affected sentence.
pub struct DropTokenCorrector {
    cfg: PromptConfig,
    seed: u64,
}

impl DropTokenCorrector {
    pub fn new(cfg: &PromptConfig, seed: u64) -> Self {
        DropTokenCorrector { cfg: cfg.clone(), seed }
    }

    /// The token index this corrector removes from `sentence`.
    pub fn dropped_index(&self, sentence: &str) -> Option<usize> {
        let count = sentence.split_whitespace().count();
        if count == 0 {
            None
        } else {
            Some(((fnv1a64(sentence.as_bytes()) ^ self.seed) % count as u64) as usize)
        }
    }
}

impl Corrector for DropTokenCorrector {
    fn name(&self) -> &str {
        "drop_token"
    }

    fn complete(&self, prompt: &str) -> Result<String, CorrectorError> {
        let input = input_or_fatal(prompt, &self.cfg)?;
        let tokens: Vec<&str> = input.split_whitespace().collect();
        let out = match self.dropped_index(&input) {
            None => input.clone(),
            Some(drop) => tokens
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, t)| *t)
                .collect::<Vec<_>>()
                .join(" "),
        };
        Ok(wrap(&self.cfg, &out))
    }
}

/// Delegates to an inner corrector and then fails fatally, simulating an
/// interrupted batch for checkpoint tests.
pub struct FailAfterCorrector<C> {
    inner: C,
    allowed: usize,
    calls: AtomicUsize,
}

impl<C: Corrector> FailAfterCorrector<C> {
    pub fn new(inner: C, allowed: usize) -> Self {
        FailAfterCorrector {
            inner,
            allowed,
            calls: AtomicUsize::new(0),
        }
    }
}

impl<C: Corrector> Corrector for FailAfterCorrector<C> {
    fn name(&self) -> &str {
        "fail_after"
    }

    fn complete(&self, prompt: &str) -> Result<String, CorrectorError> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst);
        if call >= self.allowed {
            return Err(CorrectorError::Fatal("injected fault".to_string()));
        }
        self.inner.complete(prompt)
    }
}

/// Fails transiently the first `failures` times each prompt is seen, then
/// delegates; exercises the retry path.
pub struct FlakyCorrector<C> {
    inner: C,
    failures: usize,
    seen: Mutex<HashMap<String, usize>>,
}

impl<C: Corrector> FlakyCorrector<C> {
    pub fn new(inner: C, failures: usize) -> Self {
        FlakyCorrector {
            inner,
            failures,
            seen: Mutex::new(HashMap::new()),
        }
    }
}

impl<C: Corrector> Corrector for FlakyCorrector<C> {
    fn name(&self) -> &str {
        "flaky"
    }

    fn complete(&self, prompt: &str) -> Result<String, CorrectorError> {
        let mut seen = self.seen.lock().expect("flaky corrector lock");
        let attempts = seen.entry(prompt.to_string()).or_insert(0);
        *attempts += 1;
        if *attempts <= self.failures {
            return Err(CorrectorError::Transient(format!(
                "injected transient failure {attempts}"
            )));
        }
        drop(seen);
        self.inner.complete(prompt)
    }
}

/// CLI-facing mock registry: `identity`, `echo_reference`, `drop_token`.
pub fn mock_by_name(
    name: &str,
    cfg: &PromptConfig,
    corpus: &[M2Sentence],
    seed: u64,
) -> Result<Option<Box<dyn Corrector>>, HarnessError> {
    Ok(match name {
        "identity" => Some(Box::new(IdentityCorrector::new(cfg))),
        "echo_reference" => Some(Box::new(EchoReferenceCorrector::from_corpus(corpus, cfg)?)),
        "drop_token" => Some(Box::new(DropTokenCorrector::new(cfg, seed))),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::build_prompt;
    use crate::m2::parse_m2;

    #[test]
    fn identity_echoes_the_input() {
        let cfg = PromptConfig::default();
        let prompt = build_prompt(&cfg, &["He", "go", "home", "."]).unwrap();
        let corrector = IdentityCorrector::new(&cfg);
        assert_eq!(corrector.complete(&prompt.text).unwrap(), "{He go home .}");
    }

    #[test]
    fn echo_reference_returns_gold() {
        let cfg = PromptConfig::default();
        let corpus = parse_m2(
            "S he go home\nA 1 2|||R:VERB:TENSE|||went|||REQUIRED|||-NONE-|||0\n",
        )
        .unwrap();
        let corrector = EchoReferenceCorrector::from_corpus(&corpus, &cfg).unwrap();
        let prompt = build_prompt(&cfg, &corpus[0].source_tokens).unwrap();
        assert_eq!(corrector.complete(&prompt.text).unwrap(), "{he went home}");
    }

    #[test]
    fn drop_token_removes_exactly_one() {
        let cfg = PromptConfig::default();
        let corrector = DropTokenCorrector::new(&cfg, 7);
        let prompt = build_prompt(&cfg, &["a", "b", "c", "d"]).unwrap();
        let out = corrector.complete(&prompt.text).unwrap();
        let inner = out.trim_start_matches('{').trim_end_matches('}');
        assert_eq!(inner.split_whitespace().count(), 3);
        // deterministic
        assert_eq!(corrector.complete(&prompt.text).unwrap(), out);
        let idx = corrector.dropped_index("a b c d").unwrap();
        assert!(idx < 4);
    }

    #[test]
    fn flaky_fails_then_recovers() {
        let cfg = PromptConfig::default();
        let flaky = FlakyCorrector::new(IdentityCorrector::new(&cfg), 2);
        let prompt = build_prompt(&cfg, &["x"]).unwrap();
        assert!(matches!(flaky.complete(&prompt.text), Err(CorrectorError::Transient(_))));
        assert!(matches!(flaky.complete(&prompt.text), Err(CorrectorError::Transient(_))));
        assert_eq!(flaky.complete(&prompt.text).unwrap(), "{x}");
    }

    #[test]
    fn registry_resolves_known_names() {
        let cfg = PromptConfig::default();
        assert!(mock_by_name("identity", &cfg, &[], 0).unwrap().is_some());
        assert!(mock_by_name("echo_reference", &cfg, &[], 0).unwrap().is_some());
        assert!(mock_by_name("drop_token", &cfg, &[], 3).unwrap().is_some());
        assert!(mock_by_name("nope", &cfg, &[], 0).unwrap().is_none());
    }
}
