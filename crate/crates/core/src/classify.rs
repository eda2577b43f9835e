//! Rule-based error typing for raw edits.
//!
//! This is a deliberately deterministic, dependency-free approximation of a
//! POS-tagger-driven taxonomy: closed-class lookups and morphology cover the
//! high-frequency categories (`M:PUNCT`, `R:ORTH`, `R:PREP`, `M:DET`,
//! `R:VERB`, `R:VERB:TENSE`, ...) and everything else falls through to
//! `OTHER`.  Reference files already carry gold types; this classifier is
//! only used where no type exists, i.e. for hypothesis-side edits produced
//! by [`crate::align::extract_edits`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::align::RawEdit;
use crate::error_type::{Category, EditOp, ErrorType};

const DEFAULT_LEXICON_TSV: &str = include_str!("../assets/lexicon/default.tsv");
const IRREGULAR_VERBS_TSV: &str = include_str!("../assets/lexicon/irregular_verbs.tsv");

/// Tags accepted in lexicon TSV rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosTag {
    Prep,
    Det,
    Pron,
    Conj,
    Verb,
    Noun,
    Adj,
    Adv,
    Punct,
}

impl FromStr for PosTag {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "PREP" => Ok(PosTag::Prep),
            "DET" => Ok(PosTag::Det),
            "PRON" => Ok(PosTag::Pron),
            "CONJ" => Ok(PosTag::Conj),
            "VERB" => Ok(PosTag::Verb),
            "NOUN" => Ok(PosTag::Noun),
            "ADJ" => Ok(PosTag::Adj),
            "ADV" => Ok(PosTag::Adv),
            "PUNCT" => Ok(PosTag::Punct),
            _ => Err(()),
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PosTag::Prep => "PREP",
            PosTag::Det => "DET",
            PosTag::Pron => "PRON",
            PosTag::Conj => "CONJ",
            PosTag::Verb => "VERB",
            PosTag::Noun => "NOUN",
            PosTag::Adj => "ADJ",
            PosTag::Adv => "ADV",
            PosTag::Punct => "PUNCT",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read lexicon file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{name} row {row}: malformed TSV row {text:?} (expected `word<TAB>TAG`)")]
    MalformedRow { name: String, row: usize, text: String },
}

/// Closed-class word sets, a word→POS map, and an irregular-verb form table.
/// All entries are lowercase; lookups fold case.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pos: HashMap<String, BTreeSet<PosTag>>,
    /// Inflected form → base, from the irregular verb table (bases map to
    /// themselves).
    irregular: HashMap<String, String>,
    /// Words accepted on the replacement side of an `R:PREP` edit in
    /// addition to the prepositions proper.  The annotation scheme corrects
    /// ungrammatical `agree with <clause>` to `agree that <clause>` as a
    /// preposition replacement, so `that` belongs here.
    prep_replacement_extra: HashSet<String>,
}

impl Lexicon {
    /// The lexicon compiled into the binary.
    pub fn bundled() -> Lexicon {
        let mut lexicon = Lexicon {
            pos: HashMap::new(),
            irregular: HashMap::new(),
            prep_replacement_extra: ["that".to_string()].into_iter().collect(),
        };
        lexicon
            .extend_from_tsv(DEFAULT_LEXICON_TSV, "bundled lexicon")
            .expect("bundled lexicon asset is well-formed");
        lexicon
            .load_irregular(IRREGULAR_VERBS_TSV, "bundled irregular verbs")
            .expect("bundled irregular verb asset is well-formed");
        lexicon
    }

    /// Bundled lexicon, optionally extended/overridden by a user TSV file of
    /// `word<TAB>TAG` rows.
    pub fn load(path: Option<&Path>) -> Result<Lexicon, LexiconError> {
        let mut lexicon = Lexicon::bundled();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            lexicon.extend_from_tsv(&text, &path.display().to_string())?;
        }
        Ok(lexicon)
    }

    /// Adds `word<TAB>TAG` rows.  Blank lines and `#` comments are skipped;
    /// anything else that is not exactly two tab-separated fields with a
    /// known tag is an error carrying its (1-based) row number.
    pub fn extend_from_tsv(&mut self, text: &str, name: &str) -> Result<(), LexiconError> {
        for (idx, line) in text.lines().enumerate() {
            let row = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || LexiconError::MalformedRow {
                name: name.to_string(),
                row,
                text: line.to_string(),
            };
            let (word, tag) = line.split_once('\t').ok_or_else(malformed)?;
            if word.is_empty() || word.contains('\t') || tag.contains('\t') {
                return Err(malformed());
            }
            let tag: PosTag = tag.trim().parse().map_err(|()| malformed())?;
            self.pos.entry(word.to_lowercase()).or_default().insert(tag);
        }
        Ok(())
    }

    fn load_irregular(&mut self, text: &str, name: &str) -> Result<(), LexiconError> {
        for (idx, line) in text.lines().enumerate() {
            let row = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t').map(str::trim);
            let base = fields.next().filter(|b| !b.is_empty()).ok_or_else(|| {
                LexiconError::MalformedRow {
                    name: name.to_string(),
                    row,
                    text: line.to_string(),
                }
            })?;
            let base = base.to_lowercase();
            self.irregular.insert(base.clone(), base.clone());
            for form in fields.filter(|f| !f.is_empty()) {
                self.irregular.insert(form.to_lowercase(), base.clone());
            }
        }
        Ok(())
    }

    pub fn tags(&self, word: &str) -> BTreeSet<PosTag> {
        let lower = word.to_lowercase();
        let mut tags = self.pos.get(&lower).cloned().unwrap_or_default();
        if self.irregular.contains_key(&lower) {
            tags.insert(PosTag::Verb);
        }
        tags
    }

    pub fn has_tag(&self, word: &str, tag: PosTag) -> bool {
        self.tags(word).contains(&tag)
    }

    pub fn is_preposition(&self, word: &str) -> bool {
        self.has_tag(word, PosTag::Prep)
    }

    /// Accepts the extended replacement class for `R:PREP` edits.
    pub fn is_preposition_replacement(&self, word: &str) -> bool {
        self.is_preposition(word) || self.prep_replacement_extra.contains(&word.to_lowercase())
    }

    /// A token counts as punctuation if it is in the punctuation set or
    /// consists solely of non-alphanumeric characters.
    pub fn is_punct(&self, token: &str) -> bool {
        self.has_tag(token, PosTag::Punct)
            || (!token.is_empty() && token.chars().all(|c| !c.is_alphanumeric()))
    }

    /// True when the word appears anywhere in the lexicon (POS map or
    /// irregular verb table).
    pub fn is_known_word(&self, word: &str) -> bool {
        let lower = word.to_lowercase();
        self.pos.contains_key(&lower) || self.irregular.contains_key(&lower)
    }

    fn is_verb(&self, word: &str) -> bool {
        let lower = word.to_lowercase();
        self.irregular.contains_key(&lower)
            || self.pos.get(&lower).is_some_and(|tags| tags.contains(&PosTag::Verb))
    }

    /// Candidate verb lemmas for a word: irregular table lookup plus
    /// `-ed`/`-ing`/`-s` suffix stripping, keeping only candidates the
    /// lexicon knows as verbs.
    pub fn verb_lemmas(&self, word: &str) -> BTreeSet<String> {
        let lower = word.to_lowercase();
        let mut lemmas = BTreeSet::new();
        if let Some(base) = self.irregular.get(&lower) {
            lemmas.insert(base.clone());
        }
        if self.is_verb(&lower) {
            lemmas.insert(lower.clone());
        }
        let mut candidates: Vec<String> = Vec::new();
        for suffix in ["ing", "ed", "ies", "es", "s"] {
            if let Some(stem) = lower.strip_suffix(suffix) {
                if stem.is_empty() {
                    continue;
                }
                match suffix {
                    "ies" => candidates.push(format!("{stem}y")),
                    "ing" | "ed" => {
                        candidates.push(stem.to_string());
                        candidates.push(format!("{stem}e"));
                        let chars: Vec<char> = stem.chars().collect();
                        if chars.len() >= 2 && chars[chars.len() - 1] == chars[chars.len() - 2] {
                            candidates.push(chars[..chars.len() - 1].iter().collect());
                        }
                    }
                    _ => candidates.push(stem.to_string()),
                }
            }
        }
        for candidate in candidates {
            if self.is_verb(&candidate) {
                let base = self
                    .irregular
                    .get(&candidate)
                    .cloned()
                    .unwrap_or(candidate);
                lemmas.insert(base);
            }
        }
        lemmas
    }

    /// Entry counts, used to sanity-check the bundled asset.
    pub fn class_sizes(&self) -> HashMap<PosTag, usize> {
        let mut sizes = HashMap::new();
        for tags in self.pos.values() {
            for tag in tags {
                *sizes.entry(*tag).or_insert(0) += 1;
            }
        }
        sizes
    }

    pub fn irregular_base_count(&self) -> usize {
        self.irregular
            .values()
            .collect::<HashSet<_>>()
            .len()
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::bundled()
    }
}

/// Character-level Levenshtein distance, used by the spelling rule.
pub fn char_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut row = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            row[j + 1] = sub.min(prev[j + 1] + 1).min(row[j] + 1);
        }
        std::mem::swap(&mut prev, &mut row);
    }
    prev[b.len()]
}

/// Assigns an error type to a raw edit with the first matching rule:
/// punctuation, orthography (case/whitespace), word order, closed classes,
/// verb tense, noun number, POS agreement, spelling, and finally `OTHER`.
///
/// Total and deterministic over every raw edit that is not a pure match.
pub fn classify_edit(edit: &RawEdit, lexicon: &Lexicon) -> ErrorType {
    let op = if edit.source.is_empty() {
        EditOp::Missing
    } else if edit.replacement.is_empty() {
        EditOp::Unnecessary
    } else {
        EditOp::Replacement
    };
    ErrorType::new(op, classify_category(op, edit, lexicon))
}

fn classify_category(op: EditOp, edit: &RawEdit, lexicon: &Lexicon) -> Category {
    let src: Vec<String> = edit.source.iter().map(|t| t.to_lowercase()).collect();
    let repl: Vec<String> = edit.replacement.iter().map(|t| t.to_lowercase()).collect();
    let present_sides: Vec<&[String]> = [&src, &repl]
        .into_iter()
        .filter(|side| !side.is_empty())
        .map(|side| side.as_slice())
        .collect();

    // 1. punctuation
    if present_sides
        .iter()
        .all(|side| side.iter().all(|t| lexicon.is_punct(t)))
    {
        return Category::Punct;
    }

    if op == EditOp::Replacement {
        // 2. orthography: equal after case folding and whitespace removal
        if src.concat() == repl.concat() {
            return Category::Orth;
        }
        // 3. word order: case-insensitively equal multisets
        let mut src_sorted = src.clone();
        let mut repl_sorted = repl.clone();
        src_sorted.sort_unstable();
        repl_sorted.sort_unstable();
        if src_sorted == repl_sorted {
            return Category::WordOrder;
        }
    }

    // 4. closed classes, in a fixed order
    for (tag, category) in [
        (PosTag::Prep, Category::Prep),
        (PosTag::Det, Category::Det),
        (PosTag::Pron, Category::Pron),
        (PosTag::Conj, Category::Conj),
    ] {
        let hit = match op {
            EditOp::Replacement => {
                let src_in = src.iter().all(|t| lexicon.has_tag(t, tag));
                let repl_in = repl.iter().all(|t| {
                    if tag == PosTag::Prep {
                        lexicon.is_preposition_replacement(t)
                    } else {
                        lexicon.has_tag(t, tag)
                    }
                });
                src_in && repl_in
            }
            _ => present_sides[0].iter().all(|t| lexicon.has_tag(t, tag)),
        };
        if hit {
            return category;
        }
    }

    // 5. verb tense: both sides share a verb lemma
    if op == EditOp::Replacement && src.len() == 1 && repl.len() == 1 {
        let a = lexicon.verb_lemmas(&src[0]);
        if !a.is_empty() && a.intersection(&lexicon.verb_lemmas(&repl[0])).next().is_some() {
            return Category::VerbTense;
        }
    }

    // 6. noun number: sides differ only by plural -s/-es
    if op == EditOp::Replacement && src.len() == 1 && repl.len() == 1 {
        let (a, b) = (&src[0], &repl[0]);
        let plural_of = |base: &str, plural: &str| {
            plural == format!("{base}s") || plural == format!("{base}es")
        };
        if plural_of(a, b) || plural_of(b, a) {
            return Category::NounNum;
        }
    }

    // 7. open classes by POS-map agreement across every present token
    let mut shared: Option<BTreeSet<PosTag>> = None;
    let mut all_tagged = true;
    'sides: for side in &present_sides {
        for token in side.iter() {
            let tags = lexicon.tags(token);
            if tags.is_empty() {
                all_tagged = false;
                break 'sides;
            }
            shared = Some(match shared.take() {
                None => tags,
                Some(acc) => acc.intersection(&tags).copied().collect(),
            });
        }
    }
    if all_tagged {
        if let Some(shared) = shared {
            for (tag, category) in [
                (PosTag::Verb, Category::Verb),
                (PosTag::Noun, Category::Noun),
                (PosTag::Adj, Category::Adj),
                (PosTag::Adv, Category::Adv),
            ] {
                if shared.contains(&tag) {
                    return category;
                }
            }
        }
    }

    // 8. spelling: unknown single token a small character distance away
    if op == EditOp::Replacement
        && src.len() == 1
        && repl.len() == 1
        && !lexicon.is_known_word(&src[0])
        && char_levenshtein(&src[0], &repl[0]) <= 2
    {
        return Category::Spell;
    }

    // 9.
    Category::Other
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(source: &[&str], replacement: &[&str]) -> RawEdit {
        RawEdit {
            src_start: 0,
            src_end: source.len(),
            tgt_start: 0,
            tgt_end: replacement.len(),
            source: source.iter().map(|t| t.to_string()).collect(),
            replacement: replacement.iter().map(|t| t.to_string()).collect(),
        }
    }

    #[test]
    fn bundled_lexicon_meets_size_floor() {
        let lexicon = Lexicon::bundled();
        let sizes = lexicon.class_sizes();
        assert!(sizes[&PosTag::Prep] >= 50, "prepositions: {:?}", sizes[&PosTag::Prep]);
        assert!(sizes[&PosTag::Det] >= 30, "determiners: {:?}", sizes[&PosTag::Det]);
        assert!(sizes[&PosTag::Pron] >= 30, "pronouns: {:?}", sizes[&PosTag::Pron]);
        assert!(lexicon.irregular_base_count() >= 150, "irregular verbs: {}", lexicon.irregular_base_count());
        for p in [".", ",", ";", ":", "!", "?", "'", "\"", "(", ")", "-"] {
            assert!(lexicon.is_punct(p), "punctuation set must include {p:?}");
        }
        assert!(lexicon.is_preposition("with"));
        assert!(!lexicon.tags("that").is_empty());
        assert!(lexicon.is_preposition_replacement("that"));
        assert!(!lexicon.is_preposition("that"));
    }

    #[test]
    fn tsv_override_extends_bundled_entries() {
        let mut lexicon = Lexicon::bundled();
        assert!(!lexicon.is_preposition("zorp"));
        lexicon.extend_from_tsv("zorp\tPREP", "test").unwrap();
        assert!(lexicon.is_preposition("zorp"));
    }

    #[test]
    fn malformed_tsv_row_reports_row_number() {
        let mut lexicon = Lexicon::bundled();
        match lexicon.extend_from_tsv("zorp PREP", "test") {
            Err(LexiconError::MalformedRow { row, text, .. }) => {
                assert_eq!(row, 1);
                assert_eq!(text, "zorp PREP");
            }
            other => panic!("expected malformed row, got {other:?}"),
        }
        match lexicon.extend_from_tsv("ok\tPREP\nbad\tWAT", "test") {
            Err(LexiconError::MalformedRow { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected malformed row, got {other:?}"),
        }
    }

    #[test]
    fn load_from_file_errors_name_the_path() {
        let err = Lexicon::load(Some(Path::new("/nonexistent/lexicon.tsv"))).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/lexicon.tsv"));
    }

    #[test]
    fn char_levenshtein_basics() {
        assert_eq!(char_levenshtein("", ""), 0);
        assert_eq!(char_levenshtein("abc", "abc"), 0);
        assert_eq!(char_levenshtein("ther", "their"), 1);
        assert_eq!(char_levenshtein("recieve", "receive"), 2);
        assert_eq!(char_levenshtein("zorp", "blix"), 4);
    }

    /// Golden labels: hand-checked expected types for the rule order.
    #[test]
    fn golden_classification_fixtures() {
        let lexicon = Lexicon::bundled();
        let cases: &[(&[&str], &[&str], &str)] = &[
            // orthography / punctuation
            (&["in"], &["In"], "R:ORTH"),
            (&["THE"], &["the"], "R:ORTH"),
            (&["alot"], &["a", "lot"], "R:ORTH"),
            (&[], &[","], "M:PUNCT"),
            (&[], &["."], "M:PUNCT"),
            (&[], &["!"], "M:PUNCT"),
            (&["."], &[","], "R:PUNCT"),
            (&["?"], &["!"], "R:PUNCT"),
            (&[","], &[], "U:PUNCT"),
            // word order
            (&["time", "more"], &["more", "time"], "R:WO"),
            (&["is", "he"], &["He", "is"], "R:WO"),
            // closed classes
            (&["with"], &["that"], "R:PREP"),
            (&["in"], &["on"], "R:PREP"),
            (&["of"], &["for"], "R:PREP"),
            (&[], &["to"], "M:PREP"),
            (&["of"], &[], "U:PREP"),
            (&[], &["the"], "M:DET"),
            (&[], &["a"], "M:DET"),
            (&["a"], &["the"], "R:DET"),
            (&["that"], &["this"], "R:DET"),
            (&["the"], &[], "U:DET"),
            (&["he"], &["she"], "R:PRON"),
            (&[], &["it"], "M:PRON"),
            (&["them"], &[], "U:PRON"),
            (&["and"], &["but"], "R:CONJ"),
            (&[], &["because"], "M:CONJ"),
            // verb tense
            (&["eat"], &["ate"], "R:VERB:TENSE"),
            (&["go"], &["went"], "R:VERB:TENSE"),
            (&["goes"], &["going"], "R:VERB:TENSE"),
            (&["played"], &["plays"], "R:VERB:TENSE"),
            (&["walk"], &["walked"], "R:VERB:TENSE"),
            (&["is"], &["are"], "R:VERB:TENSE"),
            (&["dealed"], &["dealt"], "R:VERB:TENSE"),
            // noun number
            (&["alien"], &["aliens"], "R:NOUN:NUM"),
            (&["cat"], &["cats"], "R:NOUN:NUM"),
            (&["boxes"], &["box"], "R:NOUN:NUM"),
            // POS agreement
            (&["say"], &["tell"], "R:VERB"),
            (&["said"], &["told"], "R:VERB"),
            (&["dog"], &["cat"], "R:NOUN"),
            (&["big"], &["small"], "R:ADJ"),
            (&["alive"], &["live"], "R:ADJ"),
            (&["quickly"], &["slowly"], "R:ADV"),
            (&[], &["very"], "M:ADV"),
            (&["really"], &[], "U:ADV"),
            (&["alien", "spaceship"], &[], "U:NOUN"),
            // spelling
            (&["ther"], &["their"], "R:SPELL"),
            (&["lifestile"], &["lifestyle"], "R:SPELL"),
            (&["recieve"], &["receive"], "R:SPELL"),
            // other
            (&["happy"], &["run"], "R:OTHER"),
            (&["zorp"], &["blix"], "R:OTHER"),
            (&[], &["the", "cat"], "M:OTHER"),
        ];
        assert!(cases.len() >= 40);
        for (source, replacement, expected) in cases {
            let got = classify_edit(&raw(source, replacement), &lexicon).to_string();
            assert_eq!(&got, expected, "{source:?} -> {replacement:?}");
        }
    }

    #[test]
    fn op_follows_span_shape() {
        let lexicon = Lexicon::bundled();
        assert_eq!(classify_edit(&raw(&[], &["x"]), &lexicon).op, EditOp::Missing);
        assert_eq!(classify_edit(&raw(&["x"], &[]), &lexicon).op, EditOp::Unnecessary);
        assert_eq!(classify_edit(&raw(&["x"], &["y"]), &lexicon).op, EditOp::Replacement);
    }

    #[test]
    fn classification_is_deterministic() {
        let lexicon = Lexicon::bundled();
        let edit = raw(&["with"], &["that"]);
        let first = classify_edit(&edit, &lexicon);
        for _ in 0..3 {
            assert_eq!(classify_edit(&edit, &lexicon), first);
        }
    }

    /// Totality and op correctness over pseudo-random edits: every edit gets
    /// exactly one type, and the op always follows the span shape.
    #[test]
    fn op_correctness_over_random_edits() {
        let lexicon = Lexicon::bundled();
        let vocab = ["the", "cat", "with", ",", "zorp", "went", "alot", "In", "b"];
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = move |n: usize| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % n as u64) as usize
        };
        for _ in 0..2_000 {
            let src_len = next(4);
            let repl_len = if src_len == 0 { next(3) + 1 } else { next(4) };
            let source: Vec<&str> = (0..src_len).map(|_| vocab[next(vocab.len())]).collect();
            let replacement: Vec<&str> = (0..repl_len).map(|_| vocab[next(vocab.len())]).collect();
            let edit = raw(&source, &replacement);
            let got = classify_edit(&edit, &lexicon);
            let expected_op = if source.is_empty() {
                EditOp::Missing
            } else if replacement.is_empty() {
                EditOp::Unnecessary
            } else {
                EditOp::Replacement
            };
            assert_eq!(got.op, expected_op, "{source:?} -> {replacement:?}");
            assert_eq!(classify_edit(&edit, &lexicon), got);
        }
    }
}
