//! Error-type taxonomy: an edit operation crossed with a linguistic category.
//!
//! Canonical string form is `"OP:CATEGORY"`, e.g. `"R:PREP"` or
//! `"R:VERB:TENSE"` (the category itself may contain a colon).  Strings
//! outside the built-in taxonomy are carried verbatim as opaque labels so
//! that gold annotations from richer schemes are never remapped.

use std::fmt;
use std::str::FromStr;

/// Edit operation: Missing (insertion), Replacement, or Unnecessary (deletion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EditOp {
    Missing,
    Replacement,
    Unnecessary,
}

impl EditOp {
    pub const ALL: [EditOp; 3] = [EditOp::Missing, EditOp::Replacement, EditOp::Unnecessary];

    pub fn letter(self) -> char {
        match self {
            EditOp::Missing => 'M',
            EditOp::Replacement => 'R',
            EditOp::Unnecessary => 'U',
        }
    }
}

impl FromStr for EditOp {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "M" => Ok(EditOp::Missing),
            "R" => Ok(EditOp::Replacement),
            "U" => Ok(EditOp::Unnecessary),
            _ => Err(()),
        }
    }
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Linguistic category of an edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Punct,
    Orth,
    Prep,
    Det,
    Verb,
    VerbTense,
    Noun,
    NounNum,
    Pron,
    Conj,
    Adj,
    Adv,
    Spell,
    WordOrder,
    Other,
}

impl Category {
    pub const ALL: [Category; 15] = [
        Category::Punct,
        Category::Orth,
        Category::Prep,
        Category::Det,
        Category::Verb,
        Category::VerbTense,
        Category::Noun,
        Category::NounNum,
        Category::Pron,
        Category::Conj,
        Category::Adj,
        Category::Adv,
        Category::Spell,
        Category::WordOrder,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Punct => "PUNCT",
            Category::Orth => "ORTH",
            Category::Prep => "PREP",
            Category::Det => "DET",
            Category::Verb => "VERB",
            Category::VerbTense => "VERB:TENSE",
            Category::Noun => "NOUN",
            Category::NounNum => "NOUN:NUM",
            Category::Pron => "PRON",
            Category::Conj => "CONJ",
            Category::Adj => "ADJ",
            Category::Adv => "ADV",
            Category::Spell => "SPELL",
            Category::WordOrder => "WO",
            Category::Other => "OTHER",
        }
    }
}

impl FromStr for Category {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or(())
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully typed error: operation plus category, e.g. `R:PREP`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ErrorType {
    pub op: EditOp,
    pub category: Category,
}

impl ErrorType {
    pub fn new(op: EditOp, category: Category) -> Self {
        ErrorType { op, category }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.op, self.category)
    }
}

impl FromStr for ErrorType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let (op, category) = s.split_once(':').ok_or(())?;
        Ok(ErrorType {
            op: op.parse()?,
            category: category.parse()?,
        })
    }
}

/// The label carried by an [`crate::m2::Edit`]: the `noop` sentinel, a typed
/// error, or a verbatim string from outside the built-in taxonomy (including
/// the M2 `UNK` marker and full ERRANT types such as `R:NOUN:INFL`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EditLabel {
    Noop,
    Typed(ErrorType),
    Opaque(String),
}

impl EditLabel {
    /// Total parse: never fails, unknown strings become [`EditLabel::Opaque`].
    pub fn parse(s: &str) -> EditLabel {
        if s == "noop" {
            return EditLabel::Noop;
        }
        match s.parse::<ErrorType>() {
            Ok(t) => EditLabel::Typed(t),
            Err(()) => EditLabel::Opaque(s.to_string()),
        }
    }

    pub fn is_noop(&self) -> bool {
        matches!(self, EditLabel::Noop)
    }

    /// The edit operation, when one can be read off the label.  Opaque labels
    /// with an `M:`/`R:`/`U:` prefix (e.g. `R:NOUN:INFL`) still report theirs.
    pub fn op(&self) -> Option<EditOp> {
        match self {
            EditLabel::Noop => None,
            EditLabel::Typed(t) => Some(t.op),
            EditLabel::Opaque(s) => s.split_once(':').and_then(|(op, _)| op.parse().ok()),
        }
    }
}

impl fmt::Display for EditLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditLabel::Noop => f.write_str("noop"),
            EditLabel::Typed(t) => write!(f, "{t}"),
            EditLabel::Opaque(s) => f.write_str(s),
        }
    }
}

impl From<ErrorType> for EditLabel {
    fn from(t: ErrorType) -> Self {
        EditLabel::Typed(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_roundtrip_over_full_enumeration() {
        for op in EditOp::ALL {
            for category in Category::ALL {
                let t = ErrorType::new(op, category);
                let s = t.to_string();
                assert_eq!(s.parse::<ErrorType>(), Ok(t), "{s}");
                assert_eq!(EditLabel::parse(&s), EditLabel::Typed(t));
            }
        }
    }

    #[test]
    fn colon_in_category_parses() {
        let t: ErrorType = "R:VERB:TENSE".parse().unwrap();
        assert_eq!(t, ErrorType::new(EditOp::Replacement, Category::VerbTense));
        assert_eq!(t.to_string(), "R:VERB:TENSE");
    }

    #[test]
    fn unknown_strings_become_opaque_not_other() {
        assert_eq!(
            EditLabel::parse("R:NOUN:INFL"),
            EditLabel::Opaque("R:NOUN:INFL".to_string())
        );
        assert_eq!(EditLabel::parse("UNK"), EditLabel::Opaque("UNK".to_string()));
        assert_eq!(EditLabel::parse("noop"), EditLabel::Noop);
        // opaque labels render verbatim
        assert_eq!(EditLabel::parse("R:NOUN:INFL").to_string(), "R:NOUN:INFL");
    }

    #[test]
    fn opaque_labels_still_expose_an_op() {
        assert_eq!(EditLabel::parse("R:NOUN:INFL").op(), Some(EditOp::Replacement));
        assert_eq!(EditLabel::parse("UNK").op(), None);
        assert_eq!(EditLabel::Noop.op(), None);
        assert_eq!(EditLabel::parse("M:PUNCT").op(), Some(EditOp::Missing));
    }
}
