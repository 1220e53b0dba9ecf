//! Type dictionaries and grammars.
//!
//! Lexicon files are JSON:
//!
//! ```json
//! { "basic_types": ["n", "s", "j", "sigma"],
//!   "designated": ["s"],
//!   "entries": [{ "word": "kill", "type": "(n -o s) o- n" }] }
//! ```
//!
//! A word may carry several entries; they are kept in file order and parsers
//! try them in that order.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{parse_lambek, BasicType, LambekType, TypeParseError};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed lexicon at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("entry {index} (`{word}`): {source}")]
    Type {
        index: usize,
        word: String,
        #[source]
        source: TypeParseError,
    },
    #[error("entry {index} (`{word}`) uses undeclared basic type `{basic}`")]
    UndeclaredBasic {
        index: usize,
        word: String,
        basic: String,
    },
    #[error("designated type `{0}` is not a declared basic type")]
    UndeclaredDesignated(String),
    #[error("no designated types declared")]
    NoDesignated,
    #[error("duplicate entry for `{word}` with type `{ty}`")]
    Duplicate { word: String, ty: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub lambek_type: LambekType,
    /// Position of the entry in the source file.
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct Grammar {
    basic_types: Vec<BasicType>,
    designated: Vec<BasicType>,
    entries: Vec<LexiconEntry>,
    by_word: HashMap<String, Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GrammarFile {
    basic_types: Vec<String>,
    designated: Vec<String>,
    entries: Vec<EntryFile>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    word: String,
    #[serde(rename = "type")]
    ty: String,
}

impl Grammar {
    pub fn new(
        basic_types: Vec<BasicType>,
        designated: Vec<BasicType>,
        entries: Vec<(String, LambekType)>,
    ) -> Result<Self, LexiconError> {
        let declared: BTreeSet<&BasicType> = basic_types.iter().collect();
        if designated.is_empty() {
            return Err(LexiconError::NoDesignated);
        }
        for d in &designated {
            if !declared.contains(d) {
                return Err(LexiconError::UndeclaredDesignated(d.to_string()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut stored = Vec::with_capacity(entries.len());
        let mut by_word: HashMap<String, Vec<usize>> = HashMap::new();
        for (index, (word, ty)) in entries.into_iter().enumerate() {
            if let Some(b) = ty.leaves().into_iter().find(|b| !declared.contains(b)) {
                return Err(LexiconError::UndeclaredBasic {
                    index,
                    word,
                    basic: b.to_string(),
                });
            }
            if !seen.insert((word.clone(), ty.to_string())) {
                return Err(LexiconError::Duplicate {
                    ty: ty.to_string(),
                    word,
                });
            }
            by_word.entry(word.clone()).or_default().push(index);
            stored.push(LexiconEntry {
                word,
                lambek_type: ty,
                index,
            });
        }
        Ok(Grammar {
            basic_types,
            designated,
            entries: stored,
            by_word,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let file: GrammarFile = serde_json::from_str(text).map_err(|e| LexiconError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut entries = Vec::with_capacity(file.entries.len());
        for (index, e) in file.entries.into_iter().enumerate() {
            let ty = parse_lambek(&e.ty).map_err(|source| LexiconError::Type {
                index,
                word: e.word.clone(),
                source,
            })?;
            entries.push((e.word, ty));
        }
        Grammar::new(
            file.basic_types.iter().map(|s| BasicType::new(s)).collect(),
            file.designated.iter().map(|s| BasicType::new(s)).collect(),
            entries,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Grammar::from_json(&std::fs::read_to_string(path)?)
    }

    /// Canonical JSON rendering (two-space indent, trailing newline).
    pub fn to_json(&self) -> String {
        let file = GrammarFile {
            basic_types: self.basic_types.iter().map(|b| b.to_string()).collect(),
            designated: self.designated.iter().map(|b| b.to_string()).collect(),
            entries: self
                .entries
                .iter()
                .map(|e| EntryFile {
                    word: e.word.clone(),
                    ty: e.lambek_type.to_string(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("grammar serialises");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LexiconError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// All entries for `word` in file order; empty if the word is unknown.
    pub fn lookup(&self, word: &str) -> Vec<&LexiconEntry> {
        self.by_word
            .get(word)
            .map(|ix| ix.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn basic_types(&self) -> &[BasicType] {
        &self.basic_types
    }

    pub fn designated(&self) -> &[BasicType] {
        &self.designated
    }

    pub fn is_designated(&self, b: &BasicType) -> bool {
        self.designated.contains(b)
    }

    /// Entry choices for each word of a sentence, or the first unknown word.
    pub fn candidates<'g>(
        &'g self,
        words: &[String],
    ) -> Result<Vec<Vec<&'g LexiconEntry>>, String> {
        words
            .iter()
            .map(|w| {
                let found = self.lookup(w);
                if found.is_empty() {
                    Err(w.clone())
                } else {
                    Ok(found)
                }
            })
            .collect()
    }
}

/// Iterates over every combination of one entry per word, in lexicographic
/// order of entry positions (first word varies slowest).
pub fn assignments<'a, 'g>(
    candidates: &'a [Vec<&'g LexiconEntry>],
) -> impl Iterator<Item = Vec<&'g LexiconEntry>> + 'a {
    let total: usize = candidates.iter().map(Vec::len).product();
    (0..total).map(move |mut k| {
        let mut picks = vec![candidates[0][0]; candidates.len()];
        for (slot, options) in candidates.iter().enumerate().rev() {
            picks[slot] = options[k % options.len()];
            k /= options.len();
        }
        picks
    })
}

/// Splits a sentence on whitespace and lowercases it to match lexicon keys.
pub fn tokenize_sentence(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = include_str!("../../../data/toy.json");

    #[test]
    fn toy_lexicon_matches_type_table() {
        let g = Grammar::from_json(TOY).unwrap();
        let kill: Vec<String> = g
            .lookup("kill")
            .iter()
            .map(|e| e.lambek_type.to_string())
            .collect();
        assert_eq!(kill, ["(n -o s) o- n", "(sigma -o j) o- n"]);
        assert_eq!(g.lookup("men")[0].lambek_type, LambekType::basic("n"));
        assert!(g.lookup("zebra").is_empty());
        let table = [
            ("men", "n"),
            ("dogs", "n"),
            ("cute", "n o- n"),
            ("do", "(n -o s) o- (sigma -o j)"),
            ("not", "(sigma -o j) o- (sigma -o j)"),
        ];
        for (w, t) in table {
            let found = g.lookup(w);
            assert_eq!(found.len(), 1, "{w}");
            assert_eq!(found[0].lambek_type.to_string(), t);
        }
        assert_eq!(g.designated(), &[BasicType::new("s")]);
    }

    #[test]
    fn canonical_file_round_trips_byte_for_byte() {
        let g = Grammar::from_json(TOY).unwrap();
        assert_eq!(g.to_json(), TOY);
    }

    #[test]
    fn empty_word_list_is_fine() {
        let g =
            Grammar::from_json(r#"{"basic_types":["s"],"designated":["s"],"entries":[]}"#).unwrap();
        assert!(g.entries().is_empty());
    }

    #[test]
    fn undeclared_basic_type_is_named() {
        let err = Grammar::from_json(
            r#"{"basic_types":["n","s"],"designated":["s"],"entries":[{"word":"x","type":"q -o s"}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("`q`"), "{err}");
    }

    #[test]
    fn duplicates_and_bad_json_rejected() {
        let dup = r#"{"basic_types":["n","s"],"designated":["s"],"entries":[
            {"word":"x","type":"n"},{"word":"x","type":"n"}]}"#;
        assert!(matches!(
            Grammar::from_json(dup),
            Err(LexiconError::Duplicate { .. })
        ));
        let bad = "{\n  \"basic_types\": [\"n\",\n}";
        match Grammar::from_json(bad) {
            Err(LexiconError::Json { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let bad_type = r#"{"basic_types":["n","s"],"designated":["s"],"entries":[{"word":"x","type":"n -o"}]}"#;
        assert!(matches!(
            Grammar::from_json(bad_type),
            Err(LexiconError::Type { .. })
        ));
    }

    #[test]
    fn assignments_enumerate_in_order() {
        let g = Grammar::from_json(TOY).unwrap();
        let words = tokenize_sentence("Men KILL dogs");
        let cands = g.candidates(&words).unwrap();
        let all: Vec<Vec<usize>> = assignments(&cands)
            .map(|a| a.iter().map(|e| e.index).collect())
            .collect();
        assert_eq!(all.len(), 2);
        assert!(all[0][1] < all[1][1]);
        assert_eq!(g.candidates(&tokenize_sentence("men eat")).unwrap_err(), "eat");
    }
}
