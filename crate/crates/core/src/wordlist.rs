//! Swadesh word lists: ingestion, normalization and corpus validation.
//!
//! A list file is UTF-8 TSV with the header `index<TAB>gloss<TAB>word` and one
//! row per meaning. Rows whose word cell is blank leave the slot unfilled.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Classic Swadesh list size.
pub const DEFAULT_MEANINGS: u32 = 200;

/// Default coverage below which [`validate_corpus`] emits a warning.
pub const DEFAULT_COVERAGE_FLOOR: usize = 100;

pub const TSV_HEADER: &str = "index\tgloss\tword";

/// A meaning slot of the list: its 1-based index and English gloss.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meaning {
    pub index: u32,
    pub gloss: String,
}

/// A normalized orthographic form.
///
/// Holds NFC-composed, lowercased text with whitespace and hyphens removed.
/// Never empty and never contains control characters.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WordForm {
    text: String,
    scalars: Box<[char]>,
}

fn is_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{00AD}' | '\u{2010}' | '\u{2011}')
}

impl WordForm {
    pub fn normalize(raw: &str) -> Result<Self> {
        let composed: String = raw.nfc().collect();
        let lowered = composed.to_lowercase();
        let mut stripped = String::with_capacity(lowered.len());
        for c in lowered.chars() {
            if c.is_whitespace() || is_hyphen(c) {
                continue;
            }
            if c.is_control() {
                return Err(Error::ControlCharacter {
                    raw: raw.to_owned(),
                    code: c as u32,
                });
            }
            stripped.push(c);
        }
        // removing separators can bring a base and a combining mark together
        let text: String = stripped.nfc().collect();
        if text.is_empty() {
            return Err(Error::EmptyForm { raw: raw.to_owned() });
        }
        let scalars = text.chars().collect();
        Ok(WordForm { text, scalars })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Unicode scalar values, the unit of comparison.
    pub fn scalars(&self) -> &[char] {
        &self.scalars
    }

    pub fn len(&self) -> usize {
        self.scalars.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Debug for WordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WordForm({:?})", self.text)
    }
}

impl fmt::Display for WordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Shorthand for [`WordForm::normalize`].
pub fn normalize_form(raw: &str) -> Result<WordForm> {
    WordForm::normalize(raw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub gloss: String,
    pub form: WordForm,
}

/// One language's Swadesh list, at most one form per meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    language_id: String,
    town: Option<String>,
    slots: BTreeMap<u32, Slot>,
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    /// M, the number of meanings in the corpus.
    pub meanings: u32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            meanings: DEFAULT_MEANINGS,
        }
    }
}

impl WordList {
    pub fn new(language_id: impl Into<String>) -> Self {
        WordList {
            language_id: language_id.into(),
            town: None,
            slots: BTreeMap::new(),
        }
    }

    pub fn with_town(mut self, town: impl Into<String>) -> Self {
        self.town = Some(town.into());
        self
    }

    /// Fills a slot, rejecting a second form for the same meaning.
    pub fn insert(&mut self, meaning: Meaning, form: WordForm) -> Result<()> {
        if self.slots.contains_key(&meaning.index) {
            return Err(Error::DuplicateMeaning {
                line: 0,
                index: meaning.index,
            });
        }
        self.slots.insert(
            meaning.index,
            Slot {
                gloss: meaning.gloss,
                form,
            },
        );
        Ok(())
    }

    pub fn language_id(&self) -> &str {
        &self.language_id
    }

    pub fn town(&self) -> Option<&str> {
        self.town.as_deref()
    }

    /// Number of filled slots.
    pub fn coverage(&self) -> usize {
        self.slots.len()
    }

    pub fn get(&self, index: u32) -> Option<&WordForm> {
        self.slots.get(&index).map(|s| &s.form)
    }

    pub fn slots(&self) -> impl Iterator<Item = (u32, &Slot)> + '_ {
        self.slots.iter().map(|(&i, s)| (i, s))
    }

    pub fn meaning_indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.slots.keys().copied()
    }

    pub fn parse_tsv(input: &[u8], language_id: impl Into<String>, opts: ParseOptions) -> Result<Self> {
        let text = std::str::from_utf8(input).map_err(|e| Error::Encoding {
            offset: e.valid_up_to(),
        })?;
        let mut list = WordList::new(language_id);
        let mut seen = HashSet::new();
        let mut saw_header = false;
        for (n, raw_line) in text.split('\n').enumerate() {
            let line_no = n + 1;
            let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
            if !saw_header {
                if line.trim_start_matches('\u{feff}') != TSV_HEADER {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected header {TSV_HEADER:?}"),
                    });
                }
                saw_header = true;
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 3 tab-separated columns, found {}", cols.len()),
                });
            }
            let index: u32 = cols[0].trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("meaning index {:?} is not a positive integer", cols[0]),
            })?;
            if index == 0 || index > opts.meanings {
                return Err(Error::MeaningOutOfRange {
                    line: line_no,
                    index,
                    max: opts.meanings,
                });
            }
            if !seen.insert(index) {
                return Err(Error::DuplicateMeaning { line: line_no, index });
            }
            if cols[2].trim().is_empty() {
                continue;
            }
            let form = WordForm::normalize(cols[2]).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            list.slots.insert(
                index,
                Slot {
                    gloss: cols[1].to_owned(),
                    form,
                },
            );
        }
        if !saw_header {
            return Err(Error::Parse {
                line: 1,
                message: format!("missing header {TSV_HEADER:?}"),
            });
        }
        Ok(list)
    }

    /// Reads a list file; the language id is the file stem.
    pub fn from_path(path: &Path, opts: ParseOptions) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        WordList::parse_tsv(&bytes, id, opts)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(TSV_HEADER);
        out.push('\n');
        for (index, slot) in &self.slots {
            out.push_str(&format!("{index}\t{}\t{}\n", slot.gloss, slot.form));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageReport {
    pub language_id: String,
    pub coverage: usize,
    /// Meanings present somewhere in the corpus but unfilled here.
    pub missing: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationWarning {
    pub language_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub languages: Vec<LanguageReport>,
    pub warnings: Vec<ValidationWarning>,
}

/// Checks a corpus for duplicate ids and thin coverage.
pub fn validate_corpus(lists: &[WordList], coverage_floor: usize) -> Result<ValidationReport> {
    if lists.len() < 2 {
        return Err(Error::TooFew {
            what: "word lists",
            needed: 2,
            got: lists.len(),
        });
    }
    let mut seen = HashSet::new();
    for l in lists {
        if !seen.insert(l.language_id()) {
            return Err(Error::DuplicateLanguage(l.language_id().to_owned()));
        }
    }
    let union: BTreeSet<u32> = lists.iter().flat_map(|l| l.meaning_indices()).collect();
    let mut languages = Vec::with_capacity(lists.len());
    let mut warnings = Vec::new();
    for l in lists {
        let missing = union.iter().copied().filter(|i| l.get(*i).is_none()).collect();
        if l.coverage() < coverage_floor {
            warnings.push(ValidationWarning {
                language_id: l.language_id().to_owned(),
                message: format!("coverage {} below floor {}", l.coverage(), coverage_floor),
            });
        }
        languages.push(LanguageReport {
            language_id: l.language_id().to_owned(),
            coverage: l.coverage(),
            missing,
        });
    }
    Ok(ValidationReport { languages, warnings })
}
