use std::collections::HashSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One pronunciation of one word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PronEntry {
    pub word: String,
    pub phones: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PronDict {
    pub entries: Vec<PronEntry>,
}

/// MFA lexicons may carry up to four probability columns between the word
/// and its phones.
const MAX_NUMERIC_COLUMNS: usize = 4;

/// Parses an MFA-style pronunciation dictionary.
///
/// Each non-blank line is a word, up to four numeric columns (discarded),
/// then the phones, separated by tabs or spaces. Repeated `(word, phones)`
/// pairs are kept once, in first-seen order.
pub fn parse_mfa_dict<R: BufRead>(source: R) -> Result<PronDict> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (k, line) in source.lines().enumerate() {
        let line = line?;
        let mut tokens = line.split_whitespace();
        let Some(word) = tokens.next() else {
            continue;
        };
        let mut rest: Vec<&str> = tokens.collect();
        let numeric = rest
            .iter()
            .take(MAX_NUMERIC_COLUMNS)
            .take_while(|t| t.parse::<f64>().is_ok())
            .count();
        rest.drain(..numeric);
        if rest.is_empty() {
            return Err(Error::Parse {
                line: k + 1,
                reason: format!("word {word:?} has no phones"),
            });
        }
        let entry = PronEntry {
            word: word.to_owned(),
            phones: rest.into_iter().map(str::to_owned).collect(),
        };
        if seen.insert(entry.clone()) {
            entries.push(entry);
        }
    }
    if entries.is_empty() {
        return Err(Error::Empty(
            "pronunciation dictionary has no entries".into(),
        ));
    }
    Ok(PronDict { entries })
}
