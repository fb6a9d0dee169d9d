//! Turns text documents and TSV count files into count distributions.

use std::collections::BTreeMap;

use unicode_segmentation::UnicodeSegmentation;

use crate::distribution::{CountDistribution, ItemId};
use crate::error::{Error, Result};

/// How raw text becomes items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    /// Lowercase tokens (Unicode case folding). Default on.
    pub lowercase: bool,
    pub split_policy: SplitPolicy,
    /// n-gram order; 1 yields plain tokens.
    pub ngram_n: usize,
    /// Separator between tokens inside an n-gram.
    pub ngram_joiner: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitPolicy {
    /// Word boundaries per Unicode segmentation; punctuation is stripped.
    #[default]
    UnicodeWhitespacePunct,
    /// Split on whitespace only; punctuation stays attached.
    WhitespaceOnly,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            split_policy: SplitPolicy::default(),
            ngram_n: 1,
            ngram_joiner: " ".to_string(),
        }
    }
}

impl TokenizerConfig {
    pub fn with_ngram(n: usize) -> Self {
        TokenizerConfig {
            ngram_n: n,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ngram_n < 1 {
            return Err(Error::InvalidConfig("ngram_n must be at least 1".into()));
        }
        if self.ngram_n > 1 && self.ngram_joiner.is_empty() {
            return Err(Error::InvalidConfig(
                "ngram_joiner must be non-empty when ngram_n > 1".into(),
            ));
        }
        Ok(())
    }
}

/// Deterministic token list for `text`: split, optionally lowercase, then
/// slide the n-gram window.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Result<Vec<ItemId>> {
    cfg.validate()?;
    let words: Vec<String> = match cfg.split_policy {
        SplitPolicy::UnicodeWhitespacePunct => text
            .unicode_words()
            .map(|w| fold_case(w, cfg.lowercase))
            .collect(),
        SplitPolicy::WhitespaceOnly => text
            .split_whitespace()
            .map(|w| fold_case(w, cfg.lowercase))
            .collect(),
    };
    if cfg.ngram_n == 1 {
        return Ok(words.into_iter().map(ItemId::new).collect());
    }
    if words.len() < cfg.ngram_n {
        return Ok(Vec::new());
    }
    Ok(words
        .windows(cfg.ngram_n)
        .map(|window| ItemId::new(window.join(&cfg.ngram_joiner)))
        .collect())
}

fn fold_case(word: &str, lowercase: bool) -> String {
    if lowercase {
        word.to_lowercase()
    } else {
        word.to_string()
    }
}

/// Tokenizes `text` and counts the token multiset.
pub fn distribution_from_text(
    text: &str,
    cfg: &TokenizerConfig,
    label: impl Into<String>,
) -> Result<CountDistribution> {
    let tokens = tokenize(text, cfg)?;
    let mut counts: BTreeMap<ItemId, u64> = BTreeMap::new();
    for token in tokens {
        *counts.entry(token).or_insert(0) += 1;
    }
    CountDistribution::from_count_map(label, counts)
}

/// Parses `item<TAB>count` lines. Blank lines and lines starting with `#`
/// are ignored; duplicate items accumulate; whitespace inside the item field
/// is preserved verbatim. The count separator is the last tab on the line.
pub fn distribution_from_tsv(content: &str, label: impl Into<String>) -> Result<CountDistribution> {
    let mut counts: BTreeMap<ItemId, u64> = BTreeMap::new();
    for (index, raw_line) in content.lines().enumerate() {
        let line_no = index + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (item, count_text) = line.rsplit_once('\t').ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected item<TAB>count".into(),
        })?;
        if item.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty item field".into(),
            });
        }
        let count = parse_count(item, count_text, line_no)?;
        *counts.entry(ItemId::new(item)).or_insert(0) += count;
    }
    CountDistribution::from_count_map(label, counts)
}

fn parse_count(item: &str, text: &str, line: usize) -> Result<u64> {
    match text.parse::<u64>() {
        Ok(0) => Err(Error::InvalidCount {
            item: item.to_string(),
            line: Some(line),
        }),
        Ok(n) => Ok(n),
        Err(_) => match text.parse::<i128>() {
            Ok(n) if n <= 0 => Err(Error::InvalidCount {
                item: item.to_string(),
                line: Some(line),
            }),
            _ => Err(Error::Parse {
                line,
                message: format!("count {text:?} is not a positive decimal integer"),
            }),
        },
    }
}

/// Writes a distribution back out in the TSV count format, items in byte
/// order. `distribution_from_tsv` inverts this exactly.
pub fn serialize_tsv(d: &CountDistribution) -> String {
    let mut out = String::new();
    for (item, count) in d.entries() {
        out.push_str(item.as_str());
        out.push('\t');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    out
}

/// Decodes file bytes as UTF-8.
pub fn decode_utf8(bytes: Vec<u8>) -> Result<String> {
    String::from_utf8(bytes).map_err(|e| Error::Encoding {
        detail: e.to_string(),
    })
}
