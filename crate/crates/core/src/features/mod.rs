//! Observation attributes for a token position.
//!
//! Every token is described by a list of `FAMILY=value` strings. The CRF
//! conjoins each attribute with each label to form its state features, so
//! the attributes here are the whole observation model: word-window context,
//! language tags, orthographic flags, vowel statistics, the short-form
//! normalization lexicon, length buckets and affixes.

mod lexicon;
mod ortho;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::{Sentence, Token};

pub use lexicon::{load_lexicon, normalize_short_form, NormalizationLexicon};
pub use ortho::{
    affixes, collapse_vowel_runs, is_vowel, length_bucket, ortho_flags, vowel_count, Affixes,
    OrthoFlag, OrthoFlags,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("lexicon line {line}: expected 2 tab-separated columns, found {found}")]
    LexiconColumns { line: usize, found: usize },
    #[error("lexicon line {line}: empty or malformed field")]
    LexiconField { line: usize },
    #[error("lexicon line {line}: duplicate short form {key:?}")]
    DuplicateEntry { line: usize, key: String },
    #[error("position {index} out of range for sentence of length {len}")]
    PositionOutOfRange { index: usize, len: usize },
    #[error("every feature family is disabled")]
    NoFamilyEnabled,
    #[error("unknown feature family or flag {0:?}")]
    UnknownFeature(String),
    #[error("malformed catalogue fingerprint {0:?}")]
    BadFingerprint(String),
}

/// Sentinel word before the start of a sentence.
pub const BOS: &str = "<S>";
/// Sentinel word after the end of a sentence.
pub const EOS: &str = "</S>";

/// Groups of attributes that can be switched off together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureFamily {
    Context,
    Language,
    Ortho,
    VowelCount,
    VowelCollapse,
    Normalization,
    Length,
    Affix,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 8] = [
        FeatureFamily::Context,
        FeatureFamily::Language,
        FeatureFamily::Ortho,
        FeatureFamily::VowelCount,
        FeatureFamily::VowelCollapse,
        FeatureFamily::Normalization,
        FeatureFamily::Length,
        FeatureFamily::Affix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureFamily::Context => "context",
            FeatureFamily::Language => "language",
            FeatureFamily::Ortho => "ortho",
            FeatureFamily::VowelCount => "vowel-count",
            FeatureFamily::VowelCollapse => "vowel-collapse",
            FeatureFamily::Normalization => "normalization",
            FeatureFamily::Length => "length",
            FeatureFamily::Affix => "affix",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for FeatureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureFamily {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| FeatureError::UnknownFeature(s.to_string()))
    }
}

/// Which feature families (and which individual orthographic flags) are on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureCatalogue {
    families: u8,
    disabled_flags: u32,
}

impl Default for FeatureCatalogue {
    fn default() -> Self {
        Self {
            families: FeatureFamily::ALL.iter().fold(0, |acc, f| acc | f.bit()),
            disabled_flags: 0,
        }
    }
}

impl FeatureCatalogue {
    /// A catalogue with only the given families enabled.
    pub fn only(families: &[FeatureFamily]) -> Result<Self, FeatureError> {
        let cat = Self {
            families: families.iter().fold(0, |acc, f| acc | f.bit()),
            disabled_flags: 0,
        };
        cat.check()
    }

    fn check(self) -> Result<Self, FeatureError> {
        if self.families == 0 {
            return Err(FeatureError::NoFamilyEnabled);
        }
        Ok(self)
    }

    pub fn is_enabled(&self, family: FeatureFamily) -> bool {
        self.families & family.bit() != 0
    }

    pub fn flag_enabled(&self, flag: OrthoFlag) -> bool {
        self.is_enabled(FeatureFamily::Ortho) && self.disabled_flags & (1 << flag as u32) == 0
    }

    pub fn disable_family(mut self, family: FeatureFamily) -> Result<Self, FeatureError> {
        self.families &= !family.bit();
        self.check()
    }

    pub fn disable_flag(mut self, flag: OrthoFlag) -> Self {
        self.disabled_flags |= 1 << flag as u32;
        self
    }

    /// Disables a family (`"affix"`) or a single flag (`"ContainsHash"`) by name.
    pub fn disable(self, name: &str) -> Result<Self, FeatureError> {
        if let Ok(family) = name.parse::<FeatureFamily>() {
            return self.disable_family(family);
        }
        match name.parse::<OrthoFlag>() {
            Ok(flag) => Ok(self.disable_flag(flag)),
            Err(_) => Err(FeatureError::UnknownFeature(name.to_string())),
        }
    }

    /// Canonical text form, e.g. `context,language,ortho;-ContainsHash`.
    /// [`FeatureCatalogue::from_fingerprint`] parses it back.
    pub fn fingerprint(&self) -> String {
        let families: Vec<&str> = FeatureFamily::ALL
            .iter()
            .filter(|f| self.is_enabled(**f))
            .map(|f| f.name())
            .collect();
        let mut out = families.join(",");
        let off: Vec<String> = OrthoFlag::ALL
            .iter()
            .filter(|f| self.disabled_flags & (1 << **f as u32) != 0)
            .map(|f| format!("-{}", f.name()))
            .collect();
        if !off.is_empty() {
            out.push(';');
            out.push_str(&off.join(","));
        }
        out
    }

    pub fn from_fingerprint(text: &str) -> Result<Self, FeatureError> {
        let bad = || FeatureError::BadFingerprint(text.to_string());
        let (families, flags) = match text.split_once(';') {
            Some((a, b)) => (a, Some(b)),
            None => (text, None),
        };
        let mut cat = Self {
            families: 0,
            disabled_flags: 0,
        };
        for name in families.split(',').filter(|s| !s.is_empty()) {
            cat.families |= name.parse::<FeatureFamily>().map_err(|_| bad())?.bit();
        }
        for item in flags.into_iter().flat_map(|f| f.split(',')) {
            let name = item.strip_prefix('-').ok_or_else(bad)?;
            cat = cat.disable_flag(name.parse::<OrthoFlag>().map_err(|_| bad())?);
        }
        cat.check()
    }
}

/// Escapes characters that would break line-oriented files.
pub fn escape_value(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Ordered, duplicate-free attribute strings for one token position.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AttributeSet(Vec<String>);

impl AttributeSet {
    pub fn new(attrs: Vec<String>) -> Self {
        Self(attrs)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.0.iter().any(|a| a == attr)
    }
}

impl<'a> IntoIterator for &'a AttributeSet {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

fn attr(family: &str, value: &str) -> String {
    format!("{family}={}", escape_value(value))
}

/// Word window of size five around `index`, plus four adjacent-pair composites.
///
/// Emits `W[-2]`..`W[+2]` followed by `W[-1]|W[-2]`, `W[-1]|W[0]`,
/// `W[0]|W[+1]` and `W[+1]|W[+2]`. Out-of-sentence neighbours are the
/// [`BOS`] / [`EOS`] sentinels.
pub fn context_composites(sentence: &Sentence, index: usize) -> Result<Vec<String>, FeatureError> {
    let tokens = sentence.tokens();
    if index >= tokens.len() {
        return Err(FeatureError::PositionOutOfRange {
            index,
            len: tokens.len(),
        });
    }
    let word = |offset: isize| -> String {
        let pos = index as isize + offset;
        if pos < 0 {
            BOS.to_string()
        } else if pos as usize >= tokens.len() {
            EOS.to_string()
        } else {
            escape_value(tokens[pos as usize].surface())
        }
    };
    let w = [word(-2), word(-1), word(0), word(1), word(2)];
    Ok(vec![
        format!("W[-2]={}", w[0]),
        format!("W[-1]={}", w[1]),
        format!("W[0]={}", w[2]),
        format!("W[+1]={}", w[3]),
        format!("W[+2]={}", w[4]),
        format!("W[-1]|W[-2]={}|{}", w[1], w[0]),
        format!("W[-1]|W[0]={}|{}", w[1], w[2]),
        format!("W[0]|W[+1]={}|{}", w[2], w[3]),
        format!("W[+1]|W[+2]={}|{}", w[3], w[4]),
    ])
}

/// `LANG=<lang>` and `LANGW=<lang>|<surface>`.
pub fn language_composite(token: &Token) -> [String; 2] {
    [
        attr("LANG", token.lang()),
        format!(
            "LANGW={}|{}",
            escape_value(token.lang()),
            escape_value(token.surface())
        ),
    ]
}

/// Full attribute set of position `index`, in fixed family order.
pub fn extract_attributes(
    sentence: &Sentence,
    index: usize,
    lexicon: &NormalizationLexicon,
    catalogue: &FeatureCatalogue,
) -> Result<AttributeSet, FeatureError> {
    use FeatureFamily::*;

    let tokens = sentence.tokens();
    let token = tokens.get(index).ok_or(FeatureError::PositionOutOfRange {
        index,
        len: tokens.len(),
    })?;
    let surface = token.surface();
    let mut out = Vec::with_capacity(48);

    if catalogue.is_enabled(Context) {
        out.extend(context_composites(sentence, index)?);
    }
    if catalogue.is_enabled(Language) {
        out.extend(language_composite(token));
    }
    if catalogue.is_enabled(Ortho) {
        out.extend(
            ortho_flags(surface)
                .iter()
                .filter(|f| catalogue.flag_enabled(*f))
                .map(|f| format!("FLAG={}", f.name())),
        );
    }
    if catalogue.is_enabled(VowelCount) {
        out.push(format!("VC={}", vowel_count(surface)));
    }
    if catalogue.is_enabled(VowelCollapse) {
        out.push(attr("CVR", &collapse_vowel_runs(surface)));
    }
    if catalogue.is_enabled(Normalization) {
        out.push(attr("NORM", normalize_short_form(surface, lexicon)));
    }
    if catalogue.is_enabled(Length) {
        out.push(format!("LEN={}", length_bucket(surface)));
    }
    if catalogue.is_enabled(Affix) {
        let a = affixes(surface);
        for (k, p) in a.prefixes.iter().enumerate() {
            out.push(attr(&format!("P{}", k + 1), p));
        }
        for (k, s) in a.suffixes.iter().enumerate() {
            out.push(attr(&format!("S{}", k + 1), s));
        }
    }
    Ok(AttributeSet(out))
}

/// Attribute sets for every position of a sentence.
pub fn extract_sentence(
    sentence: &Sentence,
    lexicon: &NormalizationLexicon,
    catalogue: &FeatureCatalogue,
) -> Vec<AttributeSet> {
    (0..sentence.len())
        .map(|i| {
            extract_attributes(sentence, i, lexicon, catalogue)
                .expect("index is within the sentence")
        })
        .collect()
}
