use std::collections::HashMap;

use sha2::{Digest, Sha256};

use super::FeatureError;

/// Short-form to canonical-word mapping, e.g. `krte -> korte`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizationLexicon {
    entries: HashMap<String, String>,
}

impl NormalizationLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a lexicon from pairs, rejecting duplicate short forms.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self, FeatureError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut lexicon = Self::new();
        for (i, (k, v)) in pairs.into_iter().enumerate() {
            lexicon.insert(k.into(), v.into(), i + 1)?;
        }
        Ok(lexicon)
    }

    fn insert(
        &mut self,
        short: String,
        canonical: String,
        line: usize,
    ) -> Result<(), FeatureError> {
        for field in [&short, &canonical] {
            if field.is_empty() || field.contains(['\t', '\r', '\n']) {
                return Err(FeatureError::LexiconField { line });
            }
        }
        if self.entries.contains_key(&short) {
            return Err(FeatureError::DuplicateEntry { line, key: short });
        }
        self.entries.insert(short, canonical);
        Ok(())
    }

    pub fn get(&self, short: &str) -> Option<&str> {
        self.entries.get(short).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by short form.
    pub fn sorted_entries(&self) -> Vec<(&str, &str)> {
        let mut v: Vec<_> = self
            .entries
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        v.sort_unstable();
        v
    }

    /// Hex digest of the sorted entries; identical lexicons share a fingerprint.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (k, v) in self.sorted_entries() {
            hasher.update(k.as_bytes());
            hasher.update(b"\t");
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        hasher
            .finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Parses a two-column lexicon file. Blank lines and lines starting with `#`
/// are skipped.
pub fn load_lexicon(text: &str) -> Result<NormalizationLexicon, FeatureError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lexicon = NormalizationLexicon::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(FeatureError::LexiconColumns {
                line: idx + 1,
                found: fields.len(),
            });
        }
        lexicon.insert(fields[0].to_string(), fields[1].to_string(), idx + 1)?;
    }
    Ok(lexicon)
}

/// Looks `surface` up in the lexicon; unknown words map to themselves.
pub fn normalize_short_form<'a>(surface: &'a str, lexicon: &'a NormalizationLexicon) -> &'a str {
    lexicon.get(surface).unwrap_or(surface)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_single_pair() {
        let lex = load_lexicon("krte\tkorte\n").unwrap();
        assert_eq!(lex.get("krte"), Some("korte"));
        assert_eq!(normalize_short_form("krte", &lex), "korte");
        assert_eq!(normalize_short_form("korte", &lex), "korte");
    }

    #[test]
    fn empty_and_comments() {
        assert!(load_lexicon("").unwrap().is_empty());
        let lex = load_lexicon("# bn-en short forms\n\nkno\tkeno\r\n").unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(
            normalize_short_form("anything", &NormalizationLexicon::new()),
            "anything"
        );
    }

    #[test]
    fn duplicate_key_reports_line() {
        let err = load_lexicon("krte\tkorte\nkrte\tkarte\n").unwrap_err();
        assert_eq!(
            err,
            FeatureError::DuplicateEntry {
                line: 2,
                key: "krte".into()
            }
        );
    }

    #[test]
    fn column_errors() {
        assert_eq!(
            load_lexicon("a\tb\nabc\n").unwrap_err(),
            FeatureError::LexiconColumns { line: 2, found: 1 }
        );
        assert_eq!(
            load_lexicon("a\t\n").unwrap_err(),
            FeatureError::LexiconField { line: 1 }
        );
    }

    #[test]
    fn fingerprint_ignores_order() {
        let a = load_lexicon("x\ty\np\tq\n").unwrap();
        let b = load_lexicon("p\tq\nx\ty\n").unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), NormalizationLexicon::new().fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
    }
}
