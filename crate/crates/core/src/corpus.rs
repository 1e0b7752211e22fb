//! Column-formatted corpora.
//!
//! Training files carry three tab-separated columns per token (surface,
//! language tag, POS label); test files carry the first two. Sentences are
//! separated by one or more blank lines.

use std::fmt;

use thiserror::Error;

/// Errors raised while reading, merging or writing corpora.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: expected {expected} tab-separated columns, found {found}")]
    ColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: column {column} is empty")]
    EmptyField { line: usize, column: usize },
    #[error("invalid token: {0}")]
    InvalidToken(String),
    #[error("sentence must contain at least one token")]
    EmptySentence,
    #[error("cannot merge corpora of different granularity ({0} and {1})")]
    GranularityConflict(Granularity, Granularity),
    #[error(
        "sentence {sentence}, token {token}: missing POS label required by the 3-column schema"
    )]
    MissingLabel { sentence: usize, token: usize },
}

/// Column layout of a corpus file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// `surface \t lang \t pos`
    Train3Col,
    /// `surface \t lang`
    Test2Col,
}

impl Schema {
    fn columns(self) -> usize {
        match self {
            Schema::Train3Col => 3,
            Schema::Test2Col => 2,
        }
    }
}

/// One token: surface form, language tag and an optional POS label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    surface: String,
    lang: String,
    pos: Option<String>,
}

fn check_field(what: &str, value: &str) -> Result<(), CorpusError> {
    if value.is_empty() {
        return Err(CorpusError::InvalidToken(format!("{what} is empty")));
    }
    if value.contains(['\t', '\r', '\n']) {
        return Err(CorpusError::InvalidToken(format!(
            "{what} {value:?} contains a tab or line break"
        )));
    }
    Ok(())
}

impl Token {
    pub fn new(
        surface: impl Into<String>,
        lang: impl Into<String>,
        pos: Option<String>,
    ) -> Result<Self, CorpusError> {
        let surface = surface.into();
        let lang = lang.into();
        check_field("surface", &surface)?;
        check_field("language tag", &lang)?;
        if let Some(pos) = &pos {
            check_field("POS label", pos)?;
        }
        Ok(Self { surface, lang, pos })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn pos(&self) -> Option<&str> {
        self.pos.as_deref()
    }

    /// Returns a copy of this token carrying `pos` as its label.
    pub fn with_pos(&self, pos: impl Into<String>) -> Result<Self, CorpusError> {
        Token::new(self.surface.clone(), self.lang.clone(), Some(pos.into()))
    }

    /// Returns a copy of this token with the label removed.
    pub fn without_pos(&self) -> Self {
        Self {
            surface: self.surface.clone(),
            lang: self.lang.clone(),
            pos: None,
        }
    }
}

/// A nonempty sequence of tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self, CorpusError> {
        if tokens.is_empty() {
            return Err(CorpusError::EmptySentence);
        }
        Ok(Self { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// True when every token carries a POS label.
    pub fn is_labeled(&self) -> bool {
        self.tokens.iter().all(|t| t.pos.is_some())
    }
}

/// Where a corpus came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Source {
    Facebook,
    Twitter,
    Whatsapp,
    Mixed,
    #[default]
    Unknown,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Facebook => "facebook",
            Source::Twitter => "twitter",
            Source::Whatsapp => "whatsapp",
            Source::Mixed => "mixed",
            Source::Unknown => "unknown",
        })
    }
}

/// Tag-set granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Granularity {
    Coarse,
    Fine,
    #[default]
    Unknown,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Coarse => "coarse",
            Granularity::Fine => "fine",
            Granularity::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CorpusMeta {
    pub source: Source,
    pub granularity: Granularity,
    /// Free-form language pair name, e.g. `"bn-en"`.
    pub pair: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    pub meta: CorpusMeta,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>, meta: CorpusMeta) -> Self {
        Self { sentences, meta }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn is_labeled(&self) -> bool {
        self.sentences.iter().all(Sentence::is_labeled)
    }
}

/// Parses a column-formatted corpus.
///
/// A leading byte-order mark is dropped and `\r\n` line endings are accepted.
/// Runs of blank lines count as a single sentence boundary. An input with no
/// tokens yields an empty corpus.
pub fn parse_corpus(text: &str, schema: Schema) -> Result<Corpus, CorpusError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let expected = schema.columns();
    let mut sentences = Vec::new();
    let mut current = Vec::new();

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            if !current.is_empty() {
                sentences.push(Sentence {
                    tokens: std::mem::take(&mut current),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != expected {
            return Err(CorpusError::ColumnCount {
                line: line_no,
                expected,
                found: fields.len(),
            });
        }
        if let Some(column) = fields.iter().position(|f| f.is_empty()) {
            return Err(CorpusError::EmptyField {
                line: line_no,
                column: column + 1,
            });
        }
        let pos = fields.get(2).map(|p| p.to_string());
        let token = Token::new(fields[0], fields[1], pos).map_err(|e| match e {
            CorpusError::InvalidToken(msg) => {
                CorpusError::InvalidToken(format!("line {line_no}: {msg}"))
            }
            other => other,
        })?;
        current.push(token);
    }
    if !current.is_empty() {
        sentences.push(Sentence { tokens: current });
    }

    Ok(Corpus {
        sentences,
        meta: CorpusMeta::default(),
    })
}

/// Concatenates corpora in argument order.
///
/// The merged source is `Mixed` when the parts disagree. Known granularities
/// must agree; `Unknown` is compatible with anything.
pub fn merge_corpora(parts: &[Corpus]) -> Result<Corpus, CorpusError> {
    let mut granularity = Granularity::Unknown;
    for part in parts {
        match (granularity, part.meta.granularity) {
            (_, Granularity::Unknown) => {}
            (Granularity::Unknown, g) => granularity = g,
            (a, b) if a != b => return Err(CorpusError::GranularityConflict(a, b)),
            _ => {}
        }
    }

    let source = match parts.split_first() {
        None => Source::Unknown,
        Some((first, rest)) => {
            if rest.iter().all(|p| p.meta.source == first.meta.source) {
                first.meta.source
            } else {
                Source::Mixed
            }
        }
    };
    let pair = match parts.split_first() {
        Some((first, rest)) if rest.iter().all(|p| p.meta.pair == first.meta.pair) => {
            first.meta.pair.clone()
        }
        _ => String::new(),
    };

    let sentences = parts
        .iter()
        .flat_map(|p| p.sentences.iter().cloned())
        .collect();
    Ok(Corpus {
        sentences,
        meta: CorpusMeta {
            source,
            granularity,
            pair,
        },
    })
}

/// Renders a corpus in the given column layout; the inverse of [`parse_corpus`].
///
/// Under [`Schema::Test2Col`] any POS labels are dropped.
pub fn write_corpus(corpus: &Corpus, schema: Schema) -> Result<String, CorpusError> {
    let mut out = String::new();
    for (s, sentence) in corpus.sentences.iter().enumerate() {
        if s > 0 {
            out.push('\n');
        }
        for (t, token) in sentence.tokens.iter().enumerate() {
            out.push_str(&token.surface);
            out.push('\t');
            out.push_str(&token.lang);
            if schema == Schema::Train3Col {
                let pos = token.pos.as_deref().ok_or(CorpusError::MissingLabel {
                    sentence: s,
                    token: t,
                })?;
                out.push('\t');
                out.push_str(pos);
            }
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tok(s: &str, l: &str, p: Option<&str>) -> Token {
        Token::new(s, l, p.map(String::from)).unwrap()
    }

    #[test]
    fn parses_two_sentences() {
        let c = parse_corpus(
            "ami\tbn\tPRP\nkhub\tbn\tJJ\n\nok\ten\tUH\n",
            Schema::Train3Col,
        )
        .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.sentences[0].len(), 2);
        assert_eq!(c.sentences[1].len(), 1);
        assert_eq!(c.sentences[0].tokens()[1].pos(), Some("JJ"));
        assert_eq!(c.meta, CorpusMeta::default());
    }

    #[test]
    fn parses_test_schema_without_labels() {
        let c = parse_corpus("ami\tbn\n", Schema::Test2Col).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.sentences[0].tokens(), &[tok("ami", "bn", None)]);
    }

    #[test]
    fn rejects_space_separated_columns() {
        let err = parse_corpus("ami bn PRP\n", Schema::Train3Col).unwrap_err();
        assert_eq!(
            err,
            CorpusError::ColumnCount {
                line: 1,
                expected: 3,
                found: 1
            }
        );
    }

    #[test]
    fn rejects_wrong_schema_and_empty_fields() {
        let err = parse_corpus("a\tb\n\nx\ty\tz\n", Schema::Test2Col).unwrap_err();
        assert!(matches!(err, CorpusError::ColumnCount { line: 3, .. }));
        let err = parse_corpus("a\t\tN\n", Schema::Train3Col).unwrap_err();
        assert_eq!(err, CorpusError::EmptyField { line: 1, column: 2 });
    }

    #[test]
    fn blank_runs_bom_and_crlf() {
        let c = parse_corpus("\u{feff}a\ten\tN\r\n\r\n\r\n\nb\ten\tV", Schema::Train3Col).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.sentences[0].tokens()[0].surface(), "a");
        assert_eq!(c.sentences[1].tokens()[0].pos(), Some("V"));
    }

    #[test]
    fn empty_input_is_empty_corpus() {
        assert!(parse_corpus("", Schema::Train3Col).unwrap().is_empty());
        assert!(parse_corpus("\n\n", Schema::Test2Col).unwrap().is_empty());
        assert_eq!(
            write_corpus(&Corpus::default(), Schema::Train3Col).unwrap(),
            ""
        );
    }

    #[test]
    fn writes_single_token() {
        let c = Corpus::new(
            vec![Sentence::new(vec![tok("hi", "en", Some("UH"))]).unwrap()],
            CorpusMeta::default(),
        );
        assert_eq!(write_corpus(&c, Schema::Train3Col).unwrap(), "hi\ten\tUH\n");
        assert_eq!(write_corpus(&c, Schema::Test2Col).unwrap(), "hi\ten\n");
    }

    #[test]
    fn write_requires_labels() {
        let c = Corpus::new(
            vec![Sentence::new(vec![tok("hi", "en", Some("UH")), tok("x", "en", None)]).unwrap()],
            CorpusMeta::default(),
        );
        assert_eq!(
            write_corpus(&c, Schema::Train3Col).unwrap_err(),
            CorpusError::MissingLabel {
                sentence: 0,
                token: 1
            }
        );
    }

    #[test]
    fn token_invariants() {
        assert!(Token::new("", "en", None).is_err());
        assert!(Token::new("a\tb", "en", None).is_err());
        assert!(Token::new("a", "", None).is_err());
        assert!(Token::new("a", "en", Some(String::new())).is_err());
        assert!(Sentence::new(vec![]).is_err());
    }

    fn corpus_of(n: usize, source: Source, granularity: Granularity) -> Corpus {
        let sentences = (0..n)
            .map(|i| Sentence::new(vec![tok(&format!("w{i}"), "bn", Some("N"))]).unwrap())
            .collect();
        Corpus::new(
            sentences,
            CorpusMeta {
                source,
                granularity,
                pair: "bn-en".into(),
            },
        )
    }

    #[test]
    fn merge_three_sources() {
        let fb = corpus_of(148, Source::Facebook, Granularity::Coarse);
        let tw = corpus_of(173, Source::Twitter, Granularity::Coarse);
        let wa = corpus_of(305, Source::Whatsapp, Granularity::Coarse);
        let merged = merge_corpora(&[fb.clone(), tw, wa]).unwrap();
        assert_eq!(merged.len(), 626);
        assert_eq!(merged.meta.source, Source::Mixed);
        assert_eq!(merged.meta.granularity, Granularity::Coarse);
        assert_eq!(merged.meta.pair, "bn-en");
        assert_eq!(merged.sentences[..148], fb.sentences[..]);
    }

    #[test]
    fn merge_identity_and_conflict() {
        let fb = corpus_of(3, Source::Facebook, Granularity::Fine);
        assert_eq!(merge_corpora(std::slice::from_ref(&fb)).unwrap(), fb);
        let coarse = corpus_of(1, Source::Twitter, Granularity::Coarse);
        assert_eq!(
            merge_corpora(&[coarse, fb]).unwrap_err(),
            CorpusError::GranularityConflict(Granularity::Coarse, Granularity::Fine)
        );
        let unknown = corpus_of(1, Source::Twitter, Granularity::Unknown);
        let fine = corpus_of(1, Source::Twitter, Granularity::Fine);
        assert_eq!(
            merge_corpora(&[unknown, fine]).unwrap().meta.granularity,
            Granularity::Fine
        );
    }

    fn field() -> impl Strategy<Value = String> {
        // excludes tab, CR and LF; includes non-ASCII
        "[a-zA-Z0-9@#:/\\\\.\\- \u{0985}-\u{09b9}😀]{1,6}"
    }

    fn corpus_strategy(labeled: bool) -> impl Strategy<Value = Corpus> {
        let token = (field(), field(), field())
            .prop_map(move |(s, l, p)| Token::new(s, l, labeled.then_some(p)).unwrap());
        prop::collection::vec(prop::collection::vec(token, 1..5), 0..5).prop_map(|ss| Corpus {
            sentences: ss.into_iter().map(|t| Sentence::new(t).unwrap()).collect(),
            meta: CorpusMeta::default(),
        })
    }

    proptest! {
        #[test]
        fn round_trip_train(c in corpus_strategy(true)) {
            let text = write_corpus(&c, Schema::Train3Col).unwrap();
            prop_assert_eq!(parse_corpus(&text, Schema::Train3Col).unwrap(), c);
        }

        #[test]
        fn round_trip_test(c in corpus_strategy(false)) {
            let text = write_corpus(&c, Schema::Test2Col).unwrap();
            prop_assert_eq!(parse_corpus(&text, Schema::Test2Col).unwrap(), c);
        }

        #[test]
        fn merge_preserves_counts(a in corpus_strategy(true), b in corpus_strategy(true)) {
            let merged = merge_corpora(&[a.clone(), b.clone()]).unwrap();
            prop_assert_eq!(merged.len(), a.len() + b.len());
            prop_assert_eq!(merged.token_count(), a.token_count() + b.token_count());
        }
    }
}
