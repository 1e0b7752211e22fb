//! Per-label precision, recall and F1 against a gold corpus.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::corpus::Corpus;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("gold has {gold} sentences, prediction has {pred}")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {sentence}: gold has {gold} tokens, prediction has {pred}")]
    SentenceLength {
        sentence: usize,
        gold: usize,
        pred: usize,
    },
    #[error(
        "sentence {sentence}, token {token}: gold surface {gold:?} differs from predicted {pred:?}"
    )]
    SurfaceMismatch {
        sentence: usize,
        token: usize,
        gold: String,
        pred: String,
    },
    #[error("sentence {sentence}, token {token}: {side} token has no POS label")]
    Unlabeled {
        sentence: usize,
        token: usize,
        side: &'static str,
    },
    #[error("cannot average an empty list of scores")]
    EmptyAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabelScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gold_count: usize,
    pub pred_count: usize,
    pub correct_count: usize,
}

impl LabelScore {
    fn from_counts(gold_count: usize, pred_count: usize, correct_count: usize) -> Self {
        let (precision, recall, f1) = prf(gold_count, pred_count, correct_count);
        Self {
            precision,
            recall,
            f1,
            gold_count,
            pred_count,
            correct_count,
        }
    }
}

/// Precision, recall and F1 with zero in place of undefined ratios.
///
/// F1 is taken from the counts, `2c / (g + p)`, which equals `2PR / (P + R)`
/// and keeps micro-F1 bit-identical to accuracy.
fn prf(gold: usize, pred: usize, correct: usize) -> (f64, f64, f64) {
    let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    let p = ratio(correct, pred);
    let r = ratio(correct, gold);
    let f1 = ratio(2 * correct, gold + pred);
    (p, r, f1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_label: BTreeMap<String, LabelScore>,
    pub total: usize,
    pub correct: usize,
    pub token_accuracy: f64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    /// Micro-averaged F1; equals `token_accuracy` when each token has one
    /// gold and one predicted label.
    pub overall_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

/// Scores `pred` against `gold`, which must align token by token.
pub fn evaluate(gold: &Corpus, pred: &Corpus) -> Result<EvalReport, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    // label -> (gold, pred, correct)
    let mut counts: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    let mut total = 0;
    let mut correct = 0;
    for (s, (gs, ps)) in gold.sentences.iter().zip(&pred.sentences).enumerate() {
        if gs.len() != ps.len() {
            return Err(EvalError::SentenceLength {
                sentence: s,
                gold: gs.len(),
                pred: ps.len(),
            });
        }
        for (t, (g, p)) in gs.tokens().iter().zip(ps.tokens()).enumerate() {
            if g.surface() != p.surface() {
                return Err(EvalError::SurfaceMismatch {
                    sentence: s,
                    token: t,
                    gold: g.surface().to_string(),
                    pred: p.surface().to_string(),
                });
            }
            let unlabeled = |side| EvalError::Unlabeled {
                sentence: s,
                token: t,
                side,
            };
            let gl = g.pos().ok_or_else(|| unlabeled("gold"))?;
            let pl = p.pos().ok_or_else(|| unlabeled("predicted"))?;
            counts.entry(gl).or_default().0 += 1;
            counts.entry(pl).or_default().1 += 1;
            total += 1;
            if gl == pl {
                counts.entry(gl).or_default().2 += 1;
                correct += 1;
            }
        }
    }

    let per_label: BTreeMap<String, LabelScore> = counts
        .into_iter()
        .map(|(label, (g, p, c))| (label.to_string(), LabelScore::from_counts(g, p, c)))
        .collect();
    let (micro_precision, micro_recall, overall_f1) = prf(total, total, correct);
    let n = per_label.len().max(1) as f64;
    let macro_of = |f: fn(&LabelScore) -> f64| per_label.values().map(f).sum::<f64>() / n;

    Ok(EvalReport {
        total,
        correct,
        token_accuracy: if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        },
        micro_precision,
        micro_recall,
        overall_f1,
        macro_precision: macro_of(|s| s.precision),
        macro_recall: macro_of(|s| s.recall),
        macro_f1: macro_of(|s| s.f1),
        per_label,
    })
}

/// Arithmetic mean. Computed as an offset from the first value, so a
/// constant sequence averages to exactly that constant.
pub fn average_scores(values: &[f64]) -> Result<f64, EvalError> {
    let (&first, _) = values.split_first().ok_or(EvalError::EmptyAverage)?;
    let offset: f64 = values.iter().map(|v| v - first).sum();
    Ok(first + offset / values.len() as f64)
}

/// Rounds half-up to two decimals and renders the result, e.g. `79.99`.
///
/// Values within floating-point noise of a rounding boundary are treated as
/// lying on it, so `2.675` renders as `2.68`.
///
/// ```
/// use mixtag::eval::{average_scores, format_2dp};
/// let avg = average_scores(&[78.13, 79.13, 82.71]).unwrap();
/// assert_eq!(format_2dp(avg), "79.99");
/// assert_eq!(format_2dp(average_scores(&[2.0, 6.0, 3.0]).unwrap()), "3.67");
/// ```
pub fn format_2dp(value: f64) -> String {
    let scaled = value * 100.0;
    let eps = 1e-9 * scaled.abs().max(1.0);
    let floor = scaled.floor();
    let frac = scaled - floor;
    let mut units = if frac >= 0.5 - eps {
        floor + 1.0
    } else {
        floor
    };
    // snap values sitting just below an integer
    if (scaled - scaled.round()).abs() <= eps {
        units = scaled.round();
    }
    let units = units as i64;
    let sign = if units < 0 { "-" } else { "" };
    let abs = units.unsigned_abs();
    format!("{sign}{}.{:02}", abs / 100, abs % 100)
}

impl EvalReport {
    /// Tab-separated rows `label P R F1 gold pred correct`, then accuracy and
    /// the overall F1 (in percent, two decimals) as the last line.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (label, s) in &self.per_label {
            let _ = writeln!(
                out,
                "{label}\t{}\t{}\t{}\t{}\t{}\t{}",
                s.precision, s.recall, s.f1, s.gold_count, s.pred_count, s.correct_count
            );
        }
        let _ = writeln!(out, "accuracy\t{}", self.token_accuracy);
        let _ = writeln!(out, "macro_f1\t{}", self.macro_f1);
        let _ = writeln!(out, "overall_f1\t{}", format_2dp(self.overall_f1 * 100.0));
        out
    }

    /// Human-readable table with percentages.
    pub fn to_table(&self) -> String {
        let width = self
            .per_label
            .keys()
            .map(|l| l.chars().count())
            .max()
            .unwrap_or(5)
            .max(5);
        let pct = |v: f64| format_2dp(v * 100.0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>6}  {:>6}  {:>7}",
            "label", "precision", "recall", "f1", "gold", "pred", "correct"
        );
        for (label, s) in &self.per_label {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9}  {:>9}  {:>9}  {:>6}  {:>6}  {:>7}",
                label,
                pct(s.precision),
                pct(s.recall),
                pct(s.f1),
                s.gold_count,
                s.pred_count,
                s.correct_count
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "tokens: {}  correct: {}", self.total, self.correct);
        let _ = writeln!(out, "accuracy: {}", pct(self.token_accuracy));
        let _ = writeln!(
            out,
            "macro precision: {}  macro recall: {}  macro F1: {}",
            pct(self.macro_precision),
            pct(self.macro_recall),
            pct(self.macro_f1)
        );
        let _ = writeln!(out, "overall F1: {}", pct(self.overall_f1));
        out
    }
}
