//! Line-oriented text model format.
//!
//! ```text
//! MIXTAG-MODEL 1
//! catalogue<TAB><catalogue fingerprint>
//! lexicon<TAB><lexicon fingerprint><TAB><n>
//! <short><TAB><canonical>                  (n lines)
//! labels<TAB><L>
//! <label>                                  (L lines)
//! transitions<TAB><L*L>
//! <from label><TAB><to label><TAB><weight> (L*L lines, row-major)
//! states<TAB><k>
//! <attribute><TAB><label><TAB><weight>     (k lines, slot order)
//! end
//! ```
//!
//! Weights are written with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use super::{FeatureIndex, LabelSet, Model, ModelError};
use crate::features::{FeatureCatalogue, NormalizationLexicon};

pub const MAGIC: &str = "MIXTAG-MODEL";
pub const VERSION: u32 = 1;

fn render_weight(w: f64) -> String {
    format!("{w:.16e}")
}

/// Serializes a model.
pub fn save_model(model: &Model) -> Vec<u8> {
    let mut out = String::new();
    let labels = model.labels();
    let index = model.index();
    let weights = model.weights();
    let lexicon = model.lexicon();
    let l = labels.len();

    out.push_str(&format!("{MAGIC} {VERSION}\n"));
    out.push_str(&format!("catalogue\t{}\n", model.catalogue().fingerprint()));
    let entries = lexicon.sorted_entries();
    out.push_str(&format!(
        "lexicon\t{}\t{}\n",
        lexicon.fingerprint(),
        entries.len()
    ));
    for (short, canonical) in entries {
        out.push_str(&format!("{short}\t{canonical}\n"));
    }
    out.push_str(&format!("labels\t{l}\n"));
    for label in labels.iter() {
        out.push_str(label);
        out.push('\n');
    }
    out.push_str(&format!("transitions\t{}\n", l * l));
    for from in 0..l {
        for to in 0..l {
            let w = weights[index.transition_slot(from, to)];
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                labels.name(from),
                labels.name(to),
                render_weight(w)
            ));
        }
    }
    let state_count = index.len() - l * l;
    out.push_str(&format!("states\t{state_count}\n"));
    let mut rows: Vec<(usize, usize, usize)> = (0..index.num_attributes())
        .flat_map(|id| index.state_slots(id).iter().map(move |&(y, s)| (s, id, y)))
        .collect();
    rows.sort_unstable();
    for (slot, id, y) in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            index.attribute(id),
            labels.name(y),
            render_weight(weights[slot])
        ));
    }
    out.push_str("end\n");
    out.into_bytes()
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Split<'a, char>>,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self, what: &'static str) -> Result<(usize, &'a str), ModelError> {
        // every line of a well-formed file is nonempty
        match self.inner.next() {
            Some((i, line)) => match line.strip_suffix('\r').unwrap_or(line) {
                "" => Err(ModelError::Truncated(what)),
                line => Ok((i + 1, line)),
            },
            None => Err(ModelError::Truncated(what)),
        }
    }

    /// Reads a `<keyword>\t<fields...>` line and returns the fields.
    fn section(&mut self, keyword: &'static str) -> Result<(usize, Vec<&'a str>), ModelError> {
        let (no, line) = self.next_line(keyword)?;
        let mut fields = line.split('\t');
        if fields.next() != Some(keyword) {
            return Err(malformed(no, format!("expected `{keyword}` section")));
        }
        Ok((no, fields.collect()))
    }
}

fn malformed(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Malformed {
        line,
        msg: msg.into(),
    }
}

fn parse_count(line: usize, field: Option<&&str>) -> Result<usize, ModelError> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| malformed(line, "bad count"))
}

fn parse_weight(line: usize, field: &str) -> Result<f64, ModelError> {
    let w: f64 = field
        .parse()
        .map_err(|_| malformed(line, format!("bad weight {field:?}")))?;
    if !w.is_finite() {
        return Err(ModelError::NonFiniteWeight { line });
    }
    Ok(w)
}

fn split3(line_no: usize, line: &str) -> Result<[&str; 3], ModelError> {
    let fields: Vec<&str> = line.split('\t').collect();
    <[&str; 3]>::try_from(fields)
        .map_err(|f| malformed(line_no, format!("expected 3 fields, found {}", f.len())))
}

/// Parses a model written by [`save_model`].
pub fn load_model(bytes: &[u8]) -> Result<Model, ModelError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ModelError::BadMagic)?;
    let mut lines = Lines {
        inner: text.split('\n').enumerate(),
    };

    let (_, header) = lines
        .next_line("header")
        .map_err(|_| ModelError::BadMagic)?;
    match header.strip_prefix(MAGIC).and_then(|r| r.strip_prefix(' ')) {
        Some(v) if v == VERSION.to_string() => {}
        Some(v) => return Err(ModelError::UnsupportedVersion(v.to_string())),
        None => return Err(ModelError::BadMagic),
    }

    let (no, fields) = lines.section("catalogue")?;
    let catalogue = FeatureCatalogue::from_fingerprint(fields.first().copied().unwrap_or(""))
        .map_err(|e| malformed(no, e.to_string()))?;

    let (no, fields) = lines.section("lexicon")?;
    let fingerprint = fields
        .first()
        .copied()
        .ok_or_else(|| malformed(no, "missing lexicon fingerprint"))?;
    let n = parse_count(no, fields.get(1))?;
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, line) = lines.next_line("lexicon")?;
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| malformed(no, "expected 2 fields"))?;
        pairs.push((k.to_string(), v.to_string()));
    }
    let lexicon =
        NormalizationLexicon::from_pairs(pairs).map_err(|e| malformed(no, e.to_string()))?;
    if lexicon.fingerprint() != fingerprint {
        return Err(malformed(
            no,
            "lexicon fingerprint does not match its entries",
        ));
    }

    let (no, fields) = lines.section("labels")?;
    let l = parse_count(no, fields.first())?;
    let mut names = Vec::with_capacity(l);
    for _ in 0..l {
        names.push(lines.next_line("labels")?.1);
    }
    let labels = LabelSet::new(names).map_err(|e| malformed(no, e.to_string()))?;

    let (no, fields) = lines.section("transitions")?;
    if parse_count(no, fields.first())? != l * l {
        return Err(malformed(no, "transition count must be L*L"));
    }
    let mut index = FeatureIndex::with_labels(l)?;
    let mut weights = vec![0.0; l * l];
    for from in 0..l {
        for to in 0..l {
            let (no, line) = lines.next_line("transitions")?;
            let [a, b, w] = split3(no, line)?;
            if a != labels.name(from) || b != labels.name(to) {
                return Err(malformed(no, "transitions out of order"));
            }
            weights[index.transition_slot(from, to)] = parse_weight(no, w)?;
        }
    }

    let (no, fields) = lines.section("states")?;
    let k = parse_count(no, fields.first())?;
    weights.reserve(k);
    for _ in 0..k {
        let (no, line) = lines.next_line("states")?;
        let [attr, label, w] = split3(no, line)?;
        let y = labels
            .id(label)
            .ok_or_else(|| malformed(no, format!("unknown label {label:?}")))?;
        index
            .push_state(attr, y)
            .map_err(|e| malformed(no, e.to_string()))?;
        weights.push(parse_weight(no, w)?);
    }

    let (no, line) = lines.next_line("end")?;
    if line != "end" {
        return Err(malformed(no, "expected `end`"));
    }

    Model::new(labels, index, weights, catalogue, lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Model {
        let labels = LabelSet::new(["N", "V"]).unwrap();
        let mut index = FeatureIndex::with_labels(2).unwrap();
        for attr in ["W[0]=ami", "CVR=khub"] {
            for y in 0..2 {
                index.push_state(attr, y).unwrap();
            }
        }
        let weights = vec![0.1, -0.2, 1.0 / 3.0, 0.0, 7e-300, -0.0, 1e300, 2.5];
        let lexicon = NormalizationLexicon::from_pairs([("krte", "korte")]).unwrap();
        let catalogue = FeatureCatalogue::default().disable("ContainsHash").unwrap();
        Model::new(labels, index, weights, catalogue, lexicon).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = sample();
        let bytes = save_model(&m);
        let back = load_model(&bytes).unwrap();
        assert_eq!(back, m);
        for (a, b) in back.weights().iter().zip(m.weights()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(save_model(&back), bytes);
    }

    #[test]
    fn version_gate() {
        let text = String::from_utf8(save_model(&sample())).unwrap();
        let v2 = text.replacen("MIXTAG-MODEL 1", "MIXTAG-MODEL 2", 1);
        assert_eq!(
            load_model(v2.as_bytes()).unwrap_err(),
            ModelError::UnsupportedVersion("2".into())
        );
        assert_eq!(load_model(b"crfsuite").unwrap_err(), ModelError::BadMagic);
    }

    #[test]
    fn truncation_is_detected() {
        let text = String::from_utf8(save_model(&sample())).unwrap();
        let states = text.find("states").unwrap();
        let cut = &text[..states + text[states..].find("\nCVR").unwrap() + 1];
        assert!(matches!(
            load_model(cut.as_bytes()).unwrap_err(),
            ModelError::Truncated(_)
        ));
        let no_end = text.trim_end_matches("end\n");
        assert!(matches!(
            load_model(no_end.as_bytes()).unwrap_err(),
            ModelError::Truncated("end")
        ));
        assert!(matches!(load_model(b"").unwrap_err(), ModelError::BadMagic));
    }

    #[test]
    fn non_finite_weight() {
        let text = String::from_utf8(save_model(&sample())).unwrap();
        let bad = text.replacen("2.5000000000000000e0", "1e999", 1);
        assert!(matches!(
            load_model(bad.as_bytes()).unwrap_err(),
            ModelError::NonFiniteWeight { .. }
        ));
    }
}
