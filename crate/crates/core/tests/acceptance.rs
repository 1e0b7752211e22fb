//! Acceptance criteria. Prints one PASS/FAIL line per criterion to standard
//! error, bypassing the test harness's output capture.

mod common;

use std::collections::HashMap;
use std::io::Write;
use std::time::{Duration, Instant};

use common::{rel_err, RawLattice};
use mixtag::corpus::{parse_corpus, write_corpus, Corpus, CorpusMeta, Schema, Sentence, Token};
use mixtag::crf::{load_model, save_model, LabelSet};
use mixtag::eval::{average_scores, evaluate, format_2dp};
use mixtag::features::{
    affixes, collapse_vowel_runs, extract_attributes, length_bucket, normalize_short_form,
    FeatureCatalogue, NormalizationLexicon,
};
use mixtag::trainer::{objective_and_gradient, train, IndexedCorpus, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lattice_family(seed: u64, count: usize) -> Vec<RawLattice> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            let labels = rng.gen_range(1..=5);
            RawLattice::random(&mut rng, len, labels, 5.0)
        })
        .collect()
}

fn partition_oracle() -> Outcome {
    let family = lattice_family(1, 250);
    let mut worst = 0.0f64;
    for (k, raw) in family.iter().enumerate() {
        let got = raw.lattice().log_partition();
        let want = raw.log_z();
        let err = rel_err(got, want);
        worst = worst.max(err);
        check(err <= 1e-10, || format!("lattice {k}: {got} vs {want}"))?;
    }
    Ok(format!(
        "{} lattices, worst relative error {worst:.1e}",
        family.len()
    ))
}

fn viterbi_oracle() -> Outcome {
    let family = lattice_family(2, 250);
    for (k, raw) in family.iter().enumerate() {
        let (ys, _) = raw.lattice().viterbi();
        let (_, best) = raw.best();
        let rescored = raw.score(&ys);
        check(rescored == best, || {
            format!("lattice {k}: rescored {rescored} vs max {best}")
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tied = 0;
    for k in 0..250 {
        let len = rng.gen_range(1..=6);
        let labels = rng.gen_range(1..=5);
        let raw = RawLattice::random_integer(&mut rng, len, labels);
        let (ys, score) = raw.lattice().viterbi();
        let (least, best) = raw.best();
        let optimal = raw
            .sequences()
            .iter()
            .filter(|s| raw.score(s) == best)
            .count();
        if optimal > 1 {
            tied += 1;
        }
        check(score == best && ys == least, || {
            format!("tie lattice {k}: got {ys:?} ({score}), want {least:?} ({best})")
        })?;
    }
    Ok(format!(
        "250 real-valued + 250 integer lattices, {tied} with tied optima"
    ))
}

fn marginals_oracle() -> Outcome {
    let family = lattice_family(4, 250);
    let mut worst = 0.0f64;
    for (k, raw) in family.iter().enumerate() {
        let m = raw.lattice().marginals();
        let (node, edge) = raw.marginals();
        let l = raw.labels;
        for t in 0..raw.len {
            let row: f64 = m.node_row(t).iter().sum();
            check((row - 1.0).abs() <= 1e-9, || {
                format!("lattice {k}, t={t}: row sums to {row}")
            })?;
            for y in 0..l {
                let err = (m.node(t, y) - node[t * l + y]).abs();
                worst = worst.max(err);
                check(err <= 1e-9, || {
                    format!("lattice {k}: node ({t},{y}) off by {err:e}")
                })?;
                if t > 0 {
                    for to in 0..l {
                        let err = (m.edge(t, y, to) - edge[(t * l + y) * l + to]).abs();
                        worst = worst.max(err);
                        check(err <= 1e-9, || {
                            format!("lattice {k}: edge ({t},{y},{to}) off by {err:e}")
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{} lattices, worst absolute error {worst:.1e}",
        family.len()
    ))
}

const TOY: &str = "ami\tbn\tPRP\nkhub\tbn\tJJ\nkhusi\tbn\tJJ\n\n\
I\ten\tPRP\nam\ten\tV\nhappy\ten\tJJ\n\n\
tumi\tbn\tPRP\nkrcho\tbn\tV\n?\tuniv\tPUNC\n\n\
lol\ten\tV\n!!!\tuniv\tPUNC\n\n\
@kamal\tuniv\tPRP\nkor6e\tbn\tV\n";

fn gradient_check() -> Outcome {
    let corpus = parse_corpus(TOY, Schema::Train3Col).unwrap();
    let lexicon = NormalizationLexicon::from_pairs([("krcho", "korcho")]).unwrap();
    let labels = LabelSet::from_corpus(&corpus).unwrap();
    let data =
        IndexedCorpus::from_corpus(&corpus, labels, &lexicon, &FeatureCatalogue::default(), 1)
            .unwrap();
    let n = data.num_parameters();
    let h = 1e-5;
    let sigma2 = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let settings = 20;
    for k in 0..settings {
        let scale = [0.1, 1.0, 3.0][k % 3];
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
        let (_, grad) = objective_and_gradient(&w, &data, sigma2);
        let mut probe = w.clone();
        for i in 0..n {
            probe[i] = w[i] + h;
            let up = objective_and_gradient(&probe, &data, sigma2).0;
            probe[i] = w[i] - h;
            let down = objective_and_gradient(&probe, &data, sigma2).0;
            probe[i] = w[i];
            let numeric = (up - down) / (2.0 * h);
            // components near zero are compared absolutely at the 1e-3 scale
            let err = (grad[i] - numeric).abs() / grad[i].abs().max(numeric.abs()).max(1e-3);
            worst = worst.max(err);
            check(err <= 1e-4, || {
                format!(
                    "setting {k}, component {i}: analytic {} vs numeric {numeric}",
                    grad[i]
                )
            })?;
        }
    }
    Ok(format!(
        "{settings} settings x {n} components, worst relative error {worst:.1e}"
    ))
}

/// Eight labels; the language column `c<label>` determines the label. Half
/// the surfaces are tied to their label, the rest come from a shared pool.
/// With `noise > 0` that fraction of POS labels is replaced by a different
/// label, leaving the language column untouched.
fn generate(seed: u64, sentences: usize, noise: f64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(sentences);
    for _ in 0..sentences {
        let len = rng.gen_range(3..=10);
        let tokens = (0..len)
            .map(|_| {
                let y: usize = rng.gen_range(0..8);
                let surface = if rng.gen_bool(0.5) {
                    format!("w{y}x{}", rng.gen_range(0..4))
                } else {
                    format!("s{}", rng.gen_range(0..12))
                };
                let mut pos = y;
                if rng.gen_bool(noise) {
                    pos = (y + rng.gen_range(1..8)) % 8;
                }
                Token::new(surface, format!("c{y}"), Some(format!("T{pos}"))).unwrap()
            })
            .collect();
        out.push(Sentence::new(tokens).unwrap());
    }
    Corpus::new(out, CorpusMeta::default())
}

fn strip(corpus: &Corpus) -> Corpus {
    let sentences = corpus
        .sentences
        .iter()
        .map(|s| Sentence::new(s.tokens().iter().map(Token::without_pos).collect()).unwrap())
        .collect();
    Corpus::new(sentences, corpus.meta.clone())
}

fn accuracy(gold: &Corpus, pred: &Corpus) -> f64 {
    evaluate(gold, pred).unwrap().token_accuracy
}

/// Most frequent training tag per surface; unseen surfaces get the most
/// frequent tag overall. Ties go to the smaller tag name.
fn baseline(train: &Corpus, test: &Corpus) -> Corpus {
    let mut per_word: HashMap<&str, HashMap<&str, usize>> = HashMap::new();
    let mut overall: HashMap<&str, usize> = HashMap::new();
    for tok in train.sentences.iter().flat_map(|s| s.tokens()) {
        let pos = tok.pos().unwrap();
        *per_word
            .entry(tok.surface())
            .or_default()
            .entry(pos)
            .or_default() += 1;
        *overall.entry(pos).or_default() += 1;
    }
    let argmax = |counts: &HashMap<&str, usize>| -> String {
        let mut v: Vec<_> = counts.iter().collect();
        v.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
        v[0].0.to_string()
    };
    let fallback = argmax(&overall);
    let sentences = test
        .sentences
        .iter()
        .map(|s| {
            let tokens = s
                .tokens()
                .iter()
                .map(|t| {
                    let tag = per_word.get(t.surface()).map_or(fallback.clone(), argmax);
                    t.with_pos(tag).unwrap()
                })
                .collect();
            Sentence::new(tokens).unwrap()
        })
        .collect();
    Corpus::new(sentences, test.meta.clone())
}

fn learnability() -> Outcome {
    let lexicon = NormalizationLexicon::new();
    let catalogue = FeatureCatalogue::default();
    let config = TrainConfig {
        max_iterations: 50,
        ..TrainConfig::default()
    };
    let train_set = generate(10, 50, 0.0);
    let held_out = generate(11, 50, 0.0);
    let (model, report) = train(&train_set, &lexicon, &catalogue, &config).unwrap();
    let train_acc = accuracy(&train_set, &model.tag_corpus(&strip(&train_set)));
    let test_acc = accuracy(&held_out, &model.tag_corpus(&strip(&held_out)));
    check(report.labels == 8, || format!("{} labels", report.labels))?;
    check(report.iterations <= 50, || {
        format!("{} iterations", report.iterations)
    })?;
    check(train_acc == 1.0, || {
        format!("training accuracy {train_acc}")
    })?;
    check(test_acc >= 0.99, || format!("held-out accuracy {test_acc}"))?;

    let noisy_train = generate(20, 50, 0.1);
    let noisy_test = generate(21, 50, 0.1);
    let (noisy_model, _) =
        train(&noisy_train, &lexicon, &catalogue, &TrainConfig::default()).unwrap();
    let crf = accuracy(&noisy_test, &noisy_model.tag_corpus(&strip(&noisy_test)));
    let base = accuracy(&noisy_test, &baseline(&noisy_train, &noisy_test));
    check(crf - base >= 0.10, || {
        format!("noisy: CRF {crf:.4} vs baseline {base:.4}")
    })?;
    Ok(format!(
        "train {:.2}% after {} iterations, held-out {:.2}%; noisy CRF {:.2}% vs baseline {:.2}%",
        100.0 * train_acc,
        report.iterations,
        100.0 * test_acc,
        100.0 * crf,
        100.0 * base
    ))
}

fn feature_conformance() -> Outcome {
    check(collapse_vowel_runs("Khuuuuuub") == "Khub", || {
        format!(
            "collapse_vowel_runs(Khuuuuuub) = {}",
            collapse_vowel_runs("Khuuuuuub")
        )
    })?;
    let lexicon = NormalizationLexicon::from_pairs([("krte", "korte")]).unwrap();
    let norm = normalize_short_form("krte", &lexicon);
    check(norm == "korte", || {
        format!("normalize_short_form(krte) = {norm}")
    })?;

    for (word, bucket) in [
        ("a", "L_1"),
        ("ab", "L_2"),
        ("abc", "L_3"),
        ("abcd", "L_4"),
        ("abcde", "L_4"),
        ("abcdefghijkl", "L_4"),
    ] {
        let got = length_bucket(word);
        check(got == bucket, || {
            format!("length_bucket({word}) = {got}, want {bucket}")
        })?;
    }

    let table: [(&str, [&str; 4], [&str; 4]); 5] = [
        ("x", ["x", "x", "x", "x"], ["x", "x", "x", "x"]),
        ("ab", ["a", "ab", "ab", "ab"], ["b", "ab", "ab", "ab"]),
        ("abc", ["ab", "a", "abc", "abc"], ["c", "bc", "abc", "abc"]),
        (
            "abcd",
            ["abc", "ab", "a", "abcd"],
            ["d", "cd", "bcd", "abcd"],
        ),
        (
            "abcde",
            ["abcd", "abc", "ab", "a"],
            ["e", "de", "cde", "bcde"],
        ),
    ];
    for (word, prefixes, suffixes) in table {
        let a = affixes(word);
        check(a.prefixes == prefixes.map(String::from), || {
            format!("{word}: prefixes {:?}", a.prefixes)
        })?;
        check(a.suffixes == suffixes.map(String::from), || {
            format!("{word}: suffixes {:?}", a.suffixes)
        })?;
    }

    let sentence = parse_corpus("Khuuuuuub\tbn\nkrte\tbn\n", Schema::Test2Col)
        .unwrap()
        .sentences[0]
        .clone();
    let catalogue = FeatureCatalogue::default();
    let first = extract_attributes(&sentence, 0, &lexicon, &catalogue).unwrap();
    let second = extract_attributes(&sentence, 1, &lexicon, &catalogue).unwrap();
    check(first.contains("CVR=Khub"), || "CVR=Khub missing".into())?;
    check(second.contains("NORM=korte"), || {
        "NORM=korte missing".into()
    })?;
    Ok("vowel collapse, lexicon lookup, length buckets, affixes for lengths 1-5".into())
}

fn averaging() -> Outcome {
    let f1 = format_2dp(average_scores(&[78.13, 79.13, 82.71]).unwrap());
    let rank = format_2dp(average_scores(&[2.0, 6.0, 3.0]).unwrap());
    check(f1 == "79.99", || format!("F1 average rendered as {f1}"))?;
    check(rank == "3.67", || {
        format!("rank average rendered as {rank}")
    })?;
    Ok(format!("{f1}, {rank}"))
}

fn determinism() -> Outcome {
    let train_set = generate(30, 50, 0.05);
    let input = strip(&generate(31, 20, 0.0));
    let lexicon = NormalizationLexicon::from_pairs([("s1", "s01"), ("w0x1", "w0x01")]).unwrap();
    let run = |workers: usize| {
        let config = TrainConfig {
            worker_count: workers,
            ..TrainConfig::default()
        };
        let (model, _) =
            train(&train_set, &lexicon, &FeatureCatalogue::default(), &config).unwrap();
        let bytes = save_model(&model);
        let loaded = load_model(&bytes).unwrap();
        let tagged = write_corpus(&loaded.tag_corpus(&input), Schema::Train3Col).unwrap();
        (bytes, tagged)
    };
    let (model_a, tagged_a) = run(1);
    let (model_b, tagged_b) = run(4);
    check(model_a == model_b, || "model files differ".into())?;
    check(tagged_a == tagged_b, || "tagged outputs differ".into())?;
    Ok(format!(
        "{} model bytes, {} tagged bytes identical (1 and 4 workers)",
        model_a.len(),
        tagged_a.len()
    ))
}

fn evaluation_oracle() -> Outcome {
    let gold = parse_corpus("a\tx\tN\nb\tx\tV\nc\tx\tN\n", Schema::Train3Col).unwrap();
    let pred = parse_corpus("a\tx\tN\nb\tx\tN\nc\tx\tN\n", Schema::Train3Col).unwrap();
    let r = evaluate(&gold, &pred).unwrap();
    let n = r.per_label["N"];
    let v = r.per_label["V"];
    check(n.precision == 2.0 / 3.0, || {
        format!("P(N) = {}", n.precision)
    })?;
    check(n.recall == 1.0, || format!("R(N) = {}", n.recall))?;
    check(n.f1 == 0.8, || format!("F1(N) = {}", n.f1))?;
    check((v.precision, v.recall, v.f1) == (0.0, 0.0, 0.0), || {
        format!("V = {v:?}")
    })?;
    check(r.token_accuracy == 2.0 / 3.0, || {
        format!("accuracy = {}", r.token_accuracy)
    })?;
    Ok("P(N)=2/3 R(N)=1 F1(N)=0.8 accuracy=2/3".into())
}

fn report(line: String) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion {
            name: "partition function vs enumeration",
            budget: Some(Duration::from_secs(10)),
            run: partition_oracle,
        },
        Criterion {
            name: "viterbi vs enumeration, lexicographic ties",
            budget: Some(Duration::from_secs(10)),
            run: viterbi_oracle,
        },
        Criterion {
            name: "node and edge marginals vs enumeration",
            budget: None,
            run: marginals_oracle,
        },
        Criterion {
            name: "gradient vs central differences",
            budget: None,
            run: gradient_check,
        },
        Criterion {
            name: "learnability and noisy baseline",
            budget: Some(Duration::from_secs(60)),
            run: learnability,
        },
        Criterion {
            name: "feature extraction worked examples",
            budget: None,
            run: feature_conformance,
        },
        Criterion {
            name: "score averaging",
            budget: None,
            run: averaging,
        },
        Criterion {
            name: "determinism and persistence",
            budget: None,
            run: determinism,
        },
        Criterion {
            name: "evaluation manual case",
            budget: None,
            run: evaluation_oracle,
        },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(budget)) = (&outcome, c.budget) {
            if elapsed > budget {
                outcome = Err(format!("took {elapsed:.2?}, budget {budget:?}"));
            }
        }
        match &outcome {
            Ok(detail) => report(format!("PASS  {:<44} {detail} [{elapsed:.2?}]", c.name)),
            Err(why) => {
                report(format!("FAIL  {:<44} {why} [{elapsed:.2?}]", c.name));
                failed.push(c.name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
