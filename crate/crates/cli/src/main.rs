use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mixtag::corpus::{merge_corpora, parse_corpus, write_corpus, Corpus, CorpusError, Schema};
use mixtag::crf::{load_model, save_model};
use mixtag::eval::evaluate;
use mixtag::features::{extract_attributes, load_lexicon, FeatureCatalogue, NormalizationLexicon};
use mixtag::trainer::{train, TrainConfig, TrainError};

const USAGE: u8 = 1;
const DATA: u8 = 2;
const NUMERIC: u8 = 3;

/// Failure carrying an exit code and the diagnostic for standard error.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

#[derive(Parser)]
#[command(
    name = "mixtag",
    version,
    about = "CRF part-of-speech tagger for code-mixed text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on one or more 3-column files (merged in the order given).
    Train {
        #[arg(long = "train", required = true, value_name = "FILE")]
        train: Vec<PathBuf>,
        #[arg(long, value_name = "FILE")]
        lexicon: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        cutoff: usize,
        #[arg(long, default_value_t = 10.0)]
        sigma2: f64,
        #[arg(long = "max-iter", default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Feature family or orthographic flag to switch off; repeatable.
        #[arg(long = "disable-feature", value_name = "NAME")]
        disable_feature: Vec<String>,
    },
    /// Tag a 2-column file, writing 3-column output.
    Tag {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Score a predicted 3-column file against gold.
    Eval {
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        report: ReportFormat,
    },
    /// Print the attributes extracted for each token.
    Features {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        lexicon: Option<PathBuf>,
        /// Single position as `sentence:token`, both zero-based.
        #[arg(long, value_name = "S:T")]
        position: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Lines,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train {
            train,
            lexicon,
            model,
            cutoff,
            sigma2,
            max_iter,
            tol,
            disable_feature,
        } => {
            let config = TrainConfig {
                cutoff,
                l2_sigma2: sigma2,
                max_iterations: max_iter,
                tolerance: tol,
                ..TrainConfig::default()
            };
            cmd_train(
                &train,
                lexicon.as_deref(),
                &model,
                &config,
                &disable_feature,
            )
        }
        Command::Tag {
            model,
            input,
            output,
        } => cmd_tag(&model, &input, &output),
        Command::Eval { gold, pred, report } => cmd_eval(&gold, &pred, report),
        Command::Features {
            input,
            lexicon,
            position,
        } => cmd_features(&input, lexicon.as_deref(), position.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(DATA, format_args!("{}: {e}", path.display())))
}

fn corpus_failure(path: &Path, err: CorpusError) -> Failure {
    let path = path.display();
    match err {
        CorpusError::ColumnCount {
            line,
            expected,
            found,
        } => fail(
            DATA,
            format_args!("{path}:{line}: expected {expected} tab-separated columns, found {found}"),
        ),
        CorpusError::EmptyField { line, column } => fail(
            DATA,
            format_args!("{path}:{line}: column {column} is empty"),
        ),
        other => fail(DATA, format_args!("{path}: {other}")),
    }
}

fn read_corpus(path: &Path, schema: Schema) -> Result<Corpus, Failure> {
    parse_corpus(&read_text(path)?, schema).map_err(|e| corpus_failure(path, e))
}

fn read_lexicon(path: Option<&Path>) -> Result<NormalizationLexicon, Failure> {
    match path {
        None => Ok(NormalizationLexicon::new()),
        Some(p) => load_lexicon(&read_text(p)?)
            .map_err(|e| fail(DATA, format_args!("{}: {e}", p.display()))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| fail(DATA, format_args!("{}: {e}", path.display())))
}

fn cmd_train(
    files: &[PathBuf],
    lexicon: Option<&Path>,
    model_path: &Path,
    config: &TrainConfig,
    disabled: &[String],
) -> Result<(), Failure> {
    let mut catalogue = FeatureCatalogue::default();
    for name in disabled {
        catalogue = catalogue.disable(name).map_err(|e| fail(USAGE, e))?;
    }
    let lexicon = read_lexicon(lexicon)?;
    let parts = files
        .iter()
        .map(|p| read_corpus(p, Schema::Train3Col))
        .collect::<Result<Vec<_>, _>>()?;
    let corpus = merge_corpora(&parts).map_err(|e| fail(DATA, e))?;

    let (model, report) = train(&corpus, &lexicon, &catalogue, config).map_err(|e| match e {
        TrainError::NonFiniteObjective => fail(NUMERIC, e),
        TrainError::InvalidConfig(_) => fail(USAGE, e),
        other => fail(DATA, other),
    })?;
    write_file(model_path, &save_model(&model))?;

    println!("training sentences: {}", report.sentences);
    println!("training tokens: {}", report.tokens);
    println!("labels: {}", report.labels);
    println!("parameters: {}", report.parameters);
    println!("iterations: {}", report.iterations);
    println!("initial objective: {:.6}", report.initial_objective);
    println!("final objective: {:.6}", report.final_objective);
    Ok(())
}

fn cmd_tag(model_path: &Path, input: &Path, output: &Path) -> Result<(), Failure> {
    let bytes = fs::read(model_path)
        .map_err(|e| fail(DATA, format_args!("{}: {e}", model_path.display())))?;
    let model = load_model(&bytes)
        .map_err(|e| fail(DATA, format_args!("{}: {e}", model_path.display())))?;
    let corpus = read_corpus(input, Schema::Test2Col)?;
    let tagged = model.tag_corpus(&corpus);
    let text = write_corpus(&tagged, Schema::Train3Col).map_err(|e| fail(DATA, e))?;
    write_file(output, text.as_bytes())
}

fn cmd_eval(gold: &Path, pred: &Path, format: ReportFormat) -> Result<(), Failure> {
    let gold = read_corpus(gold, Schema::Train3Col)?;
    let pred = read_corpus(pred, Schema::Train3Col)?;
    let report = evaluate(&gold, &pred).map_err(|e| fail(DATA, e))?;
    match format {
        ReportFormat::Table => print!("{}", report.to_table()),
        ReportFormat::Lines => print!("{}", report.to_lines()),
    }
    Ok(())
}

fn parse_position(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || {
        fail(
            USAGE,
            format_args!("--position expects `sentence:token`, got {text:?}"),
        )
    };
    let (s, t) = text.split_once(':').ok_or_else(bad)?;
    Ok((s.parse().map_err(|_| bad())?, t.parse().map_err(|_| bad())?))
}

fn cmd_features(
    input: &Path,
    lexicon: Option<&Path>,
    position: Option<&str>,
) -> Result<(), Failure> {
    let position = position.map(parse_position).transpose()?;
    let lexicon = read_lexicon(lexicon)?;
    let text = read_text(input)?;
    let corpus = parse_corpus(&text, Schema::Train3Col)
        .or_else(|_| parse_corpus(&text, Schema::Test2Col))
        .map_err(|e| corpus_failure(input, e))?;
    let catalogue = FeatureCatalogue::default();

    let print = |s: usize, t: usize| -> Result<(), Failure> {
        let attrs = extract_attributes(&corpus.sentences[s], t, &lexicon, &catalogue)
            .map_err(|e| fail(DATA, format_args!("sentence {s}: {e}")))?;
        for a in attrs.iter() {
            println!("{a}");
        }
        Ok(())
    };

    match position {
        Some((s, t)) => {
            let Some(sentence) = corpus.sentences.get(s) else {
                return Err(fail(
                    DATA,
                    format_args!(
                        "sentence {s} out of range; input has {} sentences",
                        corpus.len()
                    ),
                ));
            };
            if t >= sentence.len() {
                return Err(fail(
                    DATA,
                    format_args!(
                        "token {t} out of range; sentence {s} has {} tokens",
                        sentence.len()
                    ),
                ));
            }
            print(s, t)
        }
        None => {
            for (s, sentence) in corpus.sentences.iter().enumerate() {
                for (t, token) in sentence.tokens().iter().enumerate() {
                    if s + t > 0 {
                        println!();
                    }
                    println!("# {s}:{t}\t{}", token.surface());
                    print(s, t)?;
                }
            }
            Ok(())
        }
    }
}
