//! Command-line front end: train, parse, evaluate, analyze and selfcheck.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chardep::convert::intra_structures;
use chardep::io::{
    format_char_trees, format_conll, read_char_trees, read_conll, read_intra_annotations,
    read_plain_text, ConllSentence,
};
use chardep::metrics::{evaluate, structure_cm, Mapping, PunctLabels, Shape, StructureHistogram};
use chardep::selfcheck::{run_selfcheck, ChartImpl, Reference, SignFlippedInside};
use chardep::training::{parse_config, Mode, Model, TrainConfig};
use chardep::types::{CharSentence, CharTree, Segmentation, WordTree};
use chardep::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status for each failure class.
const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser)]
#[command(
    name = "chardep",
    version,
    about = "Character-level dependency parsing with latent intra-word structure"
)]
struct Cli {
    /// Worker threads for sentence-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the reference scorer on a CoNLL corpus.
    Train(TrainArgs),
    /// Parse sentences with a trained model.
    Parse(ParseArgs),
    /// Score predicted word trees against gold ones.
    Evaluate(EvaluateArgs),
    /// Intra-word structure distribution and structure complete match.
    Analyze(AnalyzeArgs),
    /// Compare the chart algorithms with exhaustive enumeration.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training corpus (CoNLL).
    #[arg(long)]
    train: PathBuf,
    /// Development corpus (CoNLL); dev UF/LF are printed after every epoch.
    #[arg(long)]
    dev: Option<PathBuf>,
    /// Overrides the configured mode.
    #[arg(long)]
    mode: Option<CliMode>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the model.
    #[arg(long)]
    out: PathBuf,
    /// Where to write the loss trace (default: the model path with
    /// `.trace.tsv` appended).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Latent,
    LatentC2f,
    Leftward,
    Rightward,
    PipelineParse,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Latent => Mode::Latent,
            CliMode::LatentC2f => Mode::LatentC2f,
            CliMode::Leftward => Mode::Leftward,
            CliMode::Rightward => Mode::Rightward,
            CliMode::PipelineParse => Mode::PipelineParse,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    /// One sentence per line; whitespace separates words.
    Text,
    /// CoNLL word rows; the FORM column gives the words.
    Conll,
}

#[derive(Args)]
struct ParseArgs {
    /// Model file written by `train`
    #[arg(long)]
    model: PathBuf,
    /// Sentences to parse
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    input_format: InputFormat,
    /// Word trees (CoNLL).
    #[arg(long)]
    output: PathBuf,
    /// Character trees.
    #[arg(long)]
    char_output: Option<PathBuf>,
    /// Decode under the segmentation given by the input.
    #[arg(long)]
    gold_seg: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Gold corpus (CoNLL)
    #[arg(long)]
    gold: PathBuf,
    /// Predicted corpus (CoNLL) over the same characters
    #[arg(long)]
    pred: PathBuf,
    /// Comma-separated labels whose arcs are excluded; empty for none.
    #[arg(long, default_value = "punct,P")]
    punct_labels: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Gold corpus (CoNLL) supplying sentences and segmentation.
    #[arg(long)]
    gold_seg: PathBuf,
    /// Models to decode the gold sentences with; one run per model.
    #[arg(long, required_unless_present = "pred", conflicts_with = "pred")]
    model: Vec<PathBuf>,
    /// Predicted character trees; one run per file.
    #[arg(long)]
    pred: Vec<PathBuf>,
    /// Annotated intra-word structures.
    #[arg(long)]
    annotations: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Largest sentence length to enumerate (1..=9)
    #[arg(long, default_value_t = 7)]
    max_n: usize,
    /// Random instances per sentence length.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, hide = true, value_enum)]
    inject_fault: Option<Fault>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    SignFlip,
}

/// A failure together with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_DATA,
            message: e.to_string(),
        }
    }
}

fn data_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: message.into(),
    }
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| data_error(format!("{}: {}", path.display(), e))
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {}", e);
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Parse(a) => parse(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Analyze(a) => analyze(a),
        Command::Selfcheck(a) => selfcheck(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_corpus(path: &Path) -> Result<Vec<ConllSentence>, Failure> {
    read_conll(path).map_err(with_path(path))
}

fn pairs(corpus: Vec<ConllSentence>) -> Vec<(CharSentence, WordTree)> {
    corpus.into_iter().map(|c| (c.sentence, c.tree)).collect()
}

fn train(a: TrainArgs) -> CliResult {
    let mut cfg = match &a.config {
        Some(p) => parse_config(
            &fs::read_to_string(p).map_err(|e| data_error(format!("{}: {}", p.display(), e)))?,
        )
        .map_err(with_path(p))?,
        None => TrainConfig::default(),
    };
    if let Some(m) = a.mode {
        cfg.mode = m.into();
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let corpus = pairs(read_corpus(&a.train)?);
    let dev = match &a.dev {
        Some(p) => pairs(read_corpus(p)?),
        None => Vec::new(),
    };
    let dev_sents: Vec<CharSentence> = dev.iter().map(|(s, _)| s.clone()).collect();
    let dev_gold: Vec<WordTree> = dev.iter().map(|(_, t)| t.clone()).collect();
    println!("epoch\tloss\tdev_uf\tdev_lf");
    let outcome = Model::train(&corpus, &cfg, |e, model| {
        if dev.is_empty() {
            println!("{}\t{:.6}\t-\t-", e.epoch + 1, e.loss);
        } else {
            let pred: Vec<WordTree> = model
                .parse_all(&dev_sents, None)?
                .into_iter()
                .map(|p| p.word_tree)
                .collect();
            let ev = evaluate(&dev_gold, &pred, &PunctLabels::default())?;
            println!(
                "{}\t{:.6}\t{:.4}\t{:.4}",
                e.epoch + 1,
                e.loss,
                ev.unlabeled.prf().f1,
                ev.labeled.prf().f1
            );
        }
        Ok(())
    })?;
    if outcome.skipped_nonprojective > 0 {
        eprintln!(
            "warning: skipped {} non-projective training trees",
            outcome.skipped_nonprojective
        );
    }
    outcome.model.save(&a.out).map_err(with_path(&a.out))?;
    let trace = a.trace.unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".trace.tsv");
        PathBuf::from(p)
    });
    fs::write(&trace, outcome.report.to_tsv())
        .map_err(|e| data_error(format!("{}: {}", trace.display(), e)))?;
    Ok(())
}

fn parse(a: ParseArgs) -> CliResult {
    let model = Model::load(&a.model).map_err(with_path(&a.model))?;
    let input: Vec<(CharSentence, Segmentation)> = match a.input_format {
        InputFormat::Text => read_plain_text(&a.input).map_err(with_path(&a.input))?,
        InputFormat::Conll => read_corpus(&a.input)?
            .into_iter()
            .map(|c| (c.sentence, c.tree.segmentation().clone()))
            .collect(),
    };
    let sentences: Vec<CharSentence> = input.iter().map(|(s, _)| s.clone()).collect();
    let segs: Vec<Segmentation> = input.into_iter().map(|(_, g)| g).collect();
    let preds = model.parse_all(&sentences, a.gold_seg.then_some(segs.as_slice()))?;
    let fallbacks = preds.iter().filter(|p| p.fallback_used).count();
    if fallbacks > 0 {
        eprintln!(
            "warning: {} sentences needed label fallback to form word trees",
            fallbacks
        );
    }
    let words: Vec<(CharSentence, WordTree)> = sentences
        .iter()
        .zip(&preds)
        .map(|(s, p)| (s.clone(), p.word_tree.clone()))
        .collect();
    fs::write(&a.output, format_conll(&words))
        .map_err(|e| data_error(format!("{}: {}", a.output.display(), e)))?;
    if let Some(path) = &a.char_output {
        let chars: Vec<(CharSentence, CharTree)> = sentences
            .iter()
            .zip(&preds)
            .map(|(s, p)| (s.clone(), p.char_tree.clone()))
            .collect();
        fs::write(path, format_char_trees(&chars))
            .map_err(|e| data_error(format!("{}: {}", path.display(), e)))?;
    }
    Ok(())
}

fn punct_labels(spec: &str) -> PunctLabels {
    PunctLabels::new(spec.split(',').map(str::trim).filter(|s| !s.is_empty()))
}

fn evaluate_cmd(a: EvaluateArgs) -> CliResult {
    let gold = read_corpus(&a.gold)?;
    let pred = read_corpus(&a.pred)?;
    if gold.len() != pred.len() {
        return Err(data_error(format!(
            "{} gold sentences but {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    for (i, (g, p)) in gold.iter().zip(&pred).enumerate() {
        if g.sentence != p.sentence {
            return Err(data_error(format!(
                "sentence {} differs: gold '{}' vs predicted '{}'",
                i + 1,
                g.sentence,
                p.sentence
            )));
        }
    }
    let g: Vec<WordTree> = gold.into_iter().map(|c| c.tree).collect();
    let p: Vec<WordTree> = pred.into_iter().map(|c| c.tree).collect();
    let ev = evaluate(&g, &p, &punct_labels(&a.punct_labels))?;
    print!("{}", ev.to_text());
    Ok(())
}

/// Per run, the shape of every gold word occurrence (`None` if the word is
/// not a single-rooted subtree in that run).
fn run_shapes(gold: &[ConllSentence], trees: &[Vec<usize>]) -> Result<Vec<Option<Shape>>, Failure> {
    let mut out = Vec::new();
    for (g, heads) in gold.iter().zip(trees) {
        for s in intra_structures(heads, g.tree.segmentation())? {
            out.push(s.as_ref().map(Shape::of));
        }
    }
    Ok(out)
}

fn analyze(a: AnalyzeArgs) -> CliResult {
    let gold = read_corpus(&a.gold_seg)?;
    let sentences: Vec<CharSentence> = gold.iter().map(|c| c.sentence.clone()).collect();
    let segs: Vec<Segmentation> = gold.iter().map(|c| c.tree.segmentation().clone()).collect();
    let mut runs: Vec<Vec<Vec<usize>>> = Vec::new();
    for path in &a.model {
        let model = Model::load(path).map_err(with_path(path))?;
        let preds = model.parse_all(&sentences, Some(&segs))?;
        runs.push(
            preds
                .into_iter()
                .map(|p| p.char_tree.heads().to_vec())
                .collect(),
        );
    }
    for path in &a.pred {
        let trees = read_char_trees(path).map_err(with_path(path))?;
        if trees.len() != gold.len() {
            return Err(data_error(format!(
                "{}: {} trees for {} gold sentences",
                path.display(),
                trees.len(),
                gold.len()
            )));
        }
        for (i, ((s, _), g)) in trees.iter().zip(&gold).enumerate() {
            if *s != g.sentence {
                return Err(data_error(format!(
                    "{}: sentence {} differs from gold",
                    path.display(),
                    i + 1
                )));
            }
        }
        runs.push(trees.into_iter().map(|(_, t)| t.heads().to_vec()).collect());
    }
    let words: Vec<String> = gold
        .iter()
        .flat_map(|c| {
            c.tree
                .segmentation()
                .spans()
                .iter()
                .map(|&(b, e)| c.sentence.substring(b, e))
                .collect::<Vec<_>>()
        })
        .collect();
    let shapes: Vec<Vec<Option<Shape>>> = runs
        .iter()
        .map(|r| run_shapes(&gold, r))
        .collect::<Result<_, _>>()?;
    let annotations = match &a.annotations {
        Some(p) => Some(read_intra_annotations(p).map_err(with_path(p))?),
        None => None,
    };

    let mut out = String::new();
    let histogram = |keep: &dyn Fn(usize) -> bool| {
        let mut h = StructureHistogram::default();
        for run in &shapes {
            for (i, s) in run.iter().enumerate() {
                if let (Some(s), true) = (s, keep(i)) {
                    h.add(s.clone());
                }
            }
        }
        h
    };
    let broken: usize = shapes
        .iter()
        .map(|r| r.iter().filter(|s| s.is_none()).count())
        .sum();
    let _ = writeln!(out, "runs\t{}", runs.len());
    let _ = writeln!(out, "words\t{}", words.len());
    let _ = writeln!(out, "non_subtree_words\t{}", broken);
    let _ = writeln!(out, "\n# structure distribution (all words)");
    out.push_str(&histogram(&|_| true).to_tsv());
    if let Some(ann) = &annotations {
        let _ = writeln!(out, "\n# structure distribution (annotated words)");
        out.push_str(&histogram(&|i| ann.get(&words[i]).is_some()).to_tsv());
        let gold_shapes: Vec<Option<Shape>> = words
            .iter()
            .map(|w| ann.get(w).map(|h| Shape(h.to_vec())))
            .collect();
        // A word that is not a subtree matches no annotation.
        let runs_flat: Vec<Vec<Shape>> = shapes
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| s.clone().unwrap_or(Shape(Vec::new())))
                    .collect()
            })
            .collect();
        let one = structure_cm(&runs_flat, &gold_shapes, Mapping::OneToOne)?;
        let many = structure_cm(&runs_flat, &gold_shapes, Mapping::ManyToOne)?;
        let evaluated = gold_shapes.iter().filter(|s| s.is_some()).count();
        let _ = writeln!(out, "\n# structure complete match");
        let _ = writeln!(out, "annotated_words\t{}", evaluated);
        let _ = writeln!(out, "cm_1to1\t{:.2}", one);
        let _ = writeln!(out, "cm_m1\t{:.2}", many);
    }
    print!("{}", out);
    Ok(())
}

fn selfcheck(a: SelfcheckArgs) -> CliResult {
    let imp: &dyn ChartImpl = match a.inject_fault {
        None => &Reference,
        Some(Fault::SignFlip) => &SignFlippedInside,
    };
    match run_selfcheck(a.max_n, a.seeds, imp) {
        Err(e @ Error::OracleRange(_)) => Err(Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }),
        Err(e) => Err(e.into()),
        Ok(Ok(report)) => {
            println!(
                "selfcheck passed: {} instances, {} comparisons (n <= {})",
                report.instances, report.comparisons, a.max_n
            );
            Ok(())
        }
        Ok(Err(cx)) => {
            print!("selfcheck FAILED\n{}", cx);
            Err(Failure {
                code: EXIT_CHECK,
                message: format!("{} disagrees with the oracle", cx.check),
            })
        }
    }
}
