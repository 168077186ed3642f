use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use syntrav::ambiguity::{collision_report, enumerate_trees, pair_witness, separated_witness, EnumerationSpec};
use syntrav::corpus::{synthetic_corpus, CorpusSpec};
use syntrav::linearizer::{linearize_pair, Linearization};
use syntrav::model::FORMAT_VERSION;
use syntrav::nml::nml_loss;
use syntrav::numerics::{pca_2d, Rng};
use syntrav::prosody::{evaluate, make_phoneme_level, train, Lexicon, LexiconPolicy, PhonemeTable, TrainConfig};
use syntrav::treebank::{build_vocabulary, parse_tree_file, serialize_tree, ConstituentTree, LabelVocabulary};
use syntrav::Model;

#[derive(Parser)]
#[command(name = "syntrav", version, about = "Dual-traversal syntactic features for prosody modelling")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Options {
    /// Seed for every stochastic step [default: 42, or the config file's]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// NML loss weight [default: 0.05]
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Learning rate [default: 0.001]
    #[arg(long, global = true)]
    lr: Option<f64>,
    /// Training epochs [default: 50]
    #[arg(long, global = true)]
    epochs: Option<usize>,
    /// Embedding, hidden and phoneme dimensions [default: 32,64,16]
    #[arg(long, global = true, value_name = "D_EMB,D_HID,D_PH", value_parser = parse_dims)]
    dims: Option<(usize, usize, usize)>,
    #[arg(long, global = true, value_name = "strict|fallback", default_value = "strict", value_parser = parse_policy)]
    lexicon_policy: LexiconPolicy,
    /// Checkpoint format version to read and write
    #[arg(long, global = true, default_value_t = FORMAT_VERSION)]
    format_version: u32,
    /// JSON training config; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a tree file and print canonical trees
    Parse { input: PathBuf },
    /// Print left-first and right-first linearizations
    Linearize { input: PathBuf },
    /// Print word-level and phoneme-level features
    Featurize { model: PathBuf, input: PathBuf, lexicon: PathBuf },
    /// Train on a tree file; epoch logs go to stdout, the model to --out
    Train {
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Break-prediction metrics of a model on a tree file
    Eval { model: PathBuf, corpus: PathBuf },
    /// Enumerate a tree family and report traversal collisions
    Ambiguity {
        #[arg(long, default_value_t = 3)]
        words: usize,
        #[arg(long, value_delimiter = ',', default_value = "A,B")]
        labels: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_children: usize,
        #[arg(long, default_value_t = 1)]
        max_unary_chain: usize,
        /// Also print one pair of trees for each collision kind
        #[arg(long)]
        witness: bool,
    },
    /// PCA projection and spectrum of a model's label embeddings
    ExportEmbeddings { model: PathBuf },
    /// Print a seeded synthetic treebank
    SynthCorpus {
        #[arg(long, default_value_t = 200)]
        sentences: usize,
        #[arg(long, default_value_t = 2)]
        min_words: usize,
        #[arg(long, default_value_t = 8)]
        max_words: usize,
    },
}

enum Failure {
    Data(String),
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn parse_dims(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [e, h, p] if e > 0 && h > 0 && p > 0 => Ok((e, h, p)),
        _ => Err("expected three positive integers d_emb,d_hid,d_ph".into()),
    }
}

fn parse_policy(s: &str) -> Result<LexiconPolicy, String> {
    s.parse().map_err(|e: syntrav::Error| e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_trees(path: &Path) -> Result<Vec<ConstituentTree>, Failure> {
    parse_tree_file(&read(path)?)
        .map_err(|(line, e)| Failure::Data(format!("{}:{line}: {e}", path.display())))
}

fn load_model(path: &Path, opts: &Options) -> Result<Model, Failure> {
    check_format(opts)?;
    Model::from_json(&read(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn check_format(opts: &Options) -> Outcome {
    if opts.format_version != FORMAT_VERSION {
        return Err(Failure::Usage(format!(
            "unsupported --format-version {} (supported: {FORMAT_VERSION})",
            opts.format_version
        )));
    }
    Ok(())
}

fn config(opts: &Options) -> Result<TrainConfig, Failure> {
    let mut c = match &opts.config {
        Some(path) => serde_json::from_str(&read(path)?)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
        None => TrainConfig::default(),
    };
    if let Some(s) = opts.seed {
        c.seed = s;
    }
    if let Some(l) = opts.lambda {
        c.lambda = l;
    }
    if let Some(lr) = opts.lr {
        c.learning_rate = lr;
    }
    if let Some(e) = opts.epochs {
        c.epochs = e;
    }
    if let Some((e, h, p)) = opts.dims {
        (c.d_emb, c.d_hid, c.d_ph) = (e, h, p);
    }
    c.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(c)
}

struct Out(BufWriter<io::StdoutLock<'static>>);

impl Out {
    fn line(&mut self, value: &impl Serialize) -> io::Result<()> {
        serde_json::to_writer(&mut self.0, value)?;
        self.0.write_all(b"\n")
    }

    fn text(&mut self, s: &str) -> io::Result<()> {
        writeln!(self.0, "{s}")
    }
}

fn walk_json(lin: &Linearization, vocab: &LabelVocabulary) -> serde_json::Value {
    let labels: Vec<&str> = lin.label_ids.iter().map(|&id| vocab.label(id).expect("id from vocab")).collect();
    json!({ "labels": labels, "word_pos": lin.word_positions })
}

fn run(cli: Cli, out: &mut Out) -> Outcome {
    let opts = &cli.opts;
    match cli.command {
        Command::Parse { input } => {
            for t in read_trees(&input)? {
                out.text(&serialize_tree(&t))?;
            }
        }
        Command::Linearize { input } => {
            let trees = read_trees(&input)?;
            if trees.is_empty() {
                return Ok(());
            }
            let vocab = build_vocabulary(&trees)?;
            for t in &trees {
                let p = linearize_pair(t, &vocab)?;
                out.line(&json!({
                    "left": walk_json(&p.left, &vocab),
                    "right": walk_json(&p.right, &vocab),
                    "words": t.words(),
                }))?;
            }
        }
        Command::Featurize { model, input, lexicon } => {
            let model = load_model(&model, opts)?;
            let trees = read_trees(&input)?;
            let lexicon = Lexicon::parse(&read(&lexicon)?)?;
            let seed = opts.seed.unwrap_or(config(opts)?.seed);
            let all_words = trees.iter().flat_map(|t| t.words());
            let table = PhonemeTable::for_words(&lexicon, all_words, opts.lexicon_policy, model.dims.d_ph, &mut Rng::new(seed))?;
            for t in &trees {
                let features = model.encode(t)?;
                let words = t.words();
                let ph = make_phoneme_level(&features, &words, &lexicon, &table, opts.lexicon_policy)?;
                out.line(&json!({
                    "words": words,
                    "phonemes": ph.phonemes,
                    "syntactic": features.per_word,
                    "phoneme_level": ph.rows.to_rows(),
                }))?;
            }
        }
        Command::Train { corpus, out: path } => {
            check_format(opts)?;
            let cfg = config(opts)?;
            let trees = read_trees(&corpus)?;
            let (model, log) = train(&trees, &cfg)?;
            for e in &log.epochs {
                out.line(e)?;
            }
            fs::write(&path, model.to_json() + "\n")
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        }
        Command::Eval { model, corpus } => {
            let model = load_model(&model, opts)?;
            out.line(&evaluate(&model, &read_trees(&corpus)?)?)?;
        }
        Command::Ambiguity { words, labels, max_children, max_unary_chain, witness } => {
            let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
            let spec = EnumerationSpec::new(words, &labels, max_children).with_unary_chain(max_unary_chain);
            let trees = enumerate_trees(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
            let vocab = spec.vocabulary();
            out.line(&collision_report(&trees, &vocab)?)?;
            if witness {
                let show = |w: Option<(usize, usize)>| {
                    w.map(|(a, b)| [serialize_tree(&trees[a]), serialize_tree(&trees[b])])
                };
                out.line(&json!({
                    "left_collision_separated_by_pair": show(separated_witness(&trees, &vocab)?),
                    "pair_collision": show(pair_witness(&trees, &vocab)?),
                }))?;
            }
        }
        Command::ExportEmbeddings { model } => {
            let model = load_model(&model, opts)?;
            let table = &model.encoder.embedding.weights;
            let nml = nml_loss(table)?;
            let pca = if table.rows() >= 2 && table.cols() >= 2 { pca_2d(table)?.to_rows() } else { Vec::new() };
            out.line(&json!({
                "labels": model.vocabulary.labels(),
                "pca": pca,
                "singular_values": nml.singular_values,
                "nuclear_norm": nml.nuclear_norm(),
            }))?;
        }
        Command::SynthCorpus { sentences, min_words, max_words } => {
            let seed = opts.seed.unwrap_or(config(opts)?.seed);
            let spec = CorpusSpec { sentences, min_words, max_words };
            let trees = synthetic_corpus(&spec, &mut Rng::new(seed)).map_err(|e| Failure::Usage(e.to_string()))?;
            for t in &trees {
                out.text(&serialize_tree(t))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out(BufWriter::new(io::stdout().lock()));
    let result = run(cli, &mut out);
    let flushed = out.0.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Ok(()), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        (Err(Failure::Data(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        (Err(Failure::Usage(msg)), _) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
