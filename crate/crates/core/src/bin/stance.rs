//! `stance` command-line tool: train, predict, eval, score, splits.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use stance_core::corpus::{load_stances, write_stances, Instance};
use stance_core::persist::{bundle_paths, load_model, save_model};
use stance_core::text::StopWordList;
use stance_core::{fnc1_score, multi_split_evaluate, train_with, Dataset, ScoreReport, StanceLabel, TrainConfig};

#[derive(Parser)]
#[command(name = "stance", version, about = "Headline/body stance detection")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write `<out>.manifest` + `<out>.tensors`.
    Train {
        #[arg(long)]
        train_bodies: PathBuf,
        #[arg(long)]
        train_stances: PathBuf,
        /// Test bodies; their text only enters the TF-IDF vocabulary.
        #[arg(long, requires = "test_stances")]
        test_bodies: Option<PathBuf>,
        /// Test headlines; labels, if any, are never read.
        #[arg(long, requires = "test_bodies")]
        test_stances: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Predict stances and write `Headline,Body ID,Stance` CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        bodies: PathBuf,
        #[arg(long)]
        stances: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a model on labeled data.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        bodies: PathBuf,
        #[arg(long)]
        stances: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Score a prediction CSV against a gold CSV.
    Score {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Mean and std of hold-out FNC-1 score over repeated random splits.
    Splits {
        #[arg(long)]
        bodies: PathBuf,
        #[arg(long)]
        stances: PathBuf,
        #[arg(short, long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0.2)]
        holdout_fraction: f64,
        #[command(flatten)]
        hyper: HyperArgs,
    },
}

/// Hyperparameter overrides. Priority: flag, then config file, then the
/// `STANCE_SEED` environment variable (seed only), then defaults.
#[derive(Args, Default)]
struct HyperArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "lim_unigram")]
    lim_unigram: Option<usize>,
    #[arg(long = "hidden_size")]
    hidden_size: Option<usize>,
    #[arg(long = "train_keep_prob")]
    train_keep_prob: Option<f64>,
    #[arg(long = "l2_alpha")]
    l2_alpha: Option<f64>,
    #[arg(long = "learn_rate")]
    learn_rate: Option<f64>,
    #[arg(long = "clip_ratio")]
    clip_ratio: Option<f64>,
    #[arg(long = "batch_size")]
    batch_size: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Apply dropout to the output logits too (default true).
    #[arg(long = "dropout-logits")]
    dropout_logits: Option<bool>,
}

impl HyperArgs {
    fn resolve(&self) -> Result<TrainConfig> {
        let mut c = TrainConfig::default();
        if let Ok(seed) = std::env::var("STANCE_SEED") {
            c.seed = seed.trim().parse().with_context(|| format!("STANCE_SEED=`{seed}` is not an integer"))?;
        }
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        macro_rules! over {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        over!(lim_unigram, hidden_size, train_keep_prob, l2_alpha, learn_rate, clip_ratio, batch_size, epochs, seed, dropout_logits);
        c.validate()?;
        for w in c.range_warnings() {
            log::warn!("{w}");
        }
        Ok(c)
    }
}

fn load_dataset(bodies: &Path, stances: &Path, labeled: bool) -> Result<Dataset> {
    Dataset::load(bodies, stances, labeled).with_context(|| format!("loading {} + {}", bodies.display(), stances.display()))
}

fn write_json(path: &Path, report: &ScoreReport) -> Result<()> {
    let mut map = serde_json::Map::new();
    for (k, v) in report.key_values() {
        let value = if k.starts_with("confusion.") {
            serde_json::Value::from(v as u64)
        } else {
            serde_json::Value::from(v)
        };
        map.insert(k, value);
    }
    let text = serde_json::to_string_pretty(&serde_json::Value::Object(map))?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn cmd_train(
    train_bodies: &Path,
    train_stances: &Path,
    test: Option<(&Path, &Path)>,
    out: &Path,
    hyper: &HyperArgs,
) -> Result<()> {
    let config = hyper.resolve()?;
    print!("{config}");
    let train = load_dataset(train_bodies, train_stances, true)?;
    let corpus = match test {
        Some((b, s)) => {
            let test = load_dataset(b, s, false)?;
            stance_core::corpus::unique_texts([&train, &test])
        }
        None => {
            log::warn!("no test files given: the TF-IDF vocabulary is fit on training texts only");
            train.unique_texts()
        }
    };
    let epochs = config.epochs;
    let (bundle, report) = train_with(&train, &config, &corpus, &StopWordList::english(), |e, loss| {
        println!("epoch {:>4}/{epochs}  loss {loss:.6}", e + 1);
    })?;
    save_model(&bundle, out)?;
    let (m, t) = bundle_paths(out);
    let pred = bundle.predict(&train)?;
    let score = fnc1_score(&train.labels()?, &pred)?;
    println!("trained {} epochs in {:.1}s (seed {})", report.epochs, report.wall_time.as_secs_f64(), report.seed);
    println!("training-set {}", score.to_string().lines().last().unwrap_or_default());
    println!("wrote {} and {}", m.display(), t.display());
    Ok(())
}

fn cmd_predict(model: &Path, bodies: &Path, stances: &Path, out: &Path) -> Result<()> {
    let bundle = load_model(model).with_context(|| format!("loading model {}", model.display()))?;
    let data = load_dataset(bodies, stances, false)?;
    let pred = bundle.predict(&data)?;
    let rows: Vec<Instance> = data
        .instances
        .iter()
        .zip(pred)
        .map(|(i, p)| Instance { stance: Some(p), ..i.clone() })
        .collect();
    let file = std::fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_stances(std::io::BufWriter::new(file), &rows)?;
    println!("wrote {} predictions to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_eval(model: &Path, bodies: &Path, stances: &Path, json_out: Option<&Path>) -> Result<()> {
    let bundle = load_model(model).with_context(|| format!("loading model {}", model.display()))?;
    let data = load_dataset(bodies, stances, true)?;
    let pred = bundle.predict(&data)?;
    let report = fnc1_score(&data.labels()?, &pred)?;
    println!("{report}");
    if let Some(p) = json_out {
        write_json(p, &report)?;
    }
    Ok(())
}

fn keyed(rows: Vec<Instance>, path: &Path) -> Result<HashMap<(String, u64), StanceLabel>> {
    let mut map = HashMap::with_capacity(rows.len());
    for r in rows {
        let key = (r.headline, r.body_id);
        let stance = r.stance.expect("loaded as labeled");
        if map.insert(key.clone(), stance).is_some() {
            bail!("{}: duplicate row for headline `{}`, body {}", path.display(), key.0, key.1);
        }
    }
    Ok(map)
}

fn cmd_score(truth: &Path, pred: &Path, json_out: Option<&Path>) -> Result<()> {
    let truth_rows = load_stances(truth, true)?;
    let pred_rows = load_stances(pred, true)?;
    if truth_rows.len() != pred_rows.len() {
        bail!("{} has {} rows but {} has {}", truth.display(), truth_rows.len(), pred.display(), pred_rows.len());
    }
    let order: Vec<(String, u64)> = truth_rows.iter().map(|r| (r.headline.clone(), r.body_id)).collect();
    let truth_map = keyed(truth_rows, truth)?;
    let pred_map = keyed(pred_rows, pred)?;
    let unmatched: Vec<&(String, u64)> = order.iter().filter(|k| !pred_map.contains_key(*k)).collect();
    if !unmatched.is_empty() {
        for (h, b) in &unmatched {
            eprintln!("unmatched: body {b}, headline `{h}`");
        }
        bail!("{} gold rows have no prediction", unmatched.len());
    }
    let t: Vec<StanceLabel> = order.iter().map(|k| truth_map[k]).collect();
    let p: Vec<StanceLabel> = order.iter().map(|k| pred_map[k]).collect();
    let report = fnc1_score(&t, &p)?;
    println!("{report}");
    if let Some(path) = json_out {
        write_json(path, &report)?;
    }
    Ok(())
}

fn cmd_splits(bodies: &Path, stances: &Path, n: usize, fraction: f64, hyper: &HyperArgs) -> Result<()> {
    let config = hyper.resolve()?;
    let data = load_dataset(bodies, stances, true)?;
    let r = multi_split_evaluate(&data, &config, n, fraction)?;
    for (i, s) in r.scores.iter().enumerate() {
        println!("split {:>3} seed {:>6}  FNC-1 {:.2}%", i, config.seed.wrapping_add(i as u64), s);
    }
    println!("mean {:.2}%  std {:.2}  over {} splits", r.mean, r.std, r.scores.len());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Train { train_bodies, train_stances, test_bodies, test_stances, out, hyper } => {
            let test = test_bodies.as_deref().zip(test_stances.as_deref());
            cmd_train(train_bodies, train_stances, test, out, hyper)
        }
        Command::Predict { model, bodies, stances, out } => cmd_predict(model, bodies, stances, out),
        Command::Eval { model, bodies, stances, json_out } => cmd_eval(model, bodies, stances, json_out.as_deref()),
        Command::Score { truth, pred, json_out } => cmd_score(truth, pred, json_out.as_deref()),
        Command::Splits { bodies, stances, n, holdout_fraction, hyper } => {
            cmd_splits(bodies, stances, *n, *holdout_fraction, hyper)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
