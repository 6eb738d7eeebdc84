//! The `mrk` command line.
//!
//! Every flag can also be set through an `MRK_<FLAG>` environment variable,
//! e.g. `MRK_SUPPORT=5`. Each command that writes a file also writes a
//! manifest (`<out>.manifest.json`, or `manifest.json` inside an output
//! directory) from which `mrk replay` reproduces the outputs.

mod commands;
mod manifest;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

use crate::baselines::EnsembleMode;
use crate::error::{Error, Result};
use crate::eval::{NegativeMode, Predictor};
use crate::graph::{load_graph, EdgeFormat, MultiplexGraph};
use crate::predictor::Weighting;

pub use manifest::{manifest_for, sha256_hex, write_atomic, RunManifest, Timing};

fn as_display<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Parser)]
#[command(name = "mrk", version, about = "Multiplex graph association rules for typed link prediction")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0, env = "MRK_WORKERS")]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine frequent patterns (JSON, or `.lg` text when OUT ends in `.lg`).
    Mine(MineArgs),
    /// Build association rules from mined patterns.
    Rules(RulesArgs),
    /// Score candidate links with a rule set.
    Predict(PredictArgs),
    /// Score candidate links with a baseline predictor.
    Baseline(BaselineArgs),
    /// Combine score tables into an ensemble over a train/test snapshot pair.
    Ensemble(EnsembleArgs),
    /// Cross-validate or temporally evaluate a predictor.
    Evaluate(EvaluateArgs),
    /// Generate a planted-partition multiplex benchmark.
    GenSynth(GenSynthArgs),
    /// Convert between multiplex and coupled multigraph encodings.
    Transform(TransformArgs),
    /// List rules by decreasing lift.
    Inspect(InspectArgs),
    /// Re-run a command from its manifest and check the outputs match.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    /// `src dst layer`
    Plain,
    /// `layer src dst weight`
    Comune,
}

impl From<FormatArg> for EdgeFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Plain => EdgeFormat::Plain,
            FormatArg::Comune => EdgeFormat::Comune,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphArgs {
    /// Edge file.
    #[arg(long, visible_alias = "graph", env = "MRK_INPUT")]
    pub input: PathBuf,
    /// Node attribute file.
    #[arg(long, env = "MRK_ATTRS")]
    pub attrs: Option<PathBuf>,
    #[arg(long, env = "MRK_UNDIRECTED")]
    pub undirected: bool,
    #[arg(long, value_enum, default_value = "plain", env = "MRK_FORMAT")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MiningArgs {
    /// Minimum support σ; defaults to the node count of the smallest layer.
    #[arg(long, env = "MRK_SUPPORT")]
    pub support: Option<usize>,
    /// Largest pattern size s, in nodes.
    #[arg(long, default_value_t = 4, env = "MRK_MAX_SIZE")]
    pub max_size: usize,
    /// Per-pattern embedding search budget, in partial states.
    #[arg(long, default_value_t = crate::miner::DEFAULT_BUDGET, env = "MRK_BUDGET")]
    pub budget: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MineArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub mining: MiningArgs,
    #[arg(long, env = "MRK_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RuleFilterArgs {
    #[arg(long, env = "MRK_MIN_CONF")]
    pub min_conf: Option<f64>,
    #[arg(long, env = "MRK_MIN_LIFT")]
    pub min_lift: Option<f64>,
    /// Keep rules whose consequent uses this layer.
    #[arg(long, env = "MRK_LAYER")]
    pub layer: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RulesArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Pattern file written by `mine`.
    #[arg(long, env = "MRK_PATTERNS")]
    pub patterns: PathBuf,
    #[command(flatten)]
    pub filter: RuleFilterArgs,
    #[arg(long, env = "MRK_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Rule file written by `rules`.
    #[arg(long, env = "MRK_RULES")]
    pub rules: PathBuf,
    #[arg(long, default_value = "conf", env = "MRK_WEIGHTING")]
    #[serde(serialize_with = "as_display")]
    pub weighting: Weighting,
    /// Score `(node, layer, direction)` keys for links to unseen nodes.
    #[arg(long, env = "MRK_OLD_NEW")]
    pub old_new: bool,
    /// Count every antecedent embedding rather than once per rule.
    #[arg(long, env = "MRK_PER_EMBEDDING")]
    pub per_embedding: bool,
    #[arg(long, env = "MRK_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// sharma, cn, aa, ra, pa or ja.
    #[arg(long, env = "MRK_METHOD")]
    #[serde(serialize_with = "as_display")]
    pub method: Predictor,
    #[arg(long, env = "MRK_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    /// Training snapshot the score tables were computed on.
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Later snapshot; its new links are the positives.
    #[arg(long, env = "MRK_TEST")]
    pub test: PathBuf,
    /// Score CSVs to combine.
    #[arg(long, value_delimiter = ',', required = true, env = "MRK_SCORES")]
    pub scores: Vec<PathBuf>,
    #[arg(long, default_value = "base", env = "MRK_MODE")]
    #[serde(serialize_with = "as_display")]
    pub mode: EnsembleMode,
    #[arg(long, default_value = "full", env = "MRK_NEGATIVES")]
    #[serde(serialize_with = "as_display")]
    pub negatives: NegativeMode,
    #[arg(long, default_value_t = 0, env = "MRK_SEED")]
    pub seed: u64,
    #[arg(long, env = "MRK_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Later snapshot for a temporal split; without it, k-fold cross-validation.
    #[arg(long, env = "MRK_TEST")]
    pub test: Option<PathBuf>,
    #[arg(long, default_value = "magma", env = "MRK_PREDICTOR")]
    #[serde(serialize_with = "as_display")]
    pub predictor: Predictor,
    #[arg(long, default_value_t = 10, env = "MRK_FOLDS")]
    pub folds: usize,
    #[arg(long, default_value_t = 7, env = "MRK_SEED")]
    pub seed: u64,
    /// `full` or `sampled:K`.
    #[arg(long, default_value = "full", env = "MRK_NEGATIVES")]
    #[serde(serialize_with = "as_display")]
    pub negatives: NegativeMode,
    #[command(flatten)]
    pub mining: MiningArgs,
    #[arg(long, default_value = "conf", env = "MRK_WEIGHTING")]
    #[serde(serialize_with = "as_display")]
    pub weighting: Weighting,
    /// Evaluate links to unseen nodes instead (temporal splits, magma only).
    #[arg(long, env = "MRK_OLD_NEW")]
    pub old_new: bool,
    /// Output directory for ROC CSVs and the summary.
    #[arg(long, env = "MRK_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenSynthArgs {
    #[arg(long, value_delimiter = ',', default_value = "200,150,100,50", env = "MRK_SIZES")]
    pub sizes: Vec<usize>,
    /// Communities per layer; one value applies to every layer.
    #[arg(long, value_delimiter = ',', default_value = "8,6,4,2", env = "MRK_COMMUNITIES")]
    pub communities: Vec<usize>,
    #[arg(long, default_value_t = 0.15, env = "MRK_PIN")]
    pub pin: f64,
    #[arg(long, default_value_t = 0.005, env = "MRK_POUT")]
    pub pout: f64,
    #[arg(long, default_value_t = 1, env = "MRK_SEED")]
    pub seed: u64,
    #[arg(long, env = "MRK_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformTarget {
    /// Edge file in, coupled-multigraph JSON out.
    Coupled,
    /// Coupled-multigraph JSON in, edge file out.
    Multiplex,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransformArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, env = "MRK_TO")]
    pub to: TransformTarget,
    #[arg(long, env = "MRK_OUT")]
    pub out: PathBuf,
    /// With `--to multiplex`, also write node attributes here.
    #[arg(long, env = "MRK_ATTRS_OUT")]
    pub attrs_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InspectArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, env = "MRK_RULES")]
    pub rules: PathBuf,
    #[command(flatten)]
    pub filter: RuleFilterArgs,
    /// Write the listing here instead of standard output.
    #[arg(long, env = "MRK_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    #[arg(long, env = "MRK_MANIFEST")]
    pub manifest: PathBuf,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Mine(_) => "mine",
            Command::Rules(_) => "rules",
            Command::Predict(_) => "predict",
            Command::Baseline(_) => "baseline",
            Command::Ensemble(_) => "ensemble",
            Command::Evaluate(_) => "evaluate",
            Command::GenSynth(_) => "gen-synth",
            Command::Transform(_) => "transform",
            Command::Inspect(_) => "inspect",
            Command::Replay(_) => "replay",
        }
    }
}

impl GraphArgs {
    fn load(&self, run: &mut manifest::Run) -> Result<MultiplexGraph> {
        run.note_input(&self.input)?;
        if let Some(a) = &self.attrs {
            run.note_input(a)?;
        }
        let (g, _) = run.stage("load", || {
            load_graph(&self.input, self.attrs.as_deref(), !self.undirected, self.format.into())
        })?;
        Ok(g)
    }
}

fn mrk_env() -> BTreeMap<String, String> {
    std::env::vars().filter(|(k, _)| k.starts_with("MRK_")).collect()
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit status: 0 on success, 2 on usage errors, 1 otherwise.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    match execute(&argv) {
        Ok(_) => 0,
        Err(Failure::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(Failure::Mrk(e)) => {
            eprintln!("mrk: {e}");
            match e {
                Error::Usage(_) => 2,
                _ => 1,
            }
        }
    }
}

enum Failure {
    Clap(clap::Error),
    Mrk(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Mrk(e)
    }
}

/// Runs one command; the manifest is returned for commands that write one.
fn execute(argv: &[String]) -> std::result::Result<Option<RunManifest>, Failure> {
    let cli = Cli::try_parse_from(argv).map_err(Failure::Clap)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let env = mrk_env();
    let rest = argv.iter().skip(1).cloned().collect();
    let mut run = manifest::Run::new(cli.command.name(), rest, env);
    let result = pool.install(|| commands::dispatch(&cli.command, &mut run));
    match result? {
        commands::Outcome::Written => Ok(Some(run.finish()?)),
        commands::Outcome::Printed => Ok(None),
        commands::Outcome::Replayed => Ok(None),
    }
}

/// Re-runs the command recorded in `manifest` under its recorded `MRK_*`
/// environment and checks every output digest.
pub fn replay(manifest: &Path) -> Result<()> {
    let text = manifest::read(manifest)?;
    let m: RunManifest =
        serde_json::from_slice(&text).map_err(|e| Error::format("manifest", e))?;
    for (path, digest) in &m.inputs {
        let now = sha256_hex(&manifest::read(Path::new(path))?);
        if &now != digest {
            return Err(Error::Evaluation(format!("input {path} changed since the recorded run")));
        }
    }
    let saved = mrk_env();
    for k in saved.keys() {
        std::env::remove_var(k);
    }
    for (k, v) in &m.env {
        std::env::set_var(k, v);
    }
    let mut argv = vec!["mrk".to_string()];
    argv.extend(m.argv.iter().cloned());
    let result = execute(&argv);
    for k in m.env.keys() {
        std::env::remove_var(k);
    }
    for (k, v) in &saved {
        std::env::set_var(k, v);
    }
    let fresh = match result {
        Ok(Some(fresh)) => fresh,
        Ok(None) => return Err(Error::Usage("recorded command writes no manifest".into())),
        Err(Failure::Clap(e)) => return Err(Error::Usage(e.to_string())),
        Err(Failure::Mrk(e)) => return Err(e),
    };
    if fresh.outputs != m.outputs {
        let differing: Vec<&String> = m
            .outputs
            .iter()
            .filter(|(p, d)| fresh.outputs.get(*p) != Some(d))
            .map(|(p, _)| p)
            .collect();
        return Err(Error::Evaluation(format!(
            "replayed outputs differ from the recorded run: {differing:?}"
        )));
    }
    Ok(())
}
