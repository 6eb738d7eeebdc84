use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use log::{info, warn};
use serde::Serialize;

use super::manifest::{manifest_for, Run};
use super::*;
use crate::baselines::{ensemble, sharma_scores};
use crate::eval::{
    candidates, classical_multiplex, evaluate_old_new, labelled_scores, old_new_keys, roc_auc, roc_csv,
    score_split, score_split_old_new, split_random, EvalReport, EvalSplit, FoldSummary, PipelineConfig,
};
use crate::graph::{from_coupled, load_graph_pair, to_coupled, write_attributes, write_edges, CoupledMultigraph, Edge};
use crate::miner::{mine_with_stats, patterns_from_json, patterns_to_json, patterns_to_lg, MinerConfig};
use crate::predictor::{score_links_with, score_old_new_with, PredictOptions, ScoreTable};
use crate::rules::{build_rules, rules_from_json, rules_to_json, Rule, RuleFilter, RuleSet};
use crate::synth::{generate, SynthConfig};

pub(super) enum Outcome {
    Written,
    Printed,
    Replayed,
}

pub(super) fn dispatch(cmd: &Command, run: &mut Run) -> Result<Outcome> {
    match cmd {
        Command::Mine(a) => mine_cmd(a, run),
        Command::Rules(a) => rules_cmd(a, run),
        Command::Predict(a) => predict_cmd(a, run),
        Command::Baseline(a) => baseline_cmd(a, run),
        Command::Ensemble(a) => ensemble_cmd(a, run),
        Command::Evaluate(a) => evaluate_cmd(a, run),
        Command::GenSynth(a) => gen_synth_cmd(a, run),
        Command::Transform(a) => transform_cmd(a, run),
        Command::Inspect(a) => inspect_cmd(a, run),
        Command::Replay(a) => {
            replay(&a.manifest)?;
            info!("outputs of {} reproduced", a.manifest.display());
            Ok(Outcome::Replayed)
        }
    }
}

fn text(run: &mut Run, path: &Path) -> Result<String> {
    let bytes = run.input(path)?;
    String::from_utf8(bytes).map_err(|_| Error::format("input", format!("{} is not UTF-8", path.display())))
}

fn written(run: &mut Run, out: &Path, bytes: Vec<u8>) -> Outcome {
    run.output(out.to_path_buf(), bytes);
    run.manifest_at(manifest_for(out));
    Outcome::Written
}

fn miner_config(m: &MiningArgs, g: &MultiplexGraph) -> Result<MinerConfig> {
    PipelineConfig {
        support: m.support,
        max_size: m.max_size,
        budget: m.budget,
        ..PipelineConfig::default()
    }
    .miner_config(g)
}

fn mine_cmd(a: &MineArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    let g = a.graph.load(run)?;
    let cfg = miner_config(&a.mining, &g)?;
    run.set_param("resolved_support", cfg.min_support);
    let (set, stats) = run.stage("mine", || mine_with_stats(&g, &cfg))?;
    info!(
        "{} frequent patterns (per level {:?}), {} pruned by sub-pattern checks",
        set.len(),
        stats.frequent,
        stats.apriori_pruned
    );
    let body = if a.out.extension().is_some_and(|e| e == "lg") {
        patterns_to_lg(&set, g.vocab())
    } else {
        patterns_to_json(&set, g.vocab())
    };
    Ok(written(run, &a.out, body.into_bytes()))
}

fn rule_filter(f: &RuleFilterArgs, g: &MultiplexGraph) -> Result<RuleFilter> {
    let layer = match &f.layer {
        Some(name) => Some(
            g.vocab()
                .layer_id(name)
                .ok_or_else(|| Error::Usage(format!("unknown layer `{name}`")))?,
        ),
        None => None,
    };
    Ok(RuleFilter {
        min_confidence: f.min_conf,
        min_lift: f.min_lift,
        layer,
    })
}

fn rules_cmd(a: &RulesArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    let g = a.graph.load(run)?;
    let patterns = patterns_from_json(&text(run, &a.patterns)?, g.is_directed(), g.vocab())?;
    let filter = rule_filter(&a.filter, &g)?;
    let rules = run.stage("rules", || build_rules(&patterns, &g)).filtered(&filter);
    info!("{} rules from {} patterns", rules.len(), patterns.len());
    Ok(written(run, &a.out, rules_to_json(&rules, g.vocab()).into_bytes()))
}

fn load_rules(run: &mut Run, path: &Path, g: &MultiplexGraph) -> Result<RuleSet> {
    rules_from_json(&text(run, path)?, g.is_directed(), g.vocab())
}

fn predict_cmd(a: &PredictArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    let g = a.graph.load(run)?;
    let rules = load_rules(run, &a.rules, &g)?;
    let opts = PredictOptions {
        per_embedding: a.per_embedding,
        provenance: false,
    };
    let body = if a.old_new {
        let t = run.stage("predict", || score_old_new_with(&g, &rules, a.weighting, opts));
        info!("{} old-new keys scored", t.len());
        t.to_csv(g.vocab())
    } else {
        let t = run.stage("predict", || score_links_with(&g, &rules, a.weighting, opts));
        info!("{} candidate links scored", t.len());
        t.to_csv(g.vocab())
    };
    Ok(written(run, &a.out, body.into_bytes()))
}

fn baseline_table(method: Predictor, g: &MultiplexGraph) -> Result<ScoreTable> {
    match method {
        Predictor::Sharma => Ok(sharma_scores(g)),
        Predictor::Classical(m) => Ok(classical_multiplex(g, m)),
        other => Err(Error::Usage(format!(
            "`{other}` is not a baseline (sharma, cn, aa, ra, pa, ja)"
        ))),
    }
}

fn baseline_cmd(a: &BaselineArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    let g = a.graph.load(run)?;
    let t = run.stage("score", || baseline_table(a.method, &g))?;
    info!("{} candidate links scored", t.len());
    Ok(written(run, &a.out, t.to_csv(g.vocab()).into_bytes()))
}

fn load_pair(run: &mut Run, graph: &GraphArgs, test: &Path) -> Result<EvalSplit> {
    run.note_input(&graph.input)?;
    run.note_input(test)?;
    if let Some(p) = &graph.attrs {
        run.note_input(p)?;
    }
    let (train, later, _) = run.stage("load", || {
        load_graph_pair(&graph.input, test, graph.attrs.as_deref(), !graph.undirected, graph.format.into())
    })?;
    Ok(EvalSplit::from_snapshots(train, &later))
}

fn ensemble_cmd(a: &EnsembleArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    run.seed(a.seed);
    let split = load_pair(run, &a.graph, &a.test)?;
    let g = &split.train;
    let mut tables = Vec::new();
    for p in &a.scores {
        let tag = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        tables.push(ScoreTable::from_csv(&text(run, p)?, g.is_directed(), &tag, g.vocab())?);
    }
    let mut cands: Vec<Edge> = split.test_positives.iter().copied().collect();
    cands.extend(candidates(&split, a.negatives));
    let truth: HashSet<Edge> = split.test_positives.iter().copied().collect();
    let result = run.stage("ensemble", || ensemble(&tables, &cands, &truth, a.mode, a.seed))?;
    info!("weights {:?}, AUC {:.4}", result.weights, result.auc);
    run.set_param("weights", &result.weights);
    Ok(written(run, &a.out, result.table.to_csv(g.vocab()).into_bytes()))
}

#[derive(Serialize)]
struct EvaluationSummary<'a> {
    predictor: String,
    weighting: String,
    old_new: bool,
    folds: &'a [EvalReport],
    summary: FoldSummary,
}

fn evaluate_cmd(a: &EvaluateArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    run.seed(a.seed);
    if a.old_new && (a.predictor != Predictor::Magma || a.test.is_none()) {
        return Err(Error::Usage("--old-new needs --predictor magma and a --test snapshot".into()));
    }
    let splits = match &a.test {
        Some(test) => vec![load_pair(run, &a.graph, test)?],
        None => {
            let g = a.graph.load(run)?;
            run.stage("split", || split_random(&g, a.folds, a.seed))?
        }
    };
    let cfg = PipelineConfig {
        support: a.mining.support,
        max_size: a.mining.max_size,
        budget: a.mining.budget,
        weighting: a.weighting,
        seed: a.seed,
    };
    let mut reports = Vec::new();
    let (mut pooled_s, mut pooled_y) = (Vec::new(), Vec::new());
    for split in &splits {
        let stage = format!("fold {}", split.fold);
        let report = run.stage(&stage, || -> Result<EvalReport> {
            if a.old_new {
                let table = score_split_old_new(split, &cfg)?;
                let (all, positive) = old_new_keys(split);
                pooled_s.extend(all.iter().map(|&k| table.score(k)));
                pooled_y.extend(all.iter().map(|k| positive.contains(k)));
                evaluate_old_new(&table, split)
            } else {
                let mode = match a.negatives {
                    NegativeMode::Sampled { k, .. } => NegativeMode::Sampled {
                        k,
                        seed: a.seed.wrapping_add(split.fold as u64),
                    },
                    m => m,
                };
                let negatives = candidates(split, mode);
                let table = score_split(a.predictor, split, &negatives, &cfg)?;
                let (s, y) = labelled_scores(&table, split, &negatives);
                pooled_s.extend(s);
                pooled_y.extend(y);
                let mut r = roc_auc(&table, split, &negatives)?;
                r.predictor = a.predictor.to_string();
                Ok(r)
            }
        })?;
        info!("fold {}: AUC {:.4} ({} positives, {} negatives)", report.fold, report.auc, report.positives, report.negatives);
        reports.push(report);
    }
    let per_fold: Vec<f64> = reports.iter().map(|r| r.auc).collect();
    let summary = FoldSummary::new(a.predictor.to_string(), per_fold, &pooled_s, &pooled_y)?;
    info!("mean AUC {:.4}, pooled {:.4}", summary.mean, summary.pooled);

    for r in &reports {
        run.output(a.out.join(format!("roc_fold{}.csv", r.fold)), roc_csv(&r.roc).into_bytes());
    }
    let mut auc_csv = String::from("fold,auc\n");
    for r in &reports {
        let _ = writeln!(auc_csv, "{},{}", r.fold, r.auc);
    }
    run.output(a.out.join("auc.csv"), auc_csv.into_bytes());
    let body = EvaluationSummary {
        predictor: a.predictor.to_string(),
        weighting: a.weighting.to_string(),
        old_new: a.old_new,
        folds: &reports,
        summary,
    };
    let json = serde_json::to_string_pretty(&body).expect("summary serializes");
    run.output(a.out.join("summary.json"), json.into_bytes());
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    run.manifest_at(a.out.join("manifest.json"));
    Ok(Outcome::Written)
}

fn gen_synth_cmd(a: &GenSynthArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    run.seed(a.seed);
    let cfg = SynthConfig {
        layer_sizes: a.sizes.clone(),
        communities: a.communities.clone(),
        p_in: a.pin,
        p_out: a.pout,
        seed: a.seed,
    };
    let g = run.stage("generate", || generate(&cfg))?;
    info!("{} edges over {} layers", g.edge_count(), g.layer_count());
    Ok(written(run, &a.out, write_edges(&g).into_bytes()))
}

fn transform_cmd(a: &TransformArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    match a.to {
        TransformTarget::Coupled => {
            let g = a.graph.load(run)?;
            let cg = run.stage("transform", || to_coupled(&g));
            Ok(written(run, &a.out, cg.to_json().into_bytes()))
        }
        TransformTarget::Multiplex => {
            let cg = CoupledMultigraph::from_json(&text(run, &a.graph.input)?)?;
            let g = run.stage("transform", || from_coupled(&cg))?;
            let attrs = write_attributes(&g);
            match &a.attrs_out {
                Some(p) => run.output(p.clone(), attrs.into_bytes()),
                None if !attrs.is_empty() => warn!("node attributes dropped; pass --attrs-out to keep them"),
                None => {}
            }
            Ok(written(run, &a.out, write_edges(&g).into_bytes()))
        }
    }
}

/// Rules by decreasing lift; undefined lift last.
fn by_lift(rules: &RuleSet) -> Vec<&Rule> {
    let mut v: Vec<&Rule> = rules.iter().collect();
    v.sort_by(|a, b| {
        let key = |r: &Rule| r.lift.unwrap_or(f64::NEG_INFINITY);
        key(b)
            .total_cmp(&key(a))
            .then(b.confidence.total_cmp(&a.confidence))
            .then_with(|| a.consequent.code().cmp(b.consequent.code()))
    });
    v
}

fn inspect_cmd(a: &InspectArgs, run: &mut Run) -> Result<Outcome> {
    run.params(a);
    let g = a.graph.load(run)?;
    let rules = load_rules(run, &a.rules, &g)?.filtered(&rule_filter(&a.filter, &g)?);
    let vocab = g.vocab();
    let mut out = String::from("lift\tconfidence\tantecedent\tconsequent\tdelta\n");
    for r in by_lift(&rules) {
        let lift = r.lift.map_or("undefined".to_string(), |l| format!("{l:.4}"));
        let d = r.delta_edge;
        let arrow = if g.is_directed() { '>' } else { '-' };
        let _ = writeln!(
            out,
            "{lift}\t{:.4}\t{}\t{}\t{}{arrow}{}:{}",
            r.confidence,
            r.antecedent.code_string(vocab),
            r.consequent.code_string(vocab),
            d.src,
            d.dst,
            vocab.layer_name(d.layer)
        );
    }
    match &a.out {
        Some(p) => Ok(written(run, p, out.into_bytes())),
        None => {
            print!("{out}");
            Ok(Outcome::Printed)
        }
    }
}
