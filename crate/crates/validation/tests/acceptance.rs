#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::time::Instant;

use common::*;
use mrk::baselines::{ensemble, Classical, EnsembleMode};
use mrk::eval::{
    candidates, evaluate_old_new, individual_tables, kendall_tau_b, roc_auc, split_random, EvalSplit,
    NegativeMode, PipelineConfig,
};
use mrk::graph::{collapse_to_layer, from_coupled, load_graph, to_coupled, CoupledMultigraph, EdgeFormat, GraphBuilder, MultiplexGraph};
use mrk::miner::{min_image_support, mine, MinerConfig};
use mrk::predictor::{score_links, score_old_new, Weighting};
use mrk::rules::build_rules;
use mrk::synth::{generate, generate_growth, GrowthConfig, SynthConfig};

const AARHUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/aarhus.edges");
const FOLDS: usize = 10;
const SEED: u64 = 7;

const MAGMA_MIN_AUC: f64 = 0.85;
const SHARMA_TARGET: f64 = 0.800;
const CLASSICAL_TARGET: [(Classical, f64); 5] = [
    (Classical::Ra, 0.772),
    (Classical::Aa, 0.770),
    (Classical::Cn, 0.759),
    (Classical::Pa, 0.567),
    (Classical::Ja, 0.771),
];
const BASELINE_TOLERANCE: f64 = 0.05;
const MIN_DIP: f64 = 0.05;
const MIN_SIZE_GAIN: f64 = 0.2;
const MIN_RULE_RATIO: f64 = 5.0;
const MIN_KENDALL: f64 = 0.9;
const MIN_GROWTH_AUC: f64 = 0.7;
const AUC_EPS: f64 = 1e-12;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn aarhus() -> MultiplexGraph {
    load_graph(Path::new(AARHUS), None, false, EdgeFormat::Plain).unwrap().0
}

/// The hosts of the mining comparison.
fn mining_runs() -> Vec<(MultiplexGraph, usize, usize)> {
    (0..50u64)
        .map(|seed| {
            let directed = seed % 2 == 1;
            let layers = 1 + (seed as usize % 3);
            let attrs = 1 + (seed as usize / 2) % 2;
            let n = 8 + (seed as usize % 5);
            let p = if directed { 0.08 } else { 0.14 } / layers as f64 * 1.5;
            let sigma = 1 + (seed as usize / 3) % 3;
            let s = 2 + (seed as usize / 5) % 3;
            (random_host(1000 + seed, n, layers, p, attrs, directed), sigma, s)
        })
        .collect()
}

fn miner_criteria() -> Vec<Outcome> {
    let start = Instant::now();
    let (mut mismatched, mut patterns, mut pairs, mut violations) = (0, 0, 0, 0);
    for (g, sigma, s) in mining_runs() {
        let set = mine(&g, &MinerConfig::new(sigma, s).unwrap()).unwrap();
        let got = mined_forms(&set);
        if got != exhaustive_mine(&g, sigma, s) {
            mismatched += 1;
        }
        patterns += got.len();
        for p in set.iter() {
            let edges = edges_of(p);
            for i in 0..edges.len() {
                let Some((a, e, _)) = remove_edge(p.attrs(), &edges, i) else { continue };
                pairs += 1;
                match got.get(&canon(g.is_directed(), &a, &e)) {
                    Some(&parent) if parent >= p.support() => {}
                    _ => violations += 1,
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    vec![
        Outcome {
            id: "1",
            pass: mismatched == 0 && secs < 60.0,
            detail: format!("50 hosts, {patterns} patterns, {mismatched} mismatched, {secs:.1}s (limit 60s)"),
        },
        Outcome {
            id: "3",
            pass: violations == 0 && pairs > 0,
            detail: format!("{pairs} parent/child pairs, {violations} violations"),
        },
    ]
}

/// A directed 4-path x→y→z→x whose four occurrences map each pattern node
/// to three distinct host nodes.
fn mis_instance() -> Outcome {
    let occurrences = [[8, 5, 2, 1], [1, 3, 6, 8], [1, 3, 6, 9], [9, 7, 4, 1]];
    let role = ["x", "y", "z", "x"];
    let mut b = GraphBuilder::new(true);
    b.add_layer("l");
    for occ in occurrences {
        for (slot, node) in occ.iter().enumerate() {
            b.add_node(&node.to_string());
            b.set_attr(&node.to_string(), role[slot]);
        }
        for w in occ.windows(2) {
            b.add_edge(&w[0].to_string(), &w[1].to_string(), "l");
        }
    }
    let g = b.build();
    let v = g.vocab();
    let (x, y, z) = (v.attr_id("x").unwrap(), v.attr_id("y").unwrap(), v.attr_id("z").unwrap());
    let l = v.layer_id("l").unwrap();
    let edges = [(0, 1, l), (1, 2, l), (2, 3, l)];
    let p = pattern(true, &[x, y, z, x], &edges);
    let found = mrk::miner::embeddings(&p, &g).len();
    let support = min_image_support(&p, &g);
    let oracle = mis(true, &[x, y, z, x], &edges, &Host::of(&g));
    Outcome {
        id: "2",
        pass: found == 4 && support == 3 && oracle == 3,
        detail: format!("{found} embeddings, support {support} (oracle {oracle}, expected 3)"),
    }
}

fn magma_auc(sp: &EvalSplit, negatives: &[mrk::graph::Edge], sigma: usize, s: usize) -> (f64, usize) {
    let set = mine(&sp.train, &MinerConfig::new(sigma, s).unwrap()).unwrap();
    let rules = build_rules(&set, &sp.train);
    let table = score_links(&sp.train, &rules, Weighting::Conf);
    (roc_auc(&table, sp, negatives).unwrap().auc, rules.len())
}

fn synthetic_criteria() -> Vec<Outcome> {
    let mut below: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut above: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let (mut auc3, mut auc4, mut rules3, mut rules4) = (vec![], vec![], vec![], vec![]);
    for seed in 1..=5u64 {
        let g = generate(&SynthConfig { seed, ..SynthConfig::default() }).unwrap();
        let sp = &split_random(&g, FOLDS, seed).unwrap()[0];
        let neg = candidates(sp, NegativeMode::Full);
        let mut sizes: Vec<usize> = sp.train.layers().map(|l| sp.train.layer_node_count(l)).collect();
        sizes.sort();
        for (rank, &t) in sizes.iter().enumerate() {
            below.entry(rank).or_default().push(magma_auc(sp, &neg, t - 1, 4).0);
            above.entry(rank).or_default().push(magma_auc(sp, &neg, t + 1, 4).0);
        }
        let (a, r) = magma_auc(sp, &neg, 80, 3);
        auc3.push(a);
        rules3.push(r as f64);
        let (a, r) = magma_auc(sp, &neg, 80, 4);
        auc4.push(a);
        rules4.push(r as f64);
    }
    let dips: Vec<f64> = below.keys().map(|k| mean(&below[k]) - mean(&above[k])).collect();
    let gain = mean(&auc4) - mean(&auc3);
    let ratio = mean(&rules4) / mean(&rules3).max(1.0);
    vec![
        Outcome {
            id: "4",
            pass: dips.iter().all(|&d| d >= MIN_DIP),
            detail: format!(
                "AUC drop across each layer-size threshold, smallest layer first: {} (need >= {MIN_DIP} each)",
                dips.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>().join(" / ")
            ),
        },
        Outcome {
            id: "5",
            pass: gain >= MIN_SIZE_GAIN && ratio >= MIN_RULE_RATIO,
            detail: format!(
                "sigma 80: AUC s=3 {:.4}, s=4 {:.4}, gain {gain:.4} (need >= {MIN_SIZE_GAIN}); rules {:.0} vs {:.0}, ratio {ratio:.1} (need >= {MIN_RULE_RATIO})",
                mean(&auc3),
                mean(&auc4),
                mean(&rules3),
                mean(&rules4)
            ),
        },
    ]
}

/// Mean per-fold AUC of every individual predictor and both ensembles.
fn fold_aucs(g: &MultiplexGraph) -> BTreeMap<String, f64> {
    let cfg = PipelineConfig { seed: SEED, ..PipelineConfig::default() };
    let mut per: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for sp in split_random(g, FOLDS, SEED).unwrap() {
        let neg = candidates(&sp, NegativeMode::Full);
        let tables = individual_tables(&sp.train, &cfg).unwrap();
        let names = ["magma".to_string(), "sharma".to_string()].into_iter().chain(Classical::ALL.iter().map(|m| m.to_string()));
        for (name, t) in names.zip(&tables) {
            per.entry(name).or_default().push(roc_auc(t, &sp, &neg).unwrap().auc);
        }
        let mut cands: Vec<_> = sp.test_positives.iter().copied().collect();
        cands.extend(neg.iter().copied());
        let truth: HashSet<_> = sp.test_positives.iter().copied().collect();
        for mode in [EnsembleMode::Base, EnsembleMode::Over] {
            let r = ensemble(&tables, &cands, &truth, mode, SEED).unwrap();
            per.entry(format!("ensemble-{mode}")).or_default().push(roc_auc(&r.table, &sp, &neg).unwrap().auc);
        }
    }
    per.into_iter().map(|(k, v)| (k, mean(&v))).collect()
}

fn ensemble_outcome(id: &'static str, label: &str, aucs: &BTreeMap<String, f64>) -> Outcome {
    let over = aucs["ensemble-over"];
    let base = aucs["ensemble-base"];
    let (best_name, best) = aucs
        .iter()
        .filter(|(k, _)| !k.starts_with("ensemble"))
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    Outcome {
        id,
        pass: over >= base && over >= *best,
        detail: format!("{label}: over {over:.4}, base {base:.4}, best individual {best_name} {best:.4}"),
    }
}

fn aarhus_criteria(g: &MultiplexGraph) -> Vec<Outcome> {
    let mut out = Vec::new();
    let start = Instant::now();
    let multiplex = fold_aucs(g);
    let secs = start.elapsed().as_secs_f64();
    let magma = multiplex["magma"];
    out.push(Outcome {
        id: "6",
        pass: magma >= MAGMA_MIN_AUC && secs < 600.0,
        detail: format!("Aarhus {FOLDS}-fold mean AUC {magma:.4} (need >= {MAGMA_MIN_AUC}), {secs:.1}s for all predictors (limit 600s)"),
    });
    let sharma = multiplex["sharma"];
    out.push(Outcome {
        id: "7a",
        pass: (sharma - SHARMA_TARGET).abs() <= BASELINE_TOLERANCE,
        detail: format!("Sharma on Aarhus {sharma:.4} (target {SHARMA_TARGET} +/- {BASELINE_TOLERANCE})"),
    });

    let collapsed = collapse_to_layer(g, "all");
    let single = fold_aucs(&collapsed);
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, target) in CLASSICAL_TARGET {
        let got = single[&m.to_string()];
        ok &= (got - target).abs() <= BASELINE_TOLERANCE;
        parts.push(format!("{m} {got:.4} (target {target})"));
    }
    out.push(Outcome {
        id: "7b",
        pass: ok,
        detail: format!("classical on collapsed Aarhus, tolerance +/- {BASELINE_TOLERANCE}: {}", parts.join(", ")),
    });
    out.push(ensemble_outcome("8a", "Aarhus multiplex", &multiplex));
    out.push(ensemble_outcome("8b", "Aarhus collapsed", &single));
    out
}

fn concordance_and_memory(g: &MultiplexGraph) -> Vec<Outcome> {
    let cfg = PipelineConfig::default();
    let rules = cfg.rules(g).unwrap();
    let count = score_links(g, &rules, Weighting::Count);
    let conf = score_links(g, &rules, Weighting::Conf);
    let keys: Vec<_> = count.iter().map(|(e, _)| e).collect();
    let x: Vec<f64> = keys.iter().map(|&e| count.score(e)).collect();
    let y: Vec<f64> = keys.iter().map(|&e| conf.score(e)).collect();
    let tau = kendall_tau_b(&x, &y);

    let n = g.node_count();
    let pairs = if g.is_directed() { n * (n - 1) } else { n * (n - 1) / 2 };
    let full = pairs * g.layer_count() - g.edge_count();
    vec![
        Outcome {
            id: "9",
            pass: tau >= MIN_KENDALL,
            detail: format!("Kendall tau-b count vs conf over {} scored links: {tau:.4} (need >= {MIN_KENDALL})", keys.len()),
        },
        Outcome {
            id: "13",
            pass: conf.len() < full,
            detail: format!("Aarhus: {} scored links vs {full} candidates in the full negative enumeration", conf.len()),
        },
    ]
}

fn growth_criterion() -> Outcome {
    let mut aucs = Vec::new();
    for seed in 1..=5u64 {
        let (train, test) = generate_growth(&GrowthConfig { seed, ..GrowthConfig::default() }).unwrap();
        let sp = EvalSplit::from_snapshots(train, &test);
        let set = mine(&sp.train, &MinerConfig::new(5, 4).unwrap()).unwrap();
        let rules = build_rules(&set, &sp.train);
        let table = score_old_new(&sp.train, &rules, Weighting::Conf);
        aucs.push(evaluate_old_new(&table, &sp).unwrap().auc);
    }
    Outcome {
        id: "10",
        pass: aucs.iter().all(|&a| a > MIN_GROWTH_AUC),
        detail: format!(
            "Pardus unavailable; synthetic growth old-new AUC per seed {} (mean {:.4}, need > {MIN_GROWTH_AUC})",
            aucs.iter().map(|a| format!("{a:.4}")).collect::<Vec<_>>().join(" "),
            mean(&aucs)
        ),
    }
}

fn auc_oracle() -> Outcome {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let n = if i < 2 { 10_000 } else { rng.gen_range(2..=10_000) };
        let levels = rng.gen_range(2..=1000);
        let mut labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
        labels[0] = true;
        labels[1] = false;
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64 / levels as f64).collect();
        let got = mrk::eval::auc(&scores, &labels).unwrap();
        worst = worst.max((got - mann_whitney(&scores, &labels)).abs());
    }
    Outcome {
        id: "11",
        pass: worst <= AUC_EPS,
        detail: format!("20 sets up to 10^4 items, max |AUC - Mann-Whitney| = {worst:.2e} (limit {AUC_EPS:e})"),
    }
}

fn round_trip(g: &MultiplexGraph) -> bool {
    let cg = to_coupled(g);
    let Ok(back) = from_coupled(&cg) else { return false };
    let Ok(parsed) = CoupledMultigraph::from_json(&cg.to_json()) else { return false };
    back == *g && from_coupled(&parsed).is_ok_and(|h| h == *g)
}

fn round_trip_criterion(g: &MultiplexGraph) -> Outcome {
    let random_ok = (0..100u64)
        .filter(|&seed| {
            let h = random_host(5000 + seed, 5 + (seed as usize % 20), 1 + (seed as usize % 4), 0.2, 1 + (seed as usize % 3), seed % 2 == 0);
            round_trip(&h)
        })
        .count();
    let aarhus_ok = round_trip(g);
    Outcome {
        id: "12",
        pass: aarhus_ok && random_ok == 100,
        detail: format!("Aarhus {}, random graphs {random_ok}/100 (other real datasets unavailable)", if aarhus_ok { "ok" } else { "differs" }),
    }
}

fn main() {
    let start = Instant::now();
    let g = aarhus();
    let mut outcomes = Vec::new();
    outcomes.extend(miner_criteria());
    outcomes.push(mis_instance());
    outcomes.extend(synthetic_criteria());
    outcomes.extend(aarhus_criteria(&g));
    outcomes.extend(concordance_and_memory(&g));
    outcomes.push(growth_criterion());
    outcomes.push(auc_oracle());
    outcomes.push(round_trip_criterion(&g));
    outcomes.sort_by_key(|o| {
        let digits: String = o.id.chars().take_while(char::is_ascii_digit).collect();
        (digits.parse::<u32>().unwrap(), o.id)
    });

    println!();
    for o in &outcomes {
        println!("{} criterion {:<3} {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "\nacceptance: {} passed, {failed} failed, {:.1}s\n",
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
