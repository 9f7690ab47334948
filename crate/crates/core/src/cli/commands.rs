use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::json;

use super::args::*;
use super::RunManifest;
use crate::baselines::{read_scores, tune_baseline, write_scores, BaselineMethod};
use crate::corpus::{default_stopwords, normalize_and_tokenize, read_artifacts, read_stopwords, write_artifacts, Vocabulary, UNK_TOKEN};
use crate::datasets::{
    enlarge_training, generate_synthetic, load_dataset, read_splits, split_pairs, write_links, write_splits, Pair, SplitName,
    SplitSpec, Splits, SynthConfig, TraceDataset,
};
use crate::embedding::{train_skipgram_logged, EmbeddingTable, SgnsConfig};
use crate::error::{Error, Result};
use crate::evaluation::{compare_methods, mean_average_precision, pr_curve_exact, ranked_lists, write_curves, write_metrics, write_stats};
use crate::rnn::trace_layer_gates;
use crate::tracenet::{read_checkpoint, write_checkpoint, Checkpoint, NetworkConfig};
use crate::training::{grid_search, read_search_space, score_pairs, train_observed, write_grid_report, write_run_log, SearchSpace};

/// Optional JSON configuration; each section overrides built-in defaults
/// and is in turn overridden by flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub sgns: Option<SgnsConfig>,
    pub network: Option<NetworkConfig>,
    pub synth: Option<SynthConfig>,
}

impl FileConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
    }
}

pub struct Context {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub file: FileConfig,
    pub config_path: Option<PathBuf>,
}

impl Context {
    fn manifest(&self, subcommand: &str, config: serde_json::Value) -> Result<RunManifest> {
        let mut m = RunManifest::new(subcommand, self.seed, config);
        if let Some(p) = &self.config_path {
            m.add_input(p)?;
        }
        Ok(m)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn finish(&self, mut manifest: RunManifest, outputs: &[&str]) -> Result<()> {
        for name in outputs {
            manifest.add_output(&self.out_dir, name)?;
            eprintln!("wrote {}", self.path(name).display());
        }
        manifest.write(&self.out_dir)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_lines(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(normalize_and_tokenize).filter(|t| !t.is_empty()).collect())
}

fn load(data: &DatasetArgs, ctx: &Context, manifest: &mut RunManifest) -> Result<(TraceDataset, Splits)> {
    let (dataset, report) = load_dataset(&data.artifacts, &data.links)?;
    for w in report.warnings() {
        eprintln!("warning: {w}");
    }
    manifest.add_input(&data.artifacts)?;
    manifest.add_input(&data.links)?;
    let splits = match &data.splits {
        Some(p) => {
            manifest.add_input(p)?;
            read_splits(p, &dataset)?
        }
        None => split_pairs(&dataset, &SplitSpec::standard(ctx.seed))?,
    };
    let (tr, dv, te) = splits.link_counts(&dataset);
    eprintln!(
        "{} sources, {} targets, {} links; links per split train {tr} dev {dv} test {te}",
        dataset.sources.len(),
        dataset.targets.len(),
        dataset.num_links()
    );
    Ok((dataset, splits))
}

pub fn corpus_build(args: &CorpusBuildArgs, ctx: &Context) -> Result<()> {
    let mut m = ctx.manifest("corpus-build", json!({ "min_count": args.min_count }))?;
    let artifacts = read_artifacts(&args.artifacts)?;
    m.add_input(&args.artifacts)?;
    let mut lines: Vec<Vec<String>> = artifacts.iter().map(|a| a.tokens.clone()).filter(|t| !t.is_empty()).collect();
    if let Some(p) = &args.corpus {
        lines.extend(read_lines(p)?);
        m.add_input(p)?;
    }
    let vocab = Vocabulary::build(&lines, args.min_count)?;
    write_file(&ctx.path("vocab.tsv"), &vocab.to_tsv())?;
    let corpus: String = lines.iter().map(|l| l.join(" ") + "\n").collect();
    write_file(&ctx.path("corpus.txt"), &corpus)?;
    eprintln!("{} sentences, {} vocabulary entries", lines.len(), vocab.len());
    ctx.finish(m, &["vocab.tsv", "corpus.txt"])
}

pub fn embed(args: &EmbedArgs, ctx: &Context) -> Result<()> {
    let mut cfg = ctx.file.sgns.clone().unwrap_or_default();
    if let Some(v) = args.dim {
        cfg.dim = v;
    }
    if let Some(v) = args.window {
        cfg.window = v;
    }
    if let Some(v) = args.negatives {
        cfg.negatives = v;
    }
    if let Some(v) = args.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = args.learning_rate {
        cfg.learning_rate = v;
    }
    let mut m = ctx.manifest("embed", json!({ "sgns": cfg, "min_count": args.min_count }))?;
    let corpus = read_lines(&args.corpus)?;
    m.add_input(&args.corpus)?;
    let vocab = match &args.vocab {
        Some(p) => {
            m.add_input(p)?;
            Vocabulary::from_tsv(&std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?)?
        }
        None => Vocabulary::build(&corpus, args.min_count)?,
    };
    let (table, losses) = train_skipgram_logged(&corpus, &vocab, &cfg, ctx.seed)?;
    for (e, l) in losses.iter().enumerate() {
        eprintln!("epoch {} loss {l:.6}", e + 1);
    }
    table.freeze().write_text(&ctx.path("embeddings.txt"))?;
    let mut log = String::from("epoch,loss\n");
    for (e, l) in losses.iter().enumerate() {
        writeln!(log, "{},{l}", e + 1).unwrap();
    }
    write_file(&ctx.path("embed_log.csv"), &log)?;
    ctx.finish(m, &["embeddings.txt", "embed_log.csv"])
}

fn network_config(args: &NetworkArgs, base: Option<&NetworkConfig>) -> Result<NetworkConfig> {
    let mut c = base.cloned().unwrap_or_default();
    if let Some(v) = &args.cell {
        c.cell = v.parse()?;
    }
    if args.bidirectional {
        c.bidirectional = true;
    }
    macro_rules! set {
        ($($f:ident => $g:ident),*) => {$( if let Some(v) = args.$f { c.$g = v; } )*};
    }
    set!(layers => layers, hidden => hidden, integration_dim => integration, lr => lr, gc => gc, lambda => lambda, epochs => epochs, batch_size => batch_size);
    c.validate()?;
    Ok(c)
}

fn read_embeddings(path: &Path, m: &mut RunManifest) -> Result<EmbeddingTable> {
    m.add_input(path)?;
    EmbeddingTable::read_text(path)
}

pub fn train(args: &TrainArgs, ctx: &Context) -> Result<()> {
    let config = network_config(&args.network, ctx.file.network.as_ref())?;
    let mut m = ctx.manifest("train", json!({ "network": config, "train_fraction": args.train_fraction }))?;
    let (dataset, mut splits) = load(&args.data, ctx, &mut m)?;
    if let Some(f) = args.train_fraction {
        splits = enlarge_training(&dataset, &splits, f, ctx.seed)?;
        eprintln!("training split enlarged to {} pairs", splits.train.len());
    }
    let emb = read_embeddings(&args.embeddings, &mut m)?;
    let run = train_observed(&config, &dataset, &splits, &emb, ctx.seed, |r, _| {
        eprintln!(
            "epoch {} train {:.6} dev {:.6} lr {:.6}",
            r.epoch + 1,
            r.train_loss,
            r.dev_loss,
            r.learning_rate
        )
    })?;
    let mut ckpt = Checkpoint::new(run.best.clone());
    ckpt.metadata = json!({
        "best_epoch": run.best_epoch.map(|e| e + 1),
        "dev_loss": run.best_dev_loss(),
        "seed": ctx.seed,
    });
    write_checkpoint(&ctx.path("model.ckpt"), &ckpt)?;
    write_run_log(&ctx.path("run_log.csv"), &run)?;
    write_splits(&ctx.path("splits.csv"), &dataset, &splits)?;
    let scores = score_pairs(&run.best, &dataset, &splits.test, &emb)?;
    let method = args.method.clone().unwrap_or_else(|| config.encoder().label());
    write_scores(&ctx.path("scores.csv"), &dataset, &splits.test, &scores, &method)?;
    ctx.finish(m, &["model.ckpt", "run_log.csv", "splits.csv", "scores.csv"])
}

pub fn grid(args: &GridArgs, ctx: &Context) -> Result<()> {
    let space = match &args.space {
        Some(p) => read_search_space(p)?,
        None => SearchSpace::default(),
    };
    let seeds = if args.seeds.is_empty() { vec![ctx.seed] } else { args.seeds.clone() };
    let mut m = ctx.manifest("grid", json!({ "space": space, "seeds": seeds, "jobs": args.jobs }))?;
    if let Some(p) = &args.space {
        m.add_input(p)?;
    }
    let (dataset, splits) = load(&args.data, ctx, &mut m)?;
    let mut tables = BTreeMap::new();
    for spec in &args.embeddings {
        let (tag, path) = spec.split_once('=').unwrap_or(("default", spec));
        tables.insert(tag.to_string(), read_embeddings(Path::new(path), &mut m)?);
    }
    let n = space.configurations()?.len() * seeds.len();
    eprintln!("{n} training runs on {} threads", args.jobs.max(1));
    let result = grid_search(&space, &dataset, &splits, &tables, &seeds, args.jobs)?;
    write_grid_report(&ctx.path("grid_report.csv"), result.trained())?;
    write_grid_report(&ctx.path("grid_best.csv"), result.best_per_unit())?;
    let mut outputs = vec!["grid_report.csv", "grid_best.csv"];
    let failures: Vec<String> = result
        .failures()
        .map(|(r, why)| format!("{} seed {}: {why}", r.config.encoder().label(), r.seed))
        .collect();
    if !failures.is_empty() {
        for f in &failures {
            eprintln!("failed: {f}");
        }
        write_file(&ctx.path("grid_failures.txt"), &(failures.join("\n") + "\n"))?;
        outputs.push("grid_failures.txt");
    }
    if let Some(best) = result.trained().next().and_then(|r| r.run()) {
        write_checkpoint(&ctx.path("best.ckpt"), &Checkpoint::new(best.best.clone()))?;
        outputs.push("best.ckpt");
    }
    ctx.finish(m, &outputs)
}

pub fn eval(args: &EvalArgs, ctx: &Context) -> Result<()> {
    let split: SplitName = args.split.parse()?;
    let mut m = ctx.manifest("eval", json!({ "split": args.splits.as_ref().map(|_| split.to_string()) }))?;
    let (dataset, report) = load_dataset(&args.artifacts, &args.links)?;
    for w in report.warnings() {
        eprintln!("warning: {w}");
    }
    m.add_input(&args.artifacts)?;
    m.add_input(&args.links)?;
    let keep: Option<HashSet<Pair>> = match &args.splits {
        Some(p) => {
            m.add_input(p)?;
            Some(read_splits(p, &dataset)?.get(split).iter().copied().collect())
        }
        None => None,
    };

    let mut methods: Vec<(String, Vec<Pair>, Vec<f64>)> = Vec::new();
    for path in &args.scores {
        m.add_input(path)?;
        for (s, t, score, method) in read_scores(path)? {
            let pair = dataset.pair_of(&s, &t)?;
            if keep.as_ref().is_some_and(|k| !k.contains(&pair)) {
                continue;
            }
            let i = match methods.iter().position(|x| x.0 == method) {
                Some(i) => i,
                None => {
                    methods.push((method, Vec::new(), Vec::new()));
                    methods.len() - 1
                }
            };
            methods[i].1.push(pair);
            methods[i].2.push(score);
        }
    }
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no scored pairs to evaluate".into()));
    }

    let mut maps = Vec::new();
    let mut curves = Vec::new();
    for (name, pairs, scores) in &methods {
        let result = mean_average_precision(&ranked_lists(&dataset, pairs, scores)?)?;
        eprintln!("{name}: MAP {:.4} over {} queries", result.map, result.per_query.len());
        let scored: Vec<(f64, bool)> = pairs.iter().zip(scores).map(|(&p, &s)| (s, dataset.is_link(p))).collect();
        curves.push((name.clone(), pr_curve_exact(&scored)?));
        maps.push((name.clone(), result));
    }
    write_metrics(&ctx.path("metrics.csv"), &maps)?;
    write_curves(&ctx.path("curves.csv"), &curves)?;
    let mut outputs = vec!["metrics.csv", "curves.csv"];
    if maps.len() >= 2 {
        let groups: Vec<(String, Vec<f64>)> = maps.iter().map(|(n, r)| (n.clone(), r.aps())).collect();
        let stats = compare_methods(&groups)?;
        eprintln!("Kruskal-Wallis H {:.4} p {:.3e}", stats.kruskal_wallis.h, stats.kruskal_wallis.p_value);
        write_stats(&ctx.path("stats.txt"), &stats)?;
        outputs.push("stats.txt");
    }
    ctx.finish(m, &outputs)
}

pub fn baseline(args: &BaselineArgs, ctx: &Context) -> Result<()> {
    let methods = match args.method.to_ascii_lowercase().as_str() {
        "all" => vec![BaselineMethod::Vsm, BaselineMethod::Lsi],
        other => vec![other.parse()?],
    };
    if !(args.rank_fraction > 0.0 && args.rank_fraction <= 1.0) {
        return Err(Error::InvalidArgument("rank fraction must be in (0, 1]".into()));
    }
    let mut m = ctx.manifest("baseline", json!({ "rank_fraction": args.rank_fraction }))?;
    let (dataset, splits) = load(&args.data, ctx, &mut m)?;
    let stopwords = match &args.stopwords {
        Some(p) => {
            m.add_input(p)?;
            read_stopwords(p)?
        }
        None => default_stopwords(),
    };
    let mut rows = String::from("source_id,target_id,score,method\n");
    let mut chosen = serde_json::Map::new();
    for method in methods {
        let tuned = tune_baseline(&dataset, &splits.dev, method, &stopwords, args.rank_fraction)?;
        eprintln!(
            "{method}: stopwords {} stemming {} dev MAP {:.4}",
            tuned.options.stopwords, tuned.options.stem, tuned.dev_map
        );
        chosen.insert(
            method.to_string(),
            json!({ "stopwords": tuned.options.stopwords, "stem": tuned.options.stem, "dev_map": tuned.dev_map }),
        );
        let scores = tuned.model.score_pairs(&dataset, &splits.test)?;
        for (&p, s) in splits.test.iter().zip(scores) {
            let (a, b) = dataset.pair_ids(p);
            writeln!(rows, "{a},{b},{s},{method}").unwrap();
        }
    }
    m.config["selected"] = serde_json::Value::Object(chosen);
    write_file(&ctx.path("baseline_scores.csv"), &rows)?;
    write_splits(&ctx.path("splits.csv"), &dataset, &splits)?;
    ctx.finish(m, &["baseline_scores.csv", "splits.csv"])
}

pub fn gates(args: &GatesArgs, ctx: &Context) -> Result<()> {
    let mut m = ctx.manifest("gates", json!({ "dims": args.dims, "layer": args.layer }))?;
    m.add_input(&args.checkpoint)?;
    let network = read_checkpoint(&args.checkpoint)?.network;
    let emb = read_embeddings(&args.embeddings, &mut m)?;
    let mut tokens = match (&args.text, &args.artifacts, &args.artifact_id) {
        (Some(text), _, _) => normalize_and_tokenize(text),
        (None, Some(path), Some(id)) => {
            m.add_input(path)?;
            read_artifacts(path)?
                .into_iter()
                .find(|a| &a.id == id)
                .ok_or_else(|| Error::UnknownArtifact(id.clone()))?
                .tokens
        }
        _ => return Err(Error::InvalidArgument("give --text or --artifacts with --artifact-id".into())),
    };
    let inputs = emb.embed(&tokens);
    if tokens.is_empty() {
        tokens.push(UNK_TOKEN.to_string());
    }
    let trace = trace_layer_gates(&network.config.encoder(), &network.params.encoder, &inputs, args.layer, &args.dims)?;
    write_file(&ctx.path("gates.csv"), &trace.to_csv(&tokens))?;
    ctx.finish(m, &["gates.csv"])
}

pub fn synth(args: &SynthArgs, ctx: &Context) -> Result<()> {
    let mut cfg = ctx.file.synth.clone().unwrap_or_default();
    if let Some(v) = &args.mode {
        cfg.mode = v.parse()?;
    }
    macro_rules! set {
        ($($f:ident),*) => {$( if let Some(v) = args.$f { cfg.$f = v; } )*};
    }
    set!(n_sources, n_targets, density, vocab_size, corpus_lines, glossary_rate);
    cfg.seed = ctx.seed;
    let m = ctx.manifest("synth", json!({ "synth": cfg }))?;
    let bench = generate_synthetic(&cfg)?;
    let d = &bench.dataset;
    let all: Vec<_> = d.artifacts().cloned().collect();
    write_artifacts(&ctx.path("artifacts.jsonl"), &all)?;
    write_links(&ctx.path("links.csv"), &d.link_ids())?;
    write_file(&ctx.path("corpus.txt"), &bench.corpus.iter().map(|l| format!("{l}\n")).collect::<String>())?;
    write_file(&ctx.path("synth_manifest.json"), &(serde_json::to_string_pretty(&bench.manifest)? + "\n"))?;
    eprintln!(
        "{} sources, {} targets, {} links, {} corpus lines",
        d.sources.len(),
        d.targets.len(),
        d.num_links(),
        bench.corpus.len()
    );
    ctx.finish(m, &["artifacts.jsonl", "links.csv", "corpus.txt", "synth_manifest.json"])
}
