//! One function per subcommand. Each writes its artifacts under `out` with a
//! provenance header carrying the config hash and seed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use knowtraj::artifact::{read_recommendations_jsonl, recommendations_jsonl, recommendations_tsv, write_atomic};
use knowtraj::community::{aggregate_by_community, cross_distribution, CommunityAssignment};
use knowtraj::evaluation::{evaluate_methods, export_report, probe_auc, ProbeSet};
use knowtraj::ingest::{parse_jsonl, split_by_year, BiblioRecord, ParsedCorpus, RecordFormat};
use knowtraj::network::{NetworkStats, SemanticLayerConfig};
use knowtraj::scorer::{recommend_all_with, LinkScorer, ScorerRegistry, SemanticDiffusion};
use knowtraj::{selfcheck, BiLayerNetwork, Layer};
use serde_json::json;

use crate::config::RunConfig;

/// Provenance shared by every artifact of one run.
pub struct Provenance {
    pub command: &'static str,
    pub hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(command: &'static str, cfg: &RunConfig) -> Result<Self> {
        Ok(Provenance {
            command,
            hash: cfg.hash(command)?,
            seed: cfg.seed,
        })
    }

    pub fn header(&self) -> String {
        format!("knowtraj {} config={} seed={}", self.command, self.hash, self.seed)
    }

    fn meta(&self) -> serde_json::Value {
        json!({ "command": self.command, "config": self.hash, "seed": self.seed })
    }
}

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    Ok(&cfg.out)
}

fn write(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn load_records(cfg: &RunConfig) -> Result<ParsedCorpus> {
    if cfg.format != RecordFormat::JsonLines {
        bail!("this command needs JSON-lines records (--format jsonl)");
    }
    let corpus = parse_jsonl(cfg.input()?)?;
    log::info!(
        "parsed {} records ({} skipped, {} unidentifiable authors dropped)",
        corpus.records.len(),
        corpus.skipped,
        corpus.dropped_authors
    );
    Ok(corpus)
}

/// The network a single-network command works on: the whole corpus, or only
/// the records up to `--cutoff-year` when given. Also returns the records it
/// was built from (none for an edge-list import).
fn load_network(cfg: &RunConfig) -> Result<(BiLayerNetwork, Vec<BiblioRecord>)> {
    match cfg.format {
        RecordFormat::CsvEdges => Ok((BiLayerNetwork::read_csv_edges(cfg.input()?)?, Vec::new())),
        RecordFormat::JsonLines => {
            let mut records = load_records(cfg)?.records;
            if let Some(y) = cfg.cutoff_year {
                records.retain(|r| r.year <= y);
            }
            Ok((BiLayerNetwork::build(&records), records))
        }
    }
}

fn train_test(cfg: &RunConfig) -> Result<(BiLayerNetwork, BiLayerNetwork)> {
    let corpus = load_records(cfg)?;
    let split = split_by_year(&corpus.records, cfg.cutoff_year()?);
    if !split.is_evaluable() {
        bail!(
            "cutoff year {} leaves {} training and {} testing records; both must be non-empty",
            split.cutoff_year,
            split.train.len(),
            split.test.len()
        );
    }
    Ok((BiLayerNetwork::build(&split.train), BiLayerNetwork::build(&split.test)))
}

/// Built-in scorers, plus `semantic` when topic vectors are configured.
fn registry(cfg: &RunConfig, net: &BiLayerNetwork) -> Result<ScorerRegistry> {
    let mut reg = ScorerRegistry::with_builtin();
    if let Some(path) = &cfg.vectors {
        let layer = SemanticLayerConfig::read_vectors(path, cfg.similarity_floor)?;
        let semantic = net.with_semantic_layer(&layer)?;
        reg.register(Box::new(SemanticDiffusion::new(Arc::new(semantic))));
    }
    Ok(reg)
}

fn select<'a>(cfg: &RunConfig, reg: &'a ScorerRegistry, default: &[&str]) -> Result<Vec<&'a dyn LinkScorer>> {
    if cfg.methods.iter().any(|m| m == "semantic") && cfg.vectors.is_none() {
        bail!("method semantic needs topic vectors (--vectors)");
    }
    let names: Vec<String> = if cfg.methods.is_empty() {
        if default.is_empty() {
            reg.names().into_iter().map(str::to_owned).collect()
        } else {
            default.iter().map(|s| s.to_string()).collect()
        }
    } else {
        cfg.methods.clone()
    };
    Ok(reg.select(&names)?)
}

/// Rejects unknown method names before any expensive work.
pub fn check_methods(cfg: &RunConfig) -> Result<()> {
    let reg = ScorerRegistry::with_builtin();
    let mut known = reg.names();
    known.push("semantic");
    for m in &cfg.methods {
        if !known.contains(&m.as_str()) {
            bail!("unknown method `{m}` (expected one of {})", known.join(", "));
        }
    }
    Ok(())
}

pub fn ingest(cfg: &RunConfig) -> Result<()> {
    let prov = Provenance::new("ingest", cfg)?;
    let corpus = load_records(cfg)?;
    let years = corpus.records.iter().map(|r| r.year);
    let (min, max) = (years.clone().min(), years.max());
    let mut summary = json!({
        "meta": prov.meta(),
        "records": corpus.records.len(),
        "skipped": corpus.skipped,
        "dropped_authors": corpus.dropped_authors,
        "first_year": min,
        "last_year": max,
        "warnings": corpus.warnings,
    });
    println!(
        "records {}  skipped {}  dropped authors {}",
        corpus.records.len(),
        corpus.skipped,
        corpus.dropped_authors
    );
    if let Some(y) = cfg.cutoff_year {
        let split = split_by_year(&corpus.records, y);
        println!(
            "cutoff {y}: train {} ({:.1}%)  test {} ({:.1}%)",
            split.train.len(),
            split.train_pct(),
            split.test.len(),
            split.test_pct()
        );
        summary["split"] = json!({
            "cutoff_year": y,
            "train": split.train.len(),
            "test": split.test.len(),
        });
    }
    let dir = out_dir(cfg)?;
    write(&dir.join("ingest.json"), &format!("{}\n", serde_json::to_string_pretty(&summary)?))
}

pub fn build(cfg: &RunConfig) -> Result<()> {
    let prov = Provenance::new("build", cfg)?;
    let (net, records) = load_network(cfg)?;
    net.validate()?;
    let stats = NetworkStats::of(&net, &records);
    println!(
        "authors {}  topics {}  author edges {}  topic edges {}  author-topic edges {}",
        stats.author_nodes, stats.topic_nodes, stats.author_edges, stats.topic_edges, stats.author_topic_edges
    );
    let dir = out_dir(cfg)?;
    let net_dir = dir.join("network");
    fs::create_dir_all(&net_dir).with_context(|| format!("cannot create {}", net_dir.display()))?;
    net.write_tsv(&net_dir, Some(&prov.header()))?;
    let doc = json!({ "meta": prov.meta(), "stats": stats });
    write(&dir.join("stats.json"), &format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

pub fn recommend(cfg: &RunConfig) -> Result<()> {
    let prov = Provenance::new("recommend", cfg)?;
    if cfg.methods.len() > 1 {
        bail!("recommend takes a single --method");
    }
    let (net, _) = load_network(cfg)?;
    let reg = registry(cfg, &net)?;
    let scorer = select(cfg, &reg, &["diffusion"])?[0];
    let authors = net.author_labels().to_vec();
    let lists = recommend_all_with(scorer, &net, &authors, cfg.top_n, cfg.workers)?;
    let entries: usize = lists.iter().map(|l| l.entries.len()).sum();
    println!("{}: {} authors, {} recommendations", scorer.name(), lists.len(), entries);
    let meta = json!({ "command": prov.command, "config": prov.hash, "seed": prov.seed, "method": scorer.name(), "top_n": cfg.top_n });
    let dir = out_dir(cfg)?;
    write(&dir.join("recommendations.jsonl"), &recommendations_jsonl(&lists, Some(&meta)))?;
    write(&dir.join("scores.tsv"), &recommendations_tsv(&lists, Some(&prov.header())))
}

pub fn evaluate(cfg: &RunConfig) -> Result<()> {
    let prov = Provenance::new("evaluate", cfg)?;
    let (train, test) = train_test(cfg)?;
    let reg = registry(cfg, &train)?;
    let scorers = select(cfg, &reg, &[])?;
    let eval = evaluate_methods(&scorers, &train, &test, &cfg.top_k, cfg.workers)?;
    println!(
        "possible {}  existing {}  candidates {}  positives {}",
        eval.possible, eval.existing, eval.candidates, eval.positives
    );
    for r in &eval.reports {
        let k = r.report.k.map_or("all".to_owned(), |k| k.to_string());
        println!("{:<10} k={:<6} auc={:.6}", r.method, k, r.report.auc);
    }
    for (m, k, why) in &eval.skipped {
        log::warn!("{m} k={k:?}: no ROC ({why})");
    }
    let header = vec![
        prov.header(),
        format!(
            "possible={} existing={} candidates={} positives={}",
            eval.possible, eval.existing, eval.candidates, eval.positives
        ),
    ];
    let dir = out_dir(cfg)?;
    let path = dir.join("evaluation.csv");
    export_report(&eval.reports, &path, &header)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn probe(cfg: &RunConfig) -> Result<()> {
    let prov = Provenance::new("probe", cfg)?;
    let (train, test) = train_test(cfg)?;
    let reg = registry(cfg, &train)?;
    let scorers = select(cfg, &reg, &[])?;
    let probe = ProbeSet::sample(&train, &test, cfg.probe_size, cfg.seed)?;
    let mut csv = format!("# {}\nmethod,auc,positives,negatives\n", prov.header());
    for s in scorers {
        let r = probe_auc(s, &train, &test, &probe, cfg.workers)?;
        println!("{:<10} auc={:.6}", s.name(), r.auc);
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            s.name(),
            knowtraj::artifact::format_significant(r.auc, 12),
            r.n_pos,
            r.n_neg
        );
    }
    let dir = out_dir(cfg)?;
    write(&dir.join("probe.csv"), &csv)
}

pub fn aggregate(cfg: &RunConfig) -> Result<()> {
    let prov = Provenance::new("aggregate", cfg)?;
    let recs_path = cfg.recommendations.as_deref().context("missing --recommendations")?;
    let labels = cfg.author_labels.as_deref().context("missing --author-labels")?;
    let recs = read_recommendations_jsonl(recs_path)?;
    let authors = CommunityAssignment::read_tsv(labels, Layer::Author)?;
    let agg = aggregate_by_community(&recs, &authors, cfg.top_n);
    for d in &agg.digests {
        let top = d.topic_counts.first().map_or(String::from("-"), |(t, c)| format!("{t} ({c})"));
        println!("community {}: {} members, {} topics, top {}", d.community, d.size, d.topic_counts.len(), top);
    }
    let doc = json!({
        "meta": prov.meta(),
        "top_n": cfg.top_n,
        "unmapped_authors": agg.unmapped_authors,
        "communities": agg.digests,
    });
    let dir = out_dir(cfg)?;
    write(&dir.join("communities.json"), &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
    if let Some(topic_labels) = &cfg.topic_labels {
        let topics = CommunityAssignment::read_tsv(topic_labels, Layer::Topic)?;
        let cross = cross_distribution(&recs, &authors, &topics, cfg.top_n);
        let header = vec![
            prov.header(),
            format!("unmapped_topics={} unmapped_authors={}", cross.unmapped_topics, cross.unmapped_authors),
        ];
        write(&dir.join("cross_distribution.csv"), &cross.to_csv(&header))?;
    }
    Ok(())
}

/// Prints one line per check; returns whether all passed.
pub fn selfcheck() -> bool {
    let mut ok = true;
    for c in selfcheck::run() {
        if c.passed {
            println!("PASS {}", c.name);
        } else {
            ok = false;
            println!("FAIL {}: {}", c.name, c.detail);
        }
    }
    ok
}
