//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{densify, max_abs_diff, oracle_diffuse, pairwise_auc, Dense};
use knowtraj::artifact::recommendations_jsonl;
use knowtraj::diffusion::{diffuse, finalize, recommend, recommend_all, recommend_index};
use knowtraj::evaluation::{
    enumerate_candidates, evaluate_methods, render_report_csv, roc_auc, CandidatePair, LabeledCandidate,
};
use knowtraj::ingest::{parse_jsonl, records_to_jsonl, split_by_year, AuthorRef, BiblioRecord, TopicTag};
use knowtraj::network::{NetworkStats, SemanticLayerConfig};
use knowtraj::scorer::{LinkScorer, ScorerRegistry, SemanticDiffusion};
use knowtraj::synth::{planted_corpus, random_network, random_vectors, PlantedConfig};
use knowtraj::toy::{toy1, toy2};
use knowtraj::BiLayerNetwork;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ---------------------------------------------------------------------------

fn hand_traces() -> Outcome {
    const TOL: f64 = 1e-12;
    let check = |net: &BiLayerNetwork, want: &[(&str, f64)]| -> Result<(), String> {
        let got = recommend(net, "A", 100).map_err(|e| e.to_string())?;
        let got: Vec<(&str, f64)> = got.entries.iter().map(|e| (e.topic.as_str(), e.score)).collect();
        ensure(
            got.len() == want.len()
                && got.iter().zip(want).all(|(g, w)| g.0 == w.0 && (g.1 - w.1).abs() <= TOL),
            || format!("got {got:?}, want {want:?}"),
        )
    };
    check(&toy1(), &[("T2", 0.75), ("T3", 0.75)])?;
    check(&toy2(), &[("T2", 1.0), ("T3", 0.5)])?;
    Ok("TOY-1 [(T2,0.75),(T3,0.75)], TOY-2 [(T2,1),(T3,0.5)] within 1e-12".into())
}

// 2 ---------------------------------------------------------------------------

fn conservation() -> Outcome {
    const TOL: f64 = 1e-9;
    let mut targets = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_a = rng.gen_range(1..=100);
        let n_t = rng.gen_range(1..=100);
        let density = rng.gen_range(0.01..0.25);
        let net = random_network(seed, n_a, n_t, density);
        let sum = |r: &[(u32, f64)]| r.iter().map(|x| x.1).sum::<f64>();
        for a in 0..n_a as u32 {
            let r = [1.0, 0.37, 12.5][a as usize % 3];
            let s = diffuse(&net, a, r);
            targets += 1;
            let ctx = |what: &str, got: f64, want: f64| format!("seed {seed} author {a}: {what} {got} vs {want}");
            let step1 = if net.author_topics().degree(a) > 0 { r } else { 0.0 };
            ensure((sum(&s.topic_direct) - step1).abs() <= TOL, || ctx("step 1", sum(&s.topic_direct), step1))?;
            let step2 = if net.coauthors().degree(a) > 0 { r } else { 0.0 };
            ensure((sum(&s.coauthor) - step2).abs() <= TOL, || ctx("step 2", sum(&s.coauthor), step2))?;
            let step3: f64 = s
                .topic_direct
                .iter()
                .filter(|x| net.cotopics().degree(x.0) > 0)
                .map(|x| x.1)
                .sum();
            ensure((sum(&s.topic_via_topics) - step3).abs() <= TOL, || {
                ctx("step 3", sum(&s.topic_via_topics), step3)
            })?;
            let step4: f64 = s
                .coauthor
                .iter()
                .filter(|x| net.author_topics().degree(x.0) > 0)
                .map(|x| x.1)
                .sum();
            ensure((sum(&s.topic_via_authors) - step4).abs() <= TOL, || {
                ctx("step 4", sum(&s.topic_via_authors), step4)
            })?;
            let all = [&s.topic_direct, &s.coauthor, &s.topic_via_topics, &s.topic_via_authors];
            ensure(all.iter().all(|v| v.iter().all(|x| x.1 >= 0.0)), || ctx("negative resource", 0.0, 0.0))?;
            let total: f64 = finalize(&net, &s).entries.iter().map(|e| e.score).sum();
            ensure(total <= 2.0 * r + TOL, || ctx("final mass", total, 2.0 * r))?;
        }
    }
    Ok(format!("200 networks, {targets} targets, all identities within 1e-9"))
}

// 3 ---------------------------------------------------------------------------

fn oracle_equivalence() -> Outcome {
    const TOL: f64 = 1e-9;
    let mut worst: f64 = 0.0;
    let mut compare = |net: &BiLayerNetwork, d: &Dense, scorer: Option<&dyn LinkScorer>, label: &str| -> Result<(), String> {
        for a in 0..net.author_count() {
            let o = oracle_diffuse(d, a, 1.0);
            let list = match scorer {
                Some(s) => s.recommend(net, a as u32, usize::MAX),
                None => {
                    let s = diffuse(net, a as u32, 1.0);
                    let n_t = net.topic_count();
                    for (got, want) in [
                        (densify(&s.topic_via_topics, n_t), &o.topic_via_topics),
                        (densify(&s.topic_via_authors, n_t), &o.topic_via_authors),
                    ] {
                        let diff = max_abs_diff(&got, want);
                        worst = worst.max(diff);
                        ensure(diff <= TOL, || format!("{label} author {a}: step diff {diff}"))?;
                    }
                    recommend_index(net, a as u32, usize::MAX)
                }
            };
            let got = densify(
                &list.entries.iter().map(|e| (e.topic_index, e.score)).collect::<Vec<_>>(),
                net.topic_count(),
            );
            let diff = max_abs_diff(&got, &o.score);
            worst = worst.max(diff);
            ensure(diff <= TOL, || format!("{label} author {a}: score diff {diff}"))?;
            let listed = list.entries.len();
            let positive = o.score.iter().filter(|&&x| x > 0.0).count();
            ensure(listed == positive, || format!("{label} author {a}: {listed} listed vs {positive} oracle"))?;
        }
        Ok(())
    };
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let (n_a, n_t) = (rng.gen_range(2..=50), rng.gen_range(2..=50));
        let net = random_network(1000 + seed, n_a, n_t, rng.gen_range(0.03..0.3));
        compare(&net, &Dense::of(&net), None, &format!("seed {seed}"))?;

        let vectors = random_vectors(seed, &net, 8);
        let floor = [0.0, 0.2, -0.3][seed as usize % 3];
        let sem = net
            .with_semantic_layer(&SemanticLayerConfig::new(vectors.clone(), floor))
            .map_err(|e| e.to_string())?;
        let dense_vectors: Vec<Vec<f64>> = vectors.into_iter().map(|(_, v)| v).collect();
        let d = Dense::of(&net).with_cosine_layer(&dense_vectors, floor);
        let scorer = SemanticDiffusion::new(std::sync::Arc::new(sem));
        compare(&net, &d, Some(&scorer), &format!("semantic seed {seed}"))?;
    }
    Ok(format!("50 networks + 50 semantic layers, max deviation {worst:.1e} (tolerance 1e-9)"))
}

// 4 ---------------------------------------------------------------------------

fn invariances() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut nets: Vec<BiLayerNetwork> = (0..20u64).map(|s| random_network(500 + s, 30, 30, 0.15)).collect();
    nets.push(toy1());
    nets.push(toy2());
    for (i, net) in nets.iter().enumerate() {
        let base: Vec<_> = (0..net.author_count() as u32).map(|a| recommend_index(net, a, usize::MAX)).collect();
        for c in [0.5, 3.0, 1000.0] {
            let scaled = net.scaled(c);
            for (a, b) in base.iter().enumerate() {
                let s = recommend_index(&scaled, a as u32, usize::MAX);
                let order = |l: &knowtraj::diffusion::RecommendationList| l.entries.iter().map(|e| e.topic_index).collect::<Vec<_>>();
                ensure(order(&s) == order(b), || format!("net {i} x{c} author {a}: ranking changed"))?;
                let diff = s.entries.iter().zip(&b.entries).map(|(x, y)| (x.score - y.score).abs()).fold(0.0, f64::max);
                ensure(diff <= TOL, || format!("net {i} x{c} author {a}: score diff {diff}"))?;
            }
        }
        for r in [0.5, 3.0, 1000.0] {
            for (a, b) in base.iter().enumerate() {
                let s = finalize(net, &diffuse(net, a as u32, r));
                let same_order = s.entries.iter().map(|e| e.topic_index).eq(b.entries.iter().map(|e| e.topic_index));
                ensure(same_order, || format!("net {i} r={r} author {a}: ranking changed"))?;
                let diff = s
                    .entries
                    .iter()
                    .zip(&b.entries)
                    .map(|(x, y)| (x.score - r * y.score).abs() / r)
                    .fold(0.0, f64::max);
                ensure(diff <= TOL, || format!("net {i} r={r} author {a}: relative deviation {diff}"))?;
            }
        }
    }
    Ok("weight scaling x{0.5,3,1000} and r_init scaling: rankings identical, scores within 1e-12".into())
}

// 5 ---------------------------------------------------------------------------

fn labeled(scores: &[f64], labels: &[bool]) -> Vec<LabeledCandidate> {
    scores
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (&score, &positive))| LabeledCandidate {
            pair: CandidatePair { author: i as u32, topic: 0 },
            score,
            positive,
        })
        .collect()
}

fn auc_correctness() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sets = 0;
    while sets < 100 {
        let n = rng.gen_range(2..=1000);
        // integer-valued scores make ties common and keep transforms exact
        let levels = rng.gen_range(1..50);
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
        let p = rng.gen_range(0.05..0.95);
        let labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
        let npos = labels.iter().filter(|&&l| l).count();
        if npos == 0 || npos == n {
            continue;
        }
        sets += 1;
        let l = labeled(&scores, &labels);
        let auc = roc_auc(&l, None).map_err(|e| e.to_string())?.auc;
        let pos: Vec<f64> = l.iter().filter(|c| c.positive).map(|c| c.score).collect();
        let neg: Vec<f64> = l.iter().filter(|c| !c.positive).map(|c| c.score).collect();
        let oracle = pairwise_auc(&pos, &neg);
        ensure((auc - oracle).abs() <= TOL, || format!("set {sets}: {auc} vs pairwise {oracle}"))?;

        // strictly increasing transform, exact on these integers
        let transformed: Vec<f64> = scores.iter().map(|x| x * x * x + 5.0 * x - 40.0).collect();
        let t_auc = roc_auc(&labeled(&transformed, &labels), None).map_err(|e| e.to_string())?.auc;
        ensure(t_auc == auc, || format!("set {sets}: monotone transform moved AUC {auc} -> {t_auc}"))?;

        // reversing labels mirrors the statistic: the two win counts sum to
        // exactly the number of pairs
        let flipped: Vec<bool> = labels.iter().map(|l| !l).collect();
        let f_auc = roc_auc(&labeled(&scores, &flipped), None).map_err(|e| e.to_string())?.auc;
        let pairs = 2.0 * npos as f64 * (n - npos) as f64;
        let (w, fw) = ((auc * pairs).round(), (f_auc * pairs).round());
        ensure(w + fw == pairs, || format!("set {sets}: reversal {auc} + {f_auc} != 1"))?;
        ensure((auc + f_auc - 1.0).abs() <= TOL, || format!("set {sets}: reversal {auc} + {f_auc}"))?;
    }
    Ok("100 sets: rank AUC = pairwise within 1e-12; monotone and reversal symmetry exact".into())
}

// 6 ---------------------------------------------------------------------------

fn rec(id: String, year: i32, authors: &[String], topics: &[String]) -> BiblioRecord {
    BiblioRecord::new(
        id,
        year,
        authors.iter().map(|a| AuthorRef::new(Some(a.clone()), "")),
        topics.iter().filter_map(|t| TopicTag::new(t, None)),
    )
    .0
}

fn paper_identities() -> Outcome {
    const AUTHORS: usize = 730;
    const TOPICS: usize = 1817;
    const EDGES: usize = 14_184;
    let a = |i: usize| format!("author{i:04}");
    let t = |i: usize| format!("fos{i:04}");
    let mut train = Vec::new();
    for k in 0..EDGES {
        train.push(rec(format!("tr{k}"), 2010, &[a(k % AUTHORS)], &[t(k % TOPICS)]));
    }
    // training-only nodes
    train.push(rec("tr-x".into(), 2010, &[a(9000), a(0)], &[t(9000), t(0)]));
    let mut test = Vec::new();
    for i in 0..TOPICS {
        test.push(rec(format!("te{i}"), 2016, &[a(i % AUTHORS)], &[t((i * 7) % TOPICS)]));
    }
    test.push(rec("te-x".into(), 2016, &[a(9001), a(5)], &[t(9001)]));

    let (train_net, test_net) = (BiLayerNetwork::build(&train), BiLayerNetwork::build(&test));
    let candidates = enumerate_candidates(&train_net, &test_net).map_err(|e| e.to_string())?;
    ensure(candidates.overlap.authors.len() == AUTHORS && candidates.overlap.topics.len() == TOPICS, || {
        format!("overlap {}x{}", candidates.overlap.authors.len(), candidates.overlap.topics.len())
    })?;
    ensure(candidates.possible == 1_326_410, || format!("possible {}", candidates.possible))?;
    ensure(candidates.pairs.len() == 1_312_226, || format!("candidates {}", candidates.pairs.len()))?;

    let reg = ScorerRegistry::with_builtin();
    let scorers = reg.select(&["pa"]).map_err(|e| e.to_string())?;
    let eval = evaluate_methods(&scorers, &train_net, &test_net, &[500], 4).map_err(|e| e.to_string())?;
    ensure(eval.possible == 1_326_410 && eval.candidates == 1_312_226, || {
        format!("harness reported {} possible, {} candidates", eval.possible, eval.candidates)
    })?;

    // E_at participants = authors with topics + topics with authors; the
    // training network has 731 authors and 1818 topics but the extra author
    // and topic only join through the extra record
    let mut lonely = train.clone();
    lonely.push(rec("solo".into(), 2010, &[a(9100), a(9101)], &[]));
    let net = BiLayerNetwork::build(&lonely);
    let s = NetworkStats::of(&net, &lonely);
    ensure(s.author_topic_nodes == s.author_topic_authors + s.author_topic_topics, || format!("{s:?}"))?;
    ensure(s.author_topic_authors == 731 && s.author_nodes == 733 && s.author_topic_topics == 1818, || {
        format!("{s:?}")
    })?;

    // a network shaped like Table 1: 11,836 authors and 6,497 topics on E_at
    let table1: Vec<BiblioRecord> = (0..11_836)
        .map(|k| rec(format!("p{k}"), 2010, &[a(k)], &[t(k % 6_497)]))
        .chain(std::iter::once(rec("coauthors".into(), 2010, &[a(20_000), a(20_001)], &[])))
        .collect();
    let s1 = NetworkStats::of(&BiLayerNetwork::build(&table1), &table1);
    ensure(
        s1.author_topic_authors == 11_836 && s1.author_topic_topics == 6_497 && s1.author_topic_nodes == 18_333,
        || format!("{s1:?}"),
    )?;
    Ok(format!(
        "overlap 730x1817: possible {} candidates {}; E_at nodes {} = {} + {}",
        eval.possible, eval.candidates, s1.author_topic_nodes, s1.author_topic_authors, s1.author_topic_topics
    ))
}

// 7 ---------------------------------------------------------------------------

fn planted_signal() -> Outcome {
    let cfg = PlantedConfig::default();
    let records = planted_corpus(&cfg);
    let split = split_by_year(&records, cfg.cutoff_year);
    let (train, test) = (BiLayerNetwork::build(&split.train), BiLayerNetwork::build(&split.test));
    let reg = ScorerRegistry::with_builtin();
    let scorers = reg.select(&["diffusion", "ra"]).map_err(|e| e.to_string())?;
    let eval = evaluate_methods(&scorers, &train, &test, &[], 4).map_err(|e| e.to_string())?;
    let auc = |m: &str| eval.reports.iter().find(|r| r.method == m && r.report.k.is_none()).map(|r| r.report.auc);
    let (d, ra) = (auc("diffusion").ok_or("no diffusion AUC")?, auc("ra").ok_or("no RA AUC")?);
    let detail = format!("seed {}: diffusion AUC {d:.4}, RA AUC {ra:.4} on {} candidates", cfg.seed, eval.candidates);
    ensure(d >= 0.70 && d >= ra, || detail.clone())?;
    Ok(detail)
}

// 8 ---------------------------------------------------------------------------

fn determinism() -> Outcome {
    let cfg = PlantedConfig {
        seed: 8,
        ..Default::default()
    };
    let records = planted_corpus(&cfg);
    let split = split_by_year(&records, cfg.cutoff_year);
    let (train, test) = (BiLayerNetwork::build(&split.train), BiLayerNetwork::build(&split.test));
    let authors = train.author_labels().to_vec();
    let reg = ScorerRegistry::with_builtin();
    let scorers = reg.select(&reg.names()).map_err(|e| e.to_string())?;
    let run = |workers: usize| -> Result<(String, String), String> {
        let lists = recommend_all(&train, &authors, 100, workers).map_err(|e| e.to_string())?;
        let eval = evaluate_methods(&scorers, &train, &test, &[500, 1000, 1500], workers).map_err(|e| e.to_string())?;
        Ok((recommendations_jsonl(&lists, None), render_report_csv(&eval.reports, &[])))
    };
    let (r1, e1) = run(1)?;
    let (r8, e8) = run(8)?;
    ensure(r1 == r8, || "recommendations differ between 1 and 8 workers".into())?;
    ensure(e1 == e8, || "evaluation report differs between 1 and 8 workers".into())?;
    Ok(format!("{} + {} bytes identical at 1 and 8 workers", r1.len(), e1.len()))
}

// 9 ---------------------------------------------------------------------------

fn throughput() -> Outcome {
    let cfg = PlantedConfig {
        seed: 9,
        groups: 20,
        authors_per_group: 100,
        topics_per_group: 40,
        train_records: 7_500,
        test_records: 2_500,
        ..Default::default()
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("corpus.jsonl");
    std::fs::write(&path, records_to_jsonl(&planted_corpus(&cfg))).map_err(|e| e.to_string())?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());

    let start = Instant::now();
    let corpus = parse_jsonl(&path).map_err(|e| e.to_string())?;
    let split = split_by_year(&corpus.records, cfg.cutoff_year);
    let full = BiLayerNetwork::build(&corpus.records);
    let lists = recommend_all(&full, full.author_labels(), 100, workers).map_err(|e| e.to_string())?;
    let (train, test) = (BiLayerNetwork::build(&split.train), BiLayerNetwork::build(&split.test));
    let reg = ScorerRegistry::with_builtin();
    let scorers = reg.select(&["diffusion", "ra", "cf"]).map_err(|e| e.to_string())?;
    let eval = evaluate_methods(&scorers, &train, &test, &[500, 1000, 1500], workers).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let detail = format!(
        "{} records, {} lists, {} candidates x 3 methods in {:.2} s on {workers} workers",
        corpus.records.len(),
        lists.len(),
        eval.candidates,
        elapsed.as_secs_f64()
    );
    ensure(corpus.records.len() == 10_000 && elapsed < Duration::from_secs(60), || detail.clone())?;
    Ok(detail)
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "hand-trace exactness", Duration::from_secs(1), hand_traces),
        (2, "conservation suite", Duration::from_secs(10), conservation),
        (3, "oracle equivalence", Duration::from_secs(30), oracle_equivalence),
        (4, "invariances", Duration::from_secs(5), invariances),
        (5, "AUC correctness", Duration::from_secs(5), auc_correctness),
        (6, "paper arithmetic identities", Duration::from_secs(10), paper_identities),
        (7, "planted-signal sanity", Duration::from_secs(60), planted_signal),
        (8, "determinism under parallelism", Duration::from_secs(60), determinism),
        (9, "desk-scale throughput", Duration::from_secs(60), throughput),
    ];
    let mut failed = 0;
    for (n, name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:.2?}, budget {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {n} {status} [{name}] ({took:.2?}) {detail}");
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
