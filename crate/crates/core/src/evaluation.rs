//! Time-split evaluation: candidate enumeration over the authors and topics
//! present in both networks, labelling against the later network, ROC/AUC
//! (overall and restricted to the top-k scored candidates), and the sampled
//! probe-set protocol for networks too large to rank exhaustively.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artifact::{format_significant, write_atomic};
use crate::error::{Error, Result};
use crate::network::BiLayerNetwork;
use crate::scorer::{score_pairs, LinkScorer};

/// An author–topic pair by training-network indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidatePair {
    pub author: u32,
    pub topic: u32,
}

/// Authors and topics present in both networks, as `(train, test)` index
/// pairs sorted by training index.
#[derive(Debug, Clone, Default)]
pub struct Overlap {
    pub authors: Vec<(u32, u32)>,
    pub topics: Vec<(u32, u32)>,
    author_to_test: HashMap<u32, u32>,
    topic_to_test: HashMap<u32, u32>,
}

impl Overlap {
    pub fn between(train: &BiLayerNetwork, test: &BiLayerNetwork) -> Result<Self> {
        let authors: Vec<(u32, u32)> = train
            .author_labels()
            .iter()
            .enumerate()
            .filter_map(|(i, l)| test.author_by_identity(l).map(|j| (i as u32, j)))
            .collect();
        let topics: Vec<(u32, u32)> = train
            .topic_labels()
            .iter()
            .enumerate()
            .filter_map(|(i, l)| test.topic_by_label(l).map(|j| (i as u32, j)))
            .collect();
        if authors.is_empty() || topics.is_empty() {
            return Err(Error::EmptyOverlap);
        }
        Ok(Overlap {
            author_to_test: authors.iter().copied().collect(),
            topic_to_test: topics.iter().copied().collect(),
            authors,
            topics,
        })
    }

    pub fn test_author(&self, train_author: u32) -> Option<u32> {
        self.author_to_test.get(&train_author).copied()
    }

    pub fn test_topic(&self, train_topic: u32) -> Option<u32> {
        self.topic_to_test.get(&train_topic).copied()
    }

    /// μ in the test network for a pair given by training indices.
    pub fn test_mu(&self, test: &BiLayerNetwork, pair: CandidatePair) -> f64 {
        match (self.test_author(pair.author), self.test_topic(pair.topic)) {
            (Some(a), Some(t)) => test.mu(a, t),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub overlap: Overlap,
    /// Author-major, topics ascending.
    pub pairs: Vec<CandidatePair>,
    /// `|A∩| · |T∩|`.
    pub possible: u64,
    /// Training author–topic edges inside the overlap.
    pub existing: u64,
}

/// Every overlap author–topic pair that is not an edge of the training
/// network.
pub fn enumerate_candidates(train: &BiLayerNetwork, test: &BiLayerNetwork) -> Result<CandidateSet> {
    let overlap = Overlap::between(train, test)?;
    let possible = overlap.authors.len() as u64 * overlap.topics.len() as u64;
    let at = train.author_topics();
    let mut pairs = Vec::with_capacity(possible as usize);
    let mut existing = 0u64;
    for &(a, _) in &overlap.authors {
        let linked = at.neighbors(a);
        for &(t, _) in &overlap.topics {
            if linked.binary_search(&t).is_ok() {
                existing += 1;
            } else {
                pairs.push(CandidatePair { author: a, topic: t });
            }
        }
    }
    Ok(CandidateSet {
        overlap,
        pairs,
        possible,
        existing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledCandidate {
    pub pair: CandidatePair,
    pub score: f64,
    pub positive: bool,
}

/// Positive iff the pair is an author–topic edge of the test network.
pub fn label_candidates(candidates: &CandidateSet, test: &BiLayerNetwork, scores: &[f64]) -> Result<Vec<LabeledCandidate>> {
    if scores.len() != candidates.pairs.len() {
        return Err(Error::ScoreCountMismatch {
            candidates: candidates.pairs.len(),
            scores: scores.len(),
        });
    }
    Ok(candidates
        .pairs
        .iter()
        .zip(scores)
        .map(|(&pair, &score)| LabeledCandidate {
            pair,
            score,
            positive: candidates.overlap.test_mu(test, pair) > 0.0,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocReport {
    /// `(fpr, tpr)` from (0,0) to (1,1), one point per distinct score.
    pub curve: Vec<(f64, f64)>,
    pub auc: f64,
    pub k: Option<usize>,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl RocReport {
    /// Trapezoidal area under `curve`.
    pub fn trapezoid_area(&self) -> f64 {
        self.curve
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
            .sum()
    }
}

/// ROC over `(score, positive)` items already sorted by score descending.
/// AUC is the Mann–Whitney statistic with ties credited one half, computed
/// in exact integer arithmetic.
fn roc_sorted(items: &[(f64, bool)], k: Option<usize>) -> Result<RocReport> {
    let n_pos = items.iter().filter(|i| i.1).count();
    let n_neg = items.len() - n_pos;
    if n_pos == 0 {
        return Err(Error::OneClass("positive"));
    }
    if n_neg == 0 {
        return Err(Error::OneClass("negative"));
    }
    let mut curve = vec![(0.0, 0.0)];
    // twice the number of (pos, neg) pairs ordered correctly, ties counting 1
    let mut twice_wins: u128 = 0;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < items.len() {
        let s = items[i].0;
        let (mut p, mut q) = (0usize, 0usize);
        while i < items.len() && items[i].0 == s {
            if items[i].1 {
                p += 1;
            } else {
                q += 1;
            }
            i += 1;
        }
        // positives in this group beat every negative below it
        twice_wins += 2 * p as u128 * (n_neg - fp - q) as u128 + p as u128 * q as u128;
        tp += p;
        fp += q;
        curve.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    let auc = twice_wins as f64 / (2.0 * n_pos as f64 * n_neg as f64);
    Ok(RocReport {
        curve,
        auc,
        k,
        n_pos,
        n_neg,
    })
}

fn sort_for_ranking(labeled: &[LabeledCandidate]) -> Vec<(f64, bool)> {
    let mut order: Vec<&LabeledCandidate> = labeled.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.pair.cmp(&b.pair)));
    order.into_iter().map(|c| (c.score, c.positive)).collect()
}

/// ROC/AUC over all candidates, or over the `k` highest-scored ones when `k`
/// is given (ties at the cut resolved by ascending `(author, topic)`).
pub fn roc_auc(labeled: &[LabeledCandidate], k: Option<usize>) -> Result<RocReport> {
    roc_auc_groups(labeled, &[k]).pop().expect("one group")
}

/// [`roc_auc`] for several `k` values, sorting once.
pub fn roc_auc_groups(labeled: &[LabeledCandidate], ks: &[Option<usize>]) -> Vec<Result<RocReport>> {
    let sorted = sort_for_ranking(labeled);
    ks.iter()
        .map(|&k| {
            let n = k.map_or(sorted.len(), |k| k.min(sorted.len()));
            roc_sorted(&sorted[..n], k)
        })
        .collect()
}

/// AUC of explicit positive and negative score samples.
pub fn auc_of_scores(positive: &[f64], negative: &[f64]) -> Result<RocReport> {
    let mut items: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    items.sort_by(|a, b| b.0.total_cmp(&a.0));
    roc_sorted(&items, None)
}

/// Sampled evaluation set: `size/2` test-network author–topic edges and
/// `size/2` overlap pairs absent from the test network, by training indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub size: usize,
    pub positives: Vec<CandidatePair>,
    pub negatives: Vec<CandidatePair>,
    pub rng_seed: u64,
}

impl ProbeSet {
    /// Draws a probe set over the overlap of the two networks. Positives are
    /// sampled without replacement from test edges; negatives uniformly from
    /// overlap pairs that are not test edges, whatever their training status.
    pub fn sample(train: &BiLayerNetwork, test: &BiLayerNetwork, size: usize, seed: u64) -> Result<Self> {
        if size == 0 || !size.is_multiple_of(2) {
            return Err(Error::InvalidProbe(format!("size must be positive and even, got {size}")));
        }
        let half = size / 2;
        let overlap = Overlap::between(train, test)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut edges = Vec::new();
        for &(a, ta) in &overlap.authors {
            for &(t, tt) in &overlap.topics {
                if test.mu(ta, tt) > 0.0 {
                    edges.push(CandidatePair { author: a, topic: t });
                }
            }
        }
        if edges.len() < half {
            return Err(Error::InvalidProbe(format!(
                "{half} positives requested but the overlap holds only {} test edges",
                edges.len()
            )));
        }
        let mut positives: Vec<_> = sample(&mut rng, edges.len(), half)
            .into_iter()
            .map(|i| edges[i])
            .collect();
        positives.sort_unstable();

        let (n_a, n_t) = (overlap.authors.len(), overlap.topics.len());
        let space = n_a as u64 * n_t as u64;
        let available = space - edges.len() as u64;
        if available < half as u64 {
            return Err(Error::InvalidProbe(format!(
                "{half} negatives requested but only {available} non-edges exist"
            )));
        }
        let is_edge: HashSet<CandidatePair> = edges.iter().copied().collect();
        let mut negatives = Vec::with_capacity(half);
        if available <= 2 * half as u64 {
            let pool: Vec<CandidatePair> = overlap
                .authors
                .iter()
                .flat_map(|&(a, _)| overlap.topics.iter().map(move |&(t, _)| CandidatePair { author: a, topic: t }))
                .filter(|p| !is_edge.contains(p))
                .collect();
            negatives.extend(sample(&mut rng, pool.len(), half).into_iter().map(|i| pool[i]));
        } else {
            let mut chosen = HashSet::with_capacity(half);
            while negatives.len() < half {
                let p = CandidatePair {
                    author: overlap.authors[rng.gen_range(0..n_a)].0,
                    topic: overlap.topics[rng.gen_range(0..n_t)].0,
                };
                if !is_edge.contains(&p) && chosen.insert(p) {
                    negatives.push(p);
                }
            }
        }
        negatives.sort_unstable();
        Ok(ProbeSet {
            size,
            positives,
            negatives,
            rng_seed: seed,
        })
    }

    /// Checks the probe against the test network.
    pub fn validate(&self, train: &BiLayerNetwork, test: &BiLayerNetwork) -> Result<()> {
        if self.positives.len() != self.negatives.len() || self.positives.len() * 2 != self.size {
            return Err(Error::InvalidProbe("class sizes must both equal size/2".into()));
        }
        let pos: HashSet<_> = self.positives.iter().collect();
        if pos.len() != self.positives.len() {
            return Err(Error::InvalidProbe("repeated positive pair".into()));
        }
        if self.negatives.iter().any(|p| pos.contains(p)) {
            return Err(Error::InvalidProbe("a pair is both positive and negative".into()));
        }
        let overlap = Overlap::between(train, test)?;
        let known = |p: &CandidatePair| overlap.test_author(p.author).is_some() && overlap.test_topic(p.topic).is_some();
        if let Some(p) = self.positives.iter().find(|p| !known(p) || overlap.test_mu(test, **p) <= 0.0) {
            return Err(Error::InvalidProbe(format!("positive {p:?} is not a test edge")));
        }
        if let Some(p) = self.negatives.iter().find(|p| !known(p) || overlap.test_mu(test, **p) > 0.0) {
            return Err(Error::InvalidProbe(format!("negative {p:?} is a test edge or outside the overlap")));
        }
        Ok(())
    }
}

/// AUC of `scorer` (run on `train`) over the probe set.
pub fn probe_auc(
    scorer: &dyn LinkScorer,
    train: &BiLayerNetwork,
    test: &BiLayerNetwork,
    probe: &ProbeSet,
    workers: usize,
) -> Result<RocReport> {
    probe.validate(train, test)?;
    let as_pairs = |v: &[CandidatePair]| v.iter().map(|p| (p.author, p.topic)).collect::<Vec<_>>();
    let pos = score_pairs(scorer, train, &as_pairs(&probe.positives), workers)?;
    let neg = score_pairs(scorer, train, &as_pairs(&probe.negatives), workers)?;
    auc_of_scores(&pos, &neg)
}

/// A report tagged with the method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub method: String,
    pub report: RocReport,
}

/// CSV with columns `method,k,fpr,tpr,auc`: each report contributes one row
/// per curve point (auc empty) followed by a summary row (fpr, tpr empty).
/// `k` is `all` for unrestricted reports. `header` lines are written first as
/// `#` comments.
pub fn render_report_csv(reports: &[MethodReport], header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    out.push_str("method,k,fpr,tpr,auc\n");
    for r in reports {
        let k = r.report.k.map_or_else(|| "all".to_owned(), |k| k.to_string());
        for &(fpr, tpr) in &r.report.curve {
            let _ = writeln!(
                out,
                "{},{k},{},{},",
                r.method,
                format_significant(fpr, 12),
                format_significant(tpr, 12)
            );
        }
        let _ = writeln!(out, "{},{k},,,{}", r.method, format_significant(r.report.auc, 12));
    }
    out
}

pub fn export_report(reports: &[MethodReport], path: &Path, header: &[String]) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::Invalid("no reports to export".into()));
    }
    write_atomic(path, render_report_csv(reports, header).as_bytes())
}

/// Result of running several methods on one time split.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub candidates: usize,
    pub possible: u64,
    pub existing: u64,
    pub positives: usize,
    pub reports: Vec<MethodReport>,
    /// `(method, k, reason)` for groups whose ROC was undefined.
    pub skipped: Vec<(String, Option<usize>, String)>,
}

/// Scores the identical candidate set with every scorer and reports ROC for
/// the full set and each top-k group.
pub fn evaluate_methods(
    scorers: &[&dyn LinkScorer],
    train: &BiLayerNetwork,
    test: &BiLayerNetwork,
    top_k: &[usize],
    workers: usize,
) -> Result<Evaluation> {
    let candidates = enumerate_candidates(train, test)?;
    let pairs: Vec<(u32, u32)> = candidates.pairs.iter().map(|p| (p.author, p.topic)).collect();
    let mut groups = vec![None];
    groups.extend(top_k.iter().map(|&k| Some(k)));
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    let mut positives = 0;
    for scorer in scorers {
        let scores = score_pairs(*scorer, train, &pairs, workers)?;
        let labeled = label_candidates(&candidates, test, &scores)?;
        positives = labeled.iter().filter(|c| c.positive).count();
        for (k, result) in groups.iter().zip(roc_auc_groups(&labeled, &groups)) {
            match result {
                Ok(report) => reports.push(MethodReport {
                    method: scorer.name().to_owned(),
                    report,
                }),
                Err(e) => skipped.push((scorer.name().to_owned(), *k, e.to_string())),
            }
        }
    }
    Ok(Evaluation {
        candidates: candidates.pairs.len(),
        possible: candidates.possible,
        existing: candidates.existing,
        positives,
        reports,
        skipped,
    })
}
