//! Scoring methods behind a common trait, looked up by name.

use std::sync::Arc;

use rayon::prelude::*;

use crate::baselines;
use crate::diffusion::{self, RecommendationList};
use crate::error::{Error, Result};
use crate::network::BiLayerNetwork;
use crate::pool;

/// Scores author–topic pairs on a bi-layer network. Implementations are pure
/// functions of the network and may be called from many threads at once.
pub trait LinkScorer: Send + Sync {
    /// Selector name, e.g. `ra`.
    fn name(&self) -> &str;

    fn description(&self) -> &str {
        ""
    }

    fn score(&self, net: &BiLayerNetwork, author: u32, topic: u32) -> f64;

    /// Scores for one author against many topics (ascending indices).
    fn score_topics(&self, net: &BiLayerNetwork, author: u32, topics: &[u32]) -> Vec<f64> {
        topics.iter().map(|&t| self.score(net, author, t)).collect()
    }

    /// Top `top_n` unlinked topics with positive score, best first, ties by
    /// topic index.
    fn recommend(&self, net: &BiLayerNetwork, author: u32, top_n: usize) -> RecommendationList {
        let topics: Vec<u32> = (0..net.topic_count() as u32).collect();
        let scores = self.score_topics(net, author, &topics);
        diffusion::ranked_list(net, author, topics.into_iter().zip(scores), top_n)
    }
}

/// Values of `topics` (ascending) in a sorted sparse vector, 0 when absent.
fn lookup_sorted(resources: &[(u32, f64)], topics: &[u32]) -> Vec<f64> {
    let mut out = Vec::with_capacity(topics.len());
    let mut i = 0;
    for &t in topics {
        while i < resources.len() && resources[i].0 < t {
            i += 1;
        }
        out.push(match resources.get(i) {
            Some(&(idx, v)) if idx == t => v,
            _ => 0.0,
        });
    }
    out
}

/// The four-hop diffusion; see [`crate::diffusion`].
#[derive(Debug, Default, Clone, Copy)]
pub struct Diffusion;

impl LinkScorer for Diffusion {
    fn name(&self) -> &str {
        "diffusion"
    }

    fn description(&self) -> &str {
        "four-hop resource diffusion over the bi-layer network"
    }

    fn score(&self, net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
        self.score_topics(net, author, &[topic])[0]
    }

    fn score_topics(&self, net: &BiLayerNetwork, author: u32, topics: &[u32]) -> Vec<f64> {
        if topics.windows(2).any(|w| w[0] > w[1]) {
            return topics.iter().map(|&t| self.score(net, author, t)).collect();
        }
        let combined = diffusion::diffuse(net, author, 1.0).combined();
        lookup_sorted(&combined, topics)
    }

    fn recommend(&self, net: &BiLayerNetwork, author: u32, top_n: usize) -> RecommendationList {
        diffusion::recommend_index(net, author, top_n)
    }
}

/// Diffusion run on a network whose topic layer was rebuilt from topic
/// vectors. The scorer owns that network and ignores the one it is handed,
/// which must have the same node indexing (it is the network the semantic
/// layer was derived from).
#[derive(Debug, Clone)]
pub struct SemanticDiffusion {
    net: Arc<BiLayerNetwork>,
}

impl SemanticDiffusion {
    pub fn new(semantic: Arc<BiLayerNetwork>) -> Self {
        SemanticDiffusion { net: semantic }
    }

    pub fn network(&self) -> &BiLayerNetwork {
        &self.net
    }
}

impl LinkScorer for SemanticDiffusion {
    fn name(&self) -> &str {
        "semantic"
    }

    fn description(&self) -> &str {
        "diffusion with a cosine-similarity topic layer"
    }

    fn score(&self, _net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
        Diffusion.score(&self.net, author, topic)
    }

    fn score_topics(&self, _net: &BiLayerNetwork, author: u32, topics: &[u32]) -> Vec<f64> {
        Diffusion.score_topics(&self.net, author, topics)
    }

    fn recommend(&self, _net: &BiLayerNetwork, author: u32, top_n: usize) -> RecommendationList {
        Diffusion.recommend(&self.net, author, top_n)
    }
}

/// Wraps a plain pair-scoring function.
pub struct PairScorer {
    name: &'static str,
    description: &'static str,
    f: fn(&BiLayerNetwork, u32, u32) -> f64,
}

impl PairScorer {
    pub const fn new(name: &'static str, description: &'static str, f: fn(&BiLayerNetwork, u32, u32) -> f64) -> Self {
        PairScorer { name, description, f }
    }
}

impl LinkScorer for PairScorer {
    fn name(&self) -> &str {
        self.name
    }

    fn description(&self) -> &str {
        self.description
    }

    fn score(&self, net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
        (self.f)(net, author, topic)
    }
}

pub fn builtin_baselines() -> Vec<PairScorer> {
    vec![
        PairScorer::new("jc", "Jaccard coefficient on the union graph", baselines::score_jc),
        PairScorer::new("aa", "Adamic-Adar index on the union graph", baselines::score_aa),
        PairScorer::new("pa", "preferential attachment on the union graph", baselines::score_pa),
        PairScorer::new("ra", "resource allocation on the union graph", baselines::score_ra),
        PairScorer::new("wra", "weighted resource allocation on the union graph", baselines::score_weighted_ra),
        PairScorer::new("content", "content-based: co-occurrence with the author's topics", baselines::score_content),
        PairScorer::new("cf", "collaborative filtering over co-authors", baselines::score_cf),
    ]
}

/// Name → scorer table. Registration order is preserved.
#[derive(Default)]
pub struct ScorerRegistry {
    scorers: Vec<Box<dyn LinkScorer>>,
}

impl ScorerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Diffusion plus the seven baselines. `semantic` needs topic vectors and
    /// is added with [`ScorerRegistry::register`].
    pub fn with_builtin() -> Self {
        let mut reg = Self::new();
        reg.register(Box::new(Diffusion));
        for s in builtin_baselines() {
            reg.register(Box::new(s));
        }
        reg
    }

    /// Adds a scorer, replacing any existing one with the same name.
    pub fn register(&mut self, scorer: Box<dyn LinkScorer>) {
        match self.scorers.iter().position(|s| s.name() == scorer.name()) {
            Some(i) => self.scorers[i] = scorer,
            None => self.scorers.push(scorer),
        }
    }

    pub fn get(&self, name: &str) -> Result<&dyn LinkScorer> {
        self.scorers
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownMethod(name.to_owned()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.scorers.iter().map(|s| s.name()).collect()
    }

    /// Resolves every name up front; fails on the first unknown one.
    pub fn select(&self, names: &[impl AsRef<str>]) -> Result<Vec<&dyn LinkScorer>> {
        names.iter().map(|n| self.get(n.as_ref())).collect()
    }
}

/// Scores `(author, topic)` pairs with `scorer`. Consecutive pairs sharing an
/// author are scored in one call; results follow input order for any worker
/// count.
pub fn score_pairs(
    scorer: &dyn LinkScorer,
    net: &BiLayerNetwork,
    pairs: &[(u32, u32)],
    workers: usize,
) -> Result<Vec<f64>> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=pairs.len() {
        if i == pairs.len() || pairs[i].0 != pairs[start].0 {
            runs.push(start..i);
            start = i;
        }
    }
    let chunks: Vec<Vec<f64>> = pool::install(workers, || {
        runs.par_iter()
            .map(|r| {
                let topics: Vec<u32> = pairs[r.clone()].iter().map(|p| p.1).collect();
                scorer.score_topics(net, pairs[r.start].0, &topics)
            })
            .collect()
    })?;
    Ok(chunks.into_iter().flatten().collect())
}

/// [`LinkScorer::recommend`] for a batch of author identities; output order
/// follows input order. Identities are all resolved before scoring.
pub fn recommend_all_with(
    scorer: &dyn LinkScorer,
    net: &BiLayerNetwork,
    authors: &[String],
    top_n: usize,
    workers: usize,
) -> Result<Vec<RecommendationList>> {
    let targets = authors
        .iter()
        .map(|a| net.author_by_identity(a).ok_or_else(|| Error::UnknownAuthor(a.clone())))
        .collect::<Result<Vec<_>>>()?;
    pool::install(workers, || {
        targets
            .par_iter()
            .map(|&t| scorer.recommend(net, t, top_n))
            .collect()
    })
}
