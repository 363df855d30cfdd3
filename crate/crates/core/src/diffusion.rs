//! Diffusion-based topic prediction for a target author.
//!
//! The target's initial resource `r` travels four hops:
//!
//! 1. author → own topics, split by μ (Eq. 4 style proportional allocation);
//! 2. a fresh copy of `r` goes author → co-authors, split by θ;
//! 3. each resourced topic passes its share on to neighbouring topics, split
//!    by φ, giving `f_t`;
//! 4. each resourced co-author passes its share to their topics, split by μ,
//!    giving `f_a`.
//!
//! The final score of a topic is `f_t + f_a`, reported only for topics the
//! target is not yet linked to. Mass arriving at a node without onward edges
//! is dropped. There is no iteration: the procedure is exactly these hops.

use std::cell::RefCell;
use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::BiLayerNetwork;
use crate::pool;

/// Sparse resource vector: `(index, amount)` pairs sorted by index, all
/// amounts positive.
pub type Resources = Vec<(u32, f64)>;

pub const DEFAULT_TOP_N: usize = 100;

/// Every intermediate resource map for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceState {
    pub target: u32,
    pub r_init: f64,
    /// f(V_t^j): topics adjacent to the target.
    pub topic_direct: Resources,
    /// f(V_a^c): co-authors of the target.
    pub coauthor: Resources,
    /// f_t(V_t^k): received over topic–topic edges.
    pub topic_via_topics: Resources,
    /// f_a(V_t^k): received from co-authors over author–topic edges.
    pub topic_via_authors: Resources,
    /// `f_t + f_a` for unit initial resource.
    unit_combined: Resources,
}

impl ResourceState {
    /// `f_t + f_a` over every topic that received anything, including topics
    /// already linked to the target.
    ///
    /// Computed for unit resource and scaled once, so that scores for any
    /// `r_init` are exactly `r_init` times the unit scores and tied topics
    /// stay tied.
    pub fn combined(&self) -> Resources {
        scale(&self.unit_combined, self.r_init)
    }
}

fn scale(r: &[(u32, f64)], factor: f64) -> Resources {
    r.iter().map(|&(i, v)| (i, v * factor)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecEntry {
    pub topic: String,
    pub topic_index: u32,
    pub score: f64,
}

/// Ranked unconnected topics for one author, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList {
    pub target: String,
    pub entries: Vec<RecEntry>,
}

/// Dense scratch buffer that remembers which slots were written.
struct Accumulator {
    values: Vec<f64>,
    touched: Vec<u32>,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            values: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn reset(&mut self, len: usize) {
        for &i in &self.touched {
            self.values[i as usize] = 0.0;
        }
        self.touched.clear();
        if self.values.len() < len {
            self.values.resize(len, 0.0);
        }
    }

    #[inline]
    fn add(&mut self, index: u32, amount: f64) {
        let slot = &mut self.values[index as usize];
        if *slot == 0.0 {
            self.touched.push(index);
        }
        *slot += amount;
    }

    fn drain_sorted(&mut self) -> Resources {
        self.touched.sort_unstable();
        self.touched.dedup();
        let out = self
            .touched
            .iter()
            .map(|&i| (i, self.values[i as usize]))
            .filter(|&(_, v)| v > 0.0)
            .collect();
        for &i in &self.touched {
            self.values[i as usize] = 0.0;
        }
        self.touched.clear();
        out
    }
}

thread_local! {
    static SCRATCH: RefCell<Accumulator> = RefCell::new(Accumulator::new());
}

fn split(row: impl Iterator<Item = (u32, f64)>, total: f64, amount: f64) -> Resources {
    if total <= 0.0 || amount <= 0.0 {
        return Vec::new();
    }
    row.map(|(i, w)| (i, w / total * amount)).collect()
}

/// Step 1: the target's resource split over its topics in proportion to μ.
pub fn step1_author_to_topics(net: &BiLayerNetwork, target: u32, r_init: f64) -> Resources {
    let at = net.author_topics();
    split(at.row(target), at.row_sum(target), r_init)
}

/// Step 2: a fresh copy of the target's resource split over its co-authors in
/// proportion to θ.
pub fn step2_author_to_coauthors(net: &BiLayerNetwork, target: u32, r_init: f64) -> Resources {
    let aa = net.coauthors();
    split(aa.row(target), aa.row_sum(target), r_init)
}

fn spread(csr: &crate::csr::Csr, sources: &[(u32, f64)], width: usize, acc: &mut Accumulator) -> Resources {
    acc.reset(width);
    for &(j, amount) in sources {
        let total = csr.row_sum(j);
        if total <= 0.0 || amount <= 0.0 {
            continue;
        }
        for (k, w) in csr.row(j) {
            acc.add(k, w / total * amount);
        }
    }
    acc.drain_sorted()
}

/// Step 3: every resourced topic passes its amount to neighbouring topics in
/// proportion to φ; returns `f_t`.
pub fn step3_topic_to_topics(net: &BiLayerNetwork, topic_direct: &[(u32, f64)]) -> Resources {
    SCRATCH.with(|s| spread(net.cotopics(), topic_direct, net.topic_count(), &mut s.borrow_mut()))
}

/// Step 4: every resourced co-author passes its amount to their topics in
/// proportion to μ; returns `f_a`.
pub fn step4_coauthors_to_topics(net: &BiLayerNetwork, coauthor: &[(u32, f64)]) -> Resources {
    SCRATCH.with(|s| spread(net.author_topics(), coauthor, net.topic_count(), &mut s.borrow_mut()))
}

/// Runs steps 1–4 for `target`.
pub fn diffuse(net: &BiLayerNetwork, target: u32, r_init: f64) -> ResourceState {
    let topic_direct = step1_author_to_topics(net, target, 1.0);
    let coauthor = step2_author_to_coauthors(net, target, 1.0);
    let topic_via_topics = step3_topic_to_topics(net, &topic_direct);
    let topic_via_authors = step4_coauthors_to_topics(net, &coauthor);
    let unit_combined = merge_sum(&topic_via_topics, &topic_via_authors);
    if r_init == 1.0 {
        return ResourceState {
            target,
            r_init,
            topic_direct,
            coauthor,
            topic_via_topics,
            topic_via_authors,
            unit_combined,
        };
    }
    ResourceState {
        target,
        r_init,
        topic_direct: scale(&topic_direct, r_init),
        coauthor: scale(&coauthor, r_init),
        topic_via_topics: scale(&topic_via_topics, r_init),
        topic_via_authors: scale(&topic_via_authors, r_init),
        unit_combined,
    }
}

/// Merges two sorted sparse vectors, summing shared indices.
pub(crate) fn merge_sum(a: &[(u32, f64)], b: &[(u32, f64)]) -> Resources {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Orders by score descending, then topic index ascending.
pub(crate) fn rank_order(a: &(u32, f64), b: &(u32, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// Builds a ranked list from `(topic, score)` pairs, dropping topics the
/// target is linked to and non-positive scores.
pub(crate) fn ranked_list(
    net: &BiLayerNetwork,
    target: u32,
    scores: impl IntoIterator<Item = (u32, f64)>,
    top_n: usize,
) -> RecommendationList {
    let linked = net.author_topics().neighbors(target);
    let mut kept: Vec<(u32, f64)> = scores
        .into_iter()
        .filter(|&(t, s)| s > 0.0 && linked.binary_search(&t).is_err())
        .collect();
    if top_n < kept.len() {
        kept.select_nth_unstable_by(top_n, rank_order);
        kept.truncate(top_n);
    }
    kept.sort_unstable_by(rank_order);
    RecommendationList {
        target: net.author_label(target).to_owned(),
        entries: kept
            .into_iter()
            .map(|(t, score)| RecEntry {
                topic: net.topic_label(t).to_owned(),
                topic_index: t,
                score,
            })
            .collect(),
    }
}

/// Step 5: final scores `f_t + f_a` on topics not linked to the target,
/// ranked. The list is not truncated.
///
/// Ranking uses the unit-resource scores, so the order is the same for every
/// `r_init` even where scaling rounds two nearly equal scores together.
pub fn finalize(net: &BiLayerNetwork, state: &ResourceState) -> RecommendationList {
    let mut list = ranked_list(net, state.target, state.unit_combined.iter().copied(), usize::MAX);
    for e in &mut list.entries {
        e.score *= state.r_init;
    }
    list
}

/// Top `top_n` recommendations for the author with the given identity, with
/// unit initial resource.
pub fn recommend(net: &BiLayerNetwork, author: &str, top_n: usize) -> Result<RecommendationList> {
    let target = net
        .author_by_identity(author)
        .ok_or_else(|| Error::UnknownAuthor(author.to_owned()))?;
    Ok(recommend_index(net, target, top_n))
}

pub fn recommend_index(net: &BiLayerNetwork, target: u32, top_n: usize) -> RecommendationList {
    if top_n == 0 {
        return RecommendationList {
            target: net.author_label(target).to_owned(),
            entries: Vec::new(),
        };
    }
    let state = diffuse(net, target, 1.0);
    ranked_list(net, target, state.combined(), top_n)
}

/// [`recommend`] for every author in `authors`, on `workers` threads. Output
/// order follows input order and does not depend on the worker count. Every
/// identity is resolved before any scoring starts.
pub fn recommend_all(
    net: &BiLayerNetwork,
    authors: &[String],
    top_n: usize,
    workers: usize,
) -> Result<Vec<RecommendationList>> {
    let targets = authors
        .iter()
        .map(|a| {
            net.author_by_identity(a)
                .ok_or_else(|| Error::UnknownAuthor(a.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    pool::install(workers, || {
        targets
            .par_iter()
            .map(|&t| recommend_index(net, t, top_n))
            .collect()
    })
}
