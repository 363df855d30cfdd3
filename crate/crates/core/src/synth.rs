//! Seeded synthetic corpora and networks for tests, benchmarks and the
//! self-check.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::ingest::{AuthorRef, BiblioRecord, TopicTag};
use crate::network::BiLayerNetwork;

/// Random bi-layer network: each possible edge is present with probability
/// `density` and carries an integer weight in 1..=5.
pub fn random_network(seed: u64, authors: usize, topics: usize, density: f64) -> BiLayerNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Option<f64> {
        rng.gen_bool(density).then(|| rng.gen_range(1..=5) as f64)
    };
    let mut aa = Vec::new();
    for a in 0..authors as u32 {
        for b in (a + 1)..authors as u32 {
            if let Some(w) = draw(&mut rng) {
                aa.push((a, b, w));
            }
        }
    }
    let mut tt = Vec::new();
    for s in 0..topics as u32 {
        for t in (s + 1)..topics as u32 {
            if let Some(w) = draw(&mut rng) {
                tt.push((s, t, w));
            }
        }
    }
    let mut at = Vec::new();
    for a in 0..authors as u32 {
        for t in 0..topics as u32 {
            if let Some(w) = draw(&mut rng) {
                at.push((a, t, w));
            }
        }
    }
    BiLayerNetwork::from_edges(
        (0..authors).map(|i| format!("a{i}")).collect(),
        (0..topics).map(|i| format!("t{i}")).collect(),
        aa,
        tt,
        at,
    )
    .expect("generated edges are valid")
}

/// Random topic vectors for every topic label of `net`, components uniform in
/// [-1, 1).
pub fn random_vectors(seed: u64, net: &BiLayerNetwork, dim: usize) -> Vec<(String, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    net.topic_labels()
        .iter()
        .map(|l| (l.clone(), (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
        .collect()
}

/// Parameters of [`planted_corpus`].
#[derive(Debug, Clone)]
pub struct PlantedConfig {
    pub seed: u64,
    pub groups: usize,
    pub authors_per_group: usize,
    pub topics_per_group: usize,
    pub train_records: usize,
    pub test_records: usize,
    /// Probability that a co-author or topic is drawn from another group.
    pub cross_group_rate: f64,
    /// Probability that a later paper adds a uniformly random topic.
    pub noise_rate: f64,
    pub cutoff_year: i32,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            seed: 2015,
            groups: 8,
            authors_per_group: 40,
            topics_per_group: 30,
            train_records: 1500,
            test_records: 500,
            cross_group_rate: 0.1,
            noise_rate: 0.15,
            cutoff_year: 2015,
        }
    }
}

fn author_ref(id: usize) -> AuthorRef {
    AuthorRef::new(Some(format!("auth{id:05}")), format!("Author {id}"))
}

fn topic_tag(id: usize) -> TopicTag {
    TopicTag::new(&format!("Topic {id:04}"), None).expect("non-empty label")
}

/// Corpus whose later records extend authors along co-author and co-topic
/// paths of the earlier ones.
///
/// Records up to `cutoff_year` come from group-structured collaboration:
/// each author has a few preferred topics of their group. Each later record
/// takes an author from the earlier network and draws its topics by
/// two-step walks in that network, either author → own topic → co-occurring
/// topic, or author → co-author → co-author's topic, with edge-weight
/// proportional steps, plus occasional uniform noise.
pub fn planted_corpus(cfg: &PlantedConfig) -> Vec<BiblioRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_authors = cfg.groups * cfg.authors_per_group;
    let group_of_author = |a: usize| a / cfg.authors_per_group;
    let interests: Vec<Vec<usize>> = (0..n_authors)
        .map(|a| {
            let g = group_of_author(a);
            let k = rng.gen_range(2..=5);
            (0..k)
                .map(|_| {
                    let g = if rng.gen_bool(cfg.cross_group_rate) { rng.gen_range(0..cfg.groups) } else { g };
                    // skew toward the first topics of a group
                    let r: f64 = rng.gen();
                    g * cfg.topics_per_group + ((r * r) * cfg.topics_per_group as f64) as usize
                })
                .collect()
        })
        .collect();

    let mut records = Vec::with_capacity(cfg.train_records + cfg.test_records);
    let first_year = cfg.cutoff_year - 9;
    for i in 0..cfg.train_records {
        let lead = rng.gen_range(0..n_authors);
        let g = group_of_author(lead);
        let mut team = vec![lead];
        for _ in 0..rng.gen_range(0..=3) {
            let other = if rng.gen_bool(cfg.cross_group_rate) {
                rng.gen_range(0..n_authors)
            } else {
                g * cfg.authors_per_group + rng.gen_range(0..cfg.authors_per_group)
            };
            team.push(other);
        }
        let mut topics = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let who = team[rng.gen_range(0..team.len())];
            topics.push(*interests[who].choose(&mut rng).expect("interests non-empty"));
        }
        let year = first_year + (i * 10 / cfg.train_records.max(1)) as i32;
        records.push(BiblioRecord::new(
            format!("train{i}"),
            year,
            team.into_iter().map(author_ref),
            topics.into_iter().map(topic_tag),
        ).0);
    }

    let train = BiLayerNetwork::build(&records);
    let active: Vec<u32> = (0..train.author_count() as u32)
        .filter(|&a| train.author_topics().degree(a) > 0)
        .collect();
    let step = |rng: &mut ChaCha8Rng, row: &[u32], weights: &[f64]| -> Option<u32> {
        if row.is_empty() {
            return None;
        }
        let dist = WeightedIndex::new(weights).ok()?;
        Some(row[dist.sample(rng)])
    };
    for i in 0..cfg.test_records {
        let a = active[rng.gen_range(0..active.len())];
        let mut team = vec![a];
        let mut topics: Vec<u32> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let picked = if rng.gen_bool(0.5) {
                let at = train.author_topics();
                step(&mut rng, at.neighbors(a), at.weights(a)).and_then(|own| {
                    let tt = train.cotopics();
                    step(&mut rng, tt.neighbors(own), tt.weights(own))
                })
            } else {
                let aa = train.coauthors();
                step(&mut rng, aa.neighbors(a), aa.weights(a)).and_then(|c| {
                    team.push(c);
                    let at = train.author_topics();
                    step(&mut rng, at.neighbors(c), at.weights(c))
                })
            };
            topics.extend(picked);
        }
        if rng.gen_bool(cfg.noise_rate) || topics.is_empty() {
            topics.push(rng.gen_range(0..train.topic_count() as u32));
        }
        let year = cfg.cutoff_year + 1 + (i * 5 / cfg.test_records.max(1)) as i32;
        let authors: Vec<AuthorRef> = team
            .iter()
            .map(|&x| {
                let id = train.author_label(x).to_owned();
                AuthorRef::new(Some(id), "")
            })
            .collect();
        let tags: Vec<TopicTag> = topics
            .iter()
            .filter_map(|&t| TopicTag::new(train.topic_label(t), None))
            .collect();
        records.push(BiblioRecord::new(format!("test{i}"), year, authors, tags).0);
    }
    records
}
