//! Community-level summaries of recommendation lists.
//!
//! Community labels come from outside (a two-column TSV of identity and
//! community id). For each author community we count, per topic, how many
//! distinct members were recommended it, and measure how concentrated those
//! counts are with Shannon entropy and the Herfindahl–Hirschman index.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::diffusion::RecommendationList;
use crate::error::{Error, Result};
use crate::ingest::topic_key;
use crate::network::{BiLayerNetwork, Layer};

#[derive(Debug, Clone)]
pub struct CommunityAssignment {
    pub kind: Layer,
    map: HashMap<String, u32>,
}

impl CommunityAssignment {
    /// Topic identities are matched case-insensitively, like topic labels.
    pub fn new(kind: Layer, entries: impl IntoIterator<Item = (String, u32)>) -> Self {
        let map = entries
            .into_iter()
            .map(|(id, c)| (Self::normalize(kind, &id), c))
            .collect();
        CommunityAssignment { kind, map }
    }

    fn normalize(kind: Layer, id: &str) -> String {
        match kind {
            Layer::Author => id.trim().to_owned(),
            Layer::Topic => topic_key(id),
        }
    }

    /// Reads `identity<TAB>community` lines; `#` comments and blank lines are
    /// skipped.
    pub fn read_tsv(path: &Path, kind: Layer) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = line
                .rsplit_once('\t')
                .and_then(|(id, c)| c.trim().parse::<u32>().ok().map(|c| (id.to_owned(), c)));
            match parsed {
                Some(e) => entries.push(e),
                None => {
                    return Err(Error::Parse {
                        path: path.to_owned(),
                        line: n + 1,
                        message: "expected identity<TAB>community-id".into(),
                    })
                }
            }
        }
        Ok(Self::new(kind, entries))
    }

    pub fn community_of(&self, identity: &str) -> Option<u32> {
        self.map.get(&Self::normalize(self.kind, identity)).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Member count per community id.
    pub fn sizes(&self) -> BTreeMap<u32, usize> {
        let mut sizes = BTreeMap::new();
        for &c in self.map.values() {
            *sizes.entry(c).or_default() += 1;
        }
        sizes
    }

    /// Every mapped identity must be a node of the matching layer.
    pub fn check_against(&self, net: &BiLayerNetwork) -> Result<()> {
        let mut unknown: Vec<&String> = self
            .map
            .keys()
            .filter(|id| match self.kind {
                Layer::Author => net.author_by_identity(id).is_none(),
                Layer::Topic => net.topic_by_label(id).is_none(),
            })
            .collect();
        unknown.sort();
        match unknown.first() {
            None => Ok(()),
            Some(first) => Err(Error::InvalidAssignment(format!(
                "{} identities not in the network, e.g. `{first}`",
                unknown.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diversity {
    /// Natural-log Shannon entropy of the count shares.
    pub entropy: f64,
    /// Sum of squared count shares.
    pub hhi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityDigest {
    pub community: u32,
    pub size: usize,
    /// `(topic, distinct members recommended it)`, count descending then label.
    pub topic_counts: Vec<(String, usize)>,
    /// `None` when no member received any recommendation.
    pub diversity: Option<Diversity>,
}

/// Entropy and HHI of a set of counts.
pub fn diversity_of(counts: impl IntoIterator<Item = usize>) -> Result<Diversity> {
    let counts: Vec<f64> = counts.into_iter().filter(|&c| c > 0).map(|c| c as f64).collect();
    let total: f64 = counts.iter().sum();
    if counts.is_empty() {
        return Err(Error::EmptyCounts);
    }
    let (mut entropy, mut hhi) = (0.0, 0.0);
    for c in counts {
        let share = c / total;
        entropy -= share * share.ln();
        hhi += share * share;
    }
    Ok(Diversity {
        entropy: entropy.max(0.0),
        hhi,
    })
}

pub fn diversity(digest: &CommunityDigest) -> Result<Diversity> {
    diversity_of(digest.topic_counts.iter().map(|(_, c)| *c))
}

/// Aggregation output plus the authors that had no community.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregation {
    pub digests: Vec<CommunityDigest>,
    pub unmapped_authors: usize,
}

/// Per author community, the number of distinct members whose first `top_n`
/// recommendations include each topic. Communities are listed by id.
pub fn aggregate_by_community(recs: &[RecommendationList], authors: &CommunityAssignment, top_n: usize) -> Aggregation {
    // community -> topic key -> (display label, members)
    let mut counts: BTreeMap<u32, HashMap<String, (String, HashSet<&str>)>> = BTreeMap::new();
    let mut unmapped = 0;
    for list in recs {
        let Some(c) = authors.community_of(&list.target) else {
            unmapped += 1;
            continue;
        };
        let by_topic = counts.entry(c).or_default();
        for e in list.entries.iter().take(top_n) {
            by_topic
                .entry(topic_key(&e.topic))
                .or_insert_with(|| (e.topic.clone(), HashSet::new()))
                .1
                .insert(list.target.as_str());
        }
    }
    if unmapped > 0 {
        log::warn!("{unmapped} recommendation lists belong to authors without a community");
    }
    let sizes = authors.sizes();
    let digests = sizes
        .iter()
        .map(|(&community, &size)| {
            let mut topic_counts: Vec<(String, usize)> = counts
                .remove(&community)
                .unwrap_or_default()
                .into_values()
                .map(|(label, members)| (label, members.len()))
                .collect();
            topic_counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let diversity = diversity_of(topic_counts.iter().map(|(_, c)| *c)).ok();
            CommunityDigest {
                community,
                size,
                topic_counts,
                diversity,
            }
        })
        .collect();
    Aggregation {
        digests,
        unmapped_authors: unmapped,
    }
}

/// Author-community × topic-community incidence counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossDistribution {
    pub author_communities: Vec<u32>,
    pub topic_communities: Vec<u32>,
    /// `cells[i][j]`: recommendations from author community `i` whose topic is
    /// in topic community `j`.
    pub cells: Vec<Vec<u64>>,
    /// Incidences dropped because the topic had no community.
    pub unmapped_topics: u64,
    pub unmapped_authors: usize,
}

impl CrossDistribution {
    pub fn row_sums(&self) -> Vec<u64> {
        self.cells.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn to_csv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            let _ = writeln!(out, "# {h}");
        }
        out.push_str("author_community");
        for c in &self.topic_communities {
            let _ = write!(out, ",topic_{c}");
        }
        out.push('\n');
        for (c, row) in self.author_communities.iter().zip(&self.cells) {
            let _ = write!(out, "{c}");
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn cross_distribution(
    recs: &[RecommendationList],
    authors: &CommunityAssignment,
    topics: &CommunityAssignment,
    top_n: usize,
) -> CrossDistribution {
    let author_communities: Vec<u32> = authors.sizes().into_keys().collect();
    let topic_communities: Vec<u32> = topics.sizes().into_keys().collect();
    let row_of: HashMap<u32, usize> = author_communities.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let col_of: HashMap<u32, usize> = topic_communities.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut cells = vec![vec![0u64; topic_communities.len()]; author_communities.len()];
    let (mut unmapped_topics, mut unmapped_authors) = (0, 0);
    for list in recs {
        let Some(ac) = authors.community_of(&list.target) else {
            unmapped_authors += 1;
            continue;
        };
        let row = row_of[&ac];
        for e in list.entries.iter().take(top_n) {
            match topics.community_of(&e.topic) {
                Some(tc) => cells[row][col_of[&tc]] += 1,
                None => unmapped_topics += 1,
            }
        }
    }
    CrossDistribution {
        author_communities,
        topic_communities,
        cells,
        unmapped_topics,
        unmapped_authors,
    }
}
