//! Independent reference implementations used by the integration tests.
//! Everything here is deliberately naive: dense matrices, string-keyed maps
//! and pairwise enumeration.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use knowtraj::ingest::{topic_key, BiblioRecord};
use knowtraj::BiLayerNetwork;

pub type Matrix = Vec<Vec<f64>>;

pub struct Dense {
    pub theta: Matrix,
    pub phi: Matrix,
    pub mu: Matrix,
}

impl Dense {
    pub fn of(net: &BiLayerNetwork) -> Self {
        let (n_a, n_t) = (net.author_count() as u32, net.topic_count() as u32);
        Dense {
            theta: (0..n_a).map(|a| (0..n_a).map(|b| net.theta(a, b)).collect()).collect(),
            phi: (0..n_t).map(|s| (0..n_t).map(|t| net.phi(s, t)).collect()).collect(),
            mu: (0..n_a).map(|a| (0..n_t).map(|t| net.mu(a, t)).collect()).collect(),
        }
    }

    /// Same network with the topic layer replaced by cosine similarities
    /// above `max(floor, 0)`.
    pub fn with_cosine_layer(mut self, vectors: &[Vec<f64>], floor: f64) -> Self {
        let n = vectors.len();
        let cut = floor.max(0.0);
        for i in 0..n {
            for j in 0..n {
                self.phi[i][j] = if i == j {
                    0.0
                } else {
                    let c = cosine(&vectors[i], &vectors[j]);
                    if c > cut {
                        c
                    } else {
                        0.0
                    }
                };
            }
        }
        self
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Rows divided by their sums; all-zero rows stay zero.
pub fn row_normalise(m: &Matrix) -> Matrix {
    m.iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            row.iter().map(|&x| if s > 0.0 { x / s } else { 0.0 }).collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vecmat(v: &[f64], m: &Matrix) -> Vec<f64> {
    let cols = m.first().map_or(0, Vec::len);
    let mut out = vec![0.0; cols];
    for (i, &x) in v.iter().enumerate() {
        if x != 0.0 {
            for (o, &y) in out.iter_mut().zip(&m[i]) {
                *o += x * y;
            }
        }
    }
    out
}

/// Per-hop resources for one target, as dense vectors.
pub struct OracleState {
    pub topic_direct: Vec<f64>,
    pub coauthor: Vec<f64>,
    pub topic_via_topics: Vec<f64>,
    pub topic_via_authors: Vec<f64>,
    /// Final score for unlinked topics, 0 for linked ones.
    pub score: Vec<f64>,
}

pub fn oracle_diffuse(d: &Dense, target: usize, r: f64) -> OracleState {
    let p_at = row_normalise(&d.mu);
    let p_aa = row_normalise(&d.theta);
    let p_tt = row_normalise(&d.phi);
    let topic_direct: Vec<f64> = p_at[target].iter().map(|x| x * r).collect();
    let coauthor: Vec<f64> = p_aa[target].iter().map(|x| x * r).collect();
    let topic_via_topics = vecmat(&topic_direct, &p_tt);
    let topic_via_authors = vecmat(&coauthor, &p_at);
    let score = topic_via_topics
        .iter()
        .zip(&topic_via_authors)
        .zip(&d.mu[target])
        .map(|((a, b), &m)| if m > 0.0 { 0.0 } else { a + b })
        .collect();
    OracleState {
        topic_direct,
        coauthor,
        topic_via_topics,
        topic_via_authors,
        score,
    }
}

/// Sparse resources expanded to a dense vector of length `n`.
pub fn densify(r: &[(u32, f64)], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for &(i, v) in r {
        out[i as usize] += v;
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// AUC by enumerating every (positive, negative) pair; ties count one half.
pub fn pairwise_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &p in pos {
        for &n in neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() as f64 * neg.len() as f64)
}

/// Co-occurrence counts straight from records, keyed by identity strings:
/// unordered author pairs, unordered topic-key pairs, (author, topic key).
#[derive(Default, Debug)]
pub struct Cooccurrence {
    pub aa: BTreeMap<(String, String), f64>,
    pub tt: BTreeMap<(String, String), f64>,
    pub at: BTreeMap<(String, String), f64>,
    pub authors: BTreeSet<String>,
    pub topics: BTreeSet<String>,
}

fn sorted_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_owned(), b.to_owned())
    } else {
        (b.to_owned(), a.to_owned())
    }
}

pub fn count_cooccurrence(records: &[BiblioRecord]) -> Cooccurrence {
    let mut c = Cooccurrence::default();
    for r in records {
        let authors: BTreeSet<String> = r.authors.iter().map(|a| a.identity().to_owned()).collect();
        let topics: BTreeSet<String> = r.topics.iter().map(|t| topic_key(&t.label)).collect();
        for a in &authors {
            for b in &authors {
                if a < b {
                    *c.aa.entry(sorted_pair(a, b)).or_default() += 1.0;
                }
            }
            for t in &topics {
                *c.at.entry((a.clone(), t.clone())).or_default() += 1.0;
            }
        }
        for s in &topics {
            for t in &topics {
                if s < t {
                    *c.tt.entry(sorted_pair(s, t)).or_default() += 1.0;
                }
            }
        }
        c.authors.extend(authors);
        c.topics.extend(topics);
    }
    c
}

/// Node of the union graph, tagged by layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum U {
    A(u32),
    T(u32),
}

/// Union graph E_aa ∪ E_tt ∪ E_at as weighted adjacency maps.
pub struct UnionGraph {
    pub adj: HashMap<U, BTreeMap<U, f64>>,
}

impl UnionGraph {
    pub fn of(net: &BiLayerNetwork) -> Self {
        let d = Dense::of(net);
        let mut adj: HashMap<U, BTreeMap<U, f64>> = HashMap::new();
        let n_a = d.theta.len();
        let n_t = d.phi.len();
        for a in 0..n_a {
            adj.entry(U::A(a as u32)).or_default();
            for b in 0..n_a {
                if d.theta[a][b] > 0.0 {
                    adj.get_mut(&U::A(a as u32)).unwrap().insert(U::A(b as u32), d.theta[a][b]);
                }
            }
            for t in 0..n_t {
                if d.mu[a][t] > 0.0 {
                    adj.get_mut(&U::A(a as u32)).unwrap().insert(U::T(t as u32), d.mu[a][t]);
                    adj.entry(U::T(t as u32)).or_default().insert(U::A(a as u32), d.mu[a][t]);
                }
            }
        }
        for s in 0..n_t {
            adj.entry(U::T(s as u32)).or_default();
            for t in 0..n_t {
                if d.phi[s][t] > 0.0 {
                    adj.get_mut(&U::T(s as u32)).unwrap().insert(U::T(t as u32), d.phi[s][t]);
                }
            }
        }
        UnionGraph { adj }
    }

    pub fn neighbours(&self, x: U) -> BTreeSet<U> {
        self.adj[&x].keys().copied().collect()
    }

    pub fn degree(&self, x: U) -> usize {
        self.adj[&x].len()
    }

    pub fn strength(&self, x: U) -> f64 {
        self.adj[&x].values().sum()
    }

    pub fn weight(&self, x: U, y: U) -> f64 {
        self.adj[&x].get(&y).copied().unwrap_or(0.0)
    }

    pub fn jc(&self, a: u32, t: u32) -> f64 {
        let (x, y) = (self.neighbours(U::A(a)), self.neighbours(U::T(t)));
        let union = x.union(&y).count();
        if union == 0 {
            0.0
        } else {
            x.intersection(&y).count() as f64 / union as f64
        }
    }

    pub fn common(&self, a: u32, t: u32) -> Vec<U> {
        let (x, y) = (self.neighbours(U::A(a)), self.neighbours(U::T(t)));
        x.intersection(&y).copied().collect()
    }

    pub fn aa(&self, a: u32, t: u32) -> f64 {
        self.common(a, t)
            .into_iter()
            .map(|z| {
                let k = self.degree(z) as f64;
                if k > 1.0 {
                    1.0 / k.ln()
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn ra(&self, a: u32, t: u32) -> f64 {
        self.common(a, t).into_iter().map(|z| 1.0 / self.degree(z) as f64).sum()
    }

    pub fn wra(&self, a: u32, t: u32) -> f64 {
        self.common(a, t)
            .into_iter()
            .map(|z| self.weight(U::A(a), z) * self.weight(z, U::T(t)) / self.strength(z))
            .sum()
    }

    pub fn pa(&self, a: u32, t: u32) -> f64 {
        (self.degree(U::A(a)) * self.degree(U::T(t))) as f64
    }
}

/// Content-based and collaborative-filtering scores from dense matrices.
pub fn dense_content(d: &Dense, a: usize, t: usize) -> f64 {
    (0..d.phi.len()).filter(|&s| d.mu[a][s] > 0.0).map(|s| d.phi[s][t]).sum()
}

pub fn dense_cf(d: &Dense, a: usize, t: usize) -> f64 {
    (0..d.theta.len()).map(|c| d.theta[a][c] * d.mu[c][t]).sum()
}
