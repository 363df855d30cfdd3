//! The bi-layer author/topic network.
//!
//! Three undirected weighted edge sets share two node layers:
//!
//! * `aa` — co-authorship between authors (θ),
//! * `tt` — co-occurrence (or semantic similarity) between topics (φ),
//! * `at` — author–topic incidence (μ), also kept transposed as `ta`.
//!
//! Nodes get dense indices in first-seen order. After construction the
//! network is immutable and can be shared freely between scoring threads.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::artifact::write_atomic;
use crate::csr::Csr;
use crate::error::{Error, Result};
use crate::ingest::{topic_key, BiblioRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Layer {
    Author,
    Topic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub layer: Layer,
    pub index: u32,
}

impl NodeId {
    pub fn author(index: u32) -> Self {
        NodeId {
            layer: Layer::Author,
            index,
        }
    }

    pub fn topic(index: u32) -> Self {
        NodeId {
            layer: Layer::Topic,
            index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TopicLayerKind {
    Cooccurrence,
    Semantic,
}

#[derive(Debug, Clone)]
pub struct BiLayerNetwork {
    author_labels: Vec<String>,
    topic_labels: Vec<String>,
    author_index: HashMap<String, u32>,
    topic_index: HashMap<String, u32>,
    pub(crate) aa: Csr,
    pub(crate) tt: Csr,
    pub(crate) at: Csr,
    pub(crate) ta: Csr,
    topic_layer: TopicLayerKind,
}

/// Registry assigning dense indices in first-seen order.
#[derive(Default)]
struct Interner {
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, key: &str, label: &str) -> u32 {
        if let Some(&i) = self.index.get(key) {
            return i;
        }
        let i = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.index.insert(key.to_owned(), i);
        i
    }
}

fn undirected(counts: HashMap<(u32, u32), f64>) -> Vec<(u32, u32, f64)> {
    counts
        .into_iter()
        .flat_map(|((a, b), w)| [(a, b, w), (b, a, w)])
        .collect()
}

fn ordered(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl BiLayerNetwork {
    /// Builds the network from co-occurrences: every unordered pair of distinct
    /// authors on a record adds 1 to θ, every pair of distinct topics adds 1
    /// to φ, and every author–topic pair adds 1 to μ. Topic tag weights are
    /// not used. Nodes from records without pairs are still registered.
    pub fn build(records: &[BiblioRecord]) -> Self {
        let mut authors = Interner::default();
        let mut topics = Interner::default();
        let mut aa: HashMap<(u32, u32), f64> = HashMap::new();
        let mut tt: HashMap<(u32, u32), f64> = HashMap::new();
        let mut at: HashMap<(u32, u32), f64> = HashMap::new();
        let mut a_ids = Vec::new();
        let mut t_ids = Vec::new();
        for record in records {
            a_ids.clear();
            t_ids.clear();
            a_ids.extend(
                record
                    .authors
                    .iter()
                    .map(|a| authors.intern(a.identity(), a.identity())),
            );
            t_ids.extend(
                record
                    .topics
                    .iter()
                    .map(|t| topics.intern(&t.key(), &t.label)),
            );
            for (i, &a) in a_ids.iter().enumerate() {
                for &b in &a_ids[i + 1..] {
                    if a != b {
                        *aa.entry(ordered(a, b)).or_default() += 1.0;
                    }
                }
                for &t in &t_ids {
                    *at.entry((a, t)).or_default() += 1.0;
                }
            }
            for (i, &s) in t_ids.iter().enumerate() {
                for &t in &t_ids[i + 1..] {
                    if s != t {
                        *tt.entry(ordered(s, t)).or_default() += 1.0;
                    }
                }
            }
        }
        let n_a = authors.labels.len();
        let n_t = topics.labels.len();
        let at = Csr::from_triples(n_a, at.into_iter().map(|((a, t), w)| (a, t, w)).collect());
        let ta = at.transpose(n_t);
        BiLayerNetwork {
            author_labels: authors.labels,
            topic_labels: topics.labels,
            author_index: authors.index,
            topic_index: topics.index,
            aa: Csr::from_triples(n_a, undirected(aa)),
            tt: Csr::from_triples(n_t, undirected(tt)),
            at,
            ta,
            topic_layer: TopicLayerKind::Cooccurrence,
        }
    }

    /// Assembles a network from explicit undirected edge lists over the given
    /// node labels. `aa`/`tt` edges are given once per unordered pair.
    pub fn from_edges(
        author_labels: Vec<String>,
        topic_labels: Vec<String>,
        aa: Vec<(u32, u32, f64)>,
        tt: Vec<(u32, u32, f64)>,
        at: Vec<(u32, u32, f64)>,
    ) -> Result<Self> {
        let n_a = author_labels.len();
        let n_t = topic_labels.len();
        let mut author_index = HashMap::with_capacity(n_a);
        for (i, l) in author_labels.iter().enumerate() {
            if author_index.insert(l.clone(), i as u32).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate author `{l}`")));
            }
        }
        let mut topic_index = HashMap::with_capacity(n_t);
        for (i, l) in topic_labels.iter().enumerate() {
            if topic_index.insert(topic_key(l), i as u32).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate topic `{l}`")));
            }
        }
        let check = |what: &str, edges: &[(u32, u32, f64)], rows: usize, cols: usize, square: bool| {
            let mut seen = std::collections::HashSet::new();
            for &(u, v, w) in edges {
                if u as usize >= rows || v as usize >= cols {
                    return Err(Error::InvalidNetwork(format!("{what} edge ({u},{v}) out of range")));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidNetwork(format!("{what} edge ({u},{v}) has weight {w}")));
                }
                if square && u == v {
                    return Err(Error::InvalidNetwork(format!("{what} self-loop on {u}")));
                }
                let key = if square { ordered(u, v) } else { (u, v) };
                if !seen.insert(key) {
                    return Err(Error::InvalidNetwork(format!("{what} edge ({u},{v}) repeated")));
                }
            }
            Ok(())
        };
        check("author-author", &aa, n_a, n_a, true)?;
        check("topic-topic", &tt, n_t, n_t, true)?;
        check("author-topic", &at, n_a, n_t, false)?;
        let sym = |edges: Vec<(u32, u32, f64)>| {
            edges
                .into_iter()
                .flat_map(|(a, b, w)| [(a, b, w), (b, a, w)])
                .collect()
        };
        let at = Csr::from_triples(n_a, at);
        let ta = at.transpose(n_t);
        Ok(BiLayerNetwork {
            author_labels,
            topic_labels,
            author_index,
            topic_index,
            aa: Csr::from_triples(n_a, sym(aa)),
            tt: Csr::from_triples(n_t, sym(tt)),
            at,
            ta,
            topic_layer: TopicLayerKind::Cooccurrence,
        })
    }

    pub fn author_count(&self) -> usize {
        self.author_labels.len()
    }

    pub fn topic_count(&self) -> usize {
        self.topic_labels.len()
    }

    pub fn author_label(&self, index: u32) -> &str {
        &self.author_labels[index as usize]
    }

    pub fn topic_label(&self, index: u32) -> &str {
        &self.topic_labels[index as usize]
    }

    pub fn author_labels(&self) -> &[String] {
        &self.author_labels
    }

    pub fn topic_labels(&self) -> &[String] {
        &self.topic_labels
    }

    pub fn author_by_identity(&self, identity: &str) -> Option<u32> {
        self.author_index.get(identity).copied()
    }

    /// Looks a topic up by label, ignoring case and whitespace differences.
    pub fn topic_by_label(&self, label: &str) -> Option<u32> {
        self.topic_index.get(&topic_key(label)).copied()
    }

    pub fn topic_layer_kind(&self) -> TopicLayerKind {
        self.topic_layer
    }

    pub fn coauthors(&self) -> &Csr {
        &self.aa
    }

    pub fn cotopics(&self) -> &Csr {
        &self.tt
    }

    pub fn author_topics(&self) -> &Csr {
        &self.at
    }

    pub fn topic_authors(&self) -> &Csr {
        &self.ta
    }

    /// θ(a, b).
    pub fn theta(&self, a: u32, b: u32) -> f64 {
        self.aa.weight(a, b)
    }

    /// φ(s, t).
    pub fn phi(&self, s: u32, t: u32) -> f64 {
        self.tt.weight(s, t)
    }

    /// μ(a, t).
    pub fn mu(&self, a: u32, t: u32) -> f64 {
        self.at.weight(a, t)
    }

    /// Undirected edge counts `(|E_aa|, |E_tt|, |E_at|)`.
    pub fn edge_counts(&self) -> (usize, usize, usize) {
        (self.aa.nnz() / 2, self.tt.nnz() / 2, self.at.nnz())
    }

    /// Degree in the union graph `E_aa ∪ E_tt ∪ E_at`.
    pub fn union_degree(&self, node: NodeId) -> usize {
        match node.layer {
            Layer::Author => self.aa.degree(node.index) + self.at.degree(node.index),
            Layer::Topic => self.tt.degree(node.index) + self.ta.degree(node.index),
        }
    }

    /// Sum of incident weights in the union graph.
    pub fn union_strength(&self, node: NodeId) -> f64 {
        match node.layer {
            Layer::Author => self.aa.row_sum(node.index) + self.at.row_sum(node.index),
            Layer::Topic => self.tt.row_sum(node.index) + self.ta.row_sum(node.index),
        }
    }

    /// Copy with every weight in all three edge sets multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        BiLayerNetwork {
            aa: self.aa.scaled(factor),
            tt: self.tt.scaled(factor),
            at: self.at.scaled(factor),
            ta: self.ta.scaled(factor),
            ..self.clone()
        }
    }

    /// Copy whose topic layer is replaced by cosine similarities between the
    /// supplied topic vectors. Only pairs with similarity above both the floor
    /// and zero become edges; author edges are untouched.
    pub fn with_semantic_layer(&self, cfg: &SemanticLayerConfig) -> Result<Self> {
        let mut unit = Vec::with_capacity(self.topic_count());
        let mut dim = None;
        for label in &self.topic_labels {
            let v = cfg
                .vectors
                .get(&topic_key(label))
                .ok_or_else(|| Error::MissingVector(label.clone()))?;
            let expected = *dim.get_or_insert(v.len());
            if v.is_empty() || v.len() != expected {
                return Err(Error::VectorDimension {
                    label: label.clone(),
                    expected,
                    found: v.len(),
                });
            }
            let sq = v.iter().map(|x| x * x).sum::<f64>();
            if !(sq.is_finite() && sq > 0.0) {
                return Err(Error::ZeroVector(label.clone()));
            }
            unit.push((v.as_slice(), sq));
        }
        let floor = cfg.similarity_floor.max(0.0);
        let n_t = unit.len();
        let upper: Vec<(u32, u32, f64)> = (0..n_t)
            .into_par_iter()
            .map(|i| {
                let (vi, si) = unit[i];
                ((i + 1)..n_t)
                    .filter_map(|j| {
                        let (vj, sj) = unit[j];
                        let dot: f64 = vi.iter().zip(vj).map(|(a, b)| a * b).sum();
                        let cos = dot / (si * sj).sqrt();
                        (cos > floor).then(|| (i as u32, j as u32, cos.min(1.0)))
                    })
                    .collect::<Vec<_>>()
            })
            .flatten()
            .collect();
        let tt = Csr::from_triples(
            n_t,
            upper
                .into_iter()
                .flat_map(|(a, b, w)| [(a, b, w), (b, a, w)])
                .collect(),
        );
        Ok(BiLayerNetwork {
            tt,
            topic_layer: TopicLayerKind::Semantic,
            ..self.clone()
        })
    }

    /// Checks the structural invariants: positive finite weights, no
    /// self-loops, symmetric `aa`/`tt`, and `ta` equal to the transpose of `at`.
    pub fn validate(&self) -> Result<()> {
        for (name, csr) in [("author-author", &self.aa), ("topic-topic", &self.tt)] {
            for (u, v, w) in csr.triples() {
                if u == v {
                    return Err(Error::InvalidNetwork(format!("{name} self-loop on {u}")));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidNetwork(format!("{name} ({u},{v}) weight {w}")));
                }
                if csr.weight(v, u) != w {
                    return Err(Error::InvalidNetwork(format!(
                        "{name} asymmetric: w({u},{v})={w} but w({v},{u})={}",
                        csr.weight(v, u)
                    )));
                }
            }
        }
        for (a, t, w) in self.at.triples() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidNetwork(format!("author-topic ({a},{t}) weight {w}")));
            }
            if self.ta.weight(t, a) != w {
                return Err(Error::InvalidNetwork(format!(
                    "author-topic ({a},{t}) asymmetric"
                )));
            }
        }
        if self.ta.nnz() != self.at.nnz() {
            return Err(Error::InvalidNetwork("author-topic views disagree".into()));
        }
        Ok(())
    }

    /// Writes `aa.tsv`, `tt.tsv`, `at.tsv` (`index\tindex\tweight`, each
    /// undirected edge once, lexicographic by indices) and `authors.tsv`,
    /// `topics.tsv` (`index\tlabel`) into `dir`.
    pub fn write_tsv(&self, dir: &Path, header: Option<&str>) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let edges = |csr: &Csr, upper_only: bool| {
            let mut s = String::new();
            if let Some(h) = header {
                let _ = writeln!(s, "# {h}");
            }
            for (u, v, w) in csr.triples() {
                if !upper_only || u < v {
                    let _ = writeln!(s, "{u}\t{v}\t{w}");
                }
            }
            s
        };
        let labels = |labels: &[String]| {
            let mut s = String::new();
            if let Some(h) = header {
                let _ = writeln!(s, "# {h}");
            }
            for (i, l) in labels.iter().enumerate() {
                let _ = writeln!(s, "{i}\t{}", sanitize_field(l));
            }
            s
        };
        write_atomic(&dir.join("aa.tsv"), edges(&self.aa, true).as_bytes())?;
        write_atomic(&dir.join("tt.tsv"), edges(&self.tt, true).as_bytes())?;
        write_atomic(&dir.join("at.tsv"), edges(&self.at, false).as_bytes())?;
        write_atomic(&dir.join("authors.tsv"), labels(&self.author_labels).as_bytes())?;
        write_atomic(&dir.join("topics.tsv"), labels(&self.topic_labels).as_bytes())?;
        Ok(())
    }

    /// Reads a network previously written by [`BiLayerNetwork::write_tsv`].
    pub fn read_tsv(dir: &Path) -> Result<Self> {
        let read = |name: &str| {
            let p = dir.join(name);
            fs::read_to_string(&p).map_err(|e| Error::io(&p, e)).map(|s| (p, s))
        };
        let labels = |name: &str| -> Result<Vec<String>> {
            let (p, text) = read(name)?;
            let mut out = Vec::new();
            for (n, line) in data_lines(&text) {
                let (idx, label) = line.split_once('\t').ok_or_else(|| parse_err(&p, n, "expected index<TAB>label"))?;
                if idx.parse::<usize>().ok() != Some(out.len()) {
                    return Err(parse_err(&p, n, "indices must be dense and ascending"));
                }
                out.push(label.to_owned());
            }
            Ok(out)
        };
        let edges = |name: &str| -> Result<Vec<(u32, u32, f64)>> {
            let (p, text) = read(name)?;
            data_lines(&text)
                .map(|(n, line)| {
                    let mut it = line.split('\t');
                    let u = it.next().and_then(|s| s.parse().ok());
                    let v = it.next().and_then(|s| s.parse().ok());
                    let w = it.next().and_then(|s| s.parse().ok());
                    match (u, v, w, it.next()) {
                        (Some(u), Some(v), Some(w), None) => Ok((u, v, w)),
                        _ => Err(parse_err(&p, n, "expected index<TAB>index<TAB>weight")),
                    }
                })
                .collect()
        };
        BiLayerNetwork::from_edges(
            labels("authors.tsv")?,
            labels("topics.tsv")?,
            edges("aa.tsv")?,
            edges("tt.tsv")?,
            edges("at.tsv")?,
        )
    }

    /// Reads a pre-built network from a CSV edge list with rows
    /// `layer,source,target,weight` where `layer` is `aa`, `tt` or `at` and
    /// endpoints are author identities / topic labels. A header row starting
    /// with `layer` is optional. Repeated edges have their weights summed.
    pub fn read_csv_edges(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(false)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| csv_err(path, e))?;
        let mut authors = Interner::default();
        let mut topics = Interner::default();
        let mut aa: HashMap<(u32, u32), f64> = HashMap::new();
        let mut tt: HashMap<(u32, u32), f64> = HashMap::new();
        let mut at: HashMap<(u32, u32), f64> = HashMap::new();
        for (n, row) in reader.records().enumerate() {
            let row = row.map_err(|e| csv_err(path, e))?;
            let line = n + 1;
            if row.len() != 4 {
                return Err(parse_err(path, line, "expected layer,source,target,weight"));
            }
            if n == 0 && &row[0] == "layer" {
                continue;
            }
            let w: f64 = row[3]
                .trim()
                .parse()
                .map_err(|_| parse_err(path, line, "bad weight"))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(parse_err(path, line, "weights must be positive"));
            }
            let (src, dst) = (row[1].trim(), row[2].trim());
            match row[0].trim() {
                "aa" => {
                    let (a, b) = (authors.intern(src, src), authors.intern(dst, dst));
                    if a == b {
                        return Err(parse_err(path, line, "self-loop"));
                    }
                    *aa.entry(ordered(a, b)).or_default() += w;
                }
                "tt" => {
                    let a = topics.intern(&topic_key(src), src);
                    let b = topics.intern(&topic_key(dst), dst);
                    if a == b {
                        return Err(parse_err(path, line, "self-loop"));
                    }
                    *tt.entry(ordered(a, b)).or_default() += w;
                }
                "at" => {
                    let a = authors.intern(src, src);
                    let t = topics.intern(&topic_key(dst), dst);
                    *at.entry((a, t)).or_default() += w;
                }
                other => return Err(parse_err(path, line, &format!("unknown layer `{other}`"))),
            }
        }
        let sorted = |m: HashMap<(u32, u32), f64>| {
            let mut v: Vec<_> = m.into_iter().map(|((a, b), w)| (a, b, w)).collect();
            v.sort_unstable_by_key(|&(a, b, _)| (a, b));
            v
        };
        BiLayerNetwork::from_edges(authors.labels, topics.labels, sorted(aa), sorted(tt), sorted(at))
    }
}

fn sanitize_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(path: &Path, line: usize, message: &str) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        message: message.to_owned(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    parse_err(path, line, &e.to_string())
}

/// Topic vectors for the semantic topic layer.
#[derive(Debug, Clone, Default)]
pub struct SemanticLayerConfig {
    /// Keyed by [`topic_key`] of the label.
    pub vectors: HashMap<String, Vec<f64>>,
    pub similarity_floor: f64,
}

impl SemanticLayerConfig {
    pub fn new(vectors: impl IntoIterator<Item = (String, Vec<f64>)>, similarity_floor: f64) -> Self {
        SemanticLayerConfig {
            vectors: vectors
                .into_iter()
                .map(|(label, v)| (topic_key(&label), v))
                .collect(),
            similarity_floor,
        }
    }

    /// Reads `label<TAB>x1<TAB>x2...` (components may also be space separated).
    pub fn read_vectors(path: &Path, similarity_floor: f64) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut vectors = Vec::new();
        for (n, line) in data_lines(&text) {
            let (label, rest) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(path, n, "expected label<TAB>components"))?;
            let v = rest
                .split(|c: char| c == '\t' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| parse_err(path, n, "bad vector component"))?;
            vectors.push((label.to_owned(), v));
        }
        Ok(SemanticLayerConfig::new(vectors, similarity_floor))
    }
}

/// Node/edge counts per layer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkStats {
    pub author_nodes: usize,
    pub topic_nodes: usize,
    pub author_edges: usize,
    pub topic_edges: usize,
    pub author_topic_edges: usize,
    /// Authors with at least one author–topic edge.
    pub author_topic_authors: usize,
    /// Topics with at least one author–topic edge.
    pub author_topic_topics: usize,
    /// Nodes of the bipartite author–topic view:
    /// `author_topic_authors + author_topic_topics`.
    pub author_topic_nodes: usize,
    /// Plain sum of the three edge counts.
    pub total_edges: usize,
    pub papers: usize,
}

impl NetworkStats {
    pub fn of(net: &BiLayerNetwork, records: &[BiblioRecord]) -> Self {
        let (aa, tt, at) = net.edge_counts();
        let at_authors = (0..net.author_count() as u32)
            .filter(|&a| net.at.degree(a) > 0)
            .count();
        let at_topics = (0..net.topic_count() as u32)
            .filter(|&t| net.ta.degree(t) > 0)
            .count();
        NetworkStats {
            author_nodes: net.author_count(),
            topic_nodes: net.topic_count(),
            author_edges: aa,
            topic_edges: tt,
            author_topic_edges: at,
            author_topic_authors: at_authors,
            author_topic_topics: at_topics,
            author_topic_nodes: at_authors + at_topics,
            total_edges: aa + tt + at,
            papers: records.len(),
        }
    }
}
