//! Comparison scorers for author–topic pairs.
//!
//! The link-prediction indices (JC, AA, PA, RA, weighted RA) treat the three
//! edge sets as one undirected union graph, so a pair `(a, t)` has two kinds
//! of common neighbour: co-authors of `a` who work on `t`, and topics of `a`
//! that co-occur with `t`. The two recommender baselines use only one of
//! those channels each: content-based sums φ over the author's topics, and
//! collaborative filtering sums θ·μ over co-authors.

use crate::network::{BiLayerNetwork, Layer, NodeId};

/// A common neighbour `z` of an author–topic pair with the weights of its two
/// connecting edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonNeighbor {
    pub node: NodeId,
    pub to_author: f64,
    pub to_topic: f64,
}

fn intersect(
    a: &[u32],
    aw: &[f64],
    b: &[u32],
    bw: &[f64],
    mut f: impl FnMut(u32, f64, f64),
) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                f(a[i], aw[i], bw[j]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Calls `f` for every common neighbour of `(author, topic)` in the union
/// graph: co-authors first, then topics, each in index order.
pub fn for_each_common_neighbor(net: &BiLayerNetwork, author: u32, topic: u32, mut f: impl FnMut(CommonNeighbor)) {
    let (aa, at, ta, tt) = (net.coauthors(), net.author_topics(), net.topic_authors(), net.cotopics());
    intersect(
        aa.neighbors(author),
        aa.weights(author),
        ta.neighbors(topic),
        ta.weights(topic),
        |c, wa, wt| {
            f(CommonNeighbor {
                node: NodeId::author(c),
                to_author: wa,
                to_topic: wt,
            })
        },
    );
    intersect(
        at.neighbors(author),
        at.weights(author),
        tt.neighbors(topic),
        tt.weights(topic),
        |s, wa, wt| {
            f(CommonNeighbor {
                node: NodeId::topic(s),
                to_author: wa,
                to_topic: wt,
            })
        },
    );
}

/// Neighbours of any node in the union graph, authors before topics.
pub fn union_neighbors(net: &BiLayerNetwork, node: NodeId) -> Vec<(NodeId, f64)> {
    let (same, cross) = match node.layer {
        Layer::Author => (net.coauthors(), net.author_topics()),
        Layer::Topic => (net.cotopics(), net.topic_authors()),
    };
    let same = same.row(node.index).map(|(i, w)| {
        let id = NodeId { layer: node.layer, index: i };
        (id, w)
    });
    let cross = cross.row(node.index).map(|(i, w)| {
        let layer = match node.layer {
            Layer::Author => Layer::Topic,
            Layer::Topic => Layer::Author,
        };
        (NodeId { layer, index: i }, w)
    });
    let mut out: Vec<_> = same.chain(cross).collect();
    out.sort_by_key(|&(id, _)| id);
    out
}

/// Common neighbours of two arbitrary nodes in the union graph, sorted.
pub fn common_neighbors(net: &BiLayerNetwork, x: NodeId, y: NodeId) -> Vec<NodeId> {
    let ny = union_neighbors(net, y);
    union_neighbors(net, x)
        .into_iter()
        .map(|(id, _)| id)
        .filter(|id| ny.binary_search_by_key(id, |&(n, _)| n).is_ok())
        .collect()
}

/// Jaccard coefficient: |Γ(a) ∩ Γ(t)| / |Γ(a) ∪ Γ(t)|.
pub fn score_jc(net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
    let mut common = 0usize;
    for_each_common_neighbor(net, author, topic, |_| common += 1);
    let union = net.union_degree(NodeId::author(author)) + net.union_degree(NodeId::topic(topic)) - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

/// Adamic–Adar contribution of a common neighbour with the given degree.
/// Degree-1 nodes contribute 0 instead of dividing by ln 1.
pub fn adamic_adar_weight(degree: usize) -> f64 {
    if degree <= 1 {
        0.0
    } else {
        1.0 / (degree as f64).ln()
    }
}

/// Adamic–Adar: Σ 1/ln deg(z) over common neighbours.
pub fn score_aa(net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
    let mut s = 0.0;
    for_each_common_neighbor(net, author, topic, |z| s += adamic_adar_weight(net.union_degree(z.node)));
    s
}

/// Preferential attachment: deg(a)·deg(t).
pub fn score_pa(net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
    (net.union_degree(NodeId::author(author)) * net.union_degree(NodeId::topic(topic))) as f64
}

/// Resource allocation: Σ 1/deg(z) over common neighbours.
pub fn score_ra(net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
    let mut s = 0.0;
    for_each_common_neighbor(net, author, topic, |z| s += 1.0 / net.union_degree(z.node) as f64);
    s
}

/// Weighted resource allocation: Σ w(a,z)·w(z,t)/strength(z).
pub fn score_weighted_ra(net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
    let mut s = 0.0;
    for_each_common_neighbor(net, author, topic, |z| {
        s += z.to_author * z.to_topic / net.union_strength(z.node)
    });
    s
}

/// Content-based: Σ φ(t', t) over the author's topics t'.
pub fn score_content(net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
    let (at, tt) = (net.author_topics(), net.cotopics());
    let mut s = 0.0;
    intersect(
        at.neighbors(author),
        at.weights(author),
        tt.neighbors(topic),
        tt.weights(topic),
        |_, _, phi| s += phi,
    );
    s
}

/// Collaborative filtering: Σ θ(a,c)·μ(c,t) over co-authors c.
pub fn score_cf(net: &BiLayerNetwork, author: u32, topic: u32) -> f64 {
    let (aa, ta) = (net.coauthors(), net.topic_authors());
    let mut s = 0.0;
    intersect(
        aa.neighbors(author),
        aa.weights(author),
        ta.neighbors(topic),
        ta.weights(topic),
        |_, theta, mu| s += theta * mu,
    );
    s
}
