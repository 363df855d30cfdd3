//! Small hand-traceable networks used by tests and the self-check.
//!
//! TOY-1: authors {A, B}; topics {T1, T2, T3}; θ(A,B)=1; μ(A,T1)=2,
//! μ(B,T1)=1, μ(B,T2)=1; φ(T1,T2)=1, φ(T1,T3)=3. TOY-2 is TOY-1 with
//! φ(T1,T3)=1.

use crate::network::BiLayerNetwork;

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn toy(phi_t1_t3: f64) -> BiLayerNetwork {
    BiLayerNetwork::from_edges(
        labels(&["A", "B"]),
        labels(&["T1", "T2", "T3"]),
        vec![(0, 1, 1.0)],
        vec![(0, 1, 1.0), (0, 2, phi_t1_t3)],
        vec![(0, 0, 2.0), (1, 0, 1.0), (1, 1, 1.0)],
    )
    .expect("toy network is valid")
}

pub fn toy1() -> BiLayerNetwork {
    toy(3.0)
}

pub fn toy2() -> BiLayerNetwork {
    toy(1.0)
}
