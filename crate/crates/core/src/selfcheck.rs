//! Built-in consistency checks: the hand-traced toy networks and the
//! resource conservation identities on seeded random networks.

use crate::diffusion::{diffuse, finalize, ResourceState};
use crate::network::BiLayerNetwork;
use crate::synth::random_network;
use crate::toy;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, failures: Vec<String>) -> Self {
        CheckOutcome {
            name: name.to_owned(),
            passed: failures.is_empty(),
            detail: failures.join("; "),
        }
    }
}

const TRACE_TOL: f64 = 1e-12;
const CONSERVATION_TOL: f64 = 1e-9;

fn compare(what: &str, got: &[(String, f64)], want: &[(&str, f64)], failures: &mut Vec<String>) {
    let matches = got.len() == want.len()
        && got
            .iter()
            .zip(want)
            .all(|(g, w)| g.0 == w.0 && (g.1 - w.1).abs() <= TRACE_TOL);
    if !matches {
        failures.push(format!("{what}: got {got:?}, want {want:?}"));
    }
}

fn ranked(net: &BiLayerNetwork, author: &str) -> Vec<(String, f64)> {
    match net.author_by_identity(author) {
        Some(a) => finalize(net, &diffuse(net, a, 1.0))
            .entries
            .into_iter()
            .map(|e| (e.topic, e.score))
            .collect(),
        None => Vec::new(),
    }
}

fn labelled(net: &BiLayerNetwork, r: &[(u32, f64)]) -> Vec<(String, f64)> {
    r.iter().map(|&(t, v)| (net.topic_label(t).to_owned(), v)).collect()
}

fn toy1_trace(net: &BiLayerNetwork) -> CheckOutcome {
    let mut failures = Vec::new();
    if let Err(e) = net.validate() {
        failures.push(e.to_string());
    }
    match net.author_by_identity("A") {
        Some(a) => {
            let s = diffuse(net, a, 1.0);
            compare("step 1", &labelled(net, &s.topic_direct), &[("T1", 1.0)], &mut failures);
            compare("step 3", &labelled(net, &s.topic_via_topics), &[("T2", 0.25), ("T3", 0.75)], &mut failures);
            compare("step 4", &labelled(net, &s.topic_via_authors), &[("T1", 0.5), ("T2", 0.5)], &mut failures);
            compare("ranking", &ranked(net, "A"), &[("T2", 0.75), ("T3", 0.75)], &mut failures);
        }
        None => failures.push("author A missing".into()),
    }
    CheckOutcome::new("toy-1 hand trace", failures)
}

fn toy2_trace(net: &BiLayerNetwork) -> CheckOutcome {
    let mut failures = Vec::new();
    if let Err(e) = net.validate() {
        failures.push(e.to_string());
    }
    compare("ranking", &ranked(net, "A"), &[("T2", 1.0), ("T3", 0.5)], &mut failures);
    CheckOutcome::new("toy-2 hand trace", failures)
}

/// Violations of the conservation identities and bounds for one target.
pub fn conservation_violations(net: &BiLayerNetwork, state: &ResourceState) -> Vec<String> {
    let mut out = Vec::new();
    let sum = |r: &[(u32, f64)]| r.iter().map(|x| x.1).sum::<f64>();
    let mut check = |name: &str, got: f64, want: f64| {
        if (got - want).abs() > CONSERVATION_TOL {
            out.push(format!("author {}: {name} {got} != {want}", state.target));
        }
    };
    let r = state.r_init;
    let has_topics = net.author_topics().degree(state.target) > 0;
    let has_coauthors = net.coauthors().degree(state.target) > 0;
    check("step 1 mass", sum(&state.topic_direct), if has_topics { r } else { 0.0 });
    check("step 2 mass", sum(&state.coauthor), if has_coauthors { r } else { 0.0 });
    let step3_source: f64 = state
        .topic_direct
        .iter()
        .filter(|&&(j, _)| net.cotopics().degree(j) > 0)
        .map(|x| x.1)
        .sum();
    check("step 3 mass", sum(&state.topic_via_topics), step3_source);
    let step4_source: f64 = state
        .coauthor
        .iter()
        .filter(|&&(c, _)| net.author_topics().degree(c) > 0)
        .map(|x| x.1)
        .sum();
    check("step 4 mass", sum(&state.topic_via_authors), step4_source);
    let all = [
        &state.topic_direct,
        &state.coauthor,
        &state.topic_via_topics,
        &state.topic_via_authors,
    ];
    if all.iter().any(|r| r.iter().any(|&(_, v)| v.is_nan() || v < 0.0)) {
        out.push(format!("author {}: negative resource", state.target));
    }
    let total: f64 = finalize(net, state).entries.iter().map(|e| e.score).sum();
    if total > 2.0 * r + CONSERVATION_TOL {
        out.push(format!("author {}: final mass {total} exceeds 2r", state.target));
    }
    out
}

fn conservation_suite(fixtures: &[&BiLayerNetwork]) -> CheckOutcome {
    let mut failures = Vec::new();
    let generated: Vec<BiLayerNetwork> = (0..20u64)
        .map(|seed| random_network(seed, 10 + seed as usize, 8 + 2 * seed as usize, 0.08 + 0.01 * seed as f64))
        .collect();
    for net in fixtures.iter().copied().chain(generated.iter()) {
        if let Err(e) = net.validate() {
            failures.push(e.to_string());
            continue;
        }
        for a in 0..net.author_count() as u32 {
            for r in [1.0, 2.5] {
                failures.extend(conservation_violations(net, &diffuse(net, a, r)));
            }
        }
    }
    failures.truncate(5);
    CheckOutcome::new("conservation suite", failures)
}

fn linearity(net: &BiLayerNetwork) -> CheckOutcome {
    let mut failures = Vec::new();
    for a in 0..net.author_count() as u32 {
        let unit = finalize(net, &diffuse(net, a, 1.0));
        let scaled = finalize(net, &diffuse(net, a, 3.0));
        let same_order = unit.entries.iter().map(|e| e.topic_index).eq(scaled.entries.iter().map(|e| e.topic_index));
        let linear = unit
            .entries
            .iter()
            .zip(&scaled.entries)
            .all(|(u, s)| (3.0 * u.score - s.score).abs() <= CONSERVATION_TOL);
        if !same_order || !linear {
            failures.push(format!("author {a}: scores not linear in the initial resource"));
        }
    }
    CheckOutcome::new("initial-resource linearity", failures)
}

/// Runs every check on the given TOY-1 / TOY-2 fixtures.
pub fn run_with(toy1: &BiLayerNetwork, toy2: &BiLayerNetwork) -> Vec<CheckOutcome> {
    vec![
        toy1_trace(toy1),
        toy2_trace(toy2),
        conservation_suite(&[toy1, toy2]),
        linearity(&random_network(99, 25, 25, 0.15)),
    ]
}

pub fn run() -> Vec<CheckOutcome> {
    run_with(&toy::toy1(), &toy::toy2())
}
