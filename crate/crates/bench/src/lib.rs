//! Fixed inputs shared by the benchmarks.

use vasrev_core::{Action, Configuration, ReversibilityCertificate, SubreachabilityGraph, Vas};

pub fn cfg(values: &[i64]) -> Configuration {
    Configuration::from_ints(values).expect("natural values")
}

pub fn act(values: &[i64]) -> Action {
    Action::new(values.to_vec())
}

/// Four configurations in dimension 3 joined by five steps.
pub fn figure_graph() -> SubreachabilityGraph {
    let t = |x: &[i64], a: &[i64], y: &[i64]| (cfg(x), act(a), cfg(y));
    SubreachabilityGraph::new(
        [cfg(&[1, 1, 0]), cfg(&[0, 2, 1]), cfg(&[1, 0, 1]), cfg(&[0, 1, 2])],
        [
            t(&[1, 1, 0], &[-1, 1, 1], &[0, 2, 1]),
            t(&[0, 2, 1], &[1, -1, -1], &[1, 1, 0]),
            t(&[0, 1, 2], &[1, -1, -1], &[1, 0, 1]),
            t(&[0, 2, 1], &[0, -1, 1], &[0, 1, 2]),
            t(&[1, 0, 1], &[0, 1, -1], &[1, 1, 0]),
        ],
    )
    .expect("valid graph")
}

/// Tokens moving around a ring of `d` places, plus one that can be created.
pub fn ring(d: usize) -> Vas {
    let mut actions: Vec<Action> = (0..d)
        .map(|i| {
            let mut v = vec![0; d];
            v[i] = -1;
            v[(i + 1) % d] = 1;
            Action::new(v)
        })
        .collect();
    let mut grow = vec![0; d];
    grow[0] = 1;
    actions.push(Action::new(grow));
    Vas::new(d, actions).expect("valid system")
}

/// `(1,0,..) -> (0,..,1) -> (1,0,..)` around the ring.
pub fn ring_certificate(d: usize) -> ReversibilityCertificate {
    let vas = ring(d);
    let mut p = vec![0; d];
    p[0] = 1;
    let forward: Vec<Action> = vas.actions()[..d - 1].to_vec();
    let back = vec![vas.actions()[d - 1].clone()];
    ReversibilityCertificate::from_words(&cfg(&p), &forward, &back).expect("valid loop")
}
