#![allow(dead_code)]

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vasrev_core::decide::{oracle_reversible, Verdict};
use vasrev_core::{Action, Configuration, IndexSet, ReversibilityCertificate, Run, SubreachabilityGraph, Vas};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cfg(values: &[i64]) -> Configuration {
    Configuration::from_ints(values).unwrap()
}

pub fn act(values: &[i64]) -> Action {
    Action::new(values.to_vec())
}

/// Plain repeated multiplication, kept apart from the library's own
/// exponentiation.
pub fn slow_pow(base: u64, exp: u64) -> BigUint {
    let b = BigUint::from(base);
    let mut acc = BigUint::from(1u32);
    let mut square = b;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &square;
        }
        square = &square * &square;
        e >>= 1;
    }
    acc
}

pub fn norm(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

pub fn random_action(rng: &mut ChaCha8Rng, d: usize, a: i64) -> Action {
    Action::new((0..d).map(|_| rng.gen_range(-a..=a)).collect())
}

/// A system with between one and `max_actions` distinct actions.
pub fn random_vas(rng: &mut ChaCha8Rng, d: usize, a: i64, max_actions: usize) -> Vas {
    let count = rng.gen_range(1..=max_actions);
    let mut actions: Vec<Action> = Vec::new();
    for _ in 0..count * 4 {
        if actions.len() == count {
            break;
        }
        let x = random_action(rng, d, a);
        if !actions.contains(&x) {
            actions.push(x);
        }
    }
    Vas::new(d, actions).unwrap()
}

pub fn random_config(rng: &mut ChaCha8Rng, d: usize, max: i64) -> Configuration {
    cfg(&(0..d).map(|_| rng.gen_range(0..=max)).collect::<Vec<_>>())
}

fn closing_walk(rng: &mut ChaCha8Rng, d: usize, a: i64, closed: bool) -> Option<Vec<Action>> {
    let len = rng.gen_range(1..=3);
    let mut word: Vec<Action> = (0..len).map(|_| random_action(rng, d, a)).collect();
    if closed {
        let sum = vasrev_core::vector::displacement(d, &word).unwrap();
        if sum.iter().any(|&v| v != 0) {
            if norm(&sum) > a as u64 {
                return None;
            }
            word.push(Action::new(sum.iter().map(|v| -v).collect()));
        }
    }
    Some(word)
}

/// The union of one or two walks from a common configuration. Standard
/// graphs use closed walks; projected graphs project away every component
/// the walks move, so the walks close in the projection.
pub fn random_witness_graph(
    rng: &mut ChaCha8Rng,
    d: usize,
    a: i64,
    max_states: usize,
    projected: bool,
) -> SubreachabilityGraph {
    loop {
        let walks: Option<Vec<Vec<Action>>> =
            (0..rng.gen_range(1..=2)).map(|_| closing_walk(rng, d, a, !projected)).collect();
        let Some(walks) = walks else { continue };
        let mut low = vec![0i64; d];
        let mut l = IndexSet::new();
        for w in &walks {
            let mut at = vec![0i64; d];
            for x in w {
                for i in 0..d {
                    at[i] += x.as_slice()[i];
                    low[i] = low[i].min(at[i]);
                }
            }
            for (i, v) in at.iter().enumerate() {
                if *v != 0 {
                    l.insert(i);
                }
            }
        }
        if projected {
            for i in 0..d {
                if rng.gen_bool(0.2) {
                    l.insert(i);
                }
            }
        }
        let start = cfg(&low.iter().map(|v| -v + rng.gen_range(0..=1)).collect::<Vec<_>>());
        let mut states = vec![start.clone()];
        let mut triples = Vec::new();
        for w in &walks {
            let run = Run::execute(&start, w).unwrap().expect("walk stays natural");
            let configs = run.configurations();
            states.extend(configs.iter().cloned());
            for (k, x) in w.iter().enumerate() {
                triples.push((configs[k].clone(), x.clone(), configs[k + 1].clone()));
            }
        }
        let g = SubreachabilityGraph::new(states, triples).unwrap();
        let g = if projected { g.project(&l).unwrap() } else { g };
        if g.num_states() <= max_states {
            assert!(g.is_witness());
            return g;
        }
    }
}

/// A witness graph of random dimension `1..=3` and norm `1..=2`.
pub fn any_witness_graph(rng: &mut ChaCha8Rng, max_states: usize) -> SubreachabilityGraph {
    let d = rng.gen_range(1..=3);
    let a = rng.gen_range(1..=2);
    let projected = rng.gen_bool(0.5);
    random_witness_graph(rng, d, a, max_states, projected)
}

/// A reversible instance found by the box oracle from a random walk.
pub fn random_reversible_witness(
    rng: &mut ChaCha8Rng,
    d: usize,
    a: i64,
    box_size: u64,
) -> (Vas, ReversibilityCertificate) {
    loop {
        let vas = random_vas(rng, d, a, 3);
        let p = random_config(rng, d, 2);
        let mut word = Vec::new();
        let mut at = p.clone();
        for _ in 0..rng.gen_range(0..=3) {
            let x = vas.actions().choose(rng).unwrap().clone();
            if let Ok(Some(next)) = at.step(&x) {
                at = next;
                word.push(x);
            }
        }
        if let Ok(Verdict::Yes(cert)) = oracle_reversible(&vas, &p, &at, box_size) {
            return (vas, cert);
        }
    }
}
