mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use vasrev_core::decide::oracle_reversible;
use vasrev_core::extract::{build_adapted, extract, min_excluding_set};
use vasrev_core::flow::{euler_decompose, is_kirchhoff};
use vasrev_core::pump::forward_limit;
use vasrev_core::reversibility::{characterizations, characterizations_agree, is_reversible, SamplingPolicy};
use vasrev_core::text::{emit_certificate, emit_graph, emit_vas, parse_certificate, parse_graph, parse_vas};
use vasrev_core::vector::{lift_run, project};
use vasrev_core::*;

fn index_set(mask: u8, d: usize) -> IndexSet {
    (0..d).filter(|i| mask >> i & 1 == 1).collect()
}

fn projected_vector(d: usize) -> impl Strategy<Value = ProjectedVector> {
    prop::collection::vec(prop::option::weighted(0.8, -6i64..=6), d)
        .prop_map(|v| ProjectedVector::new(v.into_iter().map(|s| s.map_or(Slot::Star, Slot::Int)).collect()))
}

fn configs(d: usize, max: i64, count: usize) -> impl Strategy<Value = Vec<Configuration>> {
    prop::collection::vec(prop::collection::vec(0..=max, d), 0..=count)
        .prop_map(|xs| xs.iter().map(|x| cfg(x)).collect())
}

fn all_subsets(j: &IndexSet) -> Vec<IndexSet> {
    let items: Vec<usize> = j.iter().collect();
    (0..1u32 << items.len())
        .map(|m| items.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, &i)| i).collect())
        .collect()
}

proptest! {
    #[test]
    fn projections_compose(v in projected_vector(3), a in 0u8..8, b in 0u8..8) {
        let (l1, l2) = (index_set(a, 3), index_set(b, 3));
        let twice = project(&project(&v, &l1).unwrap(), &l2).unwrap();
        prop_assert_eq!(twice, project(&v, &l1.union(&l2)).unwrap());
        prop_assert!(v.leq(&project(&v, &l1).unwrap()).unwrap());
    }

    #[test]
    fn order_is_antisymmetric(u in projected_vector(2), v in projected_vector(2)) {
        if u.projected() == v.projected() && u.leq(&v).unwrap() && v.leq(&u).unwrap() {
            prop_assert_eq!(u, v);
        }
    }

    #[test]
    fn runs_lift_from_projections(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = rng.gen_range(1..=3);
        let vas = random_vas(&mut rng, d, 2, 3);
        let l = index_set(rng.gen_range(0..8), d);
        let word: Vec<Action> = (0..rng.gen_range(0..5))
            .map(|_| vas.actions()[rng.gen_range(0..vas.actions().len())].clone())
            .collect();
        let floor = 2 * word.len() as i64;
        let c = cfg(&(0..d).map(|i| if l.contains(i) { floor + rng.gen_range(0..3) } else { rng.gen_range(0..4) }).collect::<Vec<_>>());
        let projected = Run::execute(&c.project(&l).unwrap(), &word).unwrap();
        match projected {
            Some(p) => {
                let lifted = lift_run(&vas, &c, &l, &word).unwrap();
                prop_assert_eq!(lifted.project(&l).unwrap(), p);
                prop_assert_eq!(lifted.word(), word.as_slice());
            }
            None => prop_assert!(Run::execute(&c, &word).unwrap().is_none()),
        }
    }

    #[test]
    fn sums_of_cycles_decompose(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = any_witness_graph(&mut rng, 5);
        let cycles = g.simple_cycles(10_000).unwrap();
        let mut counts = vec![0u64; g.num_transitions()];
        for c in &cycles {
            let k = rng.gen_range(0..=3);
            for (t, v) in c.parikh(&g).counts().iter().enumerate() {
                counts[t] += k * v;
            }
        }
        prop_assert!(is_kirchhoff(&g, &counts).unwrap());
        let mut sum = vec![0u64; counts.len()];
        for c in euler_decompose(&g, &counts).unwrap() {
            prop_assert!(c.is_cycle());
            for (t, v) in c.parikh(&g).counts().iter().enumerate() {
                sum[t] += v;
            }
        }
        prop_assert_eq!(sum, counts);
    }

    #[test]
    fn extraction_ignores_excluded_projections(xs in configs(3, 10, 3), s in 1u64..=3, a in 0u64..=1) {
        let lambda = build_adapted(3, s, a).unwrap();
        let j = min_excluding_set(&lambda, &xs).unwrap();
        let whole = extract(&lambda, &xs).unwrap();
        prop_assert_eq!(extract(&lambda, &whole).unwrap(), whole.clone());
        for l in all_subsets(&j) {
            let projected: Vec<Configuration> = xs.iter().map(|x| x.project(&l).unwrap()).collect();
            prop_assert_eq!(extract(&lambda, &projected).unwrap(), whole.clone());
        }
    }

    #[test]
    fn forward_limits_survive_iteration(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = rng.gen_range(1..=3);
        let word: Vec<Action> = (0..rng.gen_range(1..=3)).map(|_| random_action(&mut rng, d, 2)).collect();
        let c = Configuration::from_slots(
            (0..d).map(|_| if rng.gen_bool(0.2) { Slot::Star } else { Slot::Int(rng.gen_range(0..5)) }).collect(),
        ).unwrap();
        if let Some(limit) = forward_limit(&word, &c).unwrap() {
            let l = limit.projected();
            for n in 0..=10 {
                let repeated: Vec<Action> = (0..n).flat_map(|_| word.iter().cloned()).collect();
                let run = Run::execute(&c, &repeated).unwrap();
                prop_assert!(run.as_ref().is_some_and(|r| r.last().project(&l).unwrap() == limit));
            }
        }
    }

    #[test]
    fn reversibility_characterizations_agree(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = any_witness_graph(&mut rng, 5);
        let limits = Limits::default();
        prop_assert_eq!(characterizations_agree(&g, &limits).unwrap(), Some(true));
        let found = characterizations(&g, &limits, &SamplingPolicy::default()).unwrap();
        let reversible = is_reversible(&g, &limits).unwrap();
        prop_assert_eq!(found.zero_total, Some(reversible));
        if g.is_standard() {
            prop_assert!(reversible);
        }
    }

    #[test]
    fn systems_and_graphs_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = rng.gen_range(1..=4);
        let vas = random_vas(&mut rng, d, 3, 5);
        prop_assert_eq!(parse_vas(&emit_vas(&vas)).unwrap(), vas);
        let g = any_witness_graph(&mut rng, 6);
        let text = emit_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(emit_graph(&back), text);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn certificates_replay_and_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = rng.gen_range(1..=3);
        let (vas, cert) = random_reversible_witness(&mut rng, d, 2, 8);
        prop_assert!(cert.uses_only(&vas));
        let text = emit_certificate(&cert);
        let back = parse_certificate(&text).unwrap();
        prop_assert!(back.validate().is_ok());
        prop_assert_eq!(emit_certificate(&back), text);
        prop_assert_eq!(back, cert);
    }

    #[test]
    fn decider_agrees_with_box_oracle(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = rng.gen_range(1..=3);
        let vas = random_vas(&mut rng, d, 2, 4);
        let x = random_config(&mut rng, d, 3);
        let y = random_config(&mut rng, d, 3);
        let verdict = decide_reversible(&vas, &x, &y, &SearchPolicy::with_box(12)).unwrap();
        if let Verdict::Yes(cert) = &verdict {
            prop_assert!(cert.validate().is_ok() && cert.uses_only(&vas));
        }
        let oracle = oracle_reversible(&vas, &x, &y, 12).unwrap();
        if let (Some(a), Some(b)) = (verdict.answer(), oracle.answer()) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn domains_are_upward_closed(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let d = rng.gen_range(1..=2);
        let vas = random_vas(&mut rng, d, 2, 3);
        let a = vas.actions()[rng.gen_range(0..vas.actions().len())].clone();
        prop_assert!(is_upward_closed_in_box(&vas, &a, 3).unwrap());
        let r = reversibility_domain_min(&vas, &a, 3).unwrap();
        for (k, e) in r.minimal.iter().enumerate() {
            prop_assert!(e.replays(&a));
            for f in &r.minimal[k + 1..] {
                prop_assert!(!e.config.leq(&f.config).unwrap() && !f.config.leq(&e.config).unwrap());
            }
        }
    }
}

#[test]
fn extraction_stability_exhaustive_in_two_dimensions() {
    let lambda = build_adapted(2, 2, 1).unwrap();
    let points: Vec<Configuration> = (0..=10).flat_map(|x| (0..=10).map(move |y| cfg(&[x, y]))).collect();
    for (k, p) in points.iter().enumerate() {
        for q in &points[k..] {
            let xs = [p.clone(), q.clone()];
            let whole = extract(&lambda, &xs).unwrap();
            for l in all_subsets(&min_excluding_set(&lambda, &xs).unwrap()) {
                let projected: Vec<Configuration> = xs.iter().map(|x| x.project(&l).unwrap()).collect();
                assert_eq!(extract(&lambda, &projected).unwrap(), whole);
            }
        }
    }
}

#[test]
fn short_runs_on_projected_sources() {
    // A witness whose source keeps a star: the pipeline works on projected
    // configurations as well.
    let vas = Vas::from_rows(2, &[&[1, -1], &[-1, 1], &[1, 0]]).unwrap();
    let p = Configuration::from_slots(vec![Slot::Star, Slot::Int(1)]).unwrap();
    let cert = ReversibilityCertificate::from_words(&p, &[act(&[1, -1])], &[act(&[-1, 1])]).unwrap();
    let short = synthesize_short_run(&vas, &cert, &Limits::default()).unwrap();
    assert_eq!(short.run.last(), cert.target());
    assert_eq!(
        vasrev_core::vector::displacement(2, &short.word).unwrap(),
        vec![1, -1]
    );
}
