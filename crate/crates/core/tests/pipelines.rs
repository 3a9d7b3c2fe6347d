use proptest::prelude::*;
use randopt::graphopt::{exact_optimum, greedy_clique_in_order, SubsetKind};
use randopt::instances::{gen_er_graph, gen_gaussian_tensor, gen_ksat, make_interpolation_path};
use randopt::ksat::{dpll_solve, enumerate_solutions, is_satisfying, parse_dimacs, to_dimacs, walksat, Verdict};
use randopt::ogp::{overlap_histogram, sample_near_optima, Metric, Model, SamplerConfig};
use randopt::spin::{brute_force_ground_state, energy, metropolis_chain, BetaSchedule};
use randopt::{BitConfig, Instance, RngStream};

#[test]
fn instance_bytes_round_trip_for_every_kind() {
    let rng = RngStream::new(3, "it/roundtrip");
    let instances = [
        Instance::Graph(gen_er_graph(30, 0.3, &rng.child("g")).unwrap()),
        Instance::Tensor(gen_gaussian_tensor(9, 3, &rng.child("t")).unwrap()),
        Instance::KSat(gen_ksat(20, 80, 3, &rng.child("f")).unwrap()),
    ];
    for inst in instances {
        let back = Instance::from_bytes(&inst.to_bytes()).unwrap();
        assert_eq!(back.content_hash(), inst.content_hash());
        assert_eq!(back.to_bytes(), inst.to_bytes());
    }
}

#[test]
fn solvers_agree_through_dimacs() {
    for s in 0..40 {
        let f = gen_ksat(16, 64, 3, &RngStream::new(s, "it/dimacs")).unwrap();
        let g = parse_dimacs(&to_dimacs(&f)).unwrap();
        let sat = !enumerate_solutions(&g).unwrap().is_empty();
        let d = dpll_solve(&g, None).unwrap();
        assert_eq!(d.verdict.is_sat(), sat);
        if let Verdict::Sat(a) = d.verdict {
            assert!(is_satisfying(&f, &a).unwrap());
        }
        let w = walksat(&g, 20_000, 0.5, &RngStream::new(s, "it/walksat")).unwrap();
        if let Some(a) = w.assignment {
            assert!(sat && is_satisfying(&f, &a).unwrap());
        }
    }
}

#[test]
fn annealing_never_beats_the_ground_state() {
    for s in 0..10 {
        let j = gen_gaussian_tensor(12, 2, &RngStream::new(s, "it/anneal")).unwrap();
        let (g, e) = brute_force_ground_state(&j).unwrap();
        assert!((energy(&j, &g).unwrap() - e).abs() < 1e-12);
        let chain = metropolis_chain(&j, BetaSchedule::Linear { start: 0.1, end: 5.0 }, 200, &RngStream::new(s, "it/chain")).unwrap();
        assert!(chain.best_energy <= e + 1e-12);
    }
}

#[test]
fn exhaustive_level_set_matches_brute_force() {
    let j = gen_gaussian_tensor(10, 2, &RngStream::new(5, "it/level")).unwrap();
    let (_, ground) = brute_force_ground_state(&j).unwrap();
    let level = 0.8 * ground;
    let model = Model::spin_glass(j.clone());
    let set = sample_near_optima(&model, level, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "unused")).unwrap();
    let expected = (0..1u64 << 10)
        .filter(|&m| {
            let s = randopt::spin::SpinConfig::from_bits(&BitConfig::from_mask(10, m));
            energy(&j, &s).unwrap() >= level
        })
        .count();
    assert_eq!(set.len(), expected);
    let hist = overlap_histogram(&set, Metric::Overlap, 20).unwrap();
    assert!((hist.masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn path_positions_keep_the_edge_count_law(seed in 0u64..1000, frac in 0.0f64..=1.0) {
        let base = gen_er_graph(12, 0.5, &RngStream::new(seed, "it/path")).unwrap();
        let path = make_interpolation_path(Instance::Graph(base), &RngStream::new(seed, "it/path-steps"));
        let t = (frac * path.len() as f64).round() as usize;
        let inst = path.instance_at(t).unwrap();
        let again = path.instance_at(t).unwrap();
        prop_assert_eq!(inst.content_hash(), again.content_hash());
        prop_assert!(inst.as_graph().unwrap().edge_count() <= 66);
    }

    #[test]
    fn greedy_clique_is_maximal_and_below_optimum(seed in 0u64..1000, p in 0.2f64..0.8) {
        let g = gen_er_graph(24, p, &RngStream::new(seed, "it/greedy")).unwrap();
        let order: Vec<usize> = (0..24).collect();
        let c = greedy_clique_in_order(&g, &order);
        prop_assert!(c.verify(&g) && c.is_maximal(&g));
        prop_assert!(c.size() <= exact_optimum(&g, SubsetKind::Clique).unwrap().size());
    }
}
