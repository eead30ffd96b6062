mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use tangle_core::dp::{self, Objective, SpaceMode};
use tangle_core::fpt;
use tangle_core::hardness::{self, Shape};
use tangle_core::perm::simulate_removal;
use tangle_core::render::render_svg;
use tangle_core::sbt::{self, GreedySorter};
use tangle_core::tree::RootedTree;
use tangle_core::witness::{Verdict, Witness};
use tangle_core::{Permutation, Transposition};

fn perm_of_len(lo: usize, hi: usize) -> impl Strategy<Value = Permutation> {
    (lo..=hi)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|xs| Permutation::new(xs).unwrap())
}

fn transposition_for(n: usize) -> impl Strategy<Value = Transposition> {
    let moves: Vec<Transposition> = common::transpositions(n)
        .into_iter()
        .map(|(i, j, k)| Transposition::new(i, j, k).unwrap())
        .collect();
    proptest::sample::select(moves)
}

fn tree(shape: Shape, lo: usize, hi: usize) -> impl Strategy<Value = RootedTree> {
    (any::<u64>(), lo..=hi).prop_map(move |(seed, n)| hardness::random_instance(seed, n, shape).unwrap())
}

fn exhaustive_min(t: &RootedTree, objective: Objective) -> usize {
    common::all_orders(t)
        .iter()
        .map(|o| match objective {
            Objective::Blocks => common::blocks(o),
            Objective::Breakpoints => common::breakpoints(o),
        })
        .min()
        .unwrap()
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn blocks_and_breakpoints_differ_by_at_most_one(p in perm_of_len(1, 12)) {
        let (bp, bl) = (p.breakpoints(), p.blocks());
        // the two boundary pairs add up to two, so `blocks - 1 <= bp <= blocks + 1`
        prop_assert!(bp.abs_diff(bl) <= 1);
        prop_assert!(bl - 1 <= bp);
        prop_assert_eq!(bp, common::breakpoints(p.as_slice()));
        prop_assert_eq!(bl, common::blocks(p.as_slice()));
        prop_assert_eq!(bp == 0, p.is_identity());
        prop_assert_eq!(bl == 1, p.is_identity());
    }

    #[test]
    fn one_transposition_moves_counts_by_at_most_three(
        (p, t) in perm_of_len(2, 10).prop_flat_map(|p| { let n = p.len(); (Just(p), transposition_for(n)) })
    ) {
        let q = p.apply(&t).unwrap();
        prop_assert!(q.breakpoints().abs_diff(p.breakpoints()) <= 3);
        prop_assert!(q.blocks().abs_diff(p.blocks()) <= 3);
        prop_assert_eq!(q.apply(&t.inverse()).unwrap(), p);
    }

    #[test]
    fn removal_simulation_commutes(
        (p, seq, value) in perm_of_len(2, 8).prop_flat_map(|p| {
            let n = p.len();
            (Just(p), proptest::collection::vec(transposition_for(n), 0..=4), 1..=n)
        })
    ) {
        let sim = simulate_removal(&p, &seq, value).unwrap();
        prop_assert!(sim.len() <= seq.len());
        let lhs = p.apply_all(&seq).unwrap().remove(value).unwrap();
        let rhs = p.remove(value).unwrap().apply_all(&sim).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shifting_next_to_a_neighbour_never_adds_breakpoints(
        (p, x) in perm_of_len(2, 10).prop_flat_map(|p| { let n = p.len(); (Just(p), 1..=n) })
    ) {
        for shifted in [p.shift_after_predecessor(x).unwrap(), p.shift_before_successor(x).unwrap()] {
            prop_assert!(shifted.breakpoints() <= p.breakpoints());
        }
        let before = p.shift_after_predecessor(x).unwrap();
        if before != p {
            prop_assert_eq!(before.glue().ok(), p.remove(x).unwrap().glue().ok());
        }
    }

    #[test]
    fn greedy_sorts_within_breakpoint_count(p in perm_of_len(1, 12)) {
        let r = sbt::greedy_sort(&p);
        prop_assert!(r.distance <= p.breakpoints());
        prop_assert!(sbt::verify_sequence(&p, &r.sequence, r.distance).unwrap());
    }

    #[test]
    fn bounded_search_finds_exactly_the_distance(p in perm_of_len(1, 7)) {
        let d = sbt::exact_distance(&p).unwrap().distance;
        prop_assert!(d >= p.transposition_lower_bound());
        prop_assert!(sbt::greedy_sort(&p).distance <= 3 * d.max(1) || d == 0);
        let found = sbt::fpt_sort(&p, d).expect("distance is reachable");
        prop_assert_eq!(found.distance, d);
        prop_assert!(sbt::verify_sequence(&p, &found.sequence, d).unwrap());
        if d > 0 {
            prop_assert!(sbt::fpt_sort(&p, d - 1).is_none());
        }
    }

    #[test]
    fn padding_keeps_the_glued_permutation(p in perm_of_len(2, 20)) {
        prop_assume!(!p.is_identity());
        let padded = hardness::pad_permutation(&p);
        prop_assert!((padded.len() + 1).is_power_of_two());
        prop_assert!(padded.len() >= p.len());
        prop_assert_eq!(padded.glue().unwrap(), p.glue().unwrap());
    }

    #[test]
    fn newick_round_trips(t in tree(Shape::Arbitrary, 1, 30)) {
        let text = t.to_string();
        let back = RootedTree::parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back.leaf_count(), t.leaf_count());
    }

    #[test]
    fn random_shapes_have_requested_structure(seed in any::<u64>(), n in 1usize..40, p in 0u32..6) {
        let b = hardness::random_instance(seed, n, Shape::Binary).unwrap();
        prop_assert!(b.is_binary() || n == 1);
        prop_assert_eq!(b.leaf_count(), n);
        prop_assert_eq!(&b, &hardness::random_instance(seed, n, Shape::Binary).unwrap());
        let c = hardness::random_instance(seed, 1 << p, Shape::Complete).unwrap();
        prop_assert!(c.is_complete_binary());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_matches_brute_force(t in tree(Shape::Arbitrary, 1, 6)) {
        let listed: Vec<Permutation> = t.enumerate_orders().unwrap().collect();
        let expected: u128 = t.internal_nodes().map(|v| factorial(t.children(v).len())).product();
        prop_assert_eq!(listed.len() as u128, expected);
        prop_assert_eq!(t.order_count(), Some(expected));
        let listed_set: HashSet<Vec<usize>> = listed.iter().map(|p| p.as_slice().to_vec()).collect();
        prop_assert_eq!(listed_set.len(), listed.len());
        let brute: HashSet<Vec<usize>> = common::all_orders(&t).into_iter().collect();
        prop_assert_eq!(&listed_set, &brute);
        let n = t.leaf_count();
        for xs in itertools::Itertools::permutations(1..=n, n) {
            let p = Permutation::new(xs.clone()).unwrap();
            prop_assert_eq!(t.is_consistent(&p).unwrap(), brute.contains(&xs));
        }
    }

    #[test]
    fn binary_dp_is_optimal(t in tree(Shape::Binary, 1, 8)) {
        for objective in [Objective::Blocks, Objective::Breakpoints] {
            let got = dp::min_blocks_binary(&t, objective).unwrap();
            prop_assert_eq!(got.value, exhaustive_min(&t, objective));
            prop_assert!(t.is_consistent(&got.permutation).unwrap());
        }
    }

    #[test]
    fn complete_dp_agrees_with_binary(seed in any::<u64>(), p in 0u32..7) {
        let t = hardness::random_instance(seed, 1 << p, Shape::Complete).unwrap();
        for objective in [Objective::Blocks, Objective::Breakpoints] {
            let want = dp::min_blocks_binary(&t, objective).unwrap();
            for mode in [SpaceMode::Full, SpaceMode::Compact] {
                let got = dp::min_blocks_complete_with(&t, objective, mode).unwrap();
                prop_assert_eq!(got.value, want.value);
                prop_assert!(t.is_consistent(&got.permutation).unwrap());
            }
        }
    }

    #[test]
    fn end_pair_oracle_matches_enumeration(t in tree(Shape::Arbitrary, 1, 7)) {
        prop_assert_eq!(common::min_blocks_by_ends(&t), exhaustive_min(&t, Objective::Blocks));
    }

    #[test]
    fn cherry_tree_adds_two_breakpoints(t in tree(Shape::Arbitrary, 1, 6), k in 0usize..6) {
        let inst = hardness::build_bp_tree(&t, k);
        prop_assert_eq!(inst.threshold, k + 2);
        let blocks = exhaustive_min(&t, Objective::Blocks);
        prop_assert_eq!(exhaustive_min(&inst.tree, Objective::Breakpoints), blocks + 2);
    }

    #[test]
    fn sibling_contraction_is_safe(t in tree(Shape::Binary, 1, 7), k in 0usize..4) {
        let table = common::Distances::new(t.leaf_count());
        let opt = common::all_orders(&t).iter().map(|o| table.get(o)).min().unwrap();
        let (reduced, trace) = fpt::reduce_rule1(&t);
        let small = fpt::solve(&reduced, k).unwrap();
        prop_assert_eq!(small.is_some(), opt <= k);
        if let Some(w) = small {
            let lifted = trace.lift(&w);
            prop_assert_eq!(lifted.check(&t, Some(k)).unwrap(), Verdict::Valid);
        }
    }

    #[test]
    fn witnesses_round_trip_and_render(t in tree(Shape::Binary, 1, 40)) {
        let w = dp::approximate_otbcm(&t, &GreedySorter).unwrap();
        prop_assert_eq!(w.check(&t, None).unwrap(), Verdict::Valid);
        let back = Witness::parse(&w.to_text()).unwrap();
        prop_assert_eq!(&back, &w);
        let svg = render_svg(&t, &w, None).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let crossings = doc.descendants().filter(|n| n.attribute("class") == Some("crossing")).count();
        prop_assert_eq!(crossings, w.len());
        let edges = doc.descendants().filter(|n| n.attribute("class") == Some("edge")).count();
        prop_assert_eq!(edges, t.leaf_count());
    }
}
