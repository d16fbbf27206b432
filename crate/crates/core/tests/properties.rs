use proptest::prelude::*;

use twvrp_core::binpack::{solve_plain, BinPackingInstance};
use twvrp_core::compact::{solve_by_clients, ClientOptions};
use twvrp_core::cvrp_dp::{simple_edges, solve_cvrp_tw, solve_cvrp_tw_nice, CvrpOptions};
use twvrp_core::decomposition::{decompose_with_ordering, nicify_with, validate};
use twvrp_core::limits::OracleLimits;
use twvrp_core::oracle::{oracle_cvrp, oracle_vrp};
use twvrp_core::reductions::{from_binpacking, from_ntdm, random_instance, NtdmMode, RandomSpec, UNARY_CAP};
use twvrp_core::vrp_dp::solve_vrp_tw;
use twvrp_core::{contract_zero_edges, emit_instance, parse_instance, verify_routing, verify_routing_with, Routing, Variant, VerifyOptions, VrpInstance};

fn limits() -> OracleLimits {
    OracleLimits { max_vertices: 8, max_edge_copies: 20, max_clients: 9, max_vehicles: 4 }
}

fn small(variant: Variant) -> RandomSpec {
    RandomSpec { vertices: (1, 6), max_edges: 8, weights: (1, 3), vehicles: (0, 3), variant, treewidth_two: true, gas_cap: (0, 8), ..RandomSpec::default() }
}

fn capacitated() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::LoadCvrp), Just(Variant::GasCvrp), Just(Variant::LoadGasCvrp)]
}

fn weight(s: Option<twvrp_core::vrp_dp::Solution>) -> Option<u64> {
    s.map(|s| s.weight)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_text_round_trips(seed in any::<u64>(), variant in prop_oneof![Just(Variant::Vrp), Just(Variant::Evrp), capacitated()]) {
        let inst = random_instance(&small(variant), seed);
        let text = emit_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(emit_instance(&back), text);
    }

    #[test]
    fn more_vehicles_never_cost_more(seed in any::<u64>(), variant in capacitated()) {
        let mut inst = random_instance(&small(variant), seed);
        let a = weight(solve_cvrp_tw(&inst, None).unwrap());
        inst.vehicles += 1;
        let b = weight(solve_cvrp_tw(&inst, None).unwrap());
        match (a, b) {
            (Some(a), Some(b)) => prop_assert!(b <= a),
            (Some(_), None) => prop_assert!(false, "feasible with k but not k+1"),
            _ => {}
        }
        let mut v = random_instance(&RandomSpec { variant: Variant::Vrp, ..small(Variant::Vrp) }, seed);
        let a = weight(solve_vrp_tw(&v, None).unwrap());
        v.vehicles += 1;
        let b = weight(solve_vrp_tw(&v, None).unwrap());
        prop_assert!(a.is_none() || b.is_some_and(|b| Some(b) <= a));
    }

    #[test]
    fn optimum_ignores_the_decomposition(seed in any::<u64>(), variant in capacitated(), shuffle in any::<u64>()) {
        let inst = random_instance(&small(variant), seed);
        let n = inst.n();
        // a deterministic but arbitrary elimination order
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (v as u64).wrapping_mul(shuffle | 1).rotate_left(17));
        let td = decompose_with_ordering(&inst.graph, &order);
        prop_assert!(validate(&td, &inst.graph).is_empty());
        prop_assert_eq!(weight(solve_cvrp_tw(&inst, Some(&td)).unwrap()), weight(solve_cvrp_tw(&inst, None).unwrap()));
        let mut v = inst.clone();
        v.variant = Variant::Vrp;
        v.load_cap = None;
        v.gas_cap = None;
        v.demands = None;
        prop_assert_eq!(weight(solve_vrp_tw(&v, Some(&td)).unwrap()), weight(solve_vrp_tw(&v, None).unwrap()));
    }

    #[test]
    fn loose_budgets_match_the_uncapacitated_optimum(seed in any::<u64>()) {
        let v = random_instance(&small(Variant::Vrp), seed);
        // a load budget covering every client leaves the walks unconstrained
        let mut c = v.clone();
        c.variant = Variant::LoadCvrp;
        c.load_cap = Some(c.clients.len().max(1) as u64);
        c.demands = Some(c.clients.iter().map(|&x| (x, 1)).collect());
        prop_assert_eq!(weight(solve_vrp_tw(&v, None).unwrap()), weight(solve_cvrp_tw(&c, None).unwrap()));
    }

    #[test]
    fn evrp_matches_oracle(seed in any::<u64>()) {
        let spec = RandomSpec { vertices: (1, 6), max_edges: 8, weights: (1, 5), vehicles: (0, 3), variant: Variant::Evrp, edge_cap: (0, 2), ..RandomSpec::default() };
        let inst = random_instance(&spec, seed);
        let dp = solve_vrp_tw(&inst, None).unwrap();
        let or = oracle_vrp(&inst, &limits(), &VerifyOptions::default()).unwrap();
        prop_assert_eq!(dp.as_ref().map(|s| s.weight), or.map(|o| o.weight));
        if let Some(s) = dp {
            let rep = verify_routing(&inst, &s.routing);
            prop_assert!(rep.feasible, "{:?}", rep.violations);
        }
    }

    #[test]
    fn contraction_keeps_the_optimum(seed in any::<u64>(), variant in prop_oneof![Just(Variant::Vrp), Just(Variant::GasCvrp)]) {
        let spec = RandomSpec { weights: (0, 2), ..small(variant) };
        let inst = random_instance(&spec, seed);
        let (contracted, map) = contract_zero_edges(&inst).unwrap();
        prop_assert_eq!(map.len(), inst.n());
        let opts = VerifyOptions::default();
        let (a, b) = if variant == Variant::Vrp {
            (oracle_vrp(&inst, &limits(), &opts).unwrap(), oracle_vrp(&contracted, &limits(), &opts).unwrap())
        } else {
            (oracle_cvrp(&inst, &limits(), &opts).unwrap(), oracle_cvrp(&contracted, &limits(), &opts).unwrap())
        };
        prop_assert_eq!(a.map(|o| o.weight), b.map(|o| o.weight));
    }

    #[test]
    fn strict_zero_length_walks_agree(seed in any::<u64>(), variant in prop_oneof![Just(Variant::Vrp), capacitated()]) {
        let inst = random_instance(&small(variant), seed);
        let strict = VerifyOptions { zero_length_walks_visit: false };
        let opts = ClientOptions { verify: strict, ..ClientOptions::default() };
        let cl = solve_by_clients(&inst, &opts).unwrap();
        let or = if variant == Variant::Vrp { oracle_vrp(&inst, &limits(), &strict) } else { oracle_cvrp(&inst, &limits(), &strict) }.unwrap();
        prop_assert_eq!(cl.as_ref().map(|s| s.weight), or.as_ref().map(|o| o.weight));
        if let Some(s) = cl {
            prop_assert!(verify_routing_with(&inst, &s.routing, &strict).feasible);
        }
    }

    #[test]
    fn reducibility_cross_check_holds(seed in any::<u64>()) {
        let inst = random_instance(&small(Variant::LoadGasCvrp), seed);
        let td = twvrp_core::decomposition::heuristic_decompose(&inst.graph);
        let nd = nicify_with(&td, &inst.graph, simple_edges(&inst)).unwrap();
        let checked = solve_cvrp_tw_nice(&inst, &nd, &CvrpOptions { cross_check_reducible: true }, &VerifyOptions::default()).unwrap();
        prop_assert_eq!(weight(checked), weight(solve_cvrp_tw(&inst, None).unwrap()));
    }

    #[test]
    fn dropping_a_serving_walk_breaks_feasibility(seed in any::<u64>(), variant in capacitated()) {
        let inst = random_instance(&small(variant), seed);
        if let Some(s) = solve_cvrp_tw(&inst, None).unwrap() {
            prop_assert!(verify_routing(&inst, &s.routing).feasible);
            if let Some(&w) = s.routing.assignment.values().next() {
                let mut broken: Routing = s.routing.clone();
                broken.walks.remove(w);
                broken.assignment.retain(|_, x| *x != w);
                for x in broken.assignment.values_mut() {
                    if *x > w {
                        *x -= 1;
                    }
                }
                prop_assert!(!verify_routing(&inst, &broken).feasible);
            }
        }
    }

    #[test]
    fn bin_packing_gadget_matches_bin_packing(sizes in prop::collection::vec(1u64..=3, 1..=3), capacity in 1u64..=4, bins in 1usize..=2) {
        let bp = BinPackingInstance { sizes, capacity, bins };
        let packable = solve_plain(&bp).unwrap().is_some();
        let gadget = from_binpacking(&bp, Variant::LoadCvrp, UNARY_CAP).unwrap();
        let r = gadget.instance.weight_bound.unwrap();
        let sol = solve_cvrp_tw(&gadget.instance, None).unwrap();
        prop_assert_eq!(sol.as_ref().is_some_and(|s| s.weight <= r), packable);
        if let Some(s) = sol.filter(|s| s.weight <= r) {
            prop_assert_eq!(s.weight, r);
            let groups = gadget.bins_from(&s.routing);
            prop_assert!(groups.iter().all(|g| g.iter().map(|&i| bp.sizes[i]).sum::<u64>() <= capacity));
        }
    }
}

#[test]
fn matching_gadget_weights_carry_tags() {
    let inst: VrpInstance = from_ntdm(&[1, 2, 3], &[10, 11, 12], &[20, 22, 21], 34, NtdmMode::Weights).unwrap();
    let tags: Vec<u64> = inst.graph.edges.iter().map(|e| e.weight % 64).collect();
    assert_eq!(tags, vec![1, 1, 1, 4, 4, 4, 16, 16, 16]);
    let total: u64 = inst.graph.edges.iter().map(|e| 2 * e.weight).sum();
    assert_eq!(Some(total), inst.weight_bound);
    assert_eq!(inst.gas_cap, Some(2 * (64 * 34 + 21)));
}
