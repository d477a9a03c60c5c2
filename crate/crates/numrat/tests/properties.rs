//! Cross-module contracts on seeded random configurations: properties that
//! couple several modules and so do not belong to any single unit suite.

mod common;

use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use numrat::adjunction::{chi_a_mod_j, chi_restriction};
use numrat::birational::{blowdown, blowup, pullback, pushforward};
use numrat::catalogue::{cyclic, random_log_terminal, random_order_config};
use numrat::discrepancy::{classify, is_log_terminal_graph, surface_discrepancies};
use numrat::lattice::{frac, rat, Divisor, Rational, VertexId};
use numrat::model::ResolutionGraph;

use common::{admissible_centers, random_divisor};

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Lowering a ramification index to any divisor of it never flips the
    /// log terminal classification from true to false while the vertex has
    /// a nonpositive discrepancy: the criterion min a_i e_i > -1 can only
    /// move up when an e_i with a_i <= 0 shrinks.
    #[test]
    fn lowering_a_ramification_index_keeps_log_terminal(seed in 0u64..1000) {
        let config = random_order_config(seed, 6, 4).unwrap();
        let cls = classify(&config).unwrap();
        prop_assert!(cls.log_terminal);
        let ram: Vec<(VertexId, u32)> =
            config.ramified_vertices().map(|(v, e)| (v.clone(), e)).collect();
        for (v, e) in ram {
            if cls.a.get(&v).unwrap().is_positive() {
                continue;
            }
            for lower in 1..e {
                if e % lower != 0 {
                    continue;
                }
                let mut lowered = config.clone();
                lowered.set_exc_index(&v, lower).unwrap();
                if !lowered.validate().ok() {
                    // The lowered index can break node comparability with a
                    // neighbouring index; such configs are out of scope.
                    continue;
                }
                let recls = classify(&lowered).unwrap();
                prop_assert!(
                    recls.log_terminal,
                    "seed {} vertex {} index {} -> {}",
                    seed, v, e, lower
                );
            }
        }
    }

    /// Exact linear solving inverts the pairing vector: reading off
    /// pair(D, E_j) for all j and solving the intersection system returns
    /// exactly the coefficients of D, including non-integral ones.
    #[test]
    fn solve_inverts_the_pairing_vector(seed in 0u64..2000) {
        let graph = random_log_terminal(seed, 7, 5).unwrap();
        let form = graph.intersection_form();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xBEEF);
        let d = Divisor::from_coeffs(form.ids().iter().map(|id| {
            (id.clone(), frac(rng.random_range(-6..=6i64), rng.random_range(1..=3i64)))
        }));
        let rhs: Vec<Rational> = form
            .ids()
            .iter()
            .map(|id| form.pair_with_vertex(&d, id).unwrap())
            .collect();
        let solved = form.solve(&rhs).unwrap();
        for (i, id) in form.ids().iter().enumerate() {
            prop_assert_eq!(solved[i].clone(), d.coeff(id));
        }
    }

    /// Transport contracts of a single blowup, over every admissible
    /// centre: pullback preserves all pairings (projection formula),
    /// pushforward inverts pullback, and blowing the new curve back down
    /// restores the configuration exactly.
    #[test]
    fn blowup_transport_contracts(seed in 0u64..400) {
        let base = random_order_config(seed, 5, 4).unwrap();
        let base_form = base.graph.intersection_form();
        let ids = base.graph.vertex_ids();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB10C);
        for center in admissible_centers(&base) {
            let (blown, map) = blowup(&base, &center).unwrap();
            let top_form = blown.graph.intersection_form();
            for _ in 0..4 {
                let d = random_divisor(&mut rng, &ids, 3);
                let e = random_divisor(&mut rng, &ids, 3);
                let (du, eu) = (pullback(&map, &d), pullback(&map, &e));
                prop_assert_eq!(
                    top_form.pair(&du, &eu).unwrap(),
                    base_form.pair(&d, &e).unwrap()
                );
                prop_assert_eq!(pushforward(&map, &du), d);
            }
            let (back, _) = blowdown(&blown, &map.vertex).unwrap();
            prop_assert_eq!(back, base.clone());
        }
    }

    /// chi is quadratic with the intersection pairing as its polar form:
    /// chi(E+F) - chi(E) - chi(F) = -r^2 pair(E, F) on random orders.
    #[test]
    fn chi_cross_term_is_the_pairing(seed in 0u64..500) {
        let config = random_order_config(seed, 6, 4).unwrap();
        let ids = config.graph.vertex_ids();
        let form = config.graph.intersection_form();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC4055);
        for _ in 0..4 {
            let e = random_divisor(&mut rng, &ids, 3);
            let f = random_divisor(&mut rng, &ids, 3);
            let lhs = chi_restriction(&config, &(&e + &f)).unwrap()
                - chi_restriction(&config, &e).unwrap()
                - chi_restriction(&config, &f).unwrap();
            let rhs = -rat(config.rank() as i64) * form.pair(&e, &f).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    /// The single-curve filtration identity on random orders: on every
    /// ramified vertex, chi(C) = e chi_cover(C) - ((e-1)/2e) r^2 C^2.
    #[test]
    fn filtration_identity_on_random_orders(seed in 0u64..500) {
        let config = random_order_config(seed, 6, 4).unwrap();
        let form = config.graph.intersection_form();
        let ram: Vec<(VertexId, u32)> =
            config.ramified_vertices().map(|(v, e)| (v.clone(), e)).collect();
        for (v, e) in ram {
            let c = Divisor::single(&v);
            let lhs = chi_restriction(&config, &c).unwrap();
            let cover = chi_a_mod_j(&config, &v).unwrap();
            let c2 = form.pair(&c, &c).unwrap();
            let e = e as i64;
            let rhs = rat(e) * cover - frac(e - 1, 2 * e) * rat(config.rank() as i64) * c2;
            prop_assert_eq!(lhs, rhs, "vertex {}", v);
        }
    }
}

/// Every catalogued log terminal graph has all surface discrepancies in
/// (-1, 0]: strictly above the log terminal threshold and never positive.
#[test]
fn catalogued_log_terminal_graphs_have_alpha_in_unit_interval() {
    let mut graphs: Vec<ResolutionGraph> = Vec::new();
    for n in 2..=30u64 {
        for q in 1..n {
            if n.gcd(&q) == 1 {
                graphs.push(cyclic(n, q).unwrap());
            }
        }
    }
    for seed in 0..200u64 {
        graphs.push(random_log_terminal(seed, 8, 5).unwrap());
    }
    for graph in &graphs {
        assert!(is_log_terminal_graph(graph));
        for (id, alpha) in surface_discrepancies(graph).unwrap() {
            assert!(alpha > rat(-1) && alpha <= rat(0), "{id}: {alpha}");
        }
    }
}
