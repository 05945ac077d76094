//! Property tests for the algebraic core: group laws, action compatibility,
//! the energy composition identity, canonical-form invariance, and parser
//! round trips.

use proptest::prelude::*;

use rectgraph::comb::{canonical_key, compose_vertices, CombGraph};
use rectgraph::group::{compose, invert, GroupElement, IntVector, Sign};
use rectgraph::quadform::c_form;
use rectgraph::scalar::{format_scalar, parse_scalar, ratio};
use rectgraph::SiteSet;

fn arb_group_element(m: usize) -> impl Strategy<Value = GroupElement> {
    (
        proptest::collection::vec(-5i64..=5, m),
        proptest::bool::ANY,
    )
        .prop_map(|(v, tau)| GroupElement {
            translation: IntVector(v),
            sign: if tau { Sign::Tau } else { Sign::Plus },
        })
}

/// Mass-graded vector: coordinates adjusted so the sum is 0 or -2.
fn arb_vertex(m: usize) -> impl Strategy<Value = IntVector> {
    (
        proptest::collection::vec(-3i64..=3, m),
        proptest::bool::ANY,
    )
        .prop_map(|(mut v, red)| {
            let target = if red { -2 } else { 0 };
            let mass: i64 = v.iter().sum();
            v[0] += target - mass;
            IntVector(v)
        })
}

fn arb_sites(n: usize, m: usize) -> impl Strategy<Value = SiteSet> {
    proptest::collection::vec(proptest::collection::vec(-9i64..=9, n), m)
        .prop_filter_map("valid site set", move |rows| {
            SiteSet::from_integer_sites(n, &rows).ok()
        })
}

proptest! {
    #[test]
    fn group_is_associative(
        a in arb_group_element(4),
        b in arb_group_element(4),
        c in arb_group_element(4),
    ) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_is_two_sided(g in arb_group_element(5)) {
        let gi = invert(&g);
        prop_assert!(compose(&g, &gi).unwrap().is_identity());
        prop_assert!(compose(&gi, &g).unwrap().is_identity());
    }

    #[test]
    fn action_is_a_group_action(
        s in arb_sites(2, 3),
        g in arb_group_element(3),
        h in arb_group_element(3),
        x in proptest::collection::vec(-20i64..=20, 2),
    ) {
        let x: Vec<_> = x.into_iter().map(rectgraph::scalar::int).collect();
        let gh = compose(&g, &h).unwrap();
        let via_compose = s.act_point(&gh, &x).unwrap();
        let via_steps = s.act_point(&g, &s.act_point(&h, &x).unwrap()).unwrap();
        prop_assert_eq!(via_compose, via_steps);
    }

    #[test]
    fn energy_composition_identity(
        s in arb_sites(2, 4),
        g in arb_group_element(4),
        u in arb_group_element(4),
    ) {
        let (lhs, rhs) = s.k_composition_check(&g, &u).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn invariant_form_of_integral_elements_is_integral(g in arb_group_element(6)) {
        prop_assert!(c_form(&g).is_integral());
    }

    #[test]
    fn mass_encoding_composition_agrees_with_group(
        a in arb_vertex(4),
        b in arb_vertex(4),
    ) {
        let ge = compose(
            &rectgraph::comb::vertex_element(&a),
            &rectgraph::comb::vertex_element(&b),
        )
        .unwrap();
        prop_assert_eq!(compose_vertices(&a, &b), ge.translation);
    }

    #[test]
    fn canonical_key_is_invariant_under_root_changes(
        seeds in proptest::collection::vec(arb_vertex(3), 1..4),
    ) {
        let m = 3;
        let mut vs = seeds;
        vs.push(IntVector::zero(m));
        let g = CombGraph::full_subgraph(m, vs).unwrap();
        let key = canonical_key(&g);
        for root in g.vertices() {
            let t = g.translate_root(root).unwrap();
            prop_assert_eq!(canonical_key(&t), key.clone());
        }
    }

    #[test]
    fn scalar_text_round_trips(p in -10_000i64..10_000, q in 1i64..500) {
        let x = ratio(p, q);
        prop_assert_eq!(parse_scalar(&format_scalar(&x)).unwrap(), x);
    }

    #[test]
    fn site_set_json_round_trips(s in arb_sites(2, 3)) {
        let text = serde_json::to_string(&s).unwrap();
        let back: SiteSet = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn comb_graph_json_round_trips(seeds in proptest::collection::vec(arb_vertex(3), 0..4)) {
        let m = 3;
        let mut vs = seeds;
        vs.push(IntVector::zero(m));
        let g = CombGraph::full_subgraph(m, vs).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        let back: CombGraph = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn constraint_witnesses_reproduce(s in arb_sites(2, 4)) {
        let report = rectgraph::constraints::check_all(&s, 8);
        for v in &report.violations {
            prop_assert!(rectgraph::constraints::witness_reproduces(&s, v));
        }
    }

    #[test]
    fn geometric_edges_are_symmetric(
        s in arb_sites(2, 3),
        x in proptest::collection::vec(-10i64..=10, 2),
    ) {
        let p: Vec<_> = x.into_iter().map(rectgraph::scalar::int).collect();
        for (q, l) in rectgraph::geometry::neighbors(&s, &p) {
            let back = rectgraph::geometry::neighbors(&s, &q);
            prop_assert!(back.iter().any(|(r, l2)| r == &p && *l2 == l.invert()));
        }
    }
}
