//! Fuzz the combinatorial-graph JSON decoder. Accepted graphs must have
//! valid masses, contain the root, and round-trip with identical recomputed
//! edges.

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(graph) = serde_json::from_str::<rectgraph::comb::CombGraph>(text) {
        assert!(graph
            .vertices()
            .iter()
            .all(|v| matches!(v.mass(), 0 | -2)));
        let out = serde_json::to_string(&graph).expect("serialize accepted graph");
        let again: rectgraph::comb::CombGraph =
            serde_json::from_str(&out).expect("round trip must reparse");
        assert_eq!(graph, again);
        assert_eq!(graph.edges(), again.edges());
    }
});
