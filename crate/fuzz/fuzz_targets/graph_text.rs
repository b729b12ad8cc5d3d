#![no_main]
use clique_forest::raag::{is_clique_forest, SimpleGraph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = SimpleGraph::parse(text) {
        match is_clique_forest(&g) {
            Ok(forest) => assert!(forest.verify(&g)),
            Err(witness) => assert!(witness.verify(&g)),
        }
        let again = SimpleGraph::parse_edge_list(&g.to_edge_list()).expect("edge list round trip");
        assert_eq!(again, g);
    }
});
