#![no_main]
use clique_forest::raag::SimpleGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = SimpleGraph::parse_dot(text) {
        let again = SimpleGraph::parse_dot(&g.to_dot()).expect("dot round trip");
        assert_eq!(again, g);
    }
});
