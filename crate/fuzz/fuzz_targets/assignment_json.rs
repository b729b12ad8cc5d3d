#![no_main]
use clique_forest::synth::GeneratorAssignment;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = GeneratorAssignment::from_json(text) {
        let back = GeneratorAssignment::from_json(&a.to_json()).expect("accepted input re-serializes");
        assert_eq!(back.layout.len(), a.layout.len());
    }
});
