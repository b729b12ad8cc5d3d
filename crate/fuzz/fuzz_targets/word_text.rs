#![no_main]
use clique_forest::diffeo::Word;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let names: Vec<String> = ["f", "g1", "g2", "h1"].iter().map(|s| s.to_string()).collect();
    if let Ok(w) = Word::parse(text, &names) {
        let _ = w.inverse().len();
    }
});
