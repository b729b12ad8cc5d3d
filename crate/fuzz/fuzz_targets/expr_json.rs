#![no_main]
use clique_forest::diffeo::DiffeoExpr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(e) = DiffeoExpr::from_json(text) {
        let _ = e.compile().map(|m| m.eval_lift(0.5));
    }
});
