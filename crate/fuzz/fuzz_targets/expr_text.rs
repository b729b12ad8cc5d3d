#![no_main]
use clique_forest::diffeo::DiffeoExpr;
use libfuzzer_sys::fuzz_target;

// Parsed maps are compiled and probed at a few points.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(e) = DiffeoExpr::parse(text) {
        if let Ok(map) = e.compile() {
            for x in [0.0, 0.25, 0.5, 0.75] {
                let _ = map.eval_with_derivative(x);
            }
        }
        let json = e.to_json();
        assert_eq!(DiffeoExpr::from_json(&json).expect("json round trip").to_json(), json);
    }
});
