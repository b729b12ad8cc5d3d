#![no_main]
use clique_forest::decimal;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(x) = decimal::parse(text) {
        assert_eq!(decimal::parse(&decimal::format(x)), Ok(x));
    }
});
