#![no_main]
use clique_forest::obstruct::{center_nonabelian_check, find_centralizer_quadruple, parse_oracle, CommutationOracle as _};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(oracle) = parse_oracle(text) {
        if oracle.len() <= 64 {
            if let Some(cert) = find_centralizer_quadruple(&oracle) {
                assert!(cert.verify(&oracle));
            }
            let _ = center_nonabelian_check(&oracle);
        }
    }
});
