#![no_main]

use fairnfr::catalog::parse_demand_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = parse_demand_csv(text) {
        let sum: f64 = d.as_slice().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(d.as_slice().iter().all(|&p| p >= 0.0));
    }
});
