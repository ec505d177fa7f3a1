#![no_main]

use fairnfr::demand::parse_policy_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(policy) = parse_policy_csv(text) {
        let again = parse_policy_csv(&policy.to_csv_string()).expect("re-parse");
        assert_eq!(again.size(), policy.size());
    }
});
