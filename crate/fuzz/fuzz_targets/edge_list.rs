#![no_main]

use fairnfr::catalog::parse_edge_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(loaded) = parse_edge_list(text) {
        let again = parse_edge_list(&loaded.matrix.to_edge_list_string()).expect("re-parse");
        assert_eq!(again.matrix, loaded.matrix);
    }
});
