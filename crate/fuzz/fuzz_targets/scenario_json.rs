#![no_main]

use fairnfr::harness::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = serde_json::from_slice::<ScenarioConfig>(data) {
        let _ = cfg.validate();
        let text = serde_json::to_string(&cfg).expect("serialize");
        let back: ScenarioConfig = serde_json::from_str(&text).expect("round trip");
        assert_eq!(back, cfg);
    }
});
