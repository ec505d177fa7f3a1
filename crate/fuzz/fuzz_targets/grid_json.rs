#![no_main]

use fairnfr::harness::GridSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(grid) = serde_json::from_slice::<GridSpec>(data) {
        // Expansion must not panic; cap the work on huge grids.
        let cells = [
            grid.datasets.len(),
            grid.seeds.len(),
            grid.directs.len(),
            grid.alphas.len(),
            grid.list_sizes.len(),
            grid.cache_sizes.len(),
            grid.qualities.len(),
            grid.algorithms.len(),
        ]
        .iter()
        .fold(1usize, |acc, &n| acc.saturating_mul(n));
        if cells < 10_000 {
            let _ = grid.expand();
        }
    }
});
