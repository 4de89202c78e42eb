#![no_main]

use libfuzzer_sys::fuzz_target;
use settlegen::manifest::SettlementManifest;

// Manifest files cross the generator/evaluator boundary; arbitrary JSON
// must deserialize cleanly or fail cleanly.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = serde_json::from_str::<SettlementManifest>(text);
    }
});
