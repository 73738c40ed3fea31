#![no_main]
use std::path::Path;

use featboost::grid::GridSpec;
use libfuzzer_sys::fuzz_target;

// Relative config paths resolve under a directory that does not exist, so
// every referenced file read fails cleanly.
fuzz_target!(|data: &str| {
    if let Ok(spec) = GridSpec::parse(data, Path::new("/nonexistent-fuzz-base"), "fuzz") {
        assert!(!spec.magnifications.is_empty());
    }
});
