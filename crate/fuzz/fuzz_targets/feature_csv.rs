#![no_main]
use featboost::data::{parse_feature_csv, write_feature_csv};
use libfuzzer_sys::fuzz_target;

// Anything that parses must survive a write/parse round trip unchanged.
fuzz_target!(|data: &[u8]| {
    if let Ok(ds) = parse_feature_csv(data) {
        let bytes = write_feature_csv(&ds).expect("parsed datasets serialize");
        assert_eq!(parse_feature_csv(&bytes).expect("written CSV parses"), ds);
    }
});
