#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((ids, labels)) = featboost::data::parse_labels(data) {
        assert_eq!(ids.len(), labels.len());
        assert!(labels.iter().all(|&y| y <= 1));
    }
});
