#![no_main]
use featboost::data::FeatureMapTensor;
use libfuzzer_sys::fuzz_target;

// The encoding is canonical, so a successful decode re-encodes to the input.
fuzz_target!(|data: &[u8]| {
    if let Ok(t) = FeatureMapTensor::decode(data) {
        assert_eq!(t.encode(), data);
    }
});
