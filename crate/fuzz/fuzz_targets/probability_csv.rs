#![no_main]
use featboost::data::{parse_probabilities, write_probabilities};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((ids, probs)) = parse_probabilities(data) {
        assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
        let bytes = write_probabilities(&ids, &probs).expect("parsed probabilities serialize");
        assert_eq!(parse_probabilities(&bytes).expect("written CSV parses"), (ids, probs));
    }
});
