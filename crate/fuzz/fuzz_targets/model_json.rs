#![no_main]
use featboost::boosting::BoostedModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(model) = BoostedModel::from_json(data) {
        let text = model.to_json();
        let again = BoostedModel::from_json(&text).expect("serialized model parses");
        assert_eq!(again.to_json(), text);
    }
});
