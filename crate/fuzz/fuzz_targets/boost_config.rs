#![no_main]
use featboost::boosting::BoostParams;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(params) = BoostParams::from_toml_str(data) {
        let _ = params.validate();
    }
});
