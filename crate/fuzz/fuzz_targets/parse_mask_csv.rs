#![no_main]
use libfuzzer_sys::fuzz_target;
use mimb::data::parse_mask_csv;

fuzz_target!(|text: &str| {
    if let Ok(mask) = parse_mask_csv(text) {
        for j in 0..mask.n_samples() {
            assert!(mask.row_sum(j) >= 1);
        }
        assert_eq!(parse_mask_csv(&mask.to_csv()).unwrap(), mask);
    }
});
