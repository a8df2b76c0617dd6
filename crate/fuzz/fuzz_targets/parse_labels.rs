#![no_main]
use libfuzzer_sys::fuzz_target;
use mimb::data::{parse_labels, reindex_labels};

fuzz_target!(|text: &str| {
    if let Ok(raw) = parse_labels(text) {
        let labels = reindex_labels(&raw);
        assert_eq!(labels.len(), raw.len());
        let mut distinct = raw.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert!(labels.iter().all(|&l| l < distinct.len()));
    }
});
