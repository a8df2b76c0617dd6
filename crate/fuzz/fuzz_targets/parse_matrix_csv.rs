#![no_main]
use libfuzzer_sys::fuzz_target;
use mimb::data::{matrix_to_csv, parse_matrix_csv};

// First byte selects header handling; the rest is the file body.
fuzz_target!(|data: &[u8]| {
    let Some((&flag, body)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(body) else {
        return;
    };
    let Ok(m) = parse_matrix_csv(text, flag & 1 == 1) else {
        return;
    };
    let again = parse_matrix_csv(&matrix_to_csv(&m), false).expect("written matrix parses");
    assert_eq!(m.shape(), again.shape());
    for (a, b) in m.iter().zip(again.iter()) {
        assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
    }
});
