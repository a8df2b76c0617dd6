#![no_main]
use libfuzzer_sys::fuzz_target;
use mimb_cli::parse_config;

fuzz_target!(|text: &str| {
    if let Ok(config) = parse_config(text) {
        let echoed = serde_json::to_string(&config).unwrap();
        assert_eq!(parse_config(&echoed).unwrap(), config);
    }
});
