#![no_main]

use chardep::training::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config(text) {
        // The canonical rendering of a valid config reads back identically.
        let again = parse_config(&cfg.to_text()).expect("rendered config parses");
        assert_eq!(again, cfg);
    }
});
