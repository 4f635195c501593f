#![no_main]

use chardep::io::parse_plain_text;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(items) = parse_plain_text(text) {
        for (sentence, seg) in &items {
            assert!(!sentence.is_empty());
            assert_eq!(seg.len(), sentence.len());
        }
    }
});
