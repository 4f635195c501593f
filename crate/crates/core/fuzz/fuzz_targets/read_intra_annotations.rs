#![no_main]

use chardep::io::parse_intra_annotations;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_intra_annotations(text);
    }
});
