#![no_main]

use chardep::io::{format_conll, parse_conll};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sentences) = parse_conll(text) {
        // Whatever parses must survive a write/read cycle unchanged.
        let items: Vec<_> = sentences.iter().map(|s| (s.sentence.clone(), s.tree.clone())).collect();
        let again = parse_conll(&format_conll(&items)).expect("formatted output parses");
        let trees: Vec<_> = again.into_iter().map(|s| s.tree).collect();
        let orig: Vec<_> = items.into_iter().map(|(_, t)| t).collect();
        assert_eq!(trees, orig);
    }
});
