#![no_main]

use chardep::convert::recover_word_tree;
use chardep::io::{format_char_trees, parse_char_trees};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(items) = parse_char_trees(text) {
        let again = parse_char_trees(&format_char_trees(&items)).expect("formatted output parses");
        assert_eq!(again, items);
        for (_, tree) in &items {
            // Recovery may reject a tree, but must not panic.
            let _ = recover_word_tree(tree);
        }
    }
});
