#![no_main]

use fading_laguerre_cli::commands::family_from_args;
use libfuzzer_sys::fuzz_target;

// First line is the family name, each further line one KEY=VALUE argument.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut lines = text.lines();
    let Some(name) = lines.next() else { return };
    let params: Vec<String> = lines.map(String::from).collect();
    if let Ok(family) = family_from_args(name, &params) {
        assert!(family.validate().is_ok());
    }
});
