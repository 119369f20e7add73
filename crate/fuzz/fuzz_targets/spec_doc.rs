#![no_main]

use fading_laguerre_cli::doc::Source;
use fading_laguerre_cli::{resolve, SpecDoc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = SpecDoc::from_json(text) else { return };
    assert!(doc.grid.count >= 2);
    let points = doc.grid.points();
    assert_eq!(points.last(), Some(&doc.grid.max));
    // Keep the fuzzer off the file system.
    if matches!(doc.source, Source::Empirical { .. }) {
        return;
    }
    if let Ok(r) = resolve(&doc, None) {
        assert!(r.coeffs.capacity() <= doc.n_max());
    }
});
