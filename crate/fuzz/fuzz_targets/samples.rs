#![no_main]

use fading_laguerre::coefficients::{empirical_moments, fit_spec, parse_samples};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(samples) = parse_samples(text) else { return };
    assert!(!samples.is_empty());
    assert!(samples.iter().all(|v| v.is_finite() && *v >= 0.0));
    if let Ok(provider) = empirical_moments(&samples, 2.0, 4) {
        let _ = fit_spec(&provider, 2.0);
    }
});
