#![no_main]
use libfuzzer_sys::fuzz_target;
use theta_opers::parse::{parse_curve_spec, MAX_DEGREE};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_curve_spec(text) {
        assert!(spec.f.len() <= MAX_DEGREE + 1);
        assert!(spec.f.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
    }
});
