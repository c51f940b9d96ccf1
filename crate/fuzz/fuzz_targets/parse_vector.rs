#![no_main]
use libfuzzer_sys::fuzz_target;
use theta_opers::parse::parse_vector;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_vector(text) {
        assert!(v.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
    }
});
