#![no_main]
use libfuzzer_sys::fuzz_target;
use theta_opers::parse::parse_complex;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_complex(text) {
        assert!(c.re.is_finite() && c.im.is_finite());
    }
});
