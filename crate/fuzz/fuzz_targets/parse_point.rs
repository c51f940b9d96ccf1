#![no_main]
use libfuzzer_sys::fuzz_target;
use theta_opers::parse::parse_point;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((x, sheet)) = parse_point(text) {
        assert!(x.re.is_finite() && x.im.is_finite());
        assert!(sheet == 1 || sheet == -1);
    }
});
