#![no_main]
use libfuzzer_sys::fuzz_target;
use theta_opers::curve::CurveConfig;
use theta_opers::parse::parse_curve_spec;

// Building a curve runs root finding and period quadrature, so keep the degree small.
const MAX_FUZZ_DEGREE: usize = 7;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_curve_spec(text) else { return };
    if spec.f.len() > MAX_FUZZ_DEGREE + 1 || spec.f.iter().any(|c| c.norm() > 1e6) {
        return;
    }
    if let Ok(curve) = spec.build(CurveConfig::default()) {
        let omega = curve.riemann_matrix();
        assert_eq!(omega.genus(), curve.genus());
        assert!(omega.min_im_eigenvalue() > 0.0);
    }
});
